"""Render BER-floor figure families from cprlab CSV sweep files.

The renderer never recomputes physics: every plotted value is parsed from the
CSV.  `plot_data` returns the exact series arrays that get drawn, and
`data_checksum` hashes them, so callers can verify the plotted data against
the file independently.

Invoked as a script:

    cprlab-figures INPUT.csv {vs-variance,vs-linewidth,vs-distance,comparison} OUT.png [--no-timestamp]
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from datetime import datetime, timezone

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

BER_CLAMP = 1e-40  # display clamp matching the depth of the deepest curves

KINDS = {
    "vs-variance": ("sigma2_total", "total phase-noise variance [rad$^2$]", "log"),
    "vs-linewidth": ("linewidth_hz", "laser 3-dB linewidth [Hz]", "log"),
    "vs-distance": ("distance_km", "transmission distance [km]", "linear"),
    "comparison": ("sigma2_total", "total phase-noise variance [rad$^2$]", "log"),
}


class RenderError(ValueError):
    pass


def parse_csv(path: str):
    """Split a cprlab CSV into (metadata dict, column names, row dicts)."""
    meta = {}
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    meta[key.strip()] = val.strip()
                elif ":" in body:
                    key, val = body.split(":", 1)
                    meta[key.strip()] = val.strip()
                else:
                    meta.setdefault("banner", body)
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append(dict(zip(header, line.split(","))))
    if header is None or not rows:
        raise RenderError(f"CSV {path} has no data rows")
    return meta, header, rows


def _require_columns(header, needed):
    missing = [c for c in needed if c not in header]
    if missing:
        raise RenderError("CSV is missing required columns: " + ", ".join(missing))


def plot_data(path: str, kind: str):
    """Extract the per-series arrays that will be plotted.

    Returns (meta, series) with series mapping (algorithm, n, block_length) to
    a dict of x, floor and optional Monte-Carlo arrays.  Values come straight
    from the CSV; nothing is recomputed.
    """
    if kind not in KINDS:
        raise RenderError(f"unknown figure kind {kind!r}; expected one of {sorted(KINDS)}")
    x_col = KINDS[kind][0]
    meta, header, rows = parse_csv(path)
    floor_col = "ber_floor" if "ber_floor" in header else "analytic_floor"
    _require_columns(header, ["algorithm", "n", "block_length", x_col, floor_col])
    has_mc = "mc_floor" in header

    series: dict = {}
    for row in rows:
        key = (row["algorithm"], int(row["n"]), int(row["block_length"]))
        entry = series.setdefault(key, {"x": [], "floor": [], "mc": [], "mc_x": [],
                                        "below_x": [], "below_y": []})
        x = float(row[x_col])
        entry["x"].append(x)
        entry["floor"].append(float(row[floor_col]))
        if has_mc:
            if row["mc_floor"] != "":
                entry["mc_x"].append(x)
                entry["mc"].append(float(row["mc_floor"]))
            elif row.get("below_resolution") == "1" and row.get("ci_high"):
                # zero observed errors: show the upper confidence bound
                entry["below_x"].append(x)
                entry["below_y"].append(float(row["ci_high"]))
    for entry in series.values():
        order = np.argsort(entry["x"])
        for k in ("x", "floor"):
            entry[k] = list(np.asarray(entry[k])[order])
    return meta, series


def data_checksum(series) -> str:
    """SHA-256 over a canonical serialization of the plotted arrays."""
    h = hashlib.sha256()
    for key in sorted(series):
        h.update(repr(key).encode())
        entry = series[key]
        for field in ("x", "floor", "mc_x", "mc", "below_x", "below_y"):
            h.update(field.encode())
            for v in entry[field]:
                h.update(repr(float(v)).encode())
    return h.hexdigest()


def render(csv_path: str, kind: str, out_path: str, timestamp: bool = True):
    """Render one figure and return the plotted series (for checksumming)."""
    meta, series = plot_data(csv_path, kind)
    x_col, x_label, x_scale = KINDS[kind]

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for (alg, order, block) in sorted(series):
        entry = series[(alg, order, block)]
        label = f"{alg.upper()} {order}-PSK"
        if alg in ("bwa", "vv"):
            label += f" N={block}"
        y = np.maximum(np.asarray(entry["floor"], dtype=float), BER_CLAMP)
        ax.plot(entry["x"], y, marker=".", label=label)
        if entry["mc"]:
            ax.plot(entry["mc_x"], np.maximum(entry["mc"], BER_CLAMP), "o",
                    mfc="none", ms=7)
        if entry["below_y"]:
            ax.plot(entry["below_x"], np.maximum(entry["below_y"], BER_CLAMP),
                    "v", mfc="none", ms=8)

    ax.set_xscale(x_scale)
    ax.set_yscale("log")
    ax.set_ylim(bottom=BER_CLAMP)
    ax.set_xlabel(x_label)
    ax.set_ylabel("BER floor")
    title = meta.get("description") or meta.get("preset") or ""
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if timestamp:
        fig.text(0.01, 0.01, datetime.now(timezone.utc).isoformat(), fontsize=5)
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return series


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cprlab-figures",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="input CSV produced by the cprlab CLI")
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("out", help="output image path")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the render timestamp for byte-reproducible output")
    args = parser.parse_args(argv)
    try:
        render(args.csv, args.kind, args.out, timestamp=not args.no_timestamp)
    except (RenderError, OSError) as exc:
        print(f"cprlab-figures: error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
