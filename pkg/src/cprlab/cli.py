"""Command-line front end: floor / simulate / link / presets subcommands.

CSV output is self-describing: `#`-prefixed header lines carry the tool
version, the exact command line and the fully resolved parameter set, so
re-running the embedded command reproduces the file (analytic columns
bit-exactly, Monte-Carlo columns seed-exactly).  All diagnostics go to stderr;
stdout carries nothing but the CSV.
"""

from __future__ import annotations

import argparse
import configparser
import shlex
import sys
from typing import Optional

import numpy as np

from . import __version__
from . import analytics, noise
from .experiments import (DECODING_MODES, EEPN_MODES, MIN_MC_SYMBOLS, McSettings,
                          PRESETS, SweepSpec, preset_spec, run_sweep)
from .noise import LinkParams

_FLOOR_COLUMNS = ("algorithm", "n", "sigma2_total", "block_length", "ber_floor")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


class UsageError(ValueError):
    pass


def _build_link(args, cfg) -> LinkParams:
    def pick(flag, section_key, default=None):
        v = getattr(args, flag, None)
        if v is None:
            v = cfg.get("link", {}).get(section_key, default)
        return v

    tx = pick("tx_linewidth", "tx_linewidth_hz", 1e6)
    lo = pick("lo_linewidth", "lo_linewidth_hz", 1e6)
    baud = pick("baud", "baud", 32e9)
    lam = pick("wavelength", "wavelength_m", 1550e-9)
    disp = pick("dispersion", "dispersion_ps_nm_km", 17.0)
    dist = pick("distance", "distance_km", 0.0)
    return LinkParams.from_practical(
        delta_f_tx=float(tx), delta_f_lo=float(lo), symbol_rate=float(baud),
        wavelength=float(lam), dispersion_ps_nm_km=float(disp),
        fiber_length_km=float(dist))


_CONFIG_SCHEMA = {
    "link": {"tx_linewidth_hz": float, "lo_linewidth_hz": float, "baud": float,
             "wavelength_m": float, "dispersion_ps_nm_km": float,
             "distance_km": float},
    "cpr": {"algorithm": str, "order": int, "mu": float, "block_length": int,
            "averaging": str},
    "sweep": {"preset": str, "sigma2": str, "mode": str},
    "mc": {"symbols": int, "frames": int, "frame_length": int, "seed": int,
           "decoding": str, "snr_db": float, "eepn": str},
}


def load_config(path: str) -> dict:
    """Flat INI config under [link], [cpr], [sweep], [mc]; unknown keys and
    invalid values are rejected at load time."""
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    out: dict = {}
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise UsageError(f"unknown config section [{section}]")
        schema = _CONFIG_SCHEMA[section]
        sec_out = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise UsageError(f"unknown key '{key}' in section [{section}]")
            try:
                sec_out[key] = schema[key](raw)
            except ValueError:
                raise UsageError(f"invalid value {raw!r} for key '{key}' "
                                 f"in section [{section}]")
        out[section] = sec_out
    _validate_config(out)
    return out


def _validate_config(cfg: dict) -> None:
    cpr = cfg.get("cpr", {})
    if "algorithm" in cpr and cpr["algorithm"] not in analytics.ALGORITHMS:
        raise UsageError(f"algorithm must be one of {analytics.ALGORITHMS}")
    if "order" in cpr and cpr["order"] not in (4, 8, 16, 32):
        raise UsageError("order must be one of 4, 8, 16, 32")
    if "mu" in cpr and not 0.0 < cpr["mu"] <= 1.0:
        raise UsageError("mu must satisfy 0 < mu <= 1")
    if "block_length" in cpr:
        nb = cpr["block_length"]
        if nb < 1:
            raise UsageError("block_length must be >= 1")
        if cpr.get("algorithm") == "vv" and nb % 2 == 0:
            raise UsageError("N_VV must be odd")
    sweep = cfg.get("sweep", {})
    if "preset" in sweep and sweep["preset"] not in PRESETS:
        raise UsageError(f"unknown preset {sweep['preset']!r}; known presets: "
                         + ", ".join(sorted(PRESETS)))
    if "mode" in sweep and sweep["mode"] not in ("analytic", "montecarlo", "both"):
        raise UsageError("mode must be analytic, montecarlo or both")
    mc = cfg.get("mc", {})
    if "decoding" in mc and mc["decoding"] not in DECODING_MODES:
        raise UsageError(f"decoding must be one of {DECODING_MODES}")
    if "eepn" in mc and mc["eepn"] not in EEPN_MODES:
        raise UsageError(f"eepn must be one of {EEPN_MODES}")
    if "symbols" in mc and mc["symbols"] < MIN_MC_SYMBOLS:
        raise UsageError(f"montecarlo mode needs >= {MIN_MC_SYMBOLS} symbols")


def _parse_grid(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _resolve_sweep(args, cfg, mode: str, mc: Optional[McSettings]) -> SweepSpec:
    preset = getattr(args, "preset", None) or cfg.get("sweep", {}).get("preset")
    if preset is not None:
        return preset_spec(preset, mode=mode, mc=mc)

    cpr_cfg = cfg.get("cpr", {})
    algorithm = args.algorithm or cpr_cfg.get("algorithm")
    if algorithm is None:
        raise UsageError("--algorithm (or a preset) is required")
    order = args.order if args.order is not None else cpr_cfg.get("order", 8)
    block = args.block_length if args.block_length is not None \
        else cpr_cfg.get("block_length", 11)
    if algorithm == "vv" and block % 2 == 0:
        raise UsageError("N_VV must be odd")

    sigma2_text = args.sigma2 or cfg.get("sweep", {}).get("sigma2")
    have_sigma2 = sigma2_text is not None
    have_lw = args.linewidth is not None
    have_dist = args.distance is not None
    if have_sigma2 + have_lw + have_dist != 1:
        raise UsageError("specify exactly one of --sigma2 | --linewidth | --distance")

    base = {"algorithm": algorithm, "order": int(order), "block_length": int(block)}
    if args.mu is not None:
        base["mu"] = args.mu
    elif "mu" in cpr_cfg:
        base["mu"] = cpr_cfg["mu"]
    decoding = getattr(args, "decoding", None) or cfg.get("mc", {}).get("decoding")
    if decoding:
        base["decoding"] = decoding
    eepn = getattr(args, "eepn", None) or cfg.get("mc", {}).get("eepn")
    if eepn:
        base["eepn"] = eepn
    snr = getattr(args, "snr", None)
    if snr is None:
        snr = cfg.get("mc", {}).get("snr_db")
    if snr is not None:
        base["snr_db"] = snr
    if "averaging" in cpr_cfg:
        base["averaging"] = cpr_cfg["averaging"]

    if have_sigma2:
        axes = {"sigma2": _parse_grid(sigma2_text)}
    elif have_lw:
        axes = {"linewidth": _parse_grid(args.linewidth)}
    else:
        axes = {"distance_km": _parse_grid(args.distance)}
    return SweepSpec(axes=axes, base=base, mode=mode, mc=mc)


def _header_lines(args, argv, spec: Optional[SweepSpec]) -> list[str]:
    lines = [f"# cprlab {__version__}",
             f"# command: {shlex.join(['cprlab'] + list(argv))}"]
    if spec is not None:
        if spec.preset:
            lines.append(f"# preset = {spec.preset}")
            lines.append(f"# description = {PRESETS[spec.preset]['description']}")
        lines.append(f"# mode = {spec.mode}")
        for key, grid in spec.axes.items():
            lines.append(f"# axis.{key} = " + ",".join(_fmt(v) for v in grid))
        for key, val in sorted(spec.base.items()):
            lines.append(f"# base.{key} = {_fmt(val)}")
        if spec.mc is not None:
            lines.append(f"# mc.symbols = {_fmt(spec.mc.symbols_per_point)}")
            lines.append(f"# mc.frame_length = {spec.mc.frame_length}")
            lines.append(f"# mc.seed = {spec.mc.base_seed}")
    return lines


def _axis_columns(results) -> list[str]:
    cols = []
    if any(r.linewidth_hz is not None for r in results):
        cols.append("linewidth_hz")
    if any(r.distance_km is not None for r in results):
        cols.append("distance_km")
    return cols


def _write_floor_csv(out, results, header):
    extra = _axis_columns(results)
    print("\n".join(header), file=out)
    print(",".join(_FLOOR_COLUMNS + tuple(extra)), file=out)
    for r in results:
        row = [r.algorithm, str(r.order), _fmt(r.sigma2_total),
               str(r.block_length), _fmt(r.analytic_floor)]
        row += [_fmt(getattr(r, c)) for c in extra]
        print(",".join(row), file=out)


def _write_simulate_csv(out, results, header, mode):
    extra = _axis_columns(results)
    cols = ["algorithm", "n", "sigma2_total", "block_length", "mu", "decoding",
            "eepn"] + extra + ["analytic_floor", "mc_floor", "ci_low", "ci_high",
                               "errors", "symbols", "seed", "below_resolution"]
    print("\n".join(header), file=out)
    print(",".join(cols), file=out)
    mc_on = mode in ("montecarlo", "both")
    for r in results:
        row = [r.algorithm, str(r.order), _fmt(r.sigma2_total), str(r.block_length),
               _fmt(r.mu), r.decoding, r.eepn]
        row += [_fmt(getattr(r, c)) for c in extra]
        row.append(_fmt(r.analytic_floor))
        if mc_on:
            row += [_fmt(r.measured_floor), _fmt(r.ci_low), _fmt(r.ci_high),
                    str(r.bit_errors), str(r.symbols), _fmt(r.seed),
                    _fmt(bool(r.below_resolution))]
        else:
            row += ["", "", "", "", "", "", ""]
        print(",".join(row), file=out)


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w"), True
    return sys.stdout, False


def cmd_floor(args, argv) -> int:
    cfg = load_config(args.config) if args.config else {}
    spec = _resolve_sweep(args, cfg, mode="analytic", mc=None)
    results = run_sweep(spec)
    out, close = _open_out(args)
    try:
        _write_floor_csv(out, results, _header_lines(args, argv, spec))
    finally:
        if close:
            out.close()
    return 0


def cmd_simulate(args, argv) -> int:
    cfg = load_config(args.config) if args.config else {}
    mc_cfg = cfg.get("mc", {})
    symbols = args.symbols if args.symbols is not None else mc_cfg.get("symbols")
    if symbols is not None and symbols < MIN_MC_SYMBOLS:
        raise UsageError(f"montecarlo mode needs >= {MIN_MC_SYMBOLS} symbols per point")
    frames = args.frames if args.frames is not None else mc_cfg.get("frames")
    if frames is not None:
        if symbols is None:
            raise UsageError("--frames requires --symbols")
        if frames < 1:
            raise UsageError("--frames must be >= 1")
        frame_length = int(np.ceil(symbols / frames))
    else:
        frame_length = args.frame_length or mc_cfg.get("frame_length", 1 << 16)
    seed = args.seed if args.seed is not None else mc_cfg.get("seed", 0)
    mode = args.mode or cfg.get("sweep", {}).get("mode", "both")
    mc = McSettings(symbols_per_point=symbols, frame_length=int(frame_length),
                    base_seed=int(seed)) if mode != "analytic" else None
    spec = _resolve_sweep(args, cfg, mode=mode, mc=mc)
    results = run_sweep(spec)
    out, close = _open_out(args)
    try:
        _write_simulate_csv(out, results, _header_lines(args, argv, spec), mode)
    finally:
        if close:
            out.close()
    return 0


def cmd_link(args, argv) -> int:
    cfg = load_config(args.config) if args.config else {}
    link = _build_link(args, cfg)
    s_laser = noise.laser_pn_variance(link)
    s_eepn = noise.eepn_variance(link)
    s_total = noise.total_variance(link)
    eff = noise.effective_linewidth(link)
    print(f"symbol rate        : {_fmt(link.symbol_rate)} baud")
    print(f"wavelength         : {_fmt(link.wavelength)} m")
    print(f"dispersion         : {_fmt(link.dispersion_ps_nm_km)} ps/nm/km")
    print(f"distance           : {_fmt(link.fiber_length_km)} km")
    print(f"sigma2_laser       : {_fmt(s_laser)} rad^2")
    print(f"sigma2_eepn        : {_fmt(s_eepn)} rad^2")
    print(f"sigma2_total       : {_fmt(s_total)} rad^2")
    print(f"effective linewidth: {_fmt(eff)} Hz")
    if link.dispersion > 0:
        l0 = noise.crossover_distance(link)
        print(f"crossover L0       : {_fmt(l0)} m ({_fmt(l0 / 1e3)} km)")
        print("# note: the formula 8*c*T_S^2/(lambda^2*D) gives 57.345 km at "
              "32 Gbaud / 1550 nm / 17 ps/nm/km; a figure of 60.69 km has "
              "circulated for the same parameters and does not satisfy the "
              "formula, so this tool reports the formula value.")
    return 0


def cmd_presets(args, argv) -> int:
    for name in sorted(PRESETS):
        print(f"{name:8s} {PRESETS[name]['description']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cprlab",
        description="carrier-phase-recovery BER-floor laboratory")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_scenario_flags(p):
        p.add_argument("--preset", help="figure preset name (see `cprlab presets`)")
        p.add_argument("--algorithm", choices=analytics.ALGORITHMS)
        p.add_argument("--order", type=int, choices=(4, 8, 16, 32))
        p.add_argument("--block-length", type=int, dest="block_length")
        p.add_argument("--mu", type=float)
        p.add_argument("--sigma2", help="total phase-noise variance grid, comma separated")
        p.add_argument("--linewidth", help="per-laser 3-dB linewidth grid [Hz], back-to-back")
        p.add_argument("--distance", help="fiber length grid [km], 1 MHz lasers")
        p.add_argument("--baud", type=float)
        p.add_argument("--config", help="INI config file; flags override file values")
        p.add_argument("--out", help="output CSV path (default stdout)")

    p_floor = sub.add_parser("floor", help="analytic BER floors over a grid")
    add_scenario_flags(p_floor)
    p_floor.set_defaults(func=cmd_floor)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo + analytic floors")
    add_scenario_flags(p_sim)
    p_sim.add_argument("--symbols", type=int, help="symbols per point")
    p_sim.add_argument("--frames", type=int, help="frame count per point")
    p_sim.add_argument("--frame-length", type=int, dest="frame_length")
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--decoding", choices=DECODING_MODES)
    p_sim.add_argument("--mode", choices=("analytic", "montecarlo", "both"))
    p_sim.add_argument("--eepn", choices=EEPN_MODES)
    p_sim.add_argument("--snr", type=float, help="per-symbol SNR [dB]; omit for noiseless")
    p_sim.set_defaults(func=cmd_simulate)

    p_link = sub.add_parser("link", help="phase-noise variance report for one link")
    p_link.add_argument("--tx-linewidth", type=float, dest="tx_linewidth")
    p_link.add_argument("--lo-linewidth", type=float, dest="lo_linewidth")
    p_link.add_argument("--baud", type=float)
    p_link.add_argument("--wavelength", type=float)
    p_link.add_argument("--dispersion", type=float, help="ps/nm/km")
    p_link.add_argument("--distance", type=float, help="km")
    p_link.add_argument("--config")
    p_link.set_defaults(func=cmd_link)

    p_presets = sub.add_parser("presets", help="list figure presets")
    p_presets.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except (UsageError, ValueError) as exc:
        print(f"cprlab: error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
