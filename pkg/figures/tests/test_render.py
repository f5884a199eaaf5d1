import hashlib

import pytest

from cprfigures import RenderError, data_checksum, plot_data, render
from cprfigures.render import main

from conftest import PRESET_KINDS, run_cprlab


class TestRenderAllPresets:
    def test_all_presets_render(self, preset_csvs, tmp_path):
        for name, csv_path in preset_csvs.items():
            out = tmp_path / f"{name}.png"
            render(str(csv_path), PRESET_KINDS[name], str(out), timestamp=False)
            assert out.exists() and out.stat().st_size > 1000, name


class TestChecksumInvariant:
    @staticmethod
    def independent_checksum(csv_path, kind):
        """Re-derive the plotted-series hash straight from the file, without
        going through the renderer's parser."""
        x_col = {"vs-variance": "sigma2_total", "comparison": "sigma2_total",
                 "vs-linewidth": "linewidth_hz", "vs-distance": "distance_km"}[kind]
        rows = []
        header = None
        for line in open(csv_path):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append(dict(zip(header, line.split(","))))
        floor_col = "ber_floor" if "ber_floor" in header else "analytic_floor"
        series = {}
        for row in rows:
            key = (row["algorithm"], int(row["n"]), int(row["block_length"]))
            series.setdefault(key, []).append(
                (float(row[x_col]), float(row[floor_col])))
        h = hashlib.sha256()
        for key in sorted(series):
            h.update(repr(key).encode())
            pts = sorted(series[key])
            h.update(b"x")
            for x, _ in pts:
                h.update(repr(x).encode())
            h.update(b"floor")
            for _, y in pts:
                h.update(repr(y).encode())
            for field in ("mc_x", "mc", "below_x", "below_y"):
                h.update(field.encode())
        return h.hexdigest()

    @pytest.mark.parametrize("name", ["fig5", "fig8a", "fig13", "fig14b"])
    def test_plotted_equals_csv(self, preset_csvs, tmp_path, name):
        kind = PRESET_KINDS[name]
        csv_path = preset_csvs[name]
        series = render(str(csv_path), kind, str(tmp_path / "x.png"),
                        timestamp=False)
        assert data_checksum(series) == self.independent_checksum(csv_path, kind)


class TestSeriesStructure:
    def test_fig5_has_four_series(self, preset_csvs, tmp_path):
        series = render(str(preset_csvs["fig5"]), "vs-variance",
                        str(tmp_path / "fig5.png"), timestamp=False)
        assert len(series) == 4
        assert {k[1] for k in series} == {4, 8, 16, 32}

    def test_below_resolution_markers(self, tmp_path):
        csv_path = run_cprlab(
            ["simulate", "--algorithm", "vv", "--order", "8",
             "--sigma2", "0.0,0.01", "--symbols", "500000", "--seed", "1",
             "--mode", "both"], tmp_path / "mc.csv")
        _, series = plot_data(str(csv_path), "vs-variance")
        entry = series[("vv", 8, 11)]
        assert len(entry["below_y"]) == 1     # the zero-variance point
        assert len(entry["mc"]) == 1          # the measurable point
        render(str(csv_path), "vs-variance", str(tmp_path / "mc.png"),
               timestamp=False)


class TestErrors:
    def test_empty_body_no_image(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("# cprlab 0.1.0\nalgorithm,n,sigma2_total,block_length,ber_floor\n")
        out = tmp_path / "empty.png"
        with pytest.raises(RenderError, match="no data rows"):
            render(str(bad), "vs-variance", str(out))
        assert not out.exists()

    def test_missing_columns_named(self, tmp_path):
        bad = tmp_path / "cols.csv"
        bad.write_text("algorithm,n,ber_floor\nvv,8,1e-5\n")
        with pytest.raises(RenderError, match="block_length"):
            render(str(bad), "vs-variance", str(tmp_path / "c.png"))

    def test_unknown_kind(self, tmp_path, preset_csvs):
        with pytest.raises(RenderError, match="kind"):
            plot_data(str(preset_csvs["fig5"]), "vs-power")

    def test_cli_error_exit_code(self, tmp_path):
        bad = tmp_path / "none.csv"
        code = main([str(bad), "vs-variance", str(tmp_path / "o.png")])
        assert code == 2


class TestDeterminism:
    def test_no_timestamp_byte_identical(self, preset_csvs, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        assert main([str(preset_csvs["fig5"]), "vs-variance", str(a),
                     "--no-timestamp"]) == 0
        assert main([str(preset_csvs["fig5"]), "vs-variance", str(b),
                     "--no-timestamp"]) == 0
        assert a.read_bytes() == b.read_bytes()
