import shlex
import sys

import numpy as np
import pytest

from cprlab.analytics import FloorQuery, floor_vv
from cprlab.cli import load_config, main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    return header, rows


class TestFloorCommand:
    def test_single_point_pass_through(self, capsys):
        code, out, err = run_cli(["floor", "--algorithm", "vv", "--order", "8",
                                  "--block-length", "11", "--sigma2", "0.01"], capsys)
        assert code == 0 and err == ""
        header, rows = parse_csv(out)
        assert header[:5] == ["algorithm", "n", "sigma2_total", "block_length", "ber_floor"]
        assert len(rows) == 1
        got = float(rows[0]["ber_floor"])
        assert got == floor_vv(FloorQuery(8, 0.01, block_length=11))

    def test_even_vv_block_rejected(self, capsys):
        code, out, err = run_cli(["floor", "--algorithm", "vv", "--order", "8",
                                  "--block-length", "10", "--sigma2", "0.01"], capsys)
        assert code == 2
        assert "N_VV must be odd" in err
        assert out == ""

    def test_preset_fig12_series(self, capsys):
        code, out, err = run_cli(["floor", "--preset", "fig12"], capsys)
        assert code == 0
        header, rows = parse_csv(out)
        assert "linewidth_hz" in header
        orders = {r["n"] for r in rows}
        assert orders == {"4", "8", "16", "32"}
        assert len(rows) == 4 * 25

    def test_conflicting_variance_flags(self, capsys):
        code, out, err = run_cli(["floor", "--algorithm", "nlms", "--order", "4",
                                  "--sigma2", "0.01", "--distance", "100"], capsys)
        assert code == 2
        assert "exactly one" in err

    def test_seventeen_digit_round_trip(self, capsys):
        code, out, _ = run_cli(["floor", "--algorithm", "nlms", "--order", "8",
                                "--sigma2", "0.0123456789"], capsys)
        _, rows = parse_csv(out)
        from cprlab.analytics import floor_nlms
        assert float(rows[0]["ber_floor"]) == floor_nlms(FloorQuery(8, 0.0123456789))


class TestSimulateCommand:
    def test_seed_reproducibility_byte_identical(self, capsys):
        args = ["simulate", "--algorithm", "bwa", "--order", "8",
                "--sigma2", "0.01", "--symbols", "20000", "--seed", "7",
                "--mode", "both"]
        _, out1, _ = run_cli(args, capsys)
        _, out2, _ = run_cli(args, capsys)
        assert out1 == out2

    def test_analytic_mode_empty_mc_columns(self, capsys):
        code, out, _ = run_cli(["simulate", "--algorithm", "vv", "--order", "8",
                                "--sigma2", "0.01", "--mode", "analytic"], capsys)
        assert code == 0
        _, rows = parse_csv(out)
        assert rows[0]["mc_floor"] == ""
        assert rows[0]["analytic_floor"] != ""

    def test_too_few_symbols(self, capsys):
        code, _, err = run_cli(["simulate", "--algorithm", "vv", "--order", "8",
                                "--sigma2", "0.01", "--symbols", "5000"], capsys)
        assert code == 2
        assert "10000" in err

    def test_frame_count_flag(self, capsys):
        args = ["simulate", "--algorithm", "bwa", "--order", "8",
                "--sigma2", "0.01", "--symbols", "40000", "--frames", "2",
                "--seed", "9", "--mode", "both"]
        code, out, _ = run_cli(args, capsys)
        assert code == 0
        _, rows = parse_csv(out)
        assert int(rows[0]["symbols"]) == 40000
        code2, out2, _ = run_cli(args, capsys)
        assert out2 == out

    def test_frames_require_symbols(self, capsys):
        code, _, err = run_cli(["simulate", "--algorithm", "bwa", "--order", "8",
                                "--sigma2", "0.01", "--frames", "2"], capsys)
        assert code == 2
        assert "--symbols" in err

    def test_rerun_of_embedded_command_reproduces(self, capsys, tmp_path):
        args = ["simulate", "--algorithm", "vv", "--order", "8",
                "--sigma2", "0.01", "--symbols", "20000", "--seed", "3",
                "--mode", "both"]
        _, out1, _ = run_cli(args, capsys)
        command_line = next(ln for ln in out1.splitlines()
                            if ln.startswith("# command: "))
        embedded = shlex.split(command_line[len("# command: "):])
        assert embedded[0] == "cprlab"
        _, out2, _ = run_cli(embedded[1:], capsys)
        assert out1 == out2

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "run.csv"
        code, out, _ = run_cli(["simulate", "--algorithm", "bwa", "--order", "8",
                                "--sigma2", "0.01", "--symbols", "20000",
                                "--mode", "analytic", "--out", str(path)], capsys)
        assert code == 0
        assert out == ""
        assert path.read_text().startswith("# cprlab")


class TestLinkCommand:
    def test_zero_linewidths(self, capsys):
        code, out, _ = run_cli(["link", "--tx-linewidth", "0", "--lo-linewidth", "0",
                                "--baud", "32e9", "--distance", "1000"], capsys)
        assert code == 0
        values = {}
        for ln in out.splitlines():
            if ":" in ln and not ln.startswith("#"):
                key, val = ln.split(":", 1)
                values[key.strip()] = val.strip()
        assert float(values["sigma2_laser"].split()[0]) == 0.0
        assert float(values["sigma2_eepn"].split()[0]) == 0.0
        assert float(values["sigma2_total"].split()[0]) == 0.0

    def test_reference_example_and_footnote(self, capsys):
        code, out, _ = run_cli(["link", "--tx-linewidth", "1e6",
                                "--lo-linewidth", "1e6", "--baud", "32e9",
                                "--distance", "1000"], capsys)
        assert code == 0
        l0_line = next(ln for ln in out.splitlines() if "crossover L0" in ln)
        l0_m = float(l0_line.split(":")[1].split()[0])
        assert l0_m == pytest.approx(57345.3774407786, rel=1e-10)
        assert "60.69" in out  # the circulated figure is documented

    def test_effective_linewidth_round_trip(self, capsys):
        code, out, _ = run_cli(["link", "--tx-linewidth", "1e6",
                                "--lo-linewidth", "1e6", "--baud", "32e9",
                                "--distance", "1000"], capsys)
        vals = {}
        for ln in out.splitlines():
            if ":" in ln and not ln.startswith("#"):
                key, val = ln.split(":", 1)
                vals[key.strip()] = float(val.split()[0])
        ts = 1.0 / 32e9
        assert 2 * np.pi * vals["effective linewidth"] * ts == pytest.approx(
            vals["sigma2_total"], rel=1e-12)


class TestPresetsCommand:
    def test_lists_all(self, capsys):
        code, out, _ = run_cli(["presets"], capsys)
        assert code == 0
        for name in ("fig5", "fig8a", "fig11b", "fig14b", "fig16"):
            assert name in out


class TestConfigFile:
    def test_empty_file_all_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "empty.ini"
        cfg.write_text("")
        code, out, _ = run_cli(["floor", "--algorithm", "nlms", "--order", "8",
                                "--sigma2", "0.01", "--config", str(cfg)], capsys)
        assert code == 0

    def test_flag_overrides_file(self, capsys, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[cpr]\nalgorithm = nlms\norder = 8\n")
        code, out, _ = run_cli(["floor", "--order", "16", "--sigma2", "0.01",
                                "--config", str(cfg)], capsys)
        assert code == 0
        _, rows = parse_csv(out)
        assert rows[0]["n"] == "16"

    def test_even_vv_block_rejected_at_load(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[cpr]\nalgorithm = vv\nblock_length = 4\n")
        with pytest.raises(ValueError, match="N_VV must be odd"):
            load_config(str(cfg))

    def test_unknown_key_named(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[link]\nbogus_key = 3\n")
        with pytest.raises(ValueError, match="bogus_key"):
            load_config(str(cfg))

    def test_invalid_value_reports_invariant(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[cpr]\nmu = 1.7\n")
        with pytest.raises(ValueError, match="0 < mu <= 1"):
            load_config(str(cfg))
