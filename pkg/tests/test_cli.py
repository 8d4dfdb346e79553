import json

import pytest

from delcfwm.cli import main
from delcfwm.presets import available_presets, load_preset

TINY_SCAN = {
    "system": "tri",
    "gains": {
        "G1": {"start": 1.0, "stop": 1.2, "step": 0.1},
        "G2": {"start": 1.0, "stop": 1.2, "step": 0.1},
    },
    "criteria": ["D12", "D13"],
}


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestRegionScan:
    def test_csv_shape_and_order(self, tmp_path):
        cfg = write_config(tmp_path, TINY_SCAN)
        out = tmp_path / "scan.csv"
        assert main(["region-scan", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "G1,G2,criterion,value,entangled,region"
        assert len(lines) == 1 + 3 * 3 * 2  # 3x3 grid, two criteria
        body = [line.split(",") for line in lines[1:]]
        keys = [(float(r[0]), float(r[1]), r[2]) for r in body]
        assert keys == sorted(keys)
        # vacuum point saturates the bound and is unentangled
        assert body[0][:4] == ["1.0", "1.0", "D12", "4.0"]
        assert body[0][4] == "false"

    def test_deterministic_across_jobs(self, tmp_path):
        cfg = write_config(tmp_path, TINY_SCAN)
        outputs = []
        for jobs, name in ((1, "a.csv"), (4, "b.csv")):
            out = tmp_path / name
            assert main([
                "region-scan", "--config", cfg, "--out", str(out), "--jobs", str(jobs)
            ]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_json_format(self, tmp_path, capsys):
        cfg = write_config(tmp_path, TINY_SCAN)
        assert main(["region-scan", "--config", cfg, "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert rows[0]["criterion"] == "D12"
        assert {"G1", "G2", "value", "entangled", "region"} <= set(rows[0])

    def test_invalid_criterion_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, dict(TINY_SCAN, criteria=["D12", "BOGUS"]))
        assert main(["region-scan", "--config", cfg]) == 2
        assert "BOGUS" in capsys.readouterr().err

    def test_gain_below_one_exits_2(self, tmp_path, capsys):
        bad = dict(TINY_SCAN, gains={"G1": 0.5, "G2": 1.2})
        cfg = write_config(tmp_path, bad)
        assert main(["region-scan", "--config", cfg]) == 2

    def test_fig6_preset(self, tmp_path):
        out = tmp_path / "fig6.csv"
        assert main(["region-scan", "--preset", "fig6", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "G1,G2,G3,criterion,value,entangled,region"
        preset = load_preset("fig6")
        n_points = 101  # G1 in [1, 2] step 0.01
        assert len(lines) == 1 + n_points * len(preset["criteria"])
        # fixed gains appear verbatim in every row
        assert all(line.split(",")[1:3] == ["1.3", "1.1"] for line in lines[1:])


class TestSpectrum:
    def test_preset_columns_and_normalization(self, tmp_path):
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--preset", "fig8_col2", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "delta1,abs_rho_normalized,abs_rho_raw,real,imag"
        normalized = [float(line.split(",")[1]) for line in lines[1:]]
        assert max(normalized) == 1.0
        assert all(0.0 <= v <= 1.0 for v in normalized)

    def test_multiple_cases_need_out(self, tmp_path, capsys):
        doc = {"cases": ["fwm1_s2", "rho2_e1"]}
        cfg = write_config(tmp_path, doc)
        assert main(["spectrum", "--config", cfg]) == 2

    def test_multiple_cases_one_file_each(self, tmp_path):
        doc = {"cases": ["fwm1_s2", "rho2_e1"]}
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
        assert (tmp_path / "spec_fwm1_s2.csv").exists()
        assert (tmp_path / "spec_rho2_e1.csv").exists()

    def test_coarse_grid_exits_2(self, tmp_path):
        doc = {"grid": {"start": -50.0, "stop": 40.0, "step": 2.0}}
        cfg = write_config(tmp_path, doc)
        assert main(["spectrum", "--config", cfg]) == 2

    def test_unknown_case_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"case": "nonsense"})
        assert main(["spectrum", "--config", cfg]) == 2
        assert "nonsense" in capsys.readouterr().err


class TestChannels:
    def test_default_dressed_case(self, capsys):
        assert main(["channels", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["case"] == "rho2_e1"
        assert doc["n_channels"] == 3
        assert doc["capacity"] == 27
        assert doc["warnings"] == []
        for entry in doc["channels"]:
            assert entry["position_diff"] < 2.0

    def test_rho1_case_positions(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"case": "rho1_e1"})
        assert main(["channels", "--config", cfg]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["capacity"] == 8
        assert sorted(ch["delta1_analytic"] for ch in doc["channels"]) == [-20.0, 0.0]

    def test_undressed_case(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"case": "fwm1_s2"})
        assert main(["channels", "--config", cfg]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["n_channels"] == 2 and doc["capacity"] == 8

    def test_csv_format(self, capsys):
        assert main(["channels", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("label,delta1_analytic,delta1_numeric")
        assert len(lines) == 4


class TestProfile:
    def test_flat_profile_with_markers(self, tmp_path):
        doc = {"amplitude": 0.0, "criteria": ["D12"]}
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "profile.csv"
        assert main(["profile", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "delta1,G1,criterion,value,entangled"
        data = [line.split(",") for line in lines[1:] if not line.split(",")[2].startswith("channel:")]
        markers = [line.split(",") for line in lines[1:] if line.split(",")[2].startswith("channel:")]
        assert len(markers) == 3  # one per coherent channel
        assert all(row[1] == "1.0" for row in data)
        values = {row[3] for row in data}
        assert len(values) == 1  # constant criterion at zero amplitude

    def test_quad_preset(self, tmp_path):
        out = tmp_path / "profile.csv"
        assert main(["profile", "--preset", "fig9_quad", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        preset = load_preset("fig9_quad")
        n_grid = 451  # [-50, 40] step 0.2
        assert len(lines) == 1 + n_grid * len(preset["criteria"]) + 3

    def test_tri_system_with_g3_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, {"gains": {"G3": 1.1}})
        assert main(["profile", "--config", cfg]) == 2


class TestValidate:
    def test_filter_capacity(self, capsys):
        assert main(["validate", "--filter", "capacity"]) == 0
        out = capsys.readouterr().out
        assert "capacity" in out and "PASS" in out

    def test_json_report(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        assert main(["validate", "--filter", "energy", "--out", str(report)]) == 0
        payload = json.loads(report.read_text())
        assert payload[0]["name"] == "energy-conservation"
        assert payload[0]["passed"] is True

    def test_unknown_filter_exits_2(self, capsys):
        assert main(["validate", "--filter", "nope"]) == 2


class TestConfigHandling:
    def test_unknown_preset_exits_2(self, capsys):
        assert main(["region-scan", "--preset", "fig99"]) == 2
        assert "fig99" in capsys.readouterr().err

    def test_preset_command_mismatch_exits_2(self, capsys):
        assert main(["spectrum", "--preset", "fig3"]) == 2

    def test_malformed_config_exits_2(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["region-scan", "--config", str(path)]) == 2

    def test_unwritable_output_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, TINY_SCAN)
        out = tmp_path / "missing" / "dir" / "scan.csv"
        assert main(["region-scan", "--config", cfg, "--out", str(out)]) == 2

    def test_bad_atomic_param_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"params": {"gamma21": -1.0}})
        assert main(["spectrum", "--config", cfg]) == 2

    def test_all_presets_load_and_declare_commands(self):
        names = available_presets()
        expected = {
            "fig3", "fig4", "fig5", "fig6",
            "fig8_col1", "fig8_col2", "fig8_col3",
            "figA3_col1", "figA3_col2", "figA3_col3",
            "fig9_tri", "fig9_quad",
        }
        assert expected <= set(names)
        for name in names:
            doc = load_preset(name)
            assert doc["command"] in {"region-scan", "spectrum", "channels", "profile"}


class TestPresetContents:
    """The canned presets pin the reference parameter values."""

    def test_fig3_grid(self):
        doc = load_preset("fig3")
        assert doc["system"] == "tri"
        for axis in ("G1", "G2"):
            assert doc["gains"][axis] == {"start": 1.0, "stop": 3.0, "step": 0.02}

    def test_fig5_fixes_first_gain(self):
        doc = load_preset("fig5")
        assert doc["system"] == "quad" and doc["gains"]["G1"] == 1.1

    def test_fig6_fixes_later_gains(self):
        doc = load_preset("fig6")
        assert doc["gains"]["G2"] == 1.3 and doc["gains"]["G3"] == 1.1

    def test_fig9_fixed_gains(self):
        assert load_preset("fig9_tri")["gains"] == {"G2": 1.2}
        assert load_preset("fig9_quad")["gains"] == {"G2": 1.3, "G3": 1.1}

    @pytest.mark.parametrize(
        "name, case, n_peaks",
        [
            ("fig8_col2", "fwm1_s2", 2),
            ("fig8_col3", "rho2_e1", 3),
            ("figA3_col3", "rho1_e1", 2),
        ],
    )
    def test_spectrum_presets_reproduce_peak_counts(self, name, case, n_peaks):
        import numpy as np

        from delcfwm import AtomicParams, find_peaks

        doc = load_preset(name)
        assert doc["cases"] == [case]
        assert doc["params"]["delta1"] == 13.0 and doc["params"]["delta1p"] == 20.0
        grid_spec = doc["grid"]
        grid = grid_spec["start"] + grid_spec["step"] * np.arange(
            int(round((grid_spec["stop"] - grid_spec["start"]) / grid_spec["step"])) + 1
        )
        peaks = find_peaks(case, AtomicParams(**doc["params"]), grid)
        assert len(peaks) == n_peaks

    def test_fig3_region_structure_via_cli(self, tmp_path):
        out = tmp_path / "fig3.csv"
        assert main(["region-scan", "--preset", "fig3", "--out", str(out)]) == 0
        regions = {line.rsplit(",", 1)[1] for line in out.read_text().splitlines()[1:]}
        assert {"I", "II", "III"} <= regions
