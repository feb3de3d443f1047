import csv
import json
import math

import pytest

from sumrules.cli import main


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, f"--out={out}"])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestExitCodes:
    def test_success(self, tmp_path):
        code, out = run(tmp_path, "delta1", "--rho", "1.0", "--a", "0.1")
        assert code == 0 and out.exists()

    @pytest.mark.parametrize("argv", [
        ["delta1", "--bogus", "1"],
        ["no-such-command"],
        ["delta1", "--rho-sweep", "1:0:0.1"],
        ["delta1", "--rho-sweep", "a:b"],
        ["delta1", "--orders", "1,x"],
    ])
    def test_usage(self, tmp_path, argv):
        assert main([*argv, f"--out={tmp_path / 'x.json'}"]) == 1

    def test_missing_out_is_usage(self):
        assert main(["delta1", "--rho", "1"]) == 1

    @pytest.mark.parametrize("argv", [
        ["delta1", "--rho", "-2", "--a", "0"],   # exactly critical
        ["delta1", "--a", "0.7"],                  # impurity outside the box
        ["disk-ring", "--r0", "1.5"],
        ["disk-ring", "--r0", "0"],
        ["sho-quartic", "--s", "2"],               # below the convergence threshold
    ])
    def test_domain(self, tmp_path, argv):
        assert main([*argv, f"--out={tmp_path / 'x.json'}"]) == 2


class TestJson:
    def test_schema(self, tmp_path):
        code, out = run(tmp_path, "box-linear", "--s", "1", "--rho", "0.5", "--cutoff", "200")
        assert code == 0
        data = json.loads(out.read_text())
        for key in ("value", "error_bound", "terms", "pade", "params", "manifest"):
            assert key in data
        assert set(data["terms"]) >= {"z0", "z1", "z2"}
        assert set(data["pade"]) == {"value", "pole"}
        man = data["manifest"]
        assert man["subcommand"] == "box-linear"
        assert str(out) in man["outputs"]
        assert {"sumrules", "numpy", "scipy"} <= set(man["versions"])

    def test_delta1_example(self, tmp_path):
        code, out = run(tmp_path, "delta1", "--rho", "-4", "--a", "0", "--orders", "1,2,3,4")
        assert code == 0
        v = json.loads(out.read_text())["value"]
        assert v["1"] == 0.0
        assert v["2"] == pytest.approx(1 / 45, rel=1e-14)

    def test_disk_example(self, tmp_path):
        code, out = run(tmp_path, "disk-ring", "--r0", "0.5", "--rho", "0", "--nmax", "200")
        assert code == 0
        data = json.loads(out.read_text())
        target = math.pi**2 / 48 - 5 / 32
        assert abs(data["value"] - target) <= max(data["error_bound"], 1e-15)

    @pytest.mark.parametrize("argv", [
        ["helmholtz", "--alpha", "0.8", "--beta", "2"],
        ["sho-quartic", "--s", "4", "--lam", "0.05"],
        ["frac-green-check", "--N", "2,3", "--cutoff", "10"],
        ["rr-oracle", "--potential", "linear", "--rho", "0.5", "--basis", "120", "--tail", "wkb-linear"],
        ["delta2", "--rho", "1", "--mu", "1"],
    ])
    def test_other_subcommands_emit_json(self, tmp_path, argv):
        code, out = run(tmp_path, *argv)
        assert code == 0
        data = json.loads(out.read_text())
        assert "value" in data and "manifest" in data


class TestCsv:
    def test_pole_row_has_status(self, tmp_path):
        code, out = run(tmp_path, "delta1", "--a", "0", "--rho-sweep=-3:0:0.5", name="p.csv")
        assert code == 0
        rows = read_csv(out)
        assert [float(r["rho"]) for r in rows] == [-3, -2.5, -2, -1.5, -1, -0.5, 0]
        bad = [r for r in rows if r["status"] != "ok"]
        assert len(bad) == 1 and float(bad[0]["rho"]) == -2.0 and bad[0]["Z1"] == ""
        assert float(rows[-1]["Z1"]) == pytest.approx(1 / 3, rel=1e-15)

    def test_manifest_lists_every_file(self, tmp_path):
        code, out = run(tmp_path, "box-linear", "--rho-sweep", "0:1:0.25", "--basis", "120",
                        "--fit", "--degree", "2", name="fit.csv")
        assert code == 0
        man_path = tmp_path / "fit.csv.manifest.json"
        man = json.loads(man_path.read_text())
        listed = set(man["outputs"])
        assert {str(out), str(tmp_path / "fit_samples.csv"), str(man_path)} == listed
        assert sorted(p.name for p in tmp_path.iterdir()) == sorted(
            p.rsplit("/", 1)[-1] for p in listed)

    def test_energy_sweep(self, tmp_path):
        code, out = run(tmp_path, "delta1", "--rho", "3", "--a", "0.2", "--energy-sweep", "1:40:1",
                        name="e.csv")
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 40 and set(rows[0]) == {"E", "lhs", "status"}

    def test_box_linear_fit_example_reduced(self, tmp_path):
        # the documented example with the CI-sized basis and sweep
        code, out = run(tmp_path, "box-linear", "--s", "1", "--rho-sweep", "0:1:0.02", "--basis", "400",
                        "--fit", name="fit.csv")
        assert code == 0
        coef = {int(r["power"]): float(r["coefficient"]) for r in read_csv(out)}
        assert coef[0] == pytest.approx(1 / 3, abs=1e-6)
        assert coef[2] == pytest.approx(-4 / 14175 + 1 / 2700, rel=0.02)


class TestDeterminism:
    @pytest.mark.parametrize("argv,name", [
        (["delta1", "--rho", "1.3", "--a", "0.15", "--orders", "1,2,3"], "a.json"),
        (["delta2", "--rho-sweep", "0:2:0.5"], "b.csv"),
        (["disk-ring", "--r0", "0.3", "--rho", "-2"], "c.json"),
    ])
    def test_byte_identical(self, tmp_path, argv, name):
        out = tmp_path / name
        assert main([*argv, f"--out={out}"]) == 0
        first = out.read_bytes()
        out.unlink()
        assert main([*argv, f"--out={out}"]) == 0
        assert out.read_bytes() == first

    def test_threads_do_not_change_output(self, tmp_path, monkeypatch):
        argv = ["delta1", "--a", "0.1", "--rho-sweep=-6:6:0.25", "--orders", "1,2"]
        monkeypatch.setenv("SUMRULES_THREADS", "1")
        out = tmp_path / "s.csv"
        assert main([*argv, f"--out={out}"]) == 0
        serial = out.read_bytes()
        monkeypatch.setenv("SUMRULES_THREADS", "4")
        assert main([*argv, f"--out={out}"]) == 0
        assert out.read_bytes() == serial

    def test_replay_csv_manifest(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["delta1", "--rho-sweep=-3:0:0.5", "--a", "0.05", f"--out={out}"]) == 0
        again = tmp_path / "again.csv"
        assert main(["replay", str(out) + ".manifest.json", f"--out={again}"]) == 0
        assert again.read_bytes() == out.read_bytes()

    def test_replay_json(self, tmp_path):
        out = tmp_path / "z.json"
        assert main(["delta1", "--rho", "0.7", "--a", "-0.3", "--orders", "2,3", f"--out={out}"]) == 0
        again = tmp_path / "again.json"
        assert main(["replay", str(out), f"--out={again}"]) == 0
        a, b = json.loads(out.read_text()), json.loads(again.read_text())
        assert a["value"] == b["value"] and a["params"] == b["params"]

    def test_replay_rejects_garbage(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        assert main(["replay", str(bad)]) == 1
