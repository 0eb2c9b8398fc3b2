import json
import math
import os

import pytest

from gaborlattice.cli import main

GAUSSIAN = {"kind": "gaussian_family",
            "components": [{"amplitude": 1.0, "center": 0.0, "modulation": 0.0}]}


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def forward_config(tmp_path):
    return write_json(tmp_path / "fwd.json",
                      {"tau": 1.0, "signal": GAUSSIAN, "truncation": {"M": 5, "K": 9}})


@pytest.fixture
def table_path(tmp_path, forward_config):
    out = tmp_path / "table.json"
    assert main(["forward", "--config", forward_config, "--output", str(out)]) == 0
    return str(out)


@pytest.fixture
def reconstruct_config(tmp_path):
    return write_json(tmp_path / "rec.json", {
        "tau": 1.0,
        "grid": {"min": -3.0, "max": 3.0, "step": 0.05},
        "tol": 1e-8,
        "truncation": "auto",
        "signal": GAUSSIAN,
    })


class TestForward:
    def test_table_contents(self, table_path):
        doc = json.loads(open(table_path).read())
        assert doc["meta"]["tau"] == 1.0
        assert doc["meta"]["M"] == 5 and doc["meta"]["K"] == 9
        assert len(doc["data"]["m"]) == 11 * 19

    def test_single_entry_value(self, tmp_path):
        cfg = write_json(tmp_path / "c.json",
                         {"tau": 1.0, "signal": GAUSSIAN, "truncation": {"M": 0, "K": 0}})
        out = tmp_path / "t.json"
        assert main(["forward", "--config", cfg, "--output", str(out)]) == 0
        doc = json.loads(out.read_text())
        value = doc["data"]["mantissa_re"][0] * (2.0 ** 128) ** doc["data"]["exponent"][0]
        assert value == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)

    def test_zero_signal_all_zero(self, tmp_path):
        zero_sig = {"kind": "gaussian_family",
                    "components": [{"amplitude": 0.0, "center": 0.0, "modulation": 0.0}]}
        cfg = write_json(tmp_path / "c.json",
                         {"tau": 1.0, "signal": zero_sig, "truncation": {"M": 1, "K": 1}})
        out = tmp_path / "t.json"
        assert main(["forward", "--config", cfg, "--output", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert all(v == 0.0 for v in doc["data"]["mantissa_re"])

    def test_readback_bit_exact(self, tmp_path, table_path):
        # writing the parsed table again reproduces the file byte for byte
        from gaborlattice.cli import _table_document, _table_from_document

        doc = json.loads(open(table_path).read())
        table = _table_from_document(doc, "table")
        again = _table_document(table, doc["meta"]["signal"])
        assert json.dumps(doc, sort_keys=True) == json.dumps(again, sort_keys=True)

    def test_unknown_key_exit_2(self, tmp_path):
        cfg = write_json(tmp_path / "c.json",
                         {"tau": 1.0, "signal": GAUSSIAN, "truncation": {"M": 0, "K": 0},
                          "extra": True})
        assert main(["forward", "--config", cfg, "--output", str(tmp_path / "t.json")]) == 2


class TestReconstruct:
    def test_round_trip_summary(self, tmp_path, table_path, reconstruct_config):
        out = tmp_path / "pts.csv"
        rc = main(["reconstruct", "--config", reconstruct_config,
                   "--table", table_path, "--output", str(out)])
        assert rc == 0
        summary = json.loads((tmp_path / "pts.csv.summary.json").read_text())
        assert summary["summary"]["sup_error"] <= 1e-6
        assert summary["summary"]["points"] == 121
        lines = out.read_text().splitlines()
        assert lines[0] == "x,f_ref_re,f_ref_im,f_rec_re,f_rec_im,abs_err"
        assert len(lines) == 122

    def test_empty_grid(self, tmp_path, table_path):
        cfg = write_json(tmp_path / "c.json", {
            "tau": 1.0, "grid": {"min": 1.0, "max": -1.0, "step": 0.5}})
        out = tmp_path / "pts.csv"
        rc = main(["reconstruct", "--config", cfg, "--table", table_path,
                   "--output", str(out)])
        assert rc == 0
        assert len(out.read_text().splitlines()) == 1  # header only
        summary = json.loads((tmp_path / "pts.csv.summary.json").read_text())
        assert summary["summary"]["points"] == 0

    def test_tau_mismatch_exit_2_no_partial_output(self, tmp_path, table_path):
        cfg = write_json(tmp_path / "c.json", {
            "tau": 1.1, "grid": {"min": -1.0, "max": 1.0, "step": 0.5}})
        out = tmp_path / "nope.csv"
        rc = main(["reconstruct", "--config", cfg, "--table", table_path,
                   "--output", str(out)])
        assert rc == 2
        assert not out.exists()
        assert not any(p.name.startswith("nope.csv.tmp") for p in tmp_path.iterdir())

    def test_determinism_across_thread_counts(self, tmp_path, table_path,
                                              reconstruct_config):
        outs = []
        for threads, name in ((1, "a.csv"), (4, "b.csv")):
            out = tmp_path / name
            rc = main(["reconstruct", "--config", reconstruct_config,
                       "--table", table_path, "--output", str(out),
                       "--threads", str(threads)])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        # summaries agree after dropping the timing metadata
        a = json.loads((tmp_path / "a.csv.summary.json").read_text())
        b = json.loads((tmp_path / "b.csv.summary.json").read_text())
        assert a["summary"] == b["summary"]

    def test_env_var_overrides_threads(self, tmp_path, table_path, reconstruct_config,
                                       monkeypatch):
        monkeypatch.setenv("GABORLATTICE_THREADS", "3")
        out = tmp_path / "env.csv"
        rc = main(["reconstruct", "--config", reconstruct_config,
                   "--table", table_path, "--output", str(out), "--threads", "1"])
        assert rc == 0
        ref = tmp_path / "ref.csv"
        monkeypatch.delenv("GABORLATTICE_THREADS")
        main(["reconstruct", "--config", reconstruct_config, "--table", table_path,
              "--output", str(ref)])
        assert out.read_bytes() == ref.read_bytes()


class TestCoeffs:
    def test_rows_against_oracle(self, tmp_path):
        out = tmp_path / "coeffs.json"
        rc = main(["coeffs", "--tau", "1.0", "--m-min", "-4", "--m-max", "4",
                   "--output", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert len(doc["rows"]) == 9
        assert all(row["rel_diff_vs_oracle"] <= 1e-9 for row in doc["rows"])
        assert doc["meta"]["warnings"] == []

    def test_empty_range(self, tmp_path):
        out = tmp_path / "coeffs.json"
        rc = main(["coeffs", "--tau", "1.0", "--m-min", "2", "--m-max", "-2",
                   "--output", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["rows"] == []

    def test_supercritical_warning_record(self, tmp_path):
        out = tmp_path / "coeffs.json"
        rc = main(["coeffs", "--tau", "4.0", "--m-min", "0", "--m-max", "2",
                   "--output", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["meta"]["regime"] == "supercritical"
        assert any("supercritical" in w for w in doc["meta"]["warnings"])

    def test_csv_format(self, tmp_path):
        out = tmp_path / "coeffs.csv"
        rc = main(["coeffs", "--tau", "1.0", "--m-min", "0", "--m-max", "1",
                   "--format", "csv", "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("m,mantissa_re")
        assert len(lines) == 3


class TestVerify:
    def test_pass_exit_zero(self, tmp_path):
        out = tmp_path / "report.json"
        rc = main(["verify", "--tau", "1.0", "--suite", "poisson",
                   "--output", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["passed"] is True
        assert all(c["residual"] <= c["threshold"] for c in doc["checks"])

    def test_failure_maps_to_exit_one(self, monkeypatch, tmp_path):
        import gaborlattice.cli as cli
        from gaborlattice.verify import CheckRecord, SuiteReport

        def fake(suite, tau, signal=None):
            report = SuiteReport(suite=suite, tau=tau)
            report.checks.append(CheckRecord("rigged", 1.0, 1e-12, False, ""))
            return report

        monkeypatch.setattr(cli, "run_suite", fake)
        rc = main(["verify", "--tau", "1.0", "--suite", "theta",
                   "--output", str(tmp_path / "r.json")])
        assert rc == 1

    def test_signal_override_config(self, tmp_path):
        cfg = write_json(tmp_path / "sig.json", {"signal": {
            "kind": "gaussian_family",
            "components": [{"amplitude": 0.0, "center": 0.0, "modulation": 0.0}],
        }})
        out = tmp_path / "report.json"
        rc = main(["verify", "--tau", "1.0", "--suite", "poisson",
                   "--config", cfg, "--output", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert "degenerate" in doc["checks"][0]["note"]


class TestSweep:
    def test_degradation_and_refusal(self, tmp_path):
        cfg = write_json(tmp_path / "sweep.json", {
            "tau_list": [0.5 * math.pi, 0.8 * math.pi, 0.95 * math.pi, 1.05 * math.pi],
            "signal": {"kind": "gaussian_family", "components": [
                {"amplitude": 1.0, "center": c, "modulation": 0.0}
                for c in (-12.0, -6.0, 0.0, 6.0, 12.0)
            ]},
            "truncation": {"M": 2, "K": 10},
            "grid": {"min": -3.0, "max": 3.0, "step": 0.1},
        })
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--config", cfg, "--output", str(out)])
        assert rc == 0
        rows = [line.split(",") for line in out.read_text().splitlines()][1:]
        assert [r[2] for r in rows] == ["ok", "ok", "ok", "refused"]
        errors = [float(r[3]) for r in rows[:3]]
        assert errors[0] < errors[1] < errors[2]
        assert "tau < pi" in rows[3][8]

    def test_repeated_tau_identical_rows(self, tmp_path):
        cfg = write_json(tmp_path / "sweep.json", {
            "tau_list": [1.0, 1.0],
            "signal": GAUSSIAN,
            "truncation": {"M": 3, "K": 6},
            "grid": {"min": -1.0, "max": 1.0, "step": 0.25},
        })
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--config", cfg, "--output", str(out)]) == 0
        rows = out.read_text().splitlines()[1:]
        assert rows[0] == rows[1]

    def test_auto_truncation_rejected(self, tmp_path):
        cfg = write_json(tmp_path / "sweep.json", {
            "tau_list": [1.0], "signal": GAUSSIAN, "truncation": "auto",
            "grid": {"min": -1.0, "max": 1.0, "step": 0.5},
        })
        assert main(["sweep", "--config", cfg]) == 2


class TestValidation:
    def test_missing_config_file(self):
        assert main(["forward", "--config", "/nonexistent.json"]) == 2

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["forward", "--config", str(bad)]) == 2

    def test_bad_signal_kind(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {
            "tau": 1.0, "truncation": {"M": 0, "K": 0},
            "signal": {"kind": "callback", "components": []},
        })
        assert main(["forward", "--config", cfg]) == 2

    def test_negative_tau(self, tmp_path):
        cfg = write_json(tmp_path / "c.json",
                         {"tau": -1.0, "signal": GAUSSIAN, "truncation": {"M": 0, "K": 0}})
        assert main(["forward", "--config", cfg, "--output",
                     str(tmp_path / "t.json")]) == 2
