"""End-to-end tests of the command-line driver and the result store."""

import json

import pytest

from normtorus.cli import main
from normtorus.report import plot_data_series
from normtorus.store import ResultStore, StoreError


def run(argv):
    return main(argv)


class TestEnumerate:
    def test_csv_output_and_field_count(self, tmp_path):
        out = tmp_path / "out.csv"
        assert run(["enumerate", "--group", "3.3", "--X", "1e13",
                    "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "disc,tuple,sha_order,at_order,wa,hnp"
        assert len(lines) - 1 == 192          # 4 fields x |Aut| = 48
        discs = [int(l.split(",")[0]) for l in lines[1:]]
        assert discs == sorted(discs)

    def test_json_format(self, tmp_path):
        out = tmp_path / "out.json"
        assert run(["enumerate", "--group", "2.2", "--X", "400",
                    "--format", "json", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["group"] == "2.2"
        assert all(r["sha_order"] * r["at_order"] == 2
                   for r in payload["records"])

    def test_strategies_and_resume_are_byte_identical(self, tmp_path):
        a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        store = tmp_path / "store"
        assert run(["enumerate", "--group", "3.3", "--X", "1e13",
                    "--store", str(store), "--out", str(a)]) == 0
        assert run(["enumerate", "--group", "3.3", "--X", "1e13",
                    "--strategy", "radical", "--out", str(b)]) == 0
        # resume must reuse the spill files and reproduce the bytes
        assert run(["enumerate", "--group", "3.3", "--X", "1e13",
                    "--store", str(store), "--resume", "--out", str(c)]) == 0
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()
        manifest = json.loads((store / "manifest.json").read_text())
        assert manifest

    def test_trivial_bound(self, capsys):
        assert run(["enumerate", "--group", "4.9", "--X", "1"]) == 0
        assert capsys.readouterr().out.splitlines() == [
            "disc,tuple,sha_order,at_order,wa,hnp"]

    def test_bad_group_is_config_error(self):
        assert run(["enumerate", "--group", "six", "--X", "10"]) == 2
        assert run(["enumerate", "--group", "2.2", "--X", "zero"]) == 2


class TestClassify:
    def test_tally_and_report_artifacts(self, tmp_path):
        out = tmp_path / "tally.json"
        fig = tmp_path / "hist.png"
        series = tmp_path / "series.csv"
        assert run(["classify", "--group", "2.2", "--X", "3000",
                    "--out", str(out), "--plot", str(fig),
                    "--emit-plot-data", str(series)]) == 0
        tally = json.loads(out.read_text())
        assert tally["fields"] > 0
        assert fig.stat().st_size > 0
        rows = series.read_text().splitlines()
        assert rows[0] == "log10_X,tuples,wa_tuples,hnp_fail_tuples"
        assert len(rows) == 11
        last = rows[-1].split(",")
        assert int(last[1]) == tally["fields"] * 6   # |Aut (Z/2)^2| = 6


class TestVerify:
    def test_fault_injection_is_detected(self, tmp_path):
        out = tmp_path / "verify.json"
        code = run(["verify", "--fault-inject", "--lemmas", "2:2",
                    "--out", str(out)])
        assert code == 3
        payload = json.loads(out.read_text())
        assert payload["passed"] is False
        assert any(not c["pass"] and c["check"].startswith("restriction")
                   for c in payload["checks"])

    def test_verify_lemmas_command(self, tmp_path):
        out = tmp_path / "lemmas.json"
        assert run(["verify-lemmas", "--ell", "3", "--n", "2",
                    "--out", str(out)]) == 0
        reports = json.loads(out.read_text())
        assert all(r["counterexamples"] == [] for r in reports)


class TestConstantsCommand:
    def test_cyclic_constants(self, tmp_path):
        out = tmp_path / "c.json"
        assert run(["constants", "--ell", "3", "--n", "1",
                    "--prime-bound", "1e5", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["total"]["value"] == payload["wa"]["value"]

    def test_group_must_be_supported(self):
        assert run(["constants", "--group", "3.3",
                    "--prime-bound", "1e4"]) == 2
        assert run(["constants", "--prime-bound", "1e4"]) == 2


class TestStore:
    def test_append_only(self, tmp_path):
        store = ResultStore(tmp_path / "s")
        store.write("x.csv", "hello\n")
        store.write("x.csv", "hello\n")          # identical rewrite is fine
        with pytest.raises(StoreError):
            store.write("x.csv", "different\n")
        assert store.read("x.csv") == "hello\n"
        with pytest.raises(StoreError):
            store.read("missing.csv")

    def test_store_conflict_exits_4(self, tmp_path):
        store = tmp_path / "store"
        assert run(["enumerate", "--group", "2.2", "--X", "400",
                    "--store", str(store), "--out",
                    str(tmp_path / "a.csv")]) == 0
        # poison one spill file, then rerun without --resume
        spill = next(p for p in store.iterdir() if "spill" in p.name)
        spill.write_text("disc,tuple,sha_order,at_order,wa,hnp\ntampered\n")
        assert run(["enumerate", "--group", "2.2", "--X", "400",
                    "--store", str(store), "--out",
                    str(tmp_path / "b.csv")]) == 4


class TestReportSeries:
    def test_empty_records(self):
        assert plot_data_series([], 1) == \
            "log10_X,tuples,wa_tuples,hnp_fail_tuples\n"
