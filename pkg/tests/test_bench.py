import json

import jsonschema
import pytest

from conftest import random_scenario
from rischannel.bench import METHODS, REPORT_SCHEMA, BenchReport, run_bench


@pytest.fixture(scope="module")
def report():
    sc = random_scenario(12, n_tx=2, n_rx=2, n_ris=8, n_env=60, n_dynamic=0)
    return run_bench(sc, realizations=20, seed=1, oracle_samples=3)


def test_all_methods_reported(report):
    assert [r.method for r in report.rows] == list(METHODS)
    for r in report.rows:
        assert r.skipped is None, r.skipped
        assert r.max_rel_error < 1e-8
        assert r.checked >= 1
        assert r.speedup > 0


def test_flip_count_bounded(report):
    assert report.row("woodbury-reduced").m <= 4


def test_json_round_trip(report):
    text = report.to_json()
    jsonschema.validate(json.loads(text), REPORT_SCHEMA)
    again = BenchReport.from_json(text)
    assert again == report
    assert "speedup" in report.table()


def test_schema_rejects_extra_keys(report):
    obj = report.to_dict()
    obj["rows"][0]["bogus"] = 1
    with pytest.raises(jsonschema.ValidationError):
        BenchReport.from_dict(obj)


def test_preconditions_reported_as_skipped():
    sc = random_scenario(13, n_ris=0, n_env=0)
    rep = run_bench(sc, realizations=5)
    skipped = {r.method: r.skipped for r in rep.rows}
    assert skipped["woodbury-reduced"] and skipped["shifted-reduce"] and skipped["trajectory"]
    assert skipped["reduce"] is None


def test_deterministic_errors():
    sc = random_scenario(14, n_env=30)
    a = run_bench(sc, realizations=8, seed=4, methods=("woodbury-reduced", "shifted-reduce"))
    b = run_bench(sc, realizations=8, seed=4, methods=("woodbury-reduced", "shifted-reduce"))
    assert [r.max_rel_error for r in a.rows] == [r.max_rel_error for r in b.rows]
