import json
import math

import pytest

from schurlab.lab import (
    CSV_COLUMNS,
    CellSummary,
    CrossingError,
    ExperimentConfig,
    ExperimentReport,
    estimate_crossing,
    export_report,
    load_config,
    parse_config,
    report_from_json,
    report_to_csv,
    report_to_json,
    run_greedy_failure_census,
    run_threshold_experiment,
    wilson_interval,
)
from schurlab.sets import IntegerSet

CONFIG_TEXT = """
# a small grid
n_values = 200, 1000
p_pairs  = -1/11:0.5, -1/11:1
trials   = 20
seed     = 0x2a
method   = both
"""


def test_parse_config():
    cfg = parse_config(CONFIG_TEXT)
    assert cfg.n_values == (200, 1000)
    assert cfg.p_pairs == (("-1/11", 0.5), ("-1/11", 1.0))
    assert cfg.seed == 42 and cfg.trials == 20 and cfg.method == "both"
    assert len(cfg.cells()) == 4


def test_config_file(tmp_path):
    path = tmp_path / "grid.cfg"
    path.write_text(CONFIG_TEXT)
    assert load_config(path) == parse_config(CONFIG_TEXT)


@pytest.mark.parametrize(
    "text",
    [
        "p_values = 0.1",
        "n_values = 10",
        "n_values = 10\np_values = 1.5",
        "n_values = 10\np_values = 0.5\ntrials = 0",
        "n_values = 10\np_values = 0.5\nmethod = magic",
        "n_values = 10\np_values = 0.5\ncolour = 2",
        "n_values = 10\nnonsense",
    ],
)
def test_bad_configs(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_p_zero_and_one_cells():
    cfg = ExperimentConfig(n_values=[40], p_values=[0.0, 1.0], trials=5, method="exact")
    rep = run_threshold_experiment(cfg)
    assert rep.cell(40, 0.0).schur_freq == 0.0
    # [40] contains {2, 4, 8, 16, 32}
    assert rep.cell(40, 1.0).schur_freq == 1.0
    assert rep.cell(40, 1.0).unknown == 0


def test_greedy_only_method():
    cfg = ExperimentConfig(n_values=[10**4], p_pairs=[("-1/9", 0.5)], trials=200, method="greedy", seed=1)
    rep = run_threshold_experiment(cfg)
    cell = rep.cells[0]
    assert cell.schur_freq is None and cell.trials == 200
    assert 0 <= cell.ci_lo <= cell.greedy_success_freq <= cell.ci_hi <= 1


def test_both_mode_consistency_and_reproducibility():
    cfg = parse_config(CONFIG_TEXT)
    a = run_threshold_experiment(cfg)
    b = run_threshold_experiment(cfg, threads=2)
    assert report_to_csv(a) == report_to_csv(b)
    assert report_to_json(a) == report_to_json(b)
    assert all(c.contradictions == 0 for c in a.cells)
    for rec in a.records:
        assert not (rec.greedy == "success" and rec.exact == "product-Schur")


def test_unknowns_are_not_decisions():
    cfg = ExperimentConfig(n_values=[1000], p_values=[0.9], trials=4, method="exact", budget=1)
    cell = run_threshold_experiment(cfg).cells[0]
    assert cell.unknown + cell.decided == cell.trials
    if cell.decided == 0:
        assert cell.schur_freq is None


def test_wilson_interval():
    lo, hi = wilson_interval(0, 200)
    assert lo == 0.0 and math.isclose(hi, 0.018845, abs_tol=1e-6)
    lo, hi = wilson_interval(50, 100)
    assert math.isclose(lo, 0.40383, abs_tol=1e-5) and math.isclose(hi, 0.59617, abs_tol=1e-5)
    assert wilson_interval(7, 7)[1] == 1.0
    assert wilson_interval(0, 0) == (0.0, 1.0)


def _report(n, ps, freqs, trials=200):
    cells = []
    for p, f in zip(ps, freqs):
        k = round(f * trials)
        lo, hi = wilson_interval(k, trials)
        cells.append(CellSummary(n, p, trials, trials, k, k / trials, 0, 0.0, 0, lo, hi, 0))
    cfg = ExperimentConfig(n_values=[n], p_values=ps, trials=trials)
    return ExperimentReport(cfg, cells)


def test_crossing_midpoint():
    est = estimate_crossing(_report(100, [0.1, 0.4], [0.0, 1.0]))
    assert math.isclose(est[100], math.sqrt(0.1 * 0.4))


def test_crossing_refusals():
    with pytest.raises(CrossingError):
        estimate_crossing(_report(100, [0.1, 0.2, 0.4], [0.0, 0.0, 0.0]))
    with pytest.raises(CrossingError, match="drops"):
        estimate_crossing(_report(100, [0.1, 0.2, 0.4], [0.0, 0.9, 0.1]))


def test_crossing_recovers_logistic():
    # frequencies f(p) = 1 / (1 + (p* / p)^4) on a half-octave grid
    p_star = 0.137
    ps = [0.02 * 2 ** (j / 2) for j in range(12)]
    freqs = [1 / (1 + (p_star / p) ** 4) for p in ps]
    est = estimate_crossing(_report(500, ps, freqs, trials=10**6))[500]
    assert abs(math.log2(est) - math.log2(p_star)) <= 0.5


def test_export_formats(tmp_path):
    cfg = parse_config(CONFIG_TEXT)
    rep = run_threshold_experiment(cfg)
    csv_path, json_path = tmp_path / "r.csv", tmp_path / "r.json"
    export_report(rep, "csv", csv_path)
    export_report(rep, "json", json_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(rep.cells)
    doc = json.loads(json_path.read_text())
    assert doc["seed"] == 42 and doc["config"]["n_values"] == [200, 1000]
    assert report_from_json(json_path.read_text()) == rep
    with pytest.raises(ValueError):
        export_report(rep, "xml", tmp_path / "r.xml")
    with pytest.raises(OSError):
        export_report(rep, "csv", tmp_path / "missing" / "r.csv")


def test_empty_report_csv_is_header_only():
    cfg = ExperimentConfig(n_values=[10], p_values=[0.5])
    assert report_to_csv(ExperimentReport(cfg, [])) == ",".join(CSV_COLUMNS) + "\n"


def test_census_all_success_is_empty():
    cfg = ExperimentConfig(n_values=[500], p_values=[0.01], trials=10, method="greedy")
    census = run_greedy_failure_census(cfg)
    assert census.failures == 0 and census.configurations == []


def test_census_injected_powers_of_two():
    cfg = ExperimentConfig(n_values=[500], p_values=[0.01], trials=3, method="greedy")
    planted = IntegerSet(2**27, [2**e for e in (5, 6, 7, 9, 11, 16, 27)])
    census = run_greedy_failure_census(cfg, injected=[planted])
    assert len(census.configurations) == 1
    assert census.effective_sizes == {7: 1}


def test_census_drops_one_and_validates():
    cfg = ExperimentConfig(n_values=[400], p_values=[0.6], trials=30, method="both", seed=5)
    census = run_greedy_failure_census(cfg)
    assert census.ones_removed > 0
    assert census.failures == len(census.configurations) > 0


def test_census_needs_greedy():
    with pytest.raises(ValueError):
        run_greedy_failure_census(ExperimentConfig(n_values=[10], p_values=[0.5], method="exact"))
