"""Config parsing, experiment runs, sweeps and the CSV contract."""

import csv
import dataclasses
import io
import math

import pytest

from cachecost.experiments import (
    ANALYTIC_COLUMNS,
    CSV_COLUMNS,
    VALIDATION_COLUMNS,
    ConfigError,
    ResultRow,
    analytic_table,
    build_requests,
    emit_csv,
    emit_dict_csv,
    load_config,
    parse_config,
    run_experiment,
    serialize_config,
    sweep,
    validation_report,
)
from cachecost.workload import TraceFormatError, gen_synthetic

BASE_COSTS = """
[costs]
storage_per_item_hour = 4.86e-7
compute_per_item = 7.2e-4
transmission_per_item = 5.25e-4
"""

SMALL_SYNTH = BASE_COSTS + """
[population]
movies = 50
movie_exponent = 0.8
ads = 6
ad_exponent = 0.9
lambda = 40.0

[policy]
kind = global_ttl
ttl = 60.0

[workload]
source = synthetic
duration = 30.0

[run]
seeds = 1,2,3
warmup = 0.0
"""


def _cfg(text=SMALL_SYNTH, **kwargs):
    return parse_config(text, **kwargs)


# --- parsing and validation ---------------------------------------------------


def test_parse_minimal_config_applies_defaults():
    cfg = _cfg(BASE_COSTS + """
[population]
movies = 10
movie_exponent = 0.5
ads = 2
ad_exponent = 0.5
lambda = 5.0

[policy]
kind = lower_bound

[workload]
source = synthetic
duration = 10.0
""")
    assert cfg.seeds == (1, 2, 3, 4, 5)
    assert cfg.warmup == 0.0
    assert (cfg.mc_samples, cfg.mc_seed) == (25_000, 0)
    assert cfg.policy.ttl is None and cfg.policy.capacity is None


def test_seeds_accept_commas_and_whitespace():
    cfg = _cfg(SMALL_SYNTH.replace("seeds = 1,2,3", "seeds = 4 5  6"))
    assert cfg.seeds == (4, 5, 6)


def test_config_round_trips_through_serialization():
    cfg = _cfg()
    assert parse_config(serialize_config(cfg)) == cfg


def test_trace_config_round_trips(tmp_path):
    trace = tmp_path / "reqs.csv"
    trace.write_text("0.0,1,1\n1.5,2,1\n")
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = lru
capacity = 4

[workload]
source = request_trace
path = {trace}
""")
    assert parse_config(serialize_config(cfg)) == cfg


def test_relative_trace_path_resolves_beside_config(tmp_path):
    (tmp_path / "reqs.csv").write_text("0.0,1,1\n")
    config_file = tmp_path / "exp.ini"
    config_file.write_text(BASE_COSTS + """
[policy]
kind = global_ttl
ttl = 10.0

[workload]
source = request_trace
path = reqs.csv
""")
    cfg = load_config(config_file)
    assert cfg.workload.path == str(tmp_path / "reqs.csv")


@pytest.mark.parametrize(
    "mutation",
    [
        ("[run]", "[runs]"),                              # unknown section
        ("seeds = 1,2,3", "seed_list = 1,2,3"),           # unknown key
        ("kind = global_ttl", "kind = newest_first"),     # unknown policy
        ("ttl = 60.0", "ttl = sixty"),                    # not a number
        ("ttl = 60.0", "ttl = -5"),                       # bad ttl
        ("ttl = 60.0", "capacity = 9"),                   # param kind mismatch
        ("source = synthetic", "source = packets"),       # unknown source
        ("duration = 30.0", "duration = 0"),              # bad duration
        ("seeds = 1,2,3", "seeds = 1,-2"),                # negative seed
        ("seeds = 1,2,3", "seeds ="),                     # empty seed list
        ("warmup = 0.0", "warmup = 30.0"),                # warmup >= duration
        ("lambda = 40.0", "lambda = -1"),                 # bad rate
    ],
)
def test_invalid_configs_are_rejected(mutation):
    old, new = mutation
    with pytest.raises(ConfigError):
        _cfg(SMALL_SYNTH.replace(old, new))


def test_missing_required_sections():
    for drop in ("[costs]", "[policy]", "[workload]"):
        broken = "\n".join(
            line for line in SMALL_SYNTH.splitlines() if drop not in line
        )
        with pytest.raises(ConfigError):
            _cfg(broken)


def test_unparseable_text_is_a_config_error():
    with pytest.raises(ConfigError):
        _cfg("costs]\nnope")


def test_synthetic_workload_rejects_trace_keys():
    with pytest.raises(ConfigError, match="does not apply"):
        _cfg(SMALL_SYNTH.replace("duration = 30.0", "duration = 30.0\nsubsample = 0.5"))


def test_synthetic_workload_requires_population():
    no_pop = SMALL_SYNTH.replace("[population]", "[population_off]")
    with pytest.raises(ConfigError):
        _cfg(no_pop)


def test_missing_trace_file_is_rejected(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {tmp_path / "absent.csv"}
""")


def test_ad_overlay_keys_must_come_together(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("0.0,1\n")
    with pytest.raises(ConfigError, match="together"):
        _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
ad_catalog = 10
""")


def test_subsample_only_for_count_traces(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("0.0,1,1\n")
    with pytest.raises(ConfigError, match="count traces"):
        _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
subsample = 0.5
""")


def test_count_trace_requires_ad_overlay(tmp_path):
    trace = tmp_path / "counts.csv"
    trace.write_text("1,0.0,100,48.0\n")
    with pytest.raises(ConfigError, match="ad_catalog"):
        _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = count_trace
path = {trace}
""")


def test_known_rate_requires_synthetic(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("0.0,1,1\n")
    with pytest.raises(ConfigError, match="synthetic"):
        _cfg(BASE_COSTS + f"""
[policy]
kind = known_rate

[workload]
source = request_trace
path = {trace}
""")


def test_bad_monte_carlo_is_rejected():
    with pytest.raises(ConfigError):
        _cfg(SMALL_SYNTH + "\n[monte_carlo]\nsamples = 0\n")


# --- request stream assembly ---------------------------------------------------


def test_synthetic_requests_match_generator_directly():
    cfg = _cfg()
    want = list(gen_synthetic(cfg.population_model(), 30.0, seed=2))
    assert list(build_requests(cfg, 2)) == want


def test_request_trace_with_ads_streams_verbatim(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("0.0,3,2\n1.0,4,1\n")
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
""")
    reqs = list(build_requests(cfg, 1))
    assert [(r.time, r.item.movie, r.item.ad) for r in reqs] == [
        (0.0, 3, 2),
        (1.0, 4, 1),
    ]


def test_request_trace_without_ads_gets_overlay(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("".join(f"{t}.0,7\n" for t in range(10)))
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
ad_catalog = 5
ad_exponent = 0.9
""")
    reqs = list(build_requests(cfg, 3))
    assert [r.time for r in reqs] == [float(t) for t in range(10)]
    assert all(r.item.movie == 7 for r in reqs)
    assert all(r.item.ad is not None and 1 <= r.item.ad <= 5 for r in reqs)
    assert list(build_requests(cfg, 3)) == reqs
    assert list(build_requests(cfg, 4)) != reqs


def test_request_trace_without_ads_and_no_overlay_errors(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("0.0,7\n")
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
""")
    with pytest.raises(TraceFormatError, match="no ad ids"):
        list(build_requests(cfg, 1))


def test_empty_request_trace_yields_no_requests(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("# header only\n\n")
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
""")
    assert list(build_requests(cfg, 1)) == []


def test_count_trace_synthesis_is_seeded(tmp_path):
    trace = tmp_path / "counts.csv"
    trace.write_text("1,0.0,200,48.0\n2,10.0,80,48.0\n")
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = count_trace
path = {trace}
ad_catalog = 4
ad_exponent = 0.8
subsample = 1.0
""")
    reqs = list(build_requests(cfg, 5))
    assert reqs
    assert all(r.item.ad is not None for r in reqs)
    assert all(0.0 <= r.time <= 48.0 for r in reqs)
    assert list(build_requests(cfg, 5)) == reqs
    assert list(build_requests(cfg, 6)) != reqs


# --- runs and sweeps ------------------------------------------------------------


def test_run_experiment_emits_per_seed_rows_and_mean():
    cfg = _cfg()
    rows = run_experiment(cfg)
    assert len(rows) == 4
    assert [r.seed for r in rows] == ["1", "2", "3", "mean"]
    per_seed, mean = rows[:3], rows[3]
    for r in per_seed:
        assert len(r.trace_checksum) == 8
        int(r.trace_checksum, 16)
        assert r.cost_sd is None
    assert mean.trace_checksum == ""
    costs = [r.cost_per_request for r in per_seed]
    assert mean.cost_per_request == pytest.approx(sum(costs) / 3, rel=1e-12)
    import statistics

    assert mean.cost_sd == pytest.approx(statistics.stdev(costs), rel=1e-12)


def test_single_seed_mean_has_no_spread():
    cfg = _cfg(SMALL_SYNTH.replace("seeds = 1,2,3", "seeds = 9"))
    rows = run_experiment(cfg)
    assert len(rows) == 2
    assert rows[1].cost_sd is None
    assert rows[1].cost_per_request == rows[0].cost_per_request


def test_run_experiment_is_deterministic():
    cfg = _cfg()
    assert run_experiment(cfg) == run_experiment(cfg)


def test_run_experiment_parallel_matches_serial():
    cfg = _cfg()
    assert run_experiment(cfg, jobs=2) == run_experiment(cfg, jobs=1)


def test_lower_bound_experiment_runs():
    cfg = _cfg(SMALL_SYNTH.replace("kind = global_ttl\nttl = 60.0", "kind = lower_bound"))
    rows = run_experiment(cfg)
    assert rows[-1].policy == "lower_bound"
    assert rows[-1].param_name == ""


def test_sweep_layout_and_argmin():
    cfg = _cfg()
    grid = [0.0, 60.0, 600.0]
    rows = sweep(cfg, "ttl", grid)
    # 3 seeds + 1 mean per point, then the argmin echo
    assert len(rows) == 3 * 4 + 1
    means = [r for r in rows if r.seed == "mean"]
    assert [r.param_value for r in means] == grid
    argmin = rows[-1]
    assert argmin.seed == "argmin"
    best = min(means, key=lambda r: (r.cost_per_request, r.param_value))
    assert argmin.param_value == best.param_value
    assert argmin.cost_per_request == best.cost_per_request


def test_sweep_tie_breaks_to_smaller_parameter():
    # both TTLs exceed every gap and the trace end, so the runs are
    # identical and the argmin must fall back to the smaller value
    cfg = _cfg()
    rows = sweep(cfg, "ttl", [2e6, 1e6])
    assert rows[-1].param_value == 1e6


def test_sweep_shares_traces_across_policy_grid():
    cfg = _cfg()
    rows = sweep(cfg, "ttl", [0.0, 60.0])
    by_seed = {}
    for r in rows:
        if r.seed in ("mean", "argmin"):
            continue
        by_seed.setdefault(r.seed, set()).add(r.trace_checksum)
    assert set(by_seed) == {"1", "2", "3"}
    for checksums in by_seed.values():
        assert len(checksums) == 1


def test_lambda_sweep_changes_the_trace():
    cfg = _cfg()
    rows = sweep(cfg, "lambda", [20.0, 40.0])
    seed1 = [r for r in rows if r.seed == "1"]
    assert len(seed1) == 2
    assert seed1[0].trace_checksum != seed1[1].trace_checksum
    assert all(r.param_name == "lambda" for r in seed1)


@pytest.mark.parametrize(
    "axis,grid,pattern",
    [
        ("capacity", [4], "requires policy.kind = lru"),
        ("window", [100.0], "requires policy.kind = individual_ttl"),
        ("ttl", [], "must not be empty"),
        ("ttl", [-1.0], ">= 0"),
        ("altitude", [1.0], "unknown sweep axis"),
    ],
)
def test_sweep_rejects_mismatched_axes(axis, grid, pattern):
    with pytest.raises(ConfigError, match=pattern):
        sweep(_cfg(), axis, grid)


def test_lambda_sweep_requires_synthetic(tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("0.0,1,1\n")
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
""")
    with pytest.raises(ConfigError, match="synthetic"):
        sweep(cfg, "lambda", [1.0])


# --- CSV contract ----------------------------------------------------------------


def test_csv_header_and_cells_round_trip():
    rows = run_experiment(_cfg())
    buf = io.StringIO()
    emit_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(parsed) == len(rows)
    for row, cells in zip(rows, parsed):
        assert cells["policy"] == row.policy
        assert cells["seed"] == row.seed
        assert float(cells["cost_per_request"]) == row.cost_per_request
        assert float(cells["param_value"]) == row.param_value
        if row.cost_sd is None:
            assert cells["cost_sd"] == ""
        else:
            assert float(cells["cost_sd"]) == row.cost_sd


def test_csv_bytes_are_stable_and_file_equal(tmp_path):
    rows = run_experiment(_cfg())
    one, two = io.StringIO(), io.StringIO()
    emit_csv(rows, one)
    emit_csv(rows, two)
    assert one.getvalue() == two.getvalue()
    out = tmp_path / "rows.csv"
    emit_csv(rows, out)
    assert out.read_text(encoding="utf-8") == one.getvalue()


def test_parallel_sweep_emits_identical_csv():
    cfg = _cfg()
    serial, parallel = io.StringIO(), io.StringIO()
    emit_csv(sweep(cfg, "ttl", [0.0, 60.0], jobs=1), serial)
    emit_csv(sweep(cfg, "ttl", [0.0, 60.0], jobs=2), parallel)
    assert serial.getvalue() == parallel.getvalue()


def test_integer_cells_have_no_decimal_point():
    row = ResultRow(
        policy="lru",
        param_name="capacity",
        param_value=32,
        seed="1",
        requests=100,
        hits=40,
        cost_per_request=1e-3,
        compute_d=0.0432,
        storage_d=0.0,
        transmission_d=0.0525,
        trace_checksum="00000000",
    )
    buf = io.StringIO()
    emit_csv([row], buf)
    cells = buf.getvalue().splitlines()[1].split(",")
    assert cells[2] == "32"
    assert cells[4] == "100"
    assert cells[11] == ""


# --- report tables ----------------------------------------------------------------


def test_analytic_table_structure_and_ordering():
    cfg = _cfg()
    rows = analytic_table(cfg, ttl_grid=[0.0, 60.0])
    assert [r["evaluator"] for r in rows] == [
        "global_ttl",
        "global_ttl",
        "optimal_global_ttl",
        "individual_ttl",
        "lower_bound",
    ]
    assert set(rows[0]) == set(ANALYTIC_COLUMNS)
    t0 = rows[0]["cost_per_request"]
    assert t0 == pytest.approx(
        cfg.costs.compute_per_item + cfg.costs.transmission_per_item, rel=1e-12
    )
    best = rows[2]["cost_per_request"]
    assert best == min(rows[0]["cost_per_request"], rows[1]["cost_per_request"])
    lb = rows[4]["cost_per_request"]
    indiv = rows[3]["cost_per_request"]
    assert lb <= indiv <= best


def test_analytic_table_lambda_grid():
    rows = analytic_table(_cfg(), lambda_grid=[10.0, 40.0])
    lam_rows = [r for r in rows if r["param_name"] == "lambda"]
    assert [r["param_value"] for r in lam_rows] == [10.0, 40.0]
    for r in lam_rows:
        assert r["evaluator"] == "optimal_global_ttl"
        assert r["ttl"] >= 0.0
    with pytest.raises(ConfigError):
        analytic_table(_cfg(), lambda_grid=[-3.0])


def test_validation_report_compares_sim_to_closed_form():
    cfg = _cfg(SMALL_SYNTH.replace("duration = 30.0", "duration = 400.0"))
    (report,) = validation_report(cfg)
    assert set(report) == set(VALIDATION_COLUMNS)
    assert report["policy"] == "global_ttl"
    assert report["seeds"] == 3
    assert report["rel_err"] == pytest.approx(
        abs(report["sim_mean"] - report["analytic_cost"]) / report["analytic_cost"],
        rel=1e-12,
    )
    assert report["rel_err"] < 0.05


def test_validation_report_rejects_unsupported_setups(tmp_path):
    with pytest.raises(ConfigError, match="closed-form"):
        validation_report(
            _cfg(SMALL_SYNTH.replace("kind = global_ttl\nttl = 60.0", "kind = lru\ncapacity = 10"))
        )
    trace = tmp_path / "t.csv"
    trace.write_text("0.0,1,1\n")
    cfg = _cfg(BASE_COSTS + f"""
[policy]
kind = global_ttl
ttl = 1.0

[workload]
source = request_trace
path = {trace}
""")
    with pytest.raises(ConfigError, match="synthetic"):
        validation_report(cfg)


def test_emit_dict_csv_writes_fixed_columns():
    rows = [{"a": 1, "b": "x", "c": 0.5}, {"a": 2, "b": "", "c": None}]
    buf = io.StringIO()
    emit_dict_csv(rows, ("a", "b", "c"), buf)
    assert buf.getvalue() == "a,b,c\n1,x,0.5\n2,,\n"
