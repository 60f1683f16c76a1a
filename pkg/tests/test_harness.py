import json
import math

import pytest

from torusgraph.cli import main as cli_main
from torusgraph.harness import (
    ExperimentPlan,
    SweepPoint,
    replicate_seed,
    run_experiment,
    verify_coupling,
    verify_theory,
    weights_from_dict,
    weights_to_dict,
)
from torusgraph.model import WeightSpec, c_of_lambda, lambda_of_c


def small_plan(**over):
    base = {
        "sweep": [{"N": 10, "lambda": 2.0}, {"N": 12, "c": 0.3}],
        "replicates": 3,
        "estimator": "C_over_N2",
        "seed": 42,
    }
    base.update(over)
    return ExperimentPlan.from_dict(base)


class TestWeightsDict:
    def test_default_constant(self):
        w = weights_from_dict(None)
        assert w.kind == "constant" and w.mean == 1.0

    def test_discrete_roundtrip(self):
        d = {"kind": "discrete", "values": [1.0, 2.0], "probs": [0.5, 0.5]}
        w = weights_from_dict(d)
        assert weights_to_dict(w) == d

    def test_truncated_exponential(self):
        w = weights_from_dict({"kind": "truncated_exponential", "rate": 1.0, "upper": 4.0})
        assert w.support_bound == 4.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            weights_from_dict({"kind": "lognormal"})


class TestPlanParsing:
    def test_c_lambda_exclusive(self):
        with pytest.raises(ValueError):
            ExperimentPlan.from_dict({"sweep": [{"N": 8, "c": 0.5, "lambda": 1.0}]})
        with pytest.raises(ValueError):
            ExperimentPlan.from_dict({"sweep": [{"N": 8}]})

    def test_lambda_converted_to_c(self):
        plan = ExperimentPlan.from_dict({"sweep": [{"N": 8, "lambda": 2.0}]})
        assert plan.sweep[0].c == pytest.approx(c_of_lambda(2.0))
        assert plan.sweep[0].lam == pytest.approx(2.0)

    def test_single_point_shorthand(self):
        plan = ExperimentPlan.from_dict({"N": 9, "c": 0.4, "replicates": 2})
        assert len(plan.sweep) == 1 and plan.sweep[0].N == 9

    def test_global_weights_inherited(self):
        d = {
            "sweep": [{"N": 8, "c": 0.2}, {"N": 8, "c": 0.2, "weights": {"kind": "constant", "value": 2.0}}],
            "weights": {"kind": "discrete", "values": [1.0], "probs": [1.0]},
        }
        plan = ExperimentPlan.from_dict(d)
        assert plan.sweep[0].weights["kind"] == "discrete"
        assert plan.sweep[1].weights["kind"] == "constant"

    def test_bad_estimator(self):
        with pytest.raises(ValueError):
            small_plan(estimator="C_over_N")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "plan.json"
        path.write_text(json.dumps({"N": 8, "lambda": 1.0, "replicates": 2, "seed": 7}))
        plan = ExperimentPlan.load(path)
        assert plan.seed == 7 and plan.replicates == 2


class TestReplicateSeeds:
    def test_stable(self):
        assert replicate_seed(1, 2, 3) == replicate_seed(1, 2, 3)

    def test_distinct(self):
        seeds = {replicate_seed(r, p, k) for r in range(3) for p in range(3) for k in range(3)}
        assert len(seeds) == 27


class TestRunExperiment:
    def test_deterministic_csv(self):
        plan = small_plan()
        a = run_experiment(plan).to_csv()
        b = run_experiment(small_plan()).to_csv()
        assert a == b

    def test_threads_match_serial(self):
        plan = small_plan()
        serial = run_experiment(plan, threads=1).to_csv()
        parallel = run_experiment(small_plan(), threads=2).to_csv()
        assert serial == parallel

    def test_zero_c_degenerate(self):
        # empty graph: every component is a single vertex, C/N^2 = 1/N^2
        plan = ExperimentPlan.from_dict({"N": 10, "c": 0.0, "replicates": 2})
        res = run_experiment(plan)
        assert res.points[0].mean == pytest.approx(1 / 100)
        assert all(r["edges"] == 0 for r in res.points[0].replicate_rows)

    def test_supercritical_target_attached(self):
        plan = small_plan()
        res = run_experiment(plan)
        first = res.points[0]
        assert first.target == pytest.approx(0.7968, abs=1e-3)
        assert first.z is not None

    def test_subcritical_point_has_no_N2_target(self):
        plan = small_plan()
        res = run_experiment(plan)
        assert res.points[1].target is None  # lambda < 1 under C_over_N2

    def test_log_estimator_target(self):
        plan = ExperimentPlan.from_dict(
            {"N": 30, "lambda": 0.5, "replicates": 2, "estimator": "C_over_logN2"}
        )
        res = run_experiment(plan)
        assert res.points[0].target == pytest.approx(5.1774, abs=1e-3)

    def test_capped_probability_warning(self):
        plan = ExperimentPlan.from_dict({"N": 4, "c": 5.0, "replicates": 1})
        res = run_experiment(plan)
        assert res.points[0].warnings

    def test_write_json(self, tmp_path):
        path = tmp_path / "out.json"
        run_experiment(small_plan(replicates=1)).write(path, fmt="json")
        payload = json.loads(path.read_text())
        assert len(payload["points"]) == 2
        assert payload["points"][0]["replicates"][0]["C"] >= 1


class TestVerifyTheory:
    def test_exclusive_args(self):
        with pytest.raises(ValueError):
            verify_theory()
        with pytest.raises(ValueError):
            verify_theory(lam=1.0, c=0.5)

    def test_supercritical(self):
        r = verify_theory(lam=2.0)
        assert r.beta == pytest.approx(0.79681213002002, abs=1e-10)

    def test_subcritical_constant_equals_tilted_limit(self):
        r = verify_theory(lam=0.5)
        assert r.sub_const == pytest.approx(5.177398899124181, abs=1e-8)
        assert r.sub_const_weighted == pytest.approx(r.sub_const, abs=1e-8)

    def test_critical_suppresses_constants(self):
        r = verify_theory(lam=0.4, weights={"kind": "discrete", "values": [1.0, 2.0], "probs": [0.5, 0.5]})
        assert r.regime == "critical"
        assert r.beta_hat is None and r.sub_const_weighted is None

    def test_c_argument(self):
        r = verify_theory(c=c_of_lambda(2.0))
        assert r.lam == pytest.approx(2.0)

    def test_weight_spec_passthrough(self):
        r = verify_theory(lam=1.0, weights=WeightSpec.discrete([1.0, 2.0], [0.5, 0.5]))
        assert r.regime == "supercritical"


class TestVerifyCoupling:
    def test_all_pass(self):
        rows = verify_coupling()
        assert rows and all(r["passed"] for r in rows)
        checks = {r["check"] for r in rows}
        assert checks == {"tv_bound", "lambda_N_expansion", "lambda_N_trend"}

    def test_empty_grids(self):
        assert verify_coupling(tv_grid=(), lambda_n_sweep=()) == []


class TestCLI:
    def test_theory_subcommand(self, capsys):
        assert cli_main(["theory", "--lambda", "2.0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["regime"] == "supercritical"

    def test_theory_weights_literal(self, capsys):
        rc = cli_main([
            "theory", "--lambda", "0.3",
            "--weights", '{"kind": "discrete", "values": [1.0, 2.0], "probs": [0.5, 0.5]}',
        ])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["regime"] == "subcritical"

    def test_simulate_from_config(self, tmp_path, capsys):
        cfg = tmp_path / "plan.json"
        cfg.write_text(json.dumps({"N": 10, "lambda": 2.0, "replicates": 2, "seed": 1}))
        out = tmp_path / "res.csv"
        assert cli_main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("row,N,c,lambda")
        assert len(lines) == 4  # header + 2 replicates + summary

    def test_simulate_stdout_deterministic(self, tmp_path, capsys):
        cfg = tmp_path / "plan.json"
        cfg.write_text(json.dumps({"N": 8, "c": 0.5, "replicates": 2, "seed": 3}))
        cli_main(["simulate", "--config", str(cfg)])
        first = capsys.readouterr().out
        cli_main(["simulate", "--config", str(cfg)])
        assert capsys.readouterr().out == first

    def test_verify_subcommand(self, capsys):
        assert cli_main(["verify"]) == 0
        assert capsys.readouterr().out.strip().endswith("PASS")

    def test_branching_borel(self, capsys):
        rc = cli_main(["branching", "--check", "borel", "--lambda-prime", "0.5",
                       "--samples", "20000", "--kmax", "5"])
        assert rc == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_export_graph(self, tmp_path, capsys):
        prefix = tmp_path / "g"
        rc = cli_main(["export-graph", "--N", "8", "--lambda", "2.0",
                       "--out-prefix", str(prefix), "--seed", "5"])
        assert rc == 0
        edges = (tmp_path / "g.edges").read_text().splitlines()
        weights = (tmp_path / "g.weights").read_text().splitlines()
        assert len(weights) == 64
        assert all(len(line.split()) == 4 for line in edges)

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            cli_main([])
