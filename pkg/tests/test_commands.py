import json
import os
import shutil
import sys
import tempfile
import unittest
from io import StringIO
from pathlib import Path

import numpy as np

from src.svarmsh.identification import NO_HETEROSKEDASTICITY
from src.svarmsh.inference import estimate_mdd, sddr_joint_identification
from src.svarmsh.model import InsufficientDataError, PriorHyperparameters, simulate_data
from src.svarmsh.pipeline import (
    ConfigError,
    RunConfig,
    TruthConfig,
    cmd_compare,
    cmd_estimate,
    cmd_identify,
    cmd_mdd,
    cmd_sddr,
    cmd_simulate,
    load_csv,
    parameters_from_dict,
)
from src.svarmsh.pipeline.commands import DRAWS_DIR, run_hypotheses
from src.svarmsh.pipeline.main import main
from src.svarmsh.sampler import DrawStore, PosteriorDraw, SamplerConfig
from tests.helpers import bivariate_truth, records_store, store_from_draws


def small_config(data_path: Path, output_dir: Path, n_states: int = 2) -> RunConfig:
    return RunConfig(
        data_path=data_path,
        lags=1,
        n_states=n_states,
        sampler=SamplerConfig(n_burn=50, n_draws=100, n_chains=2, seed=11, progress_bar=False),
        output_dir=output_dir,
    )


def constant_draws(params, n_draws: int, count: float = 50.0):
    """Draws repeating one parameter point, with omega conditionals centred on its omega."""
    return [
        PosteriorDraw(
            params=params,
            state_counts=np.full(params.n_states, 10),
            rb_a=np.full(params.omega.shape, count),
            rb_b=count * params.omega,
            log_likelihood=0.0,
            accepted=True,
            sweep=k,
        )
        for k in range(n_draws)
    ]


class CommandTestCase(unittest.TestCase):

    def setUp(self):
        self.held_stdout = sys.stdout
        sys.stdout = self.captured_output = StringIO()
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        sys.stdout = self.held_stdout
        shutil.rmtree(self.tmp, ignore_errors=True)


class TestSimulate(CommandTestCase):

    def test_writes_data_and_truth(self):
        data, states = cmd_simulate(TruthConfig.default(), self.tmp, T=200, seed=3)
        loaded = load_csv(self.tmp / "data.csv", lags=1)
        self.assertEqual(loaded.digest(), data.digest())
        self.assertEqual(loaded.n_observations, 200)
        with open(self.tmp / "truth.json", "r", encoding="utf-8") as f:
            truth = json.load(f)
        self.assertEqual(len(truth["state_path"]), 200)
        self.assertEqual(truth["state_path"], (states.s + 1).tolist())
        self.assertEqual(set(truth["state_path"]) - {1, 2}, set())
        self.assertEqual(truth["data_digest"], data.digest())
        self.assertLess(truth["spectral_radius"], 1.0)

    def test_truth_file_round_trip(self):
        cmd_simulate(TruthConfig.default(), self.tmp, T=50, seed=3)
        reread = TruthConfig.from_json(self.tmp / "truth.json")
        self.assertEqual((reread.T, reread.seed), (50, 3))
        np.testing.assert_array_equal(reread.params.A0, TruthConfig.default().params.A0)

    def test_short_sample_is_rejected(self):
        # N = 6, p = 4: 6 * 25 = 150 reduced-form coefficients
        truth = TruthConfig(
            params=parameters_from_dict(
                {"A0": np.eye(6).tolist(), "A": np.zeros((6, 25)).tolist(), "lambda1": [1.0] * 6}
            ),
            seed=1,
        )
        with self.assertRaises(InsufficientDataError):
            cmd_simulate(truth, self.tmp, T=50)
        self.assertFalse((self.tmp / "data.csv").exists())

    def test_seeded_runs_are_identical(self):
        cmd_simulate(TruthConfig.default(), self.tmp / "a", T=80, seed=5)
        cmd_simulate(TruthConfig.default(), self.tmp / "b", T=80, seed=5)
        for name in ("data.csv", "truth.json"):
            self.assertEqual((self.tmp / "a" / name).read_bytes(), (self.tmp / "b" / name).read_bytes())


class TestEstimateAndInference(unittest.TestCase):
    """One short two-chain run shared by the tests of the downstream commands."""

    @classmethod
    def setUpClass(cls):
        cls.held_stdout = sys.stdout
        sys.stdout = StringIO()
        cls.tmp = Path(tempfile.mkdtemp())
        cmd_simulate(TruthConfig.default(), cls.tmp / "sim", T=200, seed=3)
        cls.config = small_config(cls.tmp / "sim" / "data.csv", cls.tmp / "run")
        cls.store, cls.bundle = cmd_estimate(cls.config)

    @classmethod
    def tearDownClass(cls):
        sys.stdout = cls.held_stdout
        shutil.rmtree(cls.tmp, ignore_errors=True)

    def test_posterior_table(self):
        posterior = self.bundle.tables["posterior"]
        for label in ("a2_1", "A[y1,const]", "A[y2,y1(-1)]", "lambda1[y1]", "omega[2,y1]", "P[1,1]", "gamma_alpha"):
            self.assertIn(label, posterior.index)
        self.assertEqual(list(posterior.columns), ["mean", "sd", "nse"])
        self.assertTrue(np.all(np.isfinite(posterior["mean"])))
        self.assertEqual(self.bundle.tables["smoothed_probabilities"].shape, (200, 2))
        self.assertIn("convergence", self.bundle.tables)
        self.assertEqual(self.bundle.records["n_draws"], 100)

    def test_files_written(self):
        out = self.tmp / "run"
        for name in ("estimate.json", "estimate_posterior.csv", "estimate_report.md", "estimate_relative_variances.csv"):
            self.assertTrue((out / name).exists(), name)
        self.assertTrue((out / DRAWS_DIR / "metadata.json").exists())
        reloaded = DrawStore.load(out / DRAWS_DIR)
        np.testing.assert_array_equal(reloaded.rows(), self.store.rows())

    def test_sddr_matches_library(self):
        bundle = cmd_sddr(self.config, ["identification:1,2", "homoskedasticity:each"], n_batches=50)
        table = bundle.tables["sddr"]
        self.assertEqual(list(table["hypothesis"]), ["U[1,2]", "H[1]", "H[2]"])
        direct = sddr_joint_identification(self.store, 0, 1, n_batches=50)
        self.assertEqual(table["log_sddr"].iloc[0], direct.log_sddr)
        self.assertEqual(table["nse"].iloc[0], direct.nse)
        self.assertIn("identification_matrix", bundle.tables)
        self.assertTrue((self.tmp / "run" / "sddr_sddr.csv").exists())

    def test_mdd_of_one_store(self):
        bundle = cmd_mdd(self.config, [self.tmp / "run" / DRAWS_DIR], n_importance=400, n_batches=10)
        table = bundle.tables["mdd"]
        self.assertEqual(len(table), 1)
        self.assertTrue(table["best"].iloc[0])
        self.assertAlmostEqual(table["probability"].iloc[0], 1.0)

        child = np.random.SeedSequence(11).spawn(1)[0]
        data = load_csv(self.tmp / "sim" / "data.csv", lags=1)
        direct = estimate_mdd(self.store, data, n_importance=400, rng=np.random.default_rng(child), n_batches=10)
        self.assertEqual(table["log_mdd"].iloc[0], direct.log_mdd)
        self.assertEqual(bundle.records["data_digest"], data.digest())

    def test_mdd_rejects_stores_of_other_data(self):
        params, scheme = bivariate_truth()
        other, _ = simulate_data(params, T=60, seed=9)
        foreign = store_from_draws(constant_draws(params, 10), other, scheme, PriorHyperparameters.default(2, 2))
        foreign.save(self.tmp / "foreign")
        with self.assertRaises(ConfigError):
            cmd_mdd(self.config, [self.tmp / "run" / DRAWS_DIR, self.tmp / "foreign"], n_importance=50)

    def test_identify_from_store(self):
        bundle = cmd_identify(self.tmp / "run" / DRAWS_DIR, self.tmp / "identify", n_batches=20)
        self.assertEqual(list(bundle.tables["rows"].index), ["y1", "y2"])
        self.assertIn("sddr", bundle.tables)
        self.assertIn("relative_variances", bundle.tables)


class TestSingleState(CommandTestCase):

    def test_estimate_without_heteroskedasticity(self):
        cmd_simulate(TruthConfig.default(), self.tmp / "sim", T=120, seed=4)
        config = small_config(self.tmp / "sim" / "data.csv", self.tmp / "run", n_states=1)
        store, bundle = cmd_estimate(config)
        self.assertEqual(store.layout.n_states, 1)
        self.assertNotIn("relative_variances", bundle.tables)
        self.assertTrue(any("unavailable" in note for note in bundle.notes))
        self.assertEqual(bundle.records["identification"]["verdict"], NO_HETEROSKEDASTICITY)
        posterior = bundle.tables["posterior"]
        self.assertIn("lambda1[y2]", posterior.index)
        self.assertFalse(any(label.startswith(("omega", "P[")) for label in posterior.index))


class TestReproducibility(CommandTestCase):

    def run_pipeline(self, root: Path) -> None:
        cmd_simulate(TruthConfig.default(), root, T=200, seed=3)
        config = small_config(root / "data.csv", root)
        cmd_estimate(config)
        cmd_sddr(config, ["identification:all-pairs", "homoskedasticity:each"], n_batches=20)
        cmd_mdd(config, [], n_importance=300, n_batches=10)

    def test_same_seed_same_bytes(self):
        self.run_pipeline(self.tmp / "first")
        self.run_pipeline(self.tmp / "second")
        for name in (
            "data.csv",
            "estimate_posterior.csv",
            "estimate_smoothed_probabilities.csv",
            "sddr_sddr.csv",
            "mdd_mdd.csv",
            "sddr.json",
            "mdd.json",
            os.path.join(DRAWS_DIR, "chain_0.draws.bin"),
            os.path.join(DRAWS_DIR, "chain_1.draws.bin"),
        ):
            first = (self.tmp / "first" / name).read_bytes()
            second = (self.tmp / "second" / name).read_bytes()
            self.assertEqual(first, second, name)


class TestHypothesisGrammar(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(1)
        n_draws, n = 200, 3
        rb_a = np.full((n_draws, 1, n), 201.0)
        rb_b = 3.0 + 200.0 * np.exp(rng.normal(0.0, 0.05, size=(n_draws, 1, n))) * np.array([1.0, 3.0, 8.0])
        self.store = records_store(rb_a, rb_b)

    def test_identification_specs(self):
        pairs = run_hypotheses(self.store, "identification:all-pairs", n_batches=20)
        self.assertEqual([r.hypothesis.label for r in pairs], ["U[1,2]", "U[1,3]", "U[2,3]"])
        by_state = run_hypotheses(self.store, "identification:state:2", n_batches=20)
        self.assertEqual(len(by_state), 3)
        self.assertEqual(by_state[0].hypothesis.label, "omega[2,1] = omega[2,2]")
        one = run_hypotheses(self.store, "Identification:3,1", n_batches=20)
        self.assertEqual(one[0].hypothesis.label, "U[1,3]")

    def test_homoskedasticity_specs(self):
        self.assertEqual(len(run_hypotheses(self.store, "homoskedasticity:each", n_batches=20)), 3)
        joint = run_hypotheses(self.store, "homoskedasticity:joint:all", n_batches=20)
        self.assertEqual([r.hypothesis.label for r in joint], ["H[1,2,3]"])
        subset = run_hypotheses(self.store, "homoskedasticity:joint:1,3", n_batches=20)
        self.assertEqual(subset[0].hypothesis.label, "H[1,3]")
        self.assertEqual(run_hypotheses(self.store, "homoskedasticity:2", n_batches=20)[0].hypothesis.label, "H[2]")

    def test_malformed_specs(self):
        for spec in ("identification:1,1", "identification:state:1", "identification:state:x", "variance:all", "homoskedasticity:all"):
            with self.assertRaises(ConfigError, msg=spec):
                run_hypotheses(self.store, spec, n_batches=20)


class TestCompare(CommandTestCase):

    def write_result(self, name: str, digest: str, models) -> Path:
        path = self.tmp / name
        record = {"records": {"data_digest": digest, "models": [{"model": m, "log_mdd": v, "nse": 0.1} for m, v in models]}}
        with open(path, "w", encoding="utf-8") as f:
            json.dump(record, f)
        return path

    def test_ranking(self):
        first = self.write_result("a.json", "abc", [("recursive", -120.0), ("unrestricted", -118.0)])
        second = self.write_result("b.json", "abc", [("taylor_rule", -119.0)])
        ranked = cmd_compare([first, second], self.tmp / "out")
        self.assertEqual(list(ranked["model"]), ["unrestricted", "taylor_rule", "recursive"])
        self.assertEqual(list(ranked.index), [1, 2, 3])
        self.assertAlmostEqual(ranked["probability"].sum(), 1.0)
        self.assertTrue((self.tmp / "out" / "compare_ranking.csv").exists())
        self.assertIn("MODEL COMPARISON", self.captured_output.getvalue())

    def test_mismatched_inputs(self):
        first = self.write_result("a.json", "abc", [("recursive", -120.0)])
        other = self.write_result("b.json", "xyz", [("unrestricted", -118.0)])
        repeat = self.write_result("c.json", "abc", [("recursive", -121.0)])
        with self.assertRaises(ConfigError):
            cmd_compare([first, other], self.tmp / "out")
        with self.assertRaises(ConfigError):
            cmd_compare([first, repeat], self.tmp / "out")


class TestIdentify(CommandTestCase):

    def write(self, name: str, text: str) -> Path:
        path = self.tmp / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_distinct_relative_variances(self):
        bundle = cmd_identify(self.write("lam.csv", "x,y\n1.0,2.0\n4.0,18.0\n"), self.tmp / "out")
        self.assertEqual(list(bundle.tables["rows"]["verdict"]), ["unique", "unique"])
        np.testing.assert_allclose(bundle.tables["relative_variances"]["state2"], [4.0, 9.0])
        self.assertTrue((self.tmp / "out" / "identify.json").exists())

    def test_proportional_variances(self):
        bundle = cmd_identify(self.write("lam.csv", "x,y\n1.0,2.0\n3.0,6.0\n"), self.tmp / "out")
        self.assertEqual(list(bundle.tables["rows"]["verdict"]), ["not established"] * 2)
        self.assertEqual(bundle.records["identification"]["colliding_pairs"], [[1, 2]])

    def test_single_state(self):
        bundle = cmd_identify(self.write("lam.csv", "x,y\n1.0,2.0\n"), self.tmp / "out")
        self.assertEqual(bundle.records["identification"]["reason"], NO_HETEROSKEDASTICITY)
        self.assertNotIn("relative_variances", bundle.tables)
        with self.assertRaises(ConfigError):
            cmd_identify(self.tmp / "lam.csv", self.tmp / "out", target="x")

    def test_reordering_target(self):
        params, scheme = bivariate_truth()
        data, _ = simulate_data(params, T=60, seed=3)
        store = store_from_draws(constant_draws(params, 20), data, scheme, PriorHyperparameters.default(2, 2))
        store.save(self.tmp / "store")
        bundle = cmd_identify(self.tmp / "store", self.tmp / "out", target="y1", n_batches=5)
        reordering = bundle.records["reordering"]
        self.assertEqual(reordering["order"], ["y2", "y1"])
        np.testing.assert_allclose(reordering["omega"], [[9.0, 4.0]])
        self.assertEqual(bundle.records["identification"]["verdict"], "unique")

        first = (self.tmp / "out" / "identify.json").read_bytes()
        cmd_identify(self.tmp / "store", self.tmp / "out", target="y1", n_batches=5)
        self.assertEqual((self.tmp / "out" / "identify.json").read_bytes(), first)

    def test_directory_without_store(self):
        (self.tmp / "empty").mkdir()
        with self.assertRaises(ConfigError):
            cmd_identify(self.tmp / "empty", self.tmp / "out")


class TestMain(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.held_stderr = sys.stderr
        sys.stderr = self.captured_errors = StringIO()

    def tearDown(self):
        sys.stderr = self.held_stderr
        super().tearDown()

    def test_simulate_succeeds(self):
        code = main(["simulate", "--out", str(self.tmp), "--T", "100", "--seed", "1"])
        self.assertEqual(code, 0)
        self.assertTrue((self.tmp / "data.csv").exists())

    def test_missing_config_is_fatal(self):
        code = main(["estimate", "--config", str(self.tmp / "absent.ini")])
        self.assertEqual(code, 1)
        self.assertIn("FATAL ERROR", self.captured_errors.getvalue())

    def test_short_sample_is_a_usage_error(self):
        code = main(["simulate", "--out", str(self.tmp), "--T", "2"])
        self.assertEqual(code, 2)
        self.assertIn("Error:", self.captured_errors.getvalue())


if __name__ == "__main__":
    unittest.main(argv=["first-arg-is-ignored"], exit=False)
