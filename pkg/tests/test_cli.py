import json
import os
import tempfile
import unittest

import numpy as np
import pydantic
from ddt import data, ddt

from evpos.cli import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, main
from evpos.config import DEFAULT_TOLERANCES
from evpos.linalg import write_matrix_csv
from evpos.scenarios import (Kind, Parameters, Scenario, SemigroupSpec, builtin_suite, motivating_matrix,
                             run_scenario)


def _read_summary(directory: str) -> dict:
    with open(os.path.join(directory, "summary.json"), encoding="utf-8") as f:
        return json.load(f)


@ddt
class TestCli(unittest.TestCase):
    """End-to-end tests of the command line entry point."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def _write_scenario(self, payload: dict, name: str = "scenario.json") -> str:
        path = os.path.join(self.tmp, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)
        return path

    def test_run_motivating_matrix(self):
        path = self._write_scenario({"name": "motivating", "kind": "analyze-matrix",
                                     "matrix": motivating_matrix().tolist(), "parameters": {"t_max": 50.0}})
        out = os.path.join(self.tmp, "out")
        self.assertEqual(main(["run", path, "--out", out]), EXIT_OK)
        summary = _read_summary(out)
        self.assertEqual(summary["schema"], "evpos/1")
        self.assertEqual(summary["status"], "ok")
        verdict = summary["result"]["verdict"]
        self.assertEqual(verdict["classification"], "EventuallyPositiveStrict")
        self.assertAlmostEqual(verdict["t0"], 0.58, delta=0.01)
        self.assertFalse(summary["result"]["metzler"])
        self.assertAlmostEqual(summary["result"]["growth"]["estimate"], 0.0, delta=1e-3)
        self.assertEqual(summary["files"], ["limit_projection.csv", "matrix.csv", "scan.csv"])
        projection = np.loadtxt(os.path.join(out, "limit_projection.csv"), delimiter=",")
        np.testing.assert_allclose(projection, np.full((3, 3), 1.0 / 3.0), atol=1e-12)

    def test_runs_are_byte_identical(self):
        path = self._write_scenario({"name": "markov", "kind": "analyze-matrix",
                                     "matrix": [[-1.0, 1.0], [2.0, -2.0]], "parameters": {"t_max": 10.0}})
        contents = []
        for run in ("a", "b"):
            out = os.path.join(self.tmp, run)
            self.assertEqual(main(["run", path, "--out", out]), EXIT_OK)
            with open(os.path.join(out, "summary.json"), "rb") as f:
                contents.append(f.read())
        self.assertEqual(contents[0], contents[1])

    def test_matrix_file_is_resolved_against_the_scenario(self):
        write_matrix_csv(os.path.join(self.tmp, "generator.csv"), [[-1.0, 1.0], [2.0, -2.0]])
        path = self._write_scenario({"name": "from-file", "kind": "analyze-matrix", "matrix_file": "generator.csv",
                                     "parameters": {"t_max": 10.0}})
        out = os.path.join(self.tmp, "out")
        self.assertEqual(main(["run", path, "--out", out]), EXIT_OK)
        result = _read_summary(out)["result"]
        self.assertEqual(result["verdict"]["classification"], "Positive")
        self.assertTrue(result["markov"]["generator"])
        self.assertTrue(result["markov"]["stochastic"])

    @data(
        {"name": "x", "kind": "analyze-matrix", "matrix": [[0.0]], "parameters": {"unknown": 1}},
        {"name": "x", "kind": "analyze-matrix", "matrix": [[0.0]], "matrix_file": "m.csv"},
        {"name": "x", "kind": "no-such-kind", "matrix": [[0.0]]},
        {"name": "x", "kind": "perturb", "matrix": [[0.0]]},
        {"name": "x", "kind": "probe-local", "semigroup": {"model": "heat"}, "initial": {"profile": "bump"}},
    )
    def test_invalid_documents(self, payload):
        path = self._write_scenario(payload)
        self.assertEqual(main(["run", path, "--out", os.path.join(self.tmp, "out")]), EXIT_INPUT)

    def test_malformed_json(self):
        path = os.path.join(self.tmp, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write("{not json")
        self.assertEqual(main(["run", path]), EXIT_INPUT)

    def test_missing_scenario_file(self):
        self.assertEqual(main(["run", os.path.join(self.tmp, "absent.json")]), EXIT_INPUT)

    def test_missing_referenced_file(self):
        path = self._write_scenario({"name": "x", "kind": "analyze-matrix", "matrix_file": "absent.csv"})
        self.assertEqual(main(["run", path, "--out", os.path.join(self.tmp, "out")]), EXIT_INPUT)

    def test_invalid_operator(self):
        path = self._write_scenario({"name": "x", "kind": "analyze-matrix",
                                     "operator": {"order": 2, "bc": "Clamped", "n": 10}})
        self.assertEqual(main(["run", path, "--out", os.path.join(self.tmp, "out")]), EXIT_INPUT)

    def test_analysis_failure_writes_error_summary(self):
        path = self._write_scenario({"name": "off-spectrum", "kind": "sweep-resolvent",
                                     "matrix": [[-1.0, 1.0], [1.0, -1.0]], "parameters": {"lambda0": 5.0}})
        out = os.path.join(self.tmp, "out")
        self.assertEqual(main(["run", path, "--out", out]), EXIT_NUMERICAL)
        summary = _read_summary(out)
        self.assertEqual(summary["status"], "error")
        self.assertEqual(summary["error"]["origin"], "maxprinciple.resolvent_sign_sweep")
        self.assertEqual(summary["error"]["type"], "PreconditionError")

    def test_analyze_matrix_command(self):
        csv_path = write_matrix_csv(os.path.join(self.tmp, "rotation.csv"),
                                    [[0.0, 0.0, 0.0], [0.0, -1.0, -1.0], [0.0, 1.0, -1.0]])
        out = os.path.join(self.tmp, "out")
        self.assertEqual(main(["analyze-matrix", str(csv_path), "--t-max", "20", "--out", out]), EXIT_OK)
        verdict = _read_summary(out)["result"]["verdict"]
        self.assertEqual(verdict["classification"], "NotEventuallyPositive")
        self.assertIsNotNone(verdict["witness"])

    def test_suite_filter(self):
        out = os.path.join(self.tmp, "suite")
        self.assertEqual(main(["suite", "--filter", "markov", "--out", out]), EXIT_OK)
        self.assertEqual(os.listdir(out), ["markov-example"])
        summary = _read_summary(os.path.join(out, "markov-example"))
        self.assertEqual(summary["result"]["verdict"]["classification"], "Positive")

    def test_suite_without_match(self):
        self.assertEqual(main(["suite", "--filter", "no-such-scenario", "--out", self.tmp]), EXIT_INPUT)

    def test_suite_jobs(self):
        out = os.path.join(self.tmp, "suite")
        self.assertEqual(main(["suite", "--filter", "shift", "--out", out, "--jobs", "2"]), EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(out, "right-shift", "summary.json")))


BUILTIN_NAMES = [s.name for s in builtin_suite()]
REQUIRED_NAMES = {
    "example-2.1-matrix", "example-2.2-periodic-biharmonic", "markov-example", "heat-kernel", "right-shift",
    "clamped-beam", "nonlocal-laplacian", "biharmonic-line-local", "neumann-antimax", "dirichlet-no-antimax",
    "perturbation-fragility",
}


@ddt
class TestBuiltinScenarios(unittest.TestCase):
    """The built-in scenarios run through :func:`run_scenario`."""

    @classmethod
    def setUpClass(cls):
        cls.suite = {s.name: s for s in builtin_suite()}

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def run_builtin(self, name: str) -> dict:
        return run_scenario(self.suite[name], self.tmp).summary["result"]

    def test_names(self):
        self.assertEqual(len(BUILTIN_NAMES), len(set(BUILTIN_NAMES)))
        self.assertLessEqual(REQUIRED_NAMES, set(BUILTIN_NAMES))
        self.assertEqual(len(BUILTIN_NAMES), 12)

    @data(*BUILTIN_NAMES)
    def test_runs_are_byte_identical(self, name):
        contents = []
        for run in ("a", "b"):
            out = os.path.join(self.tmp, run)
            run_scenario(self.suite[name], out)
            with open(os.path.join(out, "summary.json"), "rb") as f:
                contents.append(f.read())
        self.assertEqual(contents[0], contents[1])

    def test_motivating_matrix(self):
        result = self.run_builtin("example-2.1-matrix")
        self.assertEqual(result["verdict"]["classification"], "EventuallyPositiveStrict")
        self.assertAlmostEqual(result["limit"]["projection_min"], 1.0 / 3.0, places=12)
        self.assertAlmostEqual(result["limit"]["projection_max"], 1.0 / 3.0, places=12)
        self.assertLess(result["limit"]["distance_at_t_max"], 1e-6)
        self.assertLess(result["growth"]["error"], 1e-3)

    def test_markov_example(self):
        result = self.run_builtin("markov-example")
        self.assertTrue(result["markov"]["generator"])
        self.assertTrue(result["markov"]["stochastic"])
        for error in result["markov"]["row_sum_error"].values():
            self.assertLessEqual(error, 1e-9)

    def test_right_shift(self):
        result = self.run_builtin("right-shift")
        self.assertEqual(result["onset_time"], 0.5)
        self.assertFalse(result["negative_before_onset"])
        self.assertEqual(result["max_mass_drift"], 0.0)

    def test_heat_kernel(self):
        result = self.run_builtin("heat-kernel")
        self.assertEqual(result["onset_time"], 0.01)
        self.assertFalse(result["negative_before_onset"])
        self.assertAlmostEqual(result["initial_mass"], 1.0)
        self.assertLess(result["max_mass_drift"], 1e-12)

    def test_periodic_biharmonic(self):
        result = self.run_builtin("example-2.2-periodic-biharmonic")
        self.assertTrue(result["negative_before_onset"])
        self.assertIsNotNone(result["onset_time"])
        self.assertGreater(result["final_min"], 0.0)
        self.assertTrue(result["mean_projection"]["within_bound"])

    def test_periodic_biharmonic_uniform_criterion(self):
        result = self.run_builtin("periodic-biharmonic-uniform")
        self.assertTrue(result["verdict"])
        self.assertTrue(result["confirmed"])
        self.assertAlmostEqual(result["cond2"]["constant"], 1.0 / 32.0, places=6)

    def test_clamped_beam(self):
        result = self.run_builtin("clamped-beam")
        self.assertTrue(result["cond1"]["holds"])
        self.assertTrue(result["cond2"]["holds"])
        self.assertLess(result["cond2"]["row_ratio"], 10.0)
        self.assertTrue(result["verdict"])
        self.assertTrue(result["confirmed"])

    def test_nonlocal_laplacian(self):
        result = self.run_builtin("nonlocal-laplacian")
        self.assertEqual(result["verdict"]["classification"], "EventuallyPositiveStrict")
        self.assertFalse(result["metzler"])
        self.assertAlmostEqual(result["operator"]["leading_eigenvalue"], -2.9607, delta=5e-3)
        self.assertTrue(result["operator"]["inverse_nonneg"])
        self.assertTrue(result["operator"]["eigenvector_positive"])

    def test_biharmonic_line_local(self):
        result = self.run_builtin("biharmonic-line-local")
        self.assertTrue(result["negative_before_onset"])
        self.assertGreater(result["negative_samples"], 0)
        self.assertIsNotNone(result["onset_time"])
        self.assertEqual(result["persistence_checked_until"], 0.5)
        self.assertLess(result["max_edge_variation"], 1e-8)

    def test_heat_on_the_same_box_is_positive_at_once(self):
        biharmonic = self.suite["biharmonic-line-local"]
        heat = biharmonic.model_copy(update={
            "name": "heat-line-local",
            "semigroup": biharmonic.semigroup.model_copy(update={"m": 1}),
        })
        result = run_scenario(heat, self.tmp).summary["result"]
        self.assertEqual(result["onset_time"], 1e-3)
        self.assertEqual(result["negative_samples"], 0)
        self.assertFalse(result["negative_before_onset"])

    def test_neumann_antimax(self):
        result = self.run_builtin("neumann-antimax")
        self.assertEqual(result["left_window_verdict"], "UniformAntiMax")
        self.assertTrue(result["equivalence"]["i_holds"])
        self.assertTrue(result["equivalence"]["ii_holds"])
        self.assertTrue(result["equivalence"]["consistent"])
        self.assertTrue(result["kernel_bound"]["holds"])

    def test_dirichlet_no_antimax(self):
        result = self.run_builtin("dirichlet-no-antimax")
        self.assertEqual(result["left_window_verdict"], "NoAntiMax")
        self.assertFalse(result["equivalence"]["i_holds"])
        self.assertFalse(result["equivalence"]["ii_holds"])
        self.assertTrue(result["equivalence"]["consistent"])
        self.assertFalse(result["kernel_bound"]["holds"])

    def test_perturbation_fragility(self):
        result = self.run_builtin("perturbation-fragility")
        self.assertEqual([r["scale"] for r in result["experiment"]], [0.01, 0.1, 1.0])
        for r in result["experiment"]:
            self.assertIn(r["classification"], ("Positive", "EventuallyPositiveStrict"))
        search = result["search"]
        self.assertEqual(search["seed"], DEFAULT_TOLERANCES.seed)
        self.assertLessEqual(search["trials_run"], 1000)
        if search["found"]:
            self.assertNotIn(search["verdict"]["classification"], ("Positive", "EventuallyPositiveStrict"))


class TestScenarioDocument(unittest.TestCase):

    def test_exactly_one_source(self):
        with self.assertRaises(pydantic.ValidationError):
            Scenario(name="x", kind=Kind.ANALYZE_MATRIX)

    def test_check_criterion_needs_fourier(self):
        with self.assertRaises(pydantic.ValidationError):
            Scenario.model_validate({"name": "x", "kind": "check-criterion", "semigroup": {"model": "heat"}})

    def test_tolerance_overrides(self):
        tolerances = Parameters(tol_vec=1e-6, seed=3).tolerances()
        self.assertEqual(tolerances.tol_vec, 1e-6)
        self.assertEqual(tolerances.seed, 3)
        self.assertEqual(tolerances.tol_pos, 1e-10)

    def test_sample_times(self):
        np.testing.assert_allclose(Parameters(t_min=1e-2, t_max=1.0, samples=3).sample_times(), [1e-2, 1e-1, 1.0])
        self.assertEqual(list(Parameters(times=[0.5, 1.0]).sample_times()), [0.5, 1.0])

    def test_fourier_modes_default_per_dimension(self):
        model, grid = SemigroupSpec(model="fourier", dim=2, box_length=20.0).build()
        self.assertEqual(model.modes, 512)
        self.assertEqual(grid.shape, (512, 512))
        model, _ = SemigroupSpec(model="fourier").build()
        self.assertEqual(model.modes, 4096)
