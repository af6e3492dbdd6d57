import json
import logging
import math
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
from ddt import data, ddt, unpack

from evpos.config import DEFAULT_TOLERANCES, get_settings
from evpos.errors import EvPosError, HorizonError, IsolationError, PreconditionError, SingularityError
from evpos.positivity import Classification
from evpos.reports import dumps, to_jsonable, write_csv
from evpos.util import get_logger


class TestSettings(unittest.TestCase):

    def tearDown(self):
        get_settings(reload=True)

    @patch.dict(os.environ, {"EVPOS_SEED": "7", "EVPOS_WORKERS": "3", "EVPOS_LOG_LEVEL": "DEBUG"})
    def test_environment(self):
        settings = get_settings(reload=True)
        self.assertEqual(settings.seed_override, 7)
        self.assertEqual(settings.workers, 3)
        self.assertEqual(settings.log_level, "DEBUG")

    @patch.dict(os.environ, {"EVPOS_WORKERS": "many"})
    def test_invalid_integer(self):
        with self.assertRaisesRegex(ValueError, "must be integers"):
            get_settings(reload=True)

    def test_singleton(self):
        self.assertIs(get_settings(), get_settings())

    def test_overrides_ignore_none(self):
        tolerances = DEFAULT_TOLERANCES.with_overrides(tol_pos=None, tol_sep=1e-5)
        self.assertEqual(tolerances.tol_pos, DEFAULT_TOLERANCES.tol_pos)
        self.assertEqual(tolerances.tol_sep, 1e-5)


class TestLogger(unittest.TestCase):

    def test_file_handler(self):
        with tempfile.TemporaryDirectory() as d:
            log_file = os.path.join(d, "evpos.log")
            logger = get_logger("evpos.test.file", log_level=logging.INFO, log_file_name=log_file,
                                log_to_console=False)
            logger.info("written")
            for handler in logger.handlers:
                handler.flush()
                handler.close()
            logger.handlers.clear()
            with open(log_file) as f:
                line = f.read()
            self.assertIn("[INFO] evpos.test.file: written", line)

    def test_handlers_attached_once(self):
        first = get_logger("evpos.test.once")
        second = get_logger("evpos.test.once")
        self.assertIs(first, second)
        self.assertEqual(len(second.handlers), 1)


@ddt
class TestErrors(unittest.TestCase):

    @data(
        (PreconditionError("x", module="positivity", operation="estimate_t0"), "positivity.estimate_t0", ValueError),
        (IsolationError("x", module="maxprinciple"), "maxprinciple", ValueError),
        (HorizonError("x"), "evpos", ArithmeticError),
    )
    @unpack
    def test_origin(self, error, origin, builtin):
        self.assertEqual(error.origin, origin)
        self.assertIsInstance(error, EvPosError)
        self.assertIsInstance(error, builtin)

    def test_singularity_carries_eigenvalue(self):
        error = SingularityError("x", nearest_eigenvalue=1 + 2j, iterations=4)
        self.assertEqual(error.nearest_eigenvalue, 1 + 2j)
        self.assertEqual(error.iterations, 4)


class TestReports(unittest.TestCase):

    def test_to_jsonable(self):
        payload = to_jsonable({
            "a": np.float64(math.inf),
            "b": np.array([1, 2]),
            "c": (np.bool_(True), -math.inf, math.nan),
            "d": Classification.POSITIVE,
            "e": Path("out") / "x.csv",
            1: 1 + 2j,
        })
        self.assertEqual(payload, {"a": "inf", "b": [1, 2], "c": [True, "-inf", "nan"], "d": "Positive",
                                   "e": "out/x.csv", "1": [1.0, 2.0]})

    def test_dumps_is_sorted_and_strict(self):
        text = dumps({"b": 1.0, "a": math.inf})
        self.assertEqual(list(json.loads(text)), ["a", "b"])
        self.assertTrue(text.endswith("\n"))

    def test_write_csv_keeps_all_digits(self):
        with tempfile.TemporaryDirectory() as d:
            path = write_csv(Path(d) / "nested" / "t.csv", ("t", "value", "label"), [(1.0 / 3.0, 0.1, "ok")])
            with open(path) as f:
                lines = f.read().splitlines()
        self.assertEqual(lines[0], "t,value,label")
        self.assertEqual(float(lines[1].split(",")[0]), 1.0 / 3.0)
        self.assertEqual(lines[1].split(",")[2], "ok")
