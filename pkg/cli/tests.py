import json
import math
import os
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
import pandas as pd
from django.test import SimpleTestCase

from .base import float_list, int_list
from .config import ConfigError, RunConfig, resolve_run_config
from .output import CommandResult, render_csv, render_json, to_jsonable, verdict
from .runner import SUBCOMMANDS, USAGE, run

MC_ARGS = ["norm", "--f", "x", "--backend", "monte_carlo", "--samples", "20000"]


def invoke(*argv):
    out, err = StringIO(), StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class RunnerTests(SimpleTestCase):
    def test_no_arguments(self):
        code, _, err = invoke()
        self.assertEqual(code, 1)
        self.assertIn("subcommands:", err)

    def test_help(self):
        code, out, _ = invoke("help")
        self.assertEqual(code, 0)
        self.assertEqual(out, USAGE)
        for name in SUBCOMMANDS:
            self.assertIn(name, out)

    def test_subcommand_help_goes_to_the_given_stream(self):
        with mock.patch("sys.stdout", new_callable=StringIO) as process_out:
            code, out, _ = invoke("norm", "--help")
        self.assertEqual(code, 0)
        self.assertIn("--phi", out)
        self.assertEqual(process_out.getvalue(), "")

    def test_unknown_subcommand(self):
        code, _, err = invoke("entropy")
        self.assertEqual(code, 1)
        self.assertIn('Unknown subcommand "entropy"', err)

    def test_success(self):
        code, out, _ = invoke("norm", "--phi", "cosh2", "--f", "x", "--n", "1")
        self.assertEqual(code, 0)
        self.assertAlmostEqual(json.loads(out)["value"], 0.84932, places=5)

    def test_verdict_exits_with_two(self):
        code, out, err = invoke("norm", "--f", "exp(x^2)")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(out)["value"], {"diverged": True})
        self.assertIn("not in", err)

    def test_usage_error_exits_with_one(self):
        code, _, err = invoke("norm", "--f", "cosine")
        self.assertEqual(code, 1)
        self.assertIn("ExpressionError", err)
        code, _, _ = invoke("norm", "--f", "x", "--backend", "simpson")
        self.assertEqual(code, 1)
        code, _, err = invoke("norm", "--f", "x", "--order", "1")
        self.assertEqual(code, 1)
        self.assertIn("Invalid integrator settings", err)

    def test_alias(self):
        code, out, _ = invoke("class", "--f", "x^2")
        self.assertEqual(code, 0)
        self.assertFalse(json.loads(out)["in_M"])

    def test_csv(self):
        code, out, _ = invoke("tailcert", "--f", "x", "--t-grid", "1,2", "--format", "csv")
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "t,empirical_tail,bound,passed")

    def test_monte_carlo_is_deterministic(self):
        first = invoke(*MC_ARGS, "--seed", "7")
        second = invoke(*MC_ARGS, "--seed", "7")
        self.assertEqual(first[0], 0)
        self.assertEqual(first[1], second[1])

    def test_seed_from_environment(self):
        flagged = invoke(*MC_ARGS, "--seed", "7")
        with mock.patch.dict(os.environ, {"ORLICZ_IG_SEED": "7"}):
            from_env = invoke(*MC_ARGS)
        self.assertEqual(flagged[1], from_env[1])

    def test_bad_environment_seed(self):
        with mock.patch.dict(os.environ, {"ORLICZ_IG_SEED": "seven"}):
            code, _, err = invoke("norm", "--f", "x")
        self.assertEqual(code, 1)
        self.assertIn("ORLICZ_IG_SEED", err)


class ConfigTests(SimpleTestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def write(self, data):
        path = Path(self.tmpdir.name) / "run.json"
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    def test_functions_from_config(self):
        path = self.write({"backend": "panel", "functions": {"f": "x"}})
        code, out, _ = invoke("norm", "--config", path)
        self.assertEqual(code, 0)
        self.assertAlmostEqual(json.loads(out)["value"], 1.0 / math.sqrt(2.0 * math.log(2.0)), places=8)

    def test_flags_override_config(self):
        path = self.write({"n": 3, "tolerance": 1e-3})
        config = resolve_run_config({"config": path, "n": 2})
        self.assertEqual(config.n, 2)
        self.assertEqual(config.effective_tolerance, 1e-3)

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.n, 1)
        self.assertEqual(config.format, "json")
        self.assertEqual(config.effective_tolerance, 1e-8)
        self.assertEqual(config.integrator().backend, "quadrature")
        self.assertEqual(config.integrator(dim=5).backend, "monte_carlo")

    def test_invalid_values(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_data({"n": 0})
        with self.assertRaises(ConfigError):
            RunConfig.from_data({"backend": "simpson"})

    def test_unreadable_files(self):
        code, _, err = invoke("norm", "--f", "x", "--config", str(Path(self.tmpdir.name) / "missing.json"))
        self.assertEqual(code, 1)
        self.assertIn("does not exist", err)
        with self.assertRaisesMessage(ConfigError, "not valid JSON"):
            RunConfig.load(self.write("{n: 1"))
        with self.assertRaisesMessage(ConfigError, "JSON object"):
            RunConfig.load(self.write("[1, 2]"))

    def test_dump_and_load(self):
        config = RunConfig(n=2, backend="panel", functions={"f": "x"})
        path = Path(self.tmpdir.name) / "dumped.json"
        config.dump(path)
        self.assertEqual(RunConfig.load(path), config)


class OutputTests(SimpleTestCase):
    def test_significant_digits(self):
        self.assertEqual(to_jsonable(1.0 / 3.0), 0.333333333333)
        self.assertEqual(to_jsonable(np.float64(2.0)), 2.0)

    def test_divergence_tag(self):
        self.assertEqual(to_jsonable(float("inf")), {"diverged": True})
        self.assertEqual(to_jsonable(float("nan")), {"diverged": True})
        self.assertEqual(verdict(float("inf")), {"diverged": True})
        self.assertEqual(verdict(1.5), {"finite": 1.5})

    def test_containers(self):
        payload = {"a": np.array([1.0, np.inf]), "b": (np.int64(3), np.bool_(True))}
        self.assertEqual(to_jsonable(payload), {"a": [1.0, {"diverged": True}], "b": [3, True]})
        frame = pd.DataFrame({"t": [1.0, 2.0], "ok": [True, False]})
        self.assertEqual(to_jsonable(frame), [{"t": 1.0, "ok": True}, {"t": 2.0, "ok": False}])

    def test_json_is_sorted(self):
        self.assertEqual(render_json({"b": 1, "a": 2}), '{"a": 2, "b": 1}')

    def test_csv_without_table(self):
        text = render_csv(CommandResult(payload={"value": 0.5, "bracket": {"lo": 0.25}}))
        self.assertEqual(text.splitlines(), ["value,bracket.lo", "0.5,0.25"])

    def test_lists(self):
        self.assertEqual(float_list("0.1, 0.2,[0.5]"), [0.1, 0.2, 0.5])
        self.assertEqual(float_list([1, 2]), [1.0, 2.0])
        self.assertEqual(int_list("1,2,3"), [1, 2, 3])
