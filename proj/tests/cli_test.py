"""End-to-end checks of the lorenz CLI: schemas, exit codes, config files, CSV output."""
import csv
import json
import os
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema
from referencing import Registry, Resource

CLI = sys.argv.pop(1)
SCHEMAS = pathlib.Path(sys.argv.pop(1))


def load(name):
    return json.loads((SCHEMAS / name).read_text())


REGISTRY = Registry().with_resources(
    (p.name, Resource.from_contents(json.loads(p.read_text()))) for p in SCHEMAS.glob("*.json")
)


def validate(doc, name):
    jsonschema.Draft202012Validator(load(name), registry=REGISTRY).validate(doc)


def run(*args, env=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=env, timeout=600)


def record(*args):
    p = run(*args)
    if p.returncode != 0:
        raise AssertionError(f"{args}: exit {p.returncode}\n{p.stderr}")
    doc = json.loads(p.stdout)
    validate(doc, "record.schema.json")
    return doc


class Cli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = pathlib.Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_eval(self):
        d = record("eval", "--c", "0.5", "--alpha", "2", "--u", "1", "--v", "1", "--x", "0.25")
        self.assertEqual(d["result"]["y"], 0.75)
        d = record("eval", "--x", "0.1", "--steps", "5")
        self.assertEqual(len(d["result"]["orbit"]), 6)
        orbit = d["result"]["orbit"]
        self.assertEqual(d["result"]["itinerary"], "".join("L" if x < 0.5 else "R" for x in orbit[:5]))

    def test_full_vertex_one_line(self):
        p = run("full-vertex", "--c", "0.5", "--alpha", "2", "--a", "2", "--b", "2")
        self.assertEqual(p.returncode, 0)
        self.assertEqual(p.stdout.count("\n"), 1)
        doc = json.loads(p.stdout)
        validate(doc, "record.schema.json")
        validate(doc["result"], "island.schema.json")
        self.assertAlmostEqual(float(doc["result"]["du"]), float(doc["result"]["dv"]), places=20)

    def test_measures(self):
        d = record("measures", "--schedule", "2,3;4,5", "--level", "2")
        validate(d["result"], "measures.schema.json")
        self.assertEqual(d["result"]["T_level"], {"minus": "19", "plus": "19"})
        self.assertEqual(d["result"]["return_times"][1], {"minus": "3", "plus": "4"})

    def test_island_and_renorm(self):
        d = record("island", "--schedule", "2,2;3,3", "--boxes")
        for isl in d["result"]["islands"]:
            validate(isl, "island.schema.json")
            self.assertIn("box", isl)
        v = d["result"]["islands"][-1]
        d = record("renorm", "--schedule", "2,2;3,3", "--du", v["du"], "--dv", v["dv"])
        self.assertTrue(d["result"]["renormalizable"])
        self.assertEqual(d["result"]["interval_counts"][2], {"minus": 12, "plus": 12})

    def test_construct_csv(self):
        prefix = str(self.dir / "run")
        d = record("construct", "--schedule", "2,2;3,3", "--flips", "plus", "minus", "--csv", prefix)
        validate(d["result"], "construct.schema.json")
        self.assertEqual(d["files"], [prefix + "_chain.csv", prefix + "_gaps.csv"])
        with open(prefix + "_chain.csv", newline="") as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["level", "c_prime", "interval_length", "attractor_length", "kappa"])
        self.assertEqual(len(rows), 4)
        with open(prefix + "_gaps.csv", newline="") as f:
            self.assertEqual(next(csv.reader(f)), ["level", "left", "right"])

    def test_birkhoff_deterministic(self):
        out1, out2 = self.dir / "a.json", self.dir / "b.json"
        csv1 = self.dir / "a.csv"
        args = ["birkhoff", "--u", "0.99", "--v", "0.99", "--checkpoints", "10", "100", "--samples", "50", "--seed", "4"]
        self.assertEqual(run(*args, "--out", str(out1), "--csv", str(csv1), "--workers", "1").returncode, 0)
        self.assertEqual(run(*args, "--out", str(out2), "--csv", str(csv1), "--workers", "3").returncode, 0)
        a, b = json.loads(out1.read_text()), json.loads(out2.read_text())
        validate(a, "record.schema.json")
        validate(a["result"], "birkhoff.schema.json")
        self.assertEqual(a["result"], b["result"])
        self.assertEqual(a["config"]["seed"], "4")
        self.assertTrue((self.dir / "a.json.log").exists())
        with open(csv1, newline="") as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["sample_id", "t", "right_frequency"])
        self.assertEqual(len(rows), 1 + 50 * 2)

    def test_rerun_byte_identical(self):
        out1, out2 = self.dir / "a.json", self.dir / "b.json"
        args = ["measures", "--schedule", "3,2", "--acim", "--seed", "9", "--workers", "2"]
        run(*args, "--out", str(out1))
        run(*args, "--out", str(out2))
        self.assertEqual(out1.read_bytes(), out2.read_bytes())

    def test_config_file_and_precedence(self):
        cfg = self.dir / "e.cfg"
        cfg.write_text("c = 0.6\nalpha = 3\nx = 0.1\n")
        d = record("eval", "--config", str(cfg), "--alpha", "2")
        self.assertEqual(d["config"]["c"], "0.6")
        self.assertEqual(d["config"]["alpha"], "2")
        cfg.write_text("bogus = 1\n")
        self.assertEqual(run("eval", "--config", str(cfg), "--x", "0.1").returncode, 1)

    def test_exit_codes(self):
        self.assertEqual(run("eval", "--x", "2").returncode, 1)
        self.assertEqual(run("eval").returncode, 1)
        self.assertEqual(run("eval", "--c", "1.5", "--x", "0.2").returncode, 1)
        self.assertEqual(run("birkhoff", "--checkpoints", "10").returncode, 1)
        self.assertEqual(run("measures", "--schedule", "2,2", "--acim").returncode, 1)
        self.assertEqual(run("eval", "--x", "0.5").returncode, 1)
        self.assertEqual(run("--help").returncode, 0)
        self.assertEqual(run("--version").returncode, 0)

    def test_workers_from_environment(self):
        env = dict(os.environ, LORENZ_WORKERS="2")
        p = run("birkhoff", "--checkpoints", "10", "--samples", "8", "--seed", "1", env=env)
        self.assertEqual(p.returncode, 0)

    def test_verify_subset(self):
        p = run("verify", "--seed", "1", "--only", "2", "5")
        self.assertEqual(p.returncode, 0, p.stderr)
        self.assertEqual(len([l for l in p.stderr.splitlines() if l.startswith("PASS")]), 2)
        validate(json.loads(p.stdout), "record.schema.json")


if __name__ == "__main__":
    unittest.main(verbosity=2)
