#!/usr/bin/env python3
"""Runs the CLI on a few inputs and validates every JSON output against docs/schemas."""

import json
import pathlib
import subprocess
import sys
import tempfile

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])

resources = []
for path in schema_dir.glob("*.schema.json"):
    doc = json.loads(path.read_text())
    resources.append((doc["$id"], Resource.from_contents(doc)))
registry = Registry().with_resources(resources)


def validate(name, instance):
    schema = json.loads((schema_dir / f"{name}.schema.json").read_text())
    errors = list(Draft202012Validator(schema, registry=registry).iter_errors(instance))
    for e in errors:
        print(f"{name}: {e.json_path}: {e.message}")
    return not errors


def run(*args, ok=(0,), parse=True):
    p = subprocess.run([cli, *args], capture_output=True, text=True)
    if p.returncode not in ok:
        sys.exit(f"{' '.join(args)} exited {p.returncode}: {p.stderr}")
    return json.loads(p.stdout) if parse else None


good = True
with tempfile.TemporaryDirectory() as tmp:
    t = pathlib.Path(tmp)
    cases = [
        ("g3", ["--h", "3", "--q", "1", "--r", "1"], 3),
        ("gamma3", ["--m", "3"], 1),
        ("planted", ["--N", "6", "--h", "2", "--p", "0.3"], 2),
        ("random", ["--N", "6", "--min-degree", "4"], 1),
    ]
    for family, params, h in cases:
        graph = t / f"{family}.graph"
        run("generate", family, "-o", str(graph), "--seed", "5", *params, parse=False)
        good &= validate("generate_sidecar", json.loads(pathlib.Path(f"{graph}.json").read_text()))
        report = run("solve", str(graph), "--h", str(h), ok=(0, 3, 4, 5))
        good &= validate("solve_report", report)
        patterns = ["extreme", "theta33", "gamma3"] + (["very_extreme"] if family == "gamma3" else [])
        for pattern in patterns:
            good &= validate("detect_report", run("detect", str(graph), "--pattern", pattern, "--h", str(h), ok=(0, 1)))
    good &= validate("scan_report", run("scan", "--h", "1", "--N", "3", "--levels", "1,2", "--samples", "50",
                                        "--exemplars", str(t / "ex"), ok=(0, 6)))

print("schemas ok" if good else "schema violations")
sys.exit(0 if good else 1)
