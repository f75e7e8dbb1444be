"""Runs each diamlab subcommand with --format json and validates the output
against the shipped schema."""
import json
import subprocess
import sys

import jsonschema

exe, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

runs = [
    ["simulate", "--family", "uniform-ball", "--d", "2", "--n", "300", "--reps", "8", "--seed", "1"],
    ["simulate", "--family", "circle", "--density", "cosine_mix", "--density-params", "0.5,0",
     "--n", "300", "--reps", "8", "--seed", "2", "--process", "poisson"],
    ["limit", "--family", "uniform-ball", "--d", "2", "--t-steps", "10"],
    ["limit", "--law", "segments", "--probs", "0.25,0.75", "--t-steps", "10"],
    ["compare", "--family", "uniform-sphere", "--d", "3", "--n", "300", "--reps", "30", "--seed", "3"],
    ["table", "--family", "segments", "--d", "2", "--dirs", "1,0", "--probs", "1",
     "--n-list", "100,1000", "--reps", "50", "--seed", "4"],
    ["oracle", "--cases", "20", "--seed", "5", "--max-points", "200", "--segment-reps", "200"],
]

failures = 0
for args in runs:
    proc = subprocess.run([exe, *args, "--format", "json"], capture_output=True, text=True)
    if proc.returncode != 0:
        print(f"FAIL {args[0]}: exit {proc.returncode}: {proc.stderr.strip()}")
        failures += 1
        continue
    errors = list(validator.iter_errors(json.loads(proc.stdout)))
    for e in errors:
        print(f"FAIL {args[0]}: {e.message} at {list(e.absolute_path)}")
    failures += bool(errors)
    if not errors:
        print(f"ok   {' '.join(args[:3])}")
sys.exit(1 if failures else 0)
