"""Runs `socel bench` and validates the report against the shipped schema."""
import json
import subprocess
import sys

import jsonschema

tool, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
for lengths in ("0", "0,1000,100000"):
    out = subprocess.run([tool, "bench", "--lengths", lengths], check=True, capture_output=True, text=True).stdout
    report = json.loads(out)
    jsonschema.validate(report, schema)
    if lengths == "0":
        run = report["runs"][0]
        assert run["ops"]["total"] == 0 and run["enumeration"]["calls"] == 0, run
    print(f"bench --lengths {lengths}: report valid, super_constant={report['super_constant']}")
