"""
JSON documents and the command-line front end.

Verdicts and splines serialize to JSON with shortest round-trip floats, so a
witness written by `rmonotone check --json` can be fed back to
`rmonotone eval`.
"""
import io
import json
import tempfile
from pathlib import Path

from rmonotone import documents as docs
from rmonotone.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


code, text = run("check", "--r", "3", "--orders", "0,1,2,3", "--norms", "1,0.5,1,1")
print(f"exit {code}: {text}")
code, text = run("check", "--r", "3", "--orders", "0,1,2,3", "--norms", "0.6,1,1,1", "--json")
verdict = docs.verdict_from_dict(json.loads(text))
print("parsed back:", verdict.spline_type, verdict.witness)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "witness.json"
    path.write_text(docs.dumps(docs.spline_to_dict(verdict.witness)))
    print(run("eval", "--spline", str(path), "--norms")[1])
    print(run("eval", "--spline", str(path), "--order", "2", "--at", "-1,-0.5,0")[1])

print(run("scan", "--r", "2", "--orders", "0,1,2", "--norms", "0.5,1,1", "--vary", "0", "--range", "0.3:0.7:5")[1])
