"""Drive the command-line layer end to end from Python.

Shows the preset catalog, the determinism contract, and the comparison
harness, using a temporary directory so nothing in the repository is
touched.
"""

import json
import tempfile
from pathlib import Path

from flickerdyn.cli import RunConfig, main, run_compare

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)

    print("== preset fig1a twice, proving byte-identical reruns ==")
    for sub in ("a", "b"):
        code = main(["preset", "fig1a", "--out", str(out / sub)])
        assert code == 0
    a = (out / "a" / "fig1a_validity.csv").read_bytes()
    b = (out / "b" / "fig1a_validity.csv").read_bytes()
    print(f"   {len(a)} bytes each, identical: {a == b}")

    print("\n== noise verb with flag overrides ==")
    code = main(["noise", "--out", str(out), "--eta", "1e-3",
                 "--x", "0.9999", "--theta", "0.654"])
    assert code == 0
    meta = json.loads((out / "noise.meta.json").read_text())
    fit = meta["power_law_fit"]
    print(f"   fitted exponent {fit['exponent']:.4f} over {fit['range']}")

    print("\n== comparison harness ==")
    report = run_compare(RunConfig())
    for check in report["checks"]:
        flag = "ok " if check["passed"] else "BAD"
        print(f"   [{flag}] {check['name']}: max error "
              f"{check['max_error']:.2e} vs {check['tolerance']:.0e}")
    print(f"   overall: {'pass' if report['passed'] else 'fail'}")
