"""Smoke test for the bvsum Python extension.

Builds the extension with cargo, copies it next to a temporary import path
and exercises the main entry points against the corpus.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"


def build():
    subprocess.run(["cargo", "build", "-p", "bvsum-py", "--release"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "release" / "libbvsum.so"
    dest = Path(tempfile.mkdtemp()) / "bvsum.so"
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))


def main():
    build()
    import bvsum

    linear = bvsum.BvFunction.load(CORPUS / "linear.json")
    assert linear(3.0) == 3.0
    r = linear.em_finite_sum(0, 10)
    value, radius = r["approx"]
    assert r["exact_sum"] == 45.0 and abs(value - 45.0) <= radius

    basel = bvsum.BvFunction.load(CORPUS / "basel.json")
    value, radius = basel.series_sum(10)
    assert abs(value - math.pi**2 / 6) <= radius <= 0.5 / 121 + 1e-8

    harmonic = bvsum.BvFunction.load(CORPUS / "harmonic.json")
    est, rad = harmonic.euler_constant(100)["estimate"]
    assert abs(est - 0.5772156649015329) <= rad
    assert harmonic.classify_convergence() == "both diverge"
    try:
        harmonic.series_sum(10)
    except bvsum.SeriesDivergent:
        pass
    else:
        raise AssertionError("harmonic series should diverge")

    step = bvsum.BvFunction.load(CORPUS / "step_rho.json")
    assert step.limits(1.0) == (0.0, 2.0, 1.0)
    assert step.pointwise_variation(0.0, 2.0, False, False) == 3.0
    assert step.total_variation_measure(0.0, 2.0) == 1.0
    assert step.pvv_check(0.0, 2.0)["passed"]

    quarter = bvsum.BvFunction.load(CORPUS / "jump_quarter.json")
    assert quarter.midvalue_check(0, 10)["passed"]
    floor = bvsum.BvFunction.load(CORPUS / "floor.json")
    assert floor.parts_check(quarter, 0.0, 4.0)["passed"]

    f1, f2 = step.jordan_decompose()
    for x in (0.0, 0.5, 1.0, 1.5, 2.0):
        assert abs(f1(x) - f2(x) - step(x)) <= 1e-12

    lo, hi = linear.integrate(0.0, 10.0)
    assert abs(lo - 50.0) <= hi <= 1e-10
    assert bvsum.eval_expr("2^3^2", 0.0) == 512.0
    assert bvsum.beta1(0.25) == -0.25 and bvsum.beta1(3.0) == 0.0
    try:
        bvsum.BvFunction.from_json('{"name": "x"}')
    except ValueError as e:
        print("rejected as expected:", e)
    print("python smoke test passed")


if __name__ == "__main__":
    main()
