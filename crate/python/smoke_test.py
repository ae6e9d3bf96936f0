#!/usr/bin/env python3
"""Smoke test for the minqet_py extension module.

Builds nothing itself: run `cargo build -p minqet-python` first, then
`python3 python/smoke_test.py`. Set MINQET_PY_LIB to point at the
compiled library explicitly if it lives outside the default target
directories.
"""

import importlib.machinery
import importlib.util
import math
import os
import sys

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def locate_library():
    override = os.environ.get("MINQET_PY_LIB")
    if override:
        return override
    candidates = [
        os.path.join(REPO_ROOT, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("libminqet_py.so", "libminqet_py.dylib", "minqet_py.dll")
    ]
    for path in candidates:
        if os.path.exists(path):
            return path
    sys.exit(
        "minqet_py library not found; run `cargo build -p minqet-python` "
        "or set MINQET_PY_LIB"
    )


def load_module(path):
    loader = importlib.machinery.ExtensionFileLoader("minqet_py", path)
    spec = importlib.util.spec_from_loader("minqet_py", loader, origin=path)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def approx(actual, expected, tol=1e-10):
    assert abs(actual - expected) <= tol, f"{actual} != {expected} (tol {tol})"


def main():
    qet = load_module(locate_library())

    model = qet.Model(1.0, 1.0)
    assert model.h == 1.0 and model.k == 1.0

    amps = model.ground_state()
    approx(amps[0].real, 0.2297529205473612, 1e-12)
    approx(amps[3].real, -0.9732489894677302, 1e-12)
    assert amps[1] == 0 and amps[2] == 0
    approx(sum(abs(a) ** 2 for a in amps), 1.0, 1e-12)

    spectrum = model.spectrum()
    approx(spectrum[0], 0.0, 1e-12)
    approx(spectrum[-1], 4.47213595499958, 1e-10)

    for value in model.zero_point():
        approx(value, 0.0, 1e-12)

    approx(model.injected_energy(), 0.8944271909999159)
    # curve maximum: one half-period of the post-measurement oscillation
    approx(model.energy_at_b(math.pi / 2.0), 0.8944271909999159)
    approx(model.energy_at_b(0.0), 0.0, 1e-12)

    trace, branches = model.extract(0.0)
    assert trace.e_extracted == 0.0
    assert len(branches) == 2
    approx(branches[0].probability, 0.5, 1e-14)
    approx(branches[1].probability, 0.5, 1e-14)

    optimum = model.optimize()
    approx(optimum.theta_star, 0.16087527719832109, 1e-12)
    approx(optimum.e_b_max, 0.07257277587322123)
    approx(qet.analytic_eb(1.0, 1.0), optimum.e_b_max, 1e-12)

    trace, _ = model.extract(optimum.theta_star)
    approx(trace.e_extracted, optimum.e_b_max, 1e-12)

    rows = {row.quantity: row for row in model.formula_audit()}
    assert rows["E_B"].matches
    assert not rows["E_A"].matches
    assert rows["E_A"].rescaled_matches is True

    fit = model.fit_curve()
    approx(fit.amplitude, 0.4472135954999579, 1e-9)
    approx(fit.frequency, 2.0, 1e-9)
    assert not fit.multi_frequency

    audit = model.uncertainty_audit(epsilon=1e-3)
    approx(audit.product_e_t, 7.25727758732212e-5, 1e-12)
    assert audit.eq99_satisfied
    assert not audit.eq103_satisfied
    assert audit.e_cc is None
    assert audit.delta_t == 0.0 and audit.delta_e == 0.0

    sweep = qet.sweep_ratio(0.5, 2.0, 3)
    approx(sweep.rows[1].x, 1.0, 1e-12)
    approx(sweep.rows[1].e_b_over_k, 0.07257277587322123)
    assert sweep.sup_value <= 0.13

    try:
        qet.Model(-1.0, 1.0)
    except ValueError:
        pass
    else:
        sys.exit("negative coupling must raise ValueError")

    try:
        model.uncertainty_audit(epsilon=2.0)
    except ValueError:
        pass
    else:
        sys.exit("epsilon >= 1 must raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
