"""Smoke test for the sonine_py extension module.

Build and run from the repository root:

    cargo build -p sonine-python --release --features extension-module
    ln -sf ../target/release/libsonine_py.so python/sonine_py.so
    python3 python/smoke_test.py
"""

import json
import math
import sys

import sonine_py as s


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # Single-row Jack polynomial in one variable is x^m.
    assert close(s.jack_c([3], 1.0, [0.5]).real, 0.125)

    # j_{1/2}(x) = sin x / x.
    assert close(s.bessel_1d(0.5, 1.3).real, math.sin(1.3) / 1.3)

    # Rank-one Bessel function of type B with k1 = 1: sinh x / x.
    assert close(s.bessel_b(1.0, 1.0, [1.1]).real, math.sinh(1.1) / 1.1, 1e-12)

    assert close(s.selberg_in(2, 1.0, 2.0, 2.0).real, 1.0 / 6.0)
    assert s.sigma_classify(0.5, 1.0, 2)[0] == "Outside"
    assert s.sigma_classify(2.0, 1.0, 2)[0] == "ContinuousPart"
    assert s.verify_selberg(2, 1.0, 2.0, 2.5).passed
    assert s.pole_set(1.0, 2, -2.0, 0.0)

    try:
        s.selberg_in(2, 1.0, 2.0, 0.0)
    except s.PoleError as e:
        assert isinstance(e, s.DomainError) and isinstance(e, ValueError)
    else:
        raise AssertionError("expected a pole")

    r = s.verify_kadell(1.0, 2.0, 3.0, [1], 1)
    assert r.passed and close(r.rhs.real, 0.4)
    assert json.loads(r.to_json())["passed"] is True

    r = s.verify_sonine_bessel_b(0.5, 1.0, 1.5, [1.0, 0.5], s.IntegrationSpec.gauss_jacobi(32))
    assert r, r

    mc = s.verify_kadell(1.0, 2.0, 2.5, [1, 1], 2, s.IntegrationSpec.monte_carlo(20000, 7), 0.05)
    assert mc.passed, mc

    c = s.classify(0.5, 1.0, -1.0, 2)
    assert isinstance(c, dict)

    assert s.sonine_1d(0.5, 1.5, complex(2, -1)).passed
    assert s.xu_kernel_check(0.5, 1.0, 0.3, 1.2j).passed
    v = s.xu_intertwine(lambda t: 1.0, 0.5, 1.0, 0.3)
    assert close(v.real, 1.0, 1e-9)

    assert close(s.jacobi_r(0.5, -0.5, 3, 1.0), 1.0)
    rows = s.jacobi_connection(0.0, 0.0, 1.0, 4)
    assert all(close(sum(row), 1.0, 1e-9) for row in rows)

    fam = s.ho_polynomials([0.5, 0.5, 0.5], 2, 2)
    assert len(fam) == len(fam.weights) > 0

    conn = s.ho_connection([1.0, 0.0, 0.5], [1.5, 0.0, 0.5], 2, 2)
    assert all(close(x, 1.0, 1e-8) for x in conn.row_sums())

    scan = s.sign_scan([0.0, 0.0, 1.0], [0.5, 0.0, 1.0], 2, 24)
    assert len(scan["rows"]) == 2

    errs = [row[3] for row in s.contraction_check([1.0, 0.0], [1], [0.5], [2, 16])]
    assert errs[-1] < errs[0]

    print("sonine_py smoke test passed (schema %d)" % s.SCHEMA_VERSION)
    return 0


if __name__ == "__main__":
    sys.exit(main())
