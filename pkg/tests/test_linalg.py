"""Extended-precision dense linear algebra."""

import pytest
from mpmath import mp, mpf

from cauchybi.linalg import (
    SingularMatrixError,
    condition_estimate,
    lu_factor,
    lu_solve,
    residual,
    solve,
)


def hilbert(n):
    return [[mpf(1) / (i + j + 1) for j in range(n)] for i in range(n)]


def test_lu_roundtrip():
    A = [[mpf(4), mpf(1)], [mpf(1), mpf(3)]]
    LU, piv = lu_factor([row[:] for row in A])
    x = lu_solve(LU, piv, [mpf(1), mpf(2)])
    r = residual(A, x, [mpf(1), mpf(2)])
    assert max(abs(v) for v in r) < mpf(10) ** (-mp.dps + 5)


def test_solve_exact_small_system():
    A = [[mpf(2), mpf(0)], [mpf(0), mpf(4)]]
    x, info = solve(A, [mpf(6), mpf(8)])
    assert x[0] == 3 and x[1] == 2
    assert info["condition"] >= 1


def test_singular_matrix_raises():
    A = [[mpf(1), mpf(2)], [mpf(2), mpf(4)]]
    with pytest.raises(SingularMatrixError):
        solve(A, [mpf(1), mpf(1)])


def test_hilbert_solve_with_refinement():
    # Hilbert(10) is classically ill-conditioned; extended precision plus
    # refinement must still recover an exact-sum right-hand side
    n = 10
    A = hilbert(n)
    x_true = [mpf(k + 1) for k in range(n)]
    b = [sum((A[i][j] * x_true[j] for j in range(n)), mpf(0)) for i in range(n)]
    x, info = solve(A, b, refine=2)
    err = max(abs(a - t) for a, t in zip(x, x_true))
    assert err < mpf(10) ** (-mp.dps + 25)
    assert info["residual"] < mpf(10) ** (-mp.dps + 20)


def test_condition_estimate_hilbert_order_of_magnitude():
    # 1-norm condition of Hilbert(8) is about 3.39e10; the Hager estimator
    # must land within a small factor
    est = condition_estimate(hilbert(8))
    assert mpf("1e9") < est < mpf("1e12")


def test_condition_identity_is_one():
    I3 = [[mpf(1 if i == j else 0) for j in range(3)] for i in range(3)]
    assert condition_estimate(I3) == 1
