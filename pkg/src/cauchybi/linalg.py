"""Dense extended-precision linear algebra for the bimoment systems.

The Hankel-like bimoment matrices are severely ill-conditioned, so the solve
path is partial-pivot LU plus a couple of iterative-refinement sweeps with
the residual accumulated at doubled precision, and a Hager-style 1-norm
condition estimate for diagnostics.  Everything is plain lists of mpf; the
systems are small (n <= ~50) so O(n^3) in pure Python is fine.
"""

from __future__ import annotations

from mpmath import mp, mpf

from .precision import extra_precision


class SingularMatrixError(ArithmeticError):
    pass


def lu_factor(A):
    """Partial-pivot LU in place on a copy; returns (LU, piv).

    LU stores L (unit diagonal, below) and U (on/above); piv is the row
    permutation as applied.
    """
    n = len(A)
    LU = [list(row) for row in A]
    piv = list(range(n))
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(LU[i][k]))
        if LU[p][k] == 0:
            raise SingularMatrixError(f"exact zero pivot at column {k}")
        if p != k:
            LU[k], LU[p] = LU[p], LU[k]
            piv[k], piv[p] = piv[p], piv[k]
        inv = 1 / LU[k][k]
        for i in range(k + 1, n):
            m = LU[i][k] * inv
            LU[i][k] = m
            if m != 0:
                row_i, row_k = LU[i], LU[k]
                for j in range(k + 1, n):
                    row_i[j] -= m * row_k[j]
    return LU, piv


def lu_solve(LU, piv, b):
    """Solve with an existing factorization (single right-hand side)."""
    n = len(LU)
    x = [b[p] for p in piv]
    for i in range(1, n):
        row = LU[i]
        s = x[i]
        for j in range(i):
            s -= row[j] * x[j]
        x[i] = s
    for i in range(n - 1, -1, -1):
        row = LU[i]
        s = x[i]
        for j in range(i + 1, n):
            s -= row[j] * x[j]
        x[i] = s / row[i]
    return x


def mat_vec(A, x):
    return [sum((a * v for a, v in zip(row, x)), mpf(0)) for row in A]


def residual(A, x, b):
    """b - A x accumulated at doubled precision."""
    with extra_precision(2):
        return [
            bi - sum((a * v for a, v in zip(row, x)), mpf(0))
            for row, bi in zip(A, b)
        ]


def solve(A, b, refine: int = 2):
    """Solve A x = b with LU + iterative refinement.

    Returns (x, info) where info has the factorization, the final residual
    infinity norm (relative to |b|_inf) and the 1-norm condition estimate.
    """
    n = len(A)
    if n == 0:
        return [], {"residual": mpf(0), "condition": mpf(1)}
    LU, piv = lu_factor(A)
    x = lu_solve(LU, piv, b)
    for _ in range(refine):
        r = residual(A, x, b)
        dx = lu_solve(LU, piv, r)
        x = [xi + di for xi, di in zip(x, dx)]
    r = residual(A, x, b)
    bnorm = max((abs(v) for v in b), default=mpf(0))
    rnorm = max(abs(v) for v in r)
    info = {
        "residual": rnorm / bnorm if bnorm > 0 else rnorm,
        "condition": condition_estimate(A, LU, piv),
    }
    return x, info


def _solve_transposed(LU, piv, b):
    """Solve A^T y = b given the LU of A."""
    n = len(LU)
    # A = P^T L U  =>  A^T = U^T L^T P; solve U^T z = b, L^T w = z, y = P^T w
    z = list(b)
    for i in range(n):
        s = z[i]
        for j in range(i):
            s -= LU[j][i] * z[j]
        z[i] = s / LU[i][i]
    for i in range(n - 1, -1, -1):
        s = z[i]
        for j in range(i + 1, n):
            s -= LU[j][i] * z[j]
        z[i] = s
    y = [mpf(0)] * n
    for k, p in enumerate(piv):
        y[p] = z[k]
    return y


def condition_estimate(A, LU=None, piv=None, iters: int = 5):
    """Hager-style 1-norm condition number estimate kappa_1(A)."""
    n = len(A)
    if n == 0:
        return mpf(1)
    if LU is None:
        LU, piv = lu_factor(A)
    anorm = max(
        sum((abs(A[i][j]) for i in range(n)), mpf(0)) for j in range(n)
    )
    x = [mpf(1) / n] * n
    est = mpf(0)
    for _ in range(iters):
        y = lu_solve(LU, piv, x)
        new_est = sum((abs(v) for v in y), mpf(0))
        xi = [mpf(1) if v >= 0 else mpf(-1) for v in y]
        z = _solve_transposed(LU, piv, xi)
        j = max(range(n), key=lambda i: abs(z[i]))
        if new_est <= est or abs(z[j]) <= sum(
            (zi * vi for zi, vi in zip(z, x)), mpf(0)
        ):
            est = max(est, new_est)
            break
        est = new_est
        x = [mpf(0)] * n
        x[j] = mpf(1)
    return anorm * est
