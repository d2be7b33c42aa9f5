"""Multi-level Hermite-Pade solver for a Nikishin chain.

For each degree n the biorthogonal polynomial Q_n comes from the n x n
bimoment system (the only ill-conditioned step); the remaining polynomials
a_{n,j} of the vector are recovered descending j = m-1..0 by exact
polynomial-part extraction against the generated-measure moments.  The
vanishing-at-infinity order condition on the top form is then *verified*
from the Laurent coefficients, never imposed.

Sign conventions: A_{n,j}(z) = sum_{k=j}^m (-1)^k a_{n,k}(z) shat_{j+1,k}(z)
with shat_{j+1,j} == 1, and the normalization makes A_{n,m} = (-1)^m a_{n,m}
the monic Q_n.  The monic polynomial and the sign are stored separately
(a_{n,m} carries the sign; the Q property is always monic).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from mpmath import mp, mpf, mpc

from .linalg import solve
from .measures import SupportError
from .nikishin import NikishinSystem
from .poly import Polynomial
from .polyzeros import RootCountError, _scan_sign_changes, real_roots, refine_bracket


class HPSolverError(ArithmeticError):
    """Numerical failure in the Hermite-Pade solve; remedy: raise precision."""


def _solve_Qn(sys: NikishinSystem, n: int):
    if n < 0:
        raise ValueError("degree must be >= 0")
    if n == 0:
        return Polynomial.one(), {"condition": mpf(1), "solve_residual": mpf(0)}
    # solve in the interval-adapted bases: same orthogonality conditions,
    # but the matrix conditioning drops to the kernel's intrinsic decay
    A = [[sys.gram(nu, mu) for mu in range(n)] for nu in range(n)]
    b = [-sys.gram(nu, n) for nu in range(n)]
    # the monic bases carry geometric diagonal grading; equilibrate rows and
    # columns so the solver only sees the kernel's intrinsic conditioning
    row_scale = [mpf(1) / max(abs(v) for v in row) for row in A]
    for nu in range(n):
        A[nu] = [v * row_scale[nu] for v in A[nu]]
        b[nu] = b[nu] * row_scale[nu]
    col_scale = [
        mpf(1) / max(abs(A[nu][mu]) for nu in range(n)) for mu in range(n)
    ]
    for nu in range(n):
        A[nu] = [A[nu][mu] * col_scale[mu] for mu in range(n)]
    try:
        c, info = solve(A, b, refine=4)
    except ArithmeticError as ex:
        raise HPSolverError(
            f"bimoment system for n={n} numerically singular ({ex}); "
            "raise the working precision"
        ) from ex
    c = [c[mu] * col_scale[mu] for mu in range(n)]
    Q = sys.basis_polynomial(sys.m, n)
    for mu, cm in enumerate(c):
        Q = Q + sys.basis_polynomial(sys.m, mu).scale(cm)
    return (
        Q,
        {"condition": info["condition"], "solve_residual": info["residual"]},
    )


def solve_Qn(sys: NikishinSystem, n: int) -> Polynomial:
    """Monic degree-n biorthogonal polynomial of the system."""
    Q, _ = _solve_Qn(sys, n)
    return Q


def _poly_part_coeffs(p: Polynomial, moments):
    """Polynomial part of p(z)*shat(z) given the measure's moments.

    Exactly the degree-(deg p - 1) polynomial with coefficient of z^r equal
    to sum_{d>r} p_d * m_{d-1-r}.
    """
    degp = p.degree
    out = [mpf(0)] * max(degp, 1)
    for r in range(degp):
        out[r] = sum(
            (p.coeffs[d] * moments[d - 1 - r] for d in range(r + 1, degp + 1)),
            mpf(0),
        )
    return out


class HPSolution:
    """Immutable Hermite-Pade vector for one degree, with cached evaluators."""

    def __init__(self, system: NikishinSystem, n: int, a, diagnostics):
        self.system = system
        self.n = n
        self.a = tuple(a)
        self.diagnostics = dict(diagnostics)
        self.m = system.m
        self._chains = {}
        self._zeros = {}
        self._lock = threading.Lock()

    @property
    def Q(self) -> Polynomial:
        """The monic biorthogonal polynomial Q_n = (-1)^m a_{n,m}."""
        am = self.a[self.m]
        return am if self.m % 2 == 0 else am.scale(mpf(-1))

    # -- form evaluation ----------------------------------------------

    def _chain(self, k: int):
        """Chain vector u_k at sigma_k's nodes: the iterated integral of
        Q_n from level m down to level k."""
        cached = self._chains.get(k)
        if cached is not None:
            return cached
        mu = self.system.measure(k)
        if k == self.m:
            vals = tuple(self.Q(x) for x in mu.nodes)
        else:
            nxt = self.system.measure(k + 1)
            u = self._chain(k + 1)
            vals = tuple(
                sum(
                    (w * uv / (x - t) for t, w, uv in zip(nxt.nodes, nxt.weights, u)),
                    mpf(0),
                )
                for x in mu.nodes
            )
        with self._lock:
            self._chains.setdefault(k, vals)
        return self._chains[k]

    def eval_form(self, j: int, z, route: str = "chain"):
        """A_{n,j}(z); j=m is the polynomial (-1)^m a_{n,m} = Q_n.

        route="chain" uses the cached iterated quadrature; route="direct"
        uses the defining combination against the generated transforms.
        """
        if not 0 <= j <= self.m:
            raise IndexError(f"form index {j} out of 0..{self.m}")
        if j == self.m:
            return self.Q(z)
        complex_z = isinstance(z, (mpc, complex)) and mpc(z).imag != 0
        z = mpc(z) if complex_z else (mpc(z).real if isinstance(z, (mpc, complex)) else mpf(z))
        if not complex_z and self.system.interval(j + 1).contains(z):
            raise SupportError(f"z={z} lies on Delta_{j + 1}")
        if route == "direct":
            acc = self.a[j](z) * (1 if j % 2 == 0 else -1)
            for k in range(j + 1, self.m + 1):
                sk = 1 if k % 2 == 0 else -1
                acc += sk * self.a[k](z) * self.system.s_hat(j + 1, k, z)
            return acc
        mu = self.system.measure(j + 1)
        u = self._chain(j + 1)
        return sum(
            (w * uv / (z - x) for x, w, uv in zip(mu.nodes, mu.weights, u)),
            mpc(0) if complex_z else mpf(0),
        )

    # -- zeros ---------------------------------------------------------

    def zeros(self, j: int):
        """The n zeros of A_{n,j} in the open interval Delta_j, sorted."""
        if not 1 <= j <= self.m:
            raise IndexError(f"zero level {j} out of 1..{self.m}")
        cached = self._zeros.get(j)
        if cached is not None:
            return cached
        n = self.n
        iv = self.system.interval(j)
        if n == 0:
            roots = ()
        elif j == self.m:
            roots = tuple(real_roots(self.Q, iv))
        else:
            f = lambda x: self.eval_form(j, x)
            brackets = _scan_sign_changes(f, iv.a, iv.b, n, 8 * n)
            if brackets is None or len(brackets) != n:
                found = 0 if brackets is None else len(brackets)
                raise RootCountError(
                    f"A_{{{n},{j}}}: found {found} sign changes on "
                    f"Delta_{j}, expected {n}; precision/quadrature fault"
                )
            xtol = mpf(10) ** (-mp.dps // 3) * max(mpf(1), abs(iv.a), abs(iv.b))
            roots = tuple(
                sorted(
                    refine_bracket(f, lo, hi, flo, fhi, xtol)
                    for lo, hi, flo, fhi in brackets
                )
            )
        with self._lock:
            self._zeros.setdefault(j, roots)
        return self._zeros[j]

    def Qnj(self, j: int) -> Polynomial:
        """Monic polynomial with the zeros of A_{n,j} (Q_{n,0} = Q_{n,m+1} = 1)."""
        if j == 0 or j == self.m + 1:
            return Polynomial.one()
        return Polynomial.from_roots(self.zeros(j))


def _order_diagnostics(sys: NikishinSystem, Q: Polynomial, n: int):
    """Laurent coefficients of the top form at z^-1..z^-(n+1).

    The coefficient of z^-r in the integral representation of the top form
    is the bilinear form of x^{r-1} against Q through the iterated kernel,
    evaluated here by node values so that each coefficient is normalized by
    the honest cancellation mass of its own contraction.  The first n
    normalized residuals must vanish to roundoff; the (n+1)-st coefficient
    magnitude is reported as the expansion scale.
    """
    mu1 = sys.measure(1)
    if sys.m == 1:
        u = [Q(x) for x in mu1.nodes]
        ua = [abs(v) for v in u]
    else:
        mum = sys.measure(sys.m)
        v = [Q(y) for y in mum.nodes]
        va = [abs(x) for x in v]
        prev = mum
        for j in range(sys.m - 1, 0, -1):
            mu = sys.measure(j)
            v = [
                sum(
                    (
                        w * g / (t - y)
                        for y, w, g in zip(prev.nodes, prev.weights, v)
                    ),
                    mpf(0),
                )
                for t in mu.nodes
            ]
            va = [
                sum(
                    (
                        w * g / abs(t - y)
                        for y, w, g in zip(prev.nodes, prev.weights, va)
                    ),
                    mpf(0),
                )
                for t in mu.nodes
            ]
            prev = mu
        u, ua = v, va
    residuals = []
    scale = mpf(0)
    for r in range(1, n + 2):
        c = mpf(0)
        s = mpf(0)
        for x, w, uv, uav in zip(mu1.nodes, mu1.weights, u, ua):
            xp = x ** (r - 1)
            c += w * xp * uv
            s += w * abs(xp) * uav
        if r <= n:
            residuals.append(abs(c) / s)
        else:
            scale = abs(c)
    return residuals, scale


def solve_hp_vector(sys: NikishinSystem, n: int) -> HPSolution:
    """Full vector (a_{n,0},...,a_{n,m}) plus diagnostics for degree n."""
    m = sys.m
    Q, diag = _solve_Qn(sys, n)
    a = [None] * (m + 1)
    a[m] = Q if m % 2 == 0 else Q.scale(mpf(-1))
    for j in range(m - 1, -1, -1):
        acc = Polynomial.zero()
        for k in range(j + 1, m + 1):
            pk = a[k]
            if pk.degree < 1:
                continue
            moms = sys.s_moments(j + 1, k, pk.degree)
            part = _poly_part_coeffs(pk, moms)
            sk = 1 if k % 2 == 0 else -1
            acc = acc + Polynomial(tuple(sk * c for c in part))
        sj = 1 if (j + 1) % 2 == 0 else -1
        a[j] = acc.scale(mpf(sj))
    residuals, scale = _order_diagnostics(sys, Q, n)
    diag["residuals"] = residuals
    diag["scale"] = scale
    diag["cond"] = diag.pop("condition")
    return HPSolution(sys, n, a, diag)


def eval_form(sol: HPSolution, j: int, z, route: str = "chain"):
    return sol.eval_form(j, z, route=route)


def zeros_of_form(sol: HPSolution, j: int):
    return list(sol.zeros(j))


def solve_reversed(sys: NikishinSystem, n: int) -> HPSolution:
    """Hermite-Pade vector of the reversed chain; its Q is P_n."""
    return solve_hp_vector(sys.reversed(), n)


def biorthogonality_entry(sys: NikishinSystem, Pk: Polynomial, Qn: Polynomial):
    """Bilinear form of P and Q through the iterated kernel (bimoment sum)."""
    return sum(
        (
            p * q * sys.bimoment(nu, mu)
            for nu, p in enumerate(Pk.coeffs)
            for mu, q in enumerate(Qn.coeffs)
        ),
        mpf(0),
    )


def biorthogonality_scale(sys: NikishinSystem, Pk: Polynomial, Qn: Polynomial):
    """Magnitude scale of the bilinear-form sum (for relative comparisons)."""
    return sum(
        (
            abs(p) * abs(q) * abs(sys.bimoment(nu, mu))
            for nu, p in enumerate(Pk.coeffs)
            for mu, q in enumerate(Qn.coeffs)
        ),
        mpf(0),
    )


def _kernel_projection(sys: NikishinSystem, Qn: Polynomial):
    """Chain Q's node values back to sigma_1's nodes through the kernel.

    Returns (u, ua): the signed chain values and the absolute-value chain
    (the per-node cancellation mass) at sigma_1's quadrature nodes.
    """
    mu1 = sys.measure(1)
    if sys.m == 1:
        u = [Qn(x) for x in mu1.nodes]
        return u, [abs(v) for v in u]
    mum = sys.measure(sys.m)
    v = [Qn(y) for y in mum.nodes]
    va = [abs(x) for x in v]
    prev = mum
    for j in range(sys.m - 1, 0, -1):
        mu = sys.measure(j)
        v = [
            sum(
                (
                    w * g / (t - y)
                    for y, w, g in zip(prev.nodes, prev.weights, v)
                ),
                mpf(0),
            )
            for t in mu.nodes
        ]
        va = [
            sum(
                (
                    w * g / abs(t - y)
                    for y, w, g in zip(prev.nodes, prev.weights, va)
                ),
                mpf(0),
            )
            for t in mu.nodes
        ]
        prev = mu
    return v, va


def biorthogonality_quadrature(
    sys: NikishinSystem, Pk: Polynomial, Qn: Polynomial
):
    """Bilinear form of P and Q via node values and the kernel chain.

    Returns (entry, scale) where scale is the absolute-value sum of the
    same contraction.  The entry equals the bimoment bilinear form, but the
    cancellation scale is the genuine oscillatory one rather than the
    (much larger) monomial-coefficient one, so entry/scale stays resolvable
    at degrees where the coefficient-route scale would swamp the value.
    """
    mu1 = sys.measure(1)
    u, ua = _kernel_projection(sys, Qn)
    entry = mpf(0)
    scale = mpf(0)
    for x, w, uv, uav in zip(mu1.nodes, mu1.weights, u, ua):
        p = Pk(x)
        entry += w * p * uv
        scale += w * abs(p) * uav
    return entry, scale


def biorthogonality_matrix(sys: NikishinSystem, Ps, Qs):
    """All pairwise bilinear forms of the P and Q families.

    Returns (entries, scales) as len(Ps) x len(Qs) nested lists; each Q is
    chained through the kernel once, so the cost is linear rather than
    quadratic in the family size for the expensive part.
    """
    mu1 = sys.measure(1)
    p_vals = [[P(x) for x in mu1.nodes] for P in Ps]
    entries = [[None] * len(Qs) for _ in Ps]
    scales = [[None] * len(Qs) for _ in Ps]
    for col, Q in enumerate(Qs):
        u, ua = _kernel_projection(sys, Q)
        wu = [w * uv for w, uv in zip(mu1.weights, u)]
        wua = [w * uav for w, uav in zip(mu1.weights, ua)]
        for row, pv in enumerate(p_vals):
            entries[row][col] = sum(
                (p * g for p, g in zip(pv, wu)), mpf(0)
            )
            scales[row][col] = sum(
                (abs(p) * g for p, g in zip(pv, wua)), mpf(0)
            )
    return entries, scales


def form_identity_residual(sol: HPSolution, j: int, z, relative: bool = False):
    """Residual of the closing identity tying A_{n,j} back to a_{n,j}:

        A_{n,j} + sum_{k=j+1}^{m-1} (-1)^{k-j} shat_{k,j+1} A_{n,k}
            = (-1)^j (a_{n,j} - a_{n,m} shat_{m,j+1}).

    With relative=True the residual is divided by the largest term magnitude.
    """
    m = sol.m
    if not 0 <= j <= m - 1:
        raise IndexError(f"identity index {j} out of 0..{m - 1}")
    terms = [sol.eval_form(j, z)]
    for k in range(j + 1, m):
        sk = 1 if (k - j) % 2 == 0 else -1
        terms.append(sk * sol.system.s_hat(k, j + 1, z) * sol.eval_form(k, z))
    sj = 1 if j % 2 == 0 else -1
    rhs = sj * (
        sol.a[j](z) - sol.a[m](z) * sol.system.s_hat(m, j + 1, z)
    )
    res = abs(sum(terms) - rhs)
    if relative:
        scale = max(max(abs(t) for t in terms), abs(rhs))
        return res / scale if scale > 0 else res
    return res


# -- serialization -----------------------------------------------------


def solution_to_json(sol: HPSolution, include_zeros: bool = True) -> dict:
    """JSON-ready document; all numbers as full-precision decimal strings."""
    doc = {
        "n": sol.n,
        "m": sol.m,
        "a": [[mp.nstr(c, mp.dps) for c in p.coeffs] for p in sol.a],
        "zeros": {},
        "diagnostics": {
            "cond": mp.nstr(sol.diagnostics["cond"], 8),
            "solve_residual": mp.nstr(sol.diagnostics["solve_residual"], 8),
            "residuals": [mp.nstr(r, 8) for r in sol.diagnostics["residuals"]],
            "scale": mp.nstr(sol.diagnostics["scale"], 8),
        },
    }
    if include_zeros:
        for j in range(1, sol.m + 1):
            doc["zeros"][str(j)] = [mp.nstr(x, mp.dps) for x in sol.zeros(j)]
    return doc


def solution_from_json(sys: NikishinSystem, doc: dict) -> HPSolution:
    """Rebuild a solution (with cached zeros) against an existing system."""
    a = [Polynomial(tuple(mpf(c) for c in coeffs)) for coeffs in doc["a"]]
    diag = {
        "cond": mpf(doc["diagnostics"]["cond"]),
        "solve_residual": mpf(doc["diagnostics"]["solve_residual"]),
        "residuals": [mpf(r) for r in doc["diagnostics"]["residuals"]],
        "scale": mpf(doc["diagnostics"]["scale"]),
    }
    sol = HPSolution(sys, doc["n"], a, diag)
    for j_str, zs in doc.get("zeros", {}).items():
        sol._zeros[int(j_str)] = tuple(mpf(x) for x in zs)
    return sol
