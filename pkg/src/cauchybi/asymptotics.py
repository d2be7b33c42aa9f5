"""Limit predictions from the equilibrium solution, and empirical estimators.

The limiting functions F_k are represented by the pair (lambda_k, gamma_k):
log |F_k(z)| = gamma_k - V^{lambda_k}(z) with F_k'(infinity) = e^{gamma_k},
where gamma solves the tridiagonal normalization chain
2 gamma_k - gamma_{k-1} - gamma_{k+1} = 2 omega'_k (gamma_0 = gamma_{m+1} = 0),
whose solution gives log kappa_k = omega'_k.  This avoids any Riemann-surface
numerics; moduli are all the tested statements need.

Note on the consecutive-ratio constant: the product of kappas entering the
|A_{n+1,k}/A_{n,k}| limit runs over l = k+1..m (so that it telescopes to
exp(-2 sum_{l>k} omega'_l) and the ratio limit coincides with the n-th root
limit A_k, as it must when both exist); a product over l = 1..k+1 is
inconsistent with that telescoping except when m = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf, mpc, exp

from .equilibrium import EquilibriumSolution
from .hp import HPSolution
from .measures import SupportError
from .polyzeros import log_potential


class DomainError(ValueError):
    """Probe lies on an excluded interval."""


@dataclass(frozen=True)
class AsymptoticPredictor:
    equilibrium: EquilibriumSolution
    gammas: tuple  # gamma_1..gamma_m
    kappas: tuple  # kappa_1..kappa_m

    @property
    def m(self) -> int:
        return self.equilibrium.m

    def gamma(self, k: int) -> mpf:
        """gamma_k with the boundary convention gamma_0 = gamma_{m+1} = 0."""
        if k == 0 or k == self.m + 1:
            return mpf(0)
        return self.gammas[k - 1]

    def V(self, k: int, z) -> mpf:
        """V^{lambda_k}(z); V^{lambda_0} = V^{lambda_{m+1}} = 0."""
        if k == 0 or k == self.m + 1:
            return mpf(0)
        return log_potential(self.equilibrium.lambdas[k - 1], z)

    def log_F(self, k: int, z) -> mpf:
        """log |F_k(z)| (F_0 = F_{m+1} = 1)."""
        return self.gamma(k) - self.V(k, z)

    def omega(self, j: int) -> mpf:
        """Backward cumulative omega_j = sum_{k>=j} omega'_k, omega_{m+1}=0."""
        if j == self.m + 1:
            return mpf(0)
        return self.equilibrium.omega_cum[j - 1]


def _solve_tridiagonal(omega_prime):
    """Thomas solve of 2 g_k - g_{k-1} - g_{k+1} = 2 w'_k, zero boundary."""
    m = len(omega_prime)
    rhs = [2 * w for w in omega_prime]
    diag = [mpf(2)] * m
    upper = [mpf(-1)] * (m - 1)
    lower = [mpf(-1)] * (m - 1)
    for i in range(1, m):
        f = lower[i - 1] / diag[i - 1]
        diag[i] -= f * upper[i - 1]
        rhs[i] -= f * rhs[i - 1]
    g = [mpf(0)] * m
    g[m - 1] = rhs[m - 1] / diag[m - 1]
    for i in range(m - 2, -1, -1):
        g[i] = (rhs[i] - upper[i] * g[i + 1]) / diag[i]
    return g


def make_predictor(eq: EquilibriumSolution) -> AsymptoticPredictor:
    """Predictor from a solved equilibrium; gamma by the tridiagonal chain."""
    if not eq.lambdas:
        raise ValueError("equilibrium solution is empty")
    g = _solve_tridiagonal(list(eq.omega_prime))
    m = len(g)
    kappas = []
    for k in range(m):
        left = g[k - 1] if k > 0 else mpf(0)
        right = g[k + 1] if k < m - 1 else mpf(0)
        kappas.append(exp(g[k] - (left + right) / 2))
    return AsymptoticPredictor(eq, tuple(g), tuple(kappas))


def _check_off(pred: AsymptoticPredictor, z, levels):
    if isinstance(z, (mpc, complex)) and mpc(z).imag != 0:
        return
    x = mpc(z).real if isinstance(z, (mpc, complex)) else mpf(z)
    for k in levels:
        if 1 <= k <= pred.m and pred.equilibrium.intervals[k - 1].contains(x):
            raise DomainError(f"probe z={x} lies on interval {k}")


def F_ratio_modulus(pred: AsymptoticPredictor, k: int, z) -> mpf:
    """|F_k(z)/F_k'(inf)| = exp(-V^{lambda_k}(z)): the Q_{n+1,k}/Q_{n,k} limit."""
    if not 1 <= k <= pred.m:
        raise IndexError(f"level {k} out of 1..{pred.m}")
    _check_off(pred, z, [k])
    return exp(-pred.V(k, z))


def nth_root_prediction(pred: AsymptoticPredictor, j: int, z) -> mpf:
    """Limit of |A_{n,j}(z)|^{1/n} for j = 0..m."""
    if not 0 <= j <= pred.m:
        raise IndexError(f"form index {j} out of 0..{pred.m}")
    _check_off(pred, z, [j, j + 1])
    if j == pred.m:
        return exp(-pred.V(pred.m, z))
    return exp(pred.V(j + 1, z) - pred.V(j, z) - 2 * pred.omega(j + 1))


def rate_prediction(pred: AsymptoticPredictor, z) -> mpf:
    """n-th root of |a_{n,0}/a_{n,m} - shat_{m,1}|; < 1 off the last two
    intervals (geometric convergence to the top transform)."""
    if pred.m < 2:
        raise ValueError("rate prediction needs m >= 2")
    _check_off(pred, z, [pred.m - 1, pred.m])
    return exp(
        2 * pred.V(pred.m, z) - pred.V(pred.m - 1, z) - 2 * pred.omega(pred.m)
    )


def form_ratio_prediction(pred: AsymptoticPredictor, j: int, k: int, z) -> mpf:
    """Limit of |A_{n,j}(z)/A_{n,k}(z)|^{1/n} for 0 <= j < k <= m."""
    if not 0 <= j < k <= pred.m:
        raise IndexError(f"need 0 <= j < k <= m, got ({j},{k})")
    _check_off(pred, z, [j, j + 1, k, k + 1])
    return exp(
        -pred.V(k + 1, z)
        + pred.V(k, z)
        + pred.V(j + 1, z)
        - pred.V(j, z)
        - 2 * (pred.omega(j + 1) - pred.omega(k + 1))
    )


def consecutive_form_ratio_prediction(pred: AsymptoticPredictor, k: int, z) -> mpf:
    """Limit of |A_{n+1,k}(z)/A_{n,k}(z)| for 0 <= k <= m-1, assembled from
    the kappa product and the F moduli (see the module docstring on the
    orientation of the kappa product)."""
    if not 0 <= k <= pred.m - 1:
        raise IndexError(f"form index {k} out of 0..{pred.m - 1}")
    _check_off(pred, z, [k, k + 1])
    log_kprod = sum((mp.log(pred.kappas[l - 1]) for l in range(k + 1, pred.m + 1)), mpf(0))
    return exp(
        -2 * log_kprod
        + pred.gamma(k + 1)
        - pred.gamma(k)
        + pred.log_F(k, z)
        - pred.log_F(k + 1, z)
    )


def reversed_predictions(pred: AsymptoticPredictor, k: int, z) -> mpf:
    """Ratio limit for the reversed-system polynomials P_{n,k}: by the
    reversal symmetry of the equilibrium this is the forward modulus at the
    mirrored index m-k+1."""
    return F_ratio_modulus(pred, pred.m - k + 1, z)


# -- empirical estimators ----------------------------------------------


def default_probes(intervals, real_count: int = 5, complex_count: int = 4):
    """5 real points outside the convex hull + 4 complex probes at distance
    >= 1/2 from every interval."""
    lo = min(iv.a for iv in intervals)
    hi = max(iv.b for iv in intervals)
    span = hi - lo
    reals = [
        hi + span / 2,
        hi + span,
        hi + 2 * span,
        lo - span / 2,
        lo - span,
    ][:real_count]
    mid = (lo + hi) / 2
    height = max(span / 2, mpf(1))
    cplx = [
        mpc(mid, height),
        mpc(lo, -height),
        mpc(hi, height),
        mpc(mid, -2 * height),
    ][:complex_count]
    for z in cplx:
        for iv in intervals:
            if iv.distance_to_point(z) < mpf("0.5"):
                raise ValueError(f"default complex probe {z} too close to {iv}")
    return reals + cplx


def empirical_K(sol: HPSolution, j: int) -> mpf:
    """Orthonormalizing constant K_{n,j}, j=1..m (K_{n,m+1} = 1):
    K_{n,j}^{-2} = int |Q_{n,j}(t) A_{n,j}(t) / Q_{n,j-1}(t)| dsigma_j(t)."""
    if not 1 <= j <= sol.m + 1:
        raise IndexError(f"K index {j} out of 1..{sol.m + 1}")
    if j == sol.m + 1:
        return mpf(1)
    Qj = sol.Qnj(j)
    Qjm1 = sol.Qnj(j - 1)
    mu = sol.system.measure(j)
    total = mpf(0)
    for x, w in zip(mu.nodes, mu.weights):
        total += w * abs(Qj(x) * sol.eval_form(j, x) / Qjm1(x))
    return 1 / mp.sqrt(total)


def _ordered_consecutive(solutions):
    sols = sorted(solutions, key=lambda s: s.n)
    for a, b in zip(sols, sols[1:]):
        if b.n != a.n + 1:
            raise ValueError("solutions must cover consecutive degrees")
    if len(sols) < 2:
        raise ValueError("need at least two consecutive solutions")
    return sols

def _row(n, probe, level, measured, predicted, secondary=None):
    measured = mpf(measured) if not isinstance(measured, mpf) else measured
    gap = abs(measured - predicted)
    row = {
        "n": n,
        "probe": probe,
        "level": level,
        "measured": measured,
        "predicted": predicted,
        "abs_gap": gap,
        "rel_gap": gap / abs(predicted) if predicted != 0 else gap,
    }
    if secondary is not None:
        row["nth_root"] = secondary
    return row


def empirical_tables(solutions, probes, which: str, pred: AsymptoticPredictor):
    """Measured-vs-predicted rows for one estimator family.

    which = "ratioQ"    : |Q_{n+1,j}(z)/Q_{n,j}(z)| vs the F_j ratio modulus
            "nthroot"   : |A_{n+1,j}/A_{n,j}| (primary) and |A_{n,j}|^{1/n}
                          (secondary) vs the n-th root limit
            "rate"      : |a_{n,0}/a_{n,m} - shat_{m,1}| ratio vs the rate
            "formratio" : |A_{n,j}/A_{n,k}| two-point vs the pair limit
            "leading"   : kappa_{n,k} = K_{n,k}/K_{n,k+1} vs kappa_k
    """
    sols = _ordered_consecutive(solutions)
    m = sols[0].m
    rows = []
    if which == "ratioQ":
        for j in range(1, m + 1):
            for z in probes:
                target = F_ratio_modulus(pred, j, z)
                for lo, hi in zip(sols, sols[1:]):
                    meas = abs(hi.Qnj(j)(z) / lo.Qnj(j)(z))
                    rows.append(_row(lo.n, z, j, meas, target))
    elif which == "nthroot":
        for j in range(0, m + 1):
            for z in probes:
                target = nth_root_prediction(pred, j, z)
                for lo, hi in zip(sols, sols[1:]):
                    meas = abs(hi.eval_form(j, z) / lo.eval_form(j, z))
                    sec = (
                        abs(lo.eval_form(j, z)) ** (mpf(1) / lo.n)
                        if lo.n > 0
                        else None
                    )
                    rows.append(_row(lo.n, z, j, meas, target, sec))
    elif which == "rate":
        if m < 2:
            raise ValueError("rate table needs m >= 2")
        sys = sols[0].system
        for z in probes:
            target = rate_prediction(pred, z)
            sm1 = sys.s_hat(m, 1, z)
            vals = [abs(s.a[0](z) / s.a[m](z) - sm1) for s in sols]
            for lo, va, vb in zip(sols, vals, vals[1:]):
                sec = va ** (mpf(1) / lo.n) if lo.n > 0 else None
                rows.append(_row(lo.n, z, None, vb / va, target, sec))
    elif which == "formratio":
        for j in range(0, m + 1):
            for k in range(j + 1, m + 1):
                for z in probes:
                    target = form_ratio_prediction(pred, j, k, z)
                    vals = [
                        abs(s.eval_form(j, z) / s.eval_form(k, z)) for s in sols
                    ]
                    for lo, va, vb in zip(sols, vals, vals[1:]):
                        sec = va ** (mpf(1) / lo.n) if lo.n > 0 else None
                        rows.append(
                            _row(lo.n, z, (j, k), vb / va, target, sec)
                        )
    elif which == "leading":
        for k in range(1, m + 1):
            target = pred.kappas[k - 1]
            kappas_n = [
                empirical_K(s, k) / empirical_K(s, k + 1) for s in sols
            ]
            for lo, va, vb in zip(sols, kappas_n, kappas_n[1:]):
                sec = va ** (mpf(1) / lo.n) if lo.n > 0 else None
                rows.append(_row(lo.n, None, k, vb / va, target, sec))
    else:
        raise ValueError(f"unknown table kind {which!r}")
    return rows


def table_to_json(rows) -> list:
    """Rows with all numerics as 30-digit decimal strings."""
    def enc(v):
        if v is None:
            return None
        if isinstance(v, (int,)):
            return v
        if isinstance(v, tuple):
            return list(v)
        return mp.nstr(mpf(v) if not isinstance(v, (mpf, mpc)) else v, 30)

    return [{key: enc(val) for key, val in row.items()} for row in rows]


def table_to_csv(rows) -> str:
    cols = ["n", "probe", "level", "measured", "predicted", "abs_gap", "rel_gap"]
    if any("nth_root" in r for r in rows):
        cols.append("nth_root")
    lines = [",".join(cols)]
    for r in rows:
        vals = []
        for c in cols:
            v = r.get(c)
            if v is None:
                vals.append("")
            elif isinstance(v, int):
                vals.append(str(v))
            elif isinstance(v, tuple):
                vals.append("-".join(str(x) for x in v))
            else:
                vals.append(mp.nstr(v, 30).replace(",", ";"))
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
