"""Finite positive measures on compact intervals with Jacobi-type weights.

A measure is w(x) dx on [a, b] with w(x) = (x-a)^alpha (b-x)^beta * poly(x),
poly strictly positive on [a, b].  Integration goes through a Gauss-Jacobi
rule for the (alpha, beta) part, generated by the Golub-Welsch route in
double precision and Newton-polished in the working precision; the
polynomial factor is folded into the quadrature weights.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from mpmath import mp, mpf, mpc
from scipy.special import roots_jacobi

from .precision import set_precision


class MeasureError(ValueError):
    """Invalid weight/interval configuration."""


class SupportError(ValueError):
    """Evaluation requested at a point on the support."""


def _to_mpf(x) -> mpf:
    """Parse a number (decimal string preferred) at full working precision."""
    if isinstance(x, str):
        return mpf(x)
    if isinstance(x, (int, float)):
        return mpf(x)
    return mpf(x)


@dataclass(frozen=True)
class Interval:
    """Bounded real interval [a, b], a < b."""

    a: mpf
    b: mpf

    def __post_init__(self):
        object.__setattr__(self, "a", _to_mpf(self.a))
        object.__setattr__(self, "b", _to_mpf(self.b))
        if not (mp.isfinite(self.a) and mp.isfinite(self.b)):
            raise MeasureError("interval endpoints must be finite")
        if not self.a < self.b:
            raise MeasureError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> mpf:
        return self.b - self.a

    @property
    def midpoint(self) -> mpf:
        return (self.a + self.b) / 2

    def contains(self, x, closed: bool = True) -> bool:
        x = _to_mpf(x)
        if closed:
            return self.a <= x <= self.b
        return self.a < x < self.b

    def gap_to(self, other: "Interval") -> mpf:
        """Distance between two intervals (0 if they touch or overlap)."""
        if self.b < other.a:
            return other.a - self.b
        if other.b < self.a:
            return self.a - other.b
        return mpf(0)

    def distance_to_point(self, z) -> mpf:
        """Distance from a (possibly complex) point to the interval."""
        z = mpc(z)
        x, y = z.real, z.imag
        if x < self.a:
            dx = self.a - x
        elif x > self.b:
            dx = x - self.b
        else:
            dx = mpf(0)
        return mp.hypot(dx, y)


@dataclass(frozen=True)
class WeightSpec:
    """Jacobi exponents plus a positive polynomial factor.

    The resulting weight is positive a.e. on the interval, so the measure is
    regular and has positive derivative a.e. (both asymptotic hypotheses of
    the theory hold by construction).
    """

    alpha: mpf = mpf(0)
    beta: mpf = mpf(0)
    poly_factor: tuple = (mpf(1),)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _to_mpf(self.alpha))
        object.__setattr__(self, "beta", _to_mpf(self.beta))
        object.__setattr__(
            self, "poly_factor", tuple(_to_mpf(c) for c in self.poly_factor)
        )
        if not self.alpha > -1:
            raise MeasureError(f"alpha must be > -1, got {self.alpha}")
        if not self.beta > -1:
            raise MeasureError(f"beta must be > -1, got {self.beta}")
        if not any(c != 0 for c in self.poly_factor):
            raise MeasureError("poly_factor must not be the zero polynomial")

    def poly_value(self, x):
        acc = mpf(0)
        for c in reversed(self.poly_factor):
            acc = acc * x + c
        return acc

    def check_positive_on(self, interval: Interval) -> None:
        """Reject polynomial factors that vanish or go negative on [a, b].

        Real roots are isolated with the double-precision companion matrix
        (adequate: positivity is a qualitative precondition), then the sign
        is confirmed on a dense grid at working precision.
        """
        coeffs = [float(c) for c in self.poly_factor]
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs.pop()
        if len(coeffs) > 1:
            roots = np.roots(coeffs[::-1])
            lo, hi = float(interval.a), float(interval.b)
            pad = 1e-9 * max(1.0, hi - lo)
            for r in roots:
                if abs(r.imag) < 1e-9 and lo - pad <= r.real <= hi + pad:
                    raise MeasureError(
                        f"poly_factor has a real root near x={r.real:.6g} "
                        f"inside [{lo}, {hi}]"
                    )
        for i in range(65):
            x = interval.a + interval.length * mpf(i) / 64
            if not self.poly_value(x) > 0:
                raise MeasureError(f"poly_factor non-positive at x={x}")


def jacobi_recurrence(n: int, A, B):
    """Monic recurrence for the weight (1-t)^A (1+t)^B on [-1, 1].

    Returns (a, b), each of length n, with
    p_{k+1} = (t - a[k]) p_k - b[k] p_{k-1};  b[0] = total mass of the weight
    (the b[0] entry never multiplies anything since p_{-1} = 0).
    """
    A, B = mpf(A), mpf(B)
    a, b = [], []
    for k in range(n):
        if k == 0:
            a.append((B - A) / (A + B + 2))
            b.append(mpf(2) ** (A + B + 1) * mp.beta(A + 1, B + 1))
        else:
            s = 2 * k + A + B
            a.append((B * B - A * A) / (s * (s + 2)))
            if k == 1:
                b.append(4 * (A + 1) * (B + 1) / ((A + B + 2) ** 2 * (A + B + 3)))
            else:
                b.append(
                    4 * k * (k + A) * (k + B) * (k + A + B)
                    / (s * s * (s + 1) * (s - 1))
                )
    return a, b


def _monic_eval(t, a, b, n):
    """Values p_0..p_n and derivative p_n' of the monic recurrence at t."""
    pkm1, pk = mpf(0), mpf(1)
    dkm1, dk = mpf(0), mpf(0)
    values = [pk]
    for k in range(n):
        pkp1 = (t - a[k]) * pk - (b[k] * pkm1 if k > 0 else 0)
        dkp1 = pk + (t - a[k]) * dk - (b[k] * dkm1 if k > 0 else 0)
        pkm1, pk = pk, pkp1
        dkm1, dk = dk, dkp1
        values.append(pk)
    return values, dk


def gauss_jacobi_rule(n: int, A, B):
    """Gauss nodes/weights for (1-t)^A (1+t)^B on [-1, 1] at working precision.

    Double-precision Golub-Welsch seeds (scipy) refined by Newton on the
    monic three-term recurrence; weights from the orthonormal
    Christoffel-function sum, which is positive by construction.
    """
    if n < 1:
        raise MeasureError("node_count must be >= 1")
    A, B = mpf(A), mpf(B)
    a, b = jacobi_recurrence(n, A, B)
    seeds, _ = roots_jacobi(n, float(A), float(B))
    eps = mpf(2) ** (-mp.prec + 4)
    nodes = []
    for s in sorted(seeds):
        t = mpf(float(s))
        for _ in range(80):
            vals, deriv = _monic_eval(t, a, b, n)
            step = vals[n] / deriv
            t -= step
            if abs(step) <= eps * max(mpf(1), abs(t)):
                break
        nodes.append(t)
    # orthonormal normalization: ||p_k||^2 = b[0]*...*b[k]
    norms2 = []
    acc = mpf(1)
    for k in range(n):
        acc *= b[k]
        norms2.append(acc)
    weights = []
    for t in nodes:
        vals, _ = _monic_eval(t, a, b, n - 1)
        s = mpf(0)
        for k in range(n):
            s += vals[k] * vals[k] / norms2[k]
        weights.append(1 / s)
    return nodes, weights


@dataclass(frozen=True)
class IntervalMeasure:
    """Positive measure with cached quadrature; immutable after construction."""

    interval: Interval
    weight: WeightSpec
    nodes: tuple = field(repr=False)
    weights: tuple = field(repr=False)
    node_count: int = 0

    @property
    def mass(self) -> mpf:
        return sum(self.weights, mpf(0))

    def integrate(self, f) -> mpf:
        return sum((w * f(x) for x, w in zip(self.nodes, self.weights)), mpf(0))


def make_measure(
    interval: Interval,
    weight: WeightSpec | None = None,
    node_count: int = 64,
    precision: int | None = None,
) -> IntervalMeasure:
    """Build an IntervalMeasure with a Gauss-Jacobi rule of `node_count` nodes."""
    if precision is not None:
        set_precision(precision)
    if weight is None:
        weight = WeightSpec()
    weight.check_positive_on(interval)
    # standard variable t in [-1,1]: x = a + (b-a)(t+1)/2 maps
    # (x-a)^alpha -> ((b-a)/2)^alpha (1+t)^alpha, (b-x)^beta -> ... (1-t)^beta
    A, B = weight.beta, weight.alpha
    t_nodes, t_weights = gauss_jacobi_rule(node_count, A, B)
    half = interval.length / 2
    scale = half ** (weight.alpha + weight.beta + 1)
    nodes, weights = [], []
    for t, w in zip(t_nodes, t_weights):
        x = interval.a + half * (t + 1)
        wx = scale * w * weight.poly_value(x)
        if not (interval.contains(x, closed=False) and wx > 0):
            raise MeasureError("quadrature produced an invalid node/weight")
        nodes.append(x)
        weights.append(wx)
    return IntervalMeasure(
        interval=interval,
        weight=weight,
        nodes=tuple(nodes),
        weights=tuple(weights),
        node_count=node_count,
    )


def lebesgue(a, b, node_count: int = 64) -> IntervalMeasure:
    """Lebesgue measure on [a, b] (the workhorse test measure)."""
    return make_measure(Interval(_to_mpf(a), _to_mpf(b)), WeightSpec(), node_count)


def moment(mu: IntervalMeasure, k: int) -> mpf:
    """k-th moment of mu."""
    if k < 0:
        raise ValueError("moment order must be >= 0")
    return mu.integrate(lambda x: x**k)


def cauchy_transform(mu: IntervalMeasure, z):
    """Cauchy transform of mu at z, z off the closed support interval.

    Real z off the interval yields a real value.  On-support evaluation is
    an error by design: no principal values anywhere in the package.
    """
    if isinstance(z, (mpf, int, float, str)) and not isinstance(z, complex):
        z = _to_mpf(z)
        if mu.interval.contains(z):
            raise SupportError(f"z={z} lies on the support [{mu.interval.a}, {mu.interval.b}]")
        return sum(
            (w / (z - x) for x, w in zip(mu.nodes, mu.weights)), mpf(0)
        )
    z = mpc(z)
    if z.imag == 0 and mu.interval.contains(z.real):
        raise SupportError(f"z={z} lies on the support")
    return sum((w / (z - x) for x, w in zip(mu.nodes, mu.weights)), mpc(0))


@functools.lru_cache(maxsize=None)
def _binomial(n, k):
    return mp.binomial(n, k)


def jacobi_moment_exact(k: int, A, B) -> mpf:
    """Closed form of int_{-1}^1 t^k (1-t)^A (1+t)^B dt.

    Finite beta-function sum (t = 1-2u); cancellation grows with k, so use
    only for k well below the working digit count.
    """
    A, B = mpf(A), mpf(B)
    total = mpf(0)
    for i in range(k + 1):
        total += _binomial(k, i) * (-2) ** i * mp.beta(A + i + 1, B + 1)
    return mpf(2) ** (A + B + 1) * total
