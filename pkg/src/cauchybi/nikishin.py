"""Nikishin systems: generated measures, iterated kernel, bimoments.

Indices follow the 1-based convention sigma_1..sigma_m throughout the public
surface.  Every multi-level integral is evaluated by a chain of single-level
quadratures over the destination measure's nodes; inner Cauchy-transform
values are cached per (j, k) pair, so the cost is O(m N^2) instead of N^m.
"""

from __future__ import annotations

import threading

from mpmath import mp, mpf, mpc

from .measures import IntervalMeasure, SupportError
from .poly import Polynomial


class SystemError_(ValueError):
    """Invalid Nikishin system configuration."""


class NikishinSystem:
    """Ordered tuple of interval measures with disjoint consecutive supports.

    Immutable after construction; transform caches are write-once under a
    lock, so shared concurrent reads are safe.
    """

    def __init__(self, measures):
        measures = tuple(measures)
        if len(measures) < 1:
            raise SystemError_("need at least one measure")
        for j in range(len(measures) - 1):
            gap = measures[j].interval.gap_to(measures[j + 1].interval)
            if not gap > 0:
                a, b = measures[j].interval, measures[j + 1].interval
                raise SystemError_(
                    f"consecutive supports {j + 1} and {j + 2} not disjoint: "
                    f"[{a.a}, {a.b}] vs [{b.a}, {b.b}]"
                )
        self.measures = measures
        self.m = len(measures)
        self._inner_cache = {}
        self._chain_cache = {}
        self._bimoments = {}
        self._smoment_cache = {}
        self._basis_vals = {}
        self._basis_polys = {}
        self._gram_chain = {}
        self._grams = {}
        self._lock = threading.Lock()

    def measure(self, j: int) -> IntervalMeasure:
        """1-based access to sigma_j."""
        if not 1 <= j <= self.m:
            raise IndexError(f"measure index {j} out of 1..{self.m}")
        return self.measures[j - 1]

    def interval(self, j: int):
        return self.measure(j).interval

    def reversed(self) -> "NikishinSystem":
        return NikishinSystem(tuple(reversed(self.measures)))

    # -- generated measures s_{j,k} ------------------------------------

    def _check_chain(self, j, k):
        if not (1 <= j <= self.m and 1 <= k <= self.m):
            raise IndexError(f"chain indices ({j},{k}) out of 1..{self.m}")

    def inner_values(self, j: int, k: int):
        """Values of the inner transform of s_{j,k} at sigma_j's nodes.

        Forward (j < k): s_hat_{j+1,k} at the nodes; reversed (j > k):
        s_hat_{j-1,k}; trivially ones when j == k.
        """
        self._check_chain(j, k)
        key = (j, k)
        cached = self._inner_cache.get(key)
        if cached is not None:
            return cached
        mu = self.measure(j)
        if j == k:
            vals = tuple(mpf(1) for _ in mu.nodes)
        else:
            inner_j = j + 1 if j < k else j - 1
            vals = tuple(self.s_hat(inner_j, k, x) for x in mu.nodes)
        with self._lock:
            self._inner_cache.setdefault(key, vals)
        return self._inner_cache[key]

    def s_hat(self, j: int, k: int, z):
        """Cauchy transform of the generated measure s_{j,k} at z.

        s_hat_{j,j} is sigma_j's plain transform; otherwise the one-level
        recursion integrates the cached inner transform against sigma_j.
        z must lie off the support interval of sigma_j.
        """
        self._check_chain(j, k)
        mu = self.measure(j)
        complex_z = isinstance(z, (mpc, complex)) and mpc(z).imag != 0
        if complex_z:
            z = mpc(z)
        else:
            z = mpc(z).real if isinstance(z, (mpc, complex)) else mpf(z)
            if mu.interval.contains(z):
                raise SupportError(
                    f"z={z} lies on the support of sigma_{j}"
                )
        inner = self.inner_values(j, k)
        acc = mpc(0) if complex_z else mpf(0)
        for x, w, g in zip(mu.nodes, mu.weights, inner):
            acc += w * g / (z - x)
        return acc

    def s_mass(self, j: int, k: int):
        """Total mass of s_{j,k} (z * s_hat -> mass as z -> infinity)."""
        mu = self.measure(j)
        inner = self.inner_values(j, k)
        return sum((w * g for w, g in zip(mu.weights, inner)), mpf(0))

    def s_moments(self, j: int, k: int, count: int):
        """Moments 0..count-1 of s_{j,k} (forward orientation, j <= k)."""
        if j > k:
            raise IndexError("s_moments is defined for the forward chain j <= k")
        key = (j, k)
        have = self._smoment_cache.get(key, [])
        if len(have) < count:
            mu = self.measure(j)
            inner = self.inner_values(j, k)
            have = list(have)
            for i in range(len(have), count):
                have.append(
                    sum(
                        (w * g * x**i for x, w, g in zip(mu.nodes, mu.weights, inner)),
                        mpf(0),
                    )
                )
            with self._lock:
                self._smoment_cache[key] = have
        return self._smoment_cache[key][:count]

    # -- iterated kernel ----------------------------------------------

    def kernel_K(self, x1, xm):
        """Iterated Cauchy kernel K(x1, xm), x1 in Delta_1, xm in Delta_m.

        Needs m >= 2; computed by the forward chain over sigma_2..sigma_{m-1}
        with denominators (x_j - x_{j+1}).
        """
        if self.m < 2:
            raise SystemError_("kernel requires m >= 2")
        x1, xm = mpf(x1), mpf(xm)
        if not self.interval(1).contains(x1):
            raise SupportError(f"x1={x1} not in Delta_1")
        if not self.interval(self.m).contains(xm):
            raise SupportError(f"xm={xm} not in Delta_{self.m}")
        if self.m == 2:
            return 1 / (x1 - xm)
        # g_1 at sigma_2 nodes, then push through the chain
        mu2 = self.measure(2)
        g = [1 / (x1 - x) for x in mu2.nodes]
        for j in range(2, self.m - 1):
            mu = self.measure(j)
            mu_next = self.measure(j + 1)
            g = [
                sum(
                    (w * gv / (x - t) for x, w, gv in zip(mu.nodes, mu.weights, g)),
                    mpf(0),
                )
                for t in mu_next.nodes
            ]
        mu = self.measure(self.m - 1)
        return sum(
            (w * gv / (x - xm) for x, w, gv in zip(mu.nodes, mu.weights, g)),
            mpf(0),
        )

    # -- bimoments -----------------------------------------------------

    def _chain_values(self, nu: int):
        """Chain vector for the bimoment kernel at sigma_m's nodes.

        h_1(x_2) = int x_1^nu dsigma_1 / (x_1 - x_2), pushed forward level by
        level; for m == 1 there is no chain and the caller special-cases.
        """
        cached = self._chain_cache.get(nu)
        if cached is not None:
            return cached
        mu1 = self.measure(1)
        mu2 = self.measure(2)
        h = [
            sum(
                (w * x**nu / (x - t) for x, w in zip(mu1.nodes, mu1.weights)),
                mpf(0),
            )
            for t in mu2.nodes
        ]
        for j in range(2, self.m):
            mu = self.measure(j)
            mu_next = self.measure(j + 1)
            h = [
                sum(
                    (w * hv / (x - t) for x, w, hv in zip(mu.nodes, mu.weights, h)),
                    mpf(0),
                )
                for t in mu_next.nodes
            ]
        h = tuple(h)
        with self._lock:
            self._chain_cache.setdefault(nu, h)
        return self._chain_cache[nu]

    def bimoment(self, nu: int, mu_idx: int):
        """I_{nu,mu} = double integral of x_1^nu x_m^mu K(x_1,x_m).

        For m == 1 the kernel degenerates and this is the (nu+mu)-th moment
        of sigma_1, matching the one-measure orthogonality conditions.
        """
        if nu < 0 or mu_idx < 0:
            raise ValueError("bimoment orders must be >= 0")
        key = (nu, mu_idx)
        cached = self._bimoments.get(key)
        if cached is not None:
            return cached
        mum = self.measure(self.m)
        if self.m == 1:
            val = sum(
                (w * x ** (nu + mu_idx) for x, w in zip(mum.nodes, mum.weights)),
                mpf(0),
            )
        else:
            h = self._chain_values(nu)
            val = sum(
                (
                    w * x**mu_idx * hv
                    for x, w, hv in zip(mum.nodes, mum.weights, h)
                ),
                mpf(0),
            )
        with self._lock:
            self._bimoments.setdefault(key, val)
        return self._bimoments[key]


    # -- interval-adapted bases and the Gram form of the bimoments ------
    #
    # The bimoment matrix in the monomial basis carries Vandermonde-type
    # conditioning on top of the intrinsic (exponentially graded) spectrum
    # of the separated-interval Cauchy kernel.  Solving against mapped
    # monic Legendre bases on Delta_1 and Delta_m removes the artificial
    # part, so the solution is as accurate as the kernel itself allows.

    def basis_values(self, j: int, count: int):
        """Values of the mapped monic Legendre basis 0..count-1 at the
        quadrature nodes of sigma_j."""
        mu = self.measure(j)
        c = mu.interval.midpoint
        s2 = (mu.interval.length / 2) ** 2
        have = self._basis_vals.get(j, [])
        if len(have) < count:
            have = [list(r) for r in have]
            if not have:
                have.append([mpf(1)] * len(mu.nodes))
            while len(have) < count:
                k = len(have)
                prev = have[-1]
                if k == 1:
                    nxt = [(x - c) * p for x, p in zip(mu.nodes, prev)]
                else:
                    bk = s2 * mpf((k - 1) ** 2) / (4 * (k - 1) ** 2 - 1)
                    prev2 = have[-2]
                    nxt = [
                        (x - c) * p - bk * q
                        for x, p, q in zip(mu.nodes, prev, prev2)
                    ]
                have.append(nxt)
            have = [tuple(r) for r in have]
            with self._lock:
                self._basis_vals[j] = have
        return self._basis_vals[j][:count]

    def basis_polynomial(self, j: int, k: int) -> Polynomial:
        """Monomial form of the k-th mapped monic Legendre basis element."""
        mu = self.measure(j)
        c = mu.interval.midpoint
        s2 = (mu.interval.length / 2) ** 2
        have = self._basis_polys.get(j, [])
        if len(have) <= k:
            have = list(have)
            if not have:
                have.append(Polynomial.one())
            shift = Polynomial((-c, mpf(1)))
            while len(have) <= k:
                i = len(have)
                if i == 1:
                    have.append(shift * have[-1])
                else:
                    bi = s2 * mpf((i - 1) ** 2) / (4 * (i - 1) ** 2 - 1)
                    have.append(shift * have[-1] - have[-2].scale(bi))
            with self._lock:
                self._basis_polys[j] = have
        return self._basis_polys[j][k]

    def _gram_chain_values(self, nu: int):
        """Like the monomial bimoment chain, seeded with a basis element."""
        cached = self._gram_chain.get(nu)
        if cached is not None:
            return cached
        mu1 = self.measure(1)
        mu2 = self.measure(2)
        p = self.basis_values(1, nu + 1)[nu]
        h = [
            sum(
                (w * pv / (x - t) for x, w, pv in zip(mu1.nodes, mu1.weights, p)),
                mpf(0),
            )
            for t in mu2.nodes
        ]
        for j in range(2, self.m):
            mu = self.measure(j)
            mu_next = self.measure(j + 1)
            h = [
                sum(
                    (w * hv / (x - t) for x, w, hv in zip(mu.nodes, mu.weights, h)),
                    mpf(0),
                )
                for t in mu_next.nodes
            ]
        h = tuple(h)
        with self._lock:
            self._gram_chain.setdefault(nu, h)
        return self._gram_chain[nu]

    def gram(self, nu: int, mu_idx: int):
        """Bimoment bilinear form on the adapted bases: the (nu, mu) entry
        of the kernel Gram matrix between the Delta_1 and Delta_m bases."""
        if nu < 0 or mu_idx < 0:
            raise ValueError("gram orders must be >= 0")
        key = (nu, mu_idx)
        cached = self._grams.get(key)
        if cached is not None:
            return cached
        mum = self.measure(self.m)
        q = self.basis_values(self.m, mu_idx + 1)[mu_idx]
        if self.m == 1:
            p = self.basis_values(1, nu + 1)[nu]
            val = sum(
                (w * pv * qv for w, pv, qv in zip(mum.weights, p, q)), mpf(0)
            )
        else:
            h = self._gram_chain_values(nu)
            val = sum(
                (w * qv * hv for w, qv, hv in zip(mum.weights, q, h)), mpf(0)
            )
        with self._lock:
            self._grams.setdefault(key, val)
        return self._grams[key]


def make_system(measures) -> NikishinSystem:
    """Validate consecutive disjointness and build the system."""
    return NikishinSystem(measures)
