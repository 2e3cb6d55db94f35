"""Branch-consistent square roots and singular-endpoint quadrature.

Everything downstream (Cauchy transforms, recurrence coefficients, periods,
abelian integrals) reduces to one of three primitives implemented here:

* ``BranchedRoot`` -- the function w(z) = sqrt(prod (z - e_j)) realized as a
  product of principal square roots.  This is single-valued off the bands,
  behaves like z**(g+1) at +infinity, and carries explicit sign/boundary
  tables for real arguments.
* Chebyshev-Gauss rules for integrals with inverse-square-root endpoint
  factors on bands and gaps.
* Gauss-Legendre rules (with square-root and 1/u substitutions) for smooth
  segments, half-infinite rays and tail integrals.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BranchPointEvaluation


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=64)
def chebyshev_gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for integral of f(u)/sqrt(1-u^2) on [-1, 1]."""
    k = np.arange(1, n + 1)
    nodes = np.cos((2 * k - 1) * np.pi / (2 * n))
    weights = np.full(n, np.pi / n)
    return nodes, weights


class BranchedRoot:
    """w(z)^2 = prod_j (z - e_j) with w(z)/z^(g+1) -> 1 as z -> +inf.

    Branch points must be distinct and ordered; consecutive pairs
    (e_1,e_2), (e_3,e_4), ... bound the bands, the intervals between bands
    are the gaps.  The only cuts of w are the bands themselves.
    """

    def __init__(self, e):
        e = np.asarray(e, dtype=float)
        if e.ndim != 1 or e.size < 2 or e.size % 2 != 0:
            raise ValueError("need an even number (>= 2) of branch points")
        if not np.all(np.diff(e) > 0):
            raise ValueError("branch points must be strictly increasing")
        self.e = e
        self.genus = e.size // 2 - 1
        self.bands = [(e[2 * j], e[2 * j + 1]) for j in range(self.genus + 1)]
        self.gaps = [(e[2 * j + 1], e[2 * j + 2]) for j in range(self.genus)]
        g = self.genus
        # sign of i^-1 * w(x+i0) relative to sqrt(-h) on band j (0-based)
        self.band_sigma = np.array([(-1) ** (g - j) for j in range(g + 1)])
        # sign of (real) w on gap j, and on the two unbounded rays
        self.gap_sign = np.array([(-1) ** (g - j) for j in range(g)])
        self.left_sign = (-1) ** (g + 1)

    def h(self, z):
        z = np.asarray(z)
        return np.prod(z[..., None] - self.e, axis=-1)

    def region(self, x: float):
        """Classify a real point: ('band', j) | ('gap', j) | ('left'|'right', 0)."""
        e = self.e
        if x <= e[0]:
            return ("left", 0) if x < e[0] else ("point", 0)
        if x >= e[-1]:
            return ("right", 0) if x > e[-1] else ("point", e.size - 1)
        k = bisect.bisect_left(e, x)
        if x == e[k]:
            return ("point", k)
        return ("band", (k - 1) // 2) if (k - 1) % 2 == 0 else ("gap", (k - 2) // 2)

    def sqrt_minus_h(self, x):
        """sqrt(-h(x)) > 0 for x strictly inside any band."""
        x = np.asarray(x, dtype=float)
        diffs = x[..., None] - self.e
        return np.sqrt(np.prod(np.abs(diffs), axis=-1))

    def w_real(self, x):
        """w on the real line off the bands (real-valued, sign tracked)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            kind, j = self.region(xi)
            if kind == "band":
                raise BranchPointEvaluation(
                    f"w is discontinuous across the band at x={xi}; "
                    "use w_plus/w_minus for boundary values"
                )
            if kind == "point":
                out[i] = 0.0
                continue
            mag = np.sqrt(np.prod(np.abs(xi - self.e)))
            if kind == "right":
                out[i] = mag
            elif kind == "left":
                out[i] = self.left_sign * mag
            else:
                out[i] = self.gap_sign[j] * mag
        return out if out.size > 1 else out[0]

    def w_plus(self, x):
        """Boundary value w(x + i0) for x inside a band."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty(x.shape, dtype=complex)
        for i, xi in enumerate(x):
            kind, j = self.region(xi)
            if kind == "point":
                out[i] = 0.0
                continue
            if kind != "band":
                out[i] = self.w_real(xi)
                continue
            out[i] = 1j * self.band_sigma[j] * self.sqrt_minus_h(xi)
        return out if out.size > 1 else out[0]

    def w_minus(self, x):
        return np.conjugate(self.w_plus(x))

    def w_complex(self, z):
        """w at complex z (principal-branch product); +i0 convention on bands."""
        z = np.asarray(z, dtype=complex)
        return np.prod(np.sqrt(z[..., None] - self.e), axis=-1)

    def eval_w(self, z):
        """w(z) for z anywhere off the branch points.

        Real z on a band interior resolves to the upper-bank value; real z in
        gaps/rays uses the exact real-signed formula (no signed-zero traps).
        """
        z = np.asarray(z)
        if z.ndim == 0:
            return self._eval_scalar(complex(z))
        return np.array([self._eval_scalar(complex(zi)) for zi in z.ravel()]).reshape(z.shape)

    def _eval_scalar(self, z: complex):
        if z.imag == 0.0:
            kind, j = self.region(z.real)
            if kind == "point":
                raise BranchPointEvaluation(f"z={z.real} is a branch point")
            if kind == "band":
                return self.w_plus(z.real)
            return complex(self.w_real(z.real))
        return complex(np.prod(np.sqrt(z - self.e)))


@dataclass
class BandQuadrature:
    """Nodes/weights with int_band f(x)/sqrt(-h(x)) dx ~= sum w_i f(x_i)."""

    band_index: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f):
        return np.sum(self.weights * f(self.nodes))


def band_quadrature(root: BranchedRoot, band_index: int, count: int = 200) -> BandQuadrature:
    """Gauss-Chebyshev rule on one band for the weight 1/sqrt(-h).

    The two local endpoint factors form the Chebyshev weight after an affine
    map; the remaining square-root factors are smooth and positive on the
    band and are folded into the weights.
    """
    if count < 32:
        count = 32
    a, b = root.bands[band_index]
    u, wu = chebyshev_gauss(count)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = mid + half * u
    others = [j for j in range(root.e.size) if j not in (2 * band_index, 2 * band_index + 1)]
    s = np.sqrt(np.prod(np.abs(x[:, None] - root.e[others]), axis=1)) if others else np.ones_like(x)
    return BandQuadrature(band_index, x, wu / s)


def gap_quadrature(root: BranchedRoot, gap_index: int, count: int = 200):
    """Nodes/weights with int_gap f(x)/w(x) dx ~= sum w_i f(x_i).

    Signed: w carries the sign of the chosen branch on this gap.
    """
    a, b = root.gaps[gap_index]
    u, wu = chebyshev_gauss(count)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = mid + half * u
    others = [j for j in range(root.e.size) if j not in (2 * gap_index + 1, 2 * gap_index + 2)]
    s = np.sqrt(np.prod(np.abs(x[:, None] - root.e[others]), axis=1))
    return x, root.gap_sign[gap_index] * wu / s


def sqrt_endpoint_integral(f, a: float, b: float, singular_at_a: bool = True, n: int = 120):
    """int_a^b f(t) dt where f has an inverse-square-root singularity at one end.

    Substitution t = a + (b-a) u^2 (or mirrored) regularizes the endpoint.
    """
    u, wu = gauss_legendre(n)
    if singular_at_a:
        t = a + (b - a) * u * u
        jac = 2.0 * (b - a) * u
    else:
        t = b - (b - a) * u * u
        jac = -2.0 * (b - a) * u
    vals = f(t) * jac
    return np.sum(wu * vals)


def tail_integral(f, r0: float, n: int = 120):
    """int_{r0}^inf f(t) dt for f decaying at least like 1/t^2 (t = r0/u)."""
    u, wu = gauss_legendre(n)
    t = r0 / u
    return np.sum(wu * f(t) * r0 / (u * u))


def ray_integral(f, a: float, n: int = 120, split: float | None = None):
    """int_a^inf f(t) dt with a 1/sqrt singularity at a and ~1/t^2 decay."""
    if split is None:
        split = a + 1.0 if a > 0 else 2.0 * abs(a) + 2.0
    return sqrt_endpoint_integral(f, a, split, n=n) + tail_integral(f, split, n=n)


def segment_integral(f, za: complex, zb: complex, n: int = 120):
    """Straight-segment integral of a smooth complex integrand."""
    u, wu = gauss_legendre(n)
    t = za + (zb - za) * u
    return (zb - za) * np.sum(wu * f(t))


def self_convergence(value_fn, count: int) -> float:
    """|I(2N) - I(N)| for a node-count-parametrized integral."""
    return abs(value_fn(2 * count) - value_fn(count))


def integrate_measure(measure, f):
    """Integral of f against a validated multi-band measure.

    Sum of (1/pi) int_band f rho / sqrt(-h) over bands plus the point-mass
    terms.  ``measure`` provides quadrature tables, a weight evaluator and
    the mass list; f must accept numpy arrays and mass locations.
    """
    total = 0.0
    for quad in measure.band_quads:
        x = quad.nodes
        total = total + np.sum(quad.weights * measure.weight_values(quad) * f(x)) / np.pi
    for pm in measure.masses:
        total = total + pm.weight * f(pm.location)
    return total
