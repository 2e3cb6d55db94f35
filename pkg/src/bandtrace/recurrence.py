"""Recurrence coefficients, orthonormal polynomials and second-kind objects.

The primary path builds the coefficients by Lanczos tridiagonalization (full
reorthogonalization) of the multiplication operator on the discretized
measure.  A bounded moment-based cross-check (Hankel-Cholesky) is provided
for low degrees, where its conditioning is still acceptable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import numerics
from .errors import (
    EvaluationTooCloseToSupport,
    HankelBreakdown,
    InsufficientNodes,
)
from .measures import GUARD_DISTANCE, MultiBandMeasure


@dataclass
class RecurrenceCoefficients:
    """Off-diagonal a_1..a_N (positive) and diagonal b_1..b_N; a_0 = 1."""

    a: np.ndarray
    b: np.ndarray
    a0: float = 1.0

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.a.shape != self.b.shape:
            raise ValueError("a and b must have equal length")
        if np.any(self.a <= 0):
            raise ValueError("all off-diagonal coefficients must be positive")

    @property
    def order(self) -> int:
        return self.a.size

    def leading(self, n: int) -> float:
        """Leading coefficient k_n of the orthonormal polynomial."""
        if n == 0:
            return 1.0
        return float(1.0 / np.prod(self.a[:n]))


@dataclass
class MomentSequence:
    values: np.ndarray

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def __len__(self) -> int:
        return self.values.size


def moments(measure: MultiBandMeasure, K: int) -> MomentSequence:
    """Power moments s_0..s_K of the measure."""
    x, w = measure.discrete_nodes()
    vals = np.empty(K + 1)
    xk = np.ones_like(x)
    for k in range(K + 1):
        vals[k] = np.sum(w * xk)
        xk = xk * x
    return MomentSequence(vals)


def moments_from_coefficients(coeffs: RecurrenceCoefficients, K: int) -> np.ndarray:
    """s_k via the truncated Jacobi matrix (exact for k <= 2(order-1))."""
    n = coeffs.order
    if K > 2 * (n - 1):
        raise ValueError("not enough coefficients for the requested moment range")
    J = np.diag(coeffs.b) + np.diag(coeffs.a[:-1], 1) + np.diag(coeffs.a[:-1], -1)
    v = np.zeros(n)
    v[0] = 1.0
    out = np.empty(K + 1)
    for k in range(K + 1):
        out[k] = v[0]
        v = J @ v
    return out


def stieltjes_coefficients(measure: MultiBandMeasure, N: int) -> RecurrenceCoefficients:
    """Lanczos with full reorthogonalization on the discretized measure.

    The returned coefficients make the recurrence polynomials orthonormal
    against the quadrature discretization (bands plus point masses).
    """
    x, w = measure.discrete_nodes()
    if N > x.size // 2:
        raise InsufficientNodes(f"N={N} exceeds half the node count {x.size}")
    sw = np.sqrt(w)
    m = x.size
    V = np.zeros((m, N + 1))
    # sqrt-weighted vectors make plain euclidean products implement <.,.>_mu
    q = sw / np.linalg.norm(sw)
    V[:, 0] = q
    alpha = np.zeros(N)
    beta = np.zeros(N)
    for k in range(N):
        y = x * q
        alpha[k] = q @ y
        y = y - alpha[k] * q
        if k > 0:
            y = y - beta[k - 1] * V[:, k - 1]
        # double Gram-Schmidt against everything built so far
        y = y - V[:, : k + 1] @ (V[:, : k + 1].T @ y)
        y = y - V[:, : k + 1] @ (V[:, : k + 1].T @ y)
        beta[k] = np.linalg.norm(y)
        if beta[k] == 0.0:
            raise InsufficientNodes("Lanczos terminated early; measure support too small")
        q = y / beta[k]
        V[:, k + 1] = q
    # alpha_k = b_{k+1}; beta_k = a_{k+1}
    return RecurrenceCoefficients(a=beta, b=alpha)


def chebyshev_from_moments(moms: MomentSequence, N: int) -> RecurrenceCoefficients:
    """Moment route: Cholesky of the Hankel matrix (usable only for small N)."""
    if N > 12:
        raise ValueError("moment route is capped at N=12 (Hankel conditioning)")
    need = 2 * N + 1
    if len(moms) < need:
        raise ValueError(f"need moments s_0..s_{need - 1}")
    H = np.array([[moms[i + j] for j in range(N + 1)] for i in range(N + 1)])
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise HankelBreakdown("Hankel matrix of moments is not positive definite") from exc
    R = L.T
    a = np.empty(N)
    b = np.empty(N)
    prev_ratio = 0.0
    for k in range(N):
        b[k] = R[k, k + 1] / R[k, k] - prev_ratio
        prev_ratio = R[k, k + 1] / R[k, k]
        a[k] = R[k + 1, k + 1] / R[k, k]
    return RecurrenceCoefficients(a=a, b=b)


def eval_qn(coeffs: RecurrenceCoefficients, n: int, z):
    """Orthonormal polynomial q_n(z) by forward recurrence (vectorized in z)."""
    z = np.asarray(z)
    prev = np.zeros_like(z)  # q_{-1}
    cur = np.ones_like(z)  # q_0
    for m in range(1, n + 1):
        am1 = coeffs.a0 if m == 1 else coeffs.a[m - 2]
        nxt = ((z - coeffs.b[m - 1]) * cur - am1 * prev) / coeffs.a[m - 1]
        prev, cur = cur, nxt
    return cur


def eval_pn(coeffs: RecurrenceCoefficients, n: int, z):
    """Second-kind polynomial p_n(z) (same recurrence, shifted initial data)."""
    z = np.asarray(z)
    prev = -np.ones_like(z)  # p_{-1}
    cur = np.zeros_like(z)  # p_0
    for m in range(1, n + 1):
        am1 = coeffs.a0 if m == 1 else coeffs.a[m - 2]
        nxt = ((z - coeffs.b[m - 1]) * cur - am1 * prev) / coeffs.a[m - 1]
        prev, cur = cur, nxt
    return cur


def qn_power_coefficients(coeffs: RecurrenceCoefficients, n: int) -> np.ndarray:
    """Ascending power-basis coefficients of q_n (for degrees <= ~40)."""
    prev = np.zeros(n + 1)
    cur = np.zeros(n + 1)
    cur[0] = 1.0
    for m in range(1, n + 1):
        am1 = coeffs.a0 if m == 1 else coeffs.a[m - 2]
        nxt = np.zeros(n + 1)
        nxt[1:] = cur[:-1]
        nxt -= coeffs.b[m - 1] * cur + am1 * prev
        nxt /= coeffs.a[m - 1]
        prev, cur = cur, nxt
    return cur


def eval_rn(measure: MultiBandMeasure, coeffs: RecurrenceCoefficients, n: int, z):
    """Second-kind function r_n(z) = integral of q_n(x) dmu(x) / (z - x).

    Direct quadrature; accurate in absolute terms, so only meaningful while
    r_n is above the cancellation floor (use diagonal_green for products).
    """
    zc = complex(z)
    if measure.distance_to_support(zc) <= GUARD_DISTANCE:
        raise EvaluationTooCloseToSupport(f"z={z}")
    x, w = measure.discrete_nodes()
    qx = eval_qn(coeffs, n, x)
    val = np.sum(w * qx / (zc - x))
    return val.real if zc.imag == 0.0 else val


def diagonal_green(measure: MultiBandMeasure, coeffs: RecurrenceCoefficients, n: int, z):
    """q_n(z) r_n(z) computed stably as integral of q_n(x)^2 dmu(x)/(z - x).

    The defining product loses all precision once r_n decays below roundoff;
    the squared-integrand form has a positive integrand (up to the kernel)
    and keeps full relative accuracy.  Vectorized over z.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    for zi in z:
        if measure.distance_to_support(zi) <= GUARD_DISTANCE:
            raise EvaluationTooCloseToSupport(f"z={zi}")
    x, w = measure.discrete_nodes()
    qx2 = eval_qn(coeffs, n, x) ** 2
    vals = (w * qx2) @ (1.0 / (z[:, None] - x[None, :])).T
    if vals.size == 1:
        v = complex(vals[0])
        return v.real if z[0].imag == 0.0 else v
    return vals


def qn_zeros(coeffs: RecurrenceCoefficients, n: int) -> np.ndarray:
    """Zeros of q_n = eigenvalues of the order-n tridiagonal truncation."""
    if n == 0:
        return np.array([])
    if n == 1:
        return np.array([coeffs.b[0]])
    return scipy.linalg.eigvalsh_tridiagonal(coeffs.b[:n], coeffs.a[: n - 1])


@dataclass
class SpuriousPole:
    mass_location: float
    zero: float | None
    distance: float

    @property
    def found(self) -> bool:
        return self.zero is not None


def spurious_poles(measure: MultiBandMeasure, coeffs: RecurrenceCoefficients, n: int):
    """Associate to each point mass the nearest q_n zero outside the bands' hull.

    Exactly one such zero per mass appears once n is large; for small n the
    entry is reported with ``zero=None`` instead of failing.
    """
    lo, hi = measure.hull
    zeros = qn_zeros(coeffs, n)
    report: list[SpuriousPole] = []
    scale = hi - lo
    outside = zeros[(zeros < lo - 1e-13 * scale) | (zeros > hi + 1e-13 * scale)]
    taken: set[int] = set()
    for m in sorted(measure.masses, key=lambda m: m.location):
        side = outside[outside > hi] if m.location > hi else outside[outside < lo]
        best, best_d = None, np.inf
        for idx, zz in enumerate(side):
            if (m.location > hi) == (zz > hi) and idx not in taken:
                d = abs(zz - m.location)
                if d < best_d:
                    best, best_d = idx, d
        if best is None:
            report.append(SpuriousPole(m.location, None, np.nan))
        else:
            taken.add(best)
            report.append(SpuriousPole(m.location, float(side[best]), float(best_d)))
    return report


@dataclass
class PadePair:
    """Diagonal rational interpolant p_n/q_n of the Cauchy transform."""

    degree: int
    measure: MultiBandMeasure
    coeffs: RecurrenceCoefficients

    @property
    def zeros(self) -> np.ndarray:
        return qn_zeros(self.coeffs, self.degree)

    def value(self, z):
        return eval_pn(self.coeffs, self.degree, z) / eval_qn(self.coeffs, self.degree, z)

    def remainder(self, z):
        return eval_rn(self.measure, self.coeffs, self.degree, z)


def pade_order_defect(measure: MultiBandMeasure, coeffs: RecurrenceCoefficients, n: int) -> float:
    """Max of the first n Laurent coefficients of q_n mu_hat - p_n at infinity.

    All should vanish (interpolation order); computed from power moments, so
    only trustworthy for small n.
    """
    s = moments(measure, 2 * n + 1).values
    c = qn_power_coefficients(coeffs, n)
    worst = 0.0
    # coefficient of z^{-m} in q_n(z) * sum_k s_k z^{-k-1}, m = 1..n, must be 0
    for mth in range(1, n + 1):
        acc = 0.0
        for i in range(n + 1):
            k = i + mth - 1
            if k <= 2 * n + 1:
                acc += c[i] * s[k]
        worst = max(worst, abs(acc))
    return worst
