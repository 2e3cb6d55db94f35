"""Multi-band measures with point masses.

A measure here lives on g+1 disjoint real intervals (bands) with density
rho(x) / (pi sqrt(-h(x))), h the monic polynomial vanishing at the band
endpoints, plus finitely many point masses placed on the real line outside
the closed convex hull of the bands.  The weight rho is analytic and
strictly positive on the bands.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import (
    EvaluationTooCloseToSupport,
    MassInsideHull,
    NonpositiveMass,
    NonpositiveWeight,
    OverlappingBands,
)

GUARD_DISTANCE = 1e-8  # evaluation guard around the support
POLE_GUARD = 1e-3  # minimum admissible distance of rational-weight poles to E


@dataclass(frozen=True)
class Band:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise OverlappingBands(f"band [{self.lower}, {self.upper}] is degenerate")


@dataclass(frozen=True)
class PointMass:
    location: float
    weight: float

    def __post_init__(self):
        if not self.weight > 0:
            raise NonpositiveMass(f"mass weight {self.weight} must be positive")


class Weight:
    """Analytic weight on the bands: constant, polynomial, exp(poly) or rational.

    Polynomial coefficients are in ascending order (numpy.polynomial
    convention).
    """

    def __init__(self, kind: str, coefficients, denominator=None):
        self.kind = kind
        self.coefficients = np.atleast_1d(np.asarray(coefficients, dtype=float))
        self.denominator = (
            np.atleast_1d(np.asarray(denominator, dtype=float)) if denominator is not None else None
        )
        if kind not in ("constant", "polynomial", "exp_polynomial", "rational"):
            raise ValueError(f"unknown weight kind {kind!r}")
        if kind == "rational" and self.denominator is None:
            raise ValueError("rational weight needs a denominator")

    @classmethod
    def constant(cls, value: float) -> "Weight":
        return cls("constant", [value])

    @classmethod
    def polynomial(cls, coefficients) -> "Weight":
        return cls("polynomial", coefficients)

    @classmethod
    def exp_polynomial(cls, coefficients) -> "Weight":
        return cls("exp_polynomial", coefficients)

    @classmethod
    def rational(cls, numerator, denominator) -> "Weight":
        return cls("rational", numerator, denominator)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full(x.shape, self.coefficients[0]) if x.ndim else float(self.coefficients[0])
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, self.coefficients)
        if self.kind == "exp_polynomial":
            return np.exp(np.polynomial.polynomial.polyval(x, self.coefficients))
        num = np.polynomial.polynomial.polyval(x, self.coefficients)
        den = np.polynomial.polynomial.polyval(x, self.denominator)
        return num / den

    def log(self, x):
        """log rho(x); exact for exp_polynomial."""
        if self.kind == "exp_polynomial":
            return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coefficients)
        return np.log(self(x))

    def scaled(self, factor: float) -> "Weight":
        if self.kind == "exp_polynomial":
            c = self.coefficients.copy()
            c[0] += np.log(factor)
            return Weight(self.kind, c)
        return Weight(self.kind, self.coefficients * factor, self.denominator)

    def is_constant_one(self, tol: float = 0.0) -> bool:
        if self.kind == "constant":
            return abs(self.coefficients[0] - 1.0) <= tol
        if self.kind in ("polynomial", "rational"):
            c = self.coefficients
            flat = c.size == 1 or np.all(c[1:] == 0.0)
            if self.kind == "polynomial":
                return flat and abs(c[0] - 1.0) <= tol
            d = self.denominator
            return flat and (d.size == 1 or np.all(d[1:] == 0.0)) and abs(c[0] / d[0] - 1.0) <= tol
        return self.coefficients.size == 1 and abs(self.coefficients[0]) <= tol

    def _poly_degree(self) -> int:
        degs = [self.coefficients.size - 1]
        if self.denominator is not None:
            degs.append(self.denominator.size - 1)
        return max(degs)

    def certify_positive(self, bands: list[Band]) -> None:
        """Sampling + derivative-bound certificate of strict positivity on E.

        64*(degree+1) Chebyshev points per band; for polynomial numerators and
        denominators the minimum sampled value is checked against a coefficient
        bound on the derivative times the mesh width.
        """
        npts = 64 * (self._poly_degree() + 1)
        for band in bands:
            k = np.arange(1, npts + 1)
            x = 0.5 * (band.lower + band.upper) + 0.5 * (band.upper - band.lower) * np.cos(
                (2 * k - 1) * np.pi / (2 * npts)
            )
            vals = self(x)
            if not np.all(np.isfinite(vals)):
                raise NonpositiveWeight("weight is not finite on a band")
            low = float(np.min(vals))
            if low <= 0:
                raise NonpositiveWeight(f"weight attains {low} <= 0 on [{band.lower}, {band.upper}]")
            if self.kind in ("polynomial", "rational"):
                h = np.max(np.abs(np.diff(np.sort(x))))
                for coeffs in filter(lambda c: c is not None, (self.coefficients, self.denominator)):
                    if coeffs.size <= 1:
                        continue
                    r = max(abs(band.lower), abs(band.upper))
                    dbound = sum(
                        i * abs(c) * r ** (i - 1) for i, c in enumerate(coeffs) if i >= 1
                    )
                    sampled = np.polynomial.polynomial.polyval(x, coeffs)
                    if np.min(np.abs(sampled)) - dbound * h / 2 <= 0:
                        raise NonpositiveWeight(
                            "cannot certify a sign for a polynomial factor of the weight"
                        )
        if self.kind == "rational" and self.denominator.size > 1:
            roots = np.polynomial.polynomial.polyroots(self.denominator)
            hull = (bands[0].lower, bands[-1].upper)
            for r in roots:
                d = abs(r.imag) if hull[0] <= r.real <= hull[1] else min(
                    abs(r - hull[0]), abs(r - hull[1])
                )
                # distance to the hull underestimates distance to E; fine as a guard
                if d < POLE_GUARD:
                    raise NonpositiveWeight(f"rational weight pole {r} too close to the bands")


class MultiBandMeasure:
    """Bands + weight + point masses, with derived quadrature tables.

    Construct, then call :func:`validate` (or ``measure.validate()``) before
    using any evaluation routine.
    """

    def __init__(self, bands, weight: Weight, masses=(), nodes_per_band: int = 200):
        self.bands = [b if isinstance(b, Band) else Band(*b) for b in bands]
        self.weight = weight
        self.masses = [m if isinstance(m, PointMass) else PointMass(*m) for m in masses]
        self.nodes_per_band = int(nodes_per_band)
        self.normalized = False
        self._validated = False
        self.root: numerics.BranchedRoot | None = None
        self.band_quads: list[numerics.BandQuadrature] = []
        self._weight_cache: dict[int, np.ndarray] = {}

    # -- derived data ------------------------------------------------------

    @property
    def e(self) -> np.ndarray:
        return np.array([x for b in self.bands for x in (b.lower, b.upper)])

    @property
    def genus(self) -> int:
        return len(self.bands) - 1

    @property
    def hull(self) -> tuple[float, float]:
        return self.bands[0].lower, self.bands[-1].upper

    @property
    def support_points(self) -> np.ndarray:
        pts = list(self.e) + [m.location for m in self.masses]
        return np.array(pts)

    def validate(self) -> "MultiBandMeasure":
        bands = sorted(self.bands, key=lambda b: b.lower)
        for left, right in zip(bands, bands[1:]):
            if left.upper >= right.lower:
                raise OverlappingBands(
                    f"bands [{left.lower},{left.upper}] and [{right.lower},{right.upper}] overlap"
                )
        self.bands = bands
        lo, hi = self.hull
        for m in self.masses:
            if lo <= m.location <= hi:
                raise MassInsideHull(
                    f"point mass at {m.location} lies inside the convex hull [{lo}, {hi}]"
                )
        self.weight.certify_positive(self.bands)
        self.root = numerics.BranchedRoot(self.e)
        self.band_quads = [
            numerics.band_quadrature(self.root, j, self.nodes_per_band)
            for j in range(len(self.bands))
        ]
        self._weight_cache.clear()
        self._validated = True
        return self

    def require_validated(self):
        if not self._validated:
            raise RuntimeError("measure must be validated first")

    def weight_values(self, quad: numerics.BandQuadrature) -> np.ndarray:
        vals = self._weight_cache.get(quad.band_index)
        if vals is None:
            vals = np.asarray(self.weight(quad.nodes), dtype=float)
            self._weight_cache[quad.band_index] = vals
        return vals

    # -- discretization for recurrence construction -------------------------

    def discrete_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes/weights of the quadrature measure including point masses."""
        self.require_validated()
        xs, ws = [], []
        for quad in self.band_quads:
            xs.append(quad.nodes)
            ws.append(quad.weights * self.weight_values(quad) / np.pi)
        for m in self.masses:
            xs.append(np.array([m.location]))
            ws.append(np.array([m.weight]))
        return np.concatenate(xs), np.concatenate(ws)

    def distance_to_support(self, z) -> float:
        z = complex(z)
        d = min(
            abs(z - m.location) for m in self.masses
        ) if self.masses else np.inf
        for b in self.bands:
            if b.lower <= z.real <= b.upper:
                d = min(d, abs(z.imag))
            else:
                d = min(d, abs(z - b.lower), abs(z - b.upper))
        return d


def validate(measure: MultiBandMeasure) -> MultiBandMeasure:
    """Check invariants and attach derived data (branch tables, quadrature)."""
    return measure.validate()


def total_mass(measure: MultiBandMeasure) -> float:
    measure.require_validated()
    return float(numerics.integrate_measure(measure, lambda x: np.ones_like(np.asarray(x, dtype=float))))


def normalize(measure: MultiBandMeasure) -> MultiBandMeasure:
    """Scale the weight and the masses so the total mass becomes one."""
    measure.require_validated()
    mass = total_mass(measure)
    scaled = MultiBandMeasure(
        [Band(b.lower, b.upper) for b in measure.bands],
        measure.weight.scaled(1.0 / mass),
        [PointMass(m.location, m.weight / mass) for m in measure.masses],
        nodes_per_band=measure.nodes_per_band,
    )
    scaled.validate()
    scaled.normalized = True
    return scaled


def cauchy_transform(measure: MultiBandMeasure, z):
    """integral of d mu(t) / (z - t); Herglotz up to sign (Im < 0 for Im z > 0)."""
    measure.require_validated()
    zc = complex(z)
    if measure.distance_to_support(zc) <= GUARD_DISTANCE:
        raise EvaluationTooCloseToSupport(f"z={z} is within the guard distance of the support")
    val = numerics.integrate_measure(measure, lambda x: 1.0 / (zc - x))
    if zc.imag == 0.0 and abs(val.imag) < 1e-15:
        return complex(val.real)
    return complex(val)


def arcsine_measure(nodes_per_band: int = 200) -> MultiBandMeasure:
    """The classical single-band reference measure on [-1, 1]."""
    return MultiBandMeasure([(-1.0, 1.0)], Weight.constant(1.0), nodes_per_band=nodes_per_band).validate()
