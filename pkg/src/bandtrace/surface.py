"""Hyperelliptic-surface functionals for a multi-band set E.

Everything is built from the branched root w (w^2 = h, h monic with the band
endpoints as roots) and three families of degree-<=g polynomials determined
by linear period conditions:

* the Green numerator X_g (monic, zero integral over every gap),
* the harmonic-measure numerators S_k (band boundary data 0/1),
* the first-kind numerators u_k with unit periods over the band cycles.

Conventions, fixed once and used consistently everywhere:

* a-cycles lie over the bands; the cycle over band j integrates to
  2 * int_band(.)/w+ along the upper bank.
* normalized first-kind differentials are (i/2) u_k(t)/w(t) dt with u_k real,
  so their values along the real axis split into exact half-integer real
  parts (from band crossings) and smoothly varying imaginary parts (from gap
  and ray segments).  The imaginary parts are the working coordinates for
  the inversion torus; ``btilde`` collects their periods around the gap
  cycles.
* all abelian integrals are based at the rightmost branch point and taken
  along real-axis paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import numerics
from .errors import EvaluationOffSupportedRay, SingularPeriodSystem
from .numerics import BranchedRoot

CHART_SAMPLES = 256


def _poly_eval(coeffs, x):
    return np.polynomial.polynomial.polyval(x, coeffs)


@dataclass
class SurfacePoint:
    """Projection plus sheet; sheet +1 carries w = +sqrt(h)."""

    z: float
    sheet: int = 1

    def __post_init__(self):
        if self.sheet not in (-1, 1):
            raise ValueError("sheet must be +1 or -1")


class GapChart:
    """Trigonometric chart of one gap circle.

    z(chi) = mid + half*cos(pi chi); chi in (0,1) is sheet +1, chi in (1,2)
    sheet -1, edges canonicalized to sheet +1.  Stores cosine series of
    F_s(chi) = sigma_gap * pi * z(chi)^s / s_gap(z(chi)) for monomials s,
    so that any int_{z(chi)}^{right edge} p(t)/w(t) dt is the series
    integral of sum_s p_s F_s.
    """

    def __init__(self, root: BranchedRoot, gap_index: int, max_degree: int, samples: int = CHART_SAMPLES):
        self.root = root
        self.j = gap_index
        a, b = root.gaps[gap_index]
        self.a, self.b = a, b
        self.mid, self.half = 0.5 * (a + b), 0.5 * (b - a)
        chi = (np.arange(samples) + 0.5) / samples
        z = self.mid + self.half * np.cos(np.pi * chi)
        others = [i for i in range(root.e.size) if i not in (2 * gap_index + 1, 2 * gap_index + 2)]
        s_gap = np.sqrt(np.prod(np.abs(z[:, None] - root.e[others]), axis=1))
        sigma = root.gap_sign[gap_index]
        base = sigma * np.pi / s_gap
        # cosine coefficients of F for each monomial degree
        self.fcos = np.empty((max_degree + 1, samples))
        zs = np.ones_like(z)
        for s in range(max_degree + 1):
            y = scipy.fft.dct(base * zs, type=2)
            y[0] *= 0.5
            self.fcos[s] = y / samples
            zs = zs * z
        self._ks = np.arange(samples)

    def point(self, chi: float) -> float:
        return float(self.mid + self.half * np.cos(np.pi * chi))

    def sheet(self, chi: float) -> int:
        frac = chi % 2.0
        return 1 if frac <= 1.0 else -1

    def angle(self, x: float, sheet: int = 1) -> float:
        u = np.clip((x - self.mid) / self.half, -1.0, 1.0)
        chi = float(np.arccos(u) / np.pi)
        return chi if sheet == 1 else 2.0 - chi

    def series(self, coeffs) -> np.ndarray:
        """Cosine coefficients of F_p for the polynomial p (ascending coeffs)."""
        coeffs = np.asarray(coeffs, dtype=float)
        return coeffs @ self.fcos[: coeffs.size]

    def f_value(self, series: np.ndarray, chi) -> np.ndarray:
        chi = np.asarray(chi, dtype=float)
        return series @ np.cos(np.pi * np.outer(self._ks, chi))

    def integral(self, series: np.ndarray, chi) -> np.ndarray:
        """int_0^chi F(chi') dchi' from the cosine series (valid for all chi)."""
        chi = np.asarray(chi, dtype=float)
        k = self._ks[1:]
        out = series[0] * chi + (series[1:] / (np.pi * k)) @ np.sin(np.pi * np.outer(k, chi))
        return out

    def full_integral(self, series: np.ndarray) -> float:
        """int over the whole gap of p/w (equals the series constant term)."""
        return float(series[0])


class Surface:
    """All functionals of the band configuration (weight-independent)."""

    def __init__(self, e, nodes: int = 200, chart_samples: int = CHART_SAMPLES):
        self.root = BranchedRoot(e)
        self.e = self.root.e
        self.g = self.root.genus
        self.nodes = nodes
        g = self.g
        self.band_quads = [
            numerics.band_quadrature(self.root, j, nodes) for j in range(g + 1)
        ]
        self.charts = [GapChart(self.root, j, g, chart_samples) for j in range(g)]
        self.c0 = 0.5 * (self.e[0] + self.e[-1])  # hull center, regularizes tails

        # sigma-weighted band moment matrix: M[j, s] = sigma_j int_band_j x^s / sqrt(-h)
        self.band_moments = np.empty((g + 1, g + 1))
        for j, quad in enumerate(self.band_quads):
            xs = np.ones_like(quad.nodes)
            for s in range(g + 1):
                self.band_moments[j, s] = self.root.band_sigma[j] * np.sum(quad.weights * xs)
                xs = xs * quad.nodes

        # gap moment matrix: GapM[j, s] = int_gap_j t^s / w dt (signed w)
        self.gap_moments = np.empty((g, g + 1))
        self._mono_series = [
            [self.charts[j].series(np.eye(g + 1)[s]) for s in range(g + 1)] for j in range(g)
        ]
        for j in range(g):
            for s in range(g + 1):
                self.gap_moments[j, s] = self.charts[j].full_integral(self._mono_series[j][s])

        self._build_green_numerator()
        self._build_differentials()
        self._build_harmonic_measures()
        self._build_capacity()

    # -- construction --------------------------------------------------------

    def _build_green_numerator(self):
        g = self.g
        if g == 0:
            self.green_coeffs = np.array([1.0])
            self.green_roots = np.array([])
            return
        A = self.gap_moments[:, :g]
        rhs = -self.gap_moments[:, g]
        try:
            c = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularPeriodSystem("gap period system is singular") from exc
        self.green_coeffs = np.concatenate([c, [1.0]])
        roots = np.polynomial.polynomial.polyroots(self.green_coeffs)
        if np.max(np.abs(roots.imag)) > 1e-9:
            raise SingularPeriodSystem("complex root of the Green numerator")
        roots = np.sort(roots.real)
        for j, r in enumerate(roots):
            a, b = self.root.gaps[j]
            if not (a - 1e-12 <= r <= b + 1e-12):
                raise SingularPeriodSystem("Green numerator root escaped its gap")
        self.green_roots = roots

    def _build_differentials(self):
        g = self.g
        self.utilde = np.zeros((g, g))
        self.btilde = np.zeros((g, g))
        if g == 0:
            self.period_matrix = np.zeros((0, 0), dtype=complex)
            self.eta_inf = np.array([])
            return
        A = self.band_moments[:g, :g]
        try:
            self.utilde = np.linalg.solve(A, np.eye(g)).T  # row k: coefficients of u_k
        except np.linalg.LinAlgError as exc:
            raise SingularPeriodSystem("band period system is singular") from exc
        for k in range(g):
            for j in range(g):
                self.btilde[k, j] = self.utilde[k] @ self.gap_moments[j, :g]
        # canonical b-cycles nest through gaps j..g; purely imaginary periods
        nested = np.cumsum(self.btilde[:, ::-1], axis=1)[:, ::-1]
        self.period_matrix = 1j * nested
        self.eta_inf = np.array(
            [self._ray_halfdiff_integral(self.utilde[k]) for k in range(g)]
        )

    def _build_harmonic_measures(self):
        g = self.g
        self.hm_coeffs = np.zeros((g + 1, max(g, 1)))
        if g == 0:
            self.omega_inf = np.array([1.0])
            self.equilibrium_masses = np.array([1.0])
            return
        rhs = np.zeros((g, g + 1))
        for k in range(g + 1):
            for j in range(g):
                rhs[j, k] = (1.0 if k == j + 1 else 0.0) - (1.0 if k == j else 0.0)
        sol = np.linalg.solve(self.gap_moments[:, :g], rhs)  # (g coeffs) x (g+1 measures)
        self.hm_coeffs = sol.T
        base = np.array([1.0 if k == g else 0.0 for k in range(g + 1)])
        self.omega_inf = base + np.array(
            [numerics.ray_integral(lambda t, k=k: _poly_eval(self.hm_coeffs[k], t) / self._w_ray(t), self.e[-1])
             for k in range(g + 1)]
        )
        # independent route: masses of the equilibrium density
        eq = np.empty(g + 1)
        for j, quad in enumerate(self.band_quads):
            dens = np.abs(_poly_eval(self.green_coeffs, quad.nodes))
            eq[j] = np.sum(quad.weights * dens) / np.pi
        self.equilibrium_masses = eq

    def _build_capacity(self):
        r0 = self.e[-1] + (self.e[-1] - self.e[0])
        lg = self._green_integral_to(r0)
        tail = numerics.tail_integral(
            lambda t: _poly_eval(self.green_coeffs, t) / self._w_ray(t) - 1.0 / (t - self.c0), r0
        )
        self.log_capacity = -(lg - np.log(r0 - self.c0) + tail)
        self.capacity = float(np.exp(self.log_capacity))

    # -- low-level helpers ----------------------------------------------------

    def _w_ray(self, t):
        """w on the real axis right of all branch points (vectorized)."""
        t = np.asarray(t, dtype=float)
        return np.sqrt(np.prod(t[..., None] - self.e, axis=-1))

    def _w_left(self, t):
        t = np.asarray(t, dtype=float)
        return self.root.left_sign * np.sqrt(np.prod(np.abs(t[..., None] - self.e), axis=-1))

    def _green_integral_to(self, x: float) -> float:
        """int from the rightmost branch point to x > it of X_g/w."""
        return numerics.sqrt_endpoint_integral(
            lambda t: _poly_eval(self.green_coeffs, t) / self._w_ray(t), self.e[-1], x
        )

    def _ray_halfdiff_integral(self, ucoeffs) -> float:
        """int_{e_last}^inf u(t)/(2 w(t)) dt."""
        return numerics.ray_integral(lambda t: _poly_eval(ucoeffs, t) / (2.0 * self._w_ray(t)), self.e[-1])

    def _real_axis_value(self, pcoeffs, x: float, *, halve: bool = False) -> float:
        """int of p/w from the rightmost branch point to real x, gap/ray parts only.

        Band crossings contribute nothing here (their contribution is purely
        imaginary for real p); callers needing those use exact half-period
        bookkeeping instead.
        """
        p = np.asarray(pcoeffs, dtype=float)
        fac = 0.5 if halve else 1.0
        kind, j = self.root.region(x)
        if kind == "right":
            return fac * numerics.sqrt_endpoint_integral(
                lambda t: _poly_eval(p, t) / self._w_ray(t), self.e[-1], x
            )
        total = 0.0
        if kind == "gap":
            for l in range(j + 1, self.g):
                total -= fac * self._gap_full(p, l)
            chart = self.charts[j]
            series = chart.series(p)
            total -= fac * chart.integral(series, chart.angle(x))
            return total
        if kind == "left":
            for l in range(self.g):
                total -= fac * self._gap_full(p, l)
            total -= fac * numerics.sqrt_endpoint_integral(
                lambda t: _poly_eval(p, t) / self._w_left(t), x, self.e[0], singular_at_a=False
            )
            return total
        raise EvaluationOffSupportedRay(f"x={x} lies on a band")

    def _gap_full(self, pcoeffs, l: int) -> float:
        return self.charts[l].full_integral(self.charts[l].series(pcoeffs))

    # -- Green's function ------------------------------------------------------

    def green_function(self, z) -> float:
        """g_D(z, infinity): harmonic, positive off E, zero on E."""
        z = complex(z)
        if z.imag == 0.0:
            kind, _ = self.root.region(z.real)
            if kind in ("band", "point"):
                return 0.0
            return float(self._real_axis_value(self.green_coeffs, z.real))
        return self._complex_path_green(z).real

    def complex_green(self, z) -> complex:
        """g + i g* along the canonical path (imaginary part path-dependent)."""
        z = complex(z)
        if z.imag == 0.0 and z.real > self.e[-1]:
            return complex(self._green_integral_to(z.real))
        return self._complex_path_green(z)

    def _complex_path_green(self, z: complex) -> complex:
        e_last = self.e[-1]
        f = lambda t: _poly_eval(self.green_coeffs, t) / self.root.w_complex(t)
        height = z.imag if z.imag != 0.0 else 0.25 * (self.e[-1] - self.e[0])
        u, wu = numerics.gauss_legendre(160)
        # vertical leg leaving the branch point: t = e_last + i*height*u^2
        t1 = e_last + 1j * height * u * u
        leg1 = np.sum(wu * f(t1) * 2j * height * u)
        corner = e_last + 1j * height
        target = z if z.imag != 0.0 else complex(z.real, height)
        leg2 = numerics.segment_integral(f, corner, target, n=160)
        total = leg1 + leg2
        if z.imag == 0.0:
            leg3 = numerics.segment_integral(f, target, z, n=160)
            total += leg3
        return total

    def surface_green(self, point: SurfacePoint) -> float:
        """Odd single-valued continuation across the two sheets."""
        return point.sheet * self.green_function(point.z)

    def phi_ray(self, z: float) -> float:
        """exp of the Green integral on the ray right of E (real, > 1)."""
        if z <= self.e[-1]:
            raise EvaluationOffSupportedRay(f"z={z} is not right of the bands")
        return float(np.exp(self._green_integral_to(z)))

    # -- harmonic measures ------------------------------------------------------

    def harmonic_measure(self, k: int, x: float) -> float:
        """omega_k(x) for real x off the bands (k is a 0-based band index)."""
        kind, j = self.root.region(x)
        if kind == "band":
            return 1.0 if j == k else 0.0
        if kind == "point":
            band_of_endpoint = j // 2 if j % 2 == 0 else (j - 1) // 2
            return 1.0 if band_of_endpoint == k else 0.0
        base = 1.0 if k == self.g else 0.0
        if self.g == 0:
            return base
        return float(base + self._real_axis_value(self.hm_coeffs[k], x))

    def harmonic_measures_inf(self) -> np.ndarray:
        return self.omega_inf.copy()

    def equilibrium_density(self, x) -> np.ndarray:
        """Density of the equilibrium measure on the bands."""
        x = np.asarray(x, dtype=float)
        return np.abs(_poly_eval(self.green_coeffs, x)) / (np.pi * self.root.sqrt_minus_h(x))

    # -- Abel coordinates --------------------------------------------------------

    def abel_imag_gap(self, j: int, chi) -> np.ndarray:
        """Lifted imaginary Abel coordinates of the gap-j circle at angle chi.

        Smooth in chi; advancing chi by 2 subtracts the gap-j lattice column.
        """
        out = np.empty(self.g)
        chart = self.charts[j]
        for k in range(self.g):
            series = chart.series(self.utilde[k] / 2.0)
            c = -0.5 * np.sum(self.btilde[k, j + 1:])
            out[k] = c - chart.integral(series, chi)
        return out

    def abel_imag_gap_jacobian(self, j: int, chi) -> np.ndarray:
        chart = self.charts[j]
        out = np.empty(self.g)
        for k in range(self.g):
            series = chart.series(self.utilde[k] / 2.0)
            out[k] = -chart.f_value(series, chi)
        return out

    def abel_imag_point(self, x: float) -> np.ndarray:
        """Im of the first-kind integrals at (x, +1) for real x off the bands."""
        kind, j = self.root.region(x)
        if kind == "gap":
            return self.abel_imag_gap(j, self.charts[j].angle(x))
        return np.array(
            [self._real_axis_value(self.utilde[k], x, halve=True) for k in range(self.g)]
        )

    def abel_real_point(self, x: float) -> np.ndarray:
        """Exact half-integer real parts of the first-kind integrals at (x, +1)."""
        kind, j = self.root.region(x)
        out = np.zeros(self.g)
        if kind == "gap":
            out[: j + 1] = 0.5
        return out

    def abel_map_points(self, points: list[SurfacePoint]) -> np.ndarray:
        """Sum of first-kind integrals over surface points (complex vector)."""
        total = np.zeros(self.g, dtype=complex)
        for p in points:
            val = self.abel_real_point(p.z) + 1j * self.abel_imag_point(p.z)
            total += p.sheet * val
        return total

    def reduce_imag(self, v: np.ndarray) -> np.ndarray:
        """Reduce an imaginary-part vector modulo the gap-cycle lattice."""
        if self.g == 0:
            return np.asarray(v, dtype=float)
        m0 = np.linalg.lstsq(self.btilde, v, rcond=None)[0]
        best, best_norm = None, np.inf
        from itertools import product

        base = np.floor(m0)
        for offs in product((0.0, 1.0, -1.0, 2.0), repeat=self.g):
            m = base + np.array(offs)
            r = v - self.btilde @ m
            n = np.linalg.norm(r)
            if n < best_norm:
                best, best_norm = r, n
        return best

    def reduce_full(self, v: np.ndarray) -> np.ndarray:
        """Reduce a complex Abel vector modulo Z^g + (period matrix) Z^g."""
        v = np.asarray(v, dtype=complex)
        re = v.real - np.round(v.real)
        im = self.reduce_imag(v.imag)
        return re + 1j * im

    # -- third-kind integrals ------------------------------------------------------

    def _stable_r(self, p: float, wp: float, t):
        """(w(t) - wp) / (2 (t - p) w(t)), smooth at t = p on the matching sheet.

        Where w(t) and wp share a sign the difference cancels, so the
        equivalent divided-difference form (h(t) - h(p)) / ((t-p)(w+wp) 2w)
        is used; where they oppose, the plain form is the stable one.
        """
        t = np.asarray(t, dtype=float)
        wt = np.empty_like(t)
        on_ray = t > self.e[-1]
        wt[on_ray] = self._w_ray(t[on_ray])
        if np.any(~on_ray):
            wt[~on_ray] = np.atleast_1d(self.root.w_real(t[~on_ray]))
        dd = np.zeros_like(t)
        left = np.ones_like(t)
        # divided difference of h: sum_i prod_{l<i}(t-e_l) * prod_{l>i}(p-e_l)
        suffix_full = np.cumprod((p - self.e)[::-1])[::-1]
        for i in range(self.e.size):
            tail = suffix_full[i + 1] if i + 1 < self.e.size else 1.0
            dd += left * tail
            left = left * (t - self.e[i])
        aligned = wt * wp > 0
        out = np.empty_like(t)
        out[aligned] = dd[aligned] / (2.0 * wt[aligned] * (wt[aligned] + wp))
        plain = ~aligned
        out[plain] = (wt[plain] - wp) / (2.0 * (t[plain] - p) * wt[plain])
        return out

    def _tk_cauchy_period(self, quad, p: float, wp: float) -> float:
        """sigma-weighted band period of wp / (2 (t-p) w) on one band."""
        j = quad.band_index
        vals = wp / (2.0 * (quad.nodes - p))
        return self.root.band_sigma[j] * np.sum(quad.weights * vals)

    def _solve_tk_polynomial(self, residue_terms, leading: float = 0.0) -> np.ndarray:
        """Polynomial part of a third-kind differential from zero a-periods.

        residue_terms: list of (location, signed w value, coefficient);
        leading: fixed coefficient of t^g (nonzero only for poles at infinity).
        Returns ascending coefficients of the full polynomial (degree <= g).
        """
        g = self.g
        rhs = np.zeros(g)
        for m in range(g):
            quad = self.band_quads[m]
            acc = 0.0
            for (p, wp, coef) in residue_terms:
                acc += coef * self._tk_cauchy_period(quad, p, wp)
            if leading != 0.0:
                acc -= leading * self.band_moments[m, g]
            rhs[m] = acc
        if g == 0:
            return np.array([leading]) if leading != 0.0 else np.zeros(1)
        sol = np.linalg.solve(self.band_moments[:g, :g], rhs)
        out = np.zeros(g + 1)
        out[:g] = sol
        out[g] = leading
        return out

    def third_kind_integral(self, p: SurfacePoint, q: SurfacePoint, z: float) -> float:
        """Normalized integral with a zero at p and a pole at q, at z on the ray.

        Zero a-periods, base point at the rightmost branch point.  Supported
        for p, q projecting to the real line off the bands and z on the ray
        left of any pole location.
        """
        if z <= self.e[-1]:
            raise EvaluationOffSupportedRay(f"z={z} must exceed {self.e[-1]}")
        if p.z == q.z and p.sheet == q.sheet:
            return 0.0
        for loc in (p.z, q.z):
            if self.e[-1] < loc <= z:
                raise EvaluationOffSupportedRay(
                    f"pole location {loc} lies on the integration path"
                )
        wp = p.sheet * float(self.root.w_real(p.z))
        wq = q.sheet * float(self.root.w_real(q.z))
        terms = [(p.z, wp, 1.0), (q.z, wq, -1.0)]
        U = self._solve_tk_polynomial(terms)
        e_last = self.e[-1]

        def smooth(t):
            return (
                -self._stable_r(p.z, wp, t)
                + self._stable_r(q.z, wq, t)
                - _poly_eval(U, t) / self._w_ray(t)
            )

        val = numerics.sqrt_endpoint_integral(smooth, e_last, z)
        # the explicit simple poles integrate to logarithms
        val += np.log(abs(z - p.z) / abs(e_last - p.z))
        val -= np.log(abs(z - q.z) / abs(e_last - q.z))
        return float(val)

    # -- capacity / data view --------------------------------------------------------

    def data_summary(self) -> dict:
        return {
            "branch_points": self.e.tolist(),
            "genus": self.g,
            "capacity": self.capacity,
            "harmonic_measures_inf": self.omega_inf.tolist(),
            "green_numerator_roots": self.green_roots.tolist(),
            "period_matrix_imag": self.period_matrix.imag.tolist(),
            "gap_cycle_periods": self.btilde.tolist(),
        }


def build_surface(e, nodes: int = 200) -> Surface:
    return Surface(e, nodes=nodes)
