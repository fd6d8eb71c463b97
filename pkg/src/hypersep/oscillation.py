"""Zeros of solutions of ``f'' + A f = 0`` in the unit disc.

Solutions are computed as power series around the origin. Zeros are
located with the argument principle (trapezoid rule on circles, phase
tracking on sub-regions), isolated by recursive subdivision and polished
with Newton's method. The module also evaluates the weighted growth
``(1-|z|^2)^2 |A(z)|``, searches segments for points where it exceeds 1,
computes Schwarzian derivatives and chains everything into a check of the
zero set of a given solution.
"""

import ast
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import jets
from .carleson import (
    TWO_PI,
    coefficient_carleson_constant,
    contains,
    discrete_carleson_constant,
    dyadic_square,
)
from .decomposition import IntermediateOracle, decompose, reduce_sequence, verify_certificate
from .exceptions import (
    ContourThroughZero,
    CriticalPoint,
    DependentSolutions,
    DomainError,
    EvaluationFailure,
    HypersepError,
    NoNehariPoint,
    TailTooLarge,
)
from .geometry import _golden_min, geodesic_segment, rho
from .jets import Jet
from .separation import uniform_separation_constant
from .validation import check_disc_point, points_to_pairs

logger = logging.getLogger(__name__)

# polynomial coefficients up to this length get an exactly formed residual
_EXACT_RESIDUAL_DEGREE = 16


def _fmt(c):
    c = complex(c)
    return repr(c.real) if c.imag == 0 else repr(c).strip("()")


# -- coefficients -----------------------------------------------------------------


@dataclass
class AnalyticCoefficient:
    """Coefficient ``A`` of the equation.

    ``kind`` is ``"power_series"`` (explicit Taylor coefficients) or
    ``"builtin"`` with ``name`` one of ``const``, ``poly``,
    ``inverse-square`` and ``schwarzian-of``.
    """

    kind: str
    coeffs: np.ndarray | None = None
    name: str | None = None
    params: tuple = ()
    valid_radius: float = 1.0

    @classmethod
    def power_series(cls, coeffs, valid_radius=1.0):
        return cls("power_series", coeffs=np.asarray(coeffs, dtype=complex), valid_radius=valid_radius)

    @classmethod
    def const(cls, c):
        return cls("builtin", name="const", params=(complex(c),))

    @classmethod
    def poly(cls, coeffs):
        return cls("builtin", name="poly", params=tuple(complex(a) for a in coeffs))

    @classmethod
    def inverse_square(cls, c=1.0):
        """``c / (1 - z)^2``."""
        return cls("builtin", name="inverse-square", params=(complex(c),))

    @classmethod
    def schwarzian_of_power_map(cls, alpha):
        """``S_w / 2`` for ``w = ((1+z)/(1-z))^alpha``, i.e. ``(1 - alpha^2)/(1 - z^2)^2``."""
        return cls("builtin", name="schwarzian-of", params=("power-map", float(alpha)))

    @classmethod
    def from_spec(cls, spec):
        """Parse ``const:100``, ``poly:[1,0,2]``, ``inverse-square:0.25`` or
        ``schwarzian-of:power-map:0.5``."""
        head, _, rest = spec.partition(":")
        try:
            if head == "const":
                return cls.const(complex(rest.replace(" ", "")))
            if head == "poly":
                vals = ast.literal_eval(rest)
                return cls.poly([complex(v) for v in vals])
            if head == "inverse-square":
                return cls.inverse_square(complex(rest) if rest else 1.0)
            if head == "schwarzian-of":
                what, _, alpha = rest.partition(":")
                if what != "power-map":
                    raise ValueError(f"unknown map {what!r}")
                return cls.schwarzian_of_power_map(float(alpha))
        except (ValueError, SyntaxError) as exc:
            raise DomainError(f"bad coefficient spec {spec!r}: {exc}") from exc
        raise DomainError(f"unknown coefficient spec {spec!r}")

    @property
    def spec(self):
        if self.kind == "power_series":
            return "poly:[" + ",".join(_fmt(c) for c in self.coeffs) + "]"
        if self.name == "schwarzian-of":
            return f"schwarzian-of:{self.params[0]}:{self.params[1]!r}"
        if self.name == "poly":
            return "poly:[" + ",".join(_fmt(c) for c in self.params) + "]"
        return f"{self.name}:{_fmt(self.params[0])}"

    def _poly_coeffs(self):
        if self.kind == "power_series":
            return self.coeffs
        if self.name == "const":
            return np.array(self.params[:1], dtype=complex)
        if self.name == "poly":
            return np.array(self.params, dtype=complex)
        return None

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        pc = self._poly_coeffs()
        if pc is not None:
            out = np.polynomial.polynomial.polyval(z, pc)
            return np.broadcast_to(out, z.shape).astype(complex) if z.ndim else complex(out)
        if self.name == "inverse-square":
            out = self.params[0] / (1.0 - z) ** 2
        elif self.name == "schwarzian-of":
            alpha = self.params[1]
            out = (1.0 - alpha * alpha) / (1.0 - z * z) ** 2
        else:
            raise EvaluationFailure(f"cannot evaluate coefficient {self.name!r}")
        return out if z.ndim else complex(out)

    def taylor(self, n):
        """First ``n`` Taylor coefficients at the origin."""
        out = np.zeros(n, dtype=complex)
        pc = self._poly_coeffs()
        if pc is not None:
            m = min(n, pc.size)
            out[:m] = pc[:m]
        elif self.name == "inverse-square":
            out[:] = self.params[0] * np.arange(1, n + 1)
        elif self.name == "schwarzian-of":
            alpha = self.params[1]
            out[0::2] = (1.0 - alpha * alpha) * np.arange(1, (n + 1) // 2 + 1)
        return out


# -- series solutions ---------------------------------------------------------------


@dataclass
class SolutionSeries:
    coeffs: np.ndarray
    init: tuple
    coeff_source: AnalyticCoefficient | None = None
    radius: float | None = None
    _res_coeffs: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def N(self):
        return self.coeffs.size

    def derivative_coeffs(self, order=1):
        c = self.coeffs
        for _ in range(order):
            c = c[1:] * np.arange(1, c.size)
        return c

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def derivative(self, z, order=1):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.derivative_coeffs(order))

    def jet(self, z, order=3):
        vals = [complex(self.derivative(z, k)) / math.factorial(k) for k in range(order + 1)]
        return Jet(vals)

    def tail_estimate(self, R):
        """Largest ``|c_n| R^n`` over the last quarter, relative to the largest term."""
        terms = np.abs(self.coeffs) * R ** np.arange(self.N)
        peak = max(float(terms.max()), 1e-300)
        return float(terms[3 * self.N // 4 :].max()) / peak

    def recurrence_residual(self):
        """``max_n |(n+1)(n+2) c_{n+2} + sum_k a_k c_{n-k}|`` relative to the term scale."""
        if self.coeff_source is None:
            return 0.0
        c = self.coeffs
        a = self.coeff_source.taylor(c.size)
        worst = 0.0
        for n in range(c.size - 2):
            conv = np.dot(a[: n + 1], c[n::-1])
            lhs = (n + 1) * (n + 2) * c[n + 2]
            scale_ = max(abs(lhs), abs(conv), 1e-300)
            worst = max(worst, abs(lhs + conv) / scale_)
        return worst

    def residual(self, z):
        """``f'' + A f`` at ``z``.

        For polynomial ``A`` the residual is itself a polynomial whose
        coefficients are formed exactly from the stored floats, so the
        large cancelling terms ``f''`` and ``A f`` never meet in floating
        point. Other coefficients are evaluated directly.
        """
        d = self._residual_coeffs()
        if d is None:
            return self.derivative(z, 2) + self.coeff_source(z) * self(z)
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), d)

    def _residual_coeffs(self):
        if self._res_coeffs is None:
            pc = self.coeff_source._poly_coeffs() if self.coeff_source is not None else None
            if pc is None or pc.size > _EXACT_RESIDUAL_DEGREE:
                return None
            c = [(Fraction(v.real), Fraction(v.imag)) for v in self.coeffs]
            a = [(Fraction(v.real), Fraction(v.imag)) for v in pc]
            n_out = len(c) + len(a) - 1
            re, im = [Fraction(0)] * n_out, [Fraction(0)] * n_out
            for k, (ar, ai) in enumerate(a):
                for m, (cr, ci) in enumerate(c):
                    re[k + m] += ar * cr - ai * ci
                    im[k + m] += ar * ci + ai * cr
            for n in range(len(c) - 2):
                w = (n + 1) * (n + 2)
                re[n] += w * c[n + 2][0]
                im[n] += w * c[n + 2][1]
            self._res_coeffs = np.array([complex(float(x), float(y)) for x, y in zip(re, im)])
        return self._res_coeffs

    def combine(self, other, alpha=1.0, beta=1.0):
        """Series of ``alpha * self + beta * other`` (a solution of the same equation)."""
        n = max(self.N, other.N)
        c = np.zeros(n, dtype=complex)
        c[: self.N] += alpha * self.coeffs
        c[: other.N] += beta * other.coeffs
        init = (alpha * self.init[0] + beta * other.init[0], alpha * self.init[1] + beta * other.init[1])
        return SolutionSeries(c, init, self.coeff_source, min(self.radius or 1.0, other.radius or 1.0))


def _series_coeffs(a, f0, f1, N):
    c = np.zeros(N, dtype=complex)
    c[0] = f0
    if N > 1:
        c[1] = f1
    for n in range(N - 2):
        c[n + 2] = -np.dot(a[: n + 1], c[n::-1]) / ((n + 1) * (n + 2))
    return c


def solve_series(A, f0, f1, N=None, R=0.99, tol=1e-15, N_max=1 << 14):
    """Taylor coefficients of the solution with ``f(0) = f0``, ``f'(0) = f1``.

    With ``N`` given exactly ``N`` coefficients are computed. Otherwise
    ``N`` starts at 64 and doubles until the tail of the series at radius
    ``R`` drops below ``tol`` relative to its largest term.
    """
    if N is not None:
        if N < 2:
            raise DomainError("N must be at least 2")
        return SolutionSeries(_series_coeffs(A.taylor(N), f0, f1, N), (complex(f0), complex(f1)), A, R)
    if not 0 < R < A.valid_radius:
        raise DomainError(f"R = {R} must lie inside the valid radius {A.valid_radius}")
    N = 64
    while True:
        sol = SolutionSeries(_series_coeffs(A.taylor(N), f0, f1, N), (complex(f0), complex(f1)), A, R)
        if sol.tail_estimate(R) <= tol or not np.any(sol.coeffs):
            return sol
        if N >= N_max:
            raise TailTooLarge(f"series tail at R={R} still {sol.tail_estimate(R):.2e} with N={N}")
        N *= 2


# -- zero location ------------------------------------------------------------------


def contour_count(f, fprime, R, n=1 << 12, n_max=1 << 18):
    """Zeros of ``f`` in ``|z| < R`` by the trapezoid rule for ``(1/2 pi i) oint f'/f``."""
    prev = None
    while True:
        z = R * np.exp(1j * np.linspace(0.0, TWO_PI, n, endpoint=False))
        v = f(z)
        mag = np.abs(v)
        if mag.min() <= 1e-13 * max(mag.max(), 1e-300):
            raise ContourThroughZero(f"f nearly vanishes on |z| = {R}")
        val = float(np.mean(z * fprime(z) / v).real)
        if prev is not None and abs(val - prev) < 1e-3 and abs(val - round(val)) < 1e-3:
            return int(round(val))
        if n >= n_max:
            raise ContourThroughZero(f"winding number did not stabilise on |z| = {R}")
        prev = val
        n *= 2


@dataclass(frozen=True)
class _Box:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def size(self):
        return max(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def center(self):
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def boundary(self, m):
        s = np.linspace(0.0, 1.0, m, endpoint=False)
        x0, x1, y0, y1 = self.x0, self.x1, self.y0, self.y1
        return np.concatenate([
            x0 + (x1 - x0) * s + 1j * y0,
            x1 + 1j * (y0 + (y1 - y0) * s),
            x1 - (x1 - x0) * s + 1j * y1,
            x0 + 1j * (y1 - (y1 - y0) * s),
        ])

    def contains(self, z, slack=0.0):
        return (self.x0 - slack <= z.real <= self.x1 + slack) and (self.y0 - slack <= z.imag <= self.y1 + slack)

    def split(self, fx, fy):
        xm = self.x0 + fx * (self.x1 - self.x0)
        ym = self.y0 + fy * (self.y1 - self.y0)
        return [_Box(self.x0, xm, self.y0, ym), _Box(xm, self.x1, self.y0, ym),
                _Box(self.x0, xm, ym, self.y1), _Box(xm, self.x1, ym, self.y1)]

    def min_modulus(self):
        x = min(max(0.0, self.x0), self.x1)
        y = min(max(0.0, self.y0), self.y1)
        return abs(complex(x, y))


@dataclass(frozen=True)
class _Sector:
    r0: float
    r1: float
    t0: float
    t1: float

    @property
    def size(self):
        return max(self.r1 - self.r0, self.r1 * (self.t1 - self.t0))

    @property
    def center(self):
        return 0.5 * (self.r0 + self.r1) * np.exp(0.5j * (self.t0 + self.t1))

    def boundary(self, m):
        s = np.linspace(0.0, 1.0, m, endpoint=False)
        r0, r1, t0, t1 = self.r0, self.r1, self.t0, self.t1
        return np.concatenate([
            (r0 + (r1 - r0) * s) * np.exp(1j * t0),
            r1 * np.exp(1j * (t0 + (t1 - t0) * s)),
            (r1 - (r1 - r0) * s) * np.exp(1j * t1),
            r0 * np.exp(1j * (t1 - (t1 - t0) * s)),
        ])

    def contains(self, z, slack=0.0):
        r = abs(z)
        if not self.r0 - slack <= r <= self.r1 + slack:
            return False
        off = (math.atan2(z.imag, z.real) - self.t0) % TWO_PI
        span = self.t1 - self.t0
        tslack = slack / max(r, 1e-300)
        return off <= span + tslack or off >= TWO_PI - tslack

    def split(self, fr, ft):
        rm = self.r0 + fr * (self.r1 - self.r0)
        tm = self.t0 + ft * (self.t1 - self.t0)
        return [_Sector(self.r0, rm, self.t0, tm), _Sector(rm, self.r1, self.t0, tm),
                _Sector(self.r0, rm, tm, self.t1), _Sector(rm, self.r1, tm, self.t1)]


def _winding(f, region, m=64, m_max=1 << 14):
    """Winding number of ``f`` around ``region`` by tracking the phase along the boundary."""
    while True:
        v = f(region.boundary(m))
        mag = np.abs(v)
        if mag.min() <= 1e-14 * max(mag.max(), 1e-300):
            raise ContourThroughZero("f vanishes on a region boundary")
        steps = np.angle(np.roll(v, -1) / v)
        if np.max(np.abs(steps)) < math.pi / 4 or m >= m_max:
            if np.max(np.abs(steps)) >= math.pi / 2:
                raise ContourThroughZero("phase along region boundary not resolved")
            return int(round(steps.sum() / TWO_PI))
        m *= 2


_SPLITS = (0.5 + 1 / 97, 0.5 - 1 / 61, 0.5 + 1 / 37, 0.5 - 1 / 23, 0.5 + 1 / 13)


def _newton(f, fp, z0, tol, max_iter=60):
    z = complex(z0)
    for _ in range(max_iter):
        d = complex(fp(z))
        if d == 0:
            return None
        step = complex(f(z)) / d
        z -= step
        if not np.isfinite(z):
            return None
        if abs(step) <= max(tol * 1e-3, 1e-16 * max(1.0, abs(z))):
            return z
    return z if abs(step) <= tol else None


def _isolate(f, fp, region, count, tol, out, depth=0):
    if count <= 0:
        return
    if count == 1:
        z = _newton(f, fp, region.center, tol)
        if z is not None and region.contains(z, slack=1e-12 + 1e-9 * region.size):
            out.append((z, 1))
            return
    if region.size < tol or depth > 60:
        z = _newton(f, fp, region.center, tol) if count == 1 else None
        out.append((z if z is not None else region.center, count))
        return
    for fr in _SPLITS:
        for ft in _SPLITS:
            kids = region.split(fr, ft)
            try:
                counts = [_winding(f, k) for k in kids]
            except ContourThroughZero:
                continue
            if sum(counts) == count:
                for k, c in zip(kids, counts):
                    _isolate(f, fp, k, c, tol, out, depth + 1)
                return
    raise ContourThroughZero("could not subdivide region without crossing a zero")


def _zero_key(z):
    arg = math.atan2(z.imag, z.real) % TWO_PI
    # a zero on the positive real axis may carry -1e-17 of imaginary noise
    if arg > TWO_PI - 1e-12:
        arg = 0.0
    return (round(abs(z), 12), round(arg, 12))


def find_zeros(f, R, tol=1e-12, return_multiplicity=False, max_tail=1e-10):
    """All zeros of the series ``f`` in ``|z| <= R``.

    The disc is cut into a central box and four annular sectors; each piece
    is subdivided while it holds more than one zero and single zeros are
    polished by Newton's method. The zeros are ordered by ``(|z|, arg z)``
    and their number is checked against the contour count on ``|z| = R``.
    """
    src = f.coeff_source
    if src is not None and R >= src.valid_radius:
        raise DomainError(f"R = {R} must lie inside the valid radius {src.valid_radius}")
    if f.tail_estimate(R) > max_tail:
        raise TailTooLarge(f"truncation tail {f.tail_estimate(R):.2e} at R={R} exceeds {max_tail:.1e}")
    if not np.any(f.coeffs):
        raise EvaluationFailure("the trivial solution has no isolated zeros")
    dc = f.derivative_coeffs(1)

    def fv(z):
        return np.polynomial.polynomial.polyval(z, f.coeffs)

    def fpv(z):
        return np.polynomial.polynomial.polyval(z, dc)

    for attempt in range(6):
        Rc = R * (1.0 + 1e-7 * attempt * (attempt + 1))
        if src is not None and Rc >= src.valid_radius:
            Rc = R
        try:
            total = contour_count(fv, fpv, Rc)
            inner = 0.5 * Rc * (1.0 + 0.013 * attempt)
            box = _Box(-inner / math.sqrt(2), inner / math.sqrt(2), -inner / math.sqrt(2), inner / math.sqrt(2))
            found = []
            _isolate(fv, fpv, box, _winding(fv, box), tol, found)
            rot = 0.1234 + 0.071 * attempt
            for q in range(4):
                t0 = rot + q * math.pi / 2
                # annular sector outside the central box's inscribed circle; zeros in the box
                # corners are dropped below so nothing is counted twice
                sec = _Sector(inner / math.sqrt(2), Rc, t0, t0 + math.pi / 2)
                part = []
                _isolate(fv, fpv, sec, _winding(fv, sec), tol, part)
                found.extend((z, m) for z, m in part if not box.contains(z))
            break
        except ContourThroughZero:
            if attempt == 5:
                raise
            logger.debug("contour through a zero at attempt %d; perturbing", attempt)

    # merge duplicates that sit on shared region edges
    merged = []
    for z, m in sorted(found, key=lambda zm: _zero_key(zm[0])):
        if merged and abs(merged[-1][0] - z) < 1e3 * tol + 1e-10:
            continue
        merged.append((z, m))
    inside_Rc = sum(m for z, m in merged if abs(z) <= Rc * (1 + 1e-12))
    if inside_Rc != total:
        raise EvaluationFailure(f"located {inside_Rc} zeros but the contour count is {total}")
    merged = [(z, m) for z, m in merged if abs(z) <= R]
    merged.sort(key=lambda zm: _zero_key(zm[0]))
    if return_multiplicity:
        return [z for z, _ in merged], [m for _, m in merged]
    return [z for z, _ in merged]


# -- coefficient growth and Nehari points ---------------------------------------------


def coefficient_growth(A, grid_depth=12, n_theta=512):
    """``max (1-|z|^2)^2 |A(z)|`` over a polar grid refined toward the boundary."""
    s = np.linspace(0.0, grid_depth, 8 * grid_depth + 1)
    radii = np.concatenate([[0.0], 1.0 - 2.0 ** -s[1:]])
    if A.valid_radius < 1.0:
        radii = radii[radii < A.valid_radius]
    radii = radii[radii < 1.0]
    theta = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    z = radii[:, None] * np.exp(1j * theta)[None, :]
    g = (1.0 - np.abs(z) ** 2) ** 2 * np.abs(np.broadcast_to(A(z), z.shape))
    return float(np.max(g))


def nehari_point(A, zj, zk, threshold=1.0, grid=257):
    """Point of ``<z_j, z_k>`` maximising ``(1-|z|^2)^2 |A(z)|``, if the maximum exceeds ``threshold``."""
    seg = geodesic_segment(zj, zk)

    def g(t):
        z = seg.point_at(t)
        return (1.0 - np.abs(z) ** 2) ** 2 * np.abs(np.broadcast_to(A(z), np.shape(z)))

    t = np.linspace(0.0, 1.0, grid)
    vals = g(t)
    i = int(np.argmax(vals))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, grid - 1)]
    tm, neg = _golden_min(lambda x: -g(x), np.array([lo]), np.array([hi]), 1e-12)
    best_t, best = (float(tm[0]), float(-neg[0])) if -neg[0] > vals[i] else (float(t[i]), float(vals[i]))
    if best > threshold:
        return complex(seg.point_at(best_t))
    raise NoNehariPoint(
        f"max (1-|z|^2)^2|A| on the segment is {best:.6g} <= {threshold}",
        max_value=best,
        location=complex(seg.point_at(best_t)),
    )


def nehari_oracle(A, threshold=1.0, on_segment_tol=1e-8):
    return IntermediateOracle(lambda zj, zk: nehari_point(A, zj, zk, threshold), on_segment_tol)


# -- Schwarzian derivative and a-points ---------------------------------------------------


@dataclass
class RatioMap:
    """``w = f1 / f2`` for two series solutions."""

    f1: SolutionSeries
    f2: SolutionSeries

    def jet(self, z, order=3):
        return self.f1.jet(z, order) / self.f2.jet(z, order)


def map_from_spec(spec):
    """Callable on :class:`Jet` values for ``identity``, ``mobius:a,b,c,d``,
    ``exp:lam`` or ``power-map:alpha``."""
    head, _, rest = spec.partition(":")
    try:
        if head == "identity":
            return lambda x: x
        if head == "mobius":
            a, b, c, d = (complex(v) for v in rest.split(","))
            return lambda x: (a * x + b) / (c * x + d)
        if head == "exp":
            lam = complex(rest) if rest else 1.0
            return lambda x: jets.exp(x * lam)
        if head == "power-map":
            alpha = float(rest)
            return lambda x: ((1 + x) / (1 - x)) ** alpha
    except ValueError as exc:
        raise DomainError(f"bad map spec {spec!r}: {exc}") from exc
    raise DomainError(f"unknown map spec {spec!r}")


def schwarzian(w, z):
    """``S_w(z) = (w''/w')' - (w''/w')^2 / 2`` via exact Taylor arithmetic.

    ``w`` may be a :class:`RatioMap`, a map spec string or any callable
    built from jet-compatible operations.
    """
    z = check_disc_point(z)
    if isinstance(w, str):
        w = map_from_spec(w)
    jet = w.jet(z) if hasattr(w, "jet") else w(Jet.variable(z, 3))
    d1, d2, d3 = (jet.derivative(k) for k in (1, 2, 3))
    scale_ = max(1.0, abs(jet.c[0]))
    if abs(d1) < 1e-13 * scale_:
        raise CriticalPoint(f"w'({z}) vanishes")
    q = d2 / d1
    return complex(d3 / d1 - 1.5 * q * q)


def wronskian(f1, f2, z):
    return f1.derivative(z) * f2(z) - f1(z) * f2.derivative(z)


def a_points(f1, f2, a, R, tol=1e-12):
    """Solutions of ``f1/f2 = a`` in ``|z| <= R``: zeros of ``f1 - a f2`` (or of ``f2`` when ``a`` is infinite)."""
    w0 = complex(wronskian(f1, f2, 0.0))
    scale_ = max(abs(f1.init[0]) + abs(f1.init[1]), 1.0) * max(abs(f2.init[0]) + abs(f2.init[1]), 1.0)
    if abs(w0) < 1e-12 * scale_:
        raise DependentSolutions("the Wronskian vanishes")
    if a is None or (isinstance(a, (int, float, complex)) and not np.isfinite(a)):
        return find_zeros(f2, R, tol)
    return find_zeros(f1.combine(f2, 1.0, -complex(a)), R, tol)


# -- the whole chain --------------------------------------------------------------------


@dataclass
class CorollaryReport:
    data: dict
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return bool(self.data.get("all_certificates_ok", False))

    def to_dict(self):
        return {**self.data, "warnings": list(self.warnings)}


def _square_job(Q, pts, A, threshold):
    oracle = nehari_oracle(A, threshold)
    try:
        cert = decompose(Q, pts, oracle)
    except NoNehariPoint as exc:
        return {"square": Q.to_dict(), "n_points": len(pts), "status": "no-nehari-point",
                "max_value": exc.max_value}, None
    except HypersepError as exc:
        return {"square": Q.to_dict(), "n_points": len(pts), "status": type(exc).__name__,
                "message": str(exc)}, None
    rep = verify_certificate(cert, Q)
    return {"square": Q.to_dict(), "n_points": len(pts), "status": "verified" if rep.ok else "failed",
            "failed": rep.failed, "split_delta": rep.split_delta,
            "generations": len(cert.generations), "lambda_count": len(cert.lambda_Q)}, cert


def corollary_pipeline(A, p=1.0, R=0.99, f0=0.0, f1=1.0, max_depth=6, quad_tol=1e-6,
                       threshold=1.0, seed=0, threads=1, keep_certificates=False):
    """Check the zero set of one solution against the uniform-separation chain.

    Returns a :class:`CorollaryReport` whose ``data`` is JSON-ready.
    """
    rng = np.random.default_rng(seed)
    warnings = []
    data = {"coefficient": A.spec, "p": p, "R": R, "init": [[complex(f0).real, complex(f0).imag],
                                                            [complex(f1).real, complex(f1).imag]]}

    carl = coefficient_carleson_constant(A, p, max_depth=max_depth, quad_tol=quad_tol)
    data["coefficient_carleson"] = carl.to_dict()
    data["coefficient_growth"] = coefficient_growth(A)

    sol = solve_series(A, f0, f1, R=R)
    probe = 0.5 * R * np.sqrt(rng.uniform(0, 1, 100)) * np.exp(1j * rng.uniform(0, TWO_PI, 100))
    res = np.abs(sol.residual(probe))
    scl = np.maximum(np.abs(sol.derivative(probe, 2)), np.abs(A(probe) * sol(probe)))
    data["solution"] = {"terms": sol.N, "tail": sol.tail_estimate(R),
                        "max_rel_residual": float(np.max(res / np.maximum(scl, 1.0)))}

    zeros = find_zeros(sol, R) if np.any(sol.coeffs) else []
    data["zeros"] = points_to_pairs(zeros)
    data["zero_count"] = len(zeros)

    if len(zeros) >= 2:
        sep = uniform_separation_constant(zeros)
        data["separation"] = sep.to_dict()
        data["discrete_carleson"] = discrete_carleson_constant(zeros, max_depth=max(max_depth, 8)).to_dict()
    else:
        data["separation"] = {"delta": None, "uniform_constant": 1.0,
                              "note": "at most one zero: trivially uniformly separated"}

    # Nehari points between nearest neighbours
    pairs = set()
    for i, z in enumerate(zeros):
        d = [rho(z, w) if j != i else np.inf for j, w in enumerate(zeros)]
        if len(zeros) > 1:
            j = int(np.argmin(d))
            pairs.add((min(i, j), max(i, j)))
    found = 0
    for i, j in sorted(pairs):
        try:
            nehari_point(A, zeros[i], zeros[j], threshold)
            found += 1
        except NoNehariPoint as exc:
            warnings.append(f"no Nehari point between zeros {i} and {j} (max {exc.max_value:.4g})")
    data["nehari_pairs"] = {"checked": len(pairs), "found": found}

    certs, jobs = [], []
    if len(zeros) >= 2:
        delta = 0.5 * data["separation"]["delta"]
        assignment = reduce_sequence(zeros, delta)
        data["subsequences"] = len(assignment)
        zarr = np.asarray(zeros, dtype=complex)
        for group in assignment.groups:
            gp = zarr[group]
            for depth in range(4, max_depth + 1):
                for idx in range(1 << depth):
                    Q = dyadic_square(depth, idx)
                    inside = gp[contains(Q, gp)]
                    if inside.size >= 2:
                        jobs.append((Q, inside))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _square_job(job[0], job[1], A, threshold), jobs))
    else:
        results = [_square_job(Q, pts, A, threshold) for Q, pts in jobs]
    for entry, cert in results:
        certs.append(entry)
        if entry["status"] == "no-nehari-point":
            warnings.append(f"square {entry['square']}: no Nehari point for some pair")
        if keep_certificates and cert is not None:
            entry["certificate"] = cert.to_dict()
    data["certificates"] = certs
    data["all_certificates_ok"] = all(c["status"] == "verified" for c in certs)
    return CorollaryReport(data, warnings)
