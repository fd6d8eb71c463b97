"""Pseudo-hyperbolic geometry of the unit disc.

Points are complex numbers with ``|z| < 1``. A hyperbolic segment is the
piece between its endpoints of either a diameter or a circle orthogonal to
the unit circle (``|c|**2 == 1 + r**2``).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .carleson import Arc
from .exceptions import CoincidentEndpoints, DomainError, ThroughOrigin
from .validation import check_disc_point

GEOM_TOL = 1e-12
SEARCH_TOL = 1e-10
COLLINEAR_TOL = 1e-13
LEMMA1_SUP = math.sqrt(1.0 + math.pi ** 2)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def rho(z, w):
    """Vectorised ``|z - w| / |1 - conj(z) w|`` without validation.

    Uses ``|1 - conj(z) w|^2 = |z - w|^2 + (1 - |z|^2)(1 - |w|^2)``: both
    terms are non-negative and the expression is symmetric operation by
    operation, so ``rho(z, w) == rho(w, z)`` holds exactly.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d = np.abs(z - w)
    az, aw = np.abs(z), np.abs(w)
    return d / np.sqrt(d * d + ((1.0 - az) * (1.0 + az)) * ((1.0 - aw) * (1.0 + aw)))


def pseudo_distance(z, w):
    """Pseudo-hyperbolic distance between two disc points.

    >>> pseudo_distance(0.5, -0.5)
    0.8
    """
    z = check_disc_point(z, "z")
    w = check_disc_point(w, "w")
    return float(rho(z, w))


def mobius(z, a, theta=0.0):
    """Disc automorphism ``e^{i theta} (z - a) / (1 - conj(a) z)``."""
    z = np.asarray(z, dtype=complex)
    return np.exp(1j * theta) * (z - a) / (1.0 - np.conj(a) * z)


@dataclass(frozen=True)
class GeodesicSegment:
    """Hyperbolic segment ``<z1, z2>``.

    ``center``/``radius`` are ``None`` for a diameter segment.
    """

    z1: complex
    z2: complex
    center: complex | None = None
    radius: float | None = None
    _th1: float = field(init=False, repr=False, compare=False)
    _sweep: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.center is None:
            th1, sweep = 0.0, 0.0
        else:
            u1 = self.z1 - self.center
            th1 = math.atan2(u1.imag, u1.real)
            # the swept angle comes from the chord, which stays accurate when the
            # carrier is nearly straight and the centre is far away
            chord = self.z2 - self.z1
            sweep = 2.0 * math.asin(min(1.0, abs(chord) / (2.0 * self.radius)))
            if (u1.conjugate() * chord).imag < 0.0:
                sweep = -sweep
        object.__setattr__(self, "_th1", th1)
        object.__setattr__(self, "_sweep", sweep)

    @property
    def kind(self):
        return "diameter" if self.center is None else "circular"

    @property
    def sweep(self):
        """Signed angle swept about the centre going from ``z1`` to ``z2``."""
        return self._sweep

    def point_at(self, t):
        """Point at parameter ``t`` in ``[0, 1]`` (linear / angular sweep)."""
        t = np.asarray(t, dtype=float)
        if self.center is None:
            out = self.z1 + (self.z2 - self.z1) * t
        else:
            # z1 + (chord to the swept point), avoiding centre + radius cancellation
            half = 0.5 * self._sweep * t
            out = self.z1 + 2j * self.radius * np.sin(half) * np.exp(1j * (self._th1 + half))
        out = np.where(t == 0.0, self.z1, np.where(t == 1.0, self.z2, out))
        return complex(out) if out.ndim == 0 else out

    def sample(self, n):
        return self.point_at(np.linspace(0.0, 1.0, n))

    def carrier_residual(self, z):
        """Distance from ``z`` to the carrier line/circle."""
        z = np.asarray(z, dtype=complex)
        if self.center is None:
            u = self.z1 if abs(self.z1) >= abs(self.z2) else self.z2
            u = u / abs(u)
            return np.abs((np.conj(u) * z).imag)
        return np.abs(np.abs(z - self.center) - self.radius)

    def min_modulus(self):
        """Smallest ``|z|`` over the segment (exact)."""
        if self.center is None:
            if (np.conj(self.z1) * self.z2).real <= 0.0:
                return 0.0
            return min(abs(self.z1), abs(self.z2))
        c, r = self.center, self.radius
        off = np.angle(np.exp(1j * (np.angle(-c) - self._th1)))
        s = self.sweep
        if (s >= 0 and 0.0 <= off <= s) or (s < 0 and s <= off <= 0.0):
            return abs(c) - r
        return min(abs(self.z1), abs(self.z2))

    def reversed(self):
        return GeodesicSegment(self.z2, self.z1, self.center, self.radius)

    def to_dict(self):
        out = {"z1": [self.z1.real, self.z1.imag], "z2": [self.z2.real, self.z2.imag], "kind": self.kind}
        if self.center is not None:
            out["center"] = [self.center.real, self.center.imag]
            out["radius"] = self.radius
        return out


def geodesic_segment(z, w):
    """Hyperbolic segment joining ``z`` and ``w``.

    The carrier circle ``|x - c| = r`` is orthogonal to the unit circle, so
    ``Re(z conj(c)) = (1 + |z|^2) / 2`` for both endpoints; that linear
    system determines ``c``.
    """
    z = check_disc_point(z, "z")
    w = check_disc_point(w, "w")
    if abs(z - w) / abs(1.0 - z.conjugate() * w) < 1e-14:
        raise CoincidentEndpoints(f"endpoints coincide: {z}, {w}")
    cross = (z.conjugate() * w).imag
    if abs(cross) < COLLINEAR_TOL * (abs(z) + abs(w)):
        return GeodesicSegment(z, w)
    bz = 0.5 * (1.0 + abs(z) ** 2)
    bw = 0.5 * (1.0 + abs(w) ** 2)
    cx = (bz * w.imag - bw * z.imag) / cross
    cy = (bw * z.real - bz * w.real) / cross
    c = complex(cx, cy)
    return GeodesicSegment(z, w, c, math.sqrt(abs(c) ** 2 - 1.0))


def point_at(seg, t):
    return seg.point_at(t)


def radial_projection(seg):
    """Arc ``{z/|z| : z in seg}``.

    Along a geodesic that misses the origin the argument is monotone, so the
    projection is the arc swept between the endpoint arguments.
    """
    z1, z2 = seg.z1, seg.z2
    if seg.center is None:
        if abs(z1) < GEOM_TOL or abs(z2) < GEOM_TOL or (z1.conjugate() * z2).real <= 0.0:
            raise ThroughOrigin("diameter segment passes through the origin")
        th = math.atan2(z1.imag, z1.real)
        return Arc(th, th)
    if abs(seg.center) - seg.radius < GEOM_TOL:
        raise ThroughOrigin("carrier passes through the origin")
    th1 = math.atan2(z1.imag, z1.real)
    delta = float(np.angle(z2 / z1))
    return Arc(th1, th1 + delta) if delta >= 0 else Arc(th1 + delta, th1)


def _golden_min(f, lo, hi, tol, max_iter=200):
    """Vectorised golden-section minimisation of ``f`` on brackets ``[lo, hi]``."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        left = f1 <= f2
        lo, hi = np.where(left, lo, x1), np.where(left, x2, hi)
        probe = np.where(left, hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo))
        fp = f(probe)
        x1, x2 = np.where(left, probe, x2), np.where(left, x1, probe)
        f1, f2 = np.where(left, fp, f2), np.where(left, f1, fp)
    tm = 0.5 * (lo + hi)
    return tm, f(tm)


def distances_to_segment(xis, seg, tol=SEARCH_TOL, coarse=33, dense=1025):
    """``min_{z in seg} rho(xi, z)`` for every ``xi`` in ``xis``.

    A coarse grid locates the minimiser; rows whose grid profile is not
    unimodal are regridded densely. Golden-section search then refines
    inside the bracket around the best grid sample.
    """
    xis = np.atleast_1d(np.asarray(xis, dtype=complex))
    if xis.size == 0:
        return np.empty(0)
    grid = np.linspace(0.0, 1.0, coarse)
    vals = rho(xis[:, None], seg.point_at(grid)[None, :])
    s = np.sign(np.diff(vals, axis=1))
    rising = np.maximum.accumulate(s > 0, axis=1)
    bad = np.any(rising & (s < 0), axis=1)

    out = np.empty(xis.size)
    groups = [(~bad, grid, vals[~bad])]
    if np.any(bad):
        dgrid = np.linspace(0.0, 1.0, dense)
        groups.append((bad, dgrid, rho(xis[bad][:, None], seg.point_at(dgrid)[None, :])))
    for mask, g, sub in groups:
        if not np.any(mask):
            continue
        xs = xis[mask]
        idx = np.argmin(sub, axis=1)
        best = sub[np.arange(sub.shape[0]), idx]
        lo = g[np.maximum(idx - 1, 0)]
        hi = g[np.minimum(idx + 1, g.size - 1)]
        slope = np.max(np.abs(np.diff(sub, axis=1)), axis=1) / (g[1] - g[0])
        t_tol = float(np.min(tol / (1.0 + slope)))
        _, fm = _golden_min(lambda t: rho(xs, seg.point_at(t)), lo, hi, max(t_tol, 1e-15))
        out[mask] = np.minimum(best, fm)
    return out


def distance_to_segment(xi, seg, tol=SEARCH_TOL):
    """Pseudo-hyperbolic distance from ``xi`` to the segment ``seg``."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    xi = check_disc_point(xi, "xi")
    return float(distances_to_segment(np.array([xi]), seg, tol)[0])


def lemma1_depth_ratio(ell):
    """``(1 - X0(l)) / l`` for the geodesic joining the inner corners of a square.

    ``x0(l) = (1 + (1-l)^2) / (2 (1-l) cos(pi l))`` is the centre of the
    orthogonal circle and ``X0 = x0 - sqrt(x0^2 - 1)`` its crossing of the
    real axis. ``x0 - 1`` is formed without cancellation so the ratio stays
    accurate as ``l -> 0``, where it tends to ``sqrt(1 + pi^2)``.
    """
    ell = np.asarray(ell, dtype=float)
    if np.any((ell <= 0.0) | (ell >= 0.5)):
        raise DomainError("ell must lie in (0, 1/2)")
    one = 1.0 - ell
    excess = (ell * ell + 4.0 * one * np.sin(0.5 * math.pi * ell) ** 2) / (2.0 * one * np.cos(math.pi * ell))
    out = (np.sqrt(excess * (excess + 2.0)) - excess) / ell
    return float(out) if out.ndim == 0 else out


def lemma1_region_contains(arc, z, tol=GEOM_TOL):
    """Is ``z`` inside ``{r e^{it} : e^{it} in I, 1 - sqrt(1+pi^2)|I| <= r < 1}``?"""
    z = np.asarray(z, dtype=complex)
    ok = (np.abs(z) >= 1.0 - LEMMA1_SUP * arc.length - tol) & arc.contains_angle(np.angle(z), tol=1e-9)
    return bool(ok) if ok.ndim == 0 else ok
