"""Arcs, Carleson squares, dyadic annuli and Carleson-constant estimators.

An arc ``[a, b]`` of the unit circle is stored by its raw endpoint angles
(radians, ``a <= b <= a + 2*pi``); membership tests reduce angles modulo
``2*pi`` relative to ``a``. The Carleson square over ``I`` is

    Q(I) = {r e^{i t} : e^{i t} in I, 1 - |I| <= r < 1},

where ``|I| = (b - a) / (2*pi)`` is the normalised length.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, EmptyInput, EvaluationFailure, TooLarge
from .validation import check_disc_points

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12


def wrap_angle(theta):
    """Canonical representative of ``theta`` in ``[0, 2*pi)``."""
    return np.mod(theta, TWO_PI)


@dataclass(frozen=True)
class Arc:
    """Closed arc ``{e^{i t} : a <= t <= b}``.

    Degenerate arcs (``a == b``) are allowed; they arise as radial
    projections of radial segments.
    """

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError("arc endpoints must be finite")
        if b < a or b - a > TWO_PI * (1 + 1e-12):
            raise DomainError(f"invalid arc [{a}, {b}]: need 0 <= b - a <= 2*pi")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def centered(cls, theta, length):
        """Arc centred at angle ``theta`` with normalised length ``length``."""
        half = math.pi * length
        return cls(theta - half, theta + half)

    @property
    def width(self):
        return self.b - self.a

    @property
    def length(self):
        """Normalised arc length ``|I|``."""
        return (self.b - self.a) / TWO_PI

    @property
    def center(self):
        return 0.5 * (self.a + self.b)

    def offset(self, theta):
        """Angle of ``theta`` measured from ``a``, in ``[0, 2*pi)``."""
        return wrap_angle(np.asarray(theta, dtype=float) - self.a)

    def contains_angle(self, theta, tol=ANGLE_TOL):
        if self.width >= TWO_PI - tol:
            return np.ones(np.shape(theta), dtype=bool) if np.ndim(theta) else True
        off = self.offset(theta)
        inside = (off <= self.width + tol) | (off >= TWO_PI - tol)
        return inside if np.ndim(theta) else bool(inside)

    def split(self, n):
        """``n`` closed subarcs of equal length."""
        edges = np.linspace(self.a, self.b, n + 1)
        edges[0], edges[-1] = self.a, self.b
        return [Arc(edges[i], edges[i + 1]) for i in range(n)]

    def to_dict(self):
        return {"a": self.a, "b": self.b, "length": self.length}


@dataclass(frozen=True)
class CarlesonSquare:
    base: Arc

    @classmethod
    def from_angles(cls, a, b):
        return cls(Arc(a, b))

    @property
    def ell(self):
        """``l(Q) = |I|``."""
        return self.base.length

    @property
    def inner_radius(self):
        return 1.0 - self.base.length

    def to_dict(self):
        return {"a": self.base.a, "b": self.base.b, "ell": self.ell}


def contains(sq, z):
    """Membership of ``z`` (scalar or array) in the Carleson square ``sq``."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    ok = (r >= sq.inner_radius) & (r < 1.0) & sq.base.contains_angle(np.angle(z))
    return bool(ok) if ok.ndim == 0 else ok


def top_part_contains(sq, z):
    """Membership in the top part ``1 - |I| <= r < 1 - |I|/2``."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    ell = sq.ell
    ok = (r >= 1.0 - ell) & (r < 1.0 - 0.5 * ell) & sq.base.contains_angle(np.angle(z))
    return bool(ok) if ok.ndim == 0 else ok


def scale(sq, K):
    """The concentric square ``KQ`` with ``l(KQ) = K l(Q)``."""
    if K <= 0:
        raise DomainError("scale factor must be positive")
    new_len = K * sq.ell
    if new_len > 1.0 + 1e-12:
        raise TooLarge(f"K * l(Q) = {new_len} exceeds 1")
    new_len = min(new_len, 1.0)
    return CarlesonSquare(Arc.centered(sq.base.center, new_len))


def dyadic_annulus_index(z):
    """Unique ``k >= 1`` with ``2**-k < 1 - |z| <= 2**-(k-1)``.

    Works on scalars and arrays. The computation is exact in binary
    floating point: ``frexp`` splits ``1 - |z|`` into mantissa and exponent.
    """
    d = 1.0 - np.abs(np.asarray(z, dtype=complex))
    if np.any(d <= 0):
        raise DomainError("point not inside the unit disc")
    m, e = np.frexp(d)
    k = np.where(m == 0.5, 2 - e, 1 - e).astype(int)
    return int(k) if k.ndim == 0 else k


def dyadic_square(depth, index):
    """Dyadic square of depth ``depth``: base ``[2 pi i / 2^j, 2 pi (i+1) / 2^j]``."""
    n = 1 << depth
    return CarlesonSquare(Arc(TWO_PI * index / n, TWO_PI * (index + 1) / n))


@dataclass
class CarlesonEstimate:
    """Best ratio ``mu(Q) / l(Q)`` found over a family of squares."""

    constant: float
    witness_square: CarlesonSquare
    family_size: int
    truncation_radius: float | None = None
    truncated_mass_estimate: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "constant": self.constant,
            "witness_square": self.witness_square.to_dict(),
            "family_size": self.family_size,
        }
        if self.truncation_radius is not None:
            out["truncation_radius"] = self.truncation_radius
            out["truncated_mass_estimate"] = self.truncated_mass_estimate
        out.update(self.extra)
        return out


def _dyadic_indices(theta, depth):
    """Dyadic arc index (or indices, for angles on a dyadic edge) at ``depth``."""
    n = 1 << depth
    x = wrap_angle(theta) / TWO_PI * n
    idx = np.floor(x).astype(np.int64) % n
    frac = x - np.floor(x)
    # closed arcs: an angle sitting on an edge also belongs to the left neighbour
    on_edge = frac <= ANGLE_TOL * n
    return idx, on_edge, (idx - 1) % n


def discrete_carleson_constant(points, max_depth=12):
    """Estimate ``sup_Q sum_{z_n in Q} (1 - |z_n|) / l(Q)``.

    The searched family consists of every dyadic square of depth at most
    ``max_depth`` together with, for each point, the two squares centred
    at its argument with ``l = 2(1-|z_n|)`` and ``l = 4(1-|z_n|)``.
    """
    pts = check_disc_points(points)
    if pts.size == 0:
        raise EmptyInput("no points")
    r = np.abs(pts)
    d = 1.0 - r
    theta = np.angle(pts)

    best, best_sq, family = -1.0, None, 0
    for depth in range(max_depth + 1):
        n = 1 << depth
        ell = 1.0 / n
        family += n
        inside = r >= 1.0 - ell
        if not np.any(inside):
            continue
        idx, on_edge, left = _dyadic_indices(theta[inside], depth)
        w = d[inside]
        sums = np.bincount(idx, weights=w, minlength=n)
        if np.any(on_edge):
            sums += np.bincount(left[on_edge], weights=w[on_edge], minlength=n)
        j = int(np.argmax(sums))
        if sums[j] / ell > best:
            best, best_sq = sums[j] / ell, dyadic_square(depth, j)

    for factor in (2.0, 4.0):
        for zn, dn in zip(pts, d):
            ell = factor * dn
            if ell > 1.0:
                continue
            family += 1
            sq = CarlesonSquare(Arc.centered(float(np.angle(zn)), ell))
            val = float(np.sum(d[contains(sq, pts)])) / ell
            if val > best:
                best, best_sq = val, sq
    return CarlesonEstimate(constant=float(best), witness_square=best_sq, family_size=family)


# -- coefficient measure |A|^p (1-|z|^2)^(2p-1) dm ------------------------------------


def _cell_integrals(A, p, depth, radii, n):
    """Tensor Gauss-Legendre integral of the density over every dyadic cell of one ring.

    The ring ``radii[0] <= r < radii[1]`` is cut into ``2**depth`` equal
    angular cells; returns an array of ``2**depth`` cell masses.
    """
    x, wx = np.polynomial.legendre.leggauss(n)
    r0, r1 = radii
    rr = 0.5 * (r1 - r0) * x + 0.5 * (r1 + r0)
    wr = 0.5 * (r1 - r0) * wx
    cells = 1 << depth
    dt = TWO_PI / cells
    starts = dt * np.arange(cells)
    tt = starts[:, None] + 0.5 * dt * (x[None, :] + 1.0)  # (cells, n)
    wt = 0.5 * dt * wx
    z = rr[None, None, :] * np.exp(1j * tt)[:, :, None]  # (cells, n_theta, n_r)
    try:
        vals = np.asarray(A(z), dtype=complex)
    except Exception as exc:  # noqa: BLE001 - any evaluation problem is reported uniformly
        raise EvaluationFailure(f"coefficient evaluation failed: {exc}") from exc
    vals = np.broadcast_to(vals, z.shape)
    if not np.all(np.isfinite(vals)):
        raise EvaluationFailure("coefficient is not finite on the quadrature grid")
    dens = np.abs(vals) ** p * (1.0 - rr ** 2) ** (2 * p - 1) * rr
    return np.einsum("ctr,t,r->c", dens, wt, wr)


def _ring_masses(A, p, depth, radii, quad_tol, n_start=6, n_max=192):
    """Cell masses of one ring, refining the node count until the total settles."""
    n = n_start
    prev = _cell_integrals(A, p, depth, radii, n)
    while True:
        n = 2 * n
        cur = _cell_integrals(A, p, depth, radii, n)
        err = np.max(np.abs(cur - prev))
        scale_ = max(np.max(np.abs(cur)), 1e-300)
        if err <= quad_tol * scale_ or n >= n_max:
            if err > quad_tol * scale_:
                logger.warning("ring %d: quadrature stalled at n=%d (rel err %.2e)", depth, n, err / scale_)
            return cur
        prev = cur


def coefficient_carleson_constant(A, p, max_depth=6, quad_tol=1e-6):
    """Estimate the Carleson constant of ``|A|^p (1-|z|^2)^(2p-1) dm``.

    The disc is cut into dyadic top parts: ring ``j`` is
    ``1 - 2**-j <= r < 1 - 2**-(j+1)`` split into ``2**j`` angular cells.
    The mass of the dyadic square of depth ``j`` is the sum of the cells of
    rings ``j..max_depth+1`` lying under its base. The outer annulus
    ``1 - |z| < 2**-(max_depth+2)`` is not integrated; its mass is estimated
    from the density on the truncation circle and reported.
    """
    if p <= 0:
        raise DomainError("p must be positive")
    if max_depth < 0:
        raise DomainError("max_depth must be non-negative")
    last = max_depth + 1
    rings = []
    for j in range(last + 1):
        radii = (1.0 - 2.0 ** -j if j else 0.0, 1.0 - 2.0 ** -(j + 1))
        rings.append(_ring_masses(A, p, j, radii, quad_tol))

    # accumulate masses upward: square (j, i) = own ring cells + children squares
    below = rings[last].copy()
    square_mass = {last: below}
    for j in range(last - 1, -1, -1):
        child = square_mass[j + 1].reshape(-1, 2).sum(axis=1)
        square_mass[j] = rings[j] + child

    best, best_sq, family = -1.0, None, 0
    level_max = []
    for j in range(max_depth + 1):
        masses = square_mass[j]
        family += masses.size
        ratio = masses * (1 << j)
        i = int(np.argmax(ratio))
        level_max.append(float(ratio[i]))
        if ratio[i] > best:
            best, best_sq = float(ratio[i]), dyadic_square(j, i)

    r_trunc = 1.0 - 2.0 ** -(last + 1)
    theta = np.linspace(0.0, TWO_PI, 256, endpoint=False)
    try:
        edge = np.abs(np.asarray(A(r_trunc * np.exp(1j * theta)), dtype=complex)) ** p
    except Exception as exc:  # noqa: BLE001
        raise EvaluationFailure(f"coefficient evaluation failed: {exc}") from exc
    edge = np.broadcast_to(edge, theta.shape)
    # int_{r_t}^1 (1-r^2)^(2p-1) r dr = (1 - r_t^2)^(2p) / (4p)
    tail = float(np.mean(edge)) * TWO_PI * (1.0 - r_trunc ** 2) ** (2 * p) / (4 * p)
    return CarlesonEstimate(
        constant=max(best, 0.0),
        witness_square=best_sq,
        family_size=family,
        truncation_radius=r_trunc,
        truncated_mass_estimate=tail,
        extra={"level_max_ratio": level_max},
    )
