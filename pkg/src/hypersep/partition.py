"""Inductive partition of an arc away from a finite separated set.

Given ``I = [a, b]`` with ``|I| < 1/8``, points ``xi_k`` with ``|xi_k| <= r``
and ``1 - r <= |I|``, the arc is cut into at most ``8K + 8`` closed subarcs
of length at least ``(1 - r)/64`` whose Carleson squares keep hyperbolic
segments away from every ``xi_k``. The obstacles are the Euclidean discs
``|z - xi_k| <= mu (1 - |xi_k|)``; the construction walks from ``a`` to
``b`` cutting at the first angle where the growing square touches an
obstacle.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .carleson import TWO_PI, Arc, CarlesonSquare
from .exceptions import DomainError, HypothesisViolation, NoIntersection
from .geometry import distances_to_segment, geodesic_segment, rho
from .validation import check_disc_points

logger = logging.getLogger(__name__)

CASE_STOP, CASE_NEXT, CASE_TAIL, CASE_CORRECTION = "I", "II", "III", "IV"


@dataclass(frozen=True)
class PartitionConfig:
    """Parameters of the partition.

    ``mu`` defaults to ``min(0.49, epsilon/4)``: for ``rho``-separation by
    ``epsilon`` the discs of relative radius ``epsilon/4`` are pairwise
    disjoint. ``bisect_tol`` is relative to ``b - a``.
    """

    epsilon: float = 0.5
    mu: float | None = None
    eta_samples: int = 12
    bisect_tol: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError("epsilon must lie in (0, 1)")
        mu = min(0.49, self.epsilon / 4.0) if self.mu is None else float(self.mu)
        if not 0.0 < mu < 0.5:
            raise DomainError("mu must lie in (0, 1/2)")
        object.__setattr__(self, "mu", mu)


@dataclass
class PartitionResult:
    subarcs: list
    breakpoints: list
    case_trace: list
    eta_est: float | None = None
    mu: float = 0.0
    r: float = 0.0
    n_obstacles: int = 0

    @property
    def N(self):
        return len(self.subarcs)

    def to_dict(self):
        return {
            "subarcs": [[s.a, s.b] for s in self.subarcs],
            "breakpoints": list(self.breakpoints),
            "case_trace": list(self.case_trace),
            "eta_est": self.eta_est,
            "mu": self.mu,
            "r": self.r,
            "N": self.N,
        }


@dataclass
class PartitionReport:
    min_length_ok: bool
    cover_ok: bool
    eta_est: float
    eta_ok: bool
    min_length: float
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return self.min_length_ok and self.cover_ok and self.eta_ok

    def to_dict(self):
        return {
            "min_length_ok": self.min_length_ok,
            "cover_ok": self.cover_ok,
            "eta_est": self.eta_est,
            "eta_ok": self.eta_ok,
            "min_length": self.min_length,
            "problems": list(self.problems),
        }


def _arc_distance(c, a, b, radius):
    """Distance from points ``c`` to the circular arc ``|z| = radius``, angle in ``[a, b]``."""
    off = np.mod(np.angle(c) - a, TWO_PI)
    inside = off <= (b - a)
    on_arc = np.abs(np.abs(c) - radius)
    ends = np.minimum(np.abs(c - radius * np.exp(1j * a)), np.abs(c - radius * np.exp(1j * b)))
    return np.where(inside, on_arc, ends)


def _radial_distance(c, theta, r0, r1):
    u = np.exp(1j * theta)
    t = np.clip((np.conj(u) * c).real, r0, r1)
    return np.abs(c - t * u)


def square_disc_distance(sq, centers):
    """Euclidean distance from ``centers`` to the closed polar rectangle of ``sq``."""
    c = np.atleast_1d(np.asarray(centers, dtype=complex))
    a, b = sq.base.a, sq.base.b
    r0 = sq.inner_radius
    mod = np.abs(c)
    off = np.mod(np.angle(c) - a, TWO_PI)
    inside = (mod >= r0) & (mod <= 1.0) & ((off <= b - a) | (b - a >= TWO_PI))
    if b - a >= TWO_PI:
        dist = np.where(mod < r0, r0 - mod, np.maximum(mod - 1.0, 0.0))
        return np.where(inside, 0.0, dist)
    dist = np.minimum.reduce([
        _arc_distance(c, a, b, r0),
        _arc_distance(c, a, b, 1.0),
        _radial_distance(c, a, r0, 1.0),
        _radial_distance(c, b, r0, 1.0),
    ])
    return np.where(inside, 0.0, dist)


def square_disc_intersects(sq, center, radius):
    """Does the closed disc ``|z - center| <= radius`` meet ``Q``?

    Vectorised over ``center``/``radius``; scalar inputs give a bool.
    """
    radius = np.asarray(radius, dtype=float)
    if np.any(radius <= 0):
        raise DomainError("radius must be positive")
    hit = square_disc_distance(sq, center) <= radius
    return bool(hit[0]) if np.ndim(center) == 0 and radius.ndim == 0 else hit


def _touches(a, a1, centers, radii):
    if a1 <= a:
        return False
    sq = CarlesonSquare(Arc(a, a1))
    return bool(np.any(square_disc_distance(sq, centers) <= radii))


def smallest_touching_endpoint(a, b, discs, bisect_tol=None):
    """Smallest ``a1`` in ``(a, b]`` with ``Q([a, a1])`` meeting one of ``discs``.

    ``discs`` is a pair ``(centers, radii)``. Both the angular extent and
    the depth of ``Q([a, a1])`` grow with ``a1``, so the predicate is
    monotone and bisection applies. The returned value always touches.
    """
    centers, radii = (np.atleast_1d(np.asarray(x)) for x in discs)
    if bisect_tol is None:
        bisect_tol = 1e-10 * (b - a)
    if not _touches(a, b, centers, radii):
        raise NoIntersection("Q([a, b]) misses every disc")
    lo, hi = a, b
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if _touches(a, mid, centers, radii):
            hi = mid
        else:
            lo = mid
    return hi


def _check_hypotheses(arc, xi, r, config):
    ell = arc.length
    if not 0.0 < ell < 1.0 / 8.0:
        raise HypothesisViolation(f"|I| = {ell} is not in (0, 1/8)", hypothesis="arc_length")
    if not 0.0 <= r < 1.0:
        raise HypothesisViolation(f"r = {r} is not in [0, 1)", hypothesis="r_range")
    if 1.0 - r > ell * (1 + 1e-12):
        raise HypothesisViolation(f"1 - r = {1 - r} exceeds |I| = {ell}", hypothesis="one_minus_r")
    if xi.size:
        if np.max(np.abs(xi)) > r:
            raise HypothesisViolation("some |xi_k| exceeds r", hypothesis="max_modulus")
        if xi.size > 1:
            D = rho(xi[:, None], xi[None, :])
            np.fill_diagonal(D, np.inf)
            if np.min(D) <= config.epsilon:
                raise HypothesisViolation(
                    f"points are not epsilon-separated (min rho {np.min(D):.4g} <= {config.epsilon})",
                    hypothesis="separation",
                )


def _check_disjoint(centers, radii):
    if centers.size < 2:
        return
    gap = np.abs(centers[:, None] - centers[None, :]) - (radii[:, None] + radii[None, :])
    np.fill_diagonal(gap, np.inf)
    if np.min(gap) <= 0.0:
        raise HypothesisViolation("obstacle discs overlap; decrease mu", hypothesis="disjoint_discs")


def partition_arc(arc, xi, r, config=None):
    """Partition ``arc`` into subarcs adapted to the points ``xi``.

    Walks the breakpoints ``a = a_0 < a_1 < ...``; at each breakpoint one of
    four cases applies (recorded in ``case_trace``):

    * I   -- the walk reached ``b``;
    * II  -- the square over the rest of the arc meets an obstacle: cut at
      the smallest touching angle and quarter the piece;
    * III -- no obstacle ahead and enough room: quarter the tail and stop;
    * IV  -- no obstacle ahead but the tail is too short: pull the last
      breakpoint back to ``b - 2 pi (1 - mu)(1 - r)/8`` and close with one arc.
    """
    config = config or PartitionConfig()
    xi = check_disc_points(xi, allow_empty=True, name="xi")
    _check_hypotheses(arc, xi, r, config)
    a, b = arc.a, arc.b
    mu = config.mu

    keep = (1.0 - np.abs(xi)) <= 4.0 * arc.length
    centers = xi[keep]
    radii = mu * (1.0 - np.abs(centers))
    _check_disjoint(centers, radii)
    tol = config.bisect_tol * (b - a)
    tail_room = TWO_PI * (1.0 - mu) * (1.0 - r) / 8.0

    breaks = [a]
    subarcs = []
    trace = []
    while True:
        am = breaks[-1]
        if am >= b:
            trace.append(CASE_STOP)
            break
        if _touches(am, b, centers, radii):
            trace.append(CASE_NEXT)
            a1 = smallest_touching_endpoint(am, b, (centers, radii), tol)
            if b - a1 <= tol:
                a1 = b
            subarcs.extend(Arc(am, a1).split(4))
            breaks.append(a1)
            continue
        if am <= b - tail_room:
            trace.append(CASE_TAIL)
            subarcs.extend(Arc(am, b).split(4))
            breaks.append(b)
            break
        trace.append(CASE_CORRECTION)
        a_star = b - tail_room
        last = subarcs.pop()
        subarcs.append(Arc(last.a, a_star))
        subarcs.append(Arc(a_star, b))
        breaks[-1] = a_star
        breaks.append(b)
        break

    logger.debug("partition of [%g, %g]: N=%d, trace=%s", a, b, len(subarcs), trace)
    return PartitionResult(
        subarcs=subarcs,
        breakpoints=breaks,
        case_trace=trace,
        mu=mu,
        r=r,
        n_obstacles=int(centers.size),
    )


def _sample_square(sub, n, rng):
    """Corner points plus ``n`` random points of ``Q(sub)``."""
    lo = 1.0 - sub.length
    hi = 1.0 - 1e-9 * sub.length
    corners = np.array([lo * np.exp(1j * sub.a), lo * np.exp(1j * sub.b),
                        hi * np.exp(1j * sub.a), hi * np.exp(1j * sub.b),
                        lo * np.exp(1j * sub.center)])
    th = rng.uniform(sub.a, sub.b, n)
    rr = rng.uniform(lo, hi, n)
    return np.concatenate([corners, rr * np.exp(1j * th)])


def _segment_pairs(sub, xi, samples, rng):
    pts = _sample_square(sub, samples, rng)
    m = pts.size
    pairs = [(pts[i], pts[j]) for i in range(5) for j in range(i + 1, 5)]
    pairs += [(pts[i], pts[(i + 1) % m]) for i in range(5, m)]
    pairs += [(pts[rng.integers(m)], pts[rng.integers(m)]) for _ in range(samples)]
    # points of the set that fall inside the square are legitimate endpoints
    inside = xi[(np.abs(xi) >= 1.0 - sub.length) & sub.contains_angle(np.angle(xi))] if xi.size else xi
    pairs += [(x, pts[0] if abs(x - pts[0]) > 1e-12 else pts[1]) for x in inside]
    return pairs


def segment_set_distance(segments, xi, tol=1e-7, coarse=17, refine=4):
    """Approximate ``min rho`` from the points ``xi`` to a list of segments.

    Every segment is sampled coarsely; only (segment, point) combinations
    whose coarse value is near the running minimum are refined.
    """
    xi = np.asarray(xi, dtype=complex)
    if xi.size == 0 or not segments:
        return 1.0
    t = np.linspace(0.0, 1.0, coarse)
    samples = np.stack([s.point_at(t) for s in segments])  # (S, coarse)
    vals = rho(samples[:, :, None], xi[None, None, :]).min(axis=1)  # (S, K)
    best = float(vals.min())
    order = np.argsort(vals, axis=None)
    refined = best
    for flat in order[:refine]:
        si, k = np.unravel_index(flat, vals.shape)
        if vals[si, k] > 1.25 * best + 1e-9:
            break
        d = float(distances_to_segment(xi[k:k + 1], segments[si], tol)[0])
        refined = min(refined, d)
    return refined


def verify_partition(arc, result, xi, r, samples=12, seed=0):
    """Check the length bound, the cover and estimate the separation ``eta``.

    ``eta_est`` is the smallest pseudo-hyperbolic distance found between the
    points ``xi`` and hyperbolic segments joining sampled points (corners
    included) of each ``Q(I_n)``. With no points it is 1 by convention.
    """
    xi = check_disc_points(xi, allow_empty=True, name="xi")
    rng = np.random.default_rng(seed)
    problems = []
    subs = list(result.subarcs)
    lengths = np.array([s.length for s in subs]) if subs else np.array([0.0])
    bound = (1.0 - r) / 64.0
    min_length_ok = bool(subs) and bool(np.all(lengths >= bound))
    if not min_length_ok:
        problems.append(f"subarc shorter than (1-r)/64 = {bound:.3e}: min {lengths.min():.3e}")

    cover_ok = bool(subs)
    edge_tol = 1e-12 * max(1.0, abs(arc.a), abs(arc.b))
    if subs:
        if abs(subs[0].a - arc.a) > edge_tol or abs(subs[-1].b - arc.b) > edge_tol:
            cover_ok = False
            problems.append("subarcs do not start at a / end at b")
        for left, right in zip(subs, subs[1:]):
            if abs(left.b - right.a) > edge_tol:
                cover_ok = False
                problems.append(f"gap or overlap at {left.b} / {right.a}")
        if any(s.width <= 0 for s in subs):
            cover_ok = False
            problems.append("degenerate subarc")

    eta = 1.0
    if xi.size:
        for sub in subs:
            if sub.width <= 0:
                continue
            segs = []
            for z1, z2 in _segment_pairs(sub, xi, samples, rng):
                if rho(z1, z2) < 1e-13:
                    continue
                segs.append(geodesic_segment(z1, z2))
            eta = min(eta, segment_set_distance(segs, xi))
    eta_ok = eta > 1e-12
    if not eta_ok:
        problems.append("a sampled segment passes through a point of the set")
    return PartitionReport(
        min_length_ok=min_length_ok,
        cover_ok=cover_ok,
        eta_est=float(eta),
        eta_ok=bool(eta_ok),
        min_length=float(lengths.min()),
        problems=problems,
    )


def max_steps_bound(arc, r, mu):
    """Upper bound on the number of case-II steps (each advances by ``2 pi (1-mu)(1-r)``)."""
    return math.ceil(arc.width / (TWO_PI * (1.0 - mu) * (1.0 - r)))
