"""Generation-by-generation decomposition of a point set in a Carleson square.

Inside a square ``Q`` with ``l(Q) < 1/8`` the points are split into
*singles* (alone in their dyadic annulus) and *matched* groups (the lowest
annulus holding two or more of the remaining points). Consecutive matched
points, ordered by argument, are paired and an intermediate point on the
hyperbolic segment of each pair is requested from an oracle. The arc is
then re-partitioned around those intermediate points and the construction
repeats on every subarc holding leftover points.

The resulting :class:`DecompositionCertificate` records every generation;
:func:`verify_certificate` re-checks each inequality the construction is
supposed to satisfy, reporting the slack of each.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .carleson import TWO_PI, Arc, CarlesonSquare, contains, dyadic_annulus_index, scale
from .exceptions import (
    HypothesisViolation,
    NotSeparated,
    NotSplittable,
    OracleOffSegment,
    PartitionHypothesisViolation,
    ProjectionOverlap,
)
from .geometry import (
    distance_to_segment,
    distances_to_segment,
    geodesic_segment,
    radial_projection,
    rho,
)
from .partition import PartitionConfig, partition_arc
from .separation import best_split_delta, split_two_separated
from .validation import check_disc_points, points_to_pairs

logger = logging.getLogger(__name__)

N_BANDS = 7


# -- intermediate points --------------------------------------------------------


@dataclass
class IntermediateOracle:
    """Supplies a point on ``<z_j, z_k>`` for a pair of points.

    Every answer is checked: it must lie within ``on_segment_tol``
    (pseudo-hyperbolic distance) of the segment.
    """

    func: Callable
    on_segment_tol: float = 1e-8
    calls: int = 0

    def __call__(self, zj, zk):
        self.calls += 1
        xi = complex(self.func(zj, zk))
        seg = geodesic_segment(zj, zk)
        if not abs(xi) < 1.0:
            raise OracleOffSegment(f"oracle returned {xi} outside the disc", triple=(zj, zk, xi))
        d = distance_to_segment(xi, seg, tol=min(1e-10, 0.1 * self.on_segment_tol))
        if d > self.on_segment_tol:
            raise OracleOffSegment(
                f"oracle point {xi} is {d:.3e} away from <{zj}, {zk}>", triple=(zj, zk, xi), distance=d
            )
        return xi

    @classmethod
    def midpoint(cls, t=0.5, on_segment_tol=1e-8):
        """Oracle returning ``point_at(<z_j, z_k>, t)``."""
        return cls(lambda zj, zk: geodesic_segment(zj, zk).point_at(t), on_segment_tol)

    @classmethod
    def from_points(cls, lam, on_segment_tol=1e-8):
        """Oracle choosing, from an explicit finite set, the point nearest the segment."""
        lam = check_disc_points(lam, name="lambda")

        def pick(zj, zk):
            d = distances_to_segment(lam, geodesic_segment(zj, zk), tol=min(1e-10, 0.1 * on_segment_tol))
            return lam[int(np.argmin(d))]

        return cls(pick, on_segment_tol)


# -- reductions -----------------------------------------------------------------


def top_part_conflict(z, w):
    """Do ``z`` and ``w`` lie in the top part of one Carleson square?

    With ``d = 1 - |.|`` that needs some ``l`` in ``[max d, min(2 min d, 1)]``
    (the upper end open unless it equals 1) with angular gap at most
    ``2 pi l``.
    """
    dz, dw = 1.0 - abs(z), 1.0 - abs(w)
    lo, hi = min(dz, dw), max(dz, dw)
    if hi >= 2.0 * lo:
        return False
    gap = abs(float(np.angle(w / z))) if z != 0 and w != 0 else 0.0
    if 2.0 * lo > 1.0:
        return True
    return gap < TWO_PI * 2.0 * lo


@dataclass
class ReductionAssignment:
    """Label of every point and the annulus band ``m`` of each subsequence."""

    labels: np.ndarray
    band: dict

    @property
    def groups(self):
        return [np.flatnonzero(self.labels == g) for g in sorted(self.band)]

    def __len__(self):
        return len(self.band)


def reduce_sequence(points, delta):
    """Split a ``delta``-separated set into subsequences satisfying (A) and (B).

    (B): the dyadic annulus indices inside one subsequence agree modulo 7.
    (A): no top part of any Carleson square holds two of its points. Inside
    each band the conflict graph of (A) is coloured first-fit, visiting the
    points by increasing argument.
    """
    pts = check_disc_points(points)
    if pts.size >= 2:
        D = rho(pts[:, None], pts[None, :])
        np.fill_diagonal(D, np.inf)
        if np.min(D) <= delta:
            raise NotSeparated(f"min pairwise rho {np.min(D):.4g} <= delta = {delta}")
    k = np.atleast_1d(dyadic_annulus_index(pts))
    bands = k % N_BANDS
    labels = np.full(pts.size, -1, dtype=int)
    band_of = {}
    next_id = 0
    for m in range(N_BANDS):
        members = np.flatnonzero(bands == m)
        if members.size == 0:
            continue
        members = members[np.argsort(np.mod(np.angle(pts[members]), TWO_PI), kind="stable")]
        colour_sets = []
        for i in members:
            for c, chosen in enumerate(colour_sets):
                if not any(top_part_conflict(pts[i], pts[j]) for j in chosen):
                    chosen.append(i)
                    break
            else:
                colour_sets.append([i])
        for chosen in colour_sets:
            labels[chosen] = next_id
            band_of[next_id] = m
            next_id += 1
    return ReductionAssignment(labels=labels, band=band_of)


def check_reduced(points):
    """Raise :class:`HypothesisViolation` unless ``points`` satisfy (A) and (B)."""
    pts = check_disc_points(points, allow_empty=True)
    if pts.size == 0:
        return
    k = np.atleast_1d(dyadic_annulus_index(pts))
    if np.unique(k % N_BANDS).size > 1:
        raise HypothesisViolation("annulus indices differ modulo 7", hypothesis="B")
    for i in range(pts.size):
        for j in range(i + 1, pts.size):
            if top_part_conflict(pts[i], pts[j]):
                raise HypothesisViolation(f"points {i} and {j} share a top part", hypothesis="A")


# -- certificate ----------------------------------------------------------------


@dataclass
class ArcRecord:
    generation: int
    arc: Arc
    points: list
    singles: list = field(default_factory=list)
    matched: list = field(default_factory=list)
    k: int | None = None
    lam: list = field(default_factory=list)
    sources: list = field(default_factory=list)
    partition: dict | None = None

    def to_dict(self):
        return {
            "arc": [self.arc.a, self.arc.b],
            "k": self.k,
            "points": points_to_pairs(self.points),
            "singles": points_to_pairs(self.singles),
            "matched": points_to_pairs(self.matched),
            "lambda": points_to_pairs(self.lam),
            "sources": [points_to_pairs(pair) for pair in self.sources],
            "partition": self.partition,
        }


@dataclass
class DecompositionCertificate:
    square: CarlesonSquare
    points: list
    generations: list
    bounds: dict = field(default_factory=dict)

    @property
    def singles(self):
        return [[z for rec in gen for z in rec.singles] for gen in self.generations]

    @property
    def matched(self):
        return [[z for rec in gen for z in rec.matched] for gen in self.generations]

    @property
    def lambdas(self):
        return [[x for rec in gen for x in rec.lam] for gen in self.generations]

    @property
    def lambda_Q(self):
        return [x for gen in self.lambdas for x in gen]

    def to_dict(self):
        return {
            "square": self.square.to_dict(),
            "points": points_to_pairs(self.points),
            "generations": [
                {
                    "j": j + 1,
                    "arcs": [rec.to_dict() for rec in gen],
                    "S": points_to_pairs(self.singles[j]),
                    "M": points_to_pairs(self.matched[j]),
                    "Lambda": points_to_pairs(self.lambdas[j]),
                }
                for j, gen in enumerate(self.generations)
            ],
            "lambda_Q": points_to_pairs(self.lambda_Q),
            "bounds": self.bounds,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class DecompositionConfig:
    """``enforce_reductions=False`` skips the (A)/(B) check on the input.

    The construction still runs; the verifier then decides whether the
    bounds survive.
    """

    bisect_tol: float = 1e-10
    default_epsilon: float = 0.5
    min_epsilon: float = 1e-6
    enforce_reductions: bool = True


def _measured_epsilon(lam, config):
    if len(lam) < 2:
        return config.default_epsilon
    z = np.asarray(lam, dtype=complex)
    D = rho(z[:, None], z[None, :])
    np.fill_diagonal(D, np.inf)
    return float(np.clip(0.999 * np.min(D), config.min_epsilon, 0.99))


def _process_arc(gen, arc, Z, kidx, oracle, config):
    """First-step construction on one arc; returns the record and child work items."""
    rec = ArcRecord(generation=gen, arc=arc, points=[complex(z) for z in Z])
    ks = [kidx[z] for z in Z]
    counts = {}
    for k in ks:
        counts[k] = counts.get(k, 0) + 1
    rec.singles = [z for z, k in zip(Z, ks) if counts[k] == 1]
    rest = [(z, k) for z, k in zip(Z, ks) if counts[k] > 1]
    if not rest:
        return rec, []
    k = min(k for _, k in rest)
    rec.k = int(k)
    matched = [z for z, kk in rest if kk == k]
    offsets = [float(arc.offset(np.angle(z))) for z in matched]
    order = np.argsort(offsets, kind="stable")
    matched = [matched[i] for i in order]
    offsets = sorted(offsets)
    if any(o2 <= o1 for o1, o2 in zip(offsets, offsets[1:])):
        raise HypothesisViolation("two matched points share an argument", hypothesis="A")
    rec.matched = matched
    for n in range(0, len(matched) - 1, 2):
        za, zb = matched[n], matched[n + 1]
        rec.lam.append(oracle(za, zb))
        rec.sources.append((za, zb))

    remaining = [z for z, kk in rest if kk != k]
    if not remaining:
        return rec, []
    r = 1.0 - 2.0 ** -k
    cfg = PartitionConfig(epsilon=_measured_epsilon(rec.lam, config), bisect_tol=config.bisect_tol)
    try:
        part = partition_arc(arc, rec.lam, r, cfg)
    except HypothesisViolation as exc:
        raise PartitionHypothesisViolation(f"partition of {arc}: {exc}", hypothesis=exc.hypothesis) from exc
    rec.partition = {"N": part.N, "case_trace": part.case_trace, "r": r, "mu": part.mu}

    buckets = [[] for _ in part.subarcs]
    for z in remaining:
        for i, sub in enumerate(part.subarcs):
            if contains(CarlesonSquare(sub), z):
                buckets[i].append(z)
                break
        else:
            raise PartitionHypothesisViolation(f"point {z} is not covered by the new subarcs")
    children = [(sub, pts) for sub, pts in zip(part.subarcs, buckets) if pts]
    return rec, children


def decompose(Q, points, oracle, config=None):
    """Run the decomposition of ``points`` inside ``Q``.

    ``points`` may include points outside ``Q``; only those inside are
    used. They must satisfy the reductions (A) and (B) (see
    :func:`reduce_sequence`).
    """
    config = config or DecompositionConfig()
    if not 0.0 < Q.ell < 1.0 / 8.0:
        raise HypothesisViolation(f"l(Q) = {Q.ell} is not in (0, 1/8)", hypothesis="square_size")
    pts = check_disc_points(points, allow_empty=True)
    inside = pts[contains(Q, pts)] if pts.size else pts
    if config.enforce_reductions:
        check_reduced(inside)
    kidx = {complex(z): int(dyadic_annulus_index(z)) for z in inside}

    generations = []
    frontier = [(Q.base, [complex(z) for z in inside])] if inside.size else []
    gen = 1
    while frontier:
        records, nxt = [], []
        for arc, Z in sorted(frontier, key=lambda item: item[0].a):
            rec, children = _process_arc(gen, arc, Z, kidx, oracle, config)
            records.append(rec)
            nxt.extend(children)
        generations.append(records)
        frontier = nxt
        gen += 1
    return DecompositionCertificate(square=Q, points=[complex(z) for z in inside], generations=generations)


# -- verification ---------------------------------------------------------------


def _dsum(zs):
    return float(sum(1.0 - abs(z) for z in zs))


def _check(lhs, rhs, tol=1e-12):
    slack = rhs - lhs
    return {"lhs": lhs, "rhs": rhs, "slack": slack, "ok": bool(slack >= -tol * max(1.0, abs(rhs)))}


@dataclass
class CertificateReport:
    checks: dict
    split_delta: float | None
    lambda_delta: float | None

    @property
    def ok(self):
        return all(c["ok"] for c in self.checks.values())

    @property
    def failed(self):
        return [name for name, c in self.checks.items() if not c["ok"]]

    def to_dict(self):
        return {
            "ok": self.ok,
            "failed": self.failed,
            "split_delta": self.split_delta,
            "lambda_delta": self.lambda_delta,
            "checks": self.checks,
        }


def verify_certificate(cert, Q=None, on_segment_tol=1e-8, split_target=None):
    """Re-check every inequality recorded by :func:`decompose`.

    The returned report lists, for each named check, both sides and the
    slack; the same dictionary is stored on ``cert.bounds``. With
    ``split_target`` the two-subsequence split of ``Lambda_Q`` is attempted
    at that threshold and an odd conflict cycle is reported as a failure.
    """
    Q = Q or cert.square
    ell = Q.ell
    checks = {}
    S, M, L = cert.singles, cert.matched, cert.lambdas

    checks["singles_first_generation"] = _check(_dsum(S[0]) if S else 0.0, 4.0 * ell)
    for j in range(1, len(S)):
        checks[f"singles_halving_{j + 1}"] = _check(_dsum(S[j]), 0.5 * _dsum(M[j - 1]))
    for j in range(len(M)):
        checks[f"matched_vs_lambda_{j + 1}"] = _check(_dsum(M[j]), 6.0 * _dsum(L[j]))

    lower_ok, discipline_ok, on_seg_ok = True, True, True
    worst_seg = 0.0
    for gen in cert.generations:
        for rec in gen:
            if not rec.matched:
                continue
            ks = {int(dyadic_annulus_index(z)) for z in rec.matched}
            discipline_ok &= ks == {rec.k}
            floor_sum = 2.0 ** -rec.k * (len(rec.matched) // 2)
            lower_ok &= _dsum(rec.lam) >= floor_sum * (1 - 1e-12)
            lower_ok &= floor_sum >= _dsum(rec.matched) / 6.0 * (1 - 1e-12)
            for xi, (za, zb) in zip(rec.lam, rec.sources):
                d = distance_to_segment(xi, geodesic_segment(za, zb), tol=1e-12)
                worst_seg = max(worst_seg, d)
    on_seg_ok = worst_seg <= on_segment_tol
    checks["lambda_lower_bound"] = {"ok": bool(lower_ok)}
    checks["annulus_discipline"] = {"ok": bool(discipline_ok)}
    checks["lambda_on_segments"] = {"max_distance": worst_seg, "ok": bool(on_seg_ok)}

    lam_Q = np.asarray(cert.lambda_Q, dtype=complex)
    big = scale(Q, 4.0)
    inside4 = bool(np.all(contains(big, lam_Q))) if lam_Q.size else True
    checks["lambda_in_4Q"] = {"ok": inside4}

    seen = [z for gen in cert.generations for rec in gen for z in rec.singles + rec.matched]
    expected = sorted(cert.points, key=lambda z: (z.real, z.imag))
    checks["points_partitioned"] = {"ok": sorted(seen, key=lambda z: (z.real, z.imag)) == expected}

    max_k = max((int(dyadic_annulus_index(z)) for z in cert.points), default=0)
    checks["termination"] = {"generations": len(cert.generations), "max_annulus": max_k,
                             "ok": len(cert.generations) <= max(max_k, 0)}

    if lam_Q.size >= 2:
        D = rho(lam_Q[:, None], lam_Q[None, :])
        np.fill_diagonal(D, np.inf)
        lambda_delta = float(np.min(D))
    else:
        lambda_delta = None
    split_delta = best_split_delta(lam_Q) if lam_Q.size else None
    checks["lambda_two_separated"] = {
        "split_delta": split_delta,
        "ok": lam_Q.size < 3 or (split_delta is not None and split_delta > 0),
    }
    if split_target is not None:
        try:
            A, B = split_two_separated(lam_Q, split_target)
            checks["lambda_two_separated"].update(target=split_target, A=A, B=B)
        except NotSplittable as exc:
            checks["lambda_two_separated"].update(
                target=split_target, ok=False, error="NotSplittable", cycle=exc.cycle
            )

    total = _dsum(cert.points)
    checks["final_bound"] = _check(total, 4.0 * ell + 9.0 * _dsum(lam_Q))
    cert.bounds = {
        "s1_bound": checks["singles_first_generation"],
        "halving_ratios": [checks[k] for k in checks if k.startswith("singles_halving")],
        "m_factors": [checks[k] for k in checks if k.startswith("matched_vs_lambda")],
        "final_lhs": total,
        "final_rhs": 4.0 * ell + 9.0 * _dsum(lam_Q),
        "split_delta": split_delta,
    }
    return CertificateReport(checks=checks, split_delta=split_delta, lambda_delta=lambda_delta)


# -- segment geometry used by the argument ----------------------------------------


def _branch_interval(arc, ref):
    lo = float(np.angle(np.exp(1j * (arc.a - ref))))
    return lo, lo + arc.width


def triple_segment_separation(g1, g2, g3, samples=2000):
    """``min over sampled xi in g1 u g2 u g3`` of ``sum_i rho(xi, g_i)``.

    The radial projections must have pairwise disjoint interiors.
    """
    segs = (g1, g2, g3)
    arcs = [radial_projection(g) for g in segs]
    ref = arcs[0].center
    iv = [_branch_interval(a, ref) for a in arcs]
    for i in range(3):
        for j in range(i + 1, 3):
            if max(iv[i][0], iv[j][0]) < min(iv[i][1], iv[j][1]) - 1e-12:
                raise ProjectionOverlap(f"projections of segments {i + 1} and {j + 1} overlap")
    xs = np.concatenate([g.sample(samples) for g in segs])
    total = sum(distances_to_segment(xs, g, tol=1e-9) for g in segs)
    return float(np.min(total))


def projection_comparability(seg):
    """``max(|Pi(seg)| / h, h / |Pi(seg)|)`` with ``h = max_{xi in seg} (1 - |xi|)``."""
    length = radial_projection(seg).length
    h = 1.0 - seg.min_modulus()
    if length == 0.0:
        return math.inf
    return max(length / h, h / length)
