import math

import numpy as np
import pytest

from hypersep.carleson import Arc, CarlesonSquare
from hypersep.exceptions import DomainError, HypothesisViolation, NoIntersection
from hypersep.partition import (
    PartitionConfig,
    PartitionResult,
    max_steps_bound,
    partition_arc,
    smallest_touching_endpoint,
    square_disc_intersects,
    verify_partition,
)
from hypersep.synthetic import random_partition_instance

# one obstacle that forces exactly one cut before the tail is clear
HAND_ARC = Arc(0.0, 2 * math.pi * 0.1)
HAND_R = 0.97
HAND_XI = np.array([0.9 * np.exp(1j * 0.3 * HAND_ARC.width)])


def monte_carlo_hit(sq, center, radius, n=1_000_000, seed=0):
    """Sample the disc and test membership of the samples in ``sq``."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    z = center + r * np.exp(1j * rng.uniform(0, 2 * math.pi, n))
    mod = np.abs(z)
    off = np.mod(np.angle(z) - sq.base.a, 2 * math.pi)
    return bool(np.any((mod >= sq.inner_radius) & (mod < 1) & (off <= sq.base.width)))


class TestSquareDisc:
    SQ = CarlesonSquare(Arc(0.2, 0.6))

    def test_center_inside(self):
        assert square_disc_intersects(self.SQ, 0.96 * np.exp(0.4j), 1e-3)

    def test_radially_below(self):
        assert not square_disc_intersects(self.SQ, 0.5 * np.exp(0.4j), 0.1)

    def test_bad_radius(self):
        with pytest.raises(DomainError):
            square_disc_intersects(self.SQ, 0.5, 0.0)

    @pytest.mark.parametrize(
        "center,radius",
        [
            (0.93 * np.exp(0.4j), 0.0135),  # inner arc
            (0.96 * np.exp(0.65j), 0.03),  # side edge
            (0.96 * np.exp(0.65j), 0.02),
            (0.9 * np.exp(0.1j), 0.04),  # corner region
            (0.9 * np.exp(0.1j), 0.06),
        ],
    )
    def test_agrees_with_sampling(self, center, radius):
        assert square_disc_intersects(self.SQ, center, radius) == monte_carlo_hit(self.SQ, center, radius)


class TestSmallestTouching:
    def test_against_linear_scan(self):
        a, b = 0.0, 0.5
        c, rad = np.array([0.95 * np.exp(0.3j)]), np.array([0.01])
        a1 = smallest_touching_endpoint(a, b, (c, rad))
        grid = np.linspace(a, b, 10_001)[1:]
        hits = [t for t in grid if square_disc_intersects(CarlesonSquare(Arc(a, t)), c[0], rad[0])]
        assert hits[0] - 0.5 / 10_000 <= a1 <= hits[0] + 1e-9

    def test_immediate(self):
        # the disc pokes through the unit circle at angle 0, so arbitrarily thin squares meet it
        c, rad = np.array([0.998 + 0j]), np.array([0.0025])
        a1 = smallest_touching_endpoint(0.0, 0.5, (c, rad), bisect_tol=1e-12)
        assert a1 < 1e-9

    def test_two_discs_take_minimum(self):
        c = np.array([0.95 * np.exp(0.3j), 0.97 * np.exp(0.2j)])
        rad = np.array([0.01, 0.005])
        both = smallest_touching_endpoint(0, 0.5, (c, rad))
        single = [smallest_touching_endpoint(0, 0.5, (c[i : i + 1], rad[i : i + 1])) for i in range(2)]
        assert both == pytest.approx(min(single), abs=1e-9)

    def test_no_intersection(self):
        with pytest.raises(NoIntersection):
            smallest_touching_endpoint(0, 0.5, (np.array([0.2]), np.array([0.01])))


class TestPartitionArc:
    def test_no_points(self):
        res = partition_arc(HAND_ARC, [], HAND_R)
        assert res.N == 4
        widths = [s.width for s in res.subarcs]
        assert widths == pytest.approx([HAND_ARC.width / 4] * 4)
        rep = verify_partition(HAND_ARC, res, [], HAND_R)
        assert rep.eta_est == 1.0 and rep.ok

    def test_hand_instance(self):
        res = partition_arc(HAND_ARC, HAND_XI, HAND_R)
        assert res.case_trace == ["II", "III"]
        assert res.N == 8
        rep = verify_partition(HAND_ARC, res, HAND_XI, HAND_R)
        assert rep.ok and rep.eta_est > 0

    def test_far_points_are_ignored(self):
        far = np.array([0.3 * np.exp(0.3j)])
        assert partition_arc(HAND_ARC, far, HAND_R).N == 4

    @pytest.mark.parametrize(
        "arc,xi,r,hyp",
        [
            (Arc(0, 1.0), [], 0.9, "arc_length"),
            (HAND_ARC, [], 0.5, "one_minus_r"),
            (HAND_ARC, [0.98], 0.97, "max_modulus"),
            (HAND_ARC, [0.95, 0.951], 0.97, "separation"),
        ],
    )
    def test_hypotheses(self, arc, xi, r, hyp):
        with pytest.raises(HypothesisViolation) as info:
            partition_arc(arc, np.array(xi, dtype=complex), r, PartitionConfig(epsilon=0.3))
        assert info.value.hypothesis == hyp

    def test_config_defaults(self):
        assert PartitionConfig(epsilon=0.3).mu == pytest.approx(0.075)
        assert PartitionConfig(epsilon=0.99).mu == pytest.approx(0.2475)
        with pytest.raises(DomainError):
            PartitionConfig(epsilon=1.0)

    def test_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            arc, xi, r = random_partition_instance(rng)
            cfg = PartitionConfig(epsilon=0.3)
            res = partition_arc(arc, xi, r, cfg)
            K = len(xi)
            assert res.N <= 8 * K + 8
            bp = res.breakpoints
            assert bp[0] == arc.a and bp[-1] == arc.b
            assert all(x < y for x, y in zip(bp, bp[1:]))
            # each case-II step advances by at least 2 pi (1 - mu)(1 - r)
            steps = res.case_trace.count("II")
            assert steps <= max_steps_bound(arc, r, cfg.mu)
            rep = verify_partition(arc, res, xi, r, samples=6)
            assert rep.cover_ok and rep.min_length_ok
            assert rep.min_length >= (1 - r) / 64
            assert rep.eta_est > 0


class TestNegativeControls:
    def _result(self, subarcs):
        return PartitionResult(subarcs=subarcs, breakpoints=[s.a for s in subarcs] + [subarcs[-1].b], case_trace=[])

    def test_unsplit_arc_has_no_margin(self):
        # the single square over I holds the obstacle, so segments run through it
        rep = verify_partition(HAND_ARC, self._result([HAND_ARC]), HAND_XI, HAND_R)
        assert rep.eta_est < 1e-6
        assert not rep.eta_ok and not rep.ok

    def test_gap_breaks_cover(self):
        res = partition_arc(HAND_ARC, HAND_XI, HAND_R)
        broken = self._result(res.subarcs[:3] + res.subarcs[4:])
        rep = verify_partition(HAND_ARC, broken, HAND_XI, HAND_R)
        assert not rep.cover_ok

    def test_tiny_piece_breaks_length(self):
        a, b = HAND_ARC.a, HAND_ARC.b
        tiny = 1e-6
        rep = verify_partition(HAND_ARC, self._result([Arc(a, a + tiny), Arc(a + tiny, b)]), [], HAND_R)
        assert not rep.min_length_ok
