import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersep.exceptions import DomainError, DuplicatePoints, EmptyInput, NotSplittable
from hypersep.geometry import mobius, rho
from hypersep.separation import (
    best_split_delta,
    separation_constant,
    split_two_separated,
    uniform_separation_constant,
)

from oracles import brute_uniform_product

RADIAL = [1 - 2.0 ** -n for n in range(1, 11)]


def point_sets(max_size=12):
    pt = st.tuples(st.floats(0.0, 0.98), st.floats(0.0, 2 * math.pi)).map(
        lambda p: p[0] * complex(math.cos(p[1]), math.sin(p[1]))
    )
    return st.lists(pt, min_size=2, max_size=max_size).filter(
        lambda ps: min(rho(a, b) for i, a in enumerate(ps) for b in ps[i + 1 :]) > 1e-6
    )


class TestSeparationConstant:
    def test_pair(self):
        assert separation_constant([0, 0.5]).delta == pytest.approx(0.5)

    def test_radial_closed_form(self):
        # rho(z_n, z_{n+1}) = 1 / (3 - 2^-n) decreases in n, so the last pair is closest
        rep = separation_constant(RADIAL)
        assert rep.delta == pytest.approx(1 / (3 - 2 ** -9), abs=1e-15)
        assert rep.witness_pair == (8, 9)
        assert separation_constant(RADIAL[:2]).delta == pytest.approx(0.4, abs=1e-15)

    def test_three_points(self):
        rep = separation_constant([0, 0.5, -0.5])
        assert rep.delta == pytest.approx(0.5)
        assert 0 in rep.witness_pair

    def test_duplicates(self):
        with pytest.raises(DuplicatePoints) as info:
            separation_constant([0.1, 0.3j, 0.1])
        assert info.value.pair == (0, 2)

    def test_needs_two(self):
        with pytest.raises(EmptyInput):
            separation_constant([0.2])


class TestUniformSeparation:
    def test_single_point(self):
        assert uniform_separation_constant([0.3]).uniform_constant == 1.0

    def test_pair(self):
        assert uniform_separation_constant([0, 0.5]).uniform_constant == pytest.approx(0.5)

    def test_radial_brute_force(self):
        pts = RADIAL[:5]
        want = brute_uniform_product(pts)
        assert want == pytest.approx(0.051890138846660584, rel=1e-14)
        rep = uniform_separation_constant(pts)
        assert rep.uniform_constant == pytest.approx(want, rel=1e-12)
        assert rep.uniform_constant < separation_constant(pts).delta

    def test_long_products(self):
        # a few hundred factors below 1: the product is far below 1e-100 but still resolved
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 0.9, 300) * np.exp(1j * rng.uniform(0, 2 * math.pi, 300))
        rep = uniform_separation_constant(pts)
        want = brute_uniform_product(list(pts))
        assert want < 1e-100
        assert rep.uniform_constant == pytest.approx(want, rel=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(point_sets())
    def test_below_delta(self, pts):
        rep = uniform_separation_constant(pts)
        assert rep.uniform_constant <= rep.delta * (1 + 1e-12)

    @settings(max_examples=60, deadline=None)
    @given(point_sets(), st.tuples(st.floats(0, 0.9), st.floats(0, 2 * math.pi)), st.floats(0, 2 * math.pi))
    def test_automorphism_invariance(self, pts, a_polar, theta):
        a = a_polar[0] * complex(math.cos(a_polar[1]), math.sin(a_polar[1]))
        img = mobius(np.array(pts), a, theta)
        if np.max(np.abs(img)) >= 1 - 1e-9:
            return
        before, after = uniform_separation_constant(pts), uniform_separation_constant(img)
        assert after.delta == pytest.approx(before.delta, abs=1e-9)
        assert after.uniform_constant == pytest.approx(before.uniform_constant, abs=1e-9)


class TestSplit:
    def test_separated_goes_to_first(self):
        A, B = split_two_separated([0, 0.5, -0.5j], 0.3)
        assert A == [0, 1, 2] and B == []

    def test_close_pair_split(self):
        pts = [0.5, 0.52, -0.5, 0.5j]
        A, B = split_two_separated(pts, 0.1)
        assert (0 in A) != (0 in B)
        assert (0 in A) != (1 in A)
        for S in (A, B):
            for i in S:
                for j in S:
                    if i < j:
                        assert rho(pts[i], pts[j]) > 0.1

    def test_triangle(self):
        with pytest.raises(NotSplittable) as info:
            split_two_separated([0.5, 0.51, 0.505 + 0.005j], 0.1)
        assert sorted(info.value.cycle[:3]) == [0, 1, 2]
        assert len(info.value.cycle) == 3

    def test_bad_threshold(self):
        with pytest.raises(DomainError):
            split_two_separated([0.1], 1.0)

    def test_best_split_delta(self):
        pts = [0.5, 0.52, -0.5, 0.5j]
        d = best_split_delta(pts)
        split_two_separated(pts, d)
        assert best_split_delta([0.1, 0.2]) is None

    def test_pentagon_odd_cycle(self):
        pts = 0.9 * np.exp(2j * math.pi * np.arange(5) / 5)
        d = rho(pts[0], pts[1])
        with pytest.raises(NotSplittable) as info:
            split_two_separated(pts, d * 1.0001)
        assert len(info.value.cycle) % 2 == 1
