"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
under "acceptance criteria". Wall-clock limits are asserted inside the
recorded block.
"""

import json
import math

import numpy as np
import pytest

from hypersep.carleson import Arc, CarlesonSquare, coefficient_carleson_constant, discrete_carleson_constant
from hypersep.cli import main
from hypersep.decomposition import DecompositionConfig, IntermediateOracle, decompose, verify_certificate
from hypersep.exceptions import NotSplittable, OracleOffSegment
from hypersep.geometry import LEMMA1_SUP, geodesic_segment, lemma1_region_contains, mobius, rho
from hypersep.oscillation import AnalyticCoefficient, find_zeros, nehari_oracle, nehari_point, solve_series
from hypersep.partition import PartitionConfig, PartitionResult, partition_arc, verify_partition
from hypersep.separation import separation_constant, split_two_separated, uniform_separation_constant
from hypersep.synthetic import (
    explicit_lambda,
    random_automorphism,
    random_disc_points,
    random_partition_instance,
    random_reduced_set,
)

from oracles import brute_dyadic_carleson, coefficient_mass_polar

EPS = np.finfo(float).eps
RADIAL10 = [1 - 2.0 ** -n for n in range(1, 11)]
# below this |c|^2 an absolute residual of 1e-10 is representable in binary64
ORTHO_ABS_RANGE = 1e5


def ortho_residual(seg):
    c, r = seg.center, seg.radius
    return abs(abs(c) ** 2 - 1 - r * r), abs(c) ** 2


def depth_sum(pts):
    return float(sum(1 - abs(complex(re, im)) for re, im in pts))


def check_certificate_inequalities(cert, Q):
    """Recompute the certificate inequalities from its serialised form."""
    doc = cert.to_dict()
    gens = doc["generations"]
    ell = Q.ell
    tol = 1e-12
    assert depth_sum(gens[0]["S"]) <= 4 * ell + tol
    for prev, cur in zip(gens, gens[1:]):
        assert depth_sum(cur["S"]) <= 0.5 * depth_sum(prev["M"]) + tol
    for g in gens:
        assert depth_sum(g["M"]) <= 6 * depth_sum(g["Lambda"]) + tol
    total = sum(1 - abs(z) for z in cert.points)
    assert total <= 4 * ell + 9 * depth_sum(doc["lambda_Q"]) + tol
    lam = cert.lambda_Q
    rep = verify_certificate(cert, Q)
    assert rep.ok, rep.failed
    if len(lam) >= 3:
        A, B = split_two_separated(lam, rep.split_delta)
        assert sorted(A + B) == list(range(len(lam)))
    else:
        # one or two points always split into separated singletons
        assert rep.checks["lambda_two_separated"]["ok"]
    return rep


def test_criterion_1_lemma1_scan(criterion, capsys):
    with criterion.check("1 depth-ratio scan", limit_s=1.0) as info:
        code = main(["lemma1-scan", "--lmin", "1e-6", "--lmax", "0.4999", "--steps", "4096"])
        out = json.loads(capsys.readouterr().out)["outputs"]
        assert code == 0
        assert out["all_below_bound"] and out["max_ratio"] <= LEMMA1_SUP
        assert LEMMA1_SUP - out["max_ratio"] <= 1e-3
        assert out["argmax_ell"] == pytest.approx(1e-6)
        info["detail"] = f"max {out['max_ratio']:.9f} at l={out['argmax_ell']:.1e}, bound {LEMMA1_SUP:.9f}"


def test_criterion_2_geodesic_invariants(criterion):
    rng = np.random.default_rng(2024)
    with criterion.check("2 geodesic invariants", limit_s=5.0) as info:
        z, w = random_disc_points(rng, 10_000), random_disc_points(rng, 10_000)
        worst_abs, floor_cases, worst_rel_floor = 0.0, 0, 0.0
        worst_mob = 0.0
        for a, b in zip(z, w):
            seg = geodesic_segment(a, b)
            if seg.center is not None:
                res, c2 = ortho_residual(seg)
                if c2 <= ORTHO_ABS_RANGE:
                    worst_abs = max(worst_abs, res)
                else:
                    floor_cases += 1
                    worst_rel_floor = max(worst_rel_floor, res / (EPS * c2))
            m, th = random_automorphism(rng)
            worst_mob = max(worst_mob, abs(rho(mobius(a, m, th), mobius(b, m, th)) - rho(a, b)))
        assert worst_abs <= 1e-10
        # huge carriers: within a few ulps of |c|^2, the representability floor
        assert worst_rel_floor <= 8
        assert worst_mob <= 1e-10

        violations = 0
        for _ in range(10_000):
            ell = rng.uniform(1e-4, 0.4999)
            arc = Arc.centered(rng.uniform(0, 2 * math.pi), ell)
            r = rng.uniform(1 - ell, 1, 2)
            t = rng.uniform(arc.a, arc.b, 2)
            z1, z2 = r * np.exp(1j * t)
            if z1 == z2:
                continue
            p = geodesic_segment(z1, z2).point_at(rng.uniform())
            violations += not lemma1_region_contains(arc, p)
        assert violations == 0
        info["detail"] = (f"ortho {worst_abs:.1e} ({floor_cases} carriers at the float floor), "
                          f"mobius {worst_mob:.1e}, confinement violations 0")


@pytest.mark.xfail(strict=True, reason="absolute 1e-10 is below binary64 resolution once |c| is in the thousands")
def test_criterion_2_literal_absolute_residual_on_all_carriers():
    rng = np.random.default_rng(2024)
    z, w = random_disc_points(rng, 10_000), random_disc_points(rng, 10_000)
    worst = max(ortho_residual(s)[0] for s in map(geodesic_segment, z, w) if s.center is not None)
    assert worst <= 1e-10


def test_criterion_3_partition(criterion):
    rng = np.random.default_rng(3)
    with criterion.check("3 arc partition", limit_s=60.0) as info:
        min_eta = math.inf
        for _ in range(500):
            arc, xi, r = random_partition_instance(rng)
            K = len(xi)
            assert K <= 20 and arc.length < 1 / 8
            res = partition_arc(arc, xi, r, PartitionConfig(epsilon=0.3))
            assert res.N <= 8 * K + 8
            rep = verify_partition(arc, res, xi, r)
            assert rep.cover_ok
            assert rep.min_length_ok and rep.min_length >= (1 - r) / 64
            assert rep.eta_est > 0
            min_eta = min(min_eta, rep.eta_est)
        info["detail"] = f"500 instances, min eta_est {min_eta:.3g}"


def test_criterion_4_certificates(criterion):
    rng = np.random.default_rng(4)
    with criterion.check("4 decomposition certificates", limit_s=120.0) as info:
        A = AnalyticCoefficient.const(100)
        zeros = find_zeros(solve_series(A, 0, 10), 0.99)
        n_sin = 0
        for centre in (0.0, math.pi):
            Q = CarlesonSquare(Arc.centered(centre, 0.1))
            cert = decompose(Q, zeros, nehari_oracle(A))
            assert len(cert.points) == 1
            check_certificate_inequalities(cert, Q)
            n_sin += 1
        for _ in range(100):
            Q, pts = random_reduced_set(rng)
            cert = decompose(Q, pts, IntermediateOracle.from_points(explicit_lambda(rng, pts)))
            check_certificate_inequalities(cert, Q)
        info["detail"] = f"{n_sin} zero-set squares + 100 synthetic sets verified"


def test_criterion_5_ode(criterion):
    rng = np.random.default_rng(5)
    with criterion.check("5 ODE zeros", limit_s=10.0) as info:
        A = AnalyticCoefficient.const(100)
        sol = solve_series(A, 0, 10, R=0.99)
        zeros = find_zeros(sol, 0.99)
        assert len(zeros) == 7
        want = [k * math.pi / 10 for k in range(-3, 4)]
        err = max(min(abs(z - k) for z in zeros) for k in want)
        assert err <= 1e-9
        pts = 0.99 * np.sqrt(rng.uniform(0, 1, 100)) * np.exp(1j * rng.uniform(0, 2 * math.pi, 100))
        res = float(np.max(np.abs(sol.residual(pts))))
        assert res <= 1e-10
        real = sorted(z.real for z in zeros)
        for a, b in zip(real, real[1:]):
            xi = nehari_point(A, a, b)
            assert (1 - abs(xi) ** 2) ** 2 * 100 > 1
        info["detail"] = f"zero error {err:.1e}, residual {res:.1e}, 6 Nehari points"


def brute_product(pts):
    """Plain O(n^2) product of distances, no logarithms."""
    best = math.inf
    for i, z in enumerate(pts):
        p = 1.0
        for j, w in enumerate(pts):
            if i != j:
                p *= abs(z - w) / abs(1 - z.conjugate() * w)
        best = min(best, p)
    return best


def test_criterion_6_separation(criterion):
    rng = np.random.default_rng(6)
    with criterion.check("6 separation arithmetic", limit_s=5.0) as info:
        worst = 0.0
        for _ in range(200):
            n = int(rng.integers(2, 51))
            pts = [complex(z) for z in random_disc_points(rng, n, 0.99)]
            want = brute_product(pts)
            got = uniform_separation_constant(pts).uniform_constant
            worst = max(worst, abs(got - want) / want)
        assert worst <= 1e-12
        # the closed form for the first pair; the infimum over all pairs is 1/(3 - 2^-9)
        assert rho(RADIAL10[0], RADIAL10[1]) == pytest.approx(1 / (3 - 2 ** -1), abs=1e-15)
        delta = separation_constant(RADIAL10).delta
        assert delta == pytest.approx(1 / (3 - 2 ** -9), abs=1e-15)
        info["detail"] = f"max relative error {worst:.1e}; radial delta {delta!r} (literal 0.4 is xfail)"


@pytest.mark.xfail(strict=True, reason="rho(z_n, z_{n+1}) = 1/(3 - 2^-n) decreases, so the infimum is not the first pair")
def test_criterion_6_literal_radial_delta():
    assert separation_constant(RADIAL10).delta == 0.4


def test_criterion_7_carleson(criterion):
    with criterion.check("7 Carleson estimators", limit_s=30.0) as info:
        pts = [1 - 2.0 ** -n for n in range(1, 21)]
        brute = brute_dyadic_carleson(pts, 12)
        got = discrete_carleson_constant(pts, max_depth=12).constant
        assert abs(got - brute) <= 0.05 * brute
        est = coefficient_carleson_constant(AnalyticCoefficient.const(100), 1.0, quad_tol=1e-6)
        full = coefficient_mass_polar(100, 1, 0.0, 1.0, 2 * math.pi)
        assert full == pytest.approx(50 * math.pi)
        assert abs(est.constant - 50 * math.pi) <= 0.01 * 50 * math.pi
        info["detail"] = f"discrete {got:.6f} vs {brute:.6f}; coefficient {est.constant:.4f} vs 50pi"


def test_criterion_8_negative_controls(criterion):
    with criterion.check("8 negative controls") as info:
        # partition whose single square holds an obstacle
        arc = Arc(0.0, 2 * math.pi * 0.1)
        xi = np.array([0.9 * np.exp(1j * 0.3 * arc.width)])
        bad = PartitionResult(subarcs=[arc], breakpoints=[arc.a, arc.b], case_trace=[])
        rep = verify_partition(arc, bad, xi, 0.97)
        assert not rep.ok and rep.eta_est < 1e-6
        good = partition_arc(arc, xi, 0.97)
        gap = PartitionResult(subarcs=good.subarcs[:2] + good.subarcs[3:], breakpoints=good.breakpoints,
                              case_trace=[])
        assert not verify_partition(arc, gap, xi, 0.97).cover_ok

        off = IntermediateOracle(lambda a, b: 0.5 * (a + b) + 0.05)
        Q = CarlesonSquare(Arc.centered(0.05, 0.12))
        with pytest.raises(OracleOffSegment):
            decompose(Q, [0.9, 0.9 * np.exp(0.1j)], off, DecompositionConfig(enforce_reductions=False))

        rng = np.random.default_rng(8)
        for _ in range(50):
            Q, pts = random_reduced_set(rng)
            cert = decompose(Q, pts, IntermediateOracle.midpoint())
            if len(cert.lambda_Q) >= 3:
                break
        lam = cert.lambda_Q
        # a target above every pairwise distance makes the conflict graph complete
        target = 0.5 * (1 + max(rho(a, b) for i, a in enumerate(lam) for b in lam[i + 1 :]))
        with pytest.raises(NotSplittable) as exc:
            split_two_separated(lam, target)
        assert len(exc.value.cycle) % 2 == 1
        entry = verify_certificate(cert, Q, split_target=target).checks["lambda_two_separated"]
        assert not entry["ok"] and entry["error"] == "NotSplittable"

        rec = next(r for gen in cert.generations for r in gen if r.lam)
        rec.lam[0] = rec.lam[0] * np.exp(2.5j)
        assert "lambda_in_4Q" in verify_certificate(cert, Q).failed
        info["detail"] = "broken partitions flagged; OracleOffSegment, NotSplittable and 4Q containment raised"
