"""Random instance generators used by the test-suite and the CLI.

All generators take a ``numpy.random.Generator`` so runs are reproducible.
"""

import math

import numpy as np

from .carleson import TWO_PI, Arc, CarlesonSquare
from .geometry import geodesic_segment, rho


def random_disc_points(rng, n, max_modulus=0.999):
    r = max_modulus * np.sqrt(rng.uniform(0.0, 1.0, n))
    return r * np.exp(1j * rng.uniform(0.0, TWO_PI, n))


def random_automorphism(rng):
    """Parameters ``(a, theta)`` of a random disc automorphism."""
    a = random_disc_points(rng, 1, 0.95)[0]
    return a, rng.uniform(0.0, TWO_PI)


def random_partition_instance(rng, epsilon=0.3, max_points=20):
    """Arc ``I`` with ``|I| < 1/8``, radius ``r`` and an ``epsilon``-separated set.

    The points are drawn near ``I`` with ``1 - 4|I| <= |xi| <= r`` so that
    they actually obstruct the partition.
    """
    ell = rng.uniform(0.005, 0.12)
    a = rng.uniform(0.0, TWO_PI)
    arc = Arc(a, a + TWO_PI * ell)
    r = 1.0 - rng.uniform(0.05, 1.0) * ell
    K = int(rng.integers(0, max_points + 1))
    xs = []
    for _ in range(200 * (K + 1)):
        if len(xs) >= K:
            break
        th = rng.uniform(arc.a - 0.5 * arc.width, arc.b + 0.5 * arc.width)
        z = rng.uniform(1.0 - 4.0 * ell, r) * np.exp(1j * th)
        if all(rho(z, w) > 1.05 * epsilon for w in xs):
            xs.append(z)
    return arc, np.array(xs, dtype=complex), r


def random_reduced_set(rng, levels=3, max_per_level=6):
    """A square ``Q`` (``l(Q) < 1/8``) and points obeying reductions (A) and (B).

    Points sit in the dyadic annuli ``k0, k0 + 7, k0 + 14, ...``; inside one
    annulus their angular gaps exceed ``4 pi`` times the largest ``1 - |z|``,
    so no top part holds two of them.
    """
    ell = rng.uniform(1.0 / 64.0, 1.0 / 8.0 - 1e-3)
    centre = rng.uniform(0.0, TWO_PI)
    Q = CarlesonSquare(Arc.centered(centre, ell))
    k0 = math.ceil(1.0 - math.log2(ell)) + int(rng.integers(2, 5))
    pts = []
    for j in range(levels):
        k = k0 + 7 * j
        want = int(rng.integers(1, max_per_level + 1))
        d = rng.uniform(2.0 ** -k, 2.0 ** -(k - 1), want)
        gap = 4.0 * math.pi * 2.0 ** -(k - 1) * 1.05
        width = Q.base.width
        # spread ``want`` angles with minimum gap, keeping away from the arc ends
        room = width - 2e-3 * width - gap * (want - 1)
        if room <= 0:
            want = max(1, int(width * 0.99 / gap))
            d = d[:want]
            room = width * 0.998 - gap * (want - 1)
        offs = np.sort(rng.uniform(0.0, room, want)) + gap * np.arange(want) + 1e-3 * width
        for dd, off in zip(d, offs):
            pts.append((1.0 - dd) * np.exp(1j * (Q.base.a + off)))
    return Q, np.array(pts, dtype=complex)


def explicit_lambda(rng, points):
    """One intermediate point on ``<z_j, z_k>`` for every pair, at a random parameter."""
    out = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            out.append(geodesic_segment(points[i], points[j]).point_at(rng.uniform(0.2, 0.8)))
    return np.array(out, dtype=complex)
