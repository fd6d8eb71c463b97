"""scikit-learn style front end for point-set diagnostics."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .carleson import contains, discrete_carleson_constant, dyadic_square
from .decomposition import IntermediateOracle, decompose, reduce_sequence, verify_certificate
from .separation import uniform_separation_constant
from .validation import check_disc_points


class UniformSeparationCertifier(BaseEstimator):
    """Measure separation of a finite disc sequence and certify its Carleson boxes.

    ``fit`` computes the separation constant, the uniform-separation
    constant and a discrete Carleson estimate, splits the sequence into
    subsequences obeying the top-part and annulus reductions, and builds a
    verified decomposition certificate for every dyadic square of depth
    ``min_depth..max_depth`` that holds at least two points of one
    subsequence. Intermediate points come from ``oracle`` (default: the
    hyperbolic midpoint of each pair).

    Parameters
    ----------
    max_depth : int
        Deepest dyadic level searched by the Carleson estimate and the
        certificate sweep.
    min_depth : int
        Shallowest certificate level; squares must satisfy ``l(Q) < 1/8``.
    oracle : IntermediateOracle or None
    """

    def __init__(self, max_depth=8, min_depth=4, oracle=None):
        self.max_depth = max_depth
        self.min_depth = min_depth
        self.oracle = oracle

    def fit(self, X, y=None):
        if self.min_depth < 4:
            raise ValueError("min_depth must be at least 4 so that l(Q) < 1/8")
        pts = check_disc_points(X)
        sep = uniform_separation_constant(pts)
        self.n_points_ = pts.size
        self.delta_ = sep.delta if pts.size > 1 else None
        self.uniform_constant_ = sep.uniform_constant
        self.carleson_estimate_ = discrete_carleson_constant(pts, max_depth=self.max_depth)
        self.certificates_ = []
        self.subsequences_ = []
        if pts.size < 2:
            return self
        assignment = reduce_sequence(pts, 0.5 * sep.delta)
        oracle = self.oracle if self.oracle is not None else IntermediateOracle.midpoint()
        for group in assignment.groups:
            self.subsequences_.append(group)
            gp = pts[group]
            for depth in range(self.min_depth, self.max_depth + 1):
                for idx in range(1 << depth):
                    Q = dyadic_square(depth, idx)
                    inside = gp[contains(Q, gp)]
                    if inside.size >= 2:
                        cert = decompose(Q, inside, oracle)
                        self.certificates_.append((cert, verify_certificate(cert, Q)))
        return self

    @property
    def certified_(self):
        check_is_fitted(self, "certificates_")
        return all(rep.ok for _, rep in self.certificates_)

    def score(self, X=None, y=None):
        """Uniform-separation constant of the fitted set (or of ``X`` when given)."""
        if X is not None:
            return uniform_separation_constant(check_disc_points(X)).uniform_constant
        check_is_fitted(self, "uniform_constant_")
        return self.uniform_constant_
