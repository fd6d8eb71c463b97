import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hypersep.estimators import UniformSeparationCertifier
from hypersep.separation import uniform_separation_constant
from hypersep.synthetic import random_reduced_set


def test_params_and_clone():
    est = UniformSeparationCertifier(max_depth=6)
    assert est.get_params() == {"max_depth": 6, "min_depth": 4, "oracle": None}
    twin = clone(est).set_params(min_depth=5)
    assert twin.min_depth == 5 and est.min_depth == 4


def test_fit_synthetic():
    _, pts = random_reduced_set(np.random.default_rng(1))
    est = UniformSeparationCertifier(max_depth=8).fit(pts)
    assert est.n_points_ == len(pts)
    assert est.certificates_
    assert est.certified_
    assert est.score() == pytest.approx(uniform_separation_constant(pts).uniform_constant)
    assert sorted(np.concatenate(est.subsequences_).tolist()) == list(range(len(pts)))


def test_single_point():
    est = UniformSeparationCertifier().fit([0.5j])
    assert est.delta_ is None and est.score() == 1.0 and est.certified_


def test_not_fitted():
    with pytest.raises(NotFittedError):
        UniformSeparationCertifier().score()


def test_score_on_new_data():
    est = UniformSeparationCertifier().fit([0.1, 0.5])
    assert est.score([0, 0.5]) == pytest.approx(0.5)


def test_min_depth_guard():
    with pytest.raises(ValueError):
        UniformSeparationCertifier(min_depth=2).fit([0.1, 0.5])
