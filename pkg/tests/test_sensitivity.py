import math

import numpy as np
import pytest

from mvcoreset.core import ClusteringParams, Dataset, InputError
from mvcoreset.sensitivity import (
    alpha_factor,
    estimate_sensitivities,
    true_sensitivity_lower_bound,
)
from tests.conftest import make_missing_instance

NAN = float("nan")


def test_alpha_formula():
    params = ClusteringParams(k=3)
    assert alpha_factor(params, d=4, n=60) == pytest.approx(
        3 * math.sqrt(4 * math.log(62))
    )


def test_single_round_when_everything_fits():
    # complete data, n <= k+1: one peel, every score is c_sigma * alpha^z
    ds = Dataset(np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]]))
    params = ClusteringParams(k=3, z=2)
    scores = estimate_sensitivities(ds, params, seed=0)
    assert scores.peel_rounds == 1
    assert np.allclose(scores.sigma, scores.alpha**2)


def test_identical_points_equal_scores_round_one():
    ds = Dataset(np.array([[2.0, 2.0], [2.0, 2.0]]))
    scores = estimate_sensitivities(ds, ClusteringParams(k=1, z=2), seed=0)
    assert scores.peel_rounds == 1
    assert scores.sigma[0] == scores.sigma[1] == scores.alpha**2


def test_every_point_scored_exactly_once(rng):
    ds = make_missing_instance(rng, 80, 4, 2)
    scores = estimate_sensitivities(ds, ClusteringParams(k=2), seed=1)
    assert np.all(scores.sigma > 0)
    assert scores.sigma.shape == (80,)


def test_scores_monotone_in_round():
    rng = np.random.default_rng(3)
    ds = make_missing_instance(rng, 70, 3, 1)
    params = ClusteringParams(k=1, z=2)
    scores = estimate_sensitivities(ds, params, seed=2)
    base = scores.alpha**2
    expected = {base / i for i in range(1, scores.peel_rounds + 1)}
    got = set(np.unique(scores.sigma))
    assert got <= expected
    assert max(got) == base  # round 1 always removes something


def test_sum_bound_line_instance():
    # n=50 on a line, k=2, z=2
    ds = Dataset(np.arange(50.0)[:, None])
    params = ClusteringParams(k=2, z=2)
    scores = estimate_sensitivities(ds, params, seed=5)
    T = scores.max_round_removal
    n = ds.n
    bound = scores.alpha**2 * T * (1 + math.log(n / T + 1))
    assert scores.sum_sigma <= bound


def test_sum_bound_random_instances(rng):
    for _ in range(10):
        n = int(rng.integers(10, 80))
        ds = make_missing_instance(rng, n, 4, 2)
        params = ClusteringParams(k=int(rng.integers(1, 4)), z=float(rng.integers(1, 3)))
        scores = estimate_sensitivities(ds, params, seed=int(rng.integers(2**32)))
        T = scores.max_round_removal
        bound = scores.alpha**params.z * T * (1 + math.log(n / T + 1))
        assert scores.sum_sigma <= bound + 1e-9


def test_overestimates_random_center_lower_bound(rng):
    # the falsifiable proxy for sigma >= sigma*: zero violations expected
    for trial in range(10):
        n = int(rng.integers(10, 40))
        d = int(rng.integers(2, 5))
        k = int(rng.integers(1, 4))
        z = float(rng.integers(1, 3))
        ds = make_missing_instance(rng, n, d, min(2, d - 1), scale=3.0)
        params = ClusteringParams(k=k, z=z)
        scores = estimate_sensitivities(ds, params, seed=trial)
        lower = true_sensitivity_lower_bound(ds, params, trials=500, seed=trial)
        assert np.all(scores.sigma >= lower - 1e-12)


def test_lower_bound_single_point_is_one():
    ds = Dataset(np.array([[1.0, 2.0]]))
    params = ClusteringParams(k=1, z=2)
    assert true_sensitivity_lower_bound(ds, params, trials=50, seed=0, point=0) == 1.0


def test_lower_bound_symmetry():
    ds = Dataset(np.array([[-3.0], [3.0]]))
    params = ClusteringParams(k=1, z=2)
    bounds = true_sensitivity_lower_bound(ds, params, trials=4000, seed=1)
    assert abs(bounds[0] - bounds[1]) < 1e-9


def test_lower_bound_at_most_one(rng):
    ds = make_missing_instance(rng, 20, 3, 1)
    params = ClusteringParams(k=2, z=2)
    bounds = true_sensitivity_lower_bound(ds, params, trials=300, seed=2)
    assert np.all(bounds <= 1.0 + 1e-12)
    with pytest.raises(InputError):
        true_sensitivity_lower_bound(ds, params, trials=0)


def test_orphans_are_peeled_with_warning(rng):
    from mvcoreset.family import CoordinateFamily

    ds = make_missing_instance(rng, 30, 4, 2)
    params = ClusteringParams(k=1)
    tiny = CoordinateFamily(((0, 1),), d=4, j=ds.j, k=1)
    with pytest.warns(UserWarning, match="orphan"):
        scores = estimate_sensitivities(ds, params, family=tiny, seed=0)
    assert scores.orphan_count > 0
    assert np.all(scores.sigma > 0)


def test_deterministic_under_seed(rng):
    ds = make_missing_instance(rng, 50, 3, 1)
    params = ClusteringParams(k=2)
    a = estimate_sensitivities(ds, params, seed=11)
    b = estimate_sensitivities(ds, params, seed=11)
    assert np.array_equal(a.sigma, b.sigma)
