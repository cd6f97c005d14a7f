import numpy as np
import pytest

from mvcoreset.bench import (
    ExperimentConfig,
    adversarial_centers,
    empirical_error,
    gen_lower_bound,
    gen_synthetic,
    random_centers,
    run_lloyd_speedup,
    run_size_error_sweep,
)
from mvcoreset.core import InputError, WeightedCoreset, cost

NAN = float("nan")


# -- generators ---------------------------------------------------------


def test_synthetic_no_deletion_is_complete():
    ds = gen_synthetic(50, delete_frac=0.0, seed=0)
    assert ds.j == 0 and ds.n == 50 and ds.d == 3


def test_synthetic_single_point_never_fully_missing():
    ds = gen_synthetic(1, seed=0)
    assert ds.mask[0].any()


def test_synthetic_missing_fraction_concentrates():
    ds = gen_synthetic(10_000, seed=3)
    frac = float((~ds.mask).mean())
    assert 0.23 <= frac <= 0.27


def test_synthetic_far_points_are_far():
    ds = gen_synthetic(1000, seed=1)
    n_far = int(round(0.03 * 1000))
    near = ds.values[: 1000 - n_far]
    far = ds.values[1000 - n_far :]
    assert np.nanmax(near) <= 1.0
    assert np.nanmin(far) >= 10.0


def test_synthetic_validation_and_determinism():
    with pytest.raises(InputError):
        gen_synthetic(0)
    a, b = gen_synthetic(100, seed=7), gen_synthetic(100, seed=7)
    assert np.array_equal(a.values, b.values, equal_nan=True)


def test_lower_bound_j1():
    ds = gen_lower_bound(1)
    expect = np.array([[1.0, NAN], [NAN, 1.0]])
    assert np.array_equal(ds.values, expect, equal_nan=True)


def test_lower_bound_j2_shape_and_point():
    ds = gen_lower_bound(2)
    assert ds.n == 6 and ds.d == 4
    # the point available exactly on coordinates {0, 2}
    row = ds.values[1]
    assert np.array_equal(row, [1.0, NAN, 1.0, NAN], equal_nan=True)


def test_adversarial_centers_certify_error_one():
    ds = gen_lower_bound(2)
    missing_pid = 3
    keep = [i for i in range(ds.n) if i != missing_pid]
    coreset = WeightedCoreset(np.array(keep), np.ones(len(keep)), ds)
    centers = adversarial_centers(ds, missing_pid)
    assert centers.shape == (2, 4)
    assert cost(coreset, centers, 2) == 0.0
    assert cost(ds, centers, 2) >= 1.0
    assert empirical_error(ds, coreset, [centers], 2) == pytest.approx(1.0, abs=1e-9)


# -- empirical error ----------------------------------------------------


def test_empirical_error_zero_for_full_copy(rng):
    ds = gen_synthetic(80, seed=2)
    full = WeightedCoreset(np.arange(80), np.ones(80), ds)
    centers = random_centers(ds, 2, 20, seed=0)
    assert empirical_error(ds, full, centers, 2) == 0.0


def test_empirical_error_doubled_weights(rng):
    ds = gen_synthetic(80, seed=2)
    doubled = WeightedCoreset(np.arange(80), np.full(80, 2.0), ds)
    centers = random_centers(ds, 2, 5, seed=0)
    assert empirical_error(ds, doubled, centers, 2) >= 1.0


def test_empirical_error_rejects_zero_cost_centers():
    ds = gen_lower_bound(1)
    coreset = WeightedCoreset(np.array([0, 1]), np.ones(2), ds)
    all_ones = np.ones((1, 2))  # both points at distance 0
    with pytest.warns(UserWarning, match="zero"):
        with pytest.raises(InputError):
            empirical_error(ds, coreset, [all_ones], 2)


def test_random_centers_contract():
    ds = gen_synthetic(50, seed=4)
    assert random_centers(ds, 3, 0, seed=0) == []
    a = random_centers(ds, 3, 5, seed=1)
    b = random_centers(ds, 3, 5, seed=1)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    lo = np.nanmin(ds.values, axis=0)
    hi = np.nanmax(ds.values, axis=0)
    for centers in a:
        assert np.all(centers >= lo) and np.all(centers <= hi)


# -- sweeps --------------------------------------------------------------


def small_config(**kw):
    base = dict(
        k=2,
        sizes=(10, 20),
        trials=2,
        n_center_sets=15,
        family_size=None,
        seed=5,
        lloyd_iters=30,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(InputError):
        ExperimentConfig(sizes=(10, 10))
    with pytest.raises(InputError):
        ExperimentConfig(trials=0)


def test_size_error_sweep_shape_and_reproducibility():
    ds = gen_synthetic(120, seed=6)
    cfg = small_config()
    a = run_size_error_sweep(ds, cfg)
    assert len(a.rows) == len(cfg.methods) * len(cfg.sizes) * cfg.trials
    assert {r["method"] for r in a.rows} == set(cfg.methods)
    b = run_size_error_sweep(ds, cfg)
    assert a.rows == b.rows  # bit-exact under fixed seeds
    for entry in a.summary:
        assert entry["n"] == cfg.trials


def test_size_error_sweep_parallel_matches_serial():
    ds = gen_synthetic(80, seed=8)
    cfg = small_config(methods=("ours", "uniform"))
    serial = run_size_error_sweep(ds, cfg)
    parallel = run_size_error_sweep(ds, small_config(methods=("ours", "uniform"), threads=2))
    assert serial.rows == parallel.rows


def test_lloyd_speedup_rows():
    ds = gen_synthetic(300, seed=9)
    cfg = small_config(sizes=(30,), trials=1)
    res = run_lloyd_speedup(ds, cfg)
    assert len(res.rows) == 2  # ours + uniform at one size
    for row in res.rows:
        assert row["rel_error"] >= 0.0
        assert row["t_build"] > 0 and row["t_lloyd"] > 0
        assert row["reference_objective"] > 0
    again = run_lloyd_speedup(ds, cfg)
    deterministic = [
        {k: v for k, v in row.items() if not k.startswith("t_") and k != "speedup"}
        for row in res.rows
    ]
    deterministic2 = [
        {k: v for k, v in row.items() if not k.startswith("t_") and k != "speedup"}
        for row in again.rows
    ]
    assert deterministic == deterministic2
