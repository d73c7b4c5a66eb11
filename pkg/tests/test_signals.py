import csv

import numpy as np
import pytest

from edgescope.errors import ConstantSignalError, InvalidInputError
from edgescope.numerics import rk4_step
from edgescope.signals import (
    affine_normalization,
    driver_trajectory,
    lorenz_field,
    lorenz_jacobian,
    lorenz_trajectory,
    map3d_step,
    map3d_trajectory,
    normalize_input,
)


@pytest.fixture(scope="module")
def lorenz():
    return lorenz_trajectory(10_000, seed=1)


def test_lorenz_field_at_ones():
    assert np.allclose(lorenz_field(np.ones(3)), [0.0, 26.0, 1.0 - 8.0 / 3.0])


def test_origin_is_equilibrium():
    x = np.zeros(3)
    for _ in range(100):
        x = rk4_step(lambda v, t: lorenz_field(v), x, 0.0, 0.02)
    assert np.all(x == 0.0)


def test_origin_start_has_constant_input():
    # the state never moves, so the input cannot be normalized
    with pytest.raises(ConstantSignalError):
        lorenz_trajectory(2000, transient=0, x0=np.zeros(3))


def test_lorenz_jacobian_finite_difference():
    x = np.array([1.3, -2.0, 20.0])
    h = 1e-6
    fd = np.column_stack([(lorenz_field(x + h * e) - lorenz_field(x - h * e)) / (2 * h) for e in np.eye(3)])
    assert np.allclose(lorenz_jacobian(x), fd, atol=1e-6)


def test_lorenz_matches_reference_rk4():
    tr = lorenz_trajectory(2000, transient=0, x0=np.array([1.0, 1.0, 1.0]))
    x = np.array([1.0, 1.0, 1.0])
    for _ in range(1500):
        x = rk4_step(lambda v, t: lorenz_field(v), x, 0.0, 0.02)
    assert np.allclose(tr.states[1500], x, rtol=0, atol=1e-9)


def test_lorenz_indices_and_target(lorenz):
    assert lorenz.input_index == 0 and lorenz.target_index == 2
    assert np.array_equal(lorenz.target, lorenz.states[:, 2])
    assert lorenz.dt == 0.02
    assert np.all(np.isfinite(lorenz.states))


def test_input_normalized(lorenz):
    assert abs(lorenz.input.mean()) < 1e-10
    assert abs(lorenz.input.std() - 1.0) < 1e-10
    recon = lorenz.input * lorenz.input_scale + lorenz.input_shift
    assert np.allclose(recon, lorenz.states[:, 0], atol=1e-9)


def test_deterministic():
    a = lorenz_trajectory(2000, seed=3)
    b = lorenz_trajectory(2000, seed=3)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.input, b.input)
    assert not np.array_equal(a.states, lorenz_trajectory(2000, seed=4).states)


def test_too_short():
    with pytest.raises(InvalidInputError):
        lorenz_trajectory(1999)
    with pytest.raises(InvalidInputError):
        map3d_trajectory(100)


def test_map3d_step_example():
    assert np.allclose(map3d_step(np.array([0.25, 0.5, 0.75])), [1.025, 0.25, 0.5])


def test_map3d_fixed_point():
    assert np.all(map3d_step(np.zeros(3)) == 0.0)


def test_map3d_second_component_in_unit_interval():
    tr = map3d_trajectory(10_000, transient=0, seed=2)
    x2 = tr.states[1:, 1]
    assert x2.min() >= 0.0 and x2.max() < 1.0
    assert tr.input_index == 0 and tr.target_index == 2 and tr.dt == 1.0


def test_normalize_input_small_example():
    out = normalize_input([1.0, 2.0, 3.0])
    assert np.allclose(out, [-np.sqrt(1.5), 0.0, np.sqrt(1.5)])


def test_normalize_idempotent(lorenz):
    assert np.allclose(normalize_input(lorenz.input), lorenz.input, atol=1e-12)


def test_normalize_constant_raises():
    with pytest.raises(ConstantSignalError):
        affine_normalization(np.ones(10))


def test_split_reuses_training_map(lorenz):
    train, test = lorenz.split(4000)
    assert len(train) == 4000 and len(test) == 6000
    assert abs(train.input.mean()) < 1e-10
    expect = (lorenz.states[4000:, 0] - train.input_shift) / train.input_scale
    assert np.array_equal(test.input, expect)
    assert np.array_equal(test.target, lorenz.target[4000:])


def test_split_bounds(lorenz):
    with pytest.raises(InvalidInputError):
        lorenz.split(0)


def test_csv_export(tmp_path):
    tr = map3d_trajectory(2000, seed=0)
    path = tr.to_csv(tmp_path / "d.csv")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x1", "x2", "x3", "s", "g"]
    assert len(rows) == 2001
    assert float(rows[2][3]) == tr.states[1, 2]


def test_driver_dispatch():
    assert driver_trajectory("map3d", 2000).name == "map3d"
    with pytest.raises(InvalidInputError):
        driver_trajectory("rossler", 2000)
