import numpy as np
import pytest

from xcal.clock.noise import BoundedRandomWalk, WhiteNoise, make_noise


def test_white_noise_two_sigma_matches_configured_sigma():
    src = WhiteNoise(17.05, np.random.default_rng(7))
    xs = np.array([src.sample(0.0125) for _ in range(20_000)])
    assert 2 * xs.std(ddof=1) == pytest.approx(34.1, rel=0.05)
    assert abs(xs.mean()) < 1.0


def test_zero_sigma_is_silent():
    rng = np.random.default_rng(1)
    assert WhiteNoise(0.0, rng).sample(0.0125) == 0.0
    assert BoundedRandomWalk(0.0, 10.0, rng).sample(0.0125) == 0.0


def test_random_walk_is_bounded_and_slow():
    src = BoundedRandomWalk(17.05, 10.0, np.random.default_rng(3))
    xs = np.array([src.sample(0.0125) for _ in range(200_000)])
    assert xs.std() == pytest.approx(17.05, rel=0.25)
    lag1 = np.corrcoef(xs[:-1], xs[1:])[0, 1]
    assert lag1 > 0.99
    # consecutive samples move far less than the white-noise spread
    assert np.abs(np.diff(xs)).mean() < 2.0


def test_make_noise_selects_model():
    rng = np.random.default_rng(0)
    assert isinstance(make_noise("white", 1.0, rng), WhiteNoise)
    assert isinstance(make_noise("random_walk", 1.0, rng, tau_s=5.0), BoundedRandomWalk)
    with pytest.raises(ValueError):
        make_noise("pink", 1.0, rng)  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        BoundedRandomWalk(1.0, 0.0, rng)
