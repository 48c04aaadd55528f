import numpy as np
import pytest

from svwb import estimation, metrics, synth
from svwb.errors import BoundsError, ConfigError, DegenerateEstimateError
from svwb.estimation import RegionOfInterest


def test_region_mean_examples():
    img = np.zeros((3, 4, 3))
    img[1, 2] = [0.1, 0.2, 0.3]
    assert np.array_equal(estimation.region_mean(img, RegionOfInterest(2, 1, 1, 1)), [0.1, 0.2, 0.3])
    const = np.full((5, 5, 3), 0.25)
    assert np.allclose(estimation.region_mean(const, (0, 0, 5, 5)), 0.25, atol=0)
    pair = np.array([[[0.2] * 3, [0.4] * 3]])
    assert np.allclose(estimation.region_mean(pair, (0, 0, 2, 1)), 0.3, atol=1e-15)


def test_region_mean_permutation_invariant(rng):
    img = rng.uniform(0, 1, (6, 6, 3))
    roi = RegionOfInterest(1, 1, 4, 3)
    block = img[1:4, 1:5].reshape(-1, 3)
    shuffled = img.copy()
    shuffled[1:4, 1:5] = rng.permutation(block).reshape(3, 4, 3)
    assert np.allclose(estimation.region_mean(img, roi), estimation.region_mean(shuffled, roi), atol=1e-15)


def test_region_bounds():
    img = np.zeros((4, 4, 3))
    with pytest.raises(BoundsError):
        estimation.region_mean(img, (2, 2, 3, 1))
    with pytest.raises(BoundsError):
        estimation.region_mean(img, (-1, 0, 1, 1))
    with pytest.raises(ConfigError):
        RegionOfInterest(0, 0, 0, 1)


def test_roi_parse_and_center():
    roi = RegionOfInterest.parse("10,20,4,6")
    assert roi == RegionOfInterest(10, 20, 4, 6)
    assert roi.center == (12.0, 23.0)
    assert RegionOfInterest.parse({"x0": 1, "y0": 2, "width": 3, "height": 4}).as_list() == [1, 2, 3, 4]


def test_gray_world_examples():
    c = np.array([0.3, 0.6, 0.9])
    img = np.broadcast_to(c, (4, 4, 3))
    assert np.allclose(estimation.estimate_gray_world(img), c / 0.6, atol=1e-15)
    half = np.zeros((2, 2, 3))
    half[0] = [1, 0, 0]
    half[1] = [0, 1, 0]
    # raw mean (0.5, 0.5, 0), normalized to Y = 1
    assert np.allclose(estimation.estimate_gray_world(half), [1, 1, 0], atol=1e-15)


def test_estimators_reject_black():
    black = np.zeros((3, 3, 3))
    with pytest.raises(DegenerateEstimateError):
        estimation.estimate_gray_world(black)
    with pytest.raises(DegenerateEstimateError):
        estimation.estimate_max_rgb(black)


def test_max_rgb_examples():
    c = np.array([0.3, 0.6, 0.9])
    assert np.allclose(estimation.estimate_max_rgb(np.broadcast_to(c, (3, 3, 3))), c / 0.6, atol=1e-15)
    img = np.full((100, 100, 3), 0.1)
    img[40, 40] = [5.0, 4.0, 3.0]
    assert np.allclose(estimation.estimate_max_rgb(img, percentile=100), [1.25, 1.0, 0.75])
    # the default percentile ignores a single hot pixel
    assert np.allclose(estimation.estimate_max_rgb(img), [1.0, 1.0, 1.0], atol=1e-12)
    with pytest.raises(ConfigError):
        estimation.estimate_max_rgb(img, percentile=0)


def _uniform_scene(gain, size=128):
    field = synth.IlluminantField("uniform", (gain,))
    return synth.render_scene(synth.default_chart(size), field)


def test_gray_world_on_chart_within_5_degrees():
    gain = np.array([1.15, 1.0, 0.75])
    scene = _uniform_scene(gain)
    white = np.array(scene.layout.patches[18].xyz)
    est = estimation.estimate_gray_world(scene.observed)
    assert metrics.reproduction_error(est, gain * white) < 5.0


@pytest.mark.parametrize("percentile", [100, 99.9])
def test_max_rgb_finds_illuminant(percentile):
    gain = np.array([0.8, 1.0, 1.25])
    scene = _uniform_scene(gain, size=512)
    white = np.array(scene.layout.patches[18].xyz)
    est = estimation.estimate_max_rgb(scene.observed, percentile=percentile)
    expected = gain * white
    assert np.allclose(est, expected / expected[1], atol=1e-12)


@pytest.mark.parametrize("estimator", [estimation.estimate_gray_world, estimation.estimate_max_rgb])
def test_estimators_equivariant_and_scale_invariant(rng, estimator):
    img = rng.uniform(0.01, 1, (20, 20, 3))
    g = np.array([1.3, 0.9, 0.6])
    expected = g * estimator(img)
    assert np.allclose(estimator(img * g), expected / expected[1], rtol=0, atol=1e-9)
    assert np.allclose(estimator(3.7 * img), estimator(img), rtol=0, atol=1e-12)
