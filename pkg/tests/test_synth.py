import numpy as np
import pytest

from svwb import balance, synth
from svwb.errors import ConfigError
from svwb.synth import IlluminantField

WARM = (1.15, 1.0, 0.75)
COOL = (0.8, 1.0, 1.25)


def test_uniform_field_constant():
    f = IlluminantField("uniform", (WARM,))
    g = synth.field_gain_image(f, 7, 5)
    assert np.array_equal(g, np.broadcast_to(WARM, (5, 7, 3)))


@pytest.mark.parametrize("blend", ["harmonic", "linear"])
def test_two_source_at_source_is_exact(blend):
    f = IlluminantField("two-source-blend", (WARM, COOL), coords=((10, 10), (90, 50)), blend=blend)
    assert synth.field_gain(f, (10, 10)).tolist() == list(WARM)
    assert synth.field_gain(f, (90, 50)).tolist() == list(COOL)


def test_two_source_midpoint():
    linear = IlluminantField("two-source-blend", (WARM, COOL), coords=((0, 0), (10, 0)), blend="linear")
    assert np.allclose(synth.field_gain(linear, (5, 3)), (np.array(WARM) + COOL) / 2, atol=1e-15)
    harmonic = IlluminantField("two-source-blend", (WARM, COOL), coords=((0, 0), (10, 0)))
    expected = 2 / (1 / np.array(WARM) + 1 / np.array(COOL))
    assert np.allclose(synth.field_gain(harmonic, (5, -3)), expected, atol=1e-15)


def test_linear_gradient_clamps():
    f = IlluminantField("linear-gradient", (WARM, COOL), start=(0, 0), end=(10, 0))
    assert np.allclose(synth.field_gain(f, (-5, 2)), WARM)
    assert np.allclose(synth.field_gain(f, (25, 2)), COOL)
    assert np.allclose(synth.field_gain(f, (2.5, 7)), 0.75 * np.array(WARM) + 0.25 * np.array(COOL))


def test_field_validation():
    with pytest.raises(ConfigError):
        IlluminantField("uniform", ((1.0, 0.0, 1.0),))
    with pytest.raises(ConfigError):
        IlluminantField("spotlight", (WARM,))
    with pytest.raises(ConfigError):
        IlluminantField("two-source-blend", (WARM, COOL), coords=((0, 0),))
    with pytest.raises(ConfigError):
        IlluminantField("linear-gradient", (WARM, COOL), start=(1, 1), end=(1, 1))


def test_default_chart_geometry():
    chart = synth.default_chart(512)
    layout = chart.layout
    assert len(layout.patches) == 26
    assert sum(p.is_black for p in layout.patches) == 1
    assert chart.patch("white-card-tr").roi.center == (464.0, 48.0)
    assert chart.patch("white-card-bl").roi.center == (48.0, 464.0)
    with pytest.raises(ConfigError):
        synth.default_chart(100)


def test_identity_field_is_bit_identical():
    chart = synth.default_chart(64)
    scene = synth.render_scene(chart, IlluminantField("uniform", ((1.0, 1.0, 1.0),)))
    assert np.array_equal(scene.observed, scene.ground_truth)


def test_uniform_gain_scales_x_only():
    chart = synth.default_chart(64)
    scene = synth.render_scene(chart, IlluminantField("uniform", ((2.0, 1.0, 1.0),)))
    assert np.array_equal(scene.observed[..., 0], 2 * scene.ground_truth[..., 0])
    assert np.array_equal(scene.observed[..., 1:], scene.ground_truth[..., 1:])


def test_observed_is_gain_times_truth_exactly():
    spec = synth.builtin_scene("nonuniform", size=128)
    scene = spec.render()
    gains = synth.field_gain_image(spec.field, 128, 128)
    assert np.array_equal(scene.observed, gains * scene.ground_truth)


def test_anchor_sources_equal_field_at_white_centers(mixed_scene_128):
    scene = mixed_scene_128
    for anchor in scene.true_anchors:
        gain = synth.field_gain(scene.field, anchor.coord)
        assert np.array_equal(anchor.source, gain * anchor.target)
    assert [a.coord for a in scene.true_anchors] == [(116.0, 12.0), (12.0, 116.0)]


def test_white_coords_must_be_in_white_patch():
    chart = synth.default_chart(128)
    with pytest.raises(ConfigError, match="white patch"):
        synth.render_scene(chart, IlluminantField("uniform", (WARM,)), [(64, 64)])


def test_oracle_recovery_xyz_scaling(mixed_scene_128):
    scene = mixed_scene_128
    out = balance.correct_image_svwb(scene.observed, "xyz-scaling", scene.true_anchors)
    assert np.abs(out - scene.ground_truth).max() <= 1e-9


def test_uniform_recovery_with_wb(single_scene_128):
    scene = single_scene_128
    a = scene.true_anchors[0]
    out = balance.correct_image_wb(scene.observed, "xyz-scaling", a.source, a.target)
    assert np.abs(out - scene.ground_truth).max() <= 1e-9


def test_scene_spec_round_trip():
    spec = synth.builtin_scene("mixed")
    assert synth.SceneSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ConfigError):
        synth.SceneSpec.from_dict({"size": 64})
    with pytest.raises(ConfigError):
        synth.builtin_scene("sunset")


def test_generation_is_deterministic():
    a = synth.builtin_scene("mixed", size=64).render()
    b = synth.builtin_scene("mixed", size=64).render()
    assert np.array_equal(a.observed, b.observed)
