"""Mondrian scene generation, illuminant fields, rendering, and dataset
emission."""

import json
import os

import numpy as np
import pytest

import ccbench as cb
from ccbench.errors import InputDomainError
from ccbench.pngio import read_png16
from ccbench.synth import ALBEDO_FLOOR

E1 = cb.Illuminant(1.0, 0.7, 0.45)
E2 = cb.Illuminant(0.5, 0.65, 0.95)


def _cfg(**kw):
    base = dict(
        width=64, height=48, patch_count=30,
        albedo_distribution=cb.AlbedoDistribution.UNIFORM_RGB,
        illuminants=(E1,), seed=0,
    )
    base.update(kw)
    return cb.SynthConfig(**base)


# ----------------------------------------------------------- config checks

def test_config_validation():
    with pytest.raises(InputDomainError):
        _cfg(width=7)
    with pytest.raises(InputDomainError):
        _cfg(patch_count=0)
    with pytest.raises(InputDomainError):
        _cfg(illuminants=())
    with pytest.raises(InputDomainError):
        _cfg(illuminants=(E1, E2, E1))
    # blend must accompany exactly two illuminants
    with pytest.raises(InputDomainError):
        _cfg(blend=cb.Blend(cb.BlendAxis.X, 4.0))
    with pytest.raises(InputDomainError):
        _cfg(illuminants=(E1, E2))
    # noise ceiling is exclusive
    with pytest.raises(InputDomainError):
        _cfg(noise_sigma=0.1)
    with pytest.raises(InputDomainError):
        _cfg(noise_sigma=-0.01)
    _cfg(noise_sigma=0.099)


def test_blend_softness_validation():
    with pytest.raises(InputDomainError):
        cb.Blend(cb.BlendAxis.X, -1.0)
    with pytest.raises(InputDomainError):
        cb.Blend(cb.BlendAxis.X, float("inf"))


# ------------------------------------------------------------------ scenes

def test_scene_deterministic_in_seed():
    a = cb.generate_scene(_cfg(seed=9)).data
    b = cb.generate_scene(_cfg(seed=9)).data
    c = cb.generate_scene(_cfg(seed=10)).data
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_scene_albedo_range():
    scene = cb.generate_scene(_cfg(seed=1)).data
    assert scene.min() >= ALBEDO_FLOOR
    assert scene.max() <= 1.0


def test_scene_white_patch_survives_occlusion():
    # painted last, so at least one pure-white pixel must remain
    scene = cb.generate_scene(_cfg(seed=2, include_white_patch=True)).data
    assert np.all(scene == 1.0, axis=2).any()


def test_scene_without_white_patch_has_no_forced_white():
    scene = cb.generate_scene(_cfg(seed=2)).data
    assert not np.all(scene == 1.0, axis=2).any()


def test_achromatic_mean_balances_channels_exactly():
    for wp in (False, True):
        cfg = _cfg(
            seed=3,
            albedo_distribution=cb.AlbedoDistribution.ACHROMATIC_MEAN,
            include_white_patch=wp,
        )
        means = cb.generate_scene(cfg).data.mean(axis=(0, 1))
        assert np.ptp(means) < 1e-12


def test_grey_world_is_exact_on_achromatic_scene():
    cfg = _cfg(seed=4, albedo_distribution=cb.AlbedoDistribution.ACHROMATIC_MEAN)
    est = cb.estimate(cb.generate_scene(cfg), cb.GREY_WORLD)
    assert cb.angular_error(est, (1.0, 1.0, 1.0)) < 1e-9


# --------------------------------------------------------------- rendering

def test_single_illuminant_render_is_exact_product():
    cfg = _cfg(seed=5)
    sample = cb.make_sample(cfg)
    assert sample.gt_field is None
    assert sample.gt_illuminant is E1
    want = sample.canonical.data * E1.as_array()
    assert np.array_equal(sample.observed.data, want)


def test_render_recover_closes_the_loop():
    sample = cb.make_sample(_cfg(seed=6))
    got = cb.recover_illuminant(sample.observed, sample.canonical)
    assert cb.angular_error(got, E1.as_array()) < 1e-6


def test_hard_step_field_splits_at_midline():
    cfg = _cfg(illuminants=(E1, E2), blend=cb.Blend(cb.BlendAxis.X, 0.0))
    sample = cb.make_sample(cfg)
    field = sample.gt_field
    assert np.allclose(field[:, : cfg.width // 2], E1.as_array())
    assert np.allclose(field[:, cfg.width // 2 :], E2.as_array())


def test_hard_step_y_axis():
    cfg = _cfg(illuminants=(E1, E2), blend=cb.Blend(cb.BlendAxis.Y, 0.0))
    field = cb.make_sample(cfg).gt_field
    assert np.allclose(field[: cfg.height // 2, :], E1.as_array())
    assert np.allclose(field[cfg.height // 2 :, :], E2.as_array())


def test_logistic_field_is_monotone_convex_mix():
    cfg = _cfg(illuminants=(E1, E2), blend=cb.Blend(cb.BlendAxis.X, 6.0))
    field = cb.make_sample(cfg).gt_field
    # red falls from e1 to e2, blue rises; every pixel stays inside the span
    red = field[0, :, 0]
    assert np.all(np.diff(red) < 0.0)
    blue = field[0, :, 2]
    assert np.all(np.diff(blue) > 0.0)
    lo = np.minimum(E1.as_array(), E2.as_array())
    hi = np.maximum(E1.as_array(), E2.as_array())
    assert (field >= lo - 1e-12).all() and (field <= hi + 1e-12).all()
    # rows are identical: the ramp runs along x only
    assert np.array_equal(field[0], field[-1])


def test_two_illuminant_gt_is_field_mean():
    cfg = _cfg(illuminants=(E1, E2), blend=cb.Blend(cb.BlendAxis.X, 8.0))
    sample = cb.make_sample(cfg)
    want = sample.gt_field.mean(axis=(0, 1))
    assert np.allclose(sample.gt_illuminant.as_array(), want, atol=1e-12)


def test_two_illuminant_observed_uses_field_not_mean():
    cfg = _cfg(illuminants=(E1, E2), blend=cb.Blend(cb.BlendAxis.X, 0.0))
    sample = cb.make_sample(cfg)
    want = sample.canonical.data * sample.gt_field
    assert np.array_equal(sample.observed.data, want)


def test_noise_is_deterministic_and_clipped():
    cfg = _cfg(seed=7, noise_sigma=0.05)
    a = cb.make_sample(cfg)
    b = cb.make_sample(cfg)
    assert np.array_equal(a.observed.data, b.observed.data)
    assert a.observed.data.min() >= 0.0
    clean = cb.make_sample(_cfg(seed=7))
    assert not np.array_equal(a.observed.data, clean.observed.data)
    # the geometry stream is untouched by the noise stream
    assert np.array_equal(a.canonical.data, clean.canonical.data)


# ------------------------------------------------------------ emit_dataset

def test_emit_dataset_layout_and_roundtrip(tmp_path):
    out = tmp_path / "ds"
    cfg = _cfg(seed=8, noise_sigma=0.01)
    manifest = cb.emit_dataset(cfg, 6, out)
    assert manifest.ids() == tuple(f"s{i:04d}" for i in range(6))
    assert manifest.metadata == {"multi": False}
    for sub in ("images", "canonical", "masks"):
        assert (out / sub).is_dir()

    loaded = cb.load_manifest(out / "manifest.json")
    assert loaded.ids() == manifest.ids()
    for rec in loaded.samples:
        obs = cb.load_sample(rec)
        assert obs.data.shape == (48, 64, 3)
        canonical = read_png16(out / "canonical" / f"{rec.id}.png")
        got = cb.recover_illuminant(obs, canonical)
        # quantization plus mild noise; generous bound
        assert cb.angular_error(got, rec.gt_illuminant.as_array()) < 0.5


def test_emit_dataset_samples_do_not_depend_on_count(tmp_path):
    cfg = _cfg(seed=9)
    cb.emit_dataset(cfg, 2, tmp_path / "a")
    cb.emit_dataset(cfg, 5, tmp_path / "b")
    pa = (tmp_path / "a" / "images" / "s0001.png").read_bytes()
    pb = (tmp_path / "b" / "images" / "s0001.png").read_bytes()
    assert pa == pb


def test_emit_dataset_multi_flag(tmp_path):
    cfg = _cfg(illuminants=(E1, E2), blend=cb.Blend(cb.BlendAxis.Y, 4.0))
    manifest = cb.emit_dataset(cfg, 2, tmp_path / "m")
    assert manifest.metadata == {"multi": True}


def test_emit_dataset_rejects_zero_count(tmp_path):
    with pytest.raises(InputDomainError):
        cb.emit_dataset(_cfg(), 0, tmp_path / "z")


# ------------------------------------------------------------- config file

def _good_doc():
    return {
        "width": 32, "height": 24, "patch_count": 10,
        "albedo_distribution": "uniform_rgb",
        "illuminants": [[1.0, 0.8, 0.6]],
        "noise_sigma": 0.01, "seed": 3, "include_white_patch": True,
    }


def test_config_from_dict_round_trip():
    cfg = cb.synth_config_from_dict(_good_doc())
    assert cfg.width == 32 and cfg.height == 24
    assert cfg.albedo_distribution is cb.AlbedoDistribution.UNIFORM_RGB
    assert cfg.include_white_patch is True
    assert cfg.illuminants[0].b == pytest.approx(0.6)
    # integer zero for a float field is accepted
    doc = _good_doc()
    doc["noise_sigma"] = 0
    assert cb.synth_config_from_dict(doc).noise_sigma == 0.0


def test_config_from_dict_error_names_field():
    doc = _good_doc()
    del doc["width"]
    with pytest.raises(InputDomainError) as err:
        cb.synth_config_from_dict(doc)
    assert "width" in str(err.value)

    doc = _good_doc()
    doc["patch_count"] = True  # bool is not an integer here
    with pytest.raises(InputDomainError) as err:
        cb.synth_config_from_dict(doc)
    assert "patch_count" in str(err.value)

    doc = _good_doc()
    doc["gamma"] = 2.2
    with pytest.raises(InputDomainError) as err:
        cb.synth_config_from_dict(doc)
    assert "gamma" in str(err.value)

    doc = _good_doc()
    doc["albedo_distribution"] = "lambertian"
    with pytest.raises(InputDomainError):
        cb.synth_config_from_dict(doc)

    doc = _good_doc()
    doc["illuminants"] = []
    with pytest.raises(InputDomainError):
        cb.synth_config_from_dict(doc)


def test_config_from_dict_blend():
    doc = _good_doc()
    doc["illuminants"] = [[1.0, 0.7, 0.45], [0.5, 0.65, 0.95]]
    doc["blend"] = {"axis": "y", "softness": 3.5}
    cfg = cb.synth_config_from_dict(doc)
    assert cfg.blend.axis is cb.BlendAxis.Y
    assert cfg.blend.softness == 3.5

    doc["blend"] = {"axis": "diagonal", "softness": 1.0}
    with pytest.raises(InputDomainError):
        cb.synth_config_from_dict(doc)
    doc["blend"] = {"axis": "x", "slope": 1.0}
    with pytest.raises(InputDomainError):
        cb.synth_config_from_dict(doc)


def test_load_synth_config(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(_good_doc()))
    assert cb.load_synth_config(p).seed == 3
    p.write_text("[1, 2")
    with pytest.raises(InputDomainError):
        cb.load_synth_config(p)
