"""Synthetic fixture generation tests."""

import json
import math

import numpy as np
import pytest

from wavereg import AffineParams, load_pgm
from wavereg.fixtures import (
    FixtureSpec,
    generate_pair,
    render_pattern,
    sidecar_dict,
    write_fixture,
)
from wavereg.transform import compose_matrix, params_from_dict


def test_identity_spec_gives_equal_pair():
    spec = FixtureSpec(size=64)
    fixed, moving, truth = generate_pair(spec)
    assert np.allclose(fixed, moving)
    assert truth == AffineParams()


def test_translation_matches_direct_shift():
    spec = FixtureSpec(size=64, truth=AffineParams(tx=8, ty=-5))
    fixed, moving, _ = generate_pair(spec)
    # positive tx shifts left, negative ty shifts down: moving[y, x]
    # samples fixed[y - 5, x + 8] where that stays in bounds
    interior = moving[6:64, 0:56]
    assert np.allclose(interior, fixed[1:59, 8:64])


def test_determinism_byte_identical(tmp_path):
    spec = FixtureSpec(
        base_pattern="noise_smoothed", size=64,
        truth=AffineParams(tx=3, ty=2, theta=0.05),
        remap="gamma", noise_sigma=0.02, seed=9,
    )
    d1, d2 = tmp_path / "a", tmp_path / "b"
    write_fixture(spec, d1)
    write_fixture(spec, d2)
    for name in ("fixed.pgm", "moving.pgm", "truth.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_patterns_render_in_range():
    for pattern in ("phantom_ellipses", "checker", "noise_smoothed"):
        img = render_pattern(FixtureSpec(base_pattern=pattern, size=96, seed=4))
        assert img.shape == (96, 96)
        assert img.min() >= 0.0 and img.max() <= 255.0
        assert img.std() > 10.0  # must carry real structure


def test_phantom_has_many_plateaus():
    img = render_pattern(FixtureSpec(size=128))
    assert len(np.unique(img)) >= 8


def test_noise_pattern_seed_dependence():
    a = render_pattern(FixtureSpec(base_pattern="noise_smoothed", size=64, seed=1))
    b = render_pattern(FixtureSpec(base_pattern="noise_smoothed", size=64, seed=2))
    assert not np.allclose(a, b)


def test_noise_sigma_adds_noise():
    quiet = FixtureSpec(size=64, seed=3)
    noisy = FixtureSpec(size=64, seed=3, noise_sigma=0.05)
    _, m0, _ = generate_pair(quiet)
    _, m1, _ = generate_pair(noisy)
    resid = m1 - m0
    assert 0.03 * 255 < resid.std() < 0.07 * 255
    assert m1.min() >= 0.0


def test_unusable_transform_rejected():
    spec = FixtureSpec(size=64, truth=AffineParams(tx=60, ty=60))
    with pytest.raises(ValueError, match="fixture unusable"):
        generate_pair(spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        FixtureSpec(base_pattern="plaid").validate()
    with pytest.raises(ValueError):
        FixtureSpec(size=32).validate()
    with pytest.raises(ValueError):
        FixtureSpec(noise_sigma=-0.1).validate()


def test_sidecar_recovery_inverts_truth():
    truth = AffineParams(tx=6, ty=-3, theta=math.radians(4))
    side = sidecar_dict(FixtureSpec(size=128, truth=truth))
    rec, center = params_from_dict(side["recovery"])
    assert center == (63.5, 63.5)
    prod = compose_matrix(truth) @ compose_matrix(rec)
    assert np.abs(prod - np.eye(3)).max() < 1e-9
    assert side["spec"]["size"] == 128


def test_write_fixture_outputs(tmp_path):
    spec = FixtureSpec(size=64, truth=AffineParams(tx=2), remap="invert")
    write_fixture(spec, tmp_path / "fx")
    fixed = load_pgm(tmp_path / "fx" / "fixed.pgm")
    moving = load_pgm(tmp_path / "fx" / "moving.pgm")
    assert fixed.shape == moving.shape == (64, 64)
    side = json.loads((tmp_path / "fx" / "truth.json").read_text())
    assert side["truth"]["tx"] == 2.0
