import json
import math

import numpy as np
import pytest

import fovqa


def standard_display():
    return fovqa.DisplayGeometry(viewport_width_mm=1280 * 0.04375,
                                 viewport_height_mm=1440 * 0.04375)


def small_display(width_px=64, height_px=72):
    return fovqa.DisplayGeometry(viewport_width_px=width_px, viewport_height_px=height_px,
                                 viewport_width_mm=56.0, viewport_height_mm=63.0)


def test_virtual_geometry_goldens():
    vg = fovqa.derive_virtual_geometry(standard_display())
    assert vg.lens_to_virtual_mm == pytest.approx(1550.0 / 37.0, rel=1e-12)
    assert vg.eye_to_virtual_mm == pytest.approx(1550.0 / 37.0 + 10.0, rel=1e-12)
    assert vg.magnification == pytest.approx(62.0 / 37.0, rel=1e-12)
    dpp_x, dpp_y = fovqa.degrees_per_pixel(vg)
    assert dpp_x == pytest.approx(0.0809451555, abs=1e-9)
    assert dpp_y == pytest.approx(dpp_x, rel=1e-12)
    assert fovqa.eccentricity_at(639.5, 719.5, 639.5, 719.5, vg) == 0.0


def test_zone_partition():
    scheme = fovqa.ZoneScheme()
    assert scheme.zone_count() == 5
    assert [fovqa.zone_of(e, scheme) for e in (0.0, 2.5, 4.0, 29.999, 30.0, 80.0)] \
        == [0, 1, 2, 3, 4, 4]

    vg = fovqa.derive_virtual_geometry(small_display())
    em = fovqa.eccentricity_map(vg, 31.5, 35.5)
    zm = fovqa.zone_map(em, scheme)
    counts = fovqa.zone_pixel_counts(zm, scheme.zone_count())
    assert sum(counts) == 64 * 72
    assert zm.to_numpy()[36, 32] == fovqa.zone_of(em.deg.to_numpy()[36, 32], scheme)


def test_image_numpy_round_trip():
    rng = np.random.default_rng(7)
    arr = rng.integers(0, 256, size=(48, 32, 3), dtype=np.uint8)
    img = fovqa.Image.from_numpy(arr)
    assert (img.width, img.height, img.channels, img.bit_depth) == (32, 48, 3, 8)
    assert np.array_equal(img.to_numpy(), arr.astype(np.float32))

    luma = fovqa.luminance(img).to_numpy()
    r, g, b = arr[10, 20].astype(np.float64)
    assert luma[10, 20] == pytest.approx(0.299 * r + 0.587 * g + 0.114 * b, abs=1e-6)


def test_vpsnr_golden():
    ref = fovqa.Image.from_numpy(np.full((24, 36), 100.0, dtype=np.float32))
    dist = fovqa.Image.from_numpy(np.full((24, 36), 116.0, dtype=np.float32))
    assert fovqa.score_vpsnr(ref, dist) == pytest.approx(10 * math.log10(255**2 / 256), rel=1e-12)
    assert math.isinf(fovqa.score_vpsnr(ref, ref))


def test_extract_viewport_is_deterministic():
    yy, xx = np.mgrid[0:64, 0:128]
    pano = fovqa.quantize(fovqa.Image.from_numpy(
        (127.5 + 100 * np.sin(xx / 9.0) * np.cos(yy / 7.0)).astype(np.float32)))
    spec = fovqa.ViewportSpec(yaw_deg=30.0, pitch_deg=-10.0, out_width=48, out_height=54)
    a = fovqa.extract_viewport(pano, spec).to_numpy()
    b = fovqa.extract_viewport(pano, spec).to_numpy()
    assert a.shape == (54, 48)
    assert np.array_equal(a, b)
    with pytest.raises(Exception):
        fovqa.validate_equirect(fovqa.Image.from_numpy(np.zeros((64, 100), dtype=np.float32)))


def test_blend_weights_follow_zones():
    scheme = fovqa.ZoneScheme()
    vg = fovqa.derive_virtual_geometry(small_display())
    em = fovqa.eccentricity_map(vg, 31.5, 35.5)
    w = fovqa.blend_weight_map(fovqa.quality_pattern("P1"), em, scheme, 0.0).to_numpy()
    zones = fovqa.zone_map(em, scheme).to_numpy()
    assert np.array_equal(w == 1.0, zones == 0)
    assert set(np.unique(w)) == {0.0, 1.0}


def test_gaussian_blur_preserves_constants():
    img = fovqa.Image.from_numpy(np.full((20, 30), 77.0, dtype=np.float32))
    assert np.allclose(fovqa.gaussian_blur(img, 3.0).to_numpy(), 77.0, atol=1e-4)


def test_zwf_with_count_weights_matches_vpsnr():
    rng = np.random.default_rng(42)
    ref = fovqa.Image.from_numpy(rng.integers(0, 256, size=(72, 64)).astype(np.float32))
    dist = fovqa.Image.from_numpy(rng.integers(0, 256, size=(72, 64)).astype(np.float32))
    scheme = fovqa.ZoneScheme()
    vg = fovqa.derive_virtual_geometry(small_display())
    zm = fovqa.zone_map(fovqa.eccentricity_map(vg, 31.5, 35.5), scheme)
    counts = fovqa.zone_pixel_counts(zm, scheme.zone_count())
    weights = fovqa.ZoneWeights([c / sum(counts) for c in counts])
    weights.validate()
    zwf = fovqa.zwf_score(fovqa.zone_mse(ref, dist, zm), weights)
    assert zwf == pytest.approx(fovqa.score_vpsnr(ref, dist), abs=1e-9)


def test_every_metric_scores_finite():
    rng = np.random.default_rng(9)
    ref = fovqa.Image.from_numpy(rng.integers(0, 256, size=(180, 192)).astype(np.float32))
    noise = np.clip(ref.to_numpy() + rng.normal(0, 6, size=(180, 192)), 0, 255)
    dist = fovqa.quantize(fovqa.Image.from_numpy(noise.astype(np.float32)))
    vg = fovqa.derive_virtual_geometry(small_display(192, 180))
    ctx = fovqa.MetricContext(vg)
    ids = fovqa.metric_ids()
    assert "vpsnr" in ids and "fpsnr" in ids
    for metric_id in ids:
        assert math.isfinite(fovqa.score_metric(metric_id, ref, dist, ctx)), metric_id


def test_fit_logistic_recovers_affine_data():
    x = [float(v) for v in range(12)]
    y = [0.5 * v + 1.0 for v in x]
    fit = fovqa.fit_logistic(x, y)
    assert fit.converged
    assert fit.rmse < 1e-6
    assert fit.pcc == pytest.approx(1.0, abs=1e-9)
    assert fovqa.logistic5(6.0, fit.params) == pytest.approx(4.0, abs=1e-5)


def test_mos_with_ci_golden():
    rec = fovqa.mos_with_ci([1, 5])
    assert rec.mos == pytest.approx(3.0)
    assert rec.ci95 == pytest.approx(25.412386, abs=1e-4)
    assert rec.raw_scores == [1, 5]


def test_pipeline_stages_run_from_manifest(tmp_path):
    rng = np.random.default_rng(3)
    pano = rng.integers(0, 256, size=(64, 128)).astype(np.float32)
    fovqa.save_pnm(fovqa.Image.from_numpy(pano), str(tmp_path / "pano.pgm"))
    manifest = {
        "geometry": {
            "focal_length_mm": 62.0,
            "lens_to_display_mm": 25.0,
            "lens_to_eye_mm": 10.0,
            "viewport_width_px": 64,
            "viewport_height_px": 72,
            "pixel_pitch_mm": 0.875,
        },
        "sources": [{"id": "A", "path": "pano.pgm", "yaw_deg": 20.0, "pitch_deg": 0.0}],
        "patterns": ["P1", "P5"],
        "sigmas": {"S1": [2.0], "S2": [1.0]},
        "belt_width_deg": 2.0,
        "kernel_extent": 12,
        "out_dir": str(tmp_path / "out"),
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))

    summary = fovqa.run(str(path), "geometry")
    assert "lens_to_virtual_mm = 41.8918919" in summary
    assert "display_nyquist_cpd" in summary
    fovqa.run(str(path), "extract")
    assert (tmp_path / "out" / "viewports" / "A.pgm").is_file()
    fovqa.run(str(path), "make-stimuli", jobs=2)
    index = (tmp_path / "out" / "stimuli.csv").read_text().splitlines()
    assert index[0] == "stimulus_id,source_id,pattern_id,scenario,sigma,belt_width_deg,path"
    assert len(index) == 3
    with pytest.raises(RuntimeError):
        fovqa.run(str(path), "does-not-exist")
