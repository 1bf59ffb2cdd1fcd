import json
import math

import numpy as np
import pytest

import sphgold as sg


def test_codes():
    s = sg.generate_mseq(3, 0b1011)
    assert list(s.chips) == [-1, 1, 1, -1, 1, -1, -1]
    g = sg.gold_family(5)
    assert len(g.sequences) == 33
    assert g.worst_case_raw == 9
    w = sg.walsh_family(3)
    assert sg.raw_xcorr(w.sequences[1], w.sequences[2], 0) == 0
    prof = sg.xcorr_profile(s, s)
    assert prof[0] == pytest.approx(1.0)


def test_errors_raise_value_error():
    with pytest.raises(ValueError, match="gold_like_family"):
        sg.gold_family(4)
    with pytest.raises(sg.Error):
        sg.theoretical_bound(sg.BoundKind.SphericalGold, 15)


def test_codebook_and_sweep():
    geom = sg.grid_geometry(16, 8, 0.5)
    part = sg.nested_partition(geom, 2)
    cb = sg.make_codebook(part, geom, [-35.0, 35.0])
    assert cb.mu_max < 0.3
    fam = sg.gold_like_family(4, 2)
    beams = [sg.BeamAssignment(cb.codewords[k], fam.sequences[k]) for k in range(2)]
    grid = sg.make_theta_grid(-75, 75, 1.0)
    rx = sg.synth_received(beams, geom, [0, 3], grid)
    assert rx.values.shape == (len(grid), 15)
    z = sg.decode_temporal(rx, fam.sequences[0], 0)
    assert len(z) == len(grid)

    sweep = sg.delay_sweep(beams, geom, grid, list(range(15)))
    assert sweep.magnitudes.shape == (15, 2, len(grid))
    curve = sg.sll_vs_delay(sweep, 0, 1)
    v = sg.variation(curve.sll_db)
    assert -18 <= v.min_db <= v.max_db <= -4

    est = sg.aoa_estimate(sweep.magnitudes[0, 0], grid, cb, geom)
    assert est.theta_hat_deg == pytest.approx(-35.0)


def test_bounds():
    assert sg.theoretical_bound(sg.BoundKind.Gold, 31) == pytest.approx(10 * math.log10(31))
    assert sg.to_db(0.1) == pytest.approx(-20.0)


def test_run_sweep(tmp_path):
    cfg = json.dumps({"code": {"family": "walsh", "n": 3}, "theta": {"step": 1.0}})
    report = json.loads(sg.run_sweep(cfg, str(tmp_path)))
    assert report["config_hash"] == sg.config_hash(cfg)
    assert (tmp_path / "capture.csv").exists()
    assert np.isfinite(report["variation"]["range_db"])
