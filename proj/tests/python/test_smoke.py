import math

import numpy as np
import pytest

import summarizer_rd as srd


def test_example1_one_shot_points():
    source, dmat, kernels = srd.example1()
    points = [(srd.expected_distortion(source, k, dmat), srd.summarizer_rate(source, k, dmat)) for k in kernels]
    assert points == pytest.approx([(1.5, 0.25), (0.0, 0.5625), (0.75, 0.375)], abs=1e-12)
    d_max, best = srd.d_max(source, dmat)
    assert d_max == pytest.approx(1.5)
    assert best == {4: "0"}


def test_ba_curve_shape():
    source, dmat, _ = srd.example1()
    curve = srd.ba_curve(source, dmat)
    assert len(curve) == 40
    assert curve.unconverged == 0
    assert np.all(np.diff(curve.distortion) >= 0)
    assert np.all(np.diff(curve.rate) <= 1e-12)
    assert curve.rate[0] == pytest.approx(0.5, abs=1e-3)
    assert curve.rate_at(1.5) <= 1e-6


def test_custom_instance_and_errors():
    source = srd.DiscreteSource(["00", "01"], [0.5, 0.5], 2)
    dmat = srd.DistortionMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]), ["0", "1"])
    curve = srd.ba_curve(source, dmat, beta_grid=[-0.1, -1.0, -10.0])
    assert len(curve) == 3
    assert srd.grid_oracle_rd(source, dmat, 0.0, 0.25) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        srd.DiscreteSource(["0"], [0.5], 2)


def test_water_filling():
    sol = srd.solve_for_distortion([(1.0, [4.0, 1.0])], 1.0, 2.0, 2.0)
    assert sol["rate"] == pytest.approx(1.0, abs=1e-9)
    assert sol["allocations"][0] == pytest.approx([1.0, 1.0])
    curve = srd.gaussian_curve([(0.5, [2.0]), (0.5, [8.0])], 1.0)
    assert len(curve) == 50
    assert srd.eig_spectrum(np.diag([1.0, 3.0])) == pytest.approx([3.0, 1.0])


def test_srde_and_pipeline(tmp_path):
    rng = np.random.default_rng(0)
    values = (rng.standard_normal((400, 4)) * np.array([2.0, 1.0, 0.5, 0.25])).astype(np.float32)
    lengths = np.repeat(np.array([10, 20], dtype=np.uint32), 200)

    path = tmp_path / "x.srde"
    srd.write_embeddings(path, lengths, values)
    back_lengths, back_values = srd.read_embeddings(path)
    assert np.array_equal(back_lengths, lengths)
    assert np.array_equal(back_values, values)
    assert srd.encode_srde(lengths, values) == path.read_bytes()
    with pytest.raises(ValueError, match="offset"):
        srd.decode_srde(path.read_bytes()[:-1])

    curve, bins, mean_length = srd.approx_rs_curve(lengths, values, min_bin=200)
    assert len(bins) == 2
    assert mean_length == pytest.approx(15.0)
    assert curve.rate[-1] == 0.0

    same = srd.eval_summarizer_embeddings(lengths, values, lengths, values, min_bin=200)
    assert same == {"distortion": 0.0, "rate": 1.0, "violations": 0}
    half = srd.eval_summarizer_embeddings(lengths, values, lengths // 2, values * 0.5, min_bin=200)
    assert half["rate"] == 0.5
    assert half["distortion"] == pytest.approx(float(np.mean(np.sum((0.5 * values.astype(np.float64)) ** 2, axis=1))))


def test_converse_is_reproducible():
    source, dmat, kernels = srd.example1()
    a = srd.simulate_block_converse(source, kernels[2], dmat, 16, 2000, 5)
    b = srd.simulate_block_converse(source, kernels[2], dmat, 16, 2000, 5)
    assert a == b
    assert math.isfinite(a["rate"])
