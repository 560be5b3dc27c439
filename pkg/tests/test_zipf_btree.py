import numpy as np
import pytest

from oracles import level_count, zipf_top_mass
from tracar.btree import build_btree_layout
from tracar.model import InvalidArgumentError
from tracar.zipf import CalibrationError, ZipfSpec, calibrate_zipf, hot_count


@pytest.mark.parametrize("n", [10, 100, 12_345])
def test_uniform_is_zero_skew(n):
    assert calibrate_zipf(n, 0.2, 0.2) == 0.0


def test_eighty_twenty_small_n_against_direct_sum():
    s = calibrate_zipf(100, 0.2, 0.8)
    assert 0 < s < 16
    assert 0.799 <= zipf_top_mass(100, s, 20) <= 0.801


def test_eighty_twenty_million_keys():
    s = calibrate_zipf(10**6, 0.2, 0.8)
    assert 0 < s < 16
    assert abs(zipf_top_mass(10**6, s, 200_000) - 0.8) <= 1e-3


def test_unreachable_target():
    # even s=16 leaves more than 1e-5 of the mass outside the top key
    with pytest.raises(CalibrationError):
        calibrate_zipf(1000, 0.001, 0.99999)


def test_calibration_preconditions():
    with pytest.raises(InvalidArgumentError):
        calibrate_zipf(5, 0.2, 0.8)
    with pytest.raises(InvalidArgumentError):
        calibrate_zipf(100, 0.0, 0.8)
    with pytest.raises(InvalidArgumentError):
        calibrate_zipf(100, 0.2, 1.0)


def test_hot_count_rounds_up():
    assert hot_count(100, 0.2) == 20
    assert hot_count(101, 0.2) == 21


def test_probabilities_sum_to_one():
    p = ZipfSpec(1000, 0.9).probabilities()
    assert abs(p.sum() - 1.0) < 1e-12
    assert np.all(np.diff(p) <= 0)


def test_sampler_matches_mass():
    n = 10_000
    s = calibrate_zipf(n, 0.2, 0.8)
    ranks = ZipfSpec(n, s).sample(200_000, np.random.default_rng(1))
    assert ranks.min() >= 0 and ranks.max() < n
    assert abs(np.mean(ranks < hot_count(n, 0.2)) - 0.8) < 0.01


def test_single_leaf_tree():
    t = build_btree_layout(10, 16, 100, 4096)
    assert (t.height, t.n_pages) == (1, 1)


def test_million_key_layout_against_level_count():
    t = build_btree_layout(10**6, 16, 100, 4096)
    assert t.fanout == 170
    assert t.leaf_capacity == 35
    assert (t.height, t.n_pages) == level_count(10**6, 35, 170)
    # this tree also satisfies the fanout-only height bound
    assert t.fanout ** t.height >= t.n_keys > t.fanout ** (t.height - 1)


def test_two_page_nodes():
    t = build_btree_layout(10**6, 16, 100, 4096, node_pages=2)
    assert t.node_size_bytes == 8192
    assert t.node_size_bytes % t.page_size_bytes == 0
    assert t.fanout == 8192 // 24 and t.leaf_capacity == 8192 // 116
    assert (t.height, t.n_pages) == level_count(10**6, t.leaf_capacity, t.fanout)


@pytest.mark.parametrize("n_keys", [1, 2, 35, 36, 5_950, 5_951, 200_000, 1_000_001])
def test_height_is_minimal(n_keys):
    t = build_btree_layout(n_keys, 16, 100, 4096)
    assert (t.height, t.n_pages) == level_count(n_keys, t.leaf_capacity, t.fanout)
    cover = t.leaf_capacity * t.fanout ** (t.height - 1)
    assert n_keys <= cover
    if t.height >= 2:
        assert n_keys > t.leaf_capacity * t.fanout ** (t.height - 2)


def test_page_too_small():
    with pytest.raises(InvalidArgumentError):
        build_btree_layout(100, 16, 100, 128)


def test_paths_are_root_to_leaf():
    t = build_btree_layout(10_000, 16, 100, 4096)
    paths = t.paths(np.array([0, 34, 35, 9_999]))
    assert paths.shape == (4, t.height)
    assert np.all(paths[:, 0] == 0)
    leaves = paths[:, -1] - t.level_offsets[-1]
    assert list(leaves) == [0, 0, 1, 9_999 // 35]
    assert paths.max() < t.n_pages
