import numpy as np
import pytest

from dctpipe.zigzag import zigzag_scan, zigzag_unscan


def test_canonical_prefix():
    grid = np.arange(64).reshape(8, 8)
    vec = zigzag_scan(grid)
    # First diagonals of the T.81 order: (0,0) (0,1) (1,0) (2,0) (1,1) (0,2).
    assert list(vec[:6]) == [0, 1, 8, 16, 9, 2]
    assert vec[63] == 63


def test_single_positions():
    grid = np.zeros((8, 8), dtype=int)
    grid[0, 0] = 1
    assert list(zigzag_scan(grid)[:2]) == [1, 0]
    grid = np.zeros((8, 8), dtype=int)
    grid[1, 0] = 1
    assert zigzag_scan(grid)[2] == 1


def test_bijection():
    rng = np.random.default_rng(1)
    for _ in range(100):
        grid = rng.integers(-1000, 1000, (8, 8))
        assert np.array_equal(zigzag_unscan(zigzag_scan(grid)), grid)
        vec = rng.integers(-1000, 1000, 64)
        assert np.array_equal(zigzag_scan(zigzag_unscan(vec)), vec)


def test_rejects_bad_size():
    with pytest.raises(ValueError):
        zigzag_scan(np.zeros((7, 8)))
    with pytest.raises(ValueError):
        zigzag_unscan(np.zeros(63))
