import itertools

import numpy as np
import pytest

from rdhsort.predictor import (SvPair, modify_error, modify_errors, predict, predict_sites, prediction_error,
                               recover_error, recover_errors, serviceable_mask)


class TestPredict:
    @pytest.mark.parametrize("cell, hp", [((10, 10, 10, 10), 10), ((1, 2, 3, 4), 3), ((250, 252, 253, 251), 252)])
    def test_examples(self, cell, hp):
        assert predict(*cell) == hp

    def test_matches_round_half_up(self):
        rng = np.random.default_rng(0)
        for cell in rng.integers(0, 256, (500, 4)).tolist():
            mean = sum(cell) / 4
            assert predict(*cell) == int(np.floor(mean + 0.5))

    def test_permutation_invariant(self):
        cell = (3, 200, 17, 90)
        assert len({predict(*p) for p in itertools.permutations(cell)}) == 1

    def test_vectorised_matches_scalar(self):
        rng = np.random.default_rng(1)
        arr = rng.integers(0, 256, (9, 9))
        rows, cols = np.mgrid[1:8, 1:8]
        got = predict_sites(arr, rows.ravel(), cols.ravel())
        want = [predict(arr[r - 1, c], arr[r, c + 1], arr[r + 1, c], arr[r, c - 1])
                for r, c in zip(rows.ravel(), cols.ravel())]
        assert got.tolist() == want


class TestErrors:
    def test_prediction_error(self):
        assert prediction_error(100, 100) == 0
        assert prediction_error(253, 254) == -1
        assert prediction_error(255, 254) == 1

    def test_modify_examples(self):
        sv = SvPair(0, -1)
        assert modify_error(0, sv, 0) == 0
        assert modify_error(-1, sv, 1) == -2
        assert modify_error(7, sv) == 8
        assert modify_error(1, SvPair(2, -3)) == 1

    def test_bit_required(self):
        with pytest.raises(ValueError):
            modify_error(0, SvPair(0, -1))

    def test_recover_examples(self):
        sv = SvPair(0, -1)
        assert recover_error(1, sv) == (0, 1)
        assert recover_error(-2, sv) == (-1, 1)
        assert recover_error(8, sv) == (7, None)

    def test_distortion_at_most_one(self):
        for k in range(1, 9):
            sv = SvPair.from_index(k)
            for e in range(-260, 261):
                for bit in (0, 1):
                    assert abs(modify_error(e, sv, bit) - e) <= 1

    def test_invalid_pair(self):
        with pytest.raises(ValueError):
            SvPair(0, 0)
        with pytest.raises(ValueError):
            SvPair.from_index(0)

    def test_vectorised_round_trip(self):
        rng = np.random.default_rng(2)
        e = rng.integers(-20, 21, 1000)
        for k in (1, 3, 5):
            sv = SvPair.from_index(k)
            n = int(serviceable_mask(e, sv).sum())
            bits = rng.integers(0, 2, n)
            ep = modify_errors(e, sv, bits)
            back, got = recover_errors(ep, sv)
            assert np.array_equal(back, e)
            assert np.array_equal(got, bits)
            scalar = []
            it = iter(bits.tolist())
            for v in e.tolist():
                scalar.append(modify_error(v, sv, next(it) if v in (sv.sv_p, sv.sv_n) else None))
            assert ep.tolist() == scalar
