"""Tests for the digital systolic MXU model and its event-driven oracle."""
from itertools import product

import pytest

from src.engines import (
    GemmTile,
    OracleGuardError,
    systolic_cycles,
    systolic_folds,
    systolic_mac_slots,
    systolic_oracle,
    systolic_utilization,
)


class TestGemmTile:
    def test_macs(self):
        assert GemmTile(2, 3, 4).macs == 24
        assert GemmTile(2, 3, 4).flops == 48

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            GemmTile(0, 1, 1)


class TestSystolicCycles:
    def test_unit_array(self):
        assert systolic_cycles(1, 1, GemmTile(1, 1, 1)) == 2

    def test_two_by_two(self):
        assert systolic_cycles(2, 2, GemmTile(2, 2, 2)) == 6

    def test_gemv_fold_on_full_array(self):
        # R-cycle fill, then M + R + C - 2
        assert systolic_cycles(128, 128, GemmTile(1, 1, 1)) == 383

    def test_folds(self):
        assert systolic_folds(128, 128, GemmTile(1, 256, 300)) == 6
        assert systolic_cycles(128, 128, GemmTile(1, 256, 300)) == 6 * 383

    def test_decode_head_shape(self):
        assert systolic_cycles(128, 128, GemmTile(1, 128, 1280)) == 3830

    def test_mac_slots_include_padding(self):
        assert systolic_mac_slots(4, 4, GemmTile(3, 5, 2)) == 2 * 16 * 3

    def test_utilization_near_one_for_long_streams(self):
        assert systolic_utilization(128, 128, GemmTile(100_000, 128, 128)) > 0.99

    def test_utilization_of_gemv_is_tiny(self):
        assert systolic_utilization(128, 128, GemmTile(1, 128, 128)) < 0.01

    def test_monotone_in_each_dimension(self):
        for M, K, N in product((1, 3, 8), (1, 4, 9), (1, 5, 16)):
            base = systolic_cycles(4, 4, GemmTile(M, K, N))
            assert systolic_cycles(4, 4, GemmTile(M + 1, K, N)) >= base
            assert systolic_cycles(4, 4, GemmTile(M, K + 1, N)) >= base
            assert systolic_cycles(4, 4, GemmTile(M, K, N + 1)) >= base


class TestSystolicOracle:
    @pytest.mark.parametrize("rows,cols", list(product((1, 2, 4, 8), repeat=2)))
    def test_matches_analytic_model(self, rows, cols):
        for M, K, N in product(range(1, 9), repeat=3):
            tile = GemmTile(M, K, N)
            assert systolic_oracle(rows, cols, tile) == systolic_cycles(rows, cols, tile), (M, K, N)

    def test_odd_array(self):
        for M, K, N in product((1, 2, 3, 6), (1, 2, 5), (1, 3, 4)):
            tile = GemmTile(M, K, N)
            assert systolic_oracle(3, 3, tile) == systolic_cycles(3, 3, tile), (M, K, N)

    def test_larger_array(self):
        tile = GemmTile(9, 20, 17)
        assert systolic_oracle(8, 8, tile) == systolic_cycles(8, 8, tile)

    def test_array_guard(self):
        with pytest.raises(OracleGuardError):
            systolic_oracle(64, 64, GemmTile(1, 1, 1))

    def test_dimension_guard(self):
        with pytest.raises(OracleGuardError):
            systolic_oracle(2, 2, GemmTile(65, 1, 1))
