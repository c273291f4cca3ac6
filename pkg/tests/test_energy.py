"""Tests for energy accounting and MXU energy comparison."""
import pytest

from src.energy import EnergyBreakdown, Traffic, mxu_energy, mxu_energy_ratio, op_energy, sum_energy
from src.hardware import EnergyTable
from src.mapping import best_mapping, evaluate_graph
from src.workload import (
    Category,
    InferenceParams,
    LayerGraph,
    ModelConfig,
    Operator,
    Softmax,
    build_llm_decode_layer,
)

from tests.conftest import make_gemm, small_config

DIGITAL_OVER_CIM = 2.597e-12 / 0.2755e-12


class TestOpEnergy:
    def test_mac_energy_per_slot(self, baseline, cim):
        assert op_energy(baseline, Traffic(), macs=1000).mxu_j == pytest.approx(1000 * 2.597e-12)
        assert op_energy(cim, Traffic(), macs=1000).mxu_j == pytest.approx(1000 * 0.2755e-12)

    def test_memory_levels(self, baseline):
        table = baseline.energy
        energy = op_energy(baseline, Traffic(hbm=100, oci=10, vmem=1, ici=5))
        assert energy.hbm_j == pytest.approx(100 * table.hbm_energy)
        assert energy.cmem_j == pytest.approx(110 * table.cmem_energy)
        assert energy.vmem_j == pytest.approx(11 * table.vmem_energy)
        assert energy.ici_j == pytest.approx(5 * table.ici_energy)
        assert energy.mxu_j == 0.0

    def test_vpu_lane_ops(self, baseline):
        assert op_energy(baseline, Traffic(), lane_ops=10).vpu_j == pytest.approx(10 * 0.05e-12)

    def test_scaled_table_scales_energy(self):
        base = small_config()
        doubled = small_config(energy=EnergyTable().scaled(2.0))
        op = make_gemm(8, 8, 8)
        a = best_mapping(op, base)[1].energy.total
        b = best_mapping(op, doubled)[1].energy.total
        assert b == pytest.approx(2 * a)


class TestEnergyBreakdown:
    def test_total_and_dict(self):
        energy = EnergyBreakdown(mxu_j=1.0, hbm_j=2.0)
        assert energy.total == 3.0
        assert energy.as_dict()["total_j"] == 3.0

    def test_sum(self):
        parts = [EnergyBreakdown(vpu_j=1.0), EnergyBreakdown(vpu_j=2.0, ici_j=1.0)]
        assert sum_energy(parts) == EnergyBreakdown(vpu_j=3.0, ici_j=1.0)

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="mxu_j"):
            EnergyBreakdown(mxu_j=-1.0)

    def test_traffic_arithmetic(self):
        traffic = Traffic(hbm=1, oci=2) + Traffic(vmem=3, ici=0.5)
        assert traffic.scaled(2) == Traffic(hbm=2, oci=4, vmem=6, ici=1.0)


class TestEnergyAccounting:
    def test_gemm_mxu_energy_covers_macs(self, small):
        op = make_gemm(5, 7, 9)
        result = best_mapping(op, small)[1]
        assert result.mac_slots >= 5 * 7 * 9
        assert result.energy.mxu_j == pytest.approx(result.mac_slots * small.mac_energy)

    def test_vector_operator_spends_no_mxu_energy(self, small):
        op = Operator("sm", Softmax(4, 64), Category.ATTENTION)
        energy = best_mapping(op, small)[1].energy
        assert energy.mxu_j == 0.0
        assert energy.vpu_j > 0.0

    def test_cim_mxu_energy_ratio(self, baseline, cim):
        op = make_gemm(2048, 2048, 2048)
        ratio = mxu_energy_ratio(op, baseline, cim)
        assert ratio >= DIGITAL_OVER_CIM * 0.99
        # Capped near 9.4 by the per-slot energies, so 10x is out of reach
        assert ratio > 9

    def test_ratio_needs_mxu_energy(self, baseline, cim):
        op = Operator("sm", Softmax(4, 64), Category.ATTENTION)
        with pytest.raises(ValueError, match="no MXU energy"):
            mxu_energy_ratio(op, baseline, cim)


class TestLayerEnergyRatio:
    @pytest.fixture
    def decode_layer(self):
        model = ModelConfig(name="tiny", family="llm", n_layers=2, n_heads=2, d_model=16)
        return build_llm_decode_layer(model, InferenceParams(batch=2, seq_in=8, decode_pos=3))

    def test_layer_energy_sums_operators(self, decode_layer, small):
        report = evaluate_graph(decode_layer, small)
        expected = sum(item.result.energy.mxu_j for item in report.operators)
        assert mxu_energy(decode_layer, small) == pytest.approx(expected)

    def test_decode_layer_ratio(self, decode_layer, small, small_cim):
        ratio = mxu_energy_ratio(decode_layer, small, small_cim)
        assert ratio == pytest.approx(mxu_energy(decode_layer, small) / mxu_energy(decode_layer, small_cim))
        assert ratio > 0

    def test_single_gemm_layer_matches_operator(self, small, small_cim):
        op = make_gemm(8, 16, 8)
        graph = LayerGraph("one", (op,))
        assert mxu_energy_ratio(graph, small, small_cim) == pytest.approx(mxu_energy_ratio(op, small, small_cim))

    def test_layer_without_gemms(self, small):
        graph = LayerGraph("vector", (Operator("sm", Softmax(4, 64), Category.ATTENTION),))
        with pytest.raises(ValueError, match="'vector' uses no MXU energy"):
            mxu_energy_ratio(graph, small, small)
