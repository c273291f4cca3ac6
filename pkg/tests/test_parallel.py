"""Tests for parallelism plans, tensor-parallel sharding and end-to-end inference."""
from unittest.mock import patch

import pytest

from src.config import Settings
from src.parallel import (
    NAMED_PLANS,
    CapacityError,
    ParallelismError,
    ParallelismPlan,
    check_kv_capacity,
    decode_positions,
    dit_end_to_end,
    kv_cache_bytes,
    llm_end_to_end,
    pipeline_latency,
    plan_by_name,
    plans_for_devices,
    shard_graph,
)
from src.workload import (
    AllReduce,
    Category,
    InferenceParams,
    ModelConfig,
    Precision,
    WorkloadError,
    build_dit_block,
    build_llm_decode_layer,
    build_llm_prefill_layer,
)

from tests.conftest import small_config


# --- Helpers ---

def tiny_llm(**overrides):
    fields = dict(name="tiny", family="llm", n_layers=2, n_heads=2, d_model=16)
    fields.update(overrides)
    return ModelConfig(**fields)


def tiny_params(**overrides):
    fields = dict(batch=2, seq_in=8, out_len=4)
    fields.update(overrides)
    return InferenceParams(**fields)


# --- Plans ---

class TestParallelismPlan:
    def test_defaults(self):
        plan = ParallelismPlan()
        assert (plan.devices, plan.microbatches, plan.name) == (1, 1, "single")

    def test_microbatches_default_to_stages(self):
        assert ParallelismPlan(pp_stages=4).microbatches == 4

    def test_named(self):
        assert plan_by_name("TP2") == ParallelismPlan(tp_degree=2)
        assert ParallelismPlan(pp_stages=2).name == "pp2"

    def test_custom_name(self):
        assert ParallelismPlan(pp_stages=2, microbatches=4).name == "tp1-pp2-m4"

    def test_three_devices_rejected(self):
        with pytest.raises(ParallelismError, match="1, 2 or 4"):
            ParallelismPlan(tp_degree=3)

    def test_zero_degree_rejected(self):
        with pytest.raises(ParallelismError):
            ParallelismPlan(tp_degree=0)

    def test_unknown_name(self):
        with pytest.raises(ParallelismError, match="Unknown parallelism plan"):
            plan_by_name("tp8")

    def test_plans_for_devices(self):
        assert plans_for_devices(1) == [NAMED_PLANS["single"]]
        assert [p.name for p in plans_for_devices(2)] == ["tp2", "pp2"]
        assert [p.name for p in plans_for_devices(4)] == ["tp4", "pp4"]


# --- Sharding ---

class TestShardGraph:
    def test_gpt3_prefill_tp2(self, gpt3, reference_params):
        graph = shard_graph(build_llm_prefill_layer(gpt3, reference_params), 2)
        assert graph.op("qkv").kind.N == 21504 // 2
        assert graph.op("ffn1").kind.N == 28672 // 2
        assert graph.op("proj").kind.K == 7168 // 2
        assert graph.op("ffn2").kind.K == 28672 // 2
        assert graph.op("qk").kind.batch == 448 // 2
        assert graph.meta["tp_degree"] == 2

    def test_all_reduce_after_row_parallel_gemms(self, gpt3, reference_params):
        graph = shard_graph(build_llm_prefill_layer(gpt3, reference_params), 2)
        reduce = graph.op("proj_allreduce")
        assert reduce.kind == AllReduce(8 * 1024 * 7168, 2)
        assert reduce.category is Category.COMMUNICATION
        assert "proj_allreduce" in graph.op("residual1").deps
        assert "ffn2_allreduce" in graph.op("residual2").deps
        assert len(graph.topological_order()) == len(graph)

    @pytest.mark.parametrize("degree", [2, 4])
    def test_work_is_conserved(self, gpt3, reference_params, degree):
        graph = build_llm_prefill_layer(gpt3, reference_params)
        sharded = shard_graph(graph, degree)
        assert sharded.gemm_flops() * degree == graph.gemm_flops()
        assert sharded.total_flops() * degree == graph.total_flops()

    def test_decode_kv_bytes_split(self, gpt3):
        graph = build_llm_decode_layer(gpt3, InferenceParams(batch=8, decode_pos=1))
        sharded = shard_graph(graph, 4)
        assert sharded.op("kv_cache").kind.bytes * 4 == graph.op("kv_cache").kind.bytes

    def test_dit_conditioning_column_parallel(self, dit):
        graph = shard_graph(build_dit_block(dit, InferenceParams(batch=8)), 2)
        assert graph.op("cond").kind.N == 6912 // 2

    def test_single_device_is_identity(self, gpt3, reference_params):
        graph = build_llm_prefill_layer(gpt3, reference_params)
        assert shard_graph(graph, 1) is graph

    def test_heads_must_divide(self):
        graph = build_llm_prefill_layer(tiny_llm(), tiny_params())
        with pytest.raises(ParallelismError, match="heads"):
            shard_graph(graph, 4)


# --- Pipeline and capacity ---

class TestPipelineLatency:
    def test_uniform_stages(self):
        assert pipeline_latency([10.0] * 4, 4, 0.0) == 70.0

    def test_hops_between_stages(self):
        assert pipeline_latency([10.0] * 4, 4, 2.0) == 70.0 + 3 * 2.0

    def test_slowest_stage_dominates(self):
        assert pipeline_latency([1.0, 5.0], 3, 0.0) == 4 * 5.0

    def test_single_stage(self):
        assert pipeline_latency([8.0], 1, 100.0) == 8.0

    def test_rejects_empty(self):
        with pytest.raises(ParallelismError):
            pipeline_latency([], 1, 0.0)


class TestKvCapacity:
    def test_gpt3_int8_fits_one_device(self, gpt3, baseline):
        params = InferenceParams(batch=8, seq_in=1024, out_len=512)
        assert kv_cache_bytes(gpt3, params, ParallelismPlan()) == 2 * 8 * 1536 * 7168 * 48
        check_kv_capacity(gpt3, params, ParallelismPlan(), baseline)

    def test_gpt3_bf16_needs_two_devices(self, gpt3, baseline):
        params = InferenceParams(batch=8, seq_in=1024, out_len=512, precision=Precision.BF16)
        with pytest.raises(CapacityError, match="GiB"):
            check_kv_capacity(gpt3, params, ParallelismPlan(), baseline)
        check_kv_capacity(gpt3, params, ParallelismPlan(tp_degree=2), baseline)


class TestDecodePositions:
    def test_exact(self):
        assert decode_positions(3) == [(1, 1), (2, 1), (3, 1)]

    def test_strided_weights_cover_every_position(self):
        positions = decode_positions(5, 2)
        assert positions == [(1, 2), (3, 2), (5, 1)]
        assert sum(weight for _, weight in positions) == 5

    def test_rejects_zero_stride(self):
        with pytest.raises(ParallelismError):
            decode_positions(4, 0)


# --- End to end ---

class TestLlmEndToEnd:
    def test_phases_and_throughput(self, small):
        report = llm_end_to_end(tiny_llm(), tiny_params(), ParallelismPlan(), small)
        assert [phase.name for phase in report.phases] == ["prefill", "decode"]
        assert report.items == 8
        assert report.throughput == pytest.approx(8 / report.latency_s)
        assert report.latency_s == pytest.approx(report.cycles / small.frequency)

    def test_prefill_only(self, small):
        report = llm_end_to_end(tiny_llm(), tiny_params(out_len=0), ParallelismPlan(), small)
        assert [phase.name for phase in report.phases] == ["prefill"]
        assert report.throughput == 0.0

    def test_prefill_independent_of_output_length(self, small):
        model = tiny_llm()
        generating = llm_end_to_end(model, tiny_params(out_len=3), ParallelismPlan(), small)
        prompt_only = llm_end_to_end(model, tiny_params(out_len=0), ParallelismPlan(), small)
        assert generating.phase("prefill").cycles == pytest.approx(prompt_only.cycles)

    def test_stride_covering_all_steps_is_exact(self, small):
        model, params = tiny_llm(), tiny_params(out_len=1)
        exact = llm_end_to_end(model, params, ParallelismPlan(), small, decode_stride=1)
        strided = llm_end_to_end(model, params, ParallelismPlan(), small, decode_stride=8)
        assert strided.cycles == pytest.approx(exact.cycles)

    def test_threads_do_not_change_results(self, small):
        a = llm_end_to_end(tiny_llm(), tiny_params(), ParallelismPlan(), small, threads=1)
        b = llm_end_to_end(tiny_llm(), tiny_params(), ParallelismPlan(), small, threads=3)
        assert a.cycles == pytest.approx(b.cycles)
        assert a.energy.total == pytest.approx(b.energy.total)

    def test_tensor_parallel_adds_ici_energy(self, small):
        report = llm_end_to_end(tiny_llm(), tiny_params(), ParallelismPlan(tp_degree=2), small)
        assert report.devices == 2
        assert report.energy.ici_j > 0

    def test_pipeline_plan(self, small):
        report = llm_end_to_end(tiny_llm(), tiny_params(), ParallelismPlan(pp_stages=2), small)
        assert report.plan == "pp2"
        assert report.energy.ici_j > 0

    def test_batch_must_split_into_microbatches(self, small):
        with pytest.raises(ParallelismError, match="microbatches"):
            llm_end_to_end(tiny_llm(), tiny_params(batch=3), ParallelismPlan(pp_stages=2), small)

    def test_kv_overflow(self):
        cramped = small_config(hbm_bytes=40 * 1024)
        params = tiny_params(batch=64, seq_in=64, out_len=64)
        with pytest.raises(CapacityError):
            llm_end_to_end(tiny_llm(), params, ParallelismPlan(), cramped)

    def test_rejects_dit(self, dit, small):
        with pytest.raises(WorkloadError, match="needs an LLM"):
            llm_end_to_end(dit, tiny_params(), ParallelismPlan(), small)

    def test_as_dict(self, small):
        data = llm_end_to_end(tiny_llm(), tiny_params(), ParallelismPlan(), small).as_dict()
        assert data["plan"] == "single"
        assert set(data["phases"]) == {"prefill", "decode"}
        assert "tokens_per_s" in data


class TestDitEndToEnd:
    @pytest.fixture
    def tiny_dit(self):
        return ModelConfig(name="tiny-dit", family="dit", n_layers=2, n_heads=2, d_model=16)

    def test_steps_scale_latency(self, tiny_dit, small):
        params = InferenceParams(batch=2, image_resolution=32)
        one = dit_end_to_end(tiny_dit, params, ParallelismPlan(), small, n_steps=1)
        ten = dit_end_to_end(tiny_dit, params, ParallelismPlan(), small, n_steps=10)
        assert ten.latency_s == pytest.approx(10 * one.latency_s)
        assert ten.unit == "images"
        assert ten.throughput == pytest.approx(2 / ten.latency_s)

    def test_default_steps_come_from_settings(self, tiny_dit, small):
        params = InferenceParams(batch=2, image_resolution=32)
        explicit = dit_end_to_end(tiny_dit, params, ParallelismPlan(), small, n_steps=3)
        with patch("src.parallel.end_to_end.get_settings", return_value=Settings(diffusion_steps=3)):
            configured = dit_end_to_end(tiny_dit, params, ParallelismPlan(), small)
        assert configured.latency_s == pytest.approx(explicit.latency_s)

    def test_rejects_llm(self, small):
        with pytest.raises(WorkloadError, match="needs a DiT"):
            dit_end_to_end(tiny_llm(), InferenceParams(), ParallelismPlan(), small, n_steps=1)
