"""Tests for the workload IR, model catalog and layer builders."""
import pytest

from src.workload import (
    Category,
    Elementwise,
    Gemm,
    GraphError,
    InferenceParams,
    KvCacheUpdate,
    LayerGraph,
    LayerNorm,
    ModelConfig,
    ModelFamily,
    Operator,
    Precision,
    Softmax,
    WorkloadError,
    build_dit_block,
    build_layer,
    build_llm_decode_layer,
    build_llm_prefill_layer,
    builtin_model,
    bytes_of,
    dit_tokens,
    flops_of,
    load_builtin_models,
    load_model,
    parse_model,
)


# --- Helpers ---

def op(name, kind=None, deps=()):
    return Operator(name, kind or Elementwise(4), Category.NORM_ELEMENTWISE, deps=tuple(deps))


def gemm_shape(graph, name):
    kind = graph.op(name).kind
    return (kind.batch, kind.M, kind.K, kind.N)


# --- Operators ---

class TestOperators:
    def test_gemm_rejects_zero_dims(self):
        with pytest.raises(ValueError, match="K must be >= 1"):
            Gemm(1, 4, 0, 4)

    def test_softmax_rejects_zero_rows(self):
        with pytest.raises(ValueError):
            Softmax(0, 4)

    def test_precision_widths(self):
        assert Precision.INT8.bytes == 1
        assert Precision.BF16.bytes == 2

    def test_gemm_flops(self):
        gemm = Operator("g", Gemm(2, 3, 4, 5), Category.QKV)
        assert flops_of(gemm) == 2 * 2 * 3 * 4 * 5

    def test_softmax_flops(self):
        assert flops_of(Operator("s", Softmax(3, 10), Category.ATTENTION)) == 3 * (3 * 10 + 2)

    def test_shared_weights_counted_once(self):
        shared = Operator("g", Gemm(4, 8, 16, 32, weight_shared=True), Category.QKV, Precision.BF16)
        assert bytes_of(shared).weight == 16 * 32 * 2
        assert bytes_of(shared).input == 4 * 8 * 16 * 2

    def test_unshared_weights_per_batch(self):
        heads = Operator("qk", Gemm(4, 8, 16, 32), Category.ATTENTION)
        assert bytes_of(heads).weight == 4 * 16 * 32

    def test_layernorm_carries_affine_weights(self):
        ln = Operator("ln", LayerNorm(10, 64), Category.NORM_ELEMENTWISE, Precision.BF16)
        assert bytes_of(ln).weight == 2 * 64 * 2

    def test_kv_update_writes_only(self):
        kv = bytes_of(Operator("kv", KvCacheUpdate(1000), Category.KV))
        assert (kv.input, kv.weight, kv.output) == (0, 0, 1000)


# --- LayerGraph ---

class TestLayerGraph:
    def test_topological_order_respects_deps(self):
        graph = LayerGraph("g", (op("c", deps=["b"]), op("a"), op("b", deps=["a"])))
        assert [o.name for o in graph.topological_order()] == ["a", "b", "c"]

    def test_ties_keep_insertion_order(self):
        graph = LayerGraph("g", (op("x"), op("y"), op("z", deps=["x", "y"])))
        assert [o.name for o in graph.topological_order()] == ["x", "y", "z"]

    def test_cycle_rejected(self):
        graph = LayerGraph("g", (op("a", deps=["b"]), op("b", deps=["a"])))
        with pytest.raises(GraphError, match="cycle"):
            graph.topological_order()

    def test_duplicate_names_rejected(self):
        with pytest.raises(GraphError, match="Duplicate"):
            LayerGraph("g", (op("a"), op("a")))

    def test_unknown_dependency_rejected(self):
        with pytest.raises(GraphError, match="unknown operators"):
            LayerGraph("g", (op("a", deps=["ghost"]),))

    def test_lookup(self):
        graph = LayerGraph("g", (op("a"),))
        assert graph.op("a").name == "a"
        assert graph.find("b") is None
        with pytest.raises(KeyError):
            graph.op("b")


# --- Model catalog ---

class TestModelCatalog:
    def test_builtin_models(self):
        models = load_builtin_models()
        assert list(models) == ["gpt3-30b", "dit-xl-2", "llama2-13b"]

    def test_gpt3_shape(self, gpt3):
        assert (gpt3.n_layers, gpt3.n_heads, gpt3.d_model) == (48, 56, 7168)
        assert gpt3.head_dim == 128
        assert gpt3.ffn_hidden == 4 * 7168

    def test_dit_shape(self, dit):
        assert dit.family is ModelFamily.DIT
        assert (dit.n_layers, dit.n_heads, dit.d_model) == (28, 16, 1152)

    def test_llama_ffn(self, llama):
        assert llama.ffn_hidden == 13824

    def test_alias(self):
        assert builtin_model("GPT-3").name == "gpt3-30b"

    def test_unknown_model_suggests(self):
        with pytest.raises(WorkloadError, match="Did you mean: gpt3-30b"):
            builtin_model("gpt3-31b")

    def test_heads_must_divide_width(self):
        with pytest.raises(ValueError, match="not divisible"):
            ModelConfig(family="llm", n_layers=1, n_heads=3, d_model=8)

    def test_parse_short_keys(self):
        model = parse_model('{"name": "tiny", "family": "LLM", "layers": 2, "heads": 2, "d_model": 8}')
        assert model.family is ModelFamily.LLM
        assert (model.n_layers, model.n_heads) == (2, 2)

    def test_parse_invalid(self):
        with pytest.raises(WorkloadError, match="Invalid model"):
            parse_model('{"family": "llm", "layers": 0, "heads": 1, "d_model": 8}')

    def test_parse_syntax_error(self):
        with pytest.raises(WorkloadError, match="line 1"):
            parse_model("{")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "mini.json"
        path.write_text('{"name": "mini", "family": "dit", "layers": 1, "heads": 2, "d_model": 16}')
        assert load_model(path).name == "mini"

    def test_inference_params(self):
        params = InferenceParams(seq_in=1024, decode_pos=256)
        assert params.context_length == 1280
        assert params.at_decode_position(3).context_length == 1027
        assert params.with_batch(2).batch == 2


# --- Builders ---

class TestLlmPrefill:
    def test_gpt3_shapes(self, gpt3, reference_params):
        graph = build_llm_prefill_layer(gpt3, reference_params)
        assert gemm_shape(graph, "qkv") == (8, 1024, 7168, 21504)
        assert gemm_shape(graph, "qk") == (448, 1024, 128, 1024)
        assert gemm_shape(graph, "sv") == (448, 1024, 1024, 128)
        assert gemm_shape(graph, "proj") == (8, 1024, 7168, 7168)
        assert gemm_shape(graph, "ffn1") == (8, 1024, 7168, 28672)
        assert gemm_shape(graph, "ffn2") == (8, 1024, 28672, 7168)
        assert graph.op("softmax").kind == Softmax(448 * 1024, 1024)
        assert graph.op("kv_cache").kind == KvCacheUpdate(2 * 8 * 1024 * 7168)

    def test_linear_layers_share_weights(self, gpt3, reference_params):
        graph = build_llm_prefill_layer(gpt3, reference_params)
        assert graph.op("qkv").kind.weight_shared
        assert not graph.op("qk").kind.weight_shared

    def test_gemm_flops_match_closed_form(self, gpt3, reference_params):
        graph = build_llm_prefill_layer(gpt3, reference_params)
        B, L, d = 8, 1024, 7168
        assert graph.gemm_flops() == 24 * B * L * d * d + 4 * B * L * L * d
        assert graph.total_flops() > graph.gemm_flops()

    def test_degenerate_model(self):
        model = ModelConfig(family="llm", n_layers=1, n_heads=1, d_model=1)
        graph = build_llm_prefill_layer(model, InferenceParams(batch=1, seq_in=1))
        for gemm in (o.kind for o in graph if o.is_gemm):
            assert (gemm.batch, gemm.M) == (1, 1)

    def test_graph_is_acyclic(self, gpt3, reference_params):
        graph = build_llm_prefill_layer(gpt3, reference_params)
        assert len(graph.topological_order()) == len(graph)

    def test_meta(self, gpt3, reference_params):
        meta = build_llm_prefill_layer(gpt3, reference_params).meta
        assert meta["stage"] == "prefill"
        assert meta["tokens"] == 1024
        assert meta["heads"] == 56

    def test_rejects_dit(self, dit, reference_params):
        with pytest.raises(WorkloadError, match="llm model"):
            build_llm_prefill_layer(dit, reference_params)


class TestLlmDecode:
    def test_gpt3_decode_position_256(self, gpt3):
        graph = build_llm_decode_layer(gpt3, InferenceParams(batch=8, seq_in=1024, decode_pos=256))
        assert gemm_shape(graph, "qkv") == (8, 1, 7168, 21504)
        assert gemm_shape(graph, "qk") == (448, 1, 128, 1280)
        assert gemm_shape(graph, "sv") == (448, 1, 1280, 128)
        assert graph.op("kv_cache").kind == KvCacheUpdate(2 * 8 * 7168)

    def test_bf16_doubles_kv_bytes(self, gpt3):
        params = InferenceParams(batch=1, decode_pos=1, precision=Precision.BF16)
        graph = build_llm_decode_layer(gpt3, params)
        assert graph.op("kv_cache").kind.bytes == 2 * 7168 * 2

    def test_requires_position(self, gpt3):
        with pytest.raises(WorkloadError, match="decode_pos"):
            build_llm_decode_layer(gpt3, InferenceParams(decode_pos=0))


class TestDitBlock:
    def test_tokens(self, dit):
        assert dit_tokens(dit, 512) == 1024
        assert dit_tokens(dit, 256) == 256

    def test_unpatchable_resolution(self, dit):
        with pytest.raises(WorkloadError, match="not divisible"):
            dit_tokens(dit, 500)

    def test_shapes(self, dit):
        graph = build_dit_block(dit, InferenceParams(batch=8, image_resolution=512))
        assert gemm_shape(graph, "cond") == (8, 1, 1152, 6912)
        assert gemm_shape(graph, "qk") == (128, 1024, 72, 1024)
        assert graph.op("softmax").kind == Softmax(8 * 16 * 1024, 1024)
        assert graph.op("cond").category is Category.CONDITIONING

    def test_adaln_elementwise_ops(self, dit):
        graph = build_dit_block(dit, InferenceParams(batch=1, image_resolution=256))
        for name in ("modulate1", "gate1", "modulate2", "gate2"):
            assert "cond" in graph.op(name).deps
        assert graph.op("modulate1").kind == Elementwise(256 * 1152, 2)

    def test_no_kv_cache(self, dit):
        graph = build_dit_block(dit, InferenceParams(batch=1, image_resolution=256))
        assert graph.find("kv_cache") is None


class TestBuildLayer:
    def test_dispatch(self, gpt3, dit, reference_params):
        assert build_layer(gpt3, reference_params, "prefill").meta["stage"] == "prefill"
        assert build_layer(dit, reference_params, "block").meta["stage"] == "block"

    def test_unknown_stage(self, gpt3, reference_params):
        with pytest.raises(WorkloadError, match="Unknown stage"):
            build_layer(gpt3, reference_params, "training")
