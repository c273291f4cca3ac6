"""Builders that expand model configs into per-layer operator graphs.

Token embedding, prediction heads and DiT patchify/unpatchify are not emitted;
they are a negligible share of inference time next to the transformer layers.
"""
from .graph import LayerGraph
from .models import InferenceParams, ModelConfig, ModelFamily, WorkloadError
from .operators import (
    Category,
    Elementwise,
    Gelu,
    Gemm,
    KvCacheUpdate,
    LayerNorm,
    Operator,
    Softmax,
)


def _require_family(model: ModelConfig, family: ModelFamily, builder: str):
    if model.family is not family:
        raise WorkloadError(
            f"{builder} needs a {family.value} model, got '{model.name}' ({model.family.value})"
        )


def _attention_and_ffn(
    model: ModelConfig,
    params: InferenceParams,
    tokens: int,
    context: int,
    attn_input: str,
    ffn_input: str,
) -> tuple[list[Operator], list[Operator]]:
    """Attention (QKV to projection) and FFN operators for ``tokens`` queries over ``context`` keys."""
    B = params.batch
    d = model.d_model
    h = model.n_heads
    dh = model.head_dim
    F = model.ffn_hidden
    prec = params.precision

    def op(name, kind, category, *deps):
        return Operator(name=name, kind=kind, category=category, precision=prec, deps=tuple(deps))

    return [
        op("qkv", Gemm(B, tokens, d, 3 * d, weight_shared=True), Category.QKV, attn_input),
        op("qk", Gemm(B * h, tokens, dh, context), Category.ATTENTION, "qkv"),
        op("softmax", Softmax(B * h * tokens, context), Category.ATTENTION, "qk"),
        op("sv", Gemm(B * h, tokens, context, dh), Category.ATTENTION, "softmax"),
        op("proj", Gemm(B, tokens, d, d, weight_shared=True), Category.PROJECTION, "sv"),
    ], [
        op("ffn1", Gemm(B, tokens, d, F, weight_shared=True), Category.FFN, ffn_input),
        op("gelu", Gelu(B * tokens * F), Category.NORM_ELEMENTWISE, "ffn1"),
        op("ffn2", Gemm(B, tokens, F, d, weight_shared=True), Category.FFN, "gelu"),
    ]


def _llm_layer(model: ModelConfig, params: InferenceParams, tokens: int, context: int, stage: str) -> LayerGraph:
    B = params.batch
    d = model.d_model
    prec = params.precision
    rows = B * tokens

    attention, ffn = _attention_and_ffn(model, params, tokens, context, "ln1", "ln2")
    ops = [
        Operator("ln1", LayerNorm(rows, d), Category.NORM_ELEMENTWISE, prec),
        *attention[:1],
        Operator("kv_cache", KvCacheUpdate(2 * B * tokens * d * prec.bytes), Category.KV, prec, ("qkv",)),
        *attention[1:],
        Operator("residual1", Elementwise(rows * d), Category.NORM_ELEMENTWISE, prec, ("proj",)),
        Operator("ln2", LayerNorm(rows, d), Category.NORM_ELEMENTWISE, prec, ("residual1",)),
        *ffn,
        Operator("residual2", Elementwise(rows * d), Category.NORM_ELEMENTWISE, prec, ("ffn2", "residual1")),
    ]
    meta = {
        "model": model.name,
        "family": model.family.value,
        "stage": stage,
        "batch": B,
        "heads": model.n_heads,
        "tokens": tokens,
        "context": context,
        "precision": prec.value,
    }
    return LayerGraph(name=f"{model.name}-{stage}", ops=tuple(ops), meta=meta)


def build_llm_prefill_layer(model: ModelConfig, params: InferenceParams) -> LayerGraph:
    """One LLM transformer layer processing the whole prompt.

    Args:
        model: LLM backbone
        params: batch, seq_in and precision are used

    Returns:
        Layer graph with L = seq_in query and key positions

    Raises:
        WorkloadError: If the model is not an LLM.
    """
    _require_family(model, ModelFamily.LLM, "build_llm_prefill_layer")
    return _llm_layer(model, params, params.seq_in, params.seq_in, "prefill")


def build_llm_decode_layer(model: ModelConfig, params: InferenceParams) -> LayerGraph:
    """One LLM transformer layer generating a single token per sequence.

    The attention context is seq_in + decode_pos; the KV cache grows by one token.

    Raises:
        WorkloadError: If the model is not an LLM or decode_pos < 1.
    """
    _require_family(model, ModelFamily.LLM, "build_llm_decode_layer")
    if params.decode_pos < 1:
        raise WorkloadError(f"decode_pos must be >= 1, got {params.decode_pos}")
    return _llm_layer(model, params, 1, params.context_length, "decode")


def dit_tokens(model: ModelConfig, resolution: int) -> int:
    """Latent patch count for a square image.

    Raises:
        WorkloadError: If the resolution does not divide into whole patches.
    """
    stride = model.vae_downsample * model.patch_size
    if resolution % stride:
        raise WorkloadError(
            f"image resolution {resolution} is not divisible by vae_downsample x patch_size = {stride}"
        )
    return (resolution // stride) ** 2


def build_dit_block(model: ModelConfig, params: InferenceParams) -> LayerGraph:
    """One DiT block with adaLN conditioning, attention and a tanh-GeLU FFN.

    Raises:
        WorkloadError: If the model is not a DiT or the resolution is not patchable.
    """
    _require_family(model, ModelFamily.DIT, "build_dit_block")
    T = dit_tokens(model, params.image_resolution)
    B = params.batch
    d = model.d_model
    prec = params.precision
    activations = B * T * d

    def vec(name, kind, *deps):
        return Operator(name, kind, Category.NORM_ELEMENTWISE, prec, tuple(deps))

    attention, ffn = _attention_and_ffn(model, params, T, T, "modulate1", "modulate2")
    ops = [
        # adaLN: one d -> 6d projection yields shift/scale/gate for both branches
        Operator("cond", Gemm(B, 1, d, 6 * d, weight_shared=True), Category.CONDITIONING, prec),
        vec("ln1", LayerNorm(B * T, d)),
        vec("modulate1", Elementwise(activations, 2), "ln1", "cond"),
        *attention,
        vec("gate1", Elementwise(activations, 1), "proj", "cond"),
        vec("residual1", Elementwise(activations, 1), "gate1"),
        vec("ln2", LayerNorm(B * T, d), "residual1"),
        vec("modulate2", Elementwise(activations, 2), "ln2", "cond"),
        *ffn,
        vec("gate2", Elementwise(activations, 1), "ffn2", "cond"),
        vec("residual2", Elementwise(activations, 1), "gate2", "residual1"),
    ]
    meta = {
        "model": model.name,
        "family": model.family.value,
        "stage": "block",
        "batch": B,
        "heads": model.n_heads,
        "tokens": T,
        "context": T,
        "precision": prec.value,
    }
    return LayerGraph(name=f"{model.name}-block", ops=tuple(ops), meta=meta)


def build_layer(model: ModelConfig, params: InferenceParams, stage: str) -> LayerGraph:
    """Dispatch on stage name: prefill, decode or block."""
    builders = {
        "prefill": build_llm_prefill_layer,
        "decode": build_llm_decode_layer,
        "block": build_dit_block,
    }
    if stage not in builders:
        raise WorkloadError(f"Unknown stage '{stage}' (expected one of {', '.join(builders)})")
    return builders[stage](model, params)
