"""Cycle model for vector operators on the VPU.

Every cost is charged per lane-chunk: ``ceil(work / lanes)`` chunks, each paying
the pipelined cycle cost of the operations it applies.
"""
from math import ceil, log2

from src.hardware import VpuConfig


def _chunks(vpu: VpuConfig, work: int) -> int:
    return ceil(work / vpu.lanes)


def _reduction_cycles(vpu: VpuConfig, cols: int) -> int:
    """Cross-lane tree reduction over the active lanes."""
    return ceil(log2(min(cols, vpu.lanes))) * vpu.c_add


def _require_positive(**dims):
    for name, value in dims.items():
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")


def softmax_cycles(vpu: VpuConfig, rows: int, cols: int) -> int:
    """Online softmax: a fused running-max/rescaled exp-sum pass, a reduction and a normalize pass."""
    _require_positive(rows=rows, cols=cols)
    chunks = _chunks(vpu, cols)
    first_pass = chunks * (vpu.c_cmp + vpu.c_exp + vpu.c_add + vpu.c_mul)
    normalize = chunks * vpu.c_div
    return rows * (first_pass + _reduction_cycles(vpu, cols) + normalize)


def layernorm_cycles(vpu: VpuConfig, rows: int, cols: int) -> int:
    """One-pass mean/variance, a reduction, then a normalize pass."""
    _require_positive(rows=rows, cols=cols)
    chunks = _chunks(vpu, cols)
    statistics = chunks * (vpu.c_add + 2 * vpu.c_mul)
    normalize = chunks * (vpu.c_add + vpu.c_mul + vpu.c_rsqrt)
    return rows * (statistics + _reduction_cycles(vpu, cols) + normalize)


def gelu_cycles(vpu: VpuConfig, elements: int) -> int:
    """tanh-approximated GeLU: x * 0.5 * (1 + tanh(sqrt(2/pi) * (x + 0.044715 x^3)))."""
    _require_positive(elements=elements)
    return _chunks(vpu, elements) * (3 * vpu.c_mul + 2 * vpu.c_add + vpu.c_tanh)


def elementwise_cycles(vpu: VpuConfig, elements: int, ops_per_element: int = 1) -> int:
    _require_positive(elements=elements, ops_per_element=ops_per_element)
    return _chunks(vpu, elements) * ops_per_element * vpu.c_add
