"""Shared pytest fixtures for tests."""
import pytest

from src.hardware import KIB, MIB, PRESETS, CimGrid, DigitalSystolic, TpuConfig
from src.workload import Category, Gemm, InferenceParams, Operator, Precision, builtin_model


def make_gemm(M, K, N, batch=1, weight_shared=True, precision=Precision.INT8, name="gemm"):
    """A standalone GEMM operator."""
    return Operator(
        name=name,
        kind=Gemm(batch, M, K, N, weight_shared=weight_shared),
        category=Category.QKV,
        precision=precision,
    )


def small_config(**overrides) -> TpuConfig:
    """Scaled-down chip: one 4x4 array, 4 KiB VMEM, 32 KiB CMEM."""
    fields = dict(
        name="small",
        frequency=1e9,
        mxu_count=1,
        mxu=DigitalSystolic(rows=4, cols=4),
        vmem_bytes=4 * KIB,
        cmem_bytes=32 * KIB,
        hbm_bytes=1 * MIB,
        hbm_bw=128e9,
        oci_bw=256e9,
    )
    fields.update(overrides)
    return TpuConfig(**fields)


def small_cim_grid(**overrides) -> CimGrid:
    """2x2 grid of 8-input cores holding 4 outputs each."""
    fields = dict(
        grid_rows=2,
        grid_cols=2,
        core_inputs=8,
        core_weight_cols=32,
        active_outputs_per_wave=4,
    )
    fields.update(overrides)
    return CimGrid(**fields)


@pytest.fixture
def baseline():
    return PRESETS["tpuv4i-baseline"]


@pytest.fixture
def cim():
    return PRESETS["cim-16x8-x4"]


@pytest.fixture
def small():
    return small_config()


@pytest.fixture
def small_cim():
    return small_config(name="small-cim", mxu=small_cim_grid())


@pytest.fixture
def gpt3():
    return builtin_model("gpt3-30b")


@pytest.fixture
def dit():
    return builtin_model("dit-xl-2")


@pytest.fixture
def llama():
    return builtin_model("llama2-13b")


@pytest.fixture
def reference_params():
    """B=8, 1024-token prompt, INT8."""
    return InferenceParams(batch=8, seq_in=1024)
