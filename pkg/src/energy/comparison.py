"""MXU energy comparison between two configs."""
from typing import Union

from src.hardware import TpuConfig
from src.workload import LayerGraph, Operator

Workload = Union[Operator, LayerGraph]


def mxu_energy(workload: Workload, cfg: TpuConfig) -> float:
    """MXU joules of an operator or a whole layer, every operator on its best mapping."""
    # Imported here: the mapper charges energy through this package
    from src.mapping import best_mapping, evaluate_graph

    if isinstance(workload, LayerGraph):
        return evaluate_graph(workload, cfg).total.energy.mxu_j
    return best_mapping(workload, cfg)[1].energy.mxu_j


def mxu_energy_ratio(workload: Workload, cfg_a: TpuConfig, cfg_b: TpuConfig) -> float:
    """MXU energy of ``workload`` on ``cfg_a`` over that on ``cfg_b``.

    Args:
        workload: A single operator or a layer graph
        cfg_a: Numerator config, typically the digital baseline
        cfg_b: Denominator config

    Raises:
        ValueError: If the workload spends no MXU energy on ``cfg_b``.
    """
    energy_b = mxu_energy(workload, cfg_b)
    if energy_b == 0:
        raise ValueError(f"{workload.name!r} uses no MXU energy on {cfg_b.name}")
    return mxu_energy(workload, cfg_a) / energy_b
