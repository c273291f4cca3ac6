"""End-to-end inference latency, throughput and energy across devices."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil
from typing import Optional, Sequence

from loguru import logger

from src.config import get_settings
from src.energy import EnergyBreakdown
from src.hardware import TpuConfig
from src.mapping import evaluate_graph
from src.memory import p2p_cycles
from src.workload import InferenceParams, ModelConfig, ModelFamily, WorkloadError, build_layer

from .plan import ParallelismError, ParallelismPlan
from .sharding import shard_graph


class CapacityError(Exception):
    """Error during capacity checks: the workload does not fit device memory."""

    pass


@dataclass(frozen=True)
class PhaseCost:
    """Latency and whole-system energy of one inference phase."""

    name: str
    cycles: float
    seconds: float
    energy: EnergyBreakdown

    def __add__(self, other: "PhaseCost") -> "PhaseCost":
        return PhaseCost(
            name=self.name,
            cycles=self.cycles + other.cycles,
            seconds=self.seconds + other.seconds,
            energy=self.energy + other.energy,
        )

    def scaled(self, factor: int) -> "PhaseCost":
        return PhaseCost(self.name, self.cycles * factor, self.seconds * factor, self.energy.scaled(factor))


@dataclass(frozen=True)
class EndToEndReport:
    """Whole-inference cost of one model on one config under one plan."""

    model: str
    config: str
    plan: str
    devices: int
    phases: tuple[PhaseCost, ...]
    items: int
    unit: str  # "tokens" or "images"

    @property
    def latency_s(self) -> float:
        return sum(phase.seconds for phase in self.phases)

    @property
    def cycles(self) -> float:
        return sum(phase.cycles for phase in self.phases)

    @property
    def energy(self) -> EnergyBreakdown:
        total = EnergyBreakdown()
        for phase in self.phases:
            total = total + phase.energy
        return total

    @property
    def throughput(self) -> float:
        """Tokens (or images) per second; zero when nothing is produced."""
        if self.items == 0 or self.latency_s == 0:
            return 0.0
        return self.items / self.latency_s

    @property
    def average_mxu_power_w(self) -> float:
        return self.energy.mxu_j / self.latency_s if self.latency_s else 0.0

    def phase(self, name: str) -> PhaseCost:
        for phase in self.phases:
            if phase.name == name:
                return phase
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "config": self.config,
            "plan": self.plan,
            "devices": self.devices,
            "latency_s": self.latency_s,
            f"{self.unit}_per_s": self.throughput,
            "energy": self.energy.as_dict(),
            "phases": {
                phase.name: {"latency_s": phase.seconds, "energy_j": phase.energy.total}
                for phase in self.phases
            },
        }


def pipeline_latency(stage_cycles: Sequence[float], microbatches: int, p2p: float) -> float:
    """Synchronous pipeline: (m + S - 1) x slowest stage + (S - 1) stage-to-stage hops.

    Raises:
        ParallelismError: If there are no stages or no microbatches.
    """
    if not stage_cycles:
        raise ParallelismError("pipeline needs at least one stage")
    if microbatches < 1:
        raise ParallelismError(f"microbatches must be >= 1, got {microbatches}")
    stages = len(stage_cycles)
    return (microbatches + stages - 1) * max(stage_cycles) + (stages - 1) * p2p


def kv_cache_bytes(model: ModelConfig, params: InferenceParams, plan: ParallelismPlan) -> float:
    """KV cache held by each device at the end of generation."""
    tokens = params.seq_in + params.out_len
    total = 2 * params.batch * tokens * model.d_model * params.precision.bytes * model.n_layers
    return total / plan.devices


def check_kv_capacity(model: ModelConfig, params: InferenceParams, plan: ParallelismPlan, cfg: TpuConfig):
    """Raise CapacityError if the per-device KV cache exceeds HBM."""
    needed = kv_cache_bytes(model, params, plan)
    if needed > cfg.hbm_bytes:
        raise CapacityError(
            f"KV cache needs {needed / 2**30:.2f} GiB per device, "
            f"over the {cfg.hbm_bytes / 2**30:.2f} GiB of HBM on {cfg.name}"
        )


def _microbatch_params(params: InferenceParams, plan: ParallelismPlan) -> InferenceParams:
    if params.batch % plan.microbatches:
        raise ParallelismError(f"batch {params.batch} does not split into {plan.microbatches} microbatches")
    return params.with_batch(params.batch // plan.microbatches)


def _stage_cost(
    model: ModelConfig,
    params: InferenceParams,
    stage: str,
    plan: ParallelismPlan,
    cfg: TpuConfig,
) -> PhaseCost:
    """One pass of every layer for the full batch, pipelined over the plan's stages."""
    micro = _microbatch_params(params, plan)
    graph = shard_graph(build_layer(model, micro, stage), plan.tp_degree)
    layer = evaluate_graph(graph, cfg, threads=1).total

    layers_per_stage = ceil(model.n_layers / plan.pp_stages)
    tokens = graph.meta["tokens"]
    hop_bytes = micro.batch * tokens * model.d_model * micro.precision.bytes
    hop = p2p_cycles(hop_bytes, cfg.ici_bytes_per_cycle) if plan.pp_stages > 1 else 0.0

    stage_cycles = [layers_per_stage * layer.cycles] * plan.pp_stages
    cycles = pipeline_latency(stage_cycles, plan.microbatches, hop)

    # Every device of every stage runs its share of each layer once per microbatch
    energy = layer.energy.scaled(model.n_layers * plan.microbatches * plan.tp_degree)
    hops = (plan.pp_stages - 1) * plan.microbatches
    energy = energy + EnergyBreakdown(ici_j=hops * hop_bytes * cfg.energy.ici_energy)
    return PhaseCost(name=stage, cycles=cycles, seconds=cycles / cfg.frequency, energy=energy)


def decode_positions(out_len: int, stride: int = 1) -> list[tuple[int, int]]:
    """(position, weight) pairs covering 1..out_len.

    ``stride`` > 1 evaluates every stride-th position and lets it stand for the
    positions up to the next sample.
    """
    if stride < 1:
        raise ParallelismError(f"decode stride must be >= 1, got {stride}")
    samples = list(range(1, out_len + 1, stride))
    return [(pos, min(stride, out_len - pos + 1)) for pos in samples]


def llm_end_to_end(
    model: ModelConfig,
    params: InferenceParams,
    plan: ParallelismPlan,
    cfg: TpuConfig,
    decode_stride: int = 1,
    threads: Optional[int] = None,
) -> EndToEndReport:
    """Prefill the prompt, then decode ``params.out_len`` tokens one step at a time.

    Every decode step sees a context one token longer than the previous one.

    Args:
        model: LLM backbone
        params: batch, seq_in, out_len and precision are used
        plan: Parallelism plan
        cfg: Per-device hardware config
        decode_stride: Evaluate every n-th decode position only (1 = exact)
        threads: Concurrent decode-step evaluations; defaults to settings

    Raises:
        CapacityError: If the KV cache does not fit HBM.
        ParallelismError: If the plan does not divide the model or batch.
    """
    if model.family is not ModelFamily.LLM:
        raise WorkloadError(f"llm_end_to_end needs an LLM, got '{model.name}'")
    check_kv_capacity(model, params, plan, cfg)

    prefill = _stage_cost(model, params, "prefill", plan, cfg)
    phases = [prefill]
    if params.out_len:
        positions = decode_positions(params.out_len, decode_stride)
        threads = threads or get_settings().threads

        def step(item: tuple[int, int]) -> PhaseCost:
            pos, weight = item
            return _stage_cost(model, params.at_decode_position(pos), "decode", plan, cfg).scaled(weight)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                steps = list(pool.map(step, positions))
        else:
            steps = [step(item) for item in positions]
        decode = steps[0]
        for cost in steps[1:]:
            decode = decode + cost
        phases.append(decode)

    logger.debug(
        "{} on {} ({}): prefill {:.4f}s, {} decode steps",
        model.name, cfg.name, plan.name, prefill.seconds, params.out_len,
    )
    return EndToEndReport(
        model=model.name,
        config=cfg.name,
        plan=plan.name,
        devices=plan.devices,
        phases=tuple(phases),
        items=params.batch * params.out_len,
        unit="tokens",
    )


def dit_end_to_end(
    model: ModelConfig,
    params: InferenceParams,
    plan: ParallelismPlan,
    cfg: TpuConfig,
    n_steps: Optional[int] = None,
) -> EndToEndReport:
    """``n_steps`` denoising steps, each running every DiT block once.

    Raises:
        ParallelismError: If the plan does not divide the model or batch.
    """
    if model.family is not ModelFamily.DIT:
        raise WorkloadError(f"dit_end_to_end needs a DiT, got '{model.name}'")
    n_steps = n_steps or get_settings().diffusion_steps
    step = _stage_cost(model, params, "block", plan, cfg)
    denoise = PhaseCost("denoise", step.cycles, step.seconds, step.energy).scaled(n_steps)
    return EndToEndReport(
        model=model.name,
        config=cfg.name,
        plan=plan.name,
        devices=plan.devices,
        phases=(denoise,),
        items=params.batch,
        unit="images",
    )
