"""Tensor/pipeline parallelism plans for up to four devices."""
from dataclasses import dataclass
from typing import Optional

from src.search import suggest_names

ALLOWED_DEVICES = (1, 2, 4)
MAX_PIPELINE_STAGES = 4


class ParallelismError(Exception):
    """Error during parallelism planning or sharding."""

    pass


@dataclass(frozen=True)
class ParallelismPlan:
    """How a model is spread over devices on the ICI ring.

    ``microbatches`` defaults to ``pp_stages`` so every stage is busy in steady state.
    """

    tp_degree: int = 1
    pp_stages: int = 1
    microbatches: Optional[int] = None

    def __post_init__(self):
        if self.microbatches is None:
            object.__setattr__(self, "microbatches", self.pp_stages)
        if self.tp_degree < 1 or self.pp_stages < 1:
            raise ParallelismError(
                f"tp_degree and pp_stages must be >= 1, got tp={self.tp_degree}, pp={self.pp_stages}"
            )
        if self.devices not in ALLOWED_DEVICES:
            raise ParallelismError(f"plans use 1, 2 or 4 devices, got {self.devices}")
        if self.pp_stages > MAX_PIPELINE_STAGES:
            raise ParallelismError(f"at most {MAX_PIPELINE_STAGES} pipeline stages, got {self.pp_stages}")
        if self.microbatches < 1:
            raise ParallelismError(f"microbatches must be >= 1, got {self.microbatches}")

    @property
    def devices(self) -> int:
        return self.tp_degree * self.pp_stages

    @property
    def name(self) -> str:
        for name, plan in NAMED_PLANS.items():
            if plan == self:
                return name
        return f"tp{self.tp_degree}-pp{self.pp_stages}-m{self.microbatches}"


NAMED_PLANS: dict[str, ParallelismPlan] = {
    "single": ParallelismPlan(),
    "tp2": ParallelismPlan(tp_degree=2),
    "pp2": ParallelismPlan(pp_stages=2),
    "tp4": ParallelismPlan(tp_degree=4),
    "pp4": ParallelismPlan(pp_stages=4),
}


def plan_by_name(name: str) -> ParallelismPlan:
    """Look up a named plan.

    Raises:
        ParallelismError: If the name is unknown; the message lists close matches.
    """
    key = name.strip().lower()
    if key in NAMED_PLANS:
        return NAMED_PLANS[key]
    suggestions = suggest_names(name, list(NAMED_PLANS), source="plan")
    hint = f" Did you mean: {', '.join(suggestions)}?" if suggestions else ""
    raise ParallelismError(f"Unknown parallelism plan '{name}'.{hint}")


def plans_for_devices(devices: int) -> list[ParallelismPlan]:
    """Named plans using exactly ``devices`` devices, tensor parallel first."""
    return [plan for plan in NAMED_PLANS.values() if plan.devices == devices]
