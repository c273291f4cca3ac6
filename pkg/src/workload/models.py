"""Generative model and inference parameter descriptions, plus the model catalog."""
import json
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.search import resolve_alias, suggest_names

from .operators import Precision

DATA_FILE = Path(__file__).resolve().parent.parent.parent / "data" / "models.json"

MODEL_ALIASES = {
    "gpt3": "gpt3-30b",
    "gpt-3": "gpt3-30b",
    "gpt3-30": "gpt3-30b",
    "dit": "dit-xl-2",
    "dit-xl/2": "dit-xl-2",
    "llama2": "llama2-13b",
}


class WorkloadError(Exception):
    """Error during workload construction."""

    pass


class ModelFamily(str, Enum):
    LLM = "llm"
    DIT = "dit"


class ModelConfig(BaseModel):
    """Transformer backbone description."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "custom"
    family: ModelFamily
    n_layers: int = Field(ge=1)
    n_heads: int = Field(ge=1)
    d_model: int = Field(ge=1)
    ffn_ratio: float = Field(default=4.0, gt=0)
    patch_size: int = Field(default=2, ge=1)
    vae_downsample: int = Field(default=8, ge=1)

    @field_validator("family", mode="before")
    @classmethod
    def _lower_family(cls, value):
        return value.lower() if isinstance(value, str) else value

    @model_validator(mode="after")
    def _check_heads(self):
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model {self.d_model} is not divisible by n_heads {self.n_heads}")
        if self.ffn_hidden < 1:
            raise ValueError("ffn_ratio x d_model must be at least 1")
        return self

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads

    @property
    def ffn_hidden(self) -> int:
        return round(self.d_model * self.ffn_ratio)


class InferenceParams(BaseModel):
    """Batch, sequence and precision settings for one evaluation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    batch: int = Field(default=8, ge=1)
    seq_in: int = Field(default=1024, ge=1)
    decode_pos: int = Field(default=1, ge=0)
    out_len: int = Field(default=0, ge=0)
    image_resolution: int = Field(default=512, ge=1)
    precision: Precision = Precision.INT8

    @property
    def context_length(self) -> int:
        """Attention context at the current decode position."""
        return self.seq_in + self.decode_pos

    def at_decode_position(self, position: int) -> "InferenceParams":
        return self.model_copy(update={"decode_pos": position})

    def with_batch(self, batch: int) -> "InferenceParams":
        return self.model_copy(update={"batch": batch})


@lru_cache(maxsize=1)
def load_builtin_models() -> dict[str, ModelConfig]:
    """Load and cache the built-in model catalog from JSON.

    Returns dict of name -> ModelConfig in file order.
    """
    if not DATA_FILE.exists():
        return {}
    with open(DATA_FILE) as f:
        data = json.load(f)
    return {
        entry["name"]: ModelConfig.model_validate(entry)
        for entry in data.get("models", [])
    }


def builtin_model(name: str) -> ModelConfig:
    """Look up a built-in model by name or alias.

    Raises:
        WorkloadError: If the name is unknown; the message lists close matches.
    """
    models = load_builtin_models()
    if name in models:
        return models[name]
    target = resolve_alias(name, MODEL_ALIASES)
    if target in models:
        return models[target]

    suggestions = suggest_names(name, models, source="model", aliases=MODEL_ALIASES)
    hint = f" Did you mean: {', '.join(suggestions)}?" if suggestions else ""
    raise WorkloadError(f"Unknown model '{name}'.{hint}")


def parse_model(text: str) -> ModelConfig:
    """Parse a JSON model document (``family``, ``layers``, ``heads``, ``d_model``, ...).

    ``layers`` and ``heads`` are accepted as short forms of ``n_layers``/``n_heads``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkloadError(f"Invalid model JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise WorkloadError("Model document must be a JSON object")

    for short, full in (("layers", "n_layers"), ("heads", "n_heads")):
        if short in doc:
            doc[full] = doc.pop(short)
    try:
        return ModelConfig.model_validate(doc)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "model"
        raise WorkloadError(f"Invalid model '{field}': {first['msg']}") from e


def load_model(source: Union[str, Path]) -> ModelConfig:
    """Load a model from a JSON file, or fall back to a built-in name."""
    path = Path(source)
    if path.suffix == ".json" or path.is_file():
        try:
            return parse_model(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise WorkloadError(f"Failed to read model file {path}: {e}") from e
    return builtin_model(str(source))


def model_names() -> list[str]:
    return list(load_builtin_models())

