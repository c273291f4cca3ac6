"""Load/compute overlap for tiled execution.

A tiled loop is a sequence of steps, each with a read, a compute and an optional
write-back. Double buffering reads step i+1 (and writes back step i-1) while
step i computes. ``PipelineSegment`` summarizes a step sequence so long uniform
sequences are combined in constant time.
"""
from dataclasses import dataclass
from typing import Sequence


class PipelineError(Exception):
    """Error during pipeline overlap evaluation."""

    pass


@dataclass(frozen=True)
class PipelineSegment:
    """Summary of a step sequence.

    ``inner`` is the sum over consecutive step pairs (a, b) of
    max(a.compute, b.read + a.write).
    """

    first_read: float
    last_compute: float
    last_write: float
    inner: float
    serial: float
    steps: int

    @classmethod
    def step(cls, compute: float, read: float, write: float = 0) -> "PipelineSegment":
        return cls(
            first_read=read,
            last_compute=compute,
            last_write=write,
            inner=0,
            serial=compute + read + write,
            steps=1,
        )

    def then(self, other: "PipelineSegment") -> "PipelineSegment":
        boundary = max(self.last_compute, other.first_read + self.last_write)
        return PipelineSegment(
            first_read=self.first_read,
            last_compute=other.last_compute,
            last_write=other.last_write,
            inner=self.inner + other.inner + boundary,
            serial=self.serial + other.serial,
            steps=self.steps + other.steps,
        )

    def repeat(self, times: int) -> "PipelineSegment":
        if times < 1:
            raise PipelineError(f"repeat count must be >= 1, got {times}")
        boundary = max(self.last_compute, self.first_read + self.last_write)
        return PipelineSegment(
            first_read=self.first_read,
            last_compute=self.last_compute,
            last_write=self.last_write,
            inner=times * self.inner + (times - 1) * boundary,
            serial=times * self.serial,
            steps=times * self.steps,
        )

    def total(self, double_buffered: bool) -> float:
        if not double_buffered:
            return self.serial
        return self.first_read + self.inner + self.last_compute + self.last_write


def chain(segments: Sequence[PipelineSegment]) -> PipelineSegment:
    """Concatenate segments in order.

    Raises:
        PipelineError: If there are no segments.
    """
    if not segments:
        raise PipelineError("cannot chain an empty sequence of segments")
    result = segments[0]
    for segment in segments[1:]:
        result = result.then(segment)
    return result


def pipeline_overlap(compute: Sequence[float], load: Sequence[float], double_buffered: bool) -> float:
    """Total cycles of a tile loop with per-step compute and load times.

    Double buffered: load[0] + sum_i max(compute[i], load[i+1]) + compute[-1].
    Otherwise every load and compute runs back to back.

    Raises:
        PipelineError: If the lists are empty or of different lengths.
    """
    if len(compute) != len(load):
        raise PipelineError(f"compute and load lengths differ: {len(compute)} != {len(load)}")
    if not compute:
        raise PipelineError("pipeline needs at least one step")
    return chain([PipelineSegment.step(c, l) for c, l in zip(compute, load)]).total(double_buffered)
