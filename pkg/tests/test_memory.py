"""Tests for transfer timing, load/compute overlap and ICI collectives."""
import pytest

from src.memory import (
    InterconnectError,
    Level,
    PipelineError,
    PipelineSegment,
    TransferError,
    TransferLeg,
    allreduce_cycles,
    allreduce_traffic,
    chain,
    coalesced_bytes,
    p2p_cycles,
    pipeline_overlap,
    transfer_cycles,
)


# --- Transfer ---

class TestTransferCycles:
    def test_exact_multiple(self):
        assert transfer_cycles(TransferLeg(Level.HBM_CMEM, 1024, 128.0)) == 8

    def test_partial_cycle_rounds_up(self):
        assert transfer_cycles(TransferLeg(Level.HBM_CMEM, 1025, 128.0)) == 9

    def test_float_bandwidth_exact_multiple(self):
        assert transfer_cycles(TransferLeg(Level.CMEM_VMEM, 300, 0.1 * 1000)) == 3

    def test_latency_added(self):
        assert transfer_cycles(TransferLeg(Level.CMEM_VMEM, 64, 64.0, latency=5)) == 6

    def test_empty_transfer_is_free(self):
        assert transfer_cycles(TransferLeg(Level.HBM_CMEM, 0, 1.0, latency=50)) == 0

    def test_zero_bandwidth(self):
        with pytest.raises(TransferError, match="hbm_cmem"):
            transfer_cycles(TransferLeg(Level.HBM_CMEM, 10, 0.0))

    def test_negative_bytes(self):
        with pytest.raises(ValueError):
            TransferLeg(Level.HBM_CMEM, -1, 1.0)


class TestCoalescing:
    def test_contiguous_tile_rounds_once(self):
        assert coalesced_bytes(4, 100, 100) == 448

    def test_strided_tile_pays_per_row(self):
        assert coalesced_bytes(4, 100, 1000) == 4 * 128

    def test_aligned_rows_have_no_overhead(self):
        assert coalesced_bytes(8, 256, 4096) == 8 * 256

    def test_never_below_payload(self):
        for rows, row_bytes, full in [(1, 1, 2), (3, 65, 130), (7, 129, 129)]:
            assert coalesced_bytes(rows, row_bytes, full) >= rows * row_bytes


# --- Pipeline ---

class TestPipelineOverlap:
    def test_compute_bound_hides_loads(self):
        assert pipeline_overlap([3, 3, 3], [1, 1, 1], double_buffered=True) == 10

    def test_serial(self):
        assert pipeline_overlap([3, 3, 3], [1, 1, 1], double_buffered=False) == 12

    def test_load_bound(self):
        assert pipeline_overlap([1, 1], [5, 5], double_buffered=True) == 5 + 5 + 1

    def test_single_step(self):
        assert pipeline_overlap([4], [2], double_buffered=True) == 6

    def test_double_buffering_never_slower(self):
        compute = [5, 1, 7, 2, 2]
        load = [3, 6, 1, 4, 2]
        assert pipeline_overlap(compute, load, True) <= pipeline_overlap(compute, load, False)

    def test_mismatched_lengths(self):
        with pytest.raises(PipelineError, match="differ"):
            pipeline_overlap([1, 2], [1], True)

    def test_empty(self):
        with pytest.raises(PipelineError):
            pipeline_overlap([], [], True)


class TestPipelineSegment:
    def test_write_back_overlaps_next_read(self):
        segment = PipelineSegment.step(compute=2, read=1, write=1).repeat(3)
        assert segment.steps == 3
        assert segment.total(double_buffered=True) == 8
        assert segment.total(double_buffered=False) == 12

    def test_repeat_matches_chain(self):
        step = PipelineSegment.step(compute=4, read=3, write=2)
        assert step.repeat(5) == chain([step] * 5)

    def test_nested_repeat_matches_flat(self):
        a = PipelineSegment.step(compute=1, read=6)
        b = PipelineSegment.step(compute=9, read=2, write=1)
        nested = chain([a, b]).repeat(3)
        flat = chain([a, b, a, b, a, b])
        assert nested.total(True) == flat.total(True)

    def test_repeat_rejects_zero(self):
        with pytest.raises(PipelineError):
            PipelineSegment.step(1, 1).repeat(0)

    def test_chain_rejects_empty(self):
        with pytest.raises(PipelineError, match="empty"):
            chain([])


# --- Interconnect ---

class TestCollectives:
    def test_two_devices_one_link(self):
        assert allreduce_cycles(1000, 2, 10.0, 1) == pytest.approx(100.0)

    def test_four_devices_two_links(self):
        assert allreduce_cycles(1000, 4, 10.0, 2) == pytest.approx(1.5 * 1000 / 20)

    def test_traffic_approaches_twice_payload(self):
        assert allreduce_traffic(100, 64) == pytest.approx(2 * 63 / 64 * 100)

    def test_single_device_rejected(self):
        with pytest.raises(InterconnectError, match="at least 2"):
            allreduce_cycles(10, 1, 1.0, 1)

    def test_no_links_rejected(self):
        with pytest.raises(InterconnectError):
            allreduce_cycles(10, 2, 1.0, 0)

    def test_p2p(self):
        assert p2p_cycles(800, 8.0) == pytest.approx(100.0)
        with pytest.raises(InterconnectError):
            p2p_cycles(1, 0)
