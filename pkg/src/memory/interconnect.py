"""Inter-chip (ICI) collective timing on a ring of devices."""


class InterconnectError(Exception):
    """Error during collective timing."""

    pass


def allreduce_traffic(bytes_: float, n: int) -> float:
    """Bytes each device sends in a ring all-reduce (reduce-scatter + all-gather)."""
    return 2 * (n - 1) / n * bytes_


def allreduce_cycles(bytes_: float, n: int, link_bw_bytes_per_cycle: float, links: int) -> float:
    """Ring all-reduce: 2(n-1)/n x bytes over ``links`` parallel links.

    Raises:
        InterconnectError: If fewer than two devices take part or no link is available.
    """
    if n < 2:
        raise InterconnectError(f"all-reduce needs at least 2 devices, got {n}")
    if links < 1 or link_bw_bytes_per_cycle <= 0:
        raise InterconnectError("all-reduce needs at least one ICI link with bandwidth")
    return allreduce_traffic(bytes_, n) / (links * link_bw_bytes_per_cycle)


def p2p_cycles(bytes_: float, link_bw_bytes_per_cycle: float) -> float:
    """Point-to-point transfer to the next ring neighbour over one link."""
    if link_bw_bytes_per_cycle <= 0:
        raise InterconnectError("point-to-point transfer needs link bandwidth")
    return bytes_ / link_bw_bytes_per_cycle
