"""Switching-activity profiling under random stimulus.

Low-activity nets are the assumed Trojan insertion sites: a stealthy
payload wants a net that rarely toggles.  Activity is the toggle rate
between consecutive random vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import Netlist
from .sim import evaluate_words, random_input_words


@dataclass(frozen=True)
class ActivityProfile:
    vectors_applied: int
    toggles: dict[str, int]
    activity: dict[str, float]
    input_nets: tuple[str, ...]
    tie_nets: tuple[str, ...]

    def to_csv(self) -> str:
        lines = ["net,toggles,activity"]
        for net in self.activity:
            lines.append(f"{net},{self.toggles[net]},{self.activity[net]!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VulnerableNetSet:
    threshold: float
    nets: tuple[str, ...]  # ascending activity, ties by net id


def simulate_random(
    netlist: Netlist,
    vector_count: int,
    seed: int,
    batch: int = 1 << 16,
) -> ActivityProfile:
    """Count toggles of every net over ``vector_count`` random vectors.

    Vectors are generated counter-based from the seed, so the result does
    not depend on the batch size used to stream them.
    """
    if vector_count < 2:
        raise ValueError("need at least two vectors to observe a toggle")
    toggles = {net: 0 for net in netlist.nets}
    prev_bits: dict[str, int] | None = None
    for lo in range(0, vector_count, batch):
        hi = min(lo + batch, vector_count)
        n = hi - lo
        words = random_input_words(netlist, seed, lo, hi)
        values = evaluate_words(netlist, words, n)
        if prev_bits is None:
            pair_mask = (1 << (n - 1)) - 1
            for net in toggles:
                w = values[net]
                toggles[net] += ((w ^ (w >> 1)) & pair_mask).bit_count()
        else:
            pair_mask = (1 << n) - 1
            for net in toggles:
                full = (values[net] << 1) | prev_bits[net]
                toggles[net] += ((full ^ (full >> 1)) & pair_mask).bit_count()
        top = n - 1
        prev_bits = {net: (values[net] >> top) & 1 for net in toggles}
    denom = vector_count - 1
    activity = {net: toggles[net] / denom for net in toggles}
    return ActivityProfile(
        vectors_applied=vector_count,
        toggles=toggles,
        activity=activity,
        input_nets=tuple(netlist.primary_inputs),
        tie_nets=tuple(netlist.tie_values),
    )


def vulnerable_nets(profile: ActivityProfile, threshold: float) -> VulnerableNetSet:
    """Nets with activity strictly below the threshold.

    Primary-input nets are excluded (a payload on an input port is outside
    the trigger/payload insertion model), as are constant tie nets.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    skip = set(profile.input_nets) | set(profile.tie_nets)
    hits = [
        (act, net)
        for net, act in profile.activity.items()
        if net not in skip and act < threshold
    ]
    hits.sort()
    return VulnerableNetSet(threshold=threshold, nets=tuple(net for _, net in hits))
