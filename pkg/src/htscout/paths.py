"""Structural path enumeration and SAT-based sensitization.

A path runs from a primary-input net to a primary-output net; hops are
the logic gates along it together with the input pin the signal enters
on.  Only sensitizable paths are useful for delay comparison, so every
enumerated path can be checked against the static (non-controlling
side-input) criterion via a CNF query.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum

from .cnf import CnfBuilder, add_sensitization_units, encode_netlist
from .netlist import GateKind, Netlist
from .sat import SAT, UNKNOWN

logger = logging.getLogger("htscout")

RISE = "rise"
FALL = "fall"


class SensitizationCriterion(Enum):
    NON_CONTROLLING = "non-controlling"


@dataclass(frozen=True)
class Path:
    hops: tuple[tuple[str, int], ...]  # (gate id, on-path input pin)
    nets: tuple[str, ...]  # start net, then each hop's output net
    kinds: tuple[GateKind, ...]

    @property
    def start(self) -> str:
        return self.nets[0]

    @property
    def end(self) -> str:
        return self.nets[-1]

    @property
    def length(self) -> int:
        return len(self.hops)

    @property
    def gate_ids(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.hops)

    def __repr__(self) -> str:
        return f"Path({'->'.join(self.nets)})"


@dataclass(frozen=True)
class PathSet:
    paths: tuple[Path, ...]
    truncated: bool = False


@dataclass(frozen=True)
class PathLimits:
    max_paths: int = 10_000
    max_length: int = 64

    def __post_init__(self):
        if self.max_paths < 1 or self.max_length < 1:
            raise ValueError("path limits must be positive")


class _Flag:
    __slots__ = ("truncated",)

    def __init__(self):
        self.truncated = False


def _prefixes(nl: Netlist, net: str, depth_left: int, flag: _Flag):
    """Partial paths from any primary input down to ``net`` (inclusive)."""
    driver = nl.driver_of(net)
    if driver.kind is GateKind.INPUT:
        if net not in nl.tie_values:
            yield (), (net,)
        return
    if depth_left <= 0:
        flag.truncated = True
        return
    for pin, in_net in enumerate(driver.input_nets):
        if in_net in nl.tie_values:
            continue
        for hops, nets in _prefixes(nl, in_net, depth_left - 1, flag):
            yield hops + ((driver.id, pin),), nets + (net,)


def _suffixes(nl: Netlist, net: str, depth_left: int, flag: _Flag):
    """Partial paths from ``net`` (inclusive) up to any primary output."""
    if net in nl.primary_outputs:
        yield (), (net,)
    for sink_id, pin in nl.sinks_of(net):
        gate = nl.gates[sink_id]
        if depth_left <= 0:
            flag.truncated = True
            return
        for hops, nets in _suffixes(nl, gate.output_net, depth_left - 1, flag):
            yield ((sink_id, pin),) + hops, (net,) + nets


def _capped(gen, cap: int, flag: _Flag) -> list:
    out = []
    for item in gen:
        if len(out) >= cap:
            flag.truncated = True
            break
        out.append(item)
    return out


def _make_path(nl: Netlist, hops, nets) -> Path:
    kinds = tuple(nl.gates[g].kind for g, _ in hops)
    return Path(hops=hops, nets=nets, kinds=kinds)


def enumerate_paths(nl: Netlist, net: str, limits: PathLimits = PathLimits()) -> PathSet:
    """All structural input-to-output paths whose net list contains ``net``.

    Backward search collects prefixes, forward search suffixes; their
    cross product is capped at the limits with a truncation flag.
    """
    if net not in nl.nets:
        raise KeyError(f"unknown net {net!r}")
    flag = _Flag()
    prefixes = _capped(_prefixes(nl, net, limits.max_length, flag), limits.max_paths, flag)
    suffixes = _capped(_suffixes(nl, net, limits.max_length, flag), limits.max_paths, flag)
    paths: list[Path] = []
    for p_hops, p_nets in prefixes:
        for s_hops, s_nets in suffixes:
            if len(p_hops) + len(s_hops) > limits.max_length:
                flag.truncated = True
                continue
            if len(paths) >= limits.max_paths:
                return PathSet(tuple(paths), True)
            paths.append(_make_path(nl, p_hops + s_hops, p_nets + s_nets[1:]))
    return PathSet(tuple(paths), flag.truncated)


def enumerate_all_paths(nl: Netlist, limits: PathLimits = PathLimits()) -> PathSet:
    """Every input-to-output path of the design, grouped by ending output."""
    flag = _Flag()
    paths: list[Path] = []
    for po in nl.primary_outputs:
        for hops, nets in _prefixes(nl, po, limits.max_length, flag):
            if len(paths) >= limits.max_paths:
                return PathSet(tuple(paths), True)
            paths.append(_make_path(nl, hops, nets))
    return PathSet(tuple(paths), flag.truncated)


def transition_polarity(path: Path, nl: Netlist, input_transition: str) -> list[str]:
    """Transition seen at each hop: the input edge flipped by the parity
    of inverting gates encountered before that hop."""
    if input_transition not in (RISE, FALL):
        raise ValueError(f"unknown transition {input_transition!r}")
    out: list[str] = []
    flipped = input_transition == FALL
    for gate_id, _pin in path.hops:
        out.append(FALL if flipped else RISE)
        if nl.gates[gate_id].kind.inverts:
            flipped = not flipped
    return out


def sensitization_cnf(nl: Netlist, path: Path) -> CnfBuilder:
    builder = CnfBuilder()
    var_of = encode_netlist(nl, builder)
    add_sensitization_units(builder, nl, path.hops, var_of)
    return builder


def is_sensitizable(
    nl: Netlist,
    path: Path,
    criterion: SensitizationCriterion = SensitizationCriterion.NON_CONTROLLING,
    timeout_s: float | None = 10.0,
) -> bool:
    """True iff some input vector holds every off-path side input at a
    non-controlling value.  A solver timeout counts as non-sensitizable
    (conservative for suspect-path selection) and logs a warning."""
    if criterion is not SensitizationCriterion.NON_CONTROLLING:
        raise ValueError(f"unsupported criterion {criterion}")
    result = sensitization_cnf(nl, path).solve(timeout_s=timeout_s)
    if result.status == UNKNOWN:
        logger.warning("sensitization query timed out for %r; treating as false", path)
        return False
    return result.status == SAT


def to_jsonl(records: list[tuple[Path, bool]]) -> str:
    """One JSON object per path: net sequence, gate sequence, verdict."""
    lines = []
    for path, sens in records:
        lines.append(
            json.dumps(
                {
                    "net_sequence": list(path.nets),
                    "gate_sequence": list(path.gate_ids),
                    "sensitizable": sens,
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")
