"""Gate and path delays under threshold-voltage variation, plus Trojan
injection.

The delay law is multiplicative and separable: ``base(kind, edge) *
load_factor * g(vth)`` with one shared sensitivity g.  Under pure
inter-die variation every delay in the die scales by the same g, so
delays of any two paths stay exactly collinear across instances; that is
the property the detector's expected line builds on.  A Trojan payload
gate spliced into a net adds its own delay to every path through that
net, and trigger taps add capacitive load to the nets they observe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import NetlistError
from .layout import Placement
from .netlist import Gate, GateKind, Netlist, splice_chain
from .paths import FALL, RISE, Path, transition_polarity
from .tech import DEFAULT_TECH, TechTable
from .variation import VthProfile

if TYPE_CHECKING:  # pragma: no cover
    from .symmetry import SymmetricPathPair

# Tie value that makes a payload kind transparent; inverting kinds would
# change the logic function and are not valid payloads here.
_PAYLOAD_TIE = {
    GateKind.XOR: 0,
    GateKind.AND: 1,
    GateKind.OR: 0,
    GateKind.BUF: None,
}


def gate_delay(
    gate: Gate,
    profile: VthProfile,
    placement: Placement,
    transition: str,
    tech: TechTable = DEFAULT_TECH,
) -> float:
    if gate.is_pseudo:
        return 0.0
    vth = profile.vth_at(placement.cell_index(gate.id))
    g = tech.sensitivity(vth, profile.vth_nominal)
    base = gate.base_rise_delay if transition == RISE else gate.base_fall_delay
    return base * gate.load_factor * g


def resolve_path(nl: Netlist, path: Path) -> Path:
    """Map a stored path onto a possibly edited netlist.

    Gates spliced in series into the path's nets (Trojan payloads,
    created-reference chains) become extra hops; the stored gates must
    still exist.  Returns the path unchanged when the netlist was not
    edited along it.
    """
    hops: list[tuple[str, int]] = []
    nets: list[str] = [path.nets[0]]
    if path.nets[0] not in nl.nets:
        raise NetlistError(f"path start {path.nets[0]!r} missing from netlist")
    cur = path.nets[0]
    for (gid, pin), out_net in zip(path.hops, path.nets[1:]):
        gate = nl.gates.get(gid)
        if gate is None:
            raise NetlistError(f"path gate {gid!r} missing from netlist")
        in_net = gate.input_nets[pin]
        for cg, cpin in _chain_between(nl, cur, in_net):
            hops.append((cg, cpin))
            nets.append(nl.gates[cg].output_net)
        hops.append((gid, pin))
        nets.append(out_net)
        cur = out_net
    # A splice at the final net moves the output-port marker downstream.
    steps = 0
    while cur not in nl.primary_outputs:
        sinks = nl.sinks_of(cur)
        if len(sinks) != 1:
            raise NetlistError(f"path end {path.end!r} no longer reaches a port")
        gid, pin = sinks[0]
        hops.append((gid, pin))
        cur = nl.gates[gid].output_net
        nets.append(cur)
        steps += 1
        if steps > len(nl.gates):
            raise NetlistError("runaway walk while resolving path end")
    kinds = tuple(nl.gates[g].kind for g, _ in hops)
    return Path(hops=tuple(hops), nets=tuple(nets), kinds=kinds)


def _chain_between(nl: Netlist, src: str, dst: str) -> list[tuple[str, int]]:
    """Spliced gates now sitting between two formerly adjacent nets, in
    signal order.  Each spliced gate has exactly one non-constant input."""
    chain: list[tuple[str, int]] = []
    net = dst
    while net != src:
        gate = nl.driver_of(net)
        if gate.kind is GateKind.INPUT:
            raise NetlistError(f"net {dst!r} is no longer driven from {src!r}")
        pins = [
            p for p, n in enumerate(gate.input_nets) if n not in nl.tie_values
        ]
        if len(pins) != 1:
            raise NetlistError(
                f"gate {gate.id!r} between {src!r} and {dst!r} is not a splice"
            )
        chain.append((gate.id, pins[0]))
        net = gate.input_nets[pins[0]]
        if len(chain) > len(nl.gates):
            raise NetlistError("runaway walk while resolving spliced chain")
    chain.reverse()
    return chain


def path_delay(
    nl: Netlist,
    path: Path,
    profile: VthProfile,
    placement: Placement,
    input_transition: str,
    tech: TechTable = DEFAULT_TECH,
    resolve: bool = True,
) -> float:
    """Sum of per-hop gate delays with the transition edge tracked
    through inverting gates.  With ``resolve`` the stored path is first
    re-walked on the netlist so spliced-in gates contribute."""
    if resolve:
        path = resolve_path(nl, path)
    total = 0.0
    for (gid, _pin), edge in zip(
        path.hops, transition_polarity(path, nl, input_transition)
    ):
        total += gate_delay(nl.gates[gid], profile, placement, edge, tech)
    return total


def path_delay_nominal(
    nl: Netlist,
    path: Path,
    input_transition: str,
    resolve: bool = False,
) -> float:
    """Delay with the sensitivity factor pinned at one (no variation)."""
    if resolve:
        path = resolve_path(nl, path)
    total = 0.0
    for (gid, _pin), edge in zip(
        path.hops, transition_polarity(path, nl, input_transition)
    ):
        gate = nl.gates[gid]
        base = gate.base_rise_delay if edge == RISE else gate.base_fall_delay
        total += base * gate.load_factor
    return total


def path_value(
    nl: Netlist,
    path: Path,
    profile: VthProfile,
    placement: Placement,
    averaged: bool,
    transition: str = RISE,
    tech: TechTable = DEFAULT_TECH,
) -> float:
    """Path-delay figure fed to the detector: a single-edge delay, or the
    rise/fall average used for reordered (type-2) pairs."""
    if not averaged:
        return path_delay(nl, path, profile, placement, transition, tech)
    rise = path_delay(nl, path, profile, placement, RISE, tech)
    fall = path_delay(nl, path, profile, placement, FALL, tech)
    return 0.5 * (rise + fall)


def pair_delay(
    nl: Netlist,
    pair: "SymmetricPathPair",
    profile: VthProfile,
    placement: Placement,
    tech: TechTable = DEFAULT_TECH,
    type1_transition: str = RISE,
) -> tuple[float, float]:
    """(suspect, reference) delays: same-edge delays for type-1 pairs,
    rise/fall averages for type-2."""
    from .symmetry import SymmetryType

    averaged = pair.symmetry is SymmetryType.TYPE2
    ps = path_value(nl, pair.suspect, profile, placement, averaged, type1_transition, tech)
    pr = path_value(nl, pair.reference, profile, placement, averaged, type1_transition, tech)
    return ps, pr


# -- Trojan injection ---------------------------------------------------------


@dataclass(frozen=True)
class TrojanSpec:
    target_net: str
    payload_kind: GateKind = GateKind.XOR
    trigger_nets: tuple[str, ...] = ()
    trigger_fanout_load: int = 1
    payload_delays: tuple[float, float] | None = None  # (rise, fall) override

    def __post_init__(self):
        if self.payload_kind not in _PAYLOAD_TIE:
            raise ValueError(
                f"{self.payload_kind.name} payload would invert the target net; "
                "use XOR, AND, OR, or BUF"
            )
        if self.trigger_fanout_load < 0:
            raise ValueError("trigger_fanout_load must be >= 0")

    def to_json(self) -> str:
        return json.dumps(
            {
                "target_net": self.target_net,
                "payload_kind": self.payload_kind.name,
                "trigger_nets": list(self.trigger_nets),
                "trigger_fanout_load": self.trigger_fanout_load,
                "payload_delays": (
                    list(self.payload_delays) if self.payload_delays else None
                ),
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrojanSpec":
        d = json.loads(text)
        delays = d.get("payload_delays")
        return cls(
            target_net=d["target_net"],
            payload_kind=GateKind[d.get("payload_kind", "XOR")],
            trigger_nets=tuple(d.get("trigger_nets", ())),
            trigger_fanout_load=d.get("trigger_fanout_load", 1),
            payload_delays=tuple(delays) if delays else None,
        )


def inject_trojan(
    nl: Netlist,
    spec: TrojanSpec,
    tech: TechTable = DEFAULT_TECH,
    c_load: float | None = None,
) -> tuple[Netlist, str]:
    """Splice a transparent payload gate into the target net and load the
    trigger-tapped nets.  Returns the edited netlist and the payload id.

    The payload's side input is tied to the value that keeps it
    transparent, so the logic function is preserved; every path through
    the target net gains the payload's delay.
    """
    if c_load is None:
        c_load = tech.c_load
    if spec.target_net not in nl.nets:
        raise NetlistError(f"target net {spec.target_net!r} does not exist")
    if (
        not nl.sinks_of(spec.target_net)
        and spec.target_net not in nl.primary_outputs
    ):
        raise NetlistError(
            f"target net {spec.target_net!r} drives nothing; no path gains delay"
        )
    for net in spec.trigger_nets:
        if net not in nl.nets:
            raise NetlistError(f"trigger net {net!r} does not exist")
    if spec.payload_delays is not None:
        rise, fall = spec.payload_delays
    else:
        timing = tech.timing(spec.payload_kind)
        rise, fall = timing.rise, timing.fall
    tie = _PAYLOAD_TIE[spec.payload_kind]
    out, new_ids = splice_chain(
        nl, spec.target_net, [(spec.payload_kind, tie, rise, fall)], "ht", c_load
    )
    for net in spec.trigger_nets:
        driver = out.driver_of(net)
        driver.load_factor += c_load * spec.trigger_fanout_load
    out.validate()
    return out, new_ids[0]


def extend_placement(nl: Netlist, placement: Placement) -> Placement:
    """Give coordinates to gates added after placement: each new gate
    lands on its upstream neighbor (a spliced gate sits where the wire
    it cut was driven from)."""
    out = placement
    for gate in nl.topological_gates():
        if gate.id in out.coords:
            continue
        anchor = None
        for net in gate.input_nets:
            if net not in nl.tie_values:
                anchor = nl.nets[net].driver
                break
        xy = out.coords.get(anchor, (0.0, 0.0)) if anchor else (0.0, 0.0)
        out = out.with_gate(gate.id, xy)
    for gate in nl.gates.values():
        if gate.kind is GateKind.OUTPUT and gate.id not in out.coords:
            out = out.with_gate(gate.id, out.coords[nl.nets[gate.input_nets[0]].driver])
    return out
