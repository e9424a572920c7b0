"""Gate-level netlist model with ISCAS-style ``.bench`` ingestion.

A netlist is a combinational DAG of gates connected by single-driver
nets.  Primary inputs are driven by zero-delay INPUT pseudo-gates and
every primary output owns a zero-delay OUTPUT pseudo-gate, so paths have
uniform launch/capture endpoints.  Constant (tie) nets may appear in
modified netlists where inserted gates need side inputs pinned to
non-controlling values.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import BenchParseError, NetlistError

PO_GATE_SUFFIX = "$po"
TIE0_NET = "$tie0"
TIE1_NET = "$tie1"


class GateKind(Enum):
    INPUT = "INPUT"
    OUTPUT = "OUTPUT"
    AND = "AND"
    NAND = "NAND"
    OR = "OR"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    NOT = "NOT"
    BUF = "BUF"

    @property
    def inverts(self) -> bool:
        return self in _INVERTING

    @property
    def controlling_value(self) -> int | None:
        """0 for AND/NAND, 1 for OR/NOR, None for kinds without one."""
        return _CONTROLLING.get(self)

    @property
    def non_controlling_value(self) -> int | None:
        c = _CONTROLLING.get(self)
        return None if c is None else 1 - c

    @property
    def is_pseudo(self) -> bool:
        return self in (GateKind.INPUT, GateKind.OUTPUT)


_INVERTING = frozenset({GateKind.NOT, GateKind.NAND, GateKind.NOR, GateKind.XNOR})
_CONTROLLING = {GateKind.AND: 0, GateKind.NAND: 0, GateKind.OR: 1, GateKind.NOR: 1}
_BENCH_ALIASES = {"BUFF": "BUF", "INV": "NOT"}


def _arity_ok(kind: GateKind, n: int) -> bool:
    if kind in (GateKind.NOT, GateKind.BUF):
        return n == 1
    if kind is GateKind.INPUT:
        return n == 0
    if kind is GateKind.OUTPUT:
        return n == 1
    return n >= 2


@dataclass
class Gate:
    id: str
    kind: GateKind
    input_nets: tuple[str, ...]
    output_net: str  # "" for OUTPUT pseudo-gates
    base_rise_delay: float = 0.0
    base_fall_delay: float = 0.0
    load_factor: float = 1.0

    @property
    def is_pseudo(self) -> bool:
        return self.kind.is_pseudo


@dataclass
class Net:
    id: str
    driver: str
    sinks: tuple[tuple[str, int], ...] = ()  # (gate id, pin index); logic sinks only

    @property
    def fanout(self) -> int:
        return len(self.sinks)


@dataclass
class Netlist:
    name: str = ""
    gates: dict[str, Gate] = field(default_factory=dict)
    nets: dict[str, Net] = field(default_factory=dict)
    primary_inputs: list[str] = field(default_factory=list)
    primary_outputs: list[str] = field(default_factory=list)
    tie_values: dict[str, int] = field(default_factory=dict)

    # -- structural queries -------------------------------------------------

    def logic_gates(self):
        """Gates that are neither INPUT nor OUTPUT pseudo-gates."""
        return (g for g in self.gates.values() if not g.is_pseudo)

    def driver_of(self, net_id: str) -> Gate:
        return self.gates[self.nets[net_id].driver]

    def sinks_of(self, net_id: str) -> tuple[tuple[str, int], ...]:
        return self.nets[net_id].sinks

    def fanout_of(self, net_id: str) -> int:
        """Logic sink count, plus one port load if the net is a primary output."""
        if net_id not in self.nets:
            raise NetlistError(f"unknown net {net_id!r}")
        net = self.nets[net_id]
        return net.fanout + (1 if net_id in self.primary_outputs else 0)

    def is_constant(self, net_id: str) -> bool:
        return net_id in self.tie_values

    def topological_gates(self) -> list[Gate]:
        """Driving gates (INPUT pseudo + logic) in topological order.

        Raises NetlistError listing the nets of a cycle if one exists.
        """
        indeg: dict[str, int] = {}
        for g in self.gates.values():
            if g.kind is GateKind.OUTPUT:
                continue
            indeg[g.id] = len(g.input_nets)
        ready = [g.id for g in self.gates.values() if indeg.get(g.id) == 0]
        order: list[Gate] = []
        head = 0
        while head < len(ready):
            gid = ready[head]
            head += 1
            gate = self.gates[gid]
            order.append(gate)
            if not gate.output_net:
                continue
            for sink_id, _pin in self.nets[gate.output_net].sinks:
                if self.gates[sink_id].kind is GateKind.OUTPUT:
                    continue
                indeg[sink_id] -= 1
                if indeg[sink_id] == 0:
                    ready.append(sink_id)
        if len(order) != len(indeg):
            stuck = {gid for gid, d in indeg.items() if d > 0}
            cycle = self._find_cycle(stuck)
            raise NetlistError(f"combinational cycle through nets {sorted(cycle)}")
        return order

    def _find_cycle(self, stuck: set[str]) -> set[str]:
        # Walk predecessors inside the stuck subgraph until a gate repeats.
        gid = next(iter(sorted(stuck)))
        seen: list[str] = []
        while gid not in seen:
            seen.append(gid)
            gate = self.gates[gid]
            for net_id in gate.input_nets:
                drv = self.nets[net_id].driver
                if drv in stuck:
                    gid = drv
                    break
        cycle = seen[seen.index(gid):]
        return {self.gates[g].output_net for g in cycle}

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        """Check all structural invariants; raise on the first violation."""
        drivers: dict[str, str] = {}
        for g in self.gates.values():
            if not _arity_ok(g.kind, len(g.input_nets)):
                raise NetlistError(
                    f"gate {g.id!r}: {g.kind.name} cannot take "
                    f"{len(g.input_nets)} input(s)"
                )
            if g.output_net:
                if g.output_net in drivers:
                    raise NetlistError(
                        f"net {g.output_net!r} driven by both "
                        f"{drivers[g.output_net]!r} and {g.id!r}"
                    )
                drivers[g.output_net] = g.id
            if g.is_pseudo:
                if g.base_rise_delay != 0.0 or g.base_fall_delay != 0.0:
                    raise NetlistError(f"pseudo-gate {g.id!r} must have zero delay")
            elif g.base_rise_delay < 0.0 or g.base_fall_delay < 0.0:
                raise NetlistError(f"gate {g.id!r} has negative base delay")
            for net_id in g.input_nets:
                if net_id not in self.nets:
                    raise NetlistError(
                        f"gate {g.id!r} reads undeclared net {net_id!r}"
                    )
        for net_id, net in self.nets.items():
            if net.driver not in self.gates:
                raise NetlistError(f"net {net_id!r} has unknown driver {net.driver!r}")
            if drivers.get(net_id) != net.driver:
                raise NetlistError(f"net {net_id!r} driver record is inconsistent")
        for net_id in self.primary_outputs:
            if net_id not in self.nets:
                raise NetlistError(f"primary output {net_id!r} is not a net")
        self.topological_gates()

    # -- copies and edits ---------------------------------------------------

    def copy(self) -> "Netlist":
        return Netlist(
            name=self.name,
            gates={gid: replace(g) for gid, g in self.gates.items()},
            nets={nid: replace(n) for nid, n in self.nets.items()},
            primary_inputs=list(self.primary_inputs),
            primary_outputs=list(self.primary_outputs),
            tie_values=dict(self.tie_values),
        )

    def tie_net(self, value: int) -> str:
        """Return the constant-0 or constant-1 net, creating it on first use."""
        net_id = TIE1_NET if value else TIE0_NET
        if net_id not in self.nets:
            gate = Gate(id=net_id, kind=GateKind.INPUT, input_nets=(), output_net=net_id)
            self.gates[net_id] = gate
            self.nets[net_id] = Net(id=net_id, driver=net_id)
            self.tie_values[net_id] = int(bool(value))
        return net_id

    # -- serialization ------------------------------------------------------

    def to_bench(self) -> str:
        """Re-emit as .bench text.

        Tie nets cannot be expressed in the bench format and are emitted
        as comments; use to_json() for lossless round trips of modified
        netlists.
        """
        lines = [f"# {self.name}" if self.name else "#"]
        for net_id in self.primary_inputs:
            lines.append(f"INPUT({net_id})")
        for net_id in self.primary_outputs:
            lines.append(f"OUTPUT({net_id})")
        for net_id, value in self.tie_values.items():
            lines.append(f"# tie {net_id} = {value}")
        lines.append("")
        for g in self.gates.values():
            if g.is_pseudo:
                continue
            lines.append(f"{g.output_net} = {g.kind.name}({', '.join(g.input_nets)})")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "inputs": self.primary_inputs,
            "outputs": self.primary_outputs,
            "ties": self.tie_values,
            "gates": [
                {
                    "id": g.id,
                    "kind": g.kind.name,
                    "inputs": list(g.input_nets),
                    "output": g.output_net,
                    "rise": g.base_rise_delay,
                    "fall": g.base_fall_delay,
                    "load": g.load_factor,
                }
                for g in self.gates.values()
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Netlist":
        payload = json.loads(text)
        nl = cls(
            name=payload["name"],
            primary_inputs=list(payload["inputs"]),
            primary_outputs=list(payload["outputs"]),
            tie_values={k: int(v) for k, v in payload["ties"].items()},
        )
        for rec in payload["gates"]:
            nl.gates[rec["id"]] = Gate(
                id=rec["id"],
                kind=GateKind[rec["kind"]],
                input_nets=tuple(rec["inputs"]),
                output_net=rec["output"],
                base_rise_delay=rec["rise"],
                base_fall_delay=rec["fall"],
                load_factor=rec["load"],
            )
        _rebuild_nets(nl)
        nl.validate()
        return nl


def _rebuild_nets(nl: Netlist) -> None:
    """Recompute the net map (drivers and sink pins) from the gate list."""
    nets: dict[str, Net] = {}
    for g in nl.gates.values():
        if g.output_net:
            if g.output_net in nets:
                raise NetlistError(
                    f"net {g.output_net!r} driven by both "
                    f"{nets[g.output_net].driver!r} and {g.id!r}"
                )
            nets[g.output_net] = Net(id=g.output_net, driver=g.id)
    sinks: dict[str, list[tuple[str, int]]] = {nid: [] for nid in nets}
    for g in nl.gates.values():
        if g.kind is GateKind.OUTPUT:
            continue
        for pin, net_id in enumerate(g.input_nets):
            if net_id not in nets:
                raise NetlistError(f"gate {g.id!r} reads undeclared net {net_id!r}")
            sinks[net_id].append((g.id, pin))
    for nid, net in nets.items():
        net.sinks = tuple(sinks[nid])
    nl.nets = nets


def splice_chain(
    nl: Netlist,
    net_id: str,
    chain: list[tuple[GateKind, int | None, float, float]],
    id_prefix: str,
    c_load: float,
) -> tuple[Netlist, list[str]]:
    """Insert a gate chain in series into ``net_id`` of a copy of ``nl``.

    Each chain element is (kind, tie_value, base_rise, base_fall); pin 0 of
    every inserted gate is the through signal, tie_value (if any) feeds pin 1
    from a constant net.  All former sinks of the net, and its output-port
    marker if present, move to the chain's final net.  Load factors of
    pre-existing gates are left untouched.

    Returns the modified netlist and the inserted gate ids.
    """
    if net_id not in nl.nets:
        raise NetlistError(f"unknown net {net_id!r}")
    if not chain:
        raise NetlistError("empty chain")
    out = nl.copy()
    old_net = out.nets[net_id]
    former_sinks = old_net.sinks
    is_po = net_id in out.primary_outputs
    if not former_sinks and not is_po:
        raise NetlistError(f"net {net_id!r} has no sinks to re-drive")

    prev_net = net_id
    new_ids: list[str] = []
    for i, (kind, tie_value, rise, fall) in enumerate(chain):
        gid = f"{net_id}${id_prefix}{i}"
        if gid in out.gates or gid in out.nets:
            raise NetlistError(f"generated id {gid!r} collides")
        inputs = [prev_net]
        if tie_value is not None:
            inputs.append(out.tie_net(tie_value))
        elif not _arity_ok(kind, 1):
            raise NetlistError(f"{kind.name} chain gate needs a tie value")
        gate = Gate(
            id=gid,
            kind=kind,
            input_nets=tuple(inputs),
            output_net=gid,
            base_rise_delay=rise,
            base_fall_delay=fall,
        )
        out.gates[gid] = gate
        out.nets[gid] = Net(id=gid, driver=gid)
        new_ids.append(gid)
        prev_net = gid

    # Rewire: net -> first chain gate; last chain net -> former sinks.
    out.nets[net_id] = replace(old_net, sinks=((new_ids[0], 0),))
    for i, gid in enumerate(new_ids):
        if i + 1 < len(new_ids):
            sinks: tuple[tuple[str, int], ...] = ((new_ids[i + 1], 0),)
        else:
            sinks = tuple(former_sinks)
        out.nets[gid] = replace(out.nets[gid], sinks=sinks)
    for sink_id, pin in former_sinks:
        g = out.gates[sink_id]
        nets = list(g.input_nets)
        nets[pin] = new_ids[-1]
        g.input_nets = tuple(nets)
    if is_po:
        idx = out.primary_outputs.index(net_id)
        out.primary_outputs[idx] = new_ids[-1]
        po_gate = out.gates.pop(net_id + PO_GATE_SUFFIX, None)
        if po_gate is not None:
            po_gate.id = new_ids[-1] + PO_GATE_SUFFIX
            po_gate.input_nets = (new_ids[-1],)
            out.gates[po_gate.id] = po_gate
    # Tie-net sink bookkeeping.
    tie_sinks: dict[str, list[tuple[str, int]]] = {}
    for gid in new_ids:
        for pin, in_net in enumerate(out.gates[gid].input_nets):
            if in_net in out.tie_values:
                tie_sinks.setdefault(in_net, []).append((gid, pin))
    for tie_id, extra in tie_sinks.items():
        net = out.nets[tie_id]
        out.nets[tie_id] = replace(net, sinks=net.sinks + tuple(extra))

    # Chain gates follow the same fanout-dependent load law as parsed gates.
    for gid in new_ids:
        out.gates[gid].load_factor = 1.0 + c_load * out.fanout_of(gid)
    return out, new_ids


# -- bench ingestion ---------------------------------------------------------

_GATE_RE = re.compile(r"^(?P<out>\S+)\s*=\s*(?P<kind>[A-Za-z]+)\s*\((?P<ins>[^)]*)\)$")
_IO_RE = re.compile(r"^(?P<kw>INPUT|OUTPUT)\s*\(\s*(?P<net>[^)\s]+)\s*\)$", re.IGNORECASE)


def parse_bench(
    text: str,
    name: str = "",
    tech=None,
    c_load: float | None = None,
) -> Netlist:
    """Parse ISCAS-85 ``.bench`` text into a validated netlist.

    Base delays come from the technology table (bench files carry no
    timing); load factors follow ``1 + c_load * fanout``.
    """
    if tech is None:
        from .tech import DEFAULT_TECH

        tech = DEFAULT_TECH
    if c_load is None:
        c_load = tech.c_load

    inputs: list[str] = []
    outputs: list[str] = []
    gate_rows: list[tuple[int, str, GateKind, tuple[str, ...]]] = []
    declared_out: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        io = _IO_RE.match(line)
        if io:
            net = io.group("net")
            if io.group("kw").upper() == "INPUT":
                if net in inputs:
                    raise BenchParseError(f"duplicate INPUT({net})", lineno)
                inputs.append(net)
            else:
                if net in outputs:
                    raise BenchParseError(f"duplicate OUTPUT({net})", lineno)
                outputs.append(net)
            continue
        m = _GATE_RE.match(line)
        if not m:
            raise BenchParseError(f"unrecognized statement {line!r}", lineno)
        kind_name = m.group("kind").upper()
        kind_name = _BENCH_ALIASES.get(kind_name, kind_name)
        if kind_name in ("DFF", "LATCH"):
            raise BenchParseError(
                f"sequential element {kind_name} is not supported", lineno
            )
        try:
            kind = GateKind[kind_name]
        except KeyError:
            raise BenchParseError(f"unknown gate kind {m.group('kind')!r}", lineno)
        if kind.is_pseudo:
            raise BenchParseError(f"{kind_name} is not a valid gate kind", lineno)
        out = m.group("out")
        ins = tuple(s.strip() for s in m.group("ins").split(",") if s.strip())
        if not _arity_ok(kind, len(ins)):
            raise BenchParseError(
                f"{kind_name} cannot take {len(ins)} input(s)", lineno
            )
        if out in declared_out:
            raise BenchParseError(
                f"net {out!r} already driven at line {declared_out[out]}", lineno
            )
        if out in inputs:
            raise BenchParseError(f"net {out!r} is a primary input", lineno)
        declared_out[out] = lineno
        gate_rows.append((lineno, out, kind, ins))

    nl = Netlist(name=name, primary_inputs=inputs, primary_outputs=outputs)
    for net in inputs:
        nl.gates[net] = Gate(id=net, kind=GateKind.INPUT, input_nets=(), output_net=net)
    for lineno, out, kind, ins in gate_rows:
        timing = tech.timing(kind)
        nl.gates[out] = Gate(
            id=out,
            kind=kind,
            input_nets=ins,
            output_net=out,
            base_rise_delay=timing.rise,
            base_fall_delay=timing.fall,
        )
    known = set(inputs) | set(declared_out)
    for lineno, out, kind, ins in gate_rows:
        for net in ins:
            if net not in known:
                raise BenchParseError(
                    f"gate {out!r} reads undeclared net {net!r}", lineno
                )
    for net in outputs:
        if net not in known:
            raise BenchParseError(f"OUTPUT({net}) has no driver")
        nl.gates[net + PO_GATE_SUFFIX] = Gate(
            id=net + PO_GATE_SUFFIX,
            kind=GateKind.OUTPUT,
            input_nets=(net,),
            output_net="",
        )
    _rebuild_nets(nl)
    for g in nl.logic_gates():
        g.load_factor = 1.0 + c_load * nl.fanout_of(g.output_net)
    nl.validate()
    return nl
