"""CNF encodings of circuit decision problems.

One variable per net; gate consistency clauses follow the usual circuit
encoding with auxiliary variables only for folding wide XOR/XNOR gates.
On top of the base encoding this module builds path-sensitization
queries (off-path pins pinned to non-controlling values) and equivalence
miters for checking that an edited netlist preserves the logic function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import sat
from .netlist import GateKind, Netlist


@dataclass
class CnfBuilder:
    num_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add(self, *lits: int) -> None:
        self.clauses.append(list(lits))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def solve(self, timeout_s: float | None = None) -> sat.SatResult:
        return sat.solve(self.num_vars, self.clauses, timeout_s=timeout_s)


def _xor_clauses(b: CnfBuilder, out: int, x: int, y: int) -> None:
    b.add(-out, x, y)
    b.add(-out, -x, -y)
    b.add(out, -x, y)
    b.add(out, x, -y)


def _gate_clauses(b: CnfBuilder, kind: GateKind, out: int, ins: list[int]) -> None:
    if kind is GateKind.BUF:
        b.add(-out, ins[0])
        b.add(out, -ins[0])
    elif kind is GateKind.NOT:
        b.add(out, ins[0])
        b.add(-out, -ins[0])
    elif kind in (GateKind.AND, GateKind.NAND):
        o = out if kind is GateKind.AND else -out
        for i in ins:
            b.add(-o, i)
        b.add(o, *[-i for i in ins])
    elif kind in (GateKind.OR, GateKind.NOR):
        o = out if kind is GateKind.OR else -out
        for i in ins:
            b.add(o, -i)
        b.add(-o, *ins)
    elif kind in (GateKind.XOR, GateKind.XNOR):
        acc = ins[0]
        for i in ins[1:-1]:
            t = b.new_var()
            _xor_clauses(b, t, acc, i)
            acc = t
        o = out if kind is GateKind.XOR else -out
        _xor_clauses(b, o, acc, ins[-1])
    else:
        raise ValueError(f"cannot encode {kind}")


def encode_netlist(
    nl: Netlist,
    b: CnfBuilder,
    shared: dict[str, int] | None = None,
) -> dict[str, int]:
    """Add consistency clauses for every gate; returns the net->var map.

    ``shared`` pre-assigns variables (used by miters to share inputs).
    Constant tie nets become unit clauses.
    """
    var_of: dict[str, int] = {}
    for net in nl.nets:
        if shared and net in shared:
            var_of[net] = shared[net]
        else:
            var_of[net] = b.new_var()
    for net, value in nl.tie_values.items():
        b.add(var_of[net] if value else -var_of[net])
    for g in nl.logic_gates():
        _gate_clauses(
            b, g.kind, var_of[g.output_net], [var_of[n] for n in g.input_nets]
        )
    return var_of


def add_sensitization_units(
    b: CnfBuilder,
    nl: Netlist,
    hops: tuple[tuple[str, int], ...],
    var_of: dict[str, int],
) -> None:
    """Pin every off-path input of every on-path gate to its
    non-controlling value.  Gates without a controlling value (XOR/XNOR,
    NOT, BUF) contribute no constraint."""
    for gate_id, on_pin in hops:
        gate = nl.gates[gate_id]
        ncv = gate.kind.non_controlling_value
        if ncv is None:
            continue
        for pin, net in enumerate(gate.input_nets):
            if pin == on_pin:
                continue
            b.add(var_of[net] if ncv else -var_of[net])


def equivalence_miter(a: Netlist, b_nl: Netlist) -> CnfBuilder:
    """CNF satisfiable iff some input vector distinguishes the two circuits.

    Inputs are matched by name, outputs by position.
    """
    if list(a.primary_inputs) != list(b_nl.primary_inputs):
        raise ValueError("input ports differ; circuits are not comparable")
    if len(a.primary_outputs) != len(b_nl.primary_outputs):
        raise ValueError("output counts differ")
    builder = CnfBuilder()
    vars_a = encode_netlist(a, builder)
    shared = {pi: vars_a[pi] for pi in a.primary_inputs}
    vars_b = encode_netlist(b_nl, builder, shared=shared)
    diffs = []
    for po_a, po_b in zip(a.primary_outputs, b_nl.primary_outputs):
        d = builder.new_var()
        _xor_clauses(builder, d, vars_a[po_a], vars_b[po_b])
        diffs.append(d)
    builder.add(*diffs)
    return builder


def equivalent_sat(
    a: Netlist, b_nl: Netlist, timeout_s: float | None = None
) -> bool | None:
    """True/False when decided, None on solver timeout."""
    result = equivalence_miter(a, b_nl).solve(timeout_s=timeout_s)
    if result.status == sat.UNSAT:
        return True
    if result.status == sat.SAT:
        return False
    return None
