"""Deterministic synthetic circuits for experiments and tests.

Two generators: parallel gate chains with a controllable fanout
difference (the setup used to study correlation robustness), and a
bus-sliced benchmark circuit with repeated slice topology, deep
AND-reduction cones (guaranteed low-activity nets), and mirrored
reduction trees (guaranteed intrinsic symmetric partners).
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .netlist import GateKind, Netlist, parse_bench
from .seeding import derive_seed

TWO_INPUT = {
    GateKind.AND,
    GateKind.NAND,
    GateKind.OR,
    GateKind.NOR,
    GateKind.XOR,
    GateKind.XNOR,
}


def load_bench(name: str) -> Netlist:
    """Load a packaged benchmark (``c17`` or ``synth432``) by name."""
    text = (
        resources.files("htscout.benches").joinpath(f"{name}.bench").read_text()
    )
    return parse_bench(text, name=name)


def chain_pair_bench(
    suspect_kinds: list[GateKind],
    reference_kinds: list[GateKind] | None = None,
    fod: int = 0,
    base_loads: int = 2,
    seed: int = 0,
) -> str:
    """Bench text with two parallel gate chains.

    Chain ``s*`` follows ``suspect_kinds``, chain ``r*`` follows
    ``reference_kinds`` (default: same kinds, i.e. a type-1 twin).
    Two-input gates take their side input from a dedicated primary
    input.  ``fod`` extra inverter loads are hung on randomly chosen
    reference-chain nets (on top of ``base_loads`` per chain) to skew
    the total fanout difference, mimicking loading mismatch.
    """
    reference_kinds = list(reference_kinds or suspect_kinds)
    rng = np.random.default_rng(derive_seed(seed, "chain-pair"))
    lines = ["# synthetic symmetric chain pair"]
    decls: list[str] = []
    gates: list[str] = []

    def build(prefix: str, kinds: list[GateKind]) -> list[str]:
        spine = [f"{prefix}in"]
        decls.append(f"INPUT({prefix}in)")
        for i, kind in enumerate(kinds):
            out = f"{prefix}n{i}"
            if kind in TWO_INPUT:
                side = f"{prefix}x{i}"
                decls.append(f"INPUT({side})")
                gates.append(f"{out} = {kind.name}({spine[-1]}, {side})")
            else:
                gates.append(f"{out} = {kind.name}({spine[-1]})")
            spine.append(out)
        decls.append(f"OUTPUT({spine[-1]})")
        return spine

    s_spine = build("s", suspect_kinds)
    r_spine = build("r", reference_kinds)

    def hang_loads(tag: str, spine: list[str], count: int) -> None:
        # Loads attach to internal chain nets; outputs stay single-sink.
        eligible = spine[:-1]
        for j in range(count):
            net = eligible[int(rng.integers(0, len(eligible)))]
            gates.append(f"{tag}load{j} = NOT({net})")

    hang_loads("s", s_spine, base_loads)
    hang_loads("r", r_spine, base_loads + fod)
    return "\n".join(lines + decls + [""] + gates) + "\n"


def chain_pair_netlist(
    suspect_kinds: list[GateKind],
    reference_kinds: list[GateKind] | None = None,
    fod: int = 0,
    base_loads: int = 2,
    seed: int = 0,
) -> Netlist:
    text = chain_pair_bench(suspect_kinds, reference_kinds, fod, base_loads, seed)
    return parse_bench(text, name=f"chain{len(suspect_kinds)}fod{fod}")


_SLICE_TEMPLATE = [
    ("t1", "NAND", ("a", "b")),
    ("t2", "NOR", ("c", "d")),
    ("t3", "XOR", ("t1", "t2")),
    ("t4", "AND", ("a", "c")),
    ("t5", "OR", ("b", "d")),
    ("t6", "NAND", ("t3", "t5")),
    ("t7", "NOT", ("t4",)),
    ("t8", "NOR", ("t6", "t7")),
    ("t9", "XNOR", ("t3", "t4")),
    ("t10", "AND", ("t8", "t9")),
    ("t11", "OR", ("t10", "t7")),
    ("t12", "XOR", ("t11", "t6")),
]


def sliced_benchmark_bench(n_slices: int = 9, seed: int = 7) -> str:
    """Bus-sliced benchmark: ``n_slices`` identical 12-gate slices (4
    inputs each), two mirrored AND-reduction trees deep enough to create
    sub-1e-3-activity nets, and a few mixing outputs."""
    rng = np.random.default_rng(derive_seed(seed, "sliced-benchmark"))
    lines = [f"# synthetic sliced benchmark ({n_slices} slices, seed {seed})"]
    decls: list[str] = []
    gates: list[str] = []
    slice_ins: list[list[str]] = []
    for i in range(1, n_slices + 1):
        ins = [f"s{i}{p}" for p in ("a", "b", "c", "d")]
        slice_ins.append(ins)
        for pi in ins:
            decls.append(f"INPUT({pi})")
        sub = dict(zip(("a", "b", "c", "d"), ins))
        for name, kind, srcs in _SLICE_TEMPLATE:
            out = f"s{i}_{name}"
            args = ", ".join(sub.get(s, f"s{i}_{s}") for s in srcs)
            gates.append(f"{out} = {kind}({args})")

    def and_tree(tag: str, feeds: list[str], extra: list[str]) -> str:
        acc = feeds[0]
        k = 0
        for f in feeds[1:] + extra:
            out = f"{tag}{k}"
            gates.append(f"{out} = AND({acc}, {f})")
            acc = out
            k += 1
        return acc

    slice_outs = [f"s{i}_t12" for i in range(1, n_slices + 1)]
    # Mirrored trees: same all-AND chain shape over different taps, so
    # deep tree nets always have a symmetric partner in the twin tree.
    # The trailing low-probability taps push the deepest nets below the
    # usual 1e-3 switching-activity threshold without going constant.
    taps_a = [f"s{(k % n_slices) + 1}_t8" for k in (1, 4, 7)]
    taps_b = [f"s{(k % n_slices) + 1}_t8" for k in (6, 3, 0)]
    top_a = and_tree("redA", slice_outs, taps_a)
    top_b = and_tree("redB", list(reversed(slice_outs)), taps_b)
    outs = [top_a, top_b]
    # Mixing outputs in mirrored pairs.
    picks = rng.permutation(n_slices)[:4] + 1
    gates.append(f"mix0 = XOR(s{picks[0]}_t3, s{picks[1]}_t3)")
    gates.append(f"mix1 = XOR(s{picks[2]}_t3, s{picks[3]}_t3)")
    gates.append(f"mix2 = NOR(s{picks[0]}_t8, s{picks[2]}_t8)")
    gates.append(f"mix3 = NOR(s{picks[1]}_t8, s{picks[3]}_t8)")
    gates.append(f"mix4 = NAND(s{picks[0]}_t9, s{picks[3]}_t9)")
    outs += ["mix0", "mix1", "mix2", "mix3", "mix4"]
    for po in outs:
        decls.append(f"OUTPUT({po})")
    return "\n".join(lines + decls + [""] + gates) + "\n"


def sliced_benchmark(n_slices: int = 9, seed: int = 7) -> Netlist:
    return parse_bench(
        sliced_benchmark_bench(n_slices, seed), name=f"synth{n_slices * 48}"
    )
