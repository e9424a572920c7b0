"""Bit-parallel logic simulation.

Net values for a batch of input vectors are packed into arbitrary-size
Python integers (bit j = vector j), so one traversal of the netlist
evaluates the whole batch with bitwise operations.  Input vectors are
generated counter-based in fixed-size blocks keyed off the master seed,
which makes results independent of how a run is split into batches.
"""

from __future__ import annotations

import numpy as np

from .netlist import GateKind, Netlist
from .seeding import derive_seed

VECTOR_BLOCK = 4096  # vectors per counter-based RNG block


def _block_bits(seed: int, block: int, n_bits: int) -> np.ndarray:
    key = derive_seed(seed, f"vectors/{block}")
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.integers(0, 2, size=(VECTOR_BLOCK, n_bits), dtype=np.uint8)


def random_input_words(
    netlist: Netlist, seed: int, lo: int, hi: int
) -> dict[str, int]:
    """Packed random values for every primary input over vectors [lo, hi)."""
    n = hi - lo
    pis = netlist.primary_inputs
    if n <= 0:
        return {pi: 0 for pi in pis}
    rows = np.empty((n, len(pis)), dtype=np.uint8)
    filled = 0
    for block in range(lo // VECTOR_BLOCK, (hi - 1) // VECTOR_BLOCK + 1):
        bits = _block_bits(seed, block, len(pis))
        start = max(lo, block * VECTOR_BLOCK)
        stop = min(hi, (block + 1) * VECTOR_BLOCK)
        sel = bits[start - block * VECTOR_BLOCK : stop - block * VECTOR_BLOCK]
        rows[filled : filled + len(sel)] = sel
        filled += len(sel)
    words: dict[str, int] = {}
    for i, pi in enumerate(pis):
        packed = np.packbits(rows[:, i], bitorder="little").tobytes()
        words[pi] = int.from_bytes(packed, "little")
    return words


def _apply_kind(kind: GateKind, ins: list[int], mask: int) -> int:
    if kind is GateKind.AND or kind is GateKind.NAND:
        v = ins[0]
        for w in ins[1:]:
            v &= w
        return v if kind is GateKind.AND else mask ^ v
    if kind is GateKind.OR or kind is GateKind.NOR:
        v = ins[0]
        for w in ins[1:]:
            v |= w
        return v if kind is GateKind.OR else mask ^ v
    if kind is GateKind.XOR or kind is GateKind.XNOR:
        v = ins[0]
        for w in ins[1:]:
            v ^= w
        return v if kind is GateKind.XOR else mask ^ v
    if kind is GateKind.NOT:
        return mask ^ ins[0]
    if kind is GateKind.BUF:
        return ins[0]
    raise ValueError(f"cannot evaluate {kind}")


def evaluate_words(
    netlist: Netlist, input_words: dict[str, int], n_vectors: int
) -> dict[str, int]:
    """Evaluate every net for a packed batch of input vectors."""
    mask = (1 << n_vectors) - 1
    values: dict[str, int] = {}
    for net, v in netlist.tie_values.items():
        values[net] = mask if v else 0
    for pi in netlist.primary_inputs:
        values[pi] = input_words[pi] & mask
    for gate in netlist.topological_gates():
        if gate.kind is GateKind.INPUT:
            continue
        ins = [values[n] for n in gate.input_nets]
        values[gate.output_net] = _apply_kind(gate.kind, ins, mask)
    return values


def evaluate_vector(netlist: Netlist, assignment: dict[str, int]) -> dict[str, int]:
    """Single-vector evaluation; assignment maps primary inputs to 0/1."""
    words = {pi: assignment[pi] & 1 for pi in netlist.primary_inputs}
    return evaluate_words(netlist, words, 1)


def equivalent_random(
    a: Netlist, b: Netlist, vectors: int, seed: int, batch: int = 1 << 14
) -> bool:
    """Random-vector check that two netlists compute the same outputs.

    Primary inputs must match by name; outputs are compared positionally
    (gate insertion may rename an output net without changing the port).
    """
    if list(a.primary_inputs) != list(b.primary_inputs):
        raise ValueError("input ports differ; circuits are not comparable")
    if len(a.primary_outputs) != len(b.primary_outputs):
        return False
    for lo in range(0, vectors, batch):
        hi = min(lo + batch, vectors)
        words = random_input_words(a, seed, lo, hi)
        va = evaluate_words(a, words, hi - lo)
        vb = evaluate_words(b, words, hi - lo)
        for pa, pb in zip(a.primary_outputs, b.primary_outputs):
            if va[pa] != vb[pb]:
                return False
    return True
