"""Synthetic gate placement, grid partitioning, and distances.

Real physical synthesis is out of scope; the detection math needs only
gate coordinates (for ranking path pairs by proximity) and grid-cell
membership (cells share one within-die variation sample).  The topo-rows
strategy stacks topological levels as horizontal bands, which gives a
deterministic placement with the locality a real placer would provide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .netlist import GateKind, Netlist
from .seeding import derive_seed

STRATEGIES = ("topo-rows", "random")


@dataclass(frozen=True)
class GridCell:
    row: int
    col: int


@dataclass(frozen=True)
class Placement:
    coords: dict[str, tuple[float, float]]
    die: tuple[float, float]
    grid: tuple[int, int]
    seed: int | None = None
    strategy: str | None = None  # None for imported placements

    def grid_of(self, gate_id: str) -> GridCell:
        """Cell containing the gate: floor(coord / cell size), clamped at
        the die edge."""
        x, y = self.coords[gate_id]
        rows, cols = self.grid
        col = min(int(x / (self.die[0] / cols)), cols - 1)
        row = min(int(y / (self.die[1] / rows)), rows - 1)
        return GridCell(row=row, col=col)

    def cell_index(self, gate_id: str) -> int:
        cell = self.grid_of(gate_id)
        return cell.row * self.grid[1] + cell.col

    def distance(self, g1: str, g2: str) -> float:
        x1, y1 = self.coords[g1]
        x2, y2 = self.coords[g2]
        return math.hypot(x1 - x2, y1 - y2)

    def with_gate(self, gate_id: str, xy: tuple[float, float]) -> "Placement":
        coords = dict(self.coords)
        coords[gate_id] = xy
        return replace(self, coords=coords)

    def to_csv(self) -> str:
        lines = ["gate,x,y,row,col"]
        for gate_id, (x, y) in self.coords.items():
            cell = self.grid_of(gate_id)
            lines.append(f"{gate_id},{x!r},{y!r},{cell.row},{cell.col}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(
        cls, text: str, die: tuple[float, float], grid: tuple[int, int]
    ) -> "Placement":
        coords: dict[str, tuple[float, float]] = {}
        rows = [r for r in text.splitlines() if r.strip()]
        for row in rows[1:]:
            gate_id, x, y, *_ = row.split(",")
            coords[gate_id] = (float(x), float(y))
        return cls(coords=coords, die=die, grid=grid)


def grid_of(placement: Placement, gate_id: str) -> GridCell:
    return placement.grid_of(gate_id)


def gate_distance(placement: Placement, g1: str, g2: str) -> float:
    return placement.distance(g1, g2)


def _levelize(nl: Netlist) -> dict[str, int]:
    levels: dict[str, int] = {}
    for gate in nl.topological_gates():
        if gate.kind is GateKind.INPUT:
            levels[gate.id] = 0
        else:
            levels[gate.id] = 1 + max(
                levels[nl.nets[n].driver] for n in gate.input_nets
            )
    for gate in nl.gates.values():
        if gate.kind is GateKind.OUTPUT:
            levels[gate.id] = 1 + levels[nl.nets[gate.input_nets[0]].driver]
    return levels


def place(
    nl: Netlist,
    die: tuple[float, float] = (1000.0, 1000.0),
    grid: tuple[int, int] = (16, 16),
    seed: int = 0,
    strategy: str = "topo-rows",
) -> Placement:
    """Assign coordinates to every gate; pure function of its arguments."""
    if die[0] <= 0 or die[1] <= 0:
        raise ValueError("die dimensions must be positive")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown placement strategy {strategy!r}")
    coords: dict[str, tuple[float, float]] = {}
    if strategy == "topo-rows":
        levels = _levelize(nl)
        by_level: dict[int, list[str]] = {}
        for gate_id in nl.gates:
            by_level.setdefault(levels[gate_id], []).append(gate_id)
        n_levels = max(by_level) + 1 if by_level else 1
        band_h = die[1] / n_levels
        for level, members in by_level.items():
            pitch = die[0] / len(members)
            y = (level + 0.5) * band_h
            for i, gate_id in enumerate(members):
                coords[gate_id] = ((i + 0.5) * pitch, y)
    else:
        rng = np.random.default_rng(derive_seed(seed, "placement/random"))
        for gate_id in nl.gates:
            x = float(rng.uniform(0.0, die[0]))
            y = float(rng.uniform(0.0, die[1]))
            coords[gate_id] = (x, y)
    return Placement(coords=coords, die=die, grid=grid, seed=seed, strategy=strategy)
