"""Behavioral technology table: per-kind base delays, areas, and the
threshold-voltage sensitivity law used everywhere a real cell library
plus transistor-level simulation would otherwise be needed."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import DelayModelError
from .netlist import GateKind


@dataclass(frozen=True)
class CellTiming:
    rise: float  # ps
    fall: float  # ps
    area: float  # abstract units^2


# Rise/fall asymmetry is deliberately >= 10% for every logic kind so the
# rise-only vs averaged path-delay models are distinguishable.
_DEFAULT_CELLS = {
    GateKind.NOT: CellTiming(9.0, 7.5, 1.0),
    GateKind.BUF: CellTiming(14.0, 12.0, 1.5),
    GateKind.AND: CellTiming(16.0, 13.5, 2.0),
    GateKind.NAND: CellTiming(12.0, 9.5, 1.5),
    GateKind.OR: CellTiming(18.0, 15.0, 2.0),
    GateKind.NOR: CellTiming(15.0, 11.0, 1.5),
    GateKind.XOR: CellTiming(22.0, 19.0, 3.0),
    GateKind.XNOR: CellTiming(23.0, 20.0, 3.0),
    GateKind.INPUT: CellTiming(0.0, 0.0, 0.0),
    GateKind.OUTPUT: CellTiming(0.0, 0.0, 0.0),
}


@dataclass(frozen=True)
class TechTable:
    """Per-kind base delays/areas plus the shared delay sensitivity law.

    Gate delay scales as ``g(v) = ((vdd - vth_nominal)/(vdd - v))**alpha``
    so that g(vth_nominal) == 1 and delay grows as threshold voltage rises.
    """

    cells: dict[GateKind, CellTiming] = field(
        default_factory=lambda: dict(_DEFAULT_CELLS)
    )
    c_load: float = 0.05  # load_factor = 1 + c_load * fanout
    vdd: float = 0.9  # V
    alpha: float = 1.3

    def timing(self, kind: GateKind) -> CellTiming:
        return self.cells[kind]

    def base_delay(self, kind: GateKind, transition: str) -> float:
        cell = self.cells[kind]
        if transition == "rise":
            return cell.rise
        if transition == "fall":
            return cell.fall
        raise ValueError(f"unknown transition {transition!r}")

    def area(self, kind: GateKind) -> float:
        return self.cells[kind].area

    def sensitivity(self, vth: float, vth_nominal: float) -> float:
        """Delay multiplier g(vth); 1.0 at nominal, increasing in vth."""
        if vth >= self.vdd:
            raise DelayModelError(
                f"vth {vth:.4f} V >= vdd {self.vdd:.4f} V; delay law diverges"
            )
        return ((self.vdd - vth_nominal) / (self.vdd - vth)) ** self.alpha

    def check_headroom(self, vth_nominal: float, vth_margin: float) -> None:
        """Reject parameter sets whose sampled vth range can reach vdd."""
        if vth_nominal + vth_margin >= self.vdd:
            raise DelayModelError(
                f"vth_nominal {vth_nominal} + margin {vth_margin} reaches "
                f"vdd {self.vdd}; shrink variation or raise vdd"
            )

    def with_cell(self, kind: GateKind, timing: CellTiming) -> "TechTable":
        cells = dict(self.cells)
        cells[kind] = timing
        return replace(self, cells=cells)

    def to_json(self) -> str:
        payload = {
            "c_load": self.c_load,
            "vdd": self.vdd,
            "alpha": self.alpha,
            "cells": {
                kind.name: {"rise": t.rise, "fall": t.fall, "area": t.area}
                for kind, t in self.cells.items()
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TechTable":
        payload = json.loads(text)
        cells = dict(_DEFAULT_CELLS)
        for name, t in payload.get("cells", {}).items():
            cells[GateKind[name]] = CellTiming(t["rise"], t["fall"], t["area"])
        return cls(
            cells=cells,
            c_load=payload.get("c_load", 0.05),
            vdd=payload.get("vdd", 0.9),
            alpha=payload.get("alpha", 1.3),
        )


DEFAULT_TECH = TechTable()
