"""Symmetric path-pair selection.

Two paths are topologically symmetric when they traverse the same
multiset of gate kinds: type-1 if the kind sequence is identical, type-2
if only the multiset matches.  For every vulnerable net the selector
picks a suspect path through the net and the closest symmetric reference
path avoiding it (one pair per fanout branch).  Nets with no intrinsic
symmetric partner get a reference path manufactured by inserting a
transparent gate chain in front of a non-critical path.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum

from .cnf import equivalent_sat
from .delay import path_delay_nominal
from .errors import SelectionError
from .layout import Placement, place
from .netlist import GateKind, Netlist, splice_chain
from .paths import (
    Path,
    PathLimits,
    SensitizationCriterion,
    enumerate_all_paths,
    enumerate_paths,
    is_sensitizable,
)
from .sim import equivalent_random
from .tech import DEFAULT_TECH, TechTable

logger = logging.getLogger("htscout")

PORT_BRANCH = "$po"


class SymmetryType(Enum):
    TYPE1 = "type-1"
    TYPE2 = "type-2"
    NONE = "none"


def classify_pair(a: Path, b: Path) -> SymmetryType:
    """Symmetry of two paths; a path is never symmetric to itself."""
    if a.nets == b.nets:
        return SymmetryType.NONE
    if len(a.kinds) != len(b.kinds):
        return SymmetryType.NONE
    if a.kinds == b.kinds:
        return SymmetryType.TYPE1
    if Counter(a.kinds) == Counter(b.kinds):
        return SymmetryType.TYPE2
    return SymmetryType.NONE


def rank(pair: tuple[Path, Path], placement: Placement) -> float:
    """Mean distance between matched same-kind gates of the two paths.

    Matching is greedy nearest-unmatched per suspect gate, in path order;
    distance ties break on reference gate id for determinism.
    """
    suspect, reference = pair
    if not suspect.hops:
        return 0.0
    available: dict[GateKind, list[str]] = {}
    for (gid, _), kind in zip(reference.hops, reference.kinds):
        available.setdefault(kind, []).append(gid)
    total = 0.0
    for (gid, _), kind in zip(suspect.hops, suspect.kinds):
        cands = available.get(kind)
        if not cands:
            raise SelectionError(
                f"paths are not symmetric: no unmatched {kind.name} gate left"
            )
        best = min(cands, key=lambda r: (placement.distance(gid, r), r))
        cands.remove(best)
        total += placement.distance(gid, best)
    return total / len(suspect.hops)


@dataclass(frozen=True)
class SymmetricPathPair:
    pair_id: str
    covered_net: str
    branch: str
    suspect: Path
    reference: Path
    symmetry: SymmetryType
    rank: float
    created: bool = False
    extra_gates: tuple[str, ...] = ()

    def to_record(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "covered_net": self.covered_net,
            "branch": self.branch,
            "suspect_nets": list(self.suspect.nets),
            "suspect_gates": list(self.suspect.gate_ids),
            "reference_nets": list(self.reference.nets),
            "reference_gates": list(self.reference.gate_ids),
            "symmetry": self.symmetry.value,
            "rank": self.rank,
            "created": self.created,
            "extra_gates": list(self.extra_gates),
        }


@dataclass
class SelectionResult:
    pairs: list[SymmetricPathPair]
    covered: tuple[str, ...]
    uncovered_resolved: tuple[str, ...]
    unresolved: tuple[str, ...]
    extra_gates_added: int
    area_overhead: float
    netlist: Netlist
    placement: Placement
    truncated: bool


@dataclass(frozen=True)
class SelectionConfig:
    non_critical_fraction: float = 0.7  # "non-critical" = delay below this share of max
    timing_budget: float | None = None  # absolute cap; None = design max path delay
    equiv_vectors: int = 100_000
    sat_equiv_max_inputs: int = 20
    solver_timeout_s: float | None = 10.0
    max_candidates_per_branch: int = 5000
    seed: int = 0


def net_coverage(result: SelectionResult, nl: Netlist | None = None) -> float:
    """Fraction of design nets lying on any selected path (constant tie
    rails excluded from the denominator)."""
    nl = nl or result.netlist
    on_paths: set[str] = set()
    for pair in result.pairs:
        on_paths.update(pair.suspect.nets)
        on_paths.update(pair.reference.nets)
    all_nets = [n for n in nl.nets if n not in nl.tie_values]
    if not all_nets:
        return 0.0
    return len(on_paths & set(all_nets)) / len(all_nets)


def _avg_nominal(nl: Netlist, path: Path) -> float:
    rise = path_delay_nominal(nl, path, "rise")
    fall = path_delay_nominal(nl, path, "fall")
    return 0.5 * (rise + fall)


def _signature(path: Path) -> tuple[str, ...]:
    return tuple(sorted(k.name for k in path.kinds))


def _branch_of(path: Path, net: str) -> str:
    """Fanout branch a suspect path takes after the covered net: the
    consuming gate id, or the output port when the path ends there."""
    idx = path.nets.index(net)
    if idx == len(path.hops):
        return PORT_BRANCH
    return path.hops[idx][0]


class _Selector:
    def __init__(
        self,
        nl: Netlist,
        vulnerable: tuple[str, ...],
        placement: Placement,
        limits: PathLimits,
        criterion: SensitizationCriterion,
        config: SelectionConfig,
        tech: TechTable,
    ):
        self.original = nl
        self.nl = nl
        self.vulnerable = vulnerable
        self.placement = placement
        self.limits = limits
        self.criterion = criterion
        self.config = config
        self.tech = tech
        self.sens_cache: dict[tuple[str, ...], bool] = {}
        self.created: dict[str, SymmetricPathPair] = {}
        self.unresolved: list[str] = []
        self.protected_nets: set[str] = set()
        self.extra_gate_ids: list[str] = []
        self.truncated = False
        self.creation_counter = 0
        self._pool: dict[tuple[str, ...], list[Path]] | None = None

    # -- caching helpers --------------------------------------------------

    def _netlist_changed(self) -> None:
        self.sens_cache.clear()
        self._pool = None

    def sensitizable(self, path: Path) -> bool:
        key = path.nets
        hit = self.sens_cache.get(key)
        if hit is None:
            hit = is_sensitizable(
                self.nl, path, self.criterion, timeout_s=self.config.solver_timeout_s
            )
            self.sens_cache[key] = hit
        return hit

    def path_pool(self) -> dict[tuple[str, ...], list[Path]]:
        """All structural paths of the current netlist, by kind multiset."""
        if self._pool is None:
            ps = enumerate_all_paths(self.nl, self.limits)
            self.truncated |= ps.truncated
            pool: dict[tuple[str, ...], list[Path]] = {}
            for p in ps.paths:
                pool.setdefault(_signature(p), []).append(p)
            self._pool = pool
        return self._pool

    def sens_paths_through(self, net: str) -> list[Path]:
        ps = enumerate_paths(self.nl, net, self.limits)
        self.truncated |= ps.truncated
        return [p for p in ps.paths if self.sensitizable(p)]

    def structural_partners(self, suspect: Path, net: str) -> list[Path]:
        out = []
        for q in self.path_pool().get(_signature(suspect), ()):
            if q.nets != suspect.nets and net not in q.nets:
                out.append(q)
        return out

    def has_sens_partner(self, suspect: Path, net: str) -> bool:
        for q in self.structural_partners(suspect, net):
            if self.sensitizable(q):
                return True
        return False

    # -- phase A: coverage and reference creation -------------------------

    def ensure_coverage(self) -> None:
        changed = True
        while changed:
            changed = False
            for net in self.vulnerable:
                if net in self.created or net in self.unresolved:
                    continue
                s_all = self.sens_paths_through(net)
                if not s_all:
                    logger.warning("net %s has no sensitizable path", net)
                    self.unresolved.append(net)
                    continue
                if any(self.has_sens_partner(p, net) for p in s_all):
                    continue
                try:
                    pair = self._create_reference(net, s_all)
                except SelectionError as exc:
                    logger.warning("net %s uncoverable: %s", net, exc)
                    self.unresolved.append(net)
                    continue
                self.created[net] = pair
                changed = True
                break  # netlist changed; re-examine everything

    def _create_reference(self, net: str, s_all: list[Path]) -> SymmetricPathPair:
        nl, pair, new_ids = create_reference_path(
            net,
            s_all,
            self.nl,
            limits=self.limits,
            criterion=self.criterion,
            config=self.config,
            tech=self.tech,
            protected_nets=self.protected_nets,
            chain_tag=f"ref{self.creation_counter}",
        )
        self.creation_counter += 1
        self.nl = nl
        self._netlist_changed()
        self.extra_gate_ids.extend(new_ids)
        self.protected_nets.update(pair.suspect.nets)
        self.protected_nets.update(pair.reference.nets)
        return pair

    # -- phase B: placement and rank-based choice --------------------------

    def finalize_placement(self) -> None:
        if self.nl is self.original:
            return
        if self.placement.strategy is not None:
            self.placement = place(
                self.nl,
                die=self.placement.die,
                grid=self.placement.grid,
                seed=self.placement.seed or 0,
                strategy=self.placement.strategy,
            )
        else:
            from .delay import extend_placement

            self.placement = extend_placement(self.nl, self.placement)

    def select(self) -> SelectionResult:
        self.ensure_coverage()
        self.finalize_placement()
        pairs: list[SymmetricPathPair] = []
        covered: list[str] = []
        for net in self.vulnerable:
            if net in self.unresolved:
                continue
            if net in self.created:
                pair = self.created[net]
                pair = replace(
                    pair, rank=rank((pair.suspect, pair.reference), self.placement)
                )
                pairs.append(pair)
                covered.append(net)
                continue
            chosen = self._select_for_net(net)
            if not chosen:
                logger.warning("net %s lost coverage during selection", net)
                self.unresolved.append(net)
                continue
            pairs.extend(chosen)
            covered.append(net)
        area_orig = sum(self.tech.area(g.kind) for g in self.original.logic_gates())
        area_extra = sum(
            self.tech.area(self.nl.gates[g].kind) for g in self.extra_gate_ids
        )
        return SelectionResult(
            pairs=pairs,
            covered=tuple(covered),
            uncovered_resolved=tuple(n for n in self.vulnerable if n in self.created),
            unresolved=tuple(self.unresolved),
            extra_gates_added=len(self.extra_gate_ids),
            area_overhead=(area_extra / area_orig) if area_orig else 0.0,
            netlist=self.nl,
            placement=self.placement,
            truncated=self.truncated,
        )

    def _select_for_net(self, net: str) -> list[SymmetricPathPair]:
        s_all = self.sens_paths_through(net)
        branches: dict[str, list[Path]] = {}
        for p in s_all:
            branches.setdefault(_branch_of(p, net), []).append(p)
        out: list[SymmetricPathPair] = []
        for branch in sorted(branches):
            best = self._best_pair(net, branch, branches[branch])
            if best is not None:
                out.append(best)
        return out

    def _best_pair(
        self, net: str, branch: str, suspects: list[Path]
    ) -> SymmetricPathPair | None:
        candidates: list[tuple[float, int, tuple, tuple, Path, Path]] = []
        for suspect in suspects:
            for partner in self.structural_partners(suspect, net):
                r = rank((suspect, partner), self.placement)
                candidates.append(
                    (r, suspect.length, suspect.nets, partner.nets, suspect, partner)
                )
        candidates.sort(key=lambda t: t[:4])
        del candidates[self.config.max_candidates_per_branch :]
        for r, _, _, _, suspect, partner in candidates:
            # Cheap structural rank order first; SAT checks only on demand.
            if not self.sensitizable(partner):
                continue
            sym = classify_pair(suspect, partner)
            if sym is SymmetryType.NONE:
                continue
            return SymmetricPathPair(
                pair_id=f"{net}:{branch}",
                covered_net=net,
                branch=branch,
                suspect=suspect,
                reference=partner,
                symmetry=sym,
                rank=r,
            )
        return None


def select_pairs(
    nl: Netlist,
    vulnerable,
    placement: Placement,
    limits: PathLimits = PathLimits(),
    criterion: SensitizationCriterion = SensitizationCriterion.NON_CONTROLLING,
    config: SelectionConfig = SelectionConfig(),
    tech: TechTable = DEFAULT_TECH,
) -> SelectionResult:
    """Pick one symmetric path pair per vulnerable net and fanout branch.

    ``vulnerable`` may be a VulnerableNetSet or a plain net-id sequence.
    Reference paths are created for nets without intrinsic symmetry; in
    that case the netlist grows and the placement is recomputed (same
    recipe) or extended, and both are returned in the result.
    """
    nets = tuple(getattr(vulnerable, "nets", vulnerable))
    for net in nets:
        if net not in nl.nets:
            raise SelectionError(f"vulnerable net {net!r} does not exist")
    selector = _Selector(nl, nets, placement, limits, criterion, config, tech)
    return selector.select()


# -- reference-path creation ---------------------------------------------


def _transparent_chain(
    extragates: list[GateKind], tech: TechTable
) -> list[tuple[GateKind, int | None, float, float]] | None:
    """Chain rows for the extra gates, or None when no tie assignment can
    keep the chain transparent (XOR-family gates, or odd inversion parity)."""
    if any(k in (GateKind.XOR, GateKind.XNOR) for k in extragates):
        return None
    if sum(1 for k in extragates if k.inverts) % 2 != 0:
        return None
    rows = []
    for kind in extragates:
        tie = kind.non_controlling_value  # None for NOT/BUF (single input)
        t = tech.timing(kind)
        rows.append((kind, tie, t.rise, t.fall))
    return rows


def create_reference_path(
    net: str,
    all_paths: list[Path],
    nl: Netlist,
    limits: PathLimits = PathLimits(),
    criterion: SensitizationCriterion = SensitizationCriterion.NON_CONTROLLING,
    config: SelectionConfig = SelectionConfig(),
    tech: TechTable = DEFAULT_TECH,
    protected_nets: set[str] | None = None,
    chain_tag: str = "ref",
) -> tuple[Netlist, SymmetricPathPair, list[str]]:
    """Manufacture a reference path for a net with no intrinsic partner.

    The shortest-delay sensitizable suspect through the net is matched by
    inserting the missing gates, side inputs tied non-controlling, in
    front of a non-critical path whose gates are a proper subset of the
    suspect's.  The edit must keep the circuit function (random-vector
    check, plus an exact miter for small input counts) and may not push
    any path through the edited net past the timing budget.
    """
    protected = protected_nets or set()
    if not all_paths:
        raise SelectionError(f"net {net!r} has no sensitizable path")
    suspects = sorted(
        all_paths, key=lambda p: (_avg_nominal(nl, p), p.length, p.nets)
    )
    pool = enumerate_all_paths(nl, limits).paths
    delays = {p.nets: _avg_nominal(nl, p) for p in pool}
    design_max = max(delays.values(), default=0.0)
    budget = config.timing_budget if config.timing_budget is not None else design_max
    noncritical = [
        p for p in pool if delays[p.nets] <= config.non_critical_fraction * design_max
    ]

    for p_short in suspects:
        ms_short = Counter(p_short.kinds)
        subs = []
        for q in noncritical:
            ms_q = Counter(q.kinds)
            if not ms_q or ms_q == ms_short:
                continue
            if any(ms_q[k] > ms_short[k] for k in ms_q):
                continue
            if net in q.nets or q.start in p_short.nets:
                continue
            if protected & set(q.nets) or q.start in protected:
                continue
            extra = ms_short - ms_q
            area = sum(tech.area(k) * c for k, c in extra.items())
            subs.append((area, delays[q.nets], q.nets, q, extra))
        subs.sort(key=lambda t: t[:3])
        for _area, _d, _nets, p_sub, extra in subs:
            extragates: list[GateKind] = []
            need = Counter(extra)
            for kind in p_short.kinds:  # keep the suspect's relative order
                if need[kind] > 0:
                    extragates.append(kind)
                    need[kind] -= 1
            chain = _transparent_chain(extragates, tech)
            if chain is None:
                continue
            try:
                new_nl, new_ids = splice_chain(
                    nl, p_sub.start, chain, chain_tag, tech.c_load
                )
            except Exception:
                continue
            p_ref = _chain_extended_path(new_nl, new_ids, p_sub)
            if not _creation_checks(
                nl, new_nl, net, p_short, p_ref, p_sub, budget, limits, criterion, config
            ):
                continue
            sym = classify_pair(p_short, p_ref)
            if sym is SymmetryType.NONE:
                continue
            pair = SymmetricPathPair(
                pair_id=f"{net}:{_branch_of(p_short, net)}",
                covered_net=net,
                branch=_branch_of(p_short, net),
                suspect=p_short,
                reference=p_ref,
                symmetry=sym,
                rank=0.0,  # ranked later against the final placement
                created=True,
                extra_gates=tuple(new_ids),
            )
            return new_nl, pair, list(new_ids)
    raise SelectionError(f"no transparent subset path found for net {net!r}")


def _chain_extended_path(nl: Netlist, chain_ids: list[str], p_sub: Path) -> Path:
    hops = tuple((gid, 0) for gid in chain_ids) + p_sub.hops
    nets = (p_sub.start,) + tuple(chain_ids) + p_sub.nets[1:]
    kinds = tuple(nl.gates[g].kind for g, _ in hops)
    return Path(hops=hops, nets=nets, kinds=kinds)


def _creation_checks(
    old_nl: Netlist,
    new_nl: Netlist,
    net: str,
    p_short: Path,
    p_ref: Path,
    p_sub: Path,
    budget: float,
    limits: PathLimits,
    criterion: SensitizationCriterion,
    config: SelectionConfig,
) -> bool:
    try:
        new_nl.validate()
    except Exception:
        return False
    if not equivalent_random(old_nl, new_nl, config.equiv_vectors, config.seed):
        return False
    if len(old_nl.primary_inputs) <= config.sat_equiv_max_inputs:
        if equivalent_sat(old_nl, new_nl, timeout_s=config.solver_timeout_s) is not True:
            return False
    touched = enumerate_paths(new_nl, p_sub.start, limits)
    for p in touched.paths:
        if _avg_nominal(new_nl, p) > budget * (1.0 + 1e-9):
            return False
    if not is_sensitizable(new_nl, p_ref, criterion, config.solver_timeout_s):
        return False
    if not is_sensitizable(new_nl, p_short, criterion, config.solver_timeout_s):
        return False
    return True
