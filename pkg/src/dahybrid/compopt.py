"""Synthesis of h:2 compressor trees from a catalog of basic compressors.

Trees follow a three-part grammar. A tree is plain ``wires``, a single
``basic`` catalog compressor, or a ``composite``. A composite feeds some rows
into one basic compressor while the remaining rows go through a parallel
subtree, and a follow-on subtree then reduces the combined outputs.

The optimizer fills a table of exact-output states ``(rows_in, rows_out)``.
Each state holds a Pareto frontier of (delay, power).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .costmodel import (
    ZERO,
    CompressorSpec,
    CostPoint,
    CostTables,
    ParetoSet,
    as_fraction,
    check_objective,
    json_number,
    objective_key,
    pareto_prune,
    table_scales,
)
from .errors import DomainError, SynthesisError, TractabilityError


@dataclass(frozen=True)
class CompressorTree:
    kind: str
    rows_in: int
    rows_out: int
    cost: CostPoint
    spec: Optional[CompressorSpec] = None
    parallel: Optional["CompressorTree"] = None
    followed_by: Optional["CompressorTree"] = None

    @classmethod
    def wires(cls, rows: int) -> "CompressorTree":
        return cls("wires", rows, rows, ZERO)

    @classmethod
    def basic(cls, spec: CompressorSpec) -> "CompressorTree":
        return cls("basic", spec.inputs, spec.outputs, spec.cost, spec=spec)

    @classmethod
    def composite(cls, parallel: "CompressorTree", spec: CompressorSpec, followed_by: "CompressorTree"):
        cost = CostPoint(
            max(parallel.cost.delay, spec.delay) + followed_by.cost.delay,
            parallel.cost.power + spec.power + followed_by.cost.power,
        )
        return cls(
            "composite",
            parallel.rows_in + spec.inputs,
            followed_by.rows_out,
            cost,
            spec=spec,
            parallel=parallel,
            followed_by=followed_by,
        )

    @property
    def compressor_count(self) -> int:
        if self.kind == "wires":
            return 0
        if self.kind == "basic":
            return 1
        return 1 + self.parallel.compressor_count + self.followed_by.compressor_count

    @property
    def signature(self) -> str:
        if self.kind == "wires":
            return f"w{self.rows_in}"
        if self.kind == "basic":
            return self.spec.name
        return f"[{self.parallel.signature}|{self.spec.name}]>{self.followed_by.signature}"

    @property
    def tiebreak(self) -> tuple:
        return (self.compressor_count, self.signature)

    def basic_nodes(self) -> list[CompressorSpec]:
        """Catalog compressors in evaluation order."""
        if self.kind == "wires":
            return []
        if self.kind == "basic":
            return [self.spec]
        return [self.spec] + self.parallel.basic_nodes() + self.followed_by.basic_nodes()

    def validate(self) -> None:
        """Recompute rows and costs bottom-up; raise AssertionError on any drift."""
        if self.kind == "wires":
            assert self.rows_in == self.rows_out, "wires must pass rows through"
            assert self.cost == ZERO, "wires are free"
            return
        if self.kind == "basic":
            assert self.rows_in == self.spec.inputs and self.rows_out == self.spec.outputs
            assert self.cost == self.spec.cost
            return
        assert self.kind == "composite", f"unknown node kind {self.kind!r}"
        self.parallel.validate()
        self.followed_by.validate()
        assert self.rows_in == self.parallel.rows_in + self.spec.inputs
        assert self.followed_by.rows_in == self.spec.outputs + self.parallel.rows_out
        assert self.rows_out == self.followed_by.rows_out
        assert self.cost.delay == max(self.parallel.cost.delay, self.spec.delay) + self.followed_by.cost.delay
        assert self.cost.power == self.parallel.cost.power + self.spec.power + self.followed_by.cost.power

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "rows_in": self.rows_in,
            "rows_out": self.rows_out,
            "delay": json_number(self.cost.delay),
            "power": json_number(self.cost.power),
        }
        if self.spec is not None:
            out["compressor"] = self.spec.to_dict()
        if self.kind == "composite":
            out["parallel"] = self.parallel.to_dict()
            out["followed_by"] = self.followed_by.to_dict()
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "CompressorTree":
        kind = doc["kind"]
        if kind == "wires":
            return cls.wires(doc["rows_in"])
        c = doc["compressor"]
        spec = CompressorSpec(c["name"], c["inputs"], c["outputs"], as_fraction(c["delay"]), as_fraction(c["power"]))
        if kind == "basic":
            return cls.basic(spec)
        return cls.composite(cls.from_dict(doc["parallel"]), spec, cls.from_dict(doc["followed_by"]))

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = f"{pad}{self.rows_in}->{self.rows_out} "
        if self.kind == "wires":
            return head + "wires"
        cost = f"(d={json_number(self.cost.delay)}, p={json_number(self.cost.power)})"
        if self.kind == "basic":
            return head + f"{self.spec.name} {cost}"
        lines = [head + f"composite {cost}", f"{pad}  basic {self.spec.name}", f"{pad}  parallel:"]
        lines.append(self.parallel.render(indent + 2))
        lines.append(f"{pad}  then:")
        lines.append(self.followed_by.render(indent + 2))
        return "\n".join(lines)


def _split_choices(rest: int) -> range:
    """Row counts the parallel part may leave behind."""
    if rest <= 2:
        return range(rest, rest + 1)
    return range(2, rest + 1)


class CompressorOptimizer:
    """Frontier table over exact-output states, grown on demand.

    Integer-scaled costs are used internally; witnesses are tuples
    ``("w", rows) | ("b", spec_index) | ("c", spec_index, left, follow)``
    pointing at other table entries.
    """

    def __init__(self, tables: CostTables):
        self.tables = tables
        self.catalog = tables.catalog
        self._dscale, self._pscale = table_scales(tables)
        self._cd = [self._dscale.to_int(c.delay) for c in self.catalog]
        self._cp = [self._pscale.to_int(c.power) for c in self.catalog]
        self._states: dict[tuple[int, int], list] = {(0, 0): [(0, 0, 0, ("w", 0))]}
        self._built = 0
        self._sig_memo: dict[int, str] = {}

    # ---- table construction

    def _describe(self, entry) -> str:
        w = entry[3]
        if w[0] == "w":
            return f"w{w[1]}"
        if w[0] == "b":
            return self.catalog[w[1]].name
        return f"[{self._signature(w[2])}|{self.catalog[w[1]].name}]>{self._signature(w[3])}"

    def _signature(self, entry) -> str:
        # only table entries reach here; they live as long as the table, so id() is stable
        key = id(entry)
        sig = self._sig_memo.get(key)
        if sig is None:
            sig = self._sig_memo[key] = self._describe(entry)
        return sig

    def _tiebreak(self, entry):
        return (entry[2], self._describe(entry))

    def state(self, i: int, o: int) -> list:
        self.build(i)
        return self._states.get((i, o), [])

    def build(self, rows: int) -> None:
        for i in range(self._built + 1, rows + 1):
            self._states[(i, i)] = [(0, 0, 0, ("w", i))]
            for o in range(1, i):
                self._states[(i, o)] = self._solve(i, o)
            self._built = i

    def _solve(self, i: int, o: int) -> list:
        states = self._states
        cands = []
        for idx, spec in enumerate(self.catalog):
            ins, outs = spec.inputs, spec.outputs
            if ins > i:
                continue
            dc, pc = self._cd[idx], self._cp[idx]
            if ins == i and outs == o:
                cands.append((dc, pc, 1, ("b", idx)))
            rest = i - ins
            for g in _split_choices(rest):
                if outs + g < o:
                    continue
                if rest == 0 and outs + g == o:
                    # already covered by the bare basic node
                    continue
                left = states.get((rest, g))
                follow = states.get((outs + g, o))
                if not left or not follow:
                    continue
                # left entries finishing before the basic compressor all share
                # its delay; only the cheapest of them can survive
                usable = []
                early = None
                for e in left:
                    if e[0] <= dc:
                        early = e
                    else:
                        usable.append(e)
                if early is not None:
                    usable.append(early)
                for le in usable:
                    stage = le[0] if le[0] > dc else dc
                    base_p = le[1] + pc
                    base_n = le[2] + 1
                    for fe in follow:
                        cands.append((stage + fe[0], base_p + fe[1], base_n + fe[2], ("c", idx, le, fe)))
        return pareto_prune(cands, tiebreak=self._tiebreak)

    # ---- conversion back to trees

    def to_tree(self, entry) -> CompressorTree:
        w = entry[3]
        if w[0] == "w":
            return CompressorTree.wires(w[1])
        spec = self.catalog[w[1]]
        if w[0] == "b":
            return CompressorTree.basic(spec)
        return CompressorTree.composite(self.to_tree(w[2]), spec, self.to_tree(w[3]))

    def frontier(self, i: int, o: int) -> ParetoSet:
        entries = [(self.to_tree(e).cost, self.to_tree(e)) for e in self.state(i, o)]
        return ParetoSet.from_entries(entries, tiebreak=lambda t: t.tiebreak)

    def scaled_frontier(self, h: int) -> list[tuple[int, int, "object"]]:
        """Integer frontier of the h:2 problem, for callers sharing this scale."""
        if h <= 2:
            return [(0, 0, 0, ("w", h))]
        return self.state(h, 2)

    def optimize(self, h: int, objective: str = "delay") -> CompressorTree:
        check_objective(objective)
        if h < 1:
            raise DomainError(f"compressor needs at least one input row, got {h}")
        if h <= 2:
            return CompressorTree.wires(h)
        entries = self.state(h, 2)
        if not entries:
            names = ", ".join(c.name for c in self.catalog) or "empty"
            raise SynthesisError(f"catalog ({names}) cannot reduce {h} rows to 2")
        best = min(
            entries,
            key=lambda e: (objective_key(objective, e[0], e[1]), self._tiebreak(e)),
        )
        return self.to_tree(best)


def optimize_compressor(tables: CostTables, h: int, objective: str = "delay") -> CompressorTree:
    """Objective-optimal h:2 compressor tree."""
    return CompressorOptimizer(tables).optimize(h, objective)


def generalized_state(tables: CostTables, i: int, j: int) -> ParetoSet:
    """Frontier for reducing ``i`` rows to at most ``j`` rows."""
    if i < 1 or j < 1:
        raise DomainError(f"rows must be positive, got i={i}, j={j}")
    if j >= i and i > 2:
        raise DomainError(f"target {j} rows is not a reduction of {i} rows")
    if j >= i:
        return ParetoSet([ZERO])
    opt = CompressorOptimizer(tables)
    entries = []
    for o in range(1, j + 1):
        for e in opt.state(i, o):
            tree = opt.to_tree(e)
            entries.append((tree.cost, tree))
    return ParetoSet.from_entries(entries, tiebreak=lambda t: t.tiebreak)


# --------------------------------------------------------------------------
# exhaustive reference


def enumerate_trees(tables: CostTables, h: int) -> tuple[CompressorTree, ...]:
    """Every h:2 tree of the grammar, one representative per distinct cost.

    Works in exact fractions on tree objects, without frontier pruning.
    """
    if h > 10:
        raise TractabilityError(f"tree enumeration limited to h <= 10, got {h}")
    if h < 1:
        raise DomainError(f"compressor needs at least one input row, got {h}")
    if h <= 2:
        return (CompressorTree.wires(h),)
    catalog = tables.catalog

    @lru_cache(maxsize=None)
    def trees(i: int, o: int) -> tuple[CompressorTree, ...]:
        if i == o:
            return (CompressorTree.wires(i),)
        if o > i:
            return ()
        found: dict[CostPoint, CompressorTree] = {}

        def offer(t: CompressorTree):
            cur = found.get(t.cost)
            if cur is None or t.tiebreak < cur.tiebreak:
                found[t.cost] = t

        for spec in catalog:
            if spec.inputs > i:
                continue
            if spec.inputs == i and spec.outputs == o:
                offer(CompressorTree.basic(spec))
            rest = i - spec.inputs
            for g in _split_choices(rest):
                if rest == 0 and spec.outputs + g == o:
                    continue
                for left in trees(rest, g):
                    for follow in trees(spec.outputs + g, o):
                        offer(CompressorTree.composite(left, spec, follow))
        return tuple(found.values())

    return trees(h, 2)


def brute_force_comp(tables: CostTables, h: int, objective: str = "delay") -> CompressorTree:
    """Exhaustive reference for :func:`optimize_compressor`; meant for tests."""
    check_objective(objective)
    options = enumerate_trees(tables, h)
    if not options:
        raise SynthesisError(f"catalog cannot reduce {h} rows to 2")
    return min(options, key=lambda t: (objective_key(objective, t.cost.delay, t.cost.power), t.tiebreak))


def tree_objective(tree: CompressorTree, objective: str) -> Fraction:
    return {"delay": tree.cost.delay, "power": tree.cost.power, "pdp": tree.cost.pdp}[objective]
