"""Whole-unit architecture extraction and the baseline architectures.

A plan sends ``k`` of the ``n`` tap bits to ``m`` LUTs and the remaining
``n - k`` bits to coefficient muxes. The ``n - k + m`` resulting rows go
through a compressor tree and then a carry-lookahead adder (when two rows
remain). The LUT and mux layers run in parallel, and everything after them is
sequential.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .compopt import CompressorOptimizer, CompressorTree, enumerate_trees
from .costmodel import (
    ZERO,
    CompressorSpec,
    CostPoint,
    CostTables,
    ParetoSet,
    as_fraction,
    check_objective,
    cla_cost,
    json_number,
    lut_size_bits,
    mux_layer_cost,
    objective_key,
    objective_value,
    table_scales,
)
from .dacore import clog2
from .errors import DomainError, ModelRangeError, TractabilityError
from .lutopt import LutOptimizer, LutPartitionPlan, partition_cost, partitions

VARIANTS = ("hybrid", "pure_lut", "lut_less")
LAYERS = ("lut", "mux", "compressor", "cla")


def cla_width_for(n: int, tables: CostTables) -> int:
    if n < 1:
        raise DomainError(f"filter order must be >= 1, got {n}")
    return tables.coef_width + tables.input_width + clog2(n)


def compose_total(lut: CostPoint, mux: CostPoint, comp: CostPoint, cla: CostPoint) -> CostPoint:
    return CostPoint(
        max(lut.delay, mux.delay) + comp.delay + cla.delay,
        lut.power + mux.power + comp.power + cla.power,
    )


def _cost_from(doc: dict) -> CostPoint:
    return CostPoint(as_fraction(doc["delay"]), as_fraction(doc["power"]))


@dataclass(frozen=True)
class ArchitecturePlan:
    variant: str
    order_n: int
    lut_addr_bits: int
    lut_count: int
    partition: Optional[LutPartitionPlan]
    mux_selector_count: int
    compressor: Optional[CompressorTree]
    cla_width: int
    cost_breakdown: dict
    total: CostPoint
    objective: str
    coef_width: int
    input_width: int
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        k, m, n = self.lut_addr_bits, self.lut_count, self.order_n
        if not 0 <= k <= n:
            raise DomainError(f"LUT address bits {k} outside [0, {n}]")
        if (m == 0) != (k == 0) or m > k:
            raise DomainError(f"{m} LUTs cannot cover {k} address bits")
        if self.mux_selector_count != n - k:
            raise DomainError("every tap not on a LUT needs a mux")
        if sum(self.parts) != k or len(self.parts) != m:
            raise DomainError("partition does not match the plan's LUT bits and count")
        if self.compressor is not None and self.compressor.rows_in != self.rows:
            raise DomainError(f"compressor takes {self.compressor.rows_in} rows, plan produces {self.rows}")

    @property
    def parts(self) -> tuple[int, ...]:
        return self.partition.parts if self.partition is not None else ()

    @property
    def rows(self) -> int:
        """Operand rows entering the compressor layer."""
        return self.mux_selector_count + self.lut_count

    @property
    def has_cla(self) -> bool:
        return self.cla_width > 0

    @property
    def lut_bits(self) -> int:
        return sum(lut_size_bits(p, self.coef_width) for p in self.parts)

    @property
    def delay_without_cla(self) -> Fraction:
        return self.total.delay - self.cost_breakdown["cla"].delay

    @property
    def per_sample_delay(self) -> Fraction:
        """One pass per input bit-plane through the shared unit."""
        return self.input_width * self.total.delay

    def recomputed_total(self) -> CostPoint:
        b = self.cost_breakdown
        return compose_total(b["lut"], b["mux"], b["compressor"], b["cla"])

    def to_dict(self) -> dict:
        return {
            "schema": "dahybrid.plan/1",
            "variant": self.variant,
            "objective": self.objective,
            "order_n": self.order_n,
            "coef_width": self.coef_width,
            "input_width": self.input_width,
            "lut_addr_bits": self.lut_addr_bits,
            "lut_count": self.lut_count,
            "partition": list(self.parts),
            "lut_word_widths": list(self.partition.per_part_width) if self.partition else [],
            "lut_bits": self.lut_bits,
            "mux_selector_count": self.mux_selector_count,
            "compressor_rows": self.rows,
            "compressor": self.compressor.to_dict() if self.compressor is not None else None,
            "cla_width": self.cla_width,
            "cost_breakdown": {name: self.cost_breakdown[name].to_dict() for name in LAYERS},
            "total": self.total.to_dict(),
            "delay_without_cla": json_number(self.delay_without_cla),
            "per_sample_delay": json_number(self.per_sample_delay),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "ArchitecturePlan":
        parts = tuple(doc["partition"])
        breakdown = {name: _cost_from(doc["cost_breakdown"][name]) for name in LAYERS}
        partition = None
        if parts:
            partition = LutPartitionPlan(
                parts=parts,
                per_part_width=tuple(doc["lut_word_widths"]),
                cost=breakdown["lut"],
                costs=ParetoSet([breakdown["lut"]]),
                objective=doc["objective"],
            )
        comp = doc["compressor"]
        return cls(
            variant=doc["variant"],
            order_n=doc["order_n"],
            lut_addr_bits=doc["lut_addr_bits"],
            lut_count=doc["lut_count"],
            partition=partition,
            mux_selector_count=doc["mux_selector_count"],
            compressor=CompressorTree.from_dict(comp) if comp is not None else None,
            cla_width=doc["cla_width"],
            cost_breakdown=breakdown,
            total=_cost_from(doc["total"]),
            objective=doc["objective"],
            coef_width=doc["coef_width"],
            input_width=doc["input_width"],
            notes=tuple(doc.get("notes", ())),
        )


def assemble_plan(
    tables: CostTables,
    n: int,
    partition: Optional[LutPartitionPlan],
    compressor: Optional[CompressorTree],
    objective: str,
    variant: str = "hybrid",
    notes: Sequence[str] = (),
) -> ArchitecturePlan:
    """Build a plan from chosen layers, deriving the mux, CLA and totals."""
    parts = partition.parts if partition is not None else ()
    k, m = sum(parts), len(parts)
    rows = n - k + m
    lut = partition.cost if partition is not None else ZERO
    mux = mux_layer_cost(tables, n - k)
    comp = compressor.cost if compressor is not None else ZERO
    cla_width = cla_width_for(n, tables) if rows >= 2 else 0
    cla = cla_cost(tables, cla_width) if cla_width else ZERO
    breakdown = {"lut": lut, "mux": mux, "compressor": comp, "cla": cla}
    return ArchitecturePlan(
        variant=variant,
        order_n=n,
        lut_addr_bits=k,
        lut_count=m,
        partition=partition,
        mux_selector_count=n - k,
        compressor=compressor,
        cla_width=cla_width,
        cost_breakdown=breakdown,
        total=compose_total(lut, mux, comp, cla),
        objective=objective,
        coef_width=tables.coef_width,
        input_width=tables.input_width,
        notes=tuple(notes),
    )


class ArchitectureOptimizer:
    """Scans every (k, m) split, sharing LUT and compressor tables across orders."""

    def __init__(self, tables: CostTables):
        self.tables = tables
        self.luts = LutOptimizer(tables)
        self.comps = CompressorOptimizer(tables)
        self._dscale, self._pscale = table_scales(tables)

    def _scaled(self, point: CostPoint) -> tuple[int, int]:
        return self._dscale.to_int(point.delay), self._pscale.to_int(point.power)

    def _splits(self, n: int):
        kmax = self.tables.max_lut_bits
        for k in range(0, n + 1):
            for m in ([0] if k == 0 else range(-(-k // kmax), k + 1)):
                yield k, m

    def _search(self, n: int, objective: str, splits) -> Optional[tuple]:
        tables = self.tables
        cla_d, cla_p = self._scaled(cla_cost(tables, cla_width_for(n, tables)))
        self.comps.build(n)
        best = None
        for k, m in splits:
            mux_d, mux_p = self._scaled(mux_layer_cost(tables, n - k))
            rows = n - k + m
            lut_entries = [(0, 0, ())] if k == 0 else self.luts._state(k, m)
            comp_entries = self.comps.scaled_frontier(rows)
            extra_d = cla_d if rows >= 2 else 0
            extra_p = mux_p + (cla_p if rows >= 2 else 0)
            for ld, lp, parts in lut_entries:
                stage = ld if ld > mux_d else mux_d
                for ce in comp_entries:
                    d = stage + ce[0] + extra_d
                    p = lp + ce[1] + extra_p
                    # ties: fewer parts, then fewer LUT bits, then partition and tree descriptions
                    key = (objective_key(objective, d, p), m + ce[2], k, parts)
                    if best is None or key < best[0]:
                        best = (key, parts, ce)
                    elif key == best[0] and rows > 2:
                        if self.comps._tiebreak(ce) < self.comps._tiebreak(best[2]):
                            best = (key, parts, ce)
        return best

    def _materialize(self, n: int, objective: str, best: tuple, notes=()) -> ArchitecturePlan:
        _, parts, ce = best
        partition = None
        if parts:
            partition = LutPartitionPlan(
                parts=parts,
                per_part_width=tuple(self.tables.lut.word_width(p) for p in parts),
                cost=partition_cost(self.tables, parts),
                costs=self.luts.frontier(sum(parts), len(parts)),
                objective=objective,
            )
        compressor = self.comps.to_tree(ce)
        return assemble_plan(self.tables, n, partition, compressor, objective, "hybrid", notes)

    def optimize(self, n: int, objective: str = "delay") -> ArchitecturePlan:
        check_objective(objective)
        if n < 1:
            raise DomainError(f"filter order must be >= 1, got {n}")
        kmax = self.tables.max_lut_bits
        notes = []
        if n > kmax:
            notes.append(f"single-LUT endpoint k={n} skipped: beyond the {kmax}-bit LUT model")
        best = self._search(n, objective, self._splits(n))
        if best is None:
            raise DomainError(f"no architecture realizable for n={n} with these tables")
        return self._materialize(n, objective, best, notes)

    def plan_for_split(self, n: int, k: int, m: int, objective: str = "delay") -> ArchitecturePlan:
        """Best plan with exactly ``k`` LUT address bits in ``m`` LUTs."""
        check_objective(objective)
        if n < 1 or not 0 <= k <= n or (m == 0) != (k == 0) or m > k:
            raise DomainError(f"invalid split k={k}, m={m} for n={n}")
        best = self._search(n, objective, [(k, m)])
        if best is None:
            raise DomainError(f"split k={k}, m={m} not realizable with these tables")
        return self._materialize(n, objective, best)


def optimize_architecture(tables: CostTables, n: int, objective: str = "delay") -> ArchitecturePlan:
    """Objective-optimal hybrid plan over all LUT/mux splits."""
    return ArchitectureOptimizer(tables).optimize(n, objective)


def baseline_purelut(tables: CostTables, n: int, objective: str = "delay") -> ArchitecturePlan:
    """One LUT addressed by all ``n`` tap bits: no muxes, compressor or CLA."""
    if n < 1:
        raise DomainError(f"filter order must be >= 1, got {n}")
    if n > tables.max_lut_bits:
        raise ModelRangeError(
            f"a single {n}-bit LUT is beyond the {tables.max_lut_bits}-bit LUT model"
        )
    cost = tables.lut.cost(n)
    partition = LutPartitionPlan(
        parts=(n,),
        per_part_width=(tables.lut.word_width(n),),
        cost=cost,
        costs=ParetoSet([cost]),
        objective=objective,
    )
    return assemble_plan(tables, n, partition, None, objective, "pure_lut")


def full_adder(tables: CostTables) -> CompressorSpec:
    for spec in tables.catalog:
        if spec.inputs == 3 and spec.outputs == 2:
            return spec
    raise DomainError("catalog has no 3:2 compressor")


def baseline_lutless(tables: CostTables, n: int, objective: str = "delay") -> ArchitecturePlan:
    """Every tap gated by a mux, reduced by a full-adder-only tree."""
    if n < 1:
        raise DomainError(f"filter order must be >= 1, got {n}")
    fa_tables = tables.with_catalog([full_adder(tables).name])
    tree = CompressorOptimizer(fa_tables).optimize(n, objective)
    return assemble_plan(tables, n, None, tree, objective, "lut_less")


# --------------------------------------------------------------------------
# comparison report

CSV_COLUMNS = (
    "n",
    "purelut_delay",
    "lutless_delay",
    "hybrid_delay",
    "improvement_pct",
    "purelut_delay_no_cla",
    "lutless_delay_no_cla",
    "hybrid_delay_no_cla",
    "improvement_no_cla_pct",
    "hybrid_per_sample_delay",
    "lutless_per_sample_delay",
    "hybrid_k",
    "hybrid_m",
    "hybrid_rows",
    "purelut_bits",
    "hybrid_lut_bits",
)


def improvement(baseline: Fraction, candidate: Fraction) -> Fraction:
    if baseline == 0:
        return Fraction(0)
    return (baseline - candidate) / baseline


@dataclass
class ComparisonRow:
    n: int
    purelut: Optional[ArchitecturePlan]
    lutless: ArchitecturePlan
    hybrid: ArchitecturePlan

    @property
    def improvement(self) -> Fraction:
        return improvement(self.lutless.total.delay, self.hybrid.total.delay)

    @property
    def improvement_no_cla(self) -> Fraction:
        return improvement(self.lutless.delay_without_cla, self.hybrid.delay_without_cla)

    def record(self) -> dict:
        pl = self.purelut
        return {
            "n": self.n,
            "purelut_delay": json_number(pl.total.delay) if pl else None,
            "lutless_delay": json_number(self.lutless.total.delay),
            "hybrid_delay": json_number(self.hybrid.total.delay),
            "improvement_pct": round(float(self.improvement * 100), 4),
            "purelut_delay_no_cla": json_number(pl.delay_without_cla) if pl else None,
            "lutless_delay_no_cla": json_number(self.lutless.delay_without_cla),
            "hybrid_delay_no_cla": json_number(self.hybrid.delay_without_cla),
            "improvement_no_cla_pct": round(float(self.improvement_no_cla * 100), 4),
            "hybrid_per_sample_delay": json_number(self.hybrid.per_sample_delay),
            "lutless_per_sample_delay": json_number(self.lutless.per_sample_delay),
            "hybrid_k": self.hybrid.lut_addr_bits,
            "hybrid_m": self.hybrid.lut_count,
            "hybrid_rows": self.hybrid.rows,
            "purelut_bits": pl.lut_bits if pl else None,
            "hybrid_lut_bits": self.hybrid.lut_bits,
        }


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow] = field(default_factory=list)
    objective: str = "delay"

    def records(self) -> list[dict]:
        return [r.record() for r in self.rows]

    def to_dict(self) -> dict:
        return {"schema": "dahybrid.compare/1", "objective": self.objective, "rows": self.records()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for rec in self.records():
            writer.writerow({k: "" if v is None else v for k, v in rec.items()})
        return buf.getvalue()


def compare_architectures(tables: CostTables, n_list: Sequence[int], objective: str = "delay") -> ComparisonReport:
    check_objective(objective)
    for n in n_list:
        if n < 1:
            raise DomainError(f"filter order must be >= 1, got {n}")
    opt = ArchitectureOptimizer(tables)
    report = ComparisonReport(objective=objective)
    for n in n_list:
        purelut = baseline_purelut(tables, n, objective) if n <= tables.max_lut_bits else None
        report.rows.append(
            ComparisonRow(
                n=n,
                purelut=purelut,
                lutless=baseline_lutless(tables, n, objective),
                hybrid=opt.optimize(n, objective),
            )
        )
    return report


# --------------------------------------------------------------------------
# exhaustive reference


def brute_force_architecture(tables: CostTables, n: int, objective: str = "delay") -> Fraction:
    """Objective value of the best plan found by enumerating every combination.

    Every (k, m), every LUT partition and every compressor tree is costed
    from scratch with exact fractions. Meant for tests.
    """
    check_objective(objective)
    if n > 10:
        raise TractabilityError(f"architecture brute force limited to n <= 10, got {n}")
    if n < 1:
        raise DomainError(f"filter order must be >= 1, got {n}")
    cla_width = cla_width_for(n, tables)
    best = None
    for k in range(0, n + 1):
        mux = mux_layer_cost(tables, n - k)
        for m in ([0] if k == 0 else range(1, k + 1)):
            rows = n - k + m
            cla = cla_cost(tables, cla_width) if rows >= 2 else ZERO
            lut_options = [ZERO] if k == 0 else [
                partition_cost(tables, p) for p in partitions(k, m, tables.max_lut_bits)
            ]
            for lut in lut_options:
                for tree in enumerate_trees(tables, rows):
                    value = objective_value(compose_total(lut, mux, tree.cost, cla), objective)
                    if best is None or value < best:
                        best = value
    if best is None:
        raise DomainError(f"no architecture realizable for n={n}")
    return best
