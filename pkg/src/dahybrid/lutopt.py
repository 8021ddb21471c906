"""Partitioning of LUT address bits into basic LUTs.

A layer of ``m`` LUTs reads ``k`` address bits in parallel, so its delay is
the slowest LUT and its power is the sum over LUTs. Each dynamic-programming
state (bits, luts) keeps the full Pareto frontier of achievable
(delay, power) pairs, which makes the power-delay-product optimum exact even
though that product does not decompose over parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .costmodel import (
    CostPoint,
    CostTables,
    ParetoSet,
    check_objective,
    objective_key,
    pareto_prune,
    table_scales,
)
from .errors import DomainError, TractabilityError


@dataclass(frozen=True)
class LutPartitionPlan:
    parts: tuple[int, ...]
    per_part_width: tuple[int, ...]
    cost: CostPoint
    costs: ParetoSet
    objective: str

    @property
    def k(self) -> int:
        return sum(self.parts)

    @property
    def m(self) -> int:
        return len(self.parts)

    def to_dict(self) -> dict:
        return {
            "parts": list(self.parts),
            "per_part_width": list(self.per_part_width),
            "objective": self.objective,
            "cost": self.cost.to_dict(),
            "frontier": [
                {**pt.to_dict(), "parts": list(w)} for pt, w in self.costs.witnesses()
            ],
        }


def partition_cost(tables: CostTables, parts) -> CostPoint:
    return CostPoint(
        max(tables.lut.delay(p) for p in parts),
        sum(tables.lut.power(p) for p in parts),
    )


def _check_request(tables: CostTables, k: int, m: int):
    if m < 1 or k < 1:
        raise DomainError(f"need k >= 1 and m >= 1, got k={k}, m={m}")
    if m > k:
        raise DomainError(f"cannot split {k} address bits into {m} LUTs")
    if k > m * tables.max_lut_bits:
        raise DomainError(
            f"{k} address bits need more than {m} LUTs of at most {tables.max_lut_bits} bits"
        )


def _plan(tables: CostTables, objective: str, frontier: ParetoSet) -> LutPartitionPlan:
    cost, parts = min(
        frontier.witnesses(),
        key=lambda e: (objective_key(objective, e[0].delay, e[0].power), e[1]),
    )
    return LutPartitionPlan(
        parts=parts,
        per_part_width=tuple(tables.lut.word_width(p) for p in parts),
        cost=cost,
        costs=frontier,
        objective=objective,
    )


class LutOptimizer:
    """Memoized frontier table for one set of cost tables.

    ``frontier(i, j)`` covers every multiset of ``j`` LUT widths summing to
    ``i``, each within the cost table's range.
    """

    def __init__(self, tables: CostTables):
        self.tables = tables
        self._dscale, self._pscale = table_scales(tables)
        lut = tables.lut
        self._d = [None] + [self._dscale.to_int(v) for v in lut.delay_by_addr_bits]
        self._p = [None] + [self._pscale.to_int(v) for v in lut.power_by_addr_bits]
        self._table: dict[tuple[int, int], list] = {}

    def _state(self, i: int, j: int) -> list:
        """Integer frontier entries ``(delay, power, parts)`` for i bits in j LUTs."""
        key = (i, j)
        if key in self._table:
            return self._table[key]
        kmax = self.tables.max_lut_bits
        if j < 1 or i < j or i > j * kmax:
            result = []
        elif j == 1:
            result = [(self._d[i], self._p[i], (i,))]
        else:
            cands = []
            for u in range(1, min(kmax, i - j + 1) + 1):
                du, pu = self._d[u], self._p[u]
                for d, p, parts in self._state(i - u, j - 1):
                    merged = tuple(sorted(parts + (u,), reverse=True))
                    cands.append((du if du > d else d, pu + p, merged))
            result = pareto_prune(cands, tiebreak=lambda e: e[2])
        self._table[key] = result
        return result

    def frontier(self, i: int, j: int) -> ParetoSet:
        # fill bottom-up so deep recursion never happens
        for jj in range(1, j + 1):
            for ii in range(jj, i - (j - jj) + 1):
                self._state(ii, jj)
        entries = [
            (CostPoint(self._dscale.to_fraction(d), self._pscale.to_fraction(p)), parts)
            for d, p, parts in self._state(i, j)
        ]
        return ParetoSet.from_entries(entries, tiebreak=lambda w: w)

    def optimize(self, k: int, m: int, objective: str = "delay") -> LutPartitionPlan:
        check_objective(objective)
        _check_request(self.tables, k, m)
        return _plan(self.tables, objective, self.frontier(k, m))


def optimize_lut(tables: CostTables, k: int, m: int, objective: str = "delay") -> LutPartitionPlan:
    """Best split of ``k`` LUT address bits into exactly ``m`` basic LUTs."""
    return LutOptimizer(tables).optimize(k, m, objective)


def partitions(k: int, m: int, largest: int) -> Iterator[tuple[int, ...]]:
    """All multisets of ``m`` positive parts summing to ``k``, non-increasing, each <= largest."""
    if m == 0:
        if k == 0:
            yield ()
        return
    top = min(largest, k - (m - 1))
    for first in range(top, 0, -1):
        if first * m < k:
            break
        for rest in partitions(k - first, m - 1, first):
            yield (first,) + rest


def brute_force_lut(tables: CostTables, k: int, m: int, objective: str = "delay") -> LutPartitionPlan:
    """Exhaustive reference for :func:`optimize_lut`; meant for tests."""
    check_objective(objective)
    if k > 16 or m > 8:
        raise TractabilityError(f"brute force limited to k <= 16 and m <= 8, got k={k}, m={m}")
    _check_request(tables, k, m)
    entries = [
        (partition_cost(tables, parts), parts)
        for parts in partitions(k, m, tables.max_lut_bits)
    ]
    best = min(
        entries, key=lambda e: (objective_key(objective, e[0].delay, e[0].power), e[1])
    )
    frontier = ParetoSet.from_entries(entries, tiebreak=lambda w: w)
    return LutPartitionPlan(
        parts=best[1],
        per_part_width=tuple(tables.lut.word_width(p) for p in best[1]),
        cost=best[0],
        costs=frontier,
        objective=objective,
    )
