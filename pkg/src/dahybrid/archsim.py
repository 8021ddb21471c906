"""Bit-exact functional simulation and structural export of architecture plans."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Optional, Sequence

from .archopt import ArchitecturePlan
from .compopt import CompressorTree
from .costmodel import CompressorSpec
from .dacore import (
    FilterOutput,
    QuantizedFilter,
    SampleWindow,
    accumulate_planes,
    bit_decompose,
    clog2,
    output_width,
    signed_range,
)
from .errors import AssignmentError, DimensionError, SimulationConfigError


@dataclass(frozen=True)
class TapAssignment:
    """Which taps drive each LUT's address lines (bit 0 first) and which drive muxes."""

    lut_taps: tuple[tuple[int, ...], ...]
    mux_taps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lut_taps", tuple(tuple(t) for t in self.lut_taps))
        object.__setattr__(self, "mux_taps", tuple(self.mux_taps))

    def check(self, plan: ArchitecturePlan) -> None:
        used = [t for group in self.lut_taps for t in group] + list(self.mux_taps)
        if sorted(used) != list(range(plan.order_n)):
            raise AssignmentError(f"assignment is not a bijection onto taps 0..{plan.order_n - 1}")
        if sorted(len(g) for g in self.lut_taps) != sorted(plan.parts):
            raise AssignmentError(
                f"LUT groups of sizes {[len(g) for g in self.lut_taps]} do not match partition {list(plan.parts)}"
            )
        if len(self.mux_taps) != plan.mux_selector_count:
            raise AssignmentError("mux tap count does not match the plan")

    def to_dict(self) -> dict:
        return {"lut_taps": [list(g) for g in self.lut_taps], "mux_taps": list(self.mux_taps)}

    @classmethod
    def from_dict(cls, doc: dict) -> "TapAssignment":
        return cls(tuple(tuple(g) for g in doc["lut_taps"]), tuple(doc["mux_taps"]))


def default_assignment(plan: ArchitecturePlan) -> TapAssignment:
    """Taps 0..k-1 fill the LUTs in partition order; the rest go to muxes."""
    groups = []
    start = 0
    for p in plan.parts:
        groups.append(tuple(range(start, start + p)))
        start += p
    return TapAssignment(tuple(groups), tuple(range(start, plan.order_n)))


@dataclass(frozen=True)
class LutContents:
    tables: tuple[tuple[int, ...], ...]
    word_widths: tuple[int, ...]
    assignment: TapAssignment


def build_lut_contents(
    plan: ArchitecturePlan,
    filt: QuantizedFilter,
    assignment: Optional[TapAssignment] = None,
) -> LutContents:
    if filt.order_n != plan.order_n:
        raise DimensionError(f"plan is for {plan.order_n} taps, filter has {filt.order_n}")
    if assignment is None:
        assignment = default_assignment(plan)
    assignment.check(plan)
    tables = []
    widths = []
    coefs = filt.coefficients
    for taps in assignment.lut_taps:
        width = filt.coef_width + clog2(len(taps))
        lo, hi = signed_range(width)
        entries = []
        for address in range(1 << len(taps)):
            value = sum(coefs[t] for b, t in enumerate(taps) if (address >> b) & 1)
            assert lo <= value <= hi, f"LUT word {value} overflows {width} bits"
            entries.append(value)
        tables.append(tuple(entries))
        widths.append(width)
    return LutContents(tuple(tables), tuple(widths), assignment)


# --------------------------------------------------------------------------
# compressor layer


def carry_save(rows: Sequence[int], outputs: int) -> list[int]:
    """Reduce rows with full-adder steps (sum = xor, carry = majority << 1) until ``outputs`` remain."""
    rows = list(rows)
    while len(rows) > outputs:
        a, b, c = rows.pop(0), rows.pop(0), rows.pop(0)
        rows.append(a ^ b ^ c)
        rows.append(((a & b) | (a & c) | (b & c)) << 1)
    return rows


def evaluate_tree(tree: CompressorTree, rows: Sequence[int], trace: Optional[list] = None) -> list[int]:
    """Run rows through a compressor tree.

    The basic compressor takes the first ``inputs`` rows and the parallel part
    takes the rest. The follow-on stage receives the basic outputs followed
    by the parallel outputs. When ``trace`` is a list, each node appends
    ``(kind, rows_in, sum_in, sum_out)``.
    """
    if len(rows) != tree.rows_in:
        raise SimulationConfigError(f"tree expects {tree.rows_in} rows, got {len(rows)}")
    if tree.kind == "wires":
        out = list(rows)
    elif tree.kind == "basic":
        out = carry_save(rows, tree.spec.outputs)
    else:
        head = carry_save(rows[: tree.spec.inputs], tree.spec.outputs)
        side = evaluate_tree(tree.parallel, rows[tree.spec.inputs:], trace)
        out = evaluate_tree(tree.followed_by, head + side, trace)
    if trace is not None:
        trace.append((tree.kind, tree.rows_in, sum(rows), sum(out)))
    assert sum(out) == sum(rows), "compression must preserve the row sum"
    return out


def _check_contents(plan: ArchitecturePlan, contents: LutContents) -> None:
    try:
        contents.assignment.check(plan)
    except AssignmentError as exc:
        raise SimulationConfigError(f"contents were not built for this plan: {exc}") from exc
    for taps, table in zip(contents.assignment.lut_taps, contents.tables):
        if len(table) != 1 << len(taps):
            raise SimulationConfigError("LUT table size does not match its address width")


def plane_rows(plan: ArchitecturePlan, filt: QuantizedFilter, contents: LutContents, bits: Sequence[int]) -> list[int]:
    """Operand rows for one bit-plane: LUT words first, then mux words."""
    rows = []
    for taps, table in zip(contents.assignment.lut_taps, contents.tables):
        address = 0
        for b, t in enumerate(taps):
            address |= bits[t] << b
        rows.append(table[address])
    for t in contents.assignment.mux_taps:
        rows.append(filt.coefficients[t] if bits[t] else 0)
    return rows


def simulate_plane(plan: ArchitecturePlan, rows: Sequence[int], trace: Optional[list] = None) -> int:
    if plan.compressor is not None:
        rows = evaluate_tree(plan.compressor, rows, trace)
    if len(rows) == 2:
        return rows[0] + rows[1]
    if len(rows) == 1:
        return rows[0]
    raise SimulationConfigError(f"final adder expects 1 or 2 rows, got {len(rows)}")


def simulate_plan(
    plan: ArchitecturePlan,
    filt: QuantizedFilter,
    contents: LutContents,
    window: SampleWindow,
    trace: Optional[list] = None,
) -> FilterOutput:
    if len(window.samples) != plan.order_n or filt.order_n != plan.order_n:
        raise DimensionError("plan, filter and window disagree on the number of taps")
    _check_contents(plan, contents)
    sums = []
    for bits in bit_decompose(window).planes:
        sums.append(simulate_plane(plan, plane_rows(plan, filt, contents, bits), trace))
    return FilterOutput(accumulate_planes(sums), output_width(filt, window.input_width))


# --------------------------------------------------------------------------
# structural export


@dataclass
class NetlistDocument:
    components: list[dict] = field(default_factory=list)
    connections: list[tuple[str, str]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, cid: str, kind: str, inputs: Sequence[str], outputs: Sequence[str], **params) -> str:
        self.components.append(
            {"id": cid, "kind": kind, "inputs": list(inputs), "outputs": list(outputs), "params": params}
        )
        return cid

    def connect(self, src: str, dst: str) -> None:
        self.connections.append((src, dst))

    def count(self, kind: str) -> int:
        return sum(1 for c in self.components if c["kind"] == kind)

    def validate(self) -> None:
        """Every endpoint must name a declared port; the graph must be acyclic."""
        outs = {f"{c['id']}.{p}" for c in self.components for p in c["outputs"]}
        ins = {f"{c['id']}.{p}" for c in self.components for p in c["inputs"]}
        graph: dict[str, set] = {c["id"]: set() for c in self.components}
        for src, dst in self.connections:
            if src not in outs:
                raise ValueError(f"connection source {src} is not an output port")
            if dst not in ins:
                raise ValueError(f"connection target {dst} is not an input port")
            graph[dst.split(".")[0]].add(src.split(".")[0])
        if self.metadata.get("output") not in outs:
            raise ValueError("netlist output is not a component output port")
        try:
            tuple(TopologicalSorter(graph).static_order())
        except CycleError as exc:
            raise ValueError(f"netlist has a combinational cycle: {exc.args[1]}") from exc

    def to_dict(self) -> dict:
        return {
            "schema": "dahybrid.netlist/1",
            "components": self.components,
            "connections": [{"from": s, "to": d} for s, d in self.connections],
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "NetlistDocument":
        return cls(
            components=list(doc["components"]),
            connections=[(c["from"], c["to"]) for c in doc["connections"]],
            metadata=dict(doc["metadata"]),
        )


def _wire_tree(doc: NetlistDocument, tree: CompressorTree, sources: list[str], counter: list[int]) -> list[str]:
    if tree.kind == "wires":
        return list(sources)

    def place(spec: CompressorSpec, srcs: list[str]) -> list[str]:
        cid = f"cmp{counter[0]}"
        counter[0] += 1
        doc.add(
            cid,
            "basic_compressor",
            [f"in{i}" for i in range(spec.inputs)],
            [f"out{i}" for i in range(spec.outputs)],
            compressor=spec.name,
            delay=float(spec.delay),
            power=float(spec.power),
        )
        for i, s in enumerate(srcs):
            doc.connect(s, f"{cid}.in{i}")
        return [f"{cid}.out{i}" for i in range(spec.outputs)]

    if tree.kind == "basic":
        return place(tree.spec, sources)
    head = place(tree.spec, sources[: tree.spec.inputs])
    side = _wire_tree(doc, tree.parallel, sources[tree.spec.inputs:], counter)
    return _wire_tree(doc, tree.followed_by, head + side, counter)


def export_netlist(plan: ArchitecturePlan, contents: LutContents) -> NetlistDocument:
    _check_contents(plan, contents)
    doc = NetlistDocument()
    n = plan.order_n
    doc.add("sr", "register", [], [f"q{i}" for i in range(n)], taps=n, width=plan.input_width)
    rows: list[str] = []
    for idx, (taps, table, width) in enumerate(
        zip(contents.assignment.lut_taps, contents.tables, contents.word_widths)
    ):
        cid = doc.add(
            f"lut{idx}",
            "lut",
            [f"a{b}" for b in range(len(taps))],
            ["y"],
            addr_bits=len(taps),
            word_width=width,
            taps=list(taps),
            contents=list(table),
        )
        for b, t in enumerate(taps):
            doc.connect(f"sr.q{t}", f"{cid}.a{b}")
        rows.append(f"{cid}.y")
    for t in contents.assignment.mux_taps:
        cid = doc.add(f"mux{t}", "mux", ["sel"], ["y"], tap=t, width=plan.coef_width)
        doc.connect(f"sr.q{t}", f"{cid}.sel")
        rows.append(f"{cid}.y")
    if plan.compressor is not None:
        rows = _wire_tree(doc, plan.compressor, rows, [0])
    if len(rows) == 2:
        doc.add("cla", "cla", ["a", "b"], ["s"], width=plan.cla_width)
        doc.connect(rows[0], "cla.a")
        doc.connect(rows[1], "cla.b")
        rows = ["cla.s"]
    doc.metadata = {
        "output": rows[0],
        "plan": plan.to_dict(),
        "assignment": contents.assignment.to_dict(),
        "summary": {
            "variant": plan.variant,
            "order_n": n,
            "lut_addr_bits": plan.lut_addr_bits,
            "lut_count": plan.lut_count,
            "rows": plan.rows,
        },
    }
    return doc


def plan_from_netlist(doc: NetlistDocument) -> tuple[ArchitecturePlan, TapAssignment]:
    return (
        ArchitecturePlan.from_dict(doc.metadata["plan"]),
        TapAssignment.from_dict(doc.metadata["assignment"]),
    )
