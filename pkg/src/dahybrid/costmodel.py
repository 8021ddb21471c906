"""Gate-level cost abstractions.

Delay is measured in gate-delay units (one XOR gate = 2 units) and power in
XOR-equivalent units. Every number is kept as a :class:`fractions.Fraction`
so that optimizer tie-breaks compare exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Iterable, Literal, Optional, Sequence

from .dacore import clog2
from .errors import ConfigSyntaxError, ConfigValidationError, DomainError

Objective = Literal["delay", "power", "pdp"]
OBJECTIVES: tuple[str, ...] = ("delay", "power", "pdp")

XOR_DELAY = Fraction(2)


def check_objective(objective: str) -> str:
    if objective not in OBJECTIVES:
        raise DomainError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    return objective


def objective_key(objective: str, delay, power) -> tuple:
    """Sort key ranking (delay, power) pairs under an objective."""
    if objective == "delay":
        return (delay, power)
    if objective == "power":
        return (power, delay)
    return (delay * power, delay, power)


def as_fraction(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("booleans are not costs")
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def json_number(value: Fraction):
    """Render an exact cost as a JSON-friendly int or float."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return float(value)


@dataclass(frozen=True, order=True)
class CostPoint:
    delay: Fraction
    power: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delay", as_fraction(self.delay))
        object.__setattr__(self, "power", as_fraction(self.power))
        if self.delay < 0 or self.power < 0:
            raise DomainError(f"costs must be non-negative, got ({self.delay}, {self.power})")

    @property
    def pdp(self) -> Fraction:
        return self.delay * self.power

    def dominates(self, other: "CostPoint") -> bool:
        return (
            self.delay <= other.delay
            and self.power <= other.power
            and (self.delay < other.delay or self.power < other.power)
        )

    def to_dict(self) -> dict:
        return {
            "delay": json_number(self.delay),
            "power": json_number(self.power),
            "pdp": json_number(self.pdp),
        }


ZERO = CostPoint(0, 0)


def pareto_prune(entries: Iterable[tuple], tiebreak: Optional[Callable[[tuple], Any]] = None) -> list:
    """Reduce ``(delay, power, ...)`` tuples to their non-dominated subset.

    The result is sorted by ascending delay (strictly descending power).
    Entries sharing the same (delay, power) are resolved by ``tiebreak``;
    without one, the first such entry in sorted order wins.
    """
    ordered = sorted(entries, key=lambda e: (e[0], e[1]))
    out: list = []
    best_power = None
    i = 0
    n = len(ordered)
    while i < n:
        d, p = ordered[i][0], ordered[i][1]
        j = i + 1
        while j < n and ordered[j][0] == d and ordered[j][1] == p:
            j += 1
        if best_power is None or p < best_power:
            group = ordered[i:j]
            pick = min(group, key=tiebreak) if (tiebreak is not None and len(group) > 1) else group[0]
            out.append(pick)
            best_power = p
        i = j
    return out


class ParetoSet:
    """Non-dominated (delay, power) points, each optionally carrying a witness."""

    def __init__(self, points: Iterable[CostPoint] = (), tiebreak: Optional[Callable] = None):
        self._tiebreak = tiebreak
        self._entries: list[tuple] = []
        for p in points:
            self.add(p)

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[CostPoint, Any]], tiebreak=None) -> "ParetoSet":
        out = cls(tiebreak=tiebreak)
        out._entries = pareto_prune(
            ((pt.delay, pt.power, pt, w) for pt, w in entries),
            None if tiebreak is None else (lambda e: tiebreak(e[3])),
        )
        return out

    def add(self, point: CostPoint, witness: Any = None) -> None:
        tb = None if self._tiebreak is None else (lambda e: self._tiebreak(e[3]))
        self._entries = pareto_prune(self._entries + [(point.delay, point.power, point, witness)], tb)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self.points)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParetoSet) and self.points == other.points

    def __repr__(self) -> str:
        inner = ", ".join(f"({p.delay}, {p.power})" for p in self.points)
        return f"ParetoSet([{inner}])"

    @property
    def points(self) -> tuple[CostPoint, ...]:
        return tuple(e[2] for e in self._entries)

    def witnesses(self) -> list[tuple[CostPoint, Any]]:
        return [(e[2], e[3]) for e in self._entries]

    def _require(self):
        if not self._entries:
            raise DomainError("empty Pareto set has no extreme points")

    @property
    def min_delay(self) -> Fraction:
        self._require()
        return self._entries[0][0]

    @property
    def min_power(self) -> Fraction:
        self._require()
        return self._entries[-1][1]

    @property
    def min_pdp(self) -> Fraction:
        self._require()
        return min(e[0] * e[1] for e in self._entries)

    def best(self, objective: str) -> tuple[CostPoint, Any]:
        self._require()
        check_objective(objective)
        e = min(self._entries, key=lambda e: objective_key(objective, e[0], e[1]))
        return e[2], e[3]

    def value(self, objective: str) -> Fraction:
        point, _ = self.best(objective)
        return {"delay": point.delay, "power": point.power, "pdp": point.pdp}[objective]


def objective_value(point: CostPoint, objective: str) -> Fraction:
    check_objective(objective)
    return {"delay": point.delay, "power": point.power, "pdp": point.pdp}[objective]


# --------------------------------------------------------------------------
# LUT, compressor, mux and CLA models


def lut_size_bits(addr_bits: int, coef_width: int) -> int:
    if addr_bits < 1 or coef_width < 1:
        raise DomainError(f"lut_size_bits needs positive arguments, got ({addr_bits}, {coef_width})")
    return (1 << addr_bits) * (coef_width + clog2(addr_bits))


def default_lut_delay(addr_bits: int) -> Fraction:
    # decoder AND tree plus array access
    return Fraction(2 + 2 * clog2(max(addr_bits, 2)))


def default_lut_power(addr_bits: int, coef_width: int) -> Fraction:
    words = 1 << addr_bits
    return Fraction(1, 10) * words + Fraction(1, 50) * words * (coef_width + clog2(addr_bits))


@dataclass(frozen=True)
class LutCostModel:
    """Per-address-width delay and power of one decoder + memory LUT.

    Entry ``i`` of each table describes a LUT with ``i + 1`` address bits.
    """

    delay_by_addr_bits: tuple[Fraction, ...]
    power_by_addr_bits: tuple[Fraction, ...]
    coef_width: int

    def __post_init__(self):
        object.__setattr__(self, "delay_by_addr_bits", tuple(as_fraction(v) for v in self.delay_by_addr_bits))
        object.__setattr__(self, "power_by_addr_bits", tuple(as_fraction(v) for v in self.power_by_addr_bits))
        if len(self.delay_by_addr_bits) != len(self.power_by_addr_bits):
            raise ConfigValidationError("lut", "delay and power tables differ in length")
        if not self.delay_by_addr_bits:
            raise ConfigValidationError("lut", "tables must cover at least one address width")
        for i, (d, p) in enumerate(zip(self.delay_by_addr_bits, self.power_by_addr_bits)):
            if d < 0 or p <= 0:
                raise ConfigValidationError(f"lut[{i + 1}]", "delay must be >= 0 and power > 0")
        for a, b in zip(self.delay_by_addr_bits, self.delay_by_addr_bits[1:]):
            if b < a:
                raise ConfigValidationError("lut.delay", "must be non-decreasing in address bits")
        for a, b in zip(self.power_by_addr_bits, self.power_by_addr_bits[1:]):
            if b <= a:
                raise ConfigValidationError("lut.power", "must be strictly increasing in address bits")

    @classmethod
    def default(cls, coef_width: int = 16, max_addr_bits: int = 16) -> "LutCostModel":
        ks = range(1, max_addr_bits + 1)
        return cls(
            tuple(default_lut_delay(k) for k in ks),
            tuple(default_lut_power(k, coef_width) for k in ks),
            coef_width,
        )

    @property
    def max_addr_bits(self) -> int:
        return len(self.delay_by_addr_bits)

    def _check(self, addr_bits: int):
        if not 1 <= addr_bits <= self.max_addr_bits:
            raise DomainError(f"LUT address width {addr_bits} outside [1, {self.max_addr_bits}]")

    def delay(self, addr_bits: int) -> Fraction:
        self._check(addr_bits)
        return self.delay_by_addr_bits[addr_bits - 1]

    def power(self, addr_bits: int) -> Fraction:
        self._check(addr_bits)
        return self.power_by_addr_bits[addr_bits - 1]

    def cost(self, addr_bits: int) -> CostPoint:
        return CostPoint(self.delay(addr_bits), self.power(addr_bits))

    def word_width(self, addr_bits: int) -> int:
        return self.coef_width + clog2(addr_bits)


@dataclass(frozen=True)
class CompressorSpec:
    name: str
    inputs: int
    outputs: int
    delay: Fraction
    power: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delay", as_fraction(self.delay))
        object.__setattr__(self, "power", as_fraction(self.power))
        where = f"catalog.{self.name}"
        if self.outputs < 2:
            raise ConfigValidationError(where, "outputs must be >= 2")
        if self.outputs >= self.inputs:
            raise ConfigValidationError(where, "outputs must be < inputs")
        if self.inputs < 3:
            raise ConfigValidationError(where, "inputs must be >= 3")
        if self.delay <= 0 or self.power <= 0:
            raise ConfigValidationError(where, "delay and power must be > 0")

    @property
    def cost(self) -> CostPoint:
        return CostPoint(self.delay, self.power)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "delay": json_number(self.delay),
            "power": json_number(self.power),
        }


DEFAULT_CATALOG = (
    CompressorSpec("3:2", 3, 2, 4, 2),
    CompressorSpec("4:2", 4, 2, 6, 4),
    CompressorSpec("5:2", 5, 2, 8, 6),
    CompressorSpec("6:2", 6, 2, 9, 8),
    CompressorSpec("7:2", 7, 2, 10, 10),
    CompressorSpec("9:2", 9, 2, 12, 14),
)


@dataclass(frozen=True)
class CostTables:
    lut: LutCostModel
    catalog: tuple[CompressorSpec, ...]
    mux_delay: Fraction = Fraction(2)
    mux_power_per_bit: Fraction = Fraction(1, 2)
    cla_a: Fraction = Fraction(2)
    cla_b: Fraction = Fraction(2)
    cla_c: Fraction = Fraction(1)
    coef_width: int = 16
    input_width: int = 3

    def __post_init__(self):
        object.__setattr__(self, "catalog", tuple(self.catalog))
        for name in ("mux_delay", "mux_power_per_bit", "cla_a", "cla_b", "cla_c"):
            v = as_fraction(getattr(self, name))
            if v < 0:
                raise ConfigValidationError(name, "must be >= 0")
            object.__setattr__(self, name, v)
        if self.coef_width < 1:
            raise ConfigValidationError("widths.coef", "must be >= 1")
        if self.input_width < 1:
            raise ConfigValidationError("widths.input", "must be >= 1")
        if self.lut.coef_width != self.coef_width:
            raise ConfigValidationError("lut", "coefficient width disagrees with widths.coef")
        names = [c.name for c in self.catalog]
        if len(set(names)) != len(names):
            raise ConfigValidationError("catalog", "duplicate compressor names")

    def validate(self) -> "CostTables":
        """Full load-time validation, including catalog closure."""
        if not self.catalog:
            raise ConfigValidationError("catalog", "must not be empty")
        if not any(c.inputs == 3 and c.outputs == 2 for c in self.catalog):
            raise ConfigValidationError(
                "catalog", "needs a 3:2 entry so every row count >= 3 can reach 2 rows"
            )
        return self

    @property
    def max_lut_bits(self) -> int:
        return self.lut.max_addr_bits

    def with_catalog(self, names: Iterable[str]) -> "CostTables":
        """Copy restricted to the named catalog entries (closure not enforced)."""
        wanted = set(names)
        missing = wanted - {c.name for c in self.catalog}
        if missing:
            raise DomainError(f"unknown compressor(s): {sorted(missing)}")
        return replace(self, catalog=tuple(c for c in self.catalog if c.name in wanted))

    def compressor(self, name: str) -> CompressorSpec:
        for c in self.catalog:
            if c.name == name:
                return c
        raise DomainError(f"no compressor named {name!r} in the catalog")

    def to_dict(self) -> dict:
        return {
            "lut": {
                "delay": [json_number(v) for v in self.lut.delay_by_addr_bits],
                "power": [json_number(v) for v in self.lut.power_by_addr_bits],
            },
            "catalog": {c.name: {k: v for k, v in c.to_dict().items() if k != "name"} for c in self.catalog},
            "mux": {"delay": json_number(self.mux_delay), "power_per_bit": json_number(self.mux_power_per_bit)},
            "cla": {"a": json_number(self.cla_a), "b": json_number(self.cla_b), "c": json_number(self.cla_c)},
            "widths": {"coef": self.coef_width, "input": self.input_width},
        }


def default_tables(coef_width: int = 16, input_width: int = 3, max_lut_bits: int = 16) -> CostTables:
    return CostTables(
        lut=LutCostModel.default(coef_width, max_lut_bits),
        catalog=DEFAULT_CATALOG,
        coef_width=coef_width,
        input_width=input_width,
    ).validate()


def mux_layer_cost(tables: CostTables, selector_count: int) -> CostPoint:
    if selector_count < 0:
        raise DomainError(f"selector_count must be >= 0, got {selector_count}")
    if selector_count == 0:
        return ZERO
    # one mux depth no matter how many selectors
    return CostPoint(tables.mux_delay, selector_count * tables.coef_width * tables.mux_power_per_bit)


def cla_cost(tables: CostTables, width: int) -> CostPoint:
    if width < 1:
        raise DomainError(f"CLA width must be >= 1, got {width}")
    return CostPoint(tables.cla_a + tables.cla_b * clog2(width), tables.cla_c * width)


# --------------------------------------------------------------------------
# configuration loading

_TOP_KEYS = {"lut", "catalog", "mux", "cla", "widths"}
_LUT_KEYS = {"max_addr_bits", "delay", "power"}
_SPEC_KEYS = {"inputs", "outputs", "delay", "power"}
_MUX_KEYS = {"delay", "power_per_bit"}
_CLA_KEYS = {"a", "b", "c"}
_WIDTH_KEYS = {"coef", "input"}


def _section(doc: dict, key: str, allowed: set) -> dict:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigValidationError(key, "must be an object")
    unknown = set(value) - allowed
    if unknown:
        raise ConfigValidationError(key, f"unknown key(s) {sorted(unknown)}")
    return value


def _number(where: str, value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise ConfigValidationError(where, f"expected a number, got {value!r}")
    return Fraction(value)


def _int(where: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(where, f"expected an integer, got {value!r}")
    return value


def _parse_lut_table(where: str, values, length: Optional[int]) -> tuple[Fraction, ...]:
    if not isinstance(values, list):
        raise ConfigValidationError(where, "must be a list indexed by address bits 1..K")
    if length is not None and len(values) != length:
        raise ConfigValidationError(where, f"expected {length} entries, got {len(values)}")
    return tuple(_number(f"{where}[{i + 1}]", v) for i, v in enumerate(values))


def load_cost_config(document: str, coef_width: Optional[int] = None, input_width: Optional[int] = None) -> CostTables:
    """Parse a JSON cost configuration; absent fields take the defaults.

    ``catalog`` maps compressor names to field overrides; a new name must give
    all four fields and a ``null`` value removes a default entry. Explicit
    ``coef_width``/``input_width`` arguments override the ``widths`` section.
    """
    if document.strip():
        try:
            doc = json.loads(document, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise ConfigSyntaxError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    else:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigValidationError("<root>", "must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigValidationError("<root>", f"unknown key(s) {sorted(unknown)}")

    widths = _section(doc, "widths", _WIDTH_KEYS)
    coef_width = _int("widths.coef", coef_width if coef_width is not None else widths.get("coef", 16))
    input_width = _int("widths.input", input_width if input_width is not None else widths.get("input", 3))
    if coef_width < 1 or input_width < 1:
        raise ConfigValidationError("widths", "widths must be >= 1")

    lut_doc = _section(doc, "lut", _LUT_KEYS)
    kmax = None
    if "max_addr_bits" in lut_doc:
        kmax = _int("lut.max_addr_bits", lut_doc["max_addr_bits"])
        if kmax < 1:
            raise ConfigValidationError("lut.max_addr_bits", "must be >= 1")
    if "delay" in lut_doc and kmax is None:
        kmax = len(lut_doc["delay"]) if isinstance(lut_doc["delay"], list) else None
    if "power" in lut_doc and kmax is None:
        kmax = len(lut_doc["power"]) if isinstance(lut_doc["power"], list) else None
    kmax = kmax or 16
    base = LutCostModel.default(coef_width, kmax)
    delays = _parse_lut_table("lut.delay", lut_doc["delay"], kmax) if "delay" in lut_doc else base.delay_by_addr_bits
    powers = _parse_lut_table("lut.power", lut_doc["power"], kmax) if "power" in lut_doc else base.power_by_addr_bits
    lut = LutCostModel(delays, powers, coef_width)

    catalog_doc = doc.get("catalog", {})
    if not isinstance(catalog_doc, dict):
        raise ConfigValidationError("catalog", "must be an object keyed by compressor name")
    specs = {c.name: c for c in DEFAULT_CATALOG}
    for name, override in catalog_doc.items():
        where = f"catalog.{name}"
        if override is None:
            specs.pop(name, None)
            continue
        if not isinstance(override, dict):
            raise ConfigValidationError(where, "must be an object or null")
        unknown = set(override) - _SPEC_KEYS
        if unknown:
            raise ConfigValidationError(where, f"unknown key(s) {sorted(unknown)}")
        if name in specs:
            fields = specs[name].to_dict()
            fields.pop("name")
        else:
            missing = _SPEC_KEYS - set(override)
            if missing:
                raise ConfigValidationError(where, f"new compressor needs {sorted(missing)}")
            fields = {}
        fields.update(override)
        specs[name] = CompressorSpec(
            name,
            _int(f"{where}.inputs", fields["inputs"]),
            _int(f"{where}.outputs", fields["outputs"]),
            _number(f"{where}.delay", fields["delay"]),
            _number(f"{where}.power", fields["power"]),
        )

    mux = _section(doc, "mux", _MUX_KEYS)
    cla = _section(doc, "cla", _CLA_KEYS)
    tables = CostTables(
        lut=lut,
        catalog=tuple(sorted(specs.values(), key=lambda c: (c.inputs, c.outputs, c.name))),
        mux_delay=_number("mux.delay", mux.get("delay", 2)),
        mux_power_per_bit=_number("mux.power_per_bit", mux.get("power_per_bit", Fraction(1, 2))),
        cla_a=_number("cla.a", cla.get("a", 2)),
        cla_b=_number("cla.b", cla.get("b", 2)),
        cla_c=_number("cla.c", cla.get("c", 1)),
        coef_width=coef_width,
        input_width=input_width,
    )
    return tables.validate()


# --------------------------------------------------------------------------
# exact integer scaling for the optimizers' inner loops


class CostScale:
    """Maps exact rational costs onto integers sharing one denominator."""

    def __init__(self, values: Iterable[Fraction]):
        denom = 1
        for v in values:
            denom = math.lcm(denom, Fraction(v).denominator)
        self.denominator = denom

    def to_int(self, value) -> int:
        scaled = Fraction(value) * self.denominator
        assert scaled.denominator == 1
        return scaled.numerator

    def to_fraction(self, value: int) -> Fraction:
        return Fraction(value, self.denominator)


def table_scales(tables: CostTables) -> tuple[CostScale, CostScale]:
    delays = list(tables.lut.delay_by_addr_bits) + [c.delay for c in tables.catalog]
    delays += [tables.mux_delay, tables.cla_a, tables.cla_b]
    powers = list(tables.lut.power_by_addr_bits) + [c.power for c in tables.catalog]
    powers += [tables.mux_power_per_bit, tables.cla_c]
    return CostScale(delays), CostScale(powers)
