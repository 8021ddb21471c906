import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dahybrid.costmodel import (
    CostPoint,
    CostTables,
    ParetoSet,
    cla_cost,
    default_tables,
    load_cost_config,
    lut_size_bits,
    mux_layer_cost,
    pareto_prune,
)
from dahybrid.errors import ConfigSyntaxError, ConfigValidationError, DomainError


def test_lut_size_examples():
    assert lut_size_bits(8, 16) == 4864
    assert lut_size_bits(1, 16) == 32
    assert lut_size_bits(4, 8) == 160
    with pytest.raises(DomainError):
        lut_size_bits(0, 16)
    with pytest.raises(DomainError):
        lut_size_bits(3, 0)


def test_lut_size_strictly_increasing():
    for k, c in itertools.product(range(1, 16), range(4, 24)):
        assert lut_size_bits(k + 1, c) > lut_size_bits(k, c)
        assert lut_size_bits(k, c + 1) > lut_size_bits(k, c)


def test_default_lut_model(tables):
    lut = tables.lut
    assert [lut.delay(k) for k in (1, 2, 3, 4, 5, 8, 9, 16)] == [4, 4, 6, 6, 8, 8, 10, 10]
    # 0.1*2^k + 0.02*2^k*(C + clog2 k)
    assert lut.power(1) == Fraction(2, 10) + Fraction(2, 50) * 16
    assert lut.power(4) == Fraction(16, 10) + Fraction(16, 50) * 18
    assert lut.word_width(5) == 19
    assert tables.max_lut_bits == 16


def test_defaults_validate(tables):
    assert tables.validate() is tables
    names = [c.name for c in tables.catalog]
    assert names == ["3:2", "4:2", "5:2", "6:2", "7:2", "9:2"]
    assert tables.compressor("3:2").cost == CostPoint(4, 2)
    assert tables.compressor("9:2").cost == CostPoint(12, 14)


def test_empty_config_is_default(tables):
    assert load_cost_config("") == tables
    assert load_cost_config("{}") == tables


def test_single_override():
    t = load_cost_config('{"catalog": {"3:2": {"delay": 4.5}}}')
    assert t.compressor("3:2").delay == Fraction(9, 2)
    assert t.compressor("4:2") == default_tables().compressor("4:2")
    assert t.lut == default_tables().lut


def test_invalid_compressor_rejected():
    with pytest.raises(ConfigValidationError, match="outputs must be < inputs"):
        load_cost_config('{"catalog": {"2:3": {"inputs": 2, "outputs": 3, "delay": 1, "power": 1}}}')


def test_config_errors():
    with pytest.raises(ConfigSyntaxError):
        load_cost_config("{not json")
    with pytest.raises(ConfigValidationError, match="unknown"):
        load_cost_config('{"luts": {}}')
    with pytest.raises(ConfigValidationError, match="unknown"):
        load_cost_config('{"mux": {"delay": 1, "speed": 2}}')
    with pytest.raises(ConfigValidationError, match="lut.delay"):
        load_cost_config('{"lut": {"delay": [1, 3, 2]}}')
    with pytest.raises(ConfigValidationError, match="lut.power"):
        load_cost_config('{"lut": {"max_addr_bits": 2, "power": [5, 5]}}')
    with pytest.raises(ConfigValidationError, match="3:2"):
        load_cost_config('{"catalog": {"3:2": null}}')
    with pytest.raises(ConfigValidationError, match="needs"):
        load_cost_config('{"catalog": {"8:2": {"inputs": 8}}}')


def test_config_full_roundtrip(tables):
    doc = tables.to_dict()
    again = load_cost_config(json.dumps(doc))
    assert again == tables


def test_config_custom_lut_and_widths():
    t = load_cost_config('{"lut": {"delay": [1, 2, 3], "power": [1, 2, 4]}, "widths": {"coef": 8, "input": 4}}')
    assert t.max_lut_bits == 3
    assert t.coef_width == 8 and t.input_width == 4
    t2 = load_cost_config("", coef_width=12)
    assert t2.coef_width == 12 and t2.lut.power(1) == Fraction(2, 10) + Fraction(2, 50) * 12


def test_mux_layer(tables):
    assert mux_layer_cost(tables, 0) == CostPoint(0, 0)
    assert mux_layer_cost(tables, 5) == CostPoint(tables.mux_delay, 80 * tables.mux_power_per_bit)
    one = CostTables(tables.lut.__class__.default(1), tables.catalog, coef_width=1)
    assert mux_layer_cost(one, 1) == CostPoint(one.mux_delay, one.mux_power_per_bit)
    with pytest.raises(DomainError):
        mux_layer_cost(tables, -1)


def test_cla(tables):
    assert cla_cost(tables, 1) == CostPoint(tables.cla_a, tables.cla_c)
    assert cla_cost(tables, 32).delay == tables.cla_a + 5 * tables.cla_b
    assert cla_cost(tables, 33).delay == tables.cla_a + 6 * tables.cla_b
    assert cla_cost(tables, 33).power == 33 * tables.cla_c
    with pytest.raises(DomainError):
        cla_cost(tables, 0)


def test_cost_point():
    p = CostPoint(3, Fraction(1, 2))
    assert p.pdp == Fraction(3, 2)
    assert CostPoint(1, 1).dominates(CostPoint(1, 2))
    assert not CostPoint(1, 1).dominates(CostPoint(1, 1))
    with pytest.raises(DomainError):
        CostPoint(-1, 0)


points = st.lists(
    st.builds(CostPoint, st.fractions(0, 50, max_denominator=4), st.fractions(0, 50, max_denominator=4)),
    max_size=25,
)


@given(points, st.randoms())
def test_pareto_order_independent_and_idempotent(pts, rnd):
    a = ParetoSet(pts)
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    b = ParetoSet(shuffled + shuffled)
    assert a == b
    for p in a.points:
        assert not any(q.dominates(p) for q in a.points)
    for p in pts:
        assert any(q == p or q.dominates(p) for q in a.points)


@given(points.filter(bool))
def test_pareto_accessors(pts):
    s = ParetoSet(pts)
    assert s.min_delay == min(p.delay for p in pts)
    assert s.min_power == min(p.power for p in pts)
    assert s.min_pdp == min(p.pdp for p in pts)
    assert all(s.min_pdp <= p.pdp for p in s.points)


def test_pareto_empty():
    with pytest.raises(DomainError):
        ParetoSet().min_delay


def test_prune_tiebreak():
    out = pareto_prune([(1, 2, "b"), (1, 2, "a"), (2, 1, "z"), (2, 2, "x")], tiebreak=lambda e: e[2])
    assert out == [(1, 2, "a"), (2, 1, "z")]
