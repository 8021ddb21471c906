import json

import pytest

from dahybrid.archopt import (
    ArchitectureOptimizer,
    ArchitecturePlan,
    baseline_lutless,
    baseline_purelut,
    brute_force_architecture,
    cla_width_for,
    compare_architectures,
    optimize_architecture,
)
from dahybrid.costmodel import OBJECTIVES, lut_size_bits, objective_value
from dahybrid.errors import DomainError, ModelRangeError

from conftest import random_catalog_tables, random_monotone_tables

REFERENCE_ORDERS = [8, 18, 31, 72, 108, 143]


def test_cla_width(tables):
    assert cla_width_for(1, tables) == 19
    assert cla_width_for(8, tables) == 22
    assert cla_width_for(143, tables) == 27


def test_order_one(tables):
    plan = optimize_architecture(tables, 1)
    # a single mux (2) beats a 1-bit LUT (4); one row needs no adder
    assert (plan.lut_addr_bits, plan.mux_selector_count) == (0, 1)
    assert plan.total.delay == tables.mux_delay
    assert plan.cla_width == 0
    assert baseline_lutless(tables, 1).total.delay >= plan.total.delay


def test_purelut_baseline(tables):
    p4 = baseline_purelut(tables, 4)
    assert p4.total.delay == tables.lut.delay(4)
    assert p4.total.power == tables.lut.power(4)
    assert p4.lut_bits == 16 * (16 + 2)
    assert baseline_purelut(tables, 1).lut_bits == 32
    assert baseline_purelut(tables, 8).lut_bits == 4864 == lut_size_bits(8, 16)
    assert p4.compressor is None and p4.cla_width == 0
    with pytest.raises(ModelRangeError):
        baseline_purelut(tables, 17)


def test_lutless_baseline(tables):
    p3 = baseline_lutless(tables, 3)
    assert p3.compressor.kind == "basic" and p3.compressor.spec.name == "3:2"
    assert p3.mux_selector_count == 3 and p3.cla_width == cla_width_for(3, tables)
    p9 = baseline_lutless(tables, 9)
    assert p9.compressor.cost.delay == 16
    p2 = baseline_lutless(tables, 2)
    assert p2.compressor.kind == "wires" and p2.cla_width > 0
    # mux 2 + 16 + CLA(2 + 2*ceil(log2 22))
    assert baseline_lutless(tables, 8).total.delay == 30


@pytest.mark.parametrize("objective", OBJECTIVES)
def test_dominance_and_consistency(tables, objective):
    opt = ArchitectureOptimizer(tables)
    for n in list(range(1, 20)) + REFERENCE_ORDERS:
        plan = opt.optimize(n, objective)
        assert plan.recomputed_total() == plan.total
        value = objective_value(plan.total, objective)
        assert value <= objective_value(baseline_lutless(tables, n, objective).total, objective)
        if n <= tables.max_lut_bits:
            assert value <= objective_value(baseline_purelut(tables, n, objective).total, objective)
        assert plan.compressor.rows_in == plan.rows == n - plan.lut_addr_bits + plan.lut_count


def test_far_order_notes(tables):
    plan = optimize_architecture(tables, 31)
    assert any("skipped" in note for note in plan.notes)
    assert max(plan.parts) <= tables.max_lut_bits


@pytest.mark.parametrize("objective", OBJECTIVES)
def test_exhaustive_scan_default(tables, objective):
    opt = ArchitectureOptimizer(tables)
    for n in range(1, 11):
        assert objective_value(opt.optimize(n, objective).total, objective) == brute_force_architecture(tables, n, objective)


@pytest.mark.parametrize("seed", [1, 2])
def test_exhaustive_scan_random_tables(seed):
    lut_tables = random_monotone_tables(seed)
    t = random_catalog_tables(seed + 10)
    t = t.__class__(lut=lut_tables.lut, catalog=t.catalog, coef_width=t.coef_width, input_width=t.input_width)
    opt = ArchitectureOptimizer(t)
    for n in range(1, 8):
        for objective in OBJECTIVES:
            assert objective_value(opt.optimize(n, objective).total, objective) == brute_force_architecture(t, n, objective)


def test_plan_for_split(tables):
    opt = ArchitectureOptimizer(tables)
    plan = opt.plan_for_split(4, 2, 1)
    assert (plan.lut_addr_bits, plan.lut_count, plan.rows) == (2, 1, 3)
    with pytest.raises(DomainError):
        opt.plan_for_split(4, 2, 3)


def test_plan_json_roundtrip_and_determinism(tables):
    plan = optimize_architecture(tables, 18, "pdp")
    text = plan.to_json()
    assert optimize_architecture(tables, 18, "pdp").to_json() == text
    again = ArchitecturePlan.from_dict(json.loads(text))
    assert again.to_json() == text


def test_compare_report(tables):
    report = compare_architectures(tables, REFERENCE_ORDERS)
    assert len(report.rows) == 6
    csv_lines = report.to_csv().splitlines()
    assert len(csv_lines) == 7 and csv_lines[0].startswith("n,purelut_delay,lutless_delay,hybrid_delay,improvement_pct")
    for row in report.rows:
        assert row.improvement >= 0
        assert row.hybrid.total.delay <= row.lutless.total.delay
    assert report.rows[0].purelut is not None and report.rows[1].purelut is None
    assert compare_architectures(tables, REFERENCE_ORDERS).to_json() == report.to_json()
    one = compare_architectures(tables, [1])
    assert one.rows[0].improvement >= 0
    with pytest.raises(DomainError):
        compare_architectures(tables, [0])
