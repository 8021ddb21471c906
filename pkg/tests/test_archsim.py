import itertools
import json
import random

import pytest

from dahybrid.archopt import ArchitectureOptimizer, baseline_lutless, baseline_purelut, optimize_architecture
from dahybrid.archsim import (
    NetlistDocument,
    TapAssignment,
    build_lut_contents,
    carry_save,
    evaluate_tree,
    export_netlist,
    plan_from_netlist,
    simulate_plan,
)
from dahybrid.compopt import optimize_compressor
from dahybrid.costmodel import default_tables
from dahybrid.dacore import QuantizedFilter, SampleWindow, direct_fir, signed_range
from dahybrid.errors import AssignmentError, DimensionError, SimulationConfigError

from conftest import all_plans


def test_lut_contents_examples(tables):
    filt = QuantizedFilter((3, -2), 16)
    plan = baseline_purelut(tables, 2)
    assert build_lut_contents(plan, filt).tables == ((0, 3, -2, 1),)
    lutless = baseline_lutless(tables, 2)
    assert build_lut_contents(lutless, filt).tables == ()
    single = baseline_purelut(tables, 1)
    assert build_lut_contents(single, QuantizedFilter((7,), 16)).tables == ((0, 7),)


def test_non_bijective_assignment(tables):
    plan = baseline_purelut(tables, 2)
    filt = QuantizedFilter((3, -2), 16)
    with pytest.raises(AssignmentError):
        build_lut_contents(plan, filt, TapAssignment(((0, 0),), ()))
    with pytest.raises(AssignmentError):
        build_lut_contents(plan, filt, TapAssignment(((0,),), (1,)))


def test_two_tap_example_every_variant(tables):
    filt = QuantizedFilter((3, -2), 16)
    window = SampleWindow((1, 4), 4)
    for plan in all_plans(tables, 2):
        out = simulate_plan(plan, filt, build_lut_contents(plan, filt), window)
        assert out.value == -5
    zero = SampleWindow((0, 0), 3)
    plan = optimize_architecture(tables, 2)
    assert simulate_plan(plan, filt, build_lut_contents(plan, filt), zero).value == 0


def test_exhaustive_small_filters():
    t = default_tables(5, 3)
    rng = random.Random(7)
    lo, hi = signed_range(5)
    plans = all_plans(t, 4)
    windows = [SampleWindow(w, 3) for w in itertools.product(range(-4, 4), repeat=4)]
    for _ in range(3):
        filt = QuantizedFilter(tuple(rng.randint(lo, hi) for _ in range(4)), 5)
        contents = [build_lut_contents(p, filt) for p in plans]
        for window in windows:
            ref = direct_fir(filt, window)
            for plan, c in zip(plans, contents):
                assert simulate_plan(plan, filt, c, window) == ref


@pytest.mark.parametrize("seed", range(5))
def test_random_assignment_invariance(tables, seed):
    rng = random.Random(seed)
    n = rng.randint(3, 20)
    lo, hi = signed_range(16)
    filt = QuantizedFilter(tuple(rng.randint(lo, hi) for _ in range(n)), 16)
    opt = ArchitectureOptimizer(tables)
    k = rng.randint(0, n)
    m = rng.randint(-(-k // tables.max_lut_bits), k) if k else 0
    plan = opt.plan_for_split(n, k, m)
    taps = list(range(n))
    rng.shuffle(taps)
    groups, start = [], 0
    for p in plan.parts:
        groups.append(tuple(taps[start:start + p]))
        start += p
    assignment = TapAssignment(tuple(groups), tuple(taps[start:]))
    contents = build_lut_contents(plan, filt, assignment)
    for _ in range(50):
        window = SampleWindow(tuple(rng.randint(-4, 3) for _ in range(n)), 3)
        assert simulate_plan(plan, filt, contents, window) == direct_fir(filt, window)


def test_carry_save_preserves_sum():
    rng = random.Random(3)
    for _ in range(200):
        rows = [rng.randint(-1000, 1000) for _ in range(rng.randint(3, 9))]
        out = carry_save(rows, 2)
        assert len(out) == 2 and sum(out) == sum(rows)


def test_tree_contract_trace(tables):
    tree = optimize_compressor(tables, 31)
    rows = list(range(-15, 16))
    trace = []
    out = evaluate_tree(tree, rows, trace)
    assert len(out) == 2 and sum(out) == sum(rows)
    assert trace and all(s_in == s_out for _, _, s_in, s_out in trace)
    assert trace[-1][1] == 31
    with pytest.raises(SimulationConfigError):
        evaluate_tree(tree, rows[:-1])


def test_contents_mismatch(tables):
    filt4 = QuantizedFilter((1, 2, 3, 4), 16)
    opt = ArchitectureOptimizer(tables)
    a = opt.plan_for_split(4, 2, 1)
    b = opt.plan_for_split(4, 3, 1)
    window = SampleWindow((1, 1, 1, 1), 3)
    with pytest.raises(SimulationConfigError):
        simulate_plan(b, filt4, build_lut_contents(a, filt4), window)
    with pytest.raises(DimensionError):
        build_lut_contents(a, QuantizedFilter((1, 2), 16))


def test_netlist_counts(tables):
    filt = QuantizedFilter((5, -3, 2), 16)
    pure = baseline_purelut(tables, 3)
    doc = export_netlist(pure, build_lut_contents(pure, filt))
    doc.validate()
    assert doc.count("lut") == 1 and doc.count("register") == 1
    assert doc.count("mux") == doc.count("cla") == doc.count("basic_compressor") == 0

    lutless = baseline_lutless(tables, 3)
    doc = export_netlist(lutless, build_lut_contents(lutless, filt))
    doc.validate()
    assert (doc.count("mux"), doc.count("basic_compressor"), doc.count("cla")) == (3, 1, 1)
    assert doc.count("lut") == 0

    filt4 = QuantizedFilter((5, -3, 2, 1), 16)
    hybrid = ArchitectureOptimizer(tables).plan_for_split(4, 2, 1)
    doc = export_netlist(hybrid, build_lut_contents(hybrid, filt4))
    doc.validate()
    assert (doc.count("lut"), doc.count("mux"), doc.count("cla")) == (1, 2, 1)
    assert doc.count("basic_compressor") == hybrid.compressor.compressor_count >= 1


def test_netlist_roundtrip_resimulates(tables):
    rng = random.Random(11)
    lo, hi = signed_range(16)
    filt = QuantizedFilter(tuple(rng.randint(lo, hi) for _ in range(18)), 16)
    plan = optimize_architecture(tables, 18, "pdp")
    contents = build_lut_contents(plan, filt)
    text = export_netlist(plan, contents).to_json()
    assert export_netlist(plan, contents).to_json() == text
    doc = NetlistDocument.from_dict(json.loads(text))
    doc.validate()
    plan2, assignment = plan_from_netlist(doc)
    assert plan2.to_json() == plan.to_json()
    contents2 = build_lut_contents(plan2, filt, assignment)
    for _ in range(20):
        window = SampleWindow(tuple(rng.randint(-4, 3) for _ in range(18)), 3)
        assert simulate_plan(plan2, filt, contents2, window) == direct_fir(filt, window)


def test_netlist_validation_errors(tables):
    filt = QuantizedFilter((5, -3, 2), 16)
    plan = baseline_lutless(tables, 3)
    doc = export_netlist(plan, build_lut_contents(plan, filt))
    bad = NetlistDocument(doc.components, doc.connections + [("nope.y", "cla.a")], doc.metadata)
    with pytest.raises(ValueError):
        bad.validate()
    cyc = NetlistDocument(list(doc.components), list(doc.connections), dict(doc.metadata))
    cyc.add("loop", "mux", ["sel"], ["y"])
    cyc.connect("cla.s", "loop.sel")
    cyc.connect("loop.y", "cmp0.in0")
    with pytest.raises(ValueError):
        cyc.validate()
