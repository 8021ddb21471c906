import random
from fractions import Fraction

import pytest

from dahybrid.costmodel import CompressorSpec, CostTables, LutCostModel, default_tables


@pytest.fixture(scope="session")
def tables():
    return default_tables()


def random_monotone_tables(seed: int, kmax: int = 12, coef_width: int = 16) -> CostTables:
    """LUT delays non-decreasing and powers strictly increasing, drawn from a seeded RNG."""
    rng = random.Random(seed)
    delays, powers = [], []
    d, p = Fraction(0), Fraction(0)
    for _ in range(kmax):
        d += Fraction(rng.randint(0, 6), rng.choice([1, 2, 4]))
        p += Fraction(rng.randint(1, 40), rng.choice([1, 2, 5, 10]))
        delays.append(d)
        powers.append(p)
    base = default_tables(coef_width)
    return CostTables(
        lut=LutCostModel(tuple(delays), tuple(powers), coef_width),
        catalog=base.catalog,
        coef_width=coef_width,
        input_width=base.input_width,
    ).validate()


def random_catalog_tables(seed: int, names=("3:2", "4:2", "5:2", "6:2", "7:2", "9:2")) -> CostTables:
    """Default tables with catalog costs redrawn so power is no longer row-proportional."""
    rng = random.Random(seed)
    base = default_tables()
    specs = []
    for spec in base.catalog:
        if spec.name not in names:
            continue
        specs.append(
            CompressorSpec(
                spec.name,
                spec.inputs,
                spec.outputs,
                Fraction(rng.randint(2, 16), 2),
                Fraction(rng.randint(1, 30), rng.choice([1, 2, 4])),
            )
        )
    return CostTables(lut=base.lut, catalog=tuple(specs), coef_width=base.coef_width, input_width=base.input_width)


def all_plans(tables, n, objective="delay"):
    """Every hybrid (k, m) split for n taps plus both baselines."""
    from dahybrid.archopt import ArchitectureOptimizer, baseline_lutless, baseline_purelut

    opt = ArchitectureOptimizer(tables)
    plans = []
    for k in range(n + 1):
        lo = -(-k // tables.max_lut_bits)
        for m in range(lo, k + 1):
            plans.append(opt.plan_for_split(n, k, m, objective))
    plans.append(baseline_lutless(tables, n, objective))
    if n <= tables.max_lut_bits:
        plans.append(baseline_purelut(tables, n, objective))
    return plans
