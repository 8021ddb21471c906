"""Design-space exploration for hybrid LUT + compressor distributed-arithmetic FIR units."""

from .archopt import (
    ArchitecturePlan,
    baseline_lutless,
    baseline_purelut,
    compare_architectures,
    optimize_architecture,
)
from .archsim import build_lut_contents, export_netlist, simulate_plan
from .compopt import CompressorTree, optimize_compressor
from .costmodel import CostPoint, CostTables, ParetoSet, default_tables, load_cost_config
from .dacore import QuantizedFilter, SampleWindow, da_fir, direct_fir
from .lutopt import LutPartitionPlan, optimize_lut

__version__ = "0.1.0"

__all__ = [
    "ArchitecturePlan",
    "CompressorTree",
    "CostPoint",
    "CostTables",
    "LutPartitionPlan",
    "ParetoSet",
    "QuantizedFilter",
    "SampleWindow",
    "baseline_lutless",
    "baseline_purelut",
    "build_lut_contents",
    "compare_architectures",
    "da_fir",
    "default_tables",
    "direct_fir",
    "export_netlist",
    "load_cost_config",
    "optimize_architecture",
    "optimize_compressor",
    "optimize_lut",
    "simulate_plan",
]
