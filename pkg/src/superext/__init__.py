"""superext: decide whether an (n+1)-parameter superintegrable system extends
to a non-degenerate one, reconstruct the extension, and verify every
compatibility condition exactly."""

from .chart import Chart, RadicalAtom
from .expr import diff, eval_expr, is_zero, normalize
from .parser import parse_declaring, parse_expr, pretty
from .rational import CanonicalRational
from .tensor import Metric, Tensor, hook_project_21
from .structure import PotentialFamily, StructureReport, decompose_D, extract_D
from .extension import NonDegStructure, ProlongationState, build_T, torsion_view
from .killing import KillingCandidate, bertrand_darboux, is_killing
from .sysdesc import SystemDescription, load_description
from .pipeline import analyze, run_check
from .report import AnalysisReport

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport", "CanonicalRational", "Chart", "KillingCandidate", "Metric",
    "NonDegStructure", "PotentialFamily", "ProlongationState", "RadicalAtom",
    "StructureReport", "SystemDescription", "Tensor", "analyze",
    "bertrand_darboux", "build_T", "decompose_D", "diff", "eval_expr",
    "extract_D", "hook_project_21", "is_killing", "is_zero", "load_description",
    "normalize", "parse_declaring", "parse_expr", "pretty", "run_check",
    "torsion_view", "__version__",
]
