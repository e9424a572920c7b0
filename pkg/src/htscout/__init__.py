"""Golden-reference-free hardware Trojan detection toolkit.

Selects topologically symmetric path pairs in a gate-level netlist,
simulates process-variation-affected path delays, and flags Trojan
ICs by the distance of each pair's delay point from its expected line.
"""

from .activity import ActivityProfile, VulnerableNetSet, simulate_random, vulnerable_nets
from .detect import (
    DetectionReport,
    ExpectedLine,
    IcVerdict,
    ThresholdSet,
    attacker_bypass_probability,
    calibrate,
    classify_ic,
    detection_metric,
    distance_to_line,
    evaluate,
    fit_expected_line,
)
from .delay import TrojanSpec, gate_delay, inject_trojan, pair_delay, path_delay
from .errors import HtscoutError
from .layout import GridCell, Placement, gate_distance, grid_of, place
from .netlist import Gate, GateKind, Net, Netlist, parse_bench
from .paths import (
    Path,
    PathLimits,
    PathSet,
    SensitizationCriterion,
    enumerate_all_paths,
    enumerate_paths,
    is_sensitizable,
    transition_polarity,
)
from .symmetry import (
    SelectionConfig,
    SelectionResult,
    SymmetricPathPair,
    SymmetryType,
    classify_pair,
    create_reference_path,
    net_coverage,
    rank,
    select_pairs,
)
from .tech import DEFAULT_TECH, TechTable
from .variation import (
    CovarianceModel,
    VariationParams,
    VthProfile,
    build_covariance,
    line_sample_profile,
    nominal_profile,
    sample_instance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
