"""Numerical laboratory for the period-doubling cascade of strongly
asymmetric unimodal maps (affine left branch, power-law right branch)."""

from .errors import (AsymrenError, BracketError, ContinuationError,
                     CoverIntegrityError, DomainError, EscapeError,
                     InsufficientDataError, LevelNotBornError,
                     NotDifferentiableError, PrecisionError,
                     SearchExhaustedError)
from .numeric import (BigReal, RootResult, bisect_root, refine_root_secant,
                      required_precision, ulp)
from .maps import AsymmetricMap, BranchWord, branch_of
from .ladder import (LevelRecord, RenormLadder, ReturnModelFit, build_ladder,
                     fit_return_model, odd_left_limit, power_of_map,
                     renorm_limit_errors, rescaled_renorm, shift_levels)
from .cascade import (BifurcationSample, CascadeRecord, Family,
                      bifurcation_sweep, doubling_word, estimate_tstar,
                      find_flip, find_superstable, find_window_end,
                      map_for_depth, phi, run_superstable_chain,
                      sweep_at_parameters)
from .scaling import (InvariantComparison, ScalingReport, analyze,
                      check_scaling_laws, compare_invariants, lambda_root)
from .semiext import (EntrySpaceReport, SemiExtensionRecord,
                      doublelog_expansion, entry_range_collapse,
                      entry_space_ratio, eval_along_word, semi_extension,
                      special_point_checks, tau_sequence)
from .cantor import (COVER_CAP, CoverLevel, build_cover, cantor_samples,
                     hausdorff_sums)

__version__ = "0.1.0"

__all__ = [
    "AsymrenError", "BracketError", "ContinuationError",
    "CoverIntegrityError", "DomainError", "EscapeError",
    "InsufficientDataError", "LevelNotBornError", "NotDifferentiableError",
    "PrecisionError", "SearchExhaustedError",
    "BigReal", "RootResult", "bisect_root", "refine_root_secant",
    "required_precision", "ulp",
    "AsymmetricMap", "BranchWord", "branch_of",
    "LevelRecord", "RenormLadder", "ReturnModelFit", "build_ladder",
    "fit_return_model", "odd_left_limit", "power_of_map",
    "renorm_limit_errors", "rescaled_renorm", "shift_levels",
    "BifurcationSample", "CascadeRecord", "Family", "bifurcation_sweep",
    "doubling_word", "estimate_tstar", "find_flip", "find_superstable",
    "find_window_end", "map_for_depth", "phi", "run_superstable_chain",
    "sweep_at_parameters",
    "InvariantComparison", "ScalingReport", "analyze", "check_scaling_laws",
    "compare_invariants", "lambda_root",
    "EntrySpaceReport", "SemiExtensionRecord", "doublelog_expansion",
    "entry_range_collapse", "entry_space_ratio", "eval_along_word",
    "semi_extension", "special_point_checks", "tau_sequence",
    "COVER_CAP", "CoverLevel", "build_cover", "cantor_samples",
    "hausdorff_sums",
    "__version__",
]
