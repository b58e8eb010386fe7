"""Traveling waves with singular glue points for the variational wave and Camassa-Holm equations."""
from .config import DEFAULT_TOL, ToleranceConfig
from .coefficients import CoefficientSpec, c_squared_minus, eval_coefficient
from .profile import Profile, profile_eval, profile_from_dict, profile_sample
from .nvw import NvwPlan, assemble_nvw, glue_candidates, holder_exponent, speed_regime, wxi_l2
from .ch import ChPlan, analyze_g, assemble_ch, build_ch_profile, check_glue_ch, classify_ch
from .weak import BumpTestFunction, jump_report, residual_ch, residual_nvw, residual_suite

__all__ = [
    "DEFAULT_TOL", "ToleranceConfig", "CoefficientSpec", "c_squared_minus", "eval_coefficient",
    "Profile", "profile_eval", "profile_from_dict", "profile_sample",
    "NvwPlan", "assemble_nvw", "glue_candidates", "holder_exponent", "speed_regime", "wxi_l2",
    "ChPlan", "analyze_g", "assemble_ch", "build_ch_profile", "check_glue_ch", "classify_ch",
    "BumpTestFunction", "jump_report", "residual_ch", "residual_nvw", "residual_suite",
]
