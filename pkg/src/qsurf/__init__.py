"""Compressed QMC integration on regions of parametric surfaces."""

from .compress import (
    CompressedRule,
    CompressParams,
    bottom_up_compress,
    caratheodory_compress,
    evaluate_rule,
    qmc_integrate,
    qmc_moments,
)
from .lowdisc import HaltonStream, ParamDomain, halton, radical_inverse
from .polyspace import PolyBasis, chebvand, select_basis
from .scene import Scene, load_scene
from .surface import SampleSet, sample_region

__version__ = "0.1.0"
