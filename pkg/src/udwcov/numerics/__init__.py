from .expint import EULER_GAMMA, PoleError, expint_e1, expint_ei
from .montecarlo import (DegenerateEstimateError, GaussianProductSampler, McEstimate,
                         mc_integrate, substream)
from .quadrature import NonConvergenceError, QuadratureSpec, quad_adaptive_1d, quad_nested_2d

__all__ = [
    "EULER_GAMMA", "PoleError", "expint_e1", "expint_ei",
    "DegenerateEstimateError", "GaussianProductSampler", "McEstimate", "mc_integrate", "substream",
    "NonConvergenceError", "QuadratureSpec", "quad_adaptive_1d", "quad_nested_2d",
]
