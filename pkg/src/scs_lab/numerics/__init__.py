from .density import (hbar, h, eval_density, v_func, hbar_derivative, hbar_derivative_weights,
                      majorant, Kernel, Density, SmoothKernel, LN2)
from .convolve import (Convolution, GridFunction, convolve, num_convolve,
                       conv_derivative, edge_coefficients, QuadratureFailure, UnsupportedOrder)
from .wrap import (Wrapped, wrap_mod1, recover_A0_A1, richardson, recovery_nodes,
                   tail_terms, TailBoundTooLoose, ExtrapolationDivergence, Recovery)
from .decay import probe_W, hbar_power_probe, BoundViolation, WReport, default_grid

__all__ = ["hbar", "h", "eval_density", "v_func", "hbar_derivative", "hbar_derivative_weights",
           "majorant", "Kernel", "Density", "SmoothKernel", "LN2",
           "Convolution", "GridFunction", "convolve", "num_convolve", "conv_derivative",
           "edge_coefficients", "QuadratureFailure", "UnsupportedOrder",
           "Wrapped", "wrap_mod1", "recover_A0_A1", "richardson", "recovery_nodes", "tail_terms",
           "TailBoundTooLoose", "ExtrapolationDivergence", "Recovery",
           "probe_W", "hbar_power_probe", "BoundViolation", "WReport", "default_grid"]
