"""Closed-form evaluators for estimation quality, connection and secrecy outage."""
from .connection import (Theorem1Scratch, alzer_kappa, alzer_outage_bound,
                         connection_outage, connection_outage_array,
                         connection_outage_lower_bound, derivative_terms_matrix,
                         derivative_terms_recurrence, gamma_cdf_lower_bound,
                         laplace_iout, toeplitz_q)
from .estimation import (AnalysisError, EstimationContext, delta2_array,
                         estimation_quality)
from .secrecy import (an_ratio, full_plane_term, pgfl_factor, secrecy_outage_lower,
                      secrecy_outage_upper, tail_integral)
from .interference import (PowerModel, ReducedAccuracyWarning, config_power_model,
                           interferer_power_pdf, laplace_psi_arrays, power_model)

__all__ = [
    "AnalysisError", "EstimationContext", "PowerModel", "ReducedAccuracyWarning",
    "Theorem1Scratch", "alzer_kappa", "alzer_outage_bound", "config_power_model",
    "connection_outage", "connection_outage_array", "connection_outage_lower_bound",
    "delta2_array", "derivative_terms_matrix", "derivative_terms_recurrence",
    "estimation_quality", "gamma_cdf_lower_bound", "interferer_power_pdf",
    "laplace_iout", "laplace_psi_arrays", "power_model", "toeplitz_q",
    "an_ratio", "full_plane_term", "pgfl_factor", "secrecy_outage_lower",
    "secrecy_outage_upper", "tail_integral",
]
