"""Norms, energy-identity residuals, decay fits and functional inequalities."""

from .fitting import DecayFit, default_window, fit_decay
from .identities import IdentityIntegrands, IdentityResidual, identity_probes, identity_residual
from .inequalities import (
    check_inequalities,
    corpus_report,
    empirical_cubic_constant,
    random_smooth_states,
    young_constant,
)
from .norms import (
    energy,
    higher_derivative_norms,
    lyapunov,
    weighted_h1_norm_sq,
    weighted_hs_norm_sq,
    weighted_norm_sq,
)
from .smoothing import smoothing_probe, smoothing_statistic
from .trajectory import LyapunovSeries, lyapunov_series, norm_series, observability_ratio

__all__ = [
    "DecayFit", "default_window", "fit_decay",
    "IdentityIntegrands", "IdentityResidual", "identity_probes", "identity_residual",
    "check_inequalities", "corpus_report", "empirical_cubic_constant", "random_smooth_states",
    "young_constant",
    "energy", "higher_derivative_norms", "lyapunov", "weighted_h1_norm_sq", "weighted_hs_norm_sq",
    "weighted_norm_sq",
    "smoothing_probe", "smoothing_statistic",
    "LyapunovSeries", "lyapunov_series", "norm_series", "observability_ratio",
]
