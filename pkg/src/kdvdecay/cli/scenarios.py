"""Named scenario presets, each a partial config merged over the defaults."""

import copy

from ..errors import ConfigurationError
from .config import DEFAULTS, merge

PRESETS = {
    "thm-decay": {
        "name": "thm-decay",
    },
    "expweight": {
        "name": "expweight",
        "damping": {"shape": "step", "a0": 1.5, "x0": 4.0},
        "diagnostics": {
            "norms": ["1", "exp:0.4"],
            "identity_weights": ["1", "exp:0.4"],
            "lyapunov": [],
            "abscissa_b": [0.4],
            "corpus_b": [0.4],
        },
    },
    "smoothing": {
        "name": "smoothing",
        "datum": {"tag": "hat", "center": 3.0, "width": 1.0, "amplitude": 1.0},
        "solver": {"T": 10.0, "stride": 100},
        "diagnostics": {
            "norms": ["1", "poly:1"],
            "identity_weights": ["1", "poly:1"],
            "time_weights": ["none"],
            "lyapunov": [],
            "smoothing": [
                {"norm": "H1-seminorm", "mu": 0.0},
                {"norm": "H1-weighted", "mu": 0.0, "m": 2},
            ],
            "observability": False,
        },
    },
    "linear-const": {
        "name": "linear-const",
        "damping": {"shape": "constant", "a0": 1.0, "x0": 10.0},
        "solver": {"nonlinear": False, "T": 10.0, "stride": 10},
        "diagnostics": {
            "norms": ["1"],
            "fit_window": [1.0, 9.0],
            "identity_weights": ["1", "x"],
            "lyapunov": [],
            "abscissa_b": [0.1, 0.25, 0.5],
        },
    },
}


def scenario_names():
    return sorted(PRESETS)


def scenario_config(name):
    """Full raw config dict for a shipped scenario."""
    if name not in PRESETS:
        raise ConfigurationError(f"unknown scenario {name!r}; choose from {scenario_names()}")
    return merge(copy.deepcopy(DEFAULTS), PRESETS[name])
