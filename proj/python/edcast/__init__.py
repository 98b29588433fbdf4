"""Daily emergency-department attendance forecasting."""

import json as _json

from ._edcast import (
    ConfigError,
    EdcastError,
    SpecRejected,
    adjust_trends,
    builtin_spec_names,
    mae,
    mape,
)
from . import _edcast

__all__ = [
    "ConfigError",
    "EdcastError",
    "SpecRejected",
    "adjust_trends",
    "builtin_spec",
    "builtin_spec_names",
    "dgp_spec_schema",
    "experiment_schema",
    "fit_stack",
    "generate",
    "importance",
    "mae",
    "mape",
    "run_experiment",
    "validate_config",
    "validate_spec",
]

__version__ = "0.1.0"


def builtin_spec(name):
    return _json.loads(_edcast._builtin_spec(name))


def experiment_schema():
    return _json.loads(_edcast._experiment_schema())


def dgp_spec_schema():
    return _json.loads(_edcast._dgp_spec_schema())


def validate_config(config):
    """Schema violations as "<pointer>: <reason>" strings; empty when valid."""
    return _edcast._validate(_json.dumps(config), _edcast._experiment_schema())


def validate_spec(spec):
    return _edcast._validate(_json.dumps(spec), _edcast._dgp_spec_schema())


def generate(spec, n_days=None):
    """Synthetic series from a bundled spec name or a spec dict."""
    out = _edcast._generate(_json.dumps(spec), n_days)
    out["spec"] = _json.loads(out.pop("spec_json"))
    return out


def run_experiment(config, base_dir="."):
    """Tuned rolling-origin backtest; returns fold results, scores and stack weights."""
    out = _edcast._run_experiment(_json.dumps(config), str(base_dir))
    out["scores"] = _json.loads(out.pop("scores_json"))
    out["stacks"] = _json.loads(out.pop("stacks_json"))
    return out


def fit_stack(predictions, actual, names, variant="convex"):
    return _json.loads(_edcast._fit_stack(variant, predictions, actual, list(names)))


def importance(config, model, base_dir=".", identity_permutation=False):
    return _json.loads(_edcast._importance(_json.dumps(config), model, str(base_dir), identity_permutation))
