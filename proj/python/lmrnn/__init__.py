"""Long-memory recurrent networks: fractional filters, generators, diagnostics and training."""

import json

from . import _core
from ._core import (
    ConfigError,
    DataError,
    DegenerateSeriesError,
    DivergenceError,
    DomainError,
    ExperimentError,
    InsufficientDataError,
    ShapeError,
    StatisticsError,
    acf,
    apply_fracdiff,
    apply_fracint,
    classify_decay,
    classify_memory,
    frac_weights,
    frac_weights_grad,
    generate_arfima,
    periodogram,
    spectral_radius,
    welch_ttest,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateSeriesError",
    "DivergenceError",
    "DomainError",
    "ExperimentError",
    "InsufficientDataError",
    "ShapeError",
    "StatisticsError",
    "acf",
    "apply_fracdiff",
    "apply_fracint",
    "check_ergodicity",
    "classify_decay",
    "classify_memory",
    "forward",
    "frac_weights",
    "frac_weights_grad",
    "generate",
    "generate_arfima",
    "impulse_response",
    "init_params",
    "periodogram",
    "run_cli",
    "spectral_radius",
    "welch_ttest",
]


def _doc(params):
    return params if isinstance(params, str) else json.dumps(params)


def init_params(kind, input=1, hidden=8, output=1, K=100, seed=1):
    """Initial cell parameters as a dict (the cell_params JSON document)."""
    return json.loads(_core.init_params(kind, input, hidden, output, K, seed))


def forward(params, inputs):
    """Outputs of shape (T, p_z) for inputs of shape (T, p_x)."""
    return _core.forward(_doc(params), inputs)


def impulse_response(params, lags):
    """Array of shape (lags + 1, p_z, p_x) holding A_0..A_lags."""
    doc = json.loads(_doc(params))
    table = _core.impulse_response(_doc(doc), lags)
    return table.reshape(lags + 1, doc["dims"]["output"], doc["dims"]["input"])


def check_ergodicity(params, a=0.99):
    return json.loads(_core.check_ergodicity(_doc(params), a))


def generate(spec):
    """Series from a generator document, e.g. {"preset": "arfima-paper"}."""
    return _core.generate_dataset(_doc(spec))


def run_cli(*args):
    """Runs the lmrnn tool in process and returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
