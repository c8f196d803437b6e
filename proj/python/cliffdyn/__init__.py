"""Clifford-space particle, matrix and string dynamics."""

import json

from ._core import (
    InputError,
    NumericalError,
    PreconditionError,
    field_csv,
    four_vector_identity_residual,
    lower_indices,
    resolve_hermitian,
    run_particle,
    spinor_to_vec,
    thread_budget,
    vec_to_spinor,
)
from . import _core


def string_report(config, residuals=False):
    """Report of a string config given as a dict or JSON text."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_core.string_report(text, residuals))


def verify_all(seed=20240601):
    """Acceptance report as a dict."""
    return json.loads(_core.verify_all(seed))


__all__ = [
    "InputError",
    "NumericalError",
    "PreconditionError",
    "field_csv",
    "four_vector_identity_residual",
    "lower_indices",
    "resolve_hermitian",
    "run_particle",
    "spinor_to_vec",
    "string_report",
    "thread_budget",
    "vec_to_spinor",
    "verify_all",
]
