"""Python access to the orlicz-var core."""

import json

from ._core import (
    ConfigError,
    Error,
    NFunction,
    NonConvergence,
    NonFinite,
    __version__,
    gradient,
    modular,
    psi,
    psi_closed_form,
    sphere_moment,
)
from ._core import solve as _solve


def nfunction(kind, **params):
    """NFunction from keyword parameters, e.g. nfunction("sumpower", p=2, q=3)."""
    return NFunction.from_json(json.dumps({"kind": kind, **params}))


def solve(problem):
    """Minimize the singular energy; `problem` is a dict in the config schema."""
    return json.loads(_solve(json.dumps(problem)))


__all__ = [
    "ConfigError",
    "Error",
    "NFunction",
    "NonConvergence",
    "NonFinite",
    "__version__",
    "gradient",
    "modular",
    "nfunction",
    "psi",
    "psi_closed_form",
    "solve",
    "sphere_moment",
]
