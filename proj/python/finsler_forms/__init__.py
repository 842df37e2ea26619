"""Finsler geometry engine: Cartan connection, horizontal Hodge operators, SM quadrature."""

from ._core import (
    FinslerError,
    Metric,
    __version__,
    check,
    curvature,
    form,
    harmonic,
    inner,
    laplacian,
    list_builtins,
    metric,
    run_scenario,
    tensor,
    volume,
)

__all__ = [
    "FinslerError",
    "Metric",
    "__version__",
    "check",
    "curvature",
    "form",
    "harmonic",
    "inner",
    "laplacian",
    "list_builtins",
    "metric",
    "run_scenario",
    "tensor",
    "volume",
]
