"""Finite-difference solver for the time-fractional Burgers equation with a
Caputo-Prabhakar time derivative.

.. autosummary::

    mlf
    cpkernel
    discretization
    tridiagonal
    solver
    manufactured
    verify
    cli
"""

from __future__ import annotations

from cpburgers.cpkernel import (
    CpParams,
    WeightSequence,
    compute_weights,
    cp_derivative_power,
    cp_derivative_quadrature,
    discrete_cp_apply,
)
from cpburgers.discretization import SpaceGrid
from cpburgers.errors import (
    CPBurgersError,
    NewtonConvergenceError,
    NumericalError,
    ParameterError,
    QuadratureError,
    SeriesConvergenceError,
    SingularSystemError,
    StabilityPreconditionError,
)
from cpburgers.manufactured import ConvergenceReport, ManufacturedProblem, example1, example2
from cpburgers.mlf import PrabhakarTriplet, mlf_two_param, prabhakar_e, prabhakar_series
from cpburgers.solver import NewtonSettings, ProblemSpec, SolveReport, solve

__version__ = "0.1.0"

__all__ = (
    "CPBurgersError",
    "ConvergenceReport",
    "CpParams",
    "ManufacturedProblem",
    "NewtonConvergenceError",
    "NewtonSettings",
    "NumericalError",
    "ParameterError",
    "PrabhakarTriplet",
    "ProblemSpec",
    "QuadratureError",
    "SeriesConvergenceError",
    "SingularSystemError",
    "SolveReport",
    "SpaceGrid",
    "StabilityPreconditionError",
    "WeightSequence",
    "compute_weights",
    "cp_derivative_power",
    "cp_derivative_quadrature",
    "discrete_cp_apply",
    "example1",
    "example2",
    "mlf_two_param",
    "prabhakar_e",
    "prabhakar_series",
    "solve",
)
