#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Exceptions raised by feshrf.

The command line maps them onto exit codes:
`DomainError`, `ConfigurationError` and `DataError` exit with 1,
`FitError` with 2 and `NumericalError` with 3.
"""

from __future__ import annotations

from typing import Any, List, Optional


class FeshRFError(Exception):
    """Raised when the association model cannot be evaluated or fitted."""


class DomainError(FeshRFError, ValueError):
    """An argument lies outside the domain of a formula."""


class PoleError(DomainError):
    """The magnetic field sits exactly on the resonance position."""


class NoBoundStateError(DomainError):
    """No Feshbach molecule exists for a non-positive scattering length."""


class ConfigurationError(FeshRFError, ValueError):
    """Invalid configuration: unknown units, keys or malformed options."""


class DataError(FeshRFError, ValueError):
    """Input data violates its schema or a precondition."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateDataError(DataError):
    """The data carry no usable peak."""


class InvalidBranchError(DataError):
    """Resonance data points lie on both sides of the pole."""


class NumericalError(FeshRFError, ArithmeticError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(
        self,
        message: str,
        estimate: float = float("nan"),
        abserr: float = float("nan"),
        index: Optional[int] = None,
    ) -> None:
        if index is not None:
            message = f"grid point {index}: {message}"
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr
        self.index = index


class FitError(FeshRFError):
    """A least-squares fit did not converge; `result` keeps the best state."""

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result


class BoundaryError(FitError):
    """A fitted parameter ended on one of its bounds."""


class IterationError(FitError):
    """The self-consistent iteration did not settle."""

    def __init__(
        self,
        message: str,
        result: Any = None,
        trace: Optional[List[float]] = None,
    ) -> None:
        super().__init__(message, result=result)
        self.trace = trace or []
