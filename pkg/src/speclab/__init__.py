"""Spectral-density experiments: covariance approximations, Hellinger distances,
samplers, estimators and executable bracket checks."""

from .errors import (ArgumentError, ConditioningError, ContractError, DomainError, NumericError,
                     ParityError, SpeclabError, UnknownCheckError)
from .spectra import SmoothnessClassSpec, SpectralModel, parse_preset

__version__ = "0.1.0"

__all__ = ["ArgumentError", "ConditioningError", "ContractError", "DomainError", "NumericError",
           "ParityError", "SmoothnessClassSpec", "SpectralModel", "SpeclabError", "UnknownCheckError",
           "parse_preset"]
