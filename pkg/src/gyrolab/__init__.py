"""Gyrogroup algebra, the Hartman-Mycielski step-function extension, and
finite verification of neighbourhood-base conditions."""

from gyrolab.core import (
    GyroError,
    GyroModel,
    IdentityReport,
    ModelMismatchError,
    NumericError,
    check_axioms,
    check_identities,
    cominus,
    coplus,
    gyr,
)
from gyrolab.rational import Rational, format_rational, parse_rational

__version__ = "0.1.0"

__all__ = [
    "GyroError",
    "GyroModel",
    "IdentityReport",
    "ModelMismatchError",
    "NumericError",
    "Rational",
    "check_axioms",
    "check_identities",
    "cominus",
    "coplus",
    "format_rational",
    "gyr",
    "parse_rational",
]
