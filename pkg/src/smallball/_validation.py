"""Input checks shared by the public functions."""

import math
import numbers

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the set where the quantity is defined."""


class QuadratureError(ArithmeticError):
    """A numerical integral did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


def check_alpha(alpha):
    if isinstance(alpha, bool) or not isinstance(alpha, numbers.Real):
        raise TypeError(f"alpha must be a real number, got {type(alpha).__name__}")
    alpha = float(alpha)
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    return alpha


def check_beta(alpha, beta):
    beta = float(beta)
    if not (0.0 < beta < alpha):
        raise DomainError(
            f"beta must satisfy 0 < beta < alpha={alpha}, got {beta} "
            "(the absolute moment of order beta is infinite otherwise)"
        )
    return beta


def check_positive(name, value):
    value = float(value)
    if not (value > 0.0) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite positive number, got {value}")
    return value


def check_index(name, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, (float, np.floating)) and float(value).is_integer():
            value = int(value)
        else:
            raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value
