"""Result records shared by the bound modules."""

import math
from dataclasses import asdict, dataclass

# formula tag -> (equation label, short description)
FORMULAS = {
    "eq2": ("(2)", "cube upper bound"),
    "eq3": ("(3)", "ball upper bound"),
    "eq4": ("(4)", "cube upper bound, log-convex envelope"),
    "eq5": ("(5)", "ball upper bound, log-convex envelope"),
    "eq6_direct": ("(6)", "cube upper bound minimised over truncation n"),
    "eq7_direct": ("(7)", "ball upper bound minimised over truncation n"),
    "eq12": ("(12)", "sub-Gaussian ball upper bound"),
    "eq13": ("(13)", "sub-Gaussian ball upper bound, log-convex envelope"),
    "eq15_direct": ("(15)", "sub-Gaussian ball upper bound minimised over n"),
    "eq17": ("(17)", "ball lower bound"),
    "eq18": ("(18)", "cube lower bound"),
    "eq17_explicit": ("(19)-(21)", "ball lower bound with every constant explicit"),
    "eq18_explicit": ("(18)", "cube lower bound with every constant explicit"),
}


class BoundUnavailable(ValueError):
    """The truncation index a bound needs does not exist for these inputs."""


@dataclass(frozen=True)
class BoundResult:
    """Natural log of a bound, the truncation index used and its provenance.

    ``explicit`` is True when ``log_value`` is an actual bound on the
    probability.  When False the bound holds only up to an unspecified
    multiplicative constant C(alpha, lambda_1), which is dropped.
    """

    log_value: float
    n_star: int
    formula: str
    center_free: bool = False
    explicit: bool = False
    upper: bool = True

    def __post_init__(self):
        if self.n_star < 1:
            raise ValueError(f"n_star must be >= 1, got {self.n_star}")
        if not math.isfinite(self.log_value):
            raise ValueError(f"log_value must be finite, got {self.log_value}")
        if self.formula not in FORMULAS:
            raise ValueError(f"unknown formula tag {self.formula!r}")

    @property
    def equation(self):
        return FORMULAS[self.formula][0]

    @property
    def value(self):
        return math.exp(self.log_value)

    def as_dict(self):
        d = asdict(self)
        d["equation"] = self.equation
        d["constants"] = "explicit" if self.explicit else "symbolic-dropped"
        return d
