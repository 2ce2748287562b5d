"""Parameter bundles shared by the operators, the lifting and the inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import DomainError
from .specfun import POLE_TOLERANCE

Theorem = Literal["thm1", "thm2", "prop31"]


def near_integer(x: float, tol: float = POLE_TOLERANCE) -> bool:
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class FracParams:
    """Order ``s``, weight exponent ``eta``, Lebesgue exponent ``p``, space dimension ``d``.

    ``N`` is the number of fictitious variables for pre-limit quantities;
    ``theta`` is then ``N + d - 2 eta - 2 s``.
    """

    s: float
    eta: float = 0.0
    p: float = 2.0
    d: int = 1
    N: int | None = None

    def __post_init__(self) -> None:
        for name in ("s", "eta", "p"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        if self.N is not None and (int(self.N) != self.N or self.N < 1):
            raise DomainError(f"N must be a positive integer, got {self.N!r}")

    @property
    def n(self) -> int | None:
        """Total dimension ``N + d`` of the lifted problem."""
        return None if self.N is None else self.N + self.d

    @property
    def theta(self) -> float | None:
        if self.N is None:
            return None
        return self.N + self.d - 2.0 * self.eta - 2.0 * self.s

    def violations(self, theorem: Theorem) -> list[str]:
        """Human-readable list of violated parameter constraints (empty when admissible)."""
        out: list[str] = []
        if not 0.0 < self.s < 1.0:
            out.append(f"s={self.s} outside (0, 1)")
        if theorem == "thm1":
            # Integers of either sign put a Gamma pole into the constant.
            if near_integer(2 * self.s + self.eta):
                out.append(f"2s+eta={2 * self.s + self.eta:g} is an integer")
        elif theorem == "thm2":
            if not self.d - 2 * self.eta > 0:
                out.append(f"d-2eta={self.d - 2 * self.eta:g} is not positive")
            if not 1.0 < self.p < math.inf:
                out.append(f"p={self.p} outside (1, inf)")
        elif theorem != "prop31":
            raise DomainError(f"unknown theorem id {theorem!r}")
        return out

    def admissible(self, theorem: Theorem) -> bool:
        return not self.violations(theorem)
