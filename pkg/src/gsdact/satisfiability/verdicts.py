"""Outcomes of finite-satisfiability checks."""

from __future__ import annotations

from dataclasses import dataclass

from ..interpretation import Interpretation


@dataclass(frozen=True)
class Satisfiable:
    witness: Interpretation

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsatisfiable:
    """No finite model exists (only reported by complete backends)."""

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class NoModelUpTo:
    """No model with at most ``bound`` elements."""

    bound: int

    def __bool__(self) -> bool:
        return False


SatVerdict = Satisfiable | Unsatisfiable | NoModelUpTo
