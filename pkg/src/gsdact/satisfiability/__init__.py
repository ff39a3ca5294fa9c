"""Finite-satisfiability backends."""

from .bounded import DEFAULT_MAX_DOMAIN, sat_bounded
from .dllite import (
    Completion, CoreResult, IncompleteWitness, complete_abox,
    propositional_selections, sat_dllite, sat_dllite_core,
)
from .verdicts import NoModelUpTo, Satisfiable, SatVerdict, Unsatisfiable

__all__ = [
    "DEFAULT_MAX_DOMAIN", "Completion", "CoreResult", "IncompleteWitness",
    "NoModelUpTo", "SatVerdict", "Satisfiable", "Unsatisfiable", "complete_abox",
    "propositional_selections", "sat_bounded", "sat_dllite", "sat_dllite_core",
]
