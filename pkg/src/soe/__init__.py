"""Kernel for finite experiment-state-outcome entities: implication and
orthogonality relations, mixtures, eigen and ortho closure systems,
state-property systems, separation-axiom classification, sub-entity
verification, generalized probability measures, and finite-dimensional
standard/completed quantum models.
"""

from .entity import (
    Entity,
    RelationKind,
    eigen_outcome,
    equivalent,
    implies,
    orthogonal,
    outcome_set,
    relation_report,
)
from .errors import (
    CapacityError,
    ConsistencyError,
    ContractError,
    EntityValidationError,
    ParseError,
    SoeError,
    UnknownIdentifierError,
)

__all__ = [
    "Entity",
    "RelationKind",
    "eigen_outcome",
    "equivalent",
    "implies",
    "orthogonal",
    "outcome_set",
    "relation_report",
    "SoeError",
    "EntityValidationError",
    "UnknownIdentifierError",
    "ContractError",
    "CapacityError",
    "ConsistencyError",
    "ParseError",
]

__version__ = "0.1.0"
