"""Mixed states, mixed experiments, and events: subset-indexed lack-of-knowledge
objects, their extended relations, supremum verification, and the full mixed
entity materialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations

from .entity import Entity, RelationKind
from .errors import CapacityError, ContractError

FULL_MIXED_BUDGET = 2**16  # cap on 2^|states| * 2^|experiments|


def _as_base(entity_set, sub, what) -> frozenset:
    base = frozenset(sub)
    if not base:
        raise ContractError(f"a mixed {what} needs a nonempty base set")
    stray = base - entity_set
    if stray:
        raise ContractError(f"mixed {what} base contains unknown identifiers: {sorted(stray)}")
    return base


@dataclass(frozen=True)
class MixedState:
    """Lack of knowledge about the state: the entity is in one state of `base`."""

    base: frozenset

    def __init__(self, base):
        object.__setattr__(self, "base", frozenset(base))


@dataclass(frozen=True)
class MixedExperiment:
    """Lack of knowledge about the experiment: one experiment of `base` is performed."""

    base: frozenset

    def __init__(self, base):
        object.__setattr__(self, "base", frozenset(base))


@dataclass(frozen=True)
class Event:
    """Lack of knowledge about the outcome: one outcome of `base` occurred."""

    base: frozenset

    def __init__(self, base):
        object.__setattr__(self, "base", frozenset(base))


def _coerce_states(entity: Entity, value) -> frozenset:
    if isinstance(value, MixedState):
        value = value.base
    elif isinstance(value, str):
        value = {value}
    return _as_base(entity.states, value, "state")


def _coerce_experiments(entity: Entity, value) -> frozenset:
    if isinstance(value, MixedExperiment):
        value = value.base
    elif isinstance(value, str):
        value = {value}
    return _as_base(entity.experiments, value, "experiment")


def _coerce_event(entity: Entity, value) -> frozenset:
    if isinstance(value, Event):
        value = value.base
    elif isinstance(value, str):
        value = {value}
    return _as_base(entity.outcomes, value, "event")


def mixed_outcome_set(entity: Entity, experiments, states) -> frozenset:
    """O(e(E), p(P)): the union of O(e, p) over e in E, p in P."""
    E = _coerce_experiments(entity, experiments)
    P = _coerce_states(entity, states)
    return frozenset().union(*(entity.outcome_set(e, p) for e in E for p in P))


def _mixed_couple(value):
    if not (isinstance(value, tuple) and len(value) == 2):
        raise ContractError(f"central relations compare (experiments, states) couples, got {value!r}")
    return value


def mixed_implies(entity: Entity, kind: RelationKind, a, b) -> bool:
    """Implication between mixtures of the kind's type.

    States/experiments/couples compare mixed outcome sets; events compare
    their base sets by inclusion.
    """
    if kind.on == "state":
        A, B = _coerce_states(entity, a), _coerce_states(entity, b)
        if kind.experiment is not None:
            E = _coerce_experiments(entity, kind.experiment)
            return mixed_outcome_set(entity, E, A) <= mixed_outcome_set(entity, E, B)
        return all(
            mixed_outcome_set(entity, {e}, A) <= mixed_outcome_set(entity, {e}, B)
            for e in entity.experiments
        )
    if kind.on == "experiment":
        A, B = _coerce_experiments(entity, a), _coerce_experiments(entity, b)
        if kind.state is not None:
            P = _coerce_states(entity, kind.state)
            return mixed_outcome_set(entity, A, P) <= mixed_outcome_set(entity, B, P)
        return all(
            mixed_outcome_set(entity, A, {p}) <= mixed_outcome_set(entity, B, {p})
            for p in entity.states
        )
    if kind.on == "central":
        (Ea, Pa), (Eb, Pb) = _mixed_couple(a), _mixed_couple(b)
        return mixed_outcome_set(entity, Ea, Pa) <= mixed_outcome_set(entity, Eb, Pb)
    if kind.on == "outcome":
        return _coerce_event(entity, a) <= _coerce_event(entity, b)
    raise ContractError(f"unknown relation kind {kind.on!r}")


def mixed_orthogonal(entity: Entity, kind: RelationKind, a, b) -> bool:
    """Orthogonality between mixtures of the kind's type.

    Events are (e,p)-orthogonal when both lie inside O(e,p) and are disjoint;
    the other kinds use disjointness of mixed outcome sets.
    """
    if kind.on == "state":
        A, B = _coerce_states(entity, a), _coerce_states(entity, b)
        if kind.experiment is not None:
            E = _coerce_experiments(entity, kind.experiment)
            return not (mixed_outcome_set(entity, E, A) & mixed_outcome_set(entity, E, B))
        return any(
            not (mixed_outcome_set(entity, {e}, A) & mixed_outcome_set(entity, {e}, B))
            for e in entity.experiments
        )
    if kind.on == "experiment":
        A, B = _coerce_experiments(entity, a), _coerce_experiments(entity, b)
        if kind.state is not None:
            P = _coerce_states(entity, kind.state)
            return not (mixed_outcome_set(entity, A, P) & mixed_outcome_set(entity, B, P))
        return any(
            not (mixed_outcome_set(entity, A, {p}) & mixed_outcome_set(entity, B, {p}))
            for p in entity.states
        )
    if kind.on == "central":
        (Ea, Pa), (Eb, Pb) = _mixed_couple(a), _mixed_couple(b)
        return not (mixed_outcome_set(entity, Ea, Pa) & mixed_outcome_set(entity, Eb, Pb))
    if kind.on == "outcome":
        A, B = _coerce_event(entity, a), _coerce_event(entity, b)
        if A & B:
            return False
        if kind.experiment is not None:
            cell = entity.outcome_set(kind.experiment, kind.state)
            return A <= cell and B <= cell
        return any(A <= cell and B <= cell for _, cell in entity.cells())
    raise ContractError(f"unknown relation kind {kind.on!r}")


def _nonempty_subsets(items):
    items = sorted(items)
    return [
        frozenset(c) for c in chain.from_iterable(combinations(items, r) for r in range(1, len(items) + 1))
    ]


def _guard_budget(entity: Entity, budget: int) -> None:
    if 2 ** len(entity.states) * 2 ** len(entity.experiments) > budget:
        raise CapacityError(
            f"mixture space 2^{len(entity.states)} * 2^{len(entity.experiments)} exceeds budget {budget}"
        )


def is_supremum(entity: Entity, candidate, family, budget: int = FULL_MIXED_BUDGET) -> bool:
    """Whether `candidate` is a supremum of `family` among all mixtures.

    Suprema need not be unique, so the kernel only verifies the defining
    biconditional (every mixture b: all members < b  iff  candidate < b)
    against the complete mixture space of the entity.
    """
    if isinstance(candidate, Event):
        if 2 ** len(entity.outcomes) > budget:
            raise CapacityError(f"event space 2^{len(entity.outcomes)} exceeds budget {budget}")
        family_sets = [_coerce_event(entity, f) for f in family]
        cand = _coerce_event(entity, candidate)
        universe = _nonempty_subsets(entity.outcomes)
        leq = lambda u, v: u <= v  # noqa: E731 - the event pre-order is plain inclusion
    elif isinstance(candidate, MixedState):
        _guard_budget(entity, budget)
        family_sets = [_coerce_states(entity, f) for f in family]
        cand = _coerce_states(entity, candidate)
        universe = _nonempty_subsets(entity.states)
        kind = RelationKind.state_global()
        leq = lambda u, v: mixed_implies(entity, kind, u, v)  # noqa: E731
    elif isinstance(candidate, MixedExperiment):
        _guard_budget(entity, budget)
        family_sets = [_coerce_experiments(entity, f) for f in family]
        cand = _coerce_experiments(entity, candidate)
        universe = _nonempty_subsets(entity.experiments)
        kind = RelationKind.experiment_global()
        leq = lambda u, v: mixed_implies(entity, kind, u, v)  # noqa: E731
    else:
        raise ContractError("candidate must be a MixedState, MixedExperiment, or Event")
    if not family_sets:
        raise ContractError("the supremum predicate needs a nonempty family")
    for b in universe:
        if all(leq(a, b) for a in family_sets) != leq(cand, b):
            return False
    return True


def mixture_id(base) -> str:
    """Deterministic identifier for the mixture on `base`.

    Identifiers that are themselves '+'-joined mixtures contribute their
    atoms, so a mixture of mixtures collapses onto the union of the bases.
    """
    atoms = set()
    for identifier in base:
        atoms.update(identifier.split("+"))
    return "+".join(sorted(atoms))


def full_mixed_entity(entity: Entity, budget: int = FULL_MIXED_BUDGET) -> Entity:
    """The entity whose states/experiments are all nonempty subsets of the
    original ones, with outcome table given by mixed outcome sets.

    Identifiers are minted as '+'-joined sorted base identifiers. Applying
    this to an already-full entity collapses mixtures of mixtures onto the
    mixture over the union of their bases (same minted identifier, same row),
    so the construction is idempotent up to identifiers.
    """
    _guard_budget(entity, budget)
    state_ids = {sub: mixture_id(sub) for sub in _nonempty_subsets(entity.states)}
    experiment_ids = {sub: mixture_id(sub) for sub in _nonempty_subsets(entity.experiments)}
    table = {}
    for E, eid in experiment_ids.items():
        for P, pid in state_ids.items():
            cell = mixed_outcome_set(entity, E, P)
            previous = table.get((eid, pid))
            if previous is not None and previous != cell:
                raise CapacityError(
                    f"minted identifier collision with conflicting rows at ({eid}, {pid}); "
                    "rename base identifiers containing '+'"
                )
            table[(eid, pid)] = cell
    return Entity(set(state_ids.values()), set(experiment_ids.values()), table)
