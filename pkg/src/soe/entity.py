"""Finite experiment-state-outcome entities and their pairwise relations.

An entity is a finite set of states, a finite set of experiments, and for
every (experiment, state) pair the nonempty set of outcomes that can occur.
Everything else in this package is computed from that table.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

from .errors import ContractError, EntityValidationError, UnknownIdentifierError

_FORBIDDEN_IN_IDENTIFIER = set(" \t\r\n,=#[]")


def _check_identifier(kind: str, token) -> None:
    if not isinstance(token, str) or not token:
        raise EntityValidationError(f"{kind} identifier must be a nonempty string, got {token!r}")
    if set(token) & _FORBIDDEN_IN_IDENTIFIER:
        raise EntityValidationError(
            f"{kind} identifier {token!r} contains whitespace or reserved punctuation"
        )


class Entity:
    """Immutable experiment-state-outcome entity.

    Parameters
    ----------
    states, experiments : iterables of identifier strings
    table : mapping (experiment, state) -> iterable of outcome identifiers;
        every pair must be present with a nonempty outcome set
    outcomes : optional explicit outcome set; when given it must equal the
        union of all table cells (a mismatch is a validation error, never a
        silent extension)
    """

    __slots__ = ("states", "experiments", "outcomes", "_table")

    def __init__(self, states, experiments, table, outcomes=None):
        states = frozenset(states)
        experiments = frozenset(experiments)
        if not states:
            raise EntityValidationError("an entity needs at least one state")
        if not experiments:
            raise EntityValidationError("an entity needs at least one experiment")
        for p in states:
            _check_identifier("state", p)
        for e in experiments:
            _check_identifier("experiment", e)

        cells = {}
        for e in sorted(experiments):
            for p in sorted(states):
                try:
                    cell = table[(e, p)]
                except KeyError:
                    raise EntityValidationError(f"missing outcome set for cell ({e}, {p})") from None
                cell = frozenset(cell)
                if not cell:
                    raise EntityValidationError(f"outcome set for cell ({e}, {p}) is empty")
                for x in cell:
                    _check_identifier("outcome", x)
                cells[(e, p)] = cell
        extra = set(table) - set(cells)
        if extra:
            raise EntityValidationError(f"table has cells outside E x Sigma: {sorted(extra)}")

        union = frozenset().union(*cells.values())
        if outcomes is None:
            outcomes = union
        else:
            outcomes = frozenset(outcomes)
            for x in outcomes:
                _check_identifier("outcome", x)
            if outcomes != union:
                missing = sorted(outcomes - union)
                stray = sorted(union - outcomes)
                raise EntityValidationError(
                    "declared outcome set does not equal the union of the table cells"
                    + (f"; declared but never possible: {missing}" if missing else "")
                    + (f"; occur but undeclared: {stray}" if stray else "")
                )

        object.__setattr__(self, "states", states)
        object.__setattr__(self, "experiments", experiments)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "_table", MappingProxyType(cells))

    def __setattr__(self, name, value):
        raise AttributeError("Entity is immutable")

    def __eq__(self, other):
        if not isinstance(other, Entity):
            return NotImplemented
        return (
            self.states == other.states
            and self.experiments == other.experiments
            and self.outcomes == other.outcomes
            and dict(self._table) == dict(other._table)
        )

    def __hash__(self):
        return hash((self.states, self.experiments, frozenset(self._table.items())))

    def __repr__(self):
        return (
            f"Entity(|states|={len(self.states)}, |experiments|={len(self.experiments)}, "
            f"|outcomes|={len(self.outcomes)})"
        )

    # -- lookups ------------------------------------------------------------

    def require_state(self, p) -> None:
        if p not in self.states:
            raise UnknownIdentifierError("state", p)

    def require_experiment(self, e) -> None:
        if e not in self.experiments:
            raise UnknownIdentifierError("experiment", e)

    def require_outcome(self, x) -> None:
        if x not in self.outcomes:
            raise UnknownIdentifierError("outcome", x)

    def outcome_set(self, e, p) -> frozenset:
        """The stored nonempty set O(e, p)."""
        self.require_experiment(e)
        self.require_state(p)
        return self._table[(e, p)]

    def experiment_outcomes(self, e) -> frozenset:
        """O(e): every outcome the experiment e can produce in some state."""
        self.require_experiment(e)
        return frozenset().union(*(self._table[(e, p)] for p in self.states))

    def state_outcomes(self, p) -> frozenset:
        """O(p): every outcome some experiment can produce in state p."""
        self.require_state(p)
        return frozenset().union(*(self._table[(e, p)] for e in self.experiments))

    def couples(self) -> list:
        """All (experiment, state) pairs in deterministic order."""
        return [(e, p) for e in sorted(self.experiments) for p in sorted(self.states)]

    def cells(self):
        """Deterministic iteration over ((e, p), O(e, p))."""
        for couple in self.couples():
            yield couple, self._table[couple]


def outcome_set(entity: Entity, e, p) -> frozenset:
    return entity.outcome_set(e, p)


def eigen_outcome(entity: Entity, e, p):
    """The unique outcome of (e, p) when the couple is eigen, else None."""
    cell = entity.outcome_set(e, p)
    if len(cell) == 1:
        return next(iter(cell))
    return None


# -- relation kinds ---------------------------------------------------------


@dataclass(frozen=True)
class RelationKind:
    """Which of the seven implication/orthogonality relations to evaluate.

    Unscoped kinds quantify over the missing coordinate; scoped kinds fix it
    (e.g. state_for(e) compares outcome sets under the single experiment e).
    """

    on: str  # "state" | "experiment" | "central" | "outcome"
    experiment: str | None = None
    state: str | None = None

    @classmethod
    def state_global(cls):
        return cls("state")

    @classmethod
    def state_for(cls, e):
        return cls("state", experiment=e)

    @classmethod
    def experiment_global(cls):
        return cls("experiment")

    @classmethod
    def experiment_for(cls, p):
        return cls("experiment", state=p)

    @classmethod
    def central(cls):
        return cls("central")

    @classmethod
    def outcome_global(cls):
        return cls("outcome")

    @classmethod
    def outcome_for(cls, e, p):
        return cls("outcome", experiment=e, state=p)

    def describe(self) -> str:
        if self.on == "state":
            return f"state<{self.experiment}>" if self.experiment else "state"
        if self.on == "experiment":
            return f"experiment<{self.state}>" if self.state else "experiment"
        if self.on == "central":
            return "central"
        if self.experiment is not None:
            return f"outcome<{self.experiment},{self.state}>"
        return "outcome"


def _validate_kind(entity: Entity, kind: RelationKind) -> None:
    if kind.on not in ("state", "experiment", "central", "outcome"):
        raise ContractError(f"unknown relation kind {kind.on!r}")
    if kind.experiment is not None:
        entity.require_experiment(kind.experiment)
    if kind.state is not None:
        entity.require_state(kind.state)
    if kind.on == "state" and kind.state is not None:
        raise ContractError("state relations take an experiment scope, not a state")
    if kind.on == "experiment" and kind.experiment is not None:
        raise ContractError("experiment relations take a state scope, not an experiment")
    if kind.on == "outcome" and (kind.experiment is None) != (kind.state is None):
        raise ContractError("scoped outcome relations need both an experiment and a state")


def _couple_cell(entity: Entity, couple) -> frozenset:
    if not (isinstance(couple, tuple) and len(couple) == 2):
        raise ContractError(f"central relations compare (experiment, state) couples, got {couple!r}")
    return entity.outcome_set(couple[0], couple[1])


def implies(entity: Entity, kind: RelationKind, a, b) -> bool:
    """Implication a < b for the given relation kind (outcome-set inclusion)."""
    _validate_kind(entity, kind)
    if kind.on == "state":
        entity.require_state(a)
        entity.require_state(b)
        if kind.experiment is not None:
            return entity.outcome_set(kind.experiment, a) <= entity.outcome_set(kind.experiment, b)
        return all(
            entity.outcome_set(e, a) <= entity.outcome_set(e, b) for e in entity.experiments
        )
    if kind.on == "experiment":
        entity.require_experiment(a)
        entity.require_experiment(b)
        if kind.state is not None:
            return entity.outcome_set(a, kind.state) <= entity.outcome_set(b, kind.state)
        return all(entity.outcome_set(a, p) <= entity.outcome_set(b, p) for p in entity.states)
    if kind.on == "central":
        return _couple_cell(entity, a) <= _couple_cell(entity, b)
    # outcomes: the event pre-order restricted to singletons collapses to equality
    entity.require_outcome(a)
    entity.require_outcome(b)
    return a == b


def orthogonal(entity: Entity, kind: RelationKind, a, b) -> bool:
    """Orthogonality a | b for the given relation kind (outcome-set disjointness)."""
    _validate_kind(entity, kind)
    if kind.on == "state":
        entity.require_state(a)
        entity.require_state(b)
        if kind.experiment is not None:
            return not (entity.outcome_set(kind.experiment, a) & entity.outcome_set(kind.experiment, b))
        return any(
            not (entity.outcome_set(e, a) & entity.outcome_set(e, b)) for e in entity.experiments
        )
    if kind.on == "experiment":
        entity.require_experiment(a)
        entity.require_experiment(b)
        if kind.state is not None:
            return not (entity.outcome_set(a, kind.state) & entity.outcome_set(b, kind.state))
        return any(not (entity.outcome_set(a, p) & entity.outcome_set(b, p)) for p in entity.states)
    if kind.on == "central":
        return not (_couple_cell(entity, a) & _couple_cell(entity, b))
    entity.require_outcome(a)
    entity.require_outcome(b)
    if a == b:
        return False
    if kind.experiment is not None:
        cell = entity.outcome_set(kind.experiment, kind.state)
        return a in cell and b in cell
    return any(a in cell and b in cell for _, cell in entity.cells())


def equivalent(entity: Entity, kind: RelationKind, a, b) -> bool:
    return implies(entity, kind, a, b) and implies(entity, kind, b, a)


# -- full relation report ----------------------------------------------------


@dataclass(frozen=True)
class ReportSection:
    kind: str
    implications: tuple  # ordered (a, b) pairs with a < b, reflexive pairs included
    orthogonalities: tuple  # ordered (a, b) pairs with a | b (both directions listed)


@dataclass(frozen=True)
class RelationReport:
    sections: tuple

    def section(self, kind_name: str) -> ReportSection:
        for sec in self.sections:
            if sec.kind == kind_name:
                return sec
        raise KeyError(kind_name)

    def lines(self) -> list:
        out = []
        for sec in self.sections:
            out.append(f"[{sec.kind}]")
            for a, b in sec.implications:
                out.append(f"  {_fmt(a)} < {_fmt(b)}")
            for a, b in sec.orthogonalities:
                out.append(f"  {_fmt(a)} | {_fmt(b)}")
        return out


def _fmt(item) -> str:
    if isinstance(item, tuple):
        return "(" + ",".join(item) + ")"
    return item


def _scan(entity: Entity, kind: RelationKind, universe) -> ReportSection:
    imp = []
    orth = []
    for a in universe:
        for b in universe:
            if implies(entity, kind, a, b):
                imp.append((a, b))
            if a != b and orthogonal(entity, kind, a, b):
                orth.append((a, b))
    return ReportSection(kind.describe(), tuple(imp), tuple(orth))


def relation_report(entity: Entity) -> RelationReport:
    """Every implication/orthogonality pair for all seven relation kinds.

    Pairs are enumerated in lexicographic order so the report is deterministic;
    reflexive implications are listed, orthogonal pairs appear in both orders.
    """
    states = sorted(entity.states)
    experiments = sorted(entity.experiments)
    couples = entity.couples()
    outcomes = sorted(entity.outcomes)

    sections = [
        _scan(entity, RelationKind.central(), couples),
        _scan(entity, RelationKind.state_global(), states),
        _scan(entity, RelationKind.experiment_global(), experiments),
        _scan(entity, RelationKind.outcome_global(), outcomes),
    ]
    for e in experiments:
        sections.append(_scan(entity, RelationKind.state_for(e), states))
    for p in states:
        sections.append(_scan(entity, RelationKind.experiment_for(p), experiments))
    for e, p in couples:
        cell = sorted(entity.outcome_set(e, p))
        sections.append(_scan(entity, RelationKind.outcome_for(e, p), cell))
    return RelationReport(tuple(sections))
