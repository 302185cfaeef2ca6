"""Determination / atomicity classification of entities and the T0/T1
separation axioms of the eigen closure systems, with the equivalence theorems
run as internal cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .closure import ClosureSystem, eigen_closure_system, entity_ortho_space, ortho_closure_system
from .entity import Entity
from .errors import ConsistencyError
from .statprop import is_distinguishable


def _first_pair(pairs):
    return min(pairs) if pairs else None


def is_outcome_determined(entity: Entity):
    """Distinct couples have distinct outcome sets. Returns (flag, witness)."""
    seen = {}
    violations = []
    for couple, cell in entity.cells():
        if cell in seen:
            violations.append((seen[cell], couple))
        else:
            seen[cell] = couple
    return (not violations, _first_pair(violations))


def is_state_determined(entity: Entity):
    """Distinct states differ under some experiment."""
    states = sorted(entity.states)
    violations = []
    for i, p in enumerate(states):
        for q in states[i + 1:]:
            if all(entity.outcome_set(e, p) == entity.outcome_set(e, q) for e in entity.experiments):
                violations.append((p, q))
    return (not violations, _first_pair(violations))


def is_experiment_determined(entity: Entity):
    """Distinct experiments differ in some state."""
    experiments = sorted(entity.experiments)
    violations = []
    for i, e in enumerate(experiments):
        for f in experiments[i + 1:]:
            if all(entity.outcome_set(e, p) == entity.outcome_set(f, p) for p in entity.states):
                violations.append((e, f))
    return (not violations, _first_pair(violations))


def satisfies_T0(system: ClosureSystem):
    """Distinct points have distinct singleton closures."""
    points = sorted(system.ground, key=str)
    closures = {w: system.closure_of({w}) for w in points}
    violations = [
        (v, w)
        for i, v in enumerate(points)
        for w in points[i + 1:]
        if closures[v] == closures[w]
    ]
    return (not violations, _first_pair(violations))


def satisfies_T1(system: ClosureSystem):
    """Every singleton is closed."""
    violations = [w for w in sorted(system.ground, key=str) if system.closure_of({w}) != {w}]
    return (not violations, violations[0] if violations else None)


def is_central_atomic(entity: Entity):
    """No couple strictly implies another."""
    couples = entity.couples()
    violations = [
        (a, b)
        for a in couples
        for b in couples
        if a != b and entity.outcome_set(*a) <= entity.outcome_set(*b)
    ]
    return (not violations, _first_pair(violations))


def is_state_atomic(entity: Entity):
    states = sorted(entity.states)
    violations = [
        (p, q)
        for p in states
        for q in states
        if p != q
        and all(entity.outcome_set(e, p) <= entity.outcome_set(e, q) for e in entity.experiments)
    ]
    return (not violations, _first_pair(violations))


def is_experiment_atomic(entity: Entity):
    experiments = sorted(entity.experiments)
    violations = [
        (e, f)
        for e in experiments
        for f in experiments
        if e != f
        and all(entity.outcome_set(e, p) <= entity.outcome_set(f, p) for p in entity.states)
    ]
    return (not violations, _first_pair(violations))


def is_d_classical(entity: Entity) -> bool:
    """Every cell is a singleton: each experiment has a determined outcome."""
    return all(len(cell) == 1 for _, cell in entity.cells())


def _d_classical_witness(entity: Entity):
    for couple, cell in entity.cells():
        if len(cell) != 1:
            return couple
    return None


def _distinguishable_witness(entity: Entity):
    experiments = sorted(entity.experiments)
    for i, e in enumerate(experiments):
        for f in experiments[i + 1:]:
            if entity.experiment_outcomes(e) & entity.experiment_outcomes(f):
                return (e, f)
    return None


@dataclass(frozen=True)
class ClassificationReport:
    """Flags plus a counterexample witness for every flag that is False."""

    outcome_determined: bool
    state_determined: bool
    experiment_determined: bool
    central_atomic: bool
    state_atomic: bool
    experiment_atomic: bool
    d_classical: bool
    distinguishable: bool
    witnesses: dict = field(default_factory=dict, compare=False)

    def flags(self) -> dict:
        return {
            "outcome_determined": self.outcome_determined,
            "state_determined": self.state_determined,
            "experiment_determined": self.experiment_determined,
            "central_atomic": self.central_atomic,
            "state_atomic": self.state_atomic,
            "experiment_atomic": self.experiment_atomic,
            "d_classical": self.d_classical,
            "distinguishable": self.distinguishable,
        }


def _cross_check(name: str, condition: bool) -> None:
    if not condition:
        raise ConsistencyError(f"classification cross-check failed: {name} (kernel bug)")


def classify(entity: Entity) -> ClassificationReport:
    """Full classification report.

    Internally re-derives every flag through the corresponding separation
    axiom of the eigen closure systems and asserts the equivalences, the
    atomic-implies-determined implications, and the deterministic-entity
    consequences; any mismatch raises ConsistencyError.
    """
    out_det, w_out = is_outcome_determined(entity)
    st_det, w_st = is_state_determined(entity)
    ex_det, w_ex = is_experiment_determined(entity)
    c_atomic, w_ca = is_central_atomic(entity)
    s_atomic, w_sa = is_state_atomic(entity)
    e_atomic, w_ea = is_experiment_atomic(entity)
    d_cls = is_d_classical(entity)

    central = eigen_closure_system(entity, "central")
    states = eigen_closure_system(entity, "states")
    experiments = eigen_closure_system(entity, "experiments")

    _cross_check("outcome determination is T0 of the central system", out_det == satisfies_T0(central)[0])
    _cross_check("state determination is T0 of the state system", st_det == satisfies_T0(states)[0])
    _cross_check(
        "experiment determination is T0 of the experiment system",
        ex_det == satisfies_T0(experiments)[0],
    )
    _cross_check("central atomicity is T1 of the central system", c_atomic == satisfies_T1(central)[0])
    _cross_check("state atomicity is T1 of the state system", s_atomic == satisfies_T1(states)[0])
    _cross_check(
        "experiment atomicity is T1 of the experiment system",
        e_atomic == satisfies_T1(experiments)[0],
    )
    _cross_check("central atomic entities are outcome determined", (not c_atomic) or out_det)
    _cross_check("state atomic entities are state determined", (not s_atomic) or st_det)
    _cross_check("experiment atomic entities are experiment determined", (not e_atomic) or ex_det)

    if d_cls:
        for kind, pool in (("states", sorted(entity.states)), ("experiments", sorted(entity.experiments))):
            for i, a in enumerate(pool):
                for b in pool[i + 1:]:
                    if kind == "states":
                        equiv = all(
                            entity.outcome_set(e, a) == entity.outcome_set(e, b)
                            for e in entity.experiments
                        )
                        orth = any(
                            not (entity.outcome_set(e, a) & entity.outcome_set(e, b))
                            for e in entity.experiments
                        )
                    else:
                        equiv = all(
                            entity.outcome_set(a, p) == entity.outcome_set(b, p)
                            for p in entity.states
                        )
                        orth = any(
                            not (entity.outcome_set(a, p) & entity.outcome_set(b, p))
                            for p in entity.states
                        )
                    _cross_check(
                        f"deterministic {kind} are equivalent or orthogonal", equiv or orth
                    )
        _cross_check(
            "deterministic entities have matching eigen and ortho central closures",
            central.members == ortho_closure_system(entity_ortho_space(entity, "central")).members,
        )
        _cross_check("deterministic determination forces central atomicity", (not out_det) or c_atomic)
        _cross_check("deterministic determination forces state atomicity", (not st_det) or s_atomic)
        _cross_check(
            "deterministic determination forces experiment atomicity", (not ex_det) or e_atomic
        )

    distinguishable = is_distinguishable(entity)
    witnesses = {}
    for name, flag, witness in (
        ("outcome_determined", out_det, w_out),
        ("state_determined", st_det, w_st),
        ("experiment_determined", ex_det, w_ex),
        ("central_atomic", c_atomic, w_ca),
        ("state_atomic", s_atomic, w_sa),
        ("experiment_atomic", e_atomic, w_ea),
        ("d_classical", d_cls, _d_classical_witness(entity)),
        ("distinguishable", distinguishable, _distinguishable_witness(entity)),
    ):
        if not flag:
            witnesses[name] = witness
    return ClassificationReport(
        outcome_determined=out_det,
        state_determined=st_det,
        experiment_determined=ex_det,
        central_atomic=c_atomic,
        state_atomic=s_atomic,
        experiment_atomic=e_atomic,
        d_classical=d_cls,
        distinguishable=distinguishable,
        witnesses=witnesses,
    )
