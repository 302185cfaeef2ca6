"""State-property systems: testable properties, the Cartan map, and the
two-way correspondence with closure systems.

Identified systems represent a property canonically by its Cartan image (the
set of states in which it is actual); the defining outcome-set witness of a
testable property is kept as a label so reports can cite a test.
"""

from __future__ import annotations

from .closure import ClosureSystem, eig_states, intersection_closure
from .diagnostics import Diagnostics
from .entity import Entity
from .errors import ContractError, UnknownIdentifierError
from .mixture import full_mixed_entity, mixture_id


def _prop_key(a):
    """Stable sort key for property tokens (identified properties are frozensets)."""
    if isinstance(a, frozenset):
        return (0, tuple(sorted(map(str, a))))
    return (1, str(a))


class StatePropertySystem:
    """States, a complete lattice of properties, and the map sending each
    state to the set of properties actual in it.

    `actual` is the map xi; the property order is the ordering-set order
    (a below b iff every state making a actual makes b actual), which for
    identified systems coincides with inclusion of Cartan images.
    """

    __slots__ = ("states", "properties", "actual", "labels", "_coatoms", "_full_outcomes")

    def __init__(self, states, properties, actual, labels=None, _coatoms=None, _full_outcomes=None):
        states = frozenset(states)
        properties = frozenset(properties)
        fixed = {}
        for p in states:
            if p not in actual:
                raise ContractError(f"actual-property map is missing state {p!r}")
            props = frozenset(actual[p])
            stray = props - properties
            if stray:
                raise ContractError(f"state {p!r} lists unknown properties: {sorted(map(str, stray))}")
            fixed[p] = props
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "properties", properties)
        object.__setattr__(self, "actual", fixed)
        object.__setattr__(self, "labels", dict(labels) if labels else {})
        object.__setattr__(self, "_coatoms", dict(_coatoms) if _coatoms else None)
        object.__setattr__(self, "_full_outcomes", _full_outcomes)

    def __setattr__(self, name, value):
        raise AttributeError("StatePropertySystem is immutable")

    def __eq__(self, other):
        if not isinstance(other, StatePropertySystem):
            return NotImplemented
        return (
            self.states == other.states
            and self.properties == other.properties
            and self.actual == other.actual
        )

    def __repr__(self):
        return f"StatePropertySystem(|states|={len(self.states)}, |properties|={len(self.properties)})"

    # -- the two orders -----------------------------------------------------

    def cartan(self, a) -> frozenset:
        """kappa(a): the states in which a is actual."""
        if a not in self.properties:
            raise UnknownIdentifierError("property", a)
        return frozenset(p for p in self.states if a in self.actual[p])

    def property_leq(self, a, b) -> bool:
        return self.cartan(a) <= self.cartan(b)

    def state_leq(self, p, q) -> bool:
        """p property-implies q: everything actual in q is actual in p."""
        if p not in self.states:
            raise UnknownIdentifierError("state", p)
        if q not in self.states:
            raise UnknownIdentifierError("state", q)
        return self.actual[q] <= self.actual[p]

    def _canonical(self, candidates):
        return min(candidates, key=_prop_key)

    @property
    def top(self):
        candidates = [a for a in self.properties if self.cartan(a) == self.states]
        if not candidates:
            raise ContractError("no maximal property is actual in every state")
        return self._canonical(candidates)

    @property
    def bottom(self):
        candidates = [a for a in self.properties if not self.cartan(a)]
        if not candidates:
            raise ContractError("no minimal property is potential in every state")
        return self._canonical(candidates)

    def meet(self, props):
        """Greatest lower bound of a family, scanned from the ordering-set order."""
        props = list(props)
        lower = [
            c for c in self.properties if all(self.property_leq(c, a) for a in props)
        ]
        greatest = [m for m in lower if all(self.property_leq(c, m) for c in lower)]
        if not greatest:
            raise ContractError("family has no meet in this lattice")
        return self._canonical(greatest)

    def join(self, props):
        props = list(props)
        upper = [
            c for c in self.properties if all(self.property_leq(a, c) for a in props)
        ]
        least = [j for j in upper if all(self.property_leq(j, c) for c in upper)]
        if not least:
            raise ContractError("family has no join in this lattice")
        return self._canonical(least)

    # -- testable-property access --------------------------------------------

    def testable_property(self, outcome_set):
        """The identified property a(A) for an outcome subset A (testable
        systems only): the intersection of the one-outcome-dropped generators
        outside A."""
        if self._coatoms is None:
            raise ContractError("this system was not built from testable properties")
        A = frozenset(outcome_set)
        if not A <= self._full_outcomes:
            raise ContractError(f"{sorted(A - self._full_outcomes)} are not outcomes of this experiment")
        prop = self.states
        for x in self._full_outcomes - A:
            prop = prop & self._coatoms[x]
        return prop

    def witness(self, a):
        """The outcome-set label of a property, when one is attached."""
        return self.labels.get(a)


def cartan(sps: StatePropertySystem, a) -> frozenset:
    return sps.cartan(a)


def property_implies(sps: StatePropertySystem, a, b) -> bool:
    """a is stronger than b: evaluated through Cartan-image inclusion, which
    agrees with the ordering-set definition over the property states."""
    return sps.property_leq(a, b)


def testable_sps(entity: Entity, e) -> StatePropertySystem:
    """The identified state-property system of the e-testable properties.

    Properties are the Cartan images (equal to the e-eigen closed state sets);
    each property is labeled with its largest defining outcome set, the union
    of the cells of its states.
    """
    entity.require_experiment(e)
    full = entity.experiment_outcomes(e)
    coatoms = {x: eig_states(entity, e, full - {x}) for x in full}
    members = intersection_closure(entity.states, coatoms.values())
    labels = {}
    for F in members:
        if F:
            labels[F] = frozenset().union(*(entity.outcome_set(e, p) for p in F))
        else:
            labels[F] = frozenset()
    actual = {p: frozenset(F for F in members if p in F) for p in entity.states}
    return StatePropertySystem(
        entity.states, members, actual, labels=labels, _coatoms=coatoms, _full_outcomes=full
    )


def sps_to_closure(sps: StatePropertySystem) -> ClosureSystem:
    """The family of Cartan images, validated as a closure system."""
    return ClosureSystem(sps.states, {sps.cartan(a) for a in sps.properties})


def closure_to_sps(ground, system: ClosureSystem) -> StatePropertySystem:
    """The state-property system of a closure system: properties are the
    closed sets ordered by inclusion, and a state's actual properties are the
    closed sets containing it."""
    ground = frozenset(ground)
    if ground != system.ground:
        raise ContractError("ground set does not match the closure system")
    actual = {p: frozenset(F for F in system.members if p in F) for p in ground}
    return StatePropertySystem(ground, system.members, actual)


def is_distinguishable(entity: Entity) -> bool:
    """Whether all distinct experiments have disjoint total outcome sets."""
    experiments = sorted(entity.experiments)
    for i, e in enumerate(experiments):
        oe = entity.experiment_outcomes(e)
        for f in experiments[i + 1:]:
            if oe & entity.experiment_outcomes(f):
                return False
    return True


def global_testable_sps(entity: Entity) -> StatePropertySystem:
    """The testable system of the total mixed experiment over the full mixed
    entity; its lattice carries every testable property of the entity.

    Refused for non-distinguishable entities: mixing experiments that share
    outcomes produces union tests that no longer test the conjunction of the
    mixed parts, so completeness fails.
    """
    if not is_distinguishable(entity):
        raise ContractError(
            "experiments share outcomes; the union test over a mixed experiment "
            "does not test the conjunction of its parts, so the total mixed "
            "experiment does not collect all testable properties"
        )
    full = full_mixed_entity(entity)
    return testable_sps(full, mixture_id(entity.experiments))


def validate_sps(sps: StatePropertySystem) -> Diagnostics:
    """Check the state-property-system axioms by enumeration."""
    diag = Diagnostics()
    try:
        top = sps.top
        diag.record("lattice.top", True)
        diag.record(
            "lattice.top_actual_everywhere",
            all(top in sps.actual[p] for p in sps.states),
        )
    except ContractError as err:
        diag.record("lattice.top", False, str(err))
    try:
        bottom = sps.bottom
        diag.record("lattice.bottom", True)
        diag.record(
            "lattice.bottom_actual_nowhere",
            not any(bottom in sps.actual[p] for p in sps.states),
        )
    except ContractError as err:
        diag.record("lattice.bottom", False, str(err))

    props = sorted(sps.properties, key=_prop_key)
    meets_ok = True
    for i, a in enumerate(props):
        for b in props[i:]:
            try:
                m = sps.meet([a, b])
            except ContractError:
                diag.record("lattice.binary_meets", False, f"no meet of {a!r} and {b!r}")
                meets_ok = False
                break
            for p in sorted(sps.states):
                both = a in sps.actual[p] and b in sps.actual[p]
                if not diag.record(
                    "xi.meet_stability",
                    both == (m in sps.actual[p]),
                    f"state {p!r}, properties {a!r}, {b!r}",
                ):
                    break
        if not meets_ok:
            break
    diag.checks.setdefault("lattice.binary_meets", True)
    diag.checks.setdefault("xi.meet_stability", True)

    identified = True
    for i, a in enumerate(props):
        for b in props[i + 1:]:
            if sps.property_leq(a, b) and sps.property_leq(b, a):
                diag.record(
                    "lattice.identified", False, f"{a!r} and {b!r} are equivalent but distinct"
                )
                identified = False
                break
        if not identified:
            break
    diag.checks.setdefault("lattice.identified", True)
    return diag
