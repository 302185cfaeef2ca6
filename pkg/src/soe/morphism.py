"""Sub-entity witnesses, state-property-system morphisms, and probabilistic
sub-entities: the kernel verifies user-supplied witnesses, it never searches
for them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .closure import eig_states, eigen_closure_system
from .diagnostics import Diagnostics
from .entity import Entity, RelationKind, implies, orthogonal
from .errors import ConsistencyError, ContractError
from .probability import ProbabilisticEntity
from .statprop import StatePropertySystem


@dataclass(frozen=True)
class SubEntityWitness:
    """Connecting functions claiming that one entity is a sub entity of another.

    m sends each state of the big entity to the state the sub entity is in;
    n sends each experiment of the sub entity to its realization on the big
    entity; l sends each outcome of the sub entity to the big-entity outcome
    that occurs with it.
    """

    m: dict  # big state -> small state
    n: dict  # small experiment -> big experiment
    l: dict  # small outcome -> big outcome

    def __init__(self, m, n, l):
        object.__setattr__(self, "m", dict(m))
        object.__setattr__(self, "n", dict(n))
        object.__setattr__(self, "l", dict(l))

    def __hash__(self):
        return hash(
            (
                frozenset(self.m.items()),
                frozenset(self.n.items()),
                frozenset(self.l.items()),
            )
        )

    @classmethod
    def identity(cls, entity: Entity) -> "SubEntityWitness":
        return cls(
            {p: p for p in entity.states},
            {e: e for e in entity.experiments},
            {x: x for x in entity.outcomes},
        )


def _require_total(mapping, domain, what) -> None:
    missing = sorted(set(domain) - set(mapping))
    if missing:
        raise ContractError(f"{what} is not total; missing {missing}")


def verify_sub_entity(small: Entity, big: Entity, w: SubEntityWitness) -> Diagnostics:
    """Check the covariance contract of a sub-entity witness.

    Core checks: m surjective onto the small states, n and l injective, and
    for every big state and small experiment, l maps the small cell bijectively
    onto the big cell. When every core check passes, the derived relation
    transports (orthogonality of outcomes/experiments, state implication,
    couple implication/orthogonality both ways) are asserted; those are
    consequences of the core checks, so a violation raises ConsistencyError.
    """
    _require_total(w.m, big.states, "the state map")
    _require_total(w.n, small.experiments, "the experiment map")
    _require_total(w.l, small.outcomes, "the outcome map")
    diag = Diagnostics()

    diag.record(
        "m.values_in_small",
        set(w.m.values()) <= set(small.states),
        f"stray values {sorted(set(map(str, w.m.values())) - set(map(str, small.states)))}",
    )
    diag.record(
        "m.surjective",
        set(w.m.values()) >= set(small.states),
        f"unreached states {sorted(set(small.states) - set(w.m.values()))}",
    )
    diag.record("n.values_in_big", set(w.n.values()) <= set(big.experiments))
    diag.record("n.injective", len(set(w.n.values())) == len(w.n))
    diag.record("l.values_in_big", set(w.l.values()) <= set(big.outcomes))
    diag.record("l.injective", len(set(w.l.values())) == len(w.l))
    if not diag.passed:
        return diag

    for p_big in sorted(big.states):
        for e in sorted(small.experiments):
            small_cell = small.outcome_set(e, w.m[p_big])
            big_cell = big.outcome_set(w.n[e], p_big)
            image = {w.l[x] for x in small_cell}
            diag.record(
                "covariance.cell_bijection",
                image == big_cell,
                f"l(O({e}, {w.m[p_big]})) = {sorted(image)} but O({w.n[e]}, {p_big}) = {sorted(big_cell)}",
            )
    diag.checks.setdefault("covariance.cell_bijection", True)
    if not diag.passed:
        return diag

    _assert_transports(small, big, w)
    return diag


def _assert_transports(small: Entity, big: Entity, w: SubEntityWitness) -> None:
    outcome = RelationKind.outcome_global()
    for x in sorted(small.outcomes):
        for y in sorted(small.outcomes):
            if orthogonal(small, outcome, x, y) and not orthogonal(big, outcome, w.l[x], w.l[y]):
                raise ConsistencyError(f"outcome orthogonality not transported at ({x}, {y})")
    state = RelationKind.state_global()
    for p in sorted(big.states):
        for q in sorted(big.states):
            if implies(big, state, p, q) and not implies(small, state, w.m[p], w.m[q]):
                raise ConsistencyError(f"state implication not transported at ({p}, {q})")
    experiment = RelationKind.experiment_global()
    for e in sorted(small.experiments):
        for f in sorted(small.experiments):
            if orthogonal(small, experiment, e, f) and not orthogonal(
                big, experiment, w.n[e], w.n[f]
            ):
                raise ConsistencyError(f"experiment orthogonality not transported at ({e}, {f})")
    central = RelationKind.central()
    for p in sorted(big.states):
        for q in sorted(big.states):
            for e in sorted(small.experiments):
                for f in sorted(small.experiments):
                    below = implies(small, central, (e, w.m[p]), (f, w.m[q]))
                    below_big = implies(big, central, (w.n[e], p), (w.n[f], q))
                    if below != below_big:
                        raise ConsistencyError(
                            f"couple implication not equivalent at (({e},{p}), ({f},{q}))"
                        )
                    orth = orthogonal(small, central, (e, w.m[p]), (f, w.m[q]))
                    orth_big = orthogonal(big, central, (w.n[e], p), (w.n[f], q))
                    if orth != orth_big:
                        raise ConsistencyError(
                            f"couple orthogonality not equivalent at (({e},{p}), ({f},{q}))"
                        )


@dataclass(frozen=True)
class SpsMorphism:
    """A couple of functions between state-property systems: m on states
    (contravariant), n on properties (covariant)."""

    m: dict  # big state -> small state
    n: dict  # small property -> big property

    def __init__(self, m, n):
        object.__setattr__(self, "m", dict(m))
        object.__setattr__(self, "n", dict(n))


def verify_sps_morphism(sps: StatePropertySystem, sps_big: StatePropertySystem, mor: SpsMorphism) -> Diagnostics:
    """Check the morphism law (a actual in m(p') iff n(a) actual in p') and,
    when it holds, the derived lattice compatibilities: n preserves meets, top
    and bottom, and the Cartan images satisfy the preimage identity.
    """
    _require_total(mor.m, sps_big.states, "the state map")
    _require_total(mor.n, sps.properties, "the property map")
    diag = Diagnostics()
    diag.record("m.values_in_small", set(mor.m.values()) <= set(sps.states))
    diag.record("n.values_in_big", set(mor.n.values()) <= set(sps_big.properties))
    if not diag.passed:
        return diag

    props = sorted(sps.properties, key=lambda a: tuple(sorted(map(str, a))) if isinstance(a, frozenset) else str(a))
    for p_big in sorted(sps_big.states):
        for a in props:
            lhs = a in sps.actual[mor.m[p_big]]
            rhs = mor.n[a] in sps_big.actual[p_big]
            diag.record(
                "morphism.actuality_equivalence",
                lhs == rhs,
                f"property {a!r} at big state {p_big!r}: {lhs} vs {rhs}",
            )
    diag.checks.setdefault("morphism.actuality_equivalence", True)
    if not diag.passed:
        return diag

    diag.record("morphism.top_preserved", mor.n[sps.top] == sps_big.top)
    diag.record("morphism.bottom_preserved", mor.n[sps.bottom] == sps_big.bottom)
    for i, a in enumerate(props):
        for b in props[i:]:
            lhs = mor.n[sps.meet([a, b])]
            rhs = sps_big.meet([mor.n[a], mor.n[b]])
            diag.record(
                "morphism.meet_preserved",
                lhs == rhs,
                f"n({a!r} meet {b!r})",
            )
    diag.checks.setdefault("morphism.meet_preserved", True)
    for a in props:
        preimage = frozenset(p for p in sps_big.states if mor.m[p] in sps.cartan(a))
        diag.record(
            "morphism.cartan_compatible",
            preimage == sps_big.cartan(mor.n[a]),
            f"property {a!r}",
        )
    diag.checks.setdefault("morphism.cartan_compatible", True)
    return diag


def morphism_from_continuous_map(system_small, system_big, m: dict) -> SpsMorphism:
    """Build the (m, n) couple with n the preimage map on closed sets; valid
    whenever m is continuous (preimages of closed sets are closed)."""
    n = {}
    for F in system_small.members:
        preimage = frozenset(p for p in system_big.ground if m[p] in F)
        if preimage not in system_big.members:
            raise ContractError(f"map is not continuous: preimage of {sorted(map(str, F))} is not closed")
        n[F] = preimage
    return SpsMorphism(m, n)


def preimage_continuity(small: Entity, big: Entity, w: SubEntityWitness) -> Diagnostics:
    """Continuity of m and n for the eigen closure systems, plus the preimage
    identity on the generating eigen sets. Requires a passing witness."""
    core = verify_sub_entity(small, big, w)
    if not core.passed:
        raise ContractError("preimage continuity is only defined for verified sub-entity witnesses")
    diag = Diagnostics()

    small_states = eigen_closure_system(small, "states")
    big_states = eigen_closure_system(big, "states")
    for F in small_states.sorted_members():
        preimage = frozenset(p for p in big.states if w.m[p] in F)
        diag.record(
            "continuity.m_preimages_closed",
            preimage in big_states.members,
            f"m^-1({sorted(map(str, F))})",
        )
    diag.checks.setdefault("continuity.m_preimages_closed", True)

    small_exps = eigen_closure_system(small, "experiments")
    big_exps = eigen_closure_system(big, "experiments")
    for G in big_exps.sorted_members():
        preimage = frozenset(e for e in small.experiments if w.n[e] in G)
        diag.record(
            "continuity.n_preimages_closed",
            preimage in small_exps.members,
            f"n^-1({sorted(map(str, G))})",
        )
    diag.checks.setdefault("continuity.n_preimages_closed", True)

    for e in sorted(small.experiments):
        full = small.experiment_outcomes(e)
        for x in sorted(full):
            A = full - {x}
            lhs = frozenset(p for p in big.states if w.m[p] in eig_states(small, e, A))
            rhs = eig_states(big, w.n[e], frozenset(w.l[y] for y in A) & big.experiment_outcomes(w.n[e]))
            diag.record(
                "continuity.generator_identity",
                lhs == rhs,
                f"experiment {e}, dropped outcome {x}",
            )
    diag.checks.setdefault("continuity.generator_identity", True)
    return diag


@dataclass(frozen=True)
class ProbabilityCorrespondence:
    """Pairs (measure of the sub entity, measure of the big entity) realizing
    the injective transport k."""

    pairs: tuple

    def __init__(self, pairs):
        object.__setattr__(self, "pairs", tuple(pairs))


def verify_probabilistic_sub_entity(
    small: ProbabilisticEntity,
    big: ProbabilisticEntity,
    w: SubEntityWitness,
    k: ProbabilityCorrespondence,
    tol: float = 1e-9,
) -> Diagnostics:
    """Check the measure-transport identity over every (measure pair,
    experiment, big state, outcome), and injectivity of the correspondence."""
    core = verify_sub_entity(small.entity, big.entity, w)
    if not core.passed:
        raise ContractError("the witness does not verify; probabilistic transport is undefined")
    mapped = [mu for mu, _ in k.pairs]
    for mu in small.measures:
        if sum(1 for nu in mapped if nu == mu) != 1:
            raise ContractError("the correspondence must map each measure of the sub entity exactly once")
    diag = Diagnostics()
    images = [mu_big for _, mu_big in k.pairs]
    diag.record(
        "k.injective",
        all(images[i] != images[j] for i in range(len(images)) for j in range(i + 1, len(images))),
        "two measures transported to the same image",
    )
    for index, (mu, mu_big) in enumerate(k.pairs):
        for e in sorted(small.entity.experiments):
            for p_big in sorted(big.entity.states):
                for x in sorted(small.entity.outcomes):
                    lhs = mu(e, w.m[p_big], x)
                    rhs = mu_big(w.n[e], p_big, w.l[x])
                    diag.record(
                        "k.transport_identity",
                        abs(lhs - rhs) <= tol,
                        f"pair {index}, ({e}, {p_big}, {x}): {lhs:.12g} vs {rhs:.12g}",
                    )
    diag.checks.setdefault("k.transport_identity", True)
    return diag
