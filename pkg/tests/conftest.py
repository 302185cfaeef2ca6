import random

import pytest

from soe.entity import Entity
from soe.examples import deterministic_pair, three_by_three


@pytest.fixture
def worked() -> Entity:
    return three_by_three()


@pytest.fixture
def dpair() -> Entity:
    return deterministic_pair()


def random_entity(rng: random.Random, max_states=4, max_experiments=4, max_outcomes=6) -> Entity:
    """Uniform-ish random entity within the given size bounds."""
    n_states = rng.randint(1, max_states)
    n_exps = rng.randint(1, max_experiments)
    n_outs = rng.randint(1, max_outcomes)
    states = [f"p{i}" for i in range(n_states)]
    experiments = [f"e{i}" for i in range(n_exps)]
    outcomes = [f"x{i}" for i in range(n_outs)]
    table = {}
    for e in experiments:
        for p in states:
            size = rng.randint(1, n_outs)
            table[(e, p)] = frozenset(rng.sample(outcomes, size))
    return Entity(states, experiments, table)


def random_d_classical_entity(rng: random.Random, max_states=4, max_experiments=4, max_outcomes=6) -> Entity:
    n_states = rng.randint(1, max_states)
    n_exps = rng.randint(1, max_experiments)
    n_outs = rng.randint(1, max_outcomes)
    states = [f"p{i}" for i in range(n_states)]
    experiments = [f"e{i}" for i in range(n_exps)]
    outcomes = [f"x{i}" for i in range(n_outs)]
    table = {
        (e, p): frozenset({rng.choice(outcomes)}) for e in experiments for p in states
    }
    return Entity(states, experiments, table)


def random_distinguishable_entity(rng: random.Random, max_states=4, max_experiments=3, max_outcomes_per_exp=3) -> Entity:
    """Every experiment gets its own disjoint outcome alphabet."""
    n_states = rng.randint(1, max_states)
    n_exps = rng.randint(1, max_experiments)
    states = [f"p{i}" for i in range(n_states)]
    experiments = [f"e{i}" for i in range(n_exps)]
    table = {}
    for e in experiments:
        n_outs = rng.randint(1, max_outcomes_per_exp)
        alphabet = [f"{e}.x{i}" for i in range(n_outs)]
        for p in states:
            size = rng.randint(1, n_outs)
            table[(e, p)] = frozenset(rng.sample(alphabet, size))
    return Entity(states, experiments, table)
