"""Ready-made entities used by the documentation, the CLI fixtures, and the
test suite.
"""

from .entity import Entity


def three_by_three() -> Entity:
    """A three-state, three-experiment entity with overlapping outcome sets.

    Small enough to compute everything by hand, rich enough to exercise the
    whole kernel: it is outcome/state/experiment determined but not central
    atomic, its experiments are not distinguishable, and its eigen and ortho
    closures differ.
    """
    table = {
        ("e", "p"): {"x1", "x2"},
        ("e", "q"): {"x1", "x3"},
        ("e", "r"): {"x2", "x3"},
        ("f", "p"): {"y1", "y2"},
        ("f", "q"): {"x2", "y2"},
        ("f", "r"): {"x3", "y1", "y2"},
        ("g", "p"): {"x1", "y1"},
        ("g", "q"): {"x2"},
        ("g", "r"): {"x1", "x2", "y1"},
    }
    return Entity({"p", "q", "r"}, {"e", "f", "g"}, table)


def deterministic_pair() -> Entity:
    """A two-state entity whose every cell is a singleton (d-classical)."""
    table = {
        ("h", "s"): {"up"},
        ("h", "t"): {"down"},
        ("k", "s"): {"left"},
        ("k", "t"): {"left"},
    }
    return Entity({"s", "t"}, {"h", "k"}, table)
