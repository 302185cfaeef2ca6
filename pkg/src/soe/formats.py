"""Line-oriented text format for entities, probability tables, and witnesses.

    # comment
    [entity]
    states = p, q, r
    experiments = e, f, g
    outcomes = x1, x2, y1        # optional; must equal the union of the cells
    [outcomes]
    e p = x1, x2                 # one line per (experiment, state) cell
    [probability mu]             # optional, repeatable; token names the table
    e p x1 = 0.5
    [witness]                    # optional; m: big state -> small state,
    m P = p                      # n: small experiment -> big experiment,
    n e = E                      # l: small outcome -> big outcome,
    k mu = nu                    # k: small measure name -> big measure name

Identifiers are the entity identifiers (no whitespace, ',', '=', '#', '[',
']'). Emission is deterministic, so parse(emit(entity)) round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .entity import Entity
from .errors import EntityValidationError, ParseError
from .morphism import SubEntityWitness
from .probability import ProbabilityTable


@dataclass
class EntityDocument:
    """Parsed contents of one entity file."""

    entity: Entity
    measures: dict = field(default_factory=dict)  # name -> ProbabilityTable
    witness: SubEntityWitness | None = None
    measure_map: dict = field(default_factory=dict)  # small measure name -> big measure name


def _split_list(raw: str, line_no: int) -> list:
    items = [part.strip() for part in raw.split(",")]
    items = [part for part in items if part]
    if not items:
        raise ParseError("empty identifier list", line=line_no)
    return items


def parse_entity(text: str) -> EntityDocument:
    """Parse a document; raises ParseError carrying the offending line."""
    states: list = []
    experiments: list = []
    declared_outcomes: list | None = None
    cells: dict = {}
    cell_lines: dict = {}
    measures: dict = {}
    measure_order: list = []
    witness_parts: dict = {"m": {}, "n": {}, "l": {}}
    measure_map: dict = {}
    section = None
    current_measure = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", line=line_no)
            header = line[1:-1].strip().split()
            if not header:
                raise ParseError("empty section header", line=line_no)
            section = header[0]
            if section == "probability":
                current_measure = header[1] if len(header) > 1 else f"mu{len(measure_order) + 1}"
                if current_measure in measures:
                    raise ParseError(f"duplicate probability table {current_measure!r}", line=line_no)
                measures[current_measure] = {}
                measure_order.append(current_measure)
            elif section not in ("entity", "outcomes", "witness"):
                raise ParseError(f"unknown section [{section}]", line=line_no)
            continue
        if section is None:
            raise ParseError("content before the first section header", line=line_no)
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=line_no)
        lhs, rhs = (part.strip() for part in line.split("=", 1))
        if section == "entity":
            if lhs == "states":
                states = _split_list(rhs, line_no)
            elif lhs == "experiments":
                experiments = _split_list(rhs, line_no)
            elif lhs == "outcomes":
                declared_outcomes = _split_list(rhs, line_no)
            else:
                raise ParseError(f"unknown entity key {lhs!r}", line=line_no)
        elif section == "outcomes":
            parts = lhs.split()
            if len(parts) != 2:
                raise ParseError("cell lines read '<experiment> <state> = outcomes'", line=line_no)
            e, p = parts
            if e not in experiments:
                raise ParseError(f"undeclared experiment {e!r}", line=line_no)
            if p not in states:
                raise ParseError(f"undeclared state {p!r}", line=line_no)
            if (e, p) in cells:
                raise ParseError(f"duplicate cell ({e}, {p})", line=line_no)
            outs = _split_list(rhs, line_no)
            if declared_outcomes is not None:
                stray = [x for x in outs if x not in declared_outcomes]
                if stray:
                    raise ParseError(f"outcomes {stray} are not in the declared outcome set", line=line_no)
            cells[(e, p)] = outs
            cell_lines[(e, p)] = line_no
        elif section == "probability":
            parts = lhs.split()
            if len(parts) != 3:
                raise ParseError(
                    "probability lines read '<experiment> <state> <outcome> = value'", line=line_no
                )
            try:
                value = float(rhs)
            except ValueError:
                raise ParseError(f"bad probability value {rhs!r}", line=line_no) from None
            if not 0.0 <= value <= 1.0:
                raise ParseError(f"probability {value} outside [0, 1]", line=line_no)
            measures[current_measure][tuple(parts)] = value
        elif section == "witness":
            parts = lhs.split()
            if len(parts) != 2 or parts[0] not in ("m", "n", "l", "k"):
                raise ParseError("witness lines read 'm|n|l|k <from> = <to>'", line=line_no)
            which, source = parts
            if which == "k":
                measure_map[source] = rhs
            else:
                if source in witness_parts[which]:
                    raise ParseError(f"duplicate witness entry {which} {source}", line=line_no)
                witness_parts[which][source] = rhs

    if not states or not experiments:
        raise ParseError("the [entity] section must declare states and experiments")
    missing = [
        (e, p) for e in sorted(experiments) for p in sorted(states) if (e, p) not in cells
    ]
    if missing:
        raise ParseError(f"missing outcome cell for {missing[0]}" + (
            f" and {len(missing) - 1} more" if len(missing) > 1 else ""
        ))
    try:
        entity = Entity(states, experiments, cells, outcomes=declared_outcomes)
    except EntityValidationError as err:
        raise ParseError(str(err)) from err

    document = EntityDocument(entity=entity, measure_map=measure_map)
    for name in measure_order:
        document.measures[name] = ProbabilityTable(measures[name])
    if any(witness_parts.values()):
        document.witness = SubEntityWitness(
            m=witness_parts["m"], n=witness_parts["n"], l=witness_parts["l"]
        )
    return document


def emit_entity(entity: Entity, measures: dict | None = None) -> str:
    """Deterministic text form; parse(emit(entity)) reproduces the entity."""
    lines = ["[entity]"]
    lines.append("states = " + ", ".join(sorted(entity.states)))
    lines.append("experiments = " + ", ".join(sorted(entity.experiments)))
    lines.append("outcomes = " + ", ".join(sorted(entity.outcomes)))
    lines.append("[outcomes]")
    for (e, p), cell in entity.cells():
        lines.append(f"{e} {p} = " + ", ".join(sorted(cell)))
    for name in sorted(measures or {}):
        lines.append(f"[probability {name}]")
        for (e, p, x) in sorted(measures[name].entries):
            lines.append(f"{e} {p} {x} = {measures[name](e, p, x)!r}")
    return "\n".join(lines) + "\n"
