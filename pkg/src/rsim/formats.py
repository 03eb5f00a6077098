"""Text formats for models (``.rsys``), contexts (``.ctx``) and trajectories (``.traj``).

Model lines look like ``a b, c, a b``: reactants, inhibitors and products
separated by commas, each a whitespace-separated list of entity names.
Context and trajectory files hold one state per line, with ``.`` for the
empty set. ``#`` starts a comment; blank lines are skipped. LF and CRLF are
accepted on input, LF is always written.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Iterator

from rsim.core import (
    ContextSequence,
    Reaction,
    ReactionSystem,
    ReactionSystemError,
    State,
    Trajectory,
    iter_bits,
    mask_of,
)

__all__ = [
    "FormatError",
    "EMPTY_SENTINEL",
    "parse_model",
    "parse_context",
    "parse_trajectory",
    "write_model",
    "write_context",
    "write_trajectory",
    "read_model",
    "read_context",
    "read_trajectory",
]

EMPTY_SENTINEL = "."
# Comment-line directive fixing the background set and its order.
ENTITIES_DIRECTIVE = "#@entities"
FIELD_NAMES = ("reactants", "inhibitors", "products")

_TOKEN = re.compile(r"[^\s,#]+")


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


def _entities_directive(text: str) -> list[tuple[str, int, int]]:
    """Entity names (with line, column) declared by ``#@entities`` lines."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith(ENTITIES_DIRECTIVE):
            body = raw[len(ENTITIES_DIRECTIVE):]
            offset = len(ENTITIES_DIRECTIVE)
            out.extend((name, lineno, col) for name, col in _tokens(body, offset, lineno))
    return out


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, comment-stripped content) for non-blank lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield lineno, line


def _tokens(field: str, offset: int, lineno: int) -> list[tuple[str, int]]:
    """Split a field into (name, 1-based column) pairs."""
    out = []
    pos = 0
    for m in _TOKEN.finditer(field):
        gap = field[pos:m.start()]
        if gap.strip():
            raise FormatError(f"unexpected {gap.strip()[0]!r}", lineno, offset + pos + 1)
        out.append((m.group(), offset + m.start() + 1))
        pos = m.end()
    return out


def parse_model(text: str, allow_empty_inhibitors: bool = False) -> ReactionSystem:
    """Parse a model document.

    Entities are numbered in order of first appearance, after any names
    declared on ``#@entities`` lines (which also allows entities that occur
    in no reaction).
    """
    names: list[str] = []
    ids: dict[str, int] = {}
    for name, lineno, col in _entities_directive(text):
        if name in ids:
            raise FormatError(f"duplicate declared entity {name!r}", lineno, col)
        ids[name] = len(names)
        names.append(name)
    reactions: list[Reaction] = []
    for lineno, line in _content_lines(text):
        fields = line.split(",")
        if len(fields) != 3:
            col = None
            if len(fields) > 3:
                col = sum(len(f) + 1 for f in fields[:3])
            raise FormatError(
                f"expected 3 comma-separated fields, found {len(fields)}", lineno, col
            )
        sets = []
        offset = 0
        for fname, field in zip(FIELD_NAMES, fields):
            seen: set[int] = set()
            for name, col in _tokens(field, offset, lineno):
                if name not in ids:
                    ids[name] = len(names)
                    names.append(name)
                eid = ids[name]
                if eid in seen:
                    raise FormatError(f"duplicate entity {name!r} in {fname}", lineno, col)
                seen.add(eid)
            if not seen and not (fname == "inhibitors" and allow_empty_inhibitors):
                raise FormatError(f"empty {fname} field", lineno)
            sets.append(seen)
            offset += len(field) + 1
        try:
            reactions.append(Reaction(*sets))
        except ReactionSystemError as exc:
            raise FormatError(str(exc), lineno) from None
    return ReactionSystem(names, reactions, allow_empty_inhibitors=allow_empty_inhibitors)


def _parse_state_line(line: str, lineno: int, sys: ReactionSystem) -> State:
    tokens = _tokens(line, 0, lineno)
    if len(tokens) == 1 and tokens[0][0] == EMPTY_SENTINEL:
        return sys.empty_state()
    bits = 0
    for name, col in tokens:
        try:
            bits |= 1 << sys.entity_id(name)
        except KeyError:
            raise FormatError(f"unknown entity {name!r}", lineno, col) from None
    return State(bits, sys.n_entities)


def parse_context(text: str, sys: ReactionSystem) -> ContextSequence:
    return ContextSequence(
        _parse_state_line(line, lineno, sys) for lineno, line in _content_lines(text)
    )


def parse_trajectory(text: str, sys: ReactionSystem) -> Trajectory:
    return Trajectory(
        _parse_state_line(line, lineno, sys) for lineno, line in _content_lines(text)
    )


def _state_line(state: State, sys: ReactionSystem) -> str:
    if not state.bits:
        return EMPTY_SENTINEL
    return " ".join(sys.entity_names[i] for i in iter_bits(state.bits))


def _names(ids: Iterable[int], sys: ReactionSystem) -> str:
    return " ".join(sys.entity_names[i] for i in iter_bits(mask_of(ids)))


def _first_appearance(sys: ReactionSystem) -> list[int]:
    order: dict[int, None] = {}
    for r in sys.reactions:
        for part in (r.reactants, r.inhibitors, r.products):
            for e in sorted(part):
                order.setdefault(e)
    return list(order)


def write_model(sys: ReactionSystem) -> str:
    """Serialize a system so that parsing it back yields the same entity order.

    An ``#@entities`` line is emitted only when first-appearance order would
    not reproduce the ids (unused entities, or ids out of order).
    """
    lines = []
    if _first_appearance(sys) != list(range(sys.n_entities)):
        lines.append(f"{ENTITIES_DIRECTIVE} " + " ".join(sys.entity_names))
    for r in sys.reactions:
        lines.append(
            f"{_names(r.reactants, sys)}, {_names(r.inhibitors, sys)}, {_names(r.products, sys)}"
        )
    return "".join(line + "\n" for line in lines)


def write_context(ctx: ContextSequence, sys: ReactionSystem) -> str:
    return "".join(_state_line(c, sys) + "\n" for c in ctx)


def write_trajectory(tr: Trajectory, sys: ReactionSystem) -> str:
    return "".join(_state_line(s, sys) + "\n" for s in tr)


def _read(path: str | Path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def read_model(path: str | Path, allow_empty_inhibitors: bool = False) -> ReactionSystem:
    return parse_model(_read(path), allow_empty_inhibitors)


def read_context(path: str | Path, sys: ReactionSystem) -> ContextSequence:
    return parse_context(_read(path), sys)


def read_trajectory(path: str | Path, sys: ReactionSystem) -> Trajectory:
    return parse_trajectory(_read(path), sys)


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
