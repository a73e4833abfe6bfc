"""Braid words and planar-diagram (PD) codes of oriented links.

Crossing convention
-------------------
A crossing ``(a, b, c, d)`` lists its four arc labels counterclockwise,
starting from the incoming under-strand ``a``; the under-strand leaves
through ``c``. The crossing is positive when the over-strand runs from
``b`` to ``d`` (rotating the under-strand counterclockwise lines it up with
the over-strand) and negative when it runs from ``d`` to ``b``.

Crossingless circles cannot be written in PD form. They are carried as the
``free_loops`` count, which is how unlinks from empty braid words and the
loops left over by smoothings are represented.
"""

from __future__ import annotations

import logging
import re
from functools import cached_property

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.shared.errors import (
    CrossingIndexError,
    DiagramValidityError,
    LabelRangeError,
    OrientationError,
    ParseError,
)

logger = logging.getLogger(__name__)

Crossing = tuple[int, int, int, int]

_BRAID_HEADER = re.compile(r"^B(\d+)$")
_PD_TOKEN = re.compile(r"X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")


class BraidWord(BaseModel):
    """Word in the braid group on ``strand_count`` strands; ``+j`` is sigma_j."""

    model_config = ConfigDict(frozen=True)

    strand_count: int = Field(..., ge=1, description="Number of strands n")
    letters: tuple[int, ...] = Field(default=(), description="Signed generator indices")

    @model_validator(mode="after")
    def _check_letters(self) -> BraidWord:
        for letter in self.letters:
            if letter == 0 or abs(letter) >= self.strand_count:
                raise LabelRangeError(
                    f"generator {letter} out of range for {self.strand_count} strands "
                    f"(need 1 <= |j| <= {self.strand_count - 1})"
                )
        return self


class LinkDiagram(BaseModel):
    """Oriented link diagram given by PD crossings plus crossingless loops."""

    model_config = ConfigDict(frozen=True)

    crossings: tuple[Crossing, ...] = ()
    signs: tuple[int, ...] = ()
    free_loops: int = Field(default=0, ge=0, description="Components without crossings")

    @model_validator(mode="after")
    def _check_labels_and_orientation(self) -> LinkDiagram:
        if len(self.signs) != len(self.crossings):
            raise DiagramValidityError("one sign is required per crossing")
        if any(sign not in (1, -1) for sign in self.signs):
            raise DiagramValidityError("crossing signs must be +1 or -1")
        _check_label_usage(self.crossings)
        heads: dict[int, int] = {}
        tails: dict[int, int] = {}
        for crossing, sign in zip(self.crossings, self.signs):
            for pos in _head_positions(sign):
                heads[crossing[pos]] = heads.get(crossing[pos], 0) + 1
            for pos in _tail_positions(sign):
                tails[crossing[pos]] = tails.get(crossing[pos], 0) + 1
        for label in _labels(self.crossings):
            if heads.get(label) != 1 or tails.get(label) != 1:
                raise OrientationError(
                    f"arc {label} does not run from one crossing into another under the given signs"
                )
        return self

    @cached_property
    def successor(self) -> dict[int, int]:
        """Arc that follows each arc along the orientation."""
        following: dict[int, int] = {}
        for crossing, sign in zip(self.crossings, self.signs):
            for pos in _head_positions(sign):
                following[crossing[pos]] = crossing[(pos + 2) % 4]
        return following

    @cached_property
    def arc_components(self) -> dict[int, int]:
        """Component index of every arc, numbered in order of the smallest label."""
        component: dict[int, int] = {}
        for label in sorted(self.successor):
            if label in component:
                continue
            index = len(set(component.values()))
            arc = label
            while arc not in component:
                component[arc] = index
                arc = self.successor[arc]
        return component

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    def is_empty(self) -> bool:
        return not self.crossings and self.free_loops == 0


# -- label bookkeeping -------------------------------------------------------


def _labels(crossings: tuple[Crossing, ...]) -> list[int]:
    return sorted({label for crossing in crossings for label in crossing})


def _check_label_usage(crossings: tuple[Crossing, ...]) -> None:
    counts: dict[int, int] = {}
    for crossing in crossings:
        for label in crossing:
            counts[label] = counts.get(label, 0) + 1
    bad = {label: n for label, n in counts.items() if n != 2}
    if bad:
        raise DiagramValidityError(f"every arc label must be used exactly twice; got {bad}")
    expected = set(range(1, 2 * len(crossings) + 1))
    if set(counts) != expected:
        raise DiagramValidityError(
            f"arc labels must be 1..{2 * len(crossings)}; got {sorted(counts)}"
        )


def _head_positions(sign: int) -> tuple[int, int]:
    """Positions where a strand enters the crossing."""
    return (0, 1) if sign > 0 else (0, 3)


def _tail_positions(sign: int) -> tuple[int, int]:
    return (2, 3) if sign > 0 else (2, 1)


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _relabel(
    crossings: list[Crossing], signs: list[int], free_loops: int
) -> LinkDiagram:
    """Renumber arcs 1..2c along traversal order and build the diagram.

    Components are visited in order of first appearance scanning crossings by
    index and positions 0..3; each component is numbered from that arc on.
    """
    successor: dict[int, int] = {}
    for crossing, sign in zip(crossings, signs):
        for pos in _head_positions(sign):
            successor[crossing[pos]] = crossing[(pos + 2) % 4]
    mapping: dict[int, int] = {}
    for crossing in crossings:
        for start in crossing:
            arc = start
            while arc not in mapping:
                mapping[arc] = len(mapping) + 1
                arc = successor[arc]
    renamed = tuple(
        (mapping[a], mapping[b], mapping[c], mapping[d]) for a, b, c, d in crossings
    )
    return LinkDiagram(crossings=renamed, signs=tuple(signs), free_loops=free_loops)


# -- parsing and serialization -----------------------------------------------


def parse_braid(text: str) -> BraidWord:
    """Read ``"B<n> j1 j2 ..."``."""
    tokens = text.split()
    if not tokens:
        raise ParseError("empty braid text; expected a 'B<n>' header")
    header = _BRAID_HEADER.match(tokens[0])
    if header is None:
        raise ParseError(f"braid text must start with 'B<n>', got {tokens[0]!r}")
    strands = int(header.group(1))
    if strands < 1:
        raise ParseError("a braid needs at least one strand")
    letters = []
    for token in tokens[1:]:
        try:
            letter = int(token)
        except ValueError:
            raise ParseError(f"malformed braid letter {token!r}") from None
        if letter == 0:
            raise ParseError("braid letters must be nonzero")
        letters.append(letter)
    return BraidWord(strand_count=strands, letters=tuple(letters))


def serialize_braid(braid: BraidWord) -> str:
    """Inverse of ``parse_braid``."""
    return " ".join([f"B{braid.strand_count}", *(str(j) for j in braid.letters)])


def parse_pd(text: str) -> LinkDiagram:
    """Read ``"X(a,b,c,d) ..."`` and derive strand orientations and signs."""
    residue = _PD_TOKEN.sub(" ", text)
    if residue.strip(" ,\t\r\n"):
        raise ParseError(f"unexpected text {residue.strip()!r} in PD code")
    crossings: list[Crossing] = [
        tuple(int(g) for g in match.groups())  # type: ignore[misc]
        for match in _PD_TOKEN.finditer(text)
    ]
    if any(label < 1 for crossing in crossings for label in crossing):
        raise ParseError("PD arc labels are 1-based")
    frozen = tuple(crossings)
    _check_label_usage(frozen)
    signs = _orient(frozen)
    return LinkDiagram(crossings=frozen, signs=tuple(signs))


def _orient(crossings: tuple[Crossing, ...]) -> list[int]:
    """Propagate in/out roles from the under-strands; return crossing signs.

    A component that is never an under-strand is split from the rest, so its
    direction cannot change the link type. It is oriented along increasing
    labels when its labels form a run of three or more, and otherwise enters
    at its first slot in crossing order. Braid closures and smoothings are
    numbered along traversal order, which the run rule reads back.
    """
    # role[(crossing, pos)] is True when the strand enters there
    role: dict[tuple[int, int], bool] = {}
    where: dict[int, list[tuple[int, int]]] = {}
    for ci, crossing in enumerate(crossings):
        for pos, label in enumerate(crossing):
            where.setdefault(label, []).append((ci, pos))

    def assign(slot: tuple[int, int], entering: bool, pending: list) -> None:
        known = role.get(slot)
        if known is None:
            role[slot] = entering
            pending.append(slot)
        elif known != entering:
            ci, pos = slot
            raise OrientationError(
                f"arc {crossings[ci][pos]} would both enter and leave crossing {ci}"
            )

    def propagate(pending: list) -> None:
        while pending:
            ci, pos = pending.pop()
            entering = role[(ci, pos)]
            assign((ci, (pos + 2) % 4), not entering, pending)
            label = crossings[ci][pos]
            for other in where[label]:
                if other != (ci, pos):
                    assign(other, not entering, pending)

    pending: list = []
    for ci in range(len(crossings)):
        assign((ci, 0), True, pending)
    propagate(pending)

    for label in sorted(where):
        if all(slot in role for slot in where[label]):
            continue
        pending = []
        assign(_overpass_entry(crossings, where, label), True, pending)
        propagate(pending)
        logger.debug("oriented the over-only component through arc %d", label)

    return [1 if role[(ci, 1)] else -1 for ci in range(len(crossings))]


def _overpass_entry(
    crossings: tuple[Crossing, ...], where: dict[int, list[tuple[int, int]]], first: int
) -> tuple[int, int]:
    """Slot where the over-only component whose smallest label is ``first`` enters."""
    labels = {first}
    frontier = [first]
    while frontier:
        label = frontier.pop()
        for ci, pos in where[label]:
            across = crossings[ci][(pos + 2) % 4]
            if across not in labels:
                labels.add(across)
                frontier.append(across)
    if len(labels) > 2 and labels == set(range(first, first + len(labels))):
        heads = [
            (ci, pos) for ci, pos in where[first] if crossings[ci][(pos + 2) % 4] == first + 1
        ]
        if len(heads) == 1:
            return heads[0]
    return min(slot for label in labels for slot in where[label])


def serialize_pd(diagram: LinkDiagram) -> str:
    """PD text of the crossings; free loops have no PD form and are dropped."""
    return " ".join(f"X({a},{b},{c},{d})" for a, b, c, d in diagram.crossings)


def to_document(diagram: LinkDiagram) -> dict:
    """JSON echo of a parsed diagram; the linking number is reported for two components."""
    components = component_count(diagram)
    return {
        "crossings": [list(crossing) for crossing in diagram.crossings],
        "signs": list(diagram.signs),
        "components": components,
        "linking_number": linking_number(diagram) if components == 2 else None,
        "free_loops": diagram.free_loops,
        "writhe": writhe(diagram),
    }


# -- braids ------------------------------------------------------------------


def braid_permutation(braid: BraidWord) -> list[int]:
    """Bottom position -> top position of each strand."""
    at = list(range(braid.strand_count))  # at[strand] = current position
    for letter in braid.letters:
        left = abs(letter) - 1
        for strand, position in enumerate(at):
            if position == left:
                at[strand] = left + 1
            elif position == left + 1:
                at[strand] = left
    return at


def closure_component_count(braid: BraidWord) -> int:
    """Components of the closure: the cycles of the braid permutation."""
    permutation = braid_permutation(braid)
    seen: set[int] = set()
    cycles = 0
    for start in range(braid.strand_count):
        if start in seen:
            continue
        cycles += 1
        position = start
        while position not in seen:
            seen.add(position)
            position = permutation[position]
    return cycles


def braid_closure(braid: BraidWord) -> LinkDiagram:
    """Trace closure: top of position i is joined to bottom of position i."""
    current = list(range(1, braid.strand_count + 1))
    fresh = braid.strand_count
    crossings: list[Crossing] = []
    signs: list[int] = []
    for letter in braid.letters:
        left = abs(letter) - 1
        left_in, right_in = current[left], current[left + 1]
        left_out, right_out = fresh + 1, fresh + 2
        fresh += 2
        if letter > 0:
            # left-in strand passes under towards the right
            crossings.append((left_in, right_in, right_out, left_out))
        else:
            crossings.append((right_in, right_out, left_out, left_in))
        signs.append(1 if letter > 0 else -1)
        current[left], current[left + 1] = left_out, right_out

    classes = _UnionFind()
    for position, top in enumerate(current):
        classes.union(position + 1, top)
    merged = [tuple(classes.find(label) for label in crossing) for crossing in crossings]
    used = {label for crossing in merged for label in crossing}
    free = len({classes.find(p) for p in range(1, braid.strand_count + 1)} - used)
    return _relabel(merged, signs, free)  # type: ignore[arg-type]


def braid_connected_sum(first: BraidWord, second: BraidWord) -> BraidWord:
    """Braid whose closure is the connected sum along the last/first strands."""
    shift = first.strand_count - 1
    shifted = tuple(j + shift if j > 0 else j - shift for j in second.letters)
    return BraidWord(
        strand_count=first.strand_count + second.strand_count - 1,
        letters=first.letters + shifted,
    )


# -- invariants of the presentation -----------------------------------------


def writhe(diagram: LinkDiagram) -> int:
    """Sum of the crossing signs."""
    return sum(diagram.signs)


def component_count(diagram: LinkDiagram) -> int:
    """Closed loops under arc tracing, free loops included."""
    return len(set(diagram.arc_components.values())) + diagram.free_loops


def linking_number(diagram: LinkDiagram) -> int:
    """Half the signed count of crossings between the two components."""
    if component_count(diagram) != 2:
        raise DiagramValidityError("linking number is defined here for 2-component links")
    comp = diagram.arc_components
    mixed = sum(
        sign
        for crossing, sign in zip(diagram.crossings, diagram.signs)
        if comp[crossing[0]] != comp[crossing[1]]
    )
    return mixed // 2


# -- crossing surgery ----------------------------------------------------------


def _check_index(diagram: LinkDiagram, index: int) -> None:
    if not 0 <= index < diagram.crossing_count:
        raise CrossingIndexError(
            f"crossing index {index} out of range for {diagram.crossing_count} crossings"
        )


def crossing_switch(diagram: LinkDiagram, index: int) -> LinkDiagram:
    """Exchange over and under strands at one crossing (L+ <-> L-)."""
    _check_index(diagram, index)
    a, b, c, d = diagram.crossings[index]
    sign = diagram.signs[index]
    # the old over-strand becomes the under-strand; restart the cycle at its entry
    switched = (b, c, d, a) if sign > 0 else (d, a, b, c)
    crossings = list(diagram.crossings)
    signs = list(diagram.signs)
    crossings[index] = switched
    signs[index] = -sign
    return LinkDiagram(
        crossings=tuple(crossings), signs=tuple(signs), free_loops=diagram.free_loops
    )


def mirror(diagram: LinkDiagram) -> LinkDiagram:
    """Switch every crossing."""
    for index in range(diagram.crossing_count):
        diagram = crossing_switch(diagram, index)
    return diagram


def crossing_smooth(diagram: LinkDiagram, index: int) -> LinkDiagram:
    """Orientation-respecting smoothing at one crossing (L0)."""
    _check_index(diagram, index)
    a, b, c, d = diagram.crossings[index]
    joins = ((a, d), (b, c)) if diagram.signs[index] > 0 else ((a, b), (d, c))
    classes = _UnionFind()
    for incoming, outgoing in joins:
        classes.union(incoming, outgoing)
    remaining = [x for i, x in enumerate(diagram.crossings) if i != index]
    signs = [s for i, s in enumerate(diagram.signs) if i != index]
    merged = [tuple(classes.find(label) for label in crossing) for crossing in remaining]
    used = {label for crossing in merged for label in crossing}
    closed = {classes.find(label) for label in (a, b, c, d)} - used
    return _relabel(merged, signs, diagram.free_loops + len(closed))  # type: ignore[arg-type]
