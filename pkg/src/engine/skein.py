"""Kauffman bracket, Jones polynomial and the skein relation.

The Jones polynomial is obtained from the bracket state sum with the writhe
correction ``(-A)^(-3w)`` and the substitution ``s = A^-2`` (so that
``q = s^2``). The skein relation

    q^-1 V(L+) - q V(L-) - (q^(1/2) - q^(-1/2)) V(L0) = 0

is then checked exactly over generated (L+, L-, L0) triples.

Exhaustive sweeps over braid closures use ``ClosureTable`` instead: every
word up to a length is multiplied out once in the Temperley-Lieb algebra and
the skein triples at its letters become row lookups.
"""

from __future__ import annotations

import cmath
import itertools
import logging
from collections import Counter
from collections.abc import Iterable, Iterator
from functools import cached_property, lru_cache
from typing import Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.engine.diagram import (
    BraidWord,
    LinkDiagram,
    braid_closure,
    closure_component_count,
    component_count,
    crossing_smooth,
    crossing_switch,
    mirror,
    serialize_braid,
    writhe,
)
from src.engine.laurent import LaurentPoly
from src.shared.config import settings
from src.shared.errors import (
    CrossingIndexError,
    DiagramValidityError,
    InputError,
    ParityError,
    StateSumLimitError,
)

logger = logging.getLogger(__name__)

BRACKET_VAR = "A"
JONES_VAR = "s"

# loop value -A^2 - A^-2
LOOP = LaurentPoly({2: -1, -2: -1}, var=BRACKET_VAR)


class JonesPolynomial(BaseModel):
    """Jones polynomial in ``s = q^(1/2)``, normalized so the unknot is 1."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    poly: LaurentPoly
    normalization: Literal["unknot=1"] = "unknot=1"
    components: int = Field(..., ge=1)

    def check_parity(self) -> bool:
        """Exponents of s all have the parity of ``components - 1``."""
        parity = (self.components - 1) % 2
        return all(e % 2 == parity for e in self.poly.exponents())

    def __str__(self) -> str:
        return str(self.poly)


def _smoothing_pairs(crossing: tuple[int, int, int, int]) -> tuple[tuple, tuple]:
    a, b, c, d = crossing
    # A-smoothing joins (a,d),(b,c); B-smoothing joins (a,b),(c,d)
    return ((a, d), (b, c)), ((a, b), (c, d))


def kauffman_bracket(diagram: LinkDiagram) -> LaurentPoly:
    """State sum over all 2^c smoothings, normalized so the unknot is 1."""
    if diagram.is_empty():
        raise DiagramValidityError("the empty diagram has no bracket")
    crossing_count = diagram.crossing_count
    if crossing_count > settings.max_state_sum_crossings:
        raise StateSumLimitError(
            f"{crossing_count} crossings exceeds the state-sum limit "
            f"of {settings.max_state_sum_crossings}"
        )
    if crossing_count == 0:
        return LOOP ** (diagram.free_loops - 1)

    pairs = [_smoothing_pairs(crossing) for crossing in diagram.crossings]
    arc_count = 2 * crossing_count
    histogram: Counter[tuple[int, int]] = Counter()
    for state in range(1 << crossing_count):
        parent = list(range(arc_count + 1))
        loops = arc_count
        b_count = 0
        for index, (a_pairs, b_pairs) in enumerate(pairs):
            if state >> index & 1:
                chosen = b_pairs
                b_count += 1
            else:
                chosen = a_pairs
            for x, y in chosen:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                while parent[y] != y:
                    parent[y] = parent[parent[y]]
                    y = parent[y]
                if x != y:
                    parent[x] = y
                    loops -= 1
        histogram[(crossing_count - 2 * b_count, loops + diagram.free_loops - 1)] += 1
    logger.debug("bracket state sum: %d states, %d classes", 1 << crossing_count, len(histogram))

    result = LaurentPoly.zero(var=BRACKET_VAR)
    loop_powers: dict[int, LaurentPoly] = {}
    for (a_exponent, extra_loops), count in sorted(histogram.items()):
        if extra_loops not in loop_powers:
            loop_powers[extra_loops] = LOOP**extra_loops
        result = result + LaurentPoly.monomial(a_exponent, count, var=BRACKET_VAR) * (
            loop_powers[extra_loops]
        )
    return result


@lru_cache(maxsize=settings.jones_cache_size)
def jones(diagram: LinkDiagram) -> JonesPolynomial:
    """Writhe-corrected bracket reindexed to ``s = A^-2``."""
    w = writhe(diagram)
    correction = LaurentPoly.monomial(-3 * w, (-1) ** (w % 2), var=BRACKET_VAR)
    normalized = correction * kauffman_bracket(diagram)
    return JonesPolynomial(
        poly=normalized.reindex_even(JONES_VAR), components=component_count(diagram)
    )


def skein_triple(
    diagram: LinkDiagram, index: int
) -> tuple[LinkDiagram, LinkDiagram, LinkDiagram]:
    """Return (L+, L-, L0) at one crossing; the diagram plays L- if that crossing is negative."""
    if not 0 <= index < diagram.crossing_count:
        raise CrossingIndexError(
            f"crossing index {index} out of range for {diagram.crossing_count} crossings"
        )
    switched = crossing_switch(diagram, index)
    smoothed = crossing_smooth(diagram, index)
    if diagram.signs[index] > 0:
        return diagram, switched, smoothed
    return switched, diagram, smoothed


_S = LaurentPoly.monomial(1, var=JONES_VAR)
_S_INV = LaurentPoly.monomial(-1, var=JONES_VAR)
_Q = LaurentPoly.monomial(2, var=JONES_VAR)
_Q_INV = LaurentPoly.monomial(-2, var=JONES_VAR)


def skein_residual(diagram: LinkDiagram, index: int) -> LaurentPoly:
    """``s^-2 V(L+) - s^2 V(L-) - (s - s^-1) V(L0)``, exactly."""
    plus, minus, zero = skein_triple(diagram, index)
    return (
        _Q_INV * jones(plus).poly
        - _Q * jones(minus).poly
        - (_S - _S_INV) * jones(zero).poly
    )


def _level_root(k: int) -> tuple[int, int]:
    """(numerator, denominator) of s = exp(pi*i/(k+2)) as a fraction of a full turn."""
    if k < 1:
        raise ValueError("the level k must be a positive integer")
    return 1, 2 * (k + 2)


def jones_at_level(diagram: LinkDiagram, k: int) -> tuple[float, float]:
    """V evaluated at q = exp(2*pi*i/(k+2))."""
    numerator, denominator = _level_root(k)
    return jones(diagram).poly.evaluate_at_root_of_unity(numerator, denominator)


def skein_residual_at_level(diagram: LinkDiagram, index: int, k: int) -> complex:
    """Complex skein residual with every V evaluated numerically at level k."""
    numerator, denominator = _level_root(k)
    plus, minus, zero = skein_triple(diagram, index)
    values = [
        complex(*jones(d).poly.evaluate_at_root_of_unity(numerator, denominator))
        for d in (plus, minus, zero)
    ]
    s = cmath.exp(1j * cmath.pi / (k + 2))
    return values[0] / s**2 - s**2 * values[1] - (s - 1 / s) * values[2]


def braid_corpus(max_strands: int, max_letters: int) -> Iterator[BraidWord]:
    """Every braid word on 1..max_strands strands with at most max_letters letters."""
    for strands in range(1, max_strands + 1):
        alphabet = [j for g in range(1, strands) for j in (g, -g)]
        for length in range(0, max_letters + 1):
            if length and not alphabet:
                break
            for letters in itertools.product(alphabet, repeat=length):
                yield BraidWord(strand_count=strands, letters=letters)


def check_skein_corpus(
    diagrams: Iterable[LinkDiagram], levels: Iterable[int] = ()
) -> list[str]:
    """Check the exact (and optionally numeric) skein relation at every crossing.

    Returns a description of each failure; an empty list means the corpus passed.
    """
    levels = list(levels)
    failures: list[str] = []
    checked = 0
    for diagram in diagrams:
        for index in range(diagram.crossing_count):
            residual = skein_residual(diagram, index)
            if not residual.is_zero():
                failures.append(f"{diagram.crossings} @ {index}: residual {residual}")
            for k in levels:
                modulus = abs(skein_residual_at_level(diagram, index, k))
                if modulus >= settings.numeric_tolerance:
                    failures.append(f"{diagram.crossings} @ {index}, k={k}: |residual| {modulus}")
            checked += 1
    logger.debug("skein corpus: %d crossings checked, %d failures", checked, len(failures))
    return failures


def closure_corpus(max_strands: int, max_letters: int) -> Iterator[LinkDiagram]:
    for braid in braid_corpus(max_strands, max_letters):
        yield braid_closure(braid)


GOLDEN_PD = {
    "hopf": "X(1,4,2,3) X(3,2,4,1)",
    "trefoil": "X(1,4,2,5) X(5,2,6,3) X(3,6,4,1)",
    "positive-kink": "X(1,2,2,1)",
    "negative-kink": "X(1,1,2,2)",
}


def check_mirror(diagrams: Iterable[LinkDiagram]) -> list[str]:
    """V(mirror L)(s) = V(L)(s^-1)."""
    failures = []
    for diagram in diagrams:
        expected = jones(diagram).poly.invert_var()
        if jones(mirror(diagram)).poly != expected:
            failures.append(f"mirror of {diagram.crossings}")
    return failures


def check_markov(braids: Iterable[BraidWord]) -> list[str]:
    """Jones is unchanged by positive and negative Markov stabilization."""
    failures = []
    for braid in braids:
        reference = jones(braid_closure(braid)).poly
        n = braid.strand_count
        for letter in (n, -n):
            stabilized = BraidWord(strand_count=n + 1, letters=braid.letters + (letter,))
            if jones(braid_closure(stabilized)).poly != reference:
                failures.append(f"stabilization {letter:+d} of {serialize_braid(braid)}")
    return failures


def check_braid_relation(braids: Iterable[BraidWord]) -> list[str]:
    """Closures of w*s_i*s_(i+1)*s_i and w*s_(i+1)*s_i*s_(i+1) share a Jones polynomial."""
    failures = []
    for braid in braids:
        n = braid.strand_count
        for i in range(1, n - 1):
            for sign in (1, -1):
                a, b = sign * i, sign * (i + 1)
                left = BraidWord(strand_count=n, letters=braid.letters + (a, b, a))
                right = BraidWord(strand_count=n, letters=braid.letters + (b, a, b))
                if jones(braid_closure(left)).poly != jones(braid_closure(right)).poly:
                    failures.append(f"braid relation at {a:+d} after {serialize_braid(braid)}")
    return failures


# -- exhaustive closure tables -----------------------------------------------------
#
# A Temperley-Lieb diagram on n strands is a noncrossing matching of 2n
# points: 0..n-1 along the bottom, n..2n-1 along the top. ``partner[i]`` is
# the point joined to i. Words are read bottom to top.

Matching = tuple[int, ...]


def _identity_matching(n: int) -> Matching:
    return tuple(range(n, 2 * n)) + tuple(range(n))


def _cup_cap(n: int, j: int) -> Matching:
    """Generator e_j: strands j and j+1 (1-based) turn back at both ends."""
    partner = list(_identity_matching(n))
    low, high = j - 1, j
    partner[low], partner[high] = high, low
    partner[n + low], partner[n + high] = n + high, n + low
    return tuple(partner)


def _stack(lower: Matching, upper: Matching, n: int) -> tuple[Matching, int]:
    """Glue ``upper`` on top of ``lower``; return the product and the loops it closes off."""
    partner = [0] * (2 * n)
    seen: set[int] = set()
    for start in range(2 * n):
        on_lower, point = start < n, start
        while True:
            target = (lower if on_lower else upper)[point]
            if on_lower and target >= n:
                seen.add(target - n)
                on_lower, point = False, target - n
            elif not on_lower and target < n:
                seen.add(target)
                on_lower, point = True, target + n
            else:
                partner[start] = target
                break
    loops = 0
    for middle in range(n):
        if middle in seen:
            continue
        loops += 1
        current = middle
        while current not in seen:
            seen.add(current)
            across = lower[n + current] - n
            seen.add(across)
            current = upper[across]
    return tuple(partner), loops


def _closure_loops(diagram: Matching, n: int) -> int:
    """Circles left when top point i is joined round to bottom point i."""
    seen: set[int] = set()
    loops = 0
    for start in range(2 * n):
        if start in seen:
            continue
        loops += 1
        point = start
        while point not in seen:
            seen.add(point)
            other = diagram[point]
            seen.add(other)
            point = other - n if other >= n else other + n
    return loops


class _TemperleyLieb(NamedTuple):
    size: int
    targets: dict[int, np.ndarray]
    traps: dict[int, np.ndarray]
    # (loops, mask of basis diagrams whose closure has that many loops)
    closure_groups: tuple[tuple[int, np.ndarray], ...]


@lru_cache(maxsize=None)
def _temperley_lieb(n: int) -> _TemperleyLieb:
    """Basis diagrams reachable from the identity, with right multiplication by each e_j."""
    generators = {j: _cup_cap(n, j) for j in range(1, n)}
    basis = [_identity_matching(n)]
    index = {basis[0]: 0}
    targets = {j: [] for j in generators}
    traps = {j: [] for j in generators}
    position = 0
    while position < len(basis):
        for j, generator in generators.items():
            product, loops = _stack(basis[position], generator, n)
            if product not in index:
                index[product] = len(basis)
                basis.append(product)
            targets[j].append(index[product])
            traps[j].append(loops == 1)
        position += 1
    logger.debug("Temperley-Lieb algebra on %d strands: %d basis diagrams", n, len(basis))
    closure_loops = np.array([_closure_loops(d, n) for d in basis])
    return _TemperleyLieb(
        size=len(basis),
        targets={j: np.array(t, dtype=np.intp) for j, t in targets.items()},
        traps={j: np.array(t, dtype=bool) for j, t in traps.items()},
        closure_groups=tuple(
            (int(loops), closure_loops == loops) for loops in np.unique(closure_loops)
        ),
    )


def _times_loop(vectors: np.ndarray) -> np.ndarray:
    """Multiply A-coefficient vectors by the loop value -A^2 - A^-2."""
    return -(np.roll(vectors, 2, axis=-1) + np.roll(vectors, -2, axis=-1))


def _apply_letter(state: np.ndarray, letter: int, algebra: _TemperleyLieb) -> np.ndarray:
    # sigma_j = A + A^-1 e_j and sigma_j^-1 = A^-1 + A e_j
    j, shift = abs(letter), (1 if letter > 0 else -1)
    through = state.copy()
    trapped = algebra.traps[j]
    through[trapped] = _times_loop(state[trapped])
    out = np.roll(state, shift, axis=1)
    np.add.at(out, algebra.targets[j], np.roll(through, -shift, axis=1))
    return out


def _close(state: np.ndarray, algebra: _TemperleyLieb) -> np.ndarray:
    total = np.zeros(state.shape[1], dtype=state.dtype)
    for loops, mask in algebra.closure_groups:
        part = state[mask].sum(axis=0)
        for _ in range(loops - 1):
            part = _times_loop(part)
        total += part
    return total


class ClosureTable:
    """Jones polynomials of the closures of every braid word on ``strands`` strands.

    Words of up to ``max_letters`` letters are walked depth first through
    the Temperley-Lieb algebra, so each prefix is multiplied out once. Row
    ``i`` of ``rows`` holds the coefficients of ``s^e`` for
    ``e = -half .. half`` of the word ``words[i]``; the outer two columns
    on either side are always zero so a row can be shifted by ``s^+-2``.
    """

    def __init__(self, strands: int, max_letters: int):
        self.strands = strands
        self.max_letters = max_letters
        algebra = _temperley_lieb(strands)
        offset = 6 * max_letters + 2 * strands + 2
        self.half = offset // 2 + 2
        self.words: list[tuple[int, ...]] = []
        self.index: dict[tuple[int, ...], int] = {}
        alphabet = [j for g in range(1, strands) for j in (g, -g)]
        start = np.zeros((algebra.size, 2 * offset + 1), dtype=np.int64)
        start[0, offset] = 1
        rows = []
        pending: list[tuple[tuple[int, ...], np.ndarray]] = [((), start)]
        while pending:
            letters, state = pending.pop()
            self.index[letters] = len(self.words)
            self.words.append(letters)
            rows.append(self._jones_row(letters, _close(state, algebra), offset))
            if len(letters) < max_letters:
                for letter in alphabet:
                    pending.append((letters + (letter,), _apply_letter(state, letter, algebra)))
        self.rows = np.array(rows)
        logger.info(
            "closure table: %d strands, %d words up to %d letters",
            strands,
            len(self.words),
            max_letters,
        )

    def _jones_row(self, letters: tuple[int, ...], bracket: np.ndarray, offset: int) -> np.ndarray:
        w = sum(1 if letter > 0 else -1 for letter in letters)
        normalized = (-1) ** (w % 2) * np.roll(bracket, -3 * w)
        if normalized[1::2].any():
            raise ParityError(f"odd A-exponent in the bracket of {letters}")
        row = np.zeros(2 * self.half + 1, dtype=np.int64)
        # s = A^-2: the A-exponent offset - 2t lands on s-exponent t - offset/2
        row[2:-2] = normalized[::-2]
        return row

    def __len__(self) -> int:
        return len(self.words)

    def _row(self, letters: Iterable[int]) -> int:
        letters = tuple(letters)
        try:
            return self.index[letters]
        except KeyError:
            raise InputError(
                f"{letters} is not a word on {self.strands} strands "
                f"with at most {self.max_letters} letters"
            ) from None

    def jones(self, letters: Iterable[int]) -> LaurentPoly:
        row = self.rows[self._row(letters)]
        return LaurentPoly(
            {int(e) - self.half: int(row[e]) for e in np.flatnonzero(row)}, var=JONES_VAR
        )

    def _label(self, row: int) -> str:
        return serialize_braid(BraidWord(strand_count=self.strands, letters=self.words[row]))

    @cached_property
    def skein_triples(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Rows of (L+, L-, L0) and the letter position, for every positive letter."""
        plus, minus, zero, positions = [], [], [], []
        for row, letters in enumerate(self.words):
            for position, letter in enumerate(letters):
                if letter < 0:
                    continue
                before, after = letters[:position], letters[position + 1 :]
                plus.append(row)
                minus.append(self.index[before + (-letter,) + after])
                zero.append(self.index[before + after])
                positions.append(position)
        return tuple(np.array(column, dtype=np.intp) for column in (plus, minus, zero, positions))

    def skein_failures(self, chunk: int = 1 << 14) -> list[str]:
        """Exact ``s^-2 V(L+) - s^2 V(L-) - (s - s^-1) V(L0)`` at every letter."""
        plus, minus, zero, positions = self.skein_triples
        failures = []
        for begin in range(0, len(plus), chunk):
            window = slice(begin, begin + chunk)
            v_plus, v_minus, v_zero = (self.rows[rows[window]] for rows in (plus, minus, zero))
            residual = (
                np.roll(v_plus, -2, axis=1)
                - np.roll(v_minus, 2, axis=1)
                - np.roll(v_zero, 1, axis=1)
                + np.roll(v_zero, -1, axis=1)
            )
            for bad in np.flatnonzero(residual.any(axis=1)) + begin:
                failures.append(f"{self._label(plus[bad])} @ {positions[bad]}: nonzero residual")
        return failures

    def values_at_level(self, k: int) -> np.ndarray:
        """V of every word at s = exp(pi*i/(k+2))."""
        numerator, denominator = _level_root(k)
        exponents = np.arange(-self.half, self.half + 1)
        turns = (numerator * exponents) % denominator
        return self.rows @ np.exp(2j * np.pi * turns / denominator)

    def skein_failures_at_level(self, k: int) -> list[str]:
        plus, minus, zero, positions = self.skein_triples
        values = self.values_at_level(k)
        s = cmath.exp(1j * cmath.pi / (k + 2))
        residual = values[plus] / s**2 - s**2 * values[minus] - (s - 1 / s) * values[zero]
        moduli = np.abs(residual)
        return [
            f"{self._label(plus[bad])} @ {positions[bad]}, k={k}: |residual| {moduli[bad]}"
            for bad in np.flatnonzero(moduli >= settings.numeric_tolerance)
        ]

    def mirror_failures(self) -> list[str]:
        """Negating every letter turns V(s) into V(s^-1)."""
        mirrored = np.array([self.index[tuple(-x for x in letters)] for letters in self.words])
        bad = np.flatnonzero((self.rows[mirrored] != self.rows[:, ::-1]).any(axis=1))
        return [f"mirror of {self._label(row)}" for row in bad]

    def braid_relation_failures(self) -> list[str]:
        """Braid relations and letter cancellation leave V unchanged."""
        left, right = [], []
        for letters in self.words:
            room = self.max_letters - len(letters)
            if room >= 2:
                for j in range(1, self.strands):
                    for sign in (1, -1):
                        left.append(self.index[letters + (sign * j, -sign * j)])
                        right.append(self.index[letters])
            if room >= 3:
                for i in range(1, self.strands - 1):
                    for sign in (1, -1):
                        a, b = sign * i, sign * (i + 1)
                        left.append(self.index[letters + (a, b, a)])
                        right.append(self.index[letters + (b, a, b)])
        if not left:
            return []
        left_rows, right_rows = np.array(left), np.array(right)
        bad = np.flatnonzero((self.rows[left_rows] != self.rows[right_rows]).any(axis=1))
        return [
            f"{self._label(left_rows[i])} and {self._label(right_rows[i])} differ" for i in bad
        ]

    def parity_failures(self) -> list[str]:
        """Exponents of s all have the parity of components - 1."""
        components = np.array(
            [
                closure_component_count(BraidWord(strand_count=self.strands, letters=letters))
                for letters in self.words
            ]
        )
        exponent_parity = (np.arange(self.rows.shape[1]) - self.half) % 2
        wrong = (self.rows != 0) & (exponent_parity[None, :] != ((components - 1) % 2)[:, None])
        return [f"parity of {self._label(row)}" for row in np.flatnonzero(wrong.any(axis=1))]


@lru_cache(maxsize=4)
def closure_table(strands: int, max_letters: int) -> ClosureTable:
    return ClosureTable(strands, max_letters)


def check_closure_corpus(
    max_strands: int, max_letters: int, levels: Iterable[int] = ()
) -> dict[str, list[str]]:
    """Skein, mirror, braid-relation and parity checks over every closure in the corpus."""
    levels = list(levels)
    results: dict[str, list[str]] = {
        "skein-exact": [],
        "skein-root-of-unity": [],
        "mirror": [],
        "braid-relation": [],
        "parity": [],
    }
    for strands in range(1, max_strands + 1):
        table = closure_table(strands, max_letters)
        results["skein-exact"] += table.skein_failures()
        for k in levels:
            results["skein-root-of-unity"] += table.skein_failures_at_level(k)
        results["mirror"] += table.mirror_failures()
        results["braid-relation"] += table.braid_relation_failures()
        results["parity"] += table.parity_failures()
    return results
