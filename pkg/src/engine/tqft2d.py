"""Two-dimensional TQFTs from commutative Frobenius algebras.

A cobordism between unions of circles is a word of layers; each layer is a
left-to-right row of generators. The functor ``Z`` sends ``n`` circles to
the ``n``-fold tensor power of the algebra (basis index ``i1*d**(n-1) + ...``)
and a cobordism to an exact rational matrix of shape ``d**target x d**source``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from enum import Enum
from functools import cached_property, reduce
from typing import Any, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy import Rational
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from src.engine.fusion import FusionLevel, fusion_matrix
from src.shared.config import settings
from src.shared.errors import AlgebraError, CompositionError, ParseError
from src.shared.models import CobordismDocument, FrobeniusAlgebraDocument, FrobeniusReport

logger = logging.getLogger(__name__)


class Generator(str, Enum):
    """Elementary cobordisms between circles."""

    IDENTITY = "identity"
    SWAP = "swap"
    CAP = "cap"
    CUP = "cup"
    PANTS = "pants"
    COPANTS = "copants"

    @property
    def inputs(self) -> int:
        return _ARITY[self][0]

    @property
    def outputs(self) -> int:
        return _ARITY[self][1]

    @property
    def reversed(self) -> Generator:
        return _REVERSED.get(self, self)


_ARITY = {
    Generator.IDENTITY: (1, 1),
    Generator.SWAP: (2, 2),
    Generator.CAP: (0, 1),
    Generator.CUP: (1, 0),
    Generator.PANTS: (2, 1),
    Generator.COPANTS: (1, 2),
}

_REVERSED = {
    Generator.CAP: Generator.CUP,
    Generator.CUP: Generator.CAP,
    Generator.PANTS: Generator.COPANTS,
    Generator.COPANTS: Generator.PANTS,
}

Layer = tuple[Generator, ...]


def _layer_arity(layer: Layer) -> tuple[int, int]:
    return sum(g.inputs for g in layer), sum(g.outputs for g in layer)


class Cobordism(BaseModel):
    """Layered word of generators from ``source`` circles to ``target`` circles.

    An empty layer is the identity of the empty manifold and is allowed only
    where zero circles pass.
    """

    model_config = ConfigDict(frozen=True)

    source: int = Field(..., ge=0, description="Incoming circle count")
    layers: tuple[Layer, ...] = ()

    @model_validator(mode="after")
    def _check_arities(self) -> Cobordism:
        width = self.source
        for depth, layer in enumerate(self.layers):
            inputs, outputs = _layer_arity(layer)
            if inputs != width:
                raise CompositionError(
                    f"layer {depth} expects {inputs} circles but {width} arrive"
                )
            width = outputs
        return self

    @property
    def target(self) -> int:
        if not self.layers:
            return self.source
        return _layer_arity(self.layers[-1])[1]

    @classmethod
    def identity(cls, width: int) -> Cobordism:
        return cls(source=width, layers=())

    @classmethod
    def from_word(
        cls, word: Sequence[Union[str, Sequence[str]]], source: int | None = None
    ) -> Cobordism:
        """Build from ``["cap", ["copants"], ["pants", "identity"], ...]``."""
        layers: list[Layer] = []
        for entry in word:
            names = [entry] if isinstance(entry, str) else list(entry)
            try:
                layers.append(tuple(Generator(name) for name in names))
            except ValueError:
                raise ParseError(
                    f"unknown generator in {entry!r}; expected {[g.value for g in Generator]}"
                ) from None
        if source is None:
            source = _layer_arity(layers[0])[0] if layers else 0
        return cls(source=source, layers=tuple(layers))

    def to_word(self) -> list[Union[str, list[str]]]:
        return [
            layer[0].value if len(layer) == 1 else [g.value for g in layer]
            for layer in self.layers
        ]

    @classmethod
    def from_document(cls, document: CobordismDocument) -> Cobordism:
        return cls.from_word(document.word, source=document.source)

    def euler_characteristic(self) -> int:
        """Sum over generators: cap and cup count +1, pants and copants -1."""
        weight = {Generator.CAP: 1, Generator.CUP: 1, Generator.PANTS: -1, Generator.COPANTS: -1}
        return sum(weight.get(g, 0) for layer in self.layers for g in layer)


# -- exact tensors -----------------------------------------------------------


def _exact(values: Any) -> np.ndarray:
    """Object array of QQ elements from ints, sympy rationals or ``"p/q"`` strings."""

    def convert(value: Any) -> Any:
        if isinstance(value, str):
            try:
                return QQ.from_sympy(Rational(value))
            except (TypeError, ValueError) as exc:
                raise ParseError(f"not a rational number: {value!r}") from exc
        return QQ.convert(value)

    return np.frompyfunc(convert, 1, 1)(np.asarray(values, dtype=object)).astype(object)


def _zeros(shape: tuple[int, ...]) -> np.ndarray:
    return np.full(shape, QQ.zero, dtype=object)


def _identity(n: int) -> np.ndarray:
    out = _zeros((n, n))
    for i in range(n):
        out[i, i] = QQ.one
    return out


def _kron_all(blocks: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, blocks, _identity(1))


def _inverse(matrix: np.ndarray) -> np.ndarray:
    rows = [[QQ.convert(x) for x in row] for row in matrix]
    inverse = DomainMatrix(rows, matrix.shape, QQ).inv()
    return _exact(inverse.to_Matrix().tolist())


def _to_strings(matrix: np.ndarray) -> list[list[str]]:
    return [[str(QQ.to_sympy(x)) for x in row] for row in matrix]


class StateSpaceMap:
    """Exact matrix of ``Z(M)``, shape ``d**target x d**source``."""

    def __init__(self, matrix: np.ndarray, source: int, target: int, dim: int):
        if matrix.shape != (dim**target, dim**source):
            raise CompositionError(
                f"matrix shape {matrix.shape} does not match {source} -> {target} "
                f"circles over a {dim}-dimensional algebra"
            )
        self.matrix = matrix
        self.source = source
        self.target = target
        self.dim = dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateSpaceMap):
            return NotImplemented
        return (self.source, self.target, self.dim) == (
            other.source,
            other.target,
            other.dim,
        ) and bool(np.array_equal(self.matrix, other.matrix))

    __hash__ = None  # type: ignore[assignment]

    def is_closed(self) -> bool:
        return self.source == 0 and self.target == 0

    def scalar(self) -> Any:
        if not self.is_closed():
            raise CompositionError(f"a {self.source} -> {self.target} map is not a number")
        return self.matrix[0, 0]

    def to_strings(self) -> list[list[str]]:
        return _to_strings(self.matrix)

    def __repr__(self) -> str:
        return f"StateSpaceMap({self.source} -> {self.target}, {self.to_strings()})"


class FrobeniusAlgebra:
    """Commutative Frobenius algebra with basis ``e_0..e_(d-1)``.

    ``mult[i, j, k]`` is the coefficient of ``e_k`` in ``e_i * e_j``. The
    counit and comultiplication are derived from the unit and the pairing.
    """

    def __init__(self, mult: Any, unit: Any, pairing: Any, name: str = "algebra"):
        self.mult = _exact(mult)
        self.unit = _exact(unit)
        self.pairing = _exact(pairing)
        self.name = name
        d = self.unit.shape[0] if self.unit.ndim == 1 else -1
        if d < 1 or self.mult.shape != (d, d, d) or self.pairing.shape != (d, d):
            raise ValueError(
                f"inconsistent shapes: mult {self.mult.shape}, unit {self.unit.shape}, "
                f"pairing {self.pairing.shape}"
            )
        self.dim = d

    @classmethod
    def from_document(cls, document: FrobeniusAlgebraDocument) -> FrobeniusAlgebra:
        return cls(document.mult, document.unit, document.pairing, name="document")

    def to_document(self) -> dict:
        return {
            "dim": self.dim,
            "mult": [_to_strings(plane) for plane in self.mult],
            "unit": [str(QQ.to_sympy(x)) for x in self.unit],
            "pairing": _to_strings(self.pairing),
        }

    @cached_property
    def inverse_pairing(self) -> np.ndarray:
        try:
            return _inverse(self.pairing)
        except DMNonInvertibleMatrixError:
            raise AlgebraError(f"{self!r} has a degenerate pairing") from None

    def require_valid(self) -> FrobeniusAlgebra:
        report = validate_frobenius(self)
        if not report.valid:
            violations = "; ".join(report.violations)
            raise AlgebraError(f"{self!r} is not a Frobenius algebra: {violations}")
        return self

    @cached_property
    def counit(self) -> np.ndarray:
        """``eps(e_i) = sum_j pairing[i][j] * unit_j``."""
        return self.pairing @ self.unit

    @cached_property
    def comult(self) -> np.ndarray:
        """``Delta[(i, j), k] = sum_a g^(aj) m[k][a][i]``."""
        d = self.dim
        out = _zeros((d * d, d))
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    out[i * d + j, k] = sum(
                        (self.inverse_pairing[a, j] * self.mult[k, a, i] for a in range(d)),
                        QQ.zero,
                    )
        return out

    def pairing_power(self, circles: int) -> np.ndarray:
        """Pairing on the ``circles``-fold tensor power."""
        return _kron_all([self.pairing] * circles)

    def inverse_pairing_power(self, circles: int) -> np.ndarray:
        return _kron_all([self.inverse_pairing] * circles)

    @cached_property
    def _generator_matrices(self) -> dict[Generator, np.ndarray]:
        d = self.dim
        swap = _zeros((d * d, d * d))
        for i in range(d):
            for j in range(d):
                swap[j * d + i, i * d + j] = QQ.one
        pants = _zeros((d, d * d))
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    pants[k, i * d + j] = self.mult[i, j, k]
        return {
            Generator.IDENTITY: _identity(d),
            Generator.SWAP: swap,
            Generator.CAP: self.unit.reshape(d, 1),
            Generator.CUP: self.counit.reshape(1, d),
            Generator.PANTS: pants,
            Generator.COPANTS: self.comult,
        }

    def generator_matrix(self, generator: Generator) -> np.ndarray:
        return self._generator_matrices[generator]

    def __repr__(self) -> str:
        return f"FrobeniusAlgebra({self.name!r}, dim={self.dim})"


# -- algebras ------------------------------------------------------------------


def z2_group_algebra() -> FrobeniusAlgebra:
    """Group algebra of Z/2 with basis (e, g), eps(e) = 1 and eps(g) = 0."""
    mult = [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    return FrobeniusAlgebra(mult, [1, 0], [[1, 0], [0, 1]], name="Z2")


def frobenius_from_fusion(level: FusionLevel) -> FrobeniusAlgebra:
    """Verlinde algebra: fusion multiplicities, unit label 0, pairing delta."""
    d = level.k + 1
    mult = [fusion_matrix(level, a).tolist() for a in level.labels]
    unit = [1] + [0] * (d - 1)
    pairing = [[int(a == b) for b in range(d)] for a in range(d)]
    return FrobeniusAlgebra(mult, unit, pairing, name=f"verlinde(k={level.k})")


def validate_frobenius(algebra: FrobeniusAlgebra) -> FrobeniusReport:
    """Check associativity, commutativity, the unit, the pairing and Frobenius compatibility."""
    violations: list[str] = []
    m, g, d = algebra.mult, algebra.pairing, algebra.dim

    left = np.tensordot(m, m, axes=([2], [0]))  # (e_i e_j) e_l
    right = np.tensordot(m, m, axes=([2], [1])).transpose(2, 0, 1, 3)  # e_i (e_j e_l)
    bad = np.argwhere(left != right)
    if bad.size:
        i, j, l, _ = bad[0]
        violations.append(f"associativity fails at (e{i} e{j}) e{l}")

    if not np.array_equal(m, m.transpose(1, 0, 2)):
        i, j, _ = np.argwhere(m != m.transpose(1, 0, 2))[0]
        violations.append(f"commutativity fails at e{i} e{j}")

    if not np.array_equal(np.tensordot(algebra.unit, m, axes=([0], [0])), _identity(d)):
        violations.append("unit: 1 * e_j != e_j")

    if not np.array_equal(g, g.T):
        violations.append("pairing is not symmetric")
    if DomainMatrix([[QQ.convert(x) for x in row] for row in g], (d, d), QQ).det() == QQ.zero:
        violations.append("pairing is degenerate")

    invariant_left = np.tensordot(m, g, axes=([2], [0]))  # <e_a e_b, e_c>
    invariant_right = np.tensordot(g, m, axes=([1], [2]))  # <e_a, e_b e_c>
    bad = np.argwhere(invariant_left != invariant_right)
    if bad.size:
        a, b, c = bad[0]
        violations.append(f"Frobenius: <e{a} e{b}, e{c}> != <e{a}, e{b} e{c}>")

    if violations:
        logger.debug("%r fails %d identities", algebra, len(violations))
    return FrobeniusReport(valid=not violations, violations=violations)


# -- evaluation ----------------------------------------------------------------


def evaluate(algebra: FrobeniusAlgebra, cobordism: Cobordism) -> StateSpaceMap:
    """Layers compose by matrix product, pieces of a layer by Kronecker product."""
    d = algebra.dim
    matrix = _identity(d**cobordism.source)
    for layer in cobordism.layers:
        block = _kron_all(algebra.generator_matrix(g) for g in layer)
        matrix = block @ matrix
    return StateSpaceMap(matrix, cobordism.source, cobordism.target, d)


def compose(first: Cobordism, second: Cobordism) -> Cobordism:
    """``first`` followed by ``second``."""
    if first.target != second.source:
        raise CompositionError(
            f"cannot glue {first.target} outgoing circles to {second.source} incoming circles"
        )
    return Cobordism(source=first.source, layers=first.layers + second.layers)


def _padded(cobordism: Cobordism, depth: int) -> list[Layer]:
    layers = list(cobordism.layers)
    filler = (Generator.IDENTITY,) * cobordism.target
    layers.extend([filler] * (depth - len(layers)))
    return layers


def parallel(left: Cobordism, right: Cobordism) -> Cobordism:
    """Disjoint union, ``left`` placed before ``right`` in every layer."""
    depth = max(len(left.layers), len(right.layers))
    layers = tuple(a + b for a, b in zip(_padded(left, depth), _padded(right, depth)))
    return Cobordism(source=left.source + right.source, layers=layers)


def reverse(cobordism: Cobordism) -> Cobordism:
    """Orientation reversal: read backwards, swapping cap/cup and pants/copants."""
    layers = tuple(
        tuple(g.reversed for g in layer) for layer in reversed(cobordism.layers)
    )
    return Cobordism(source=cobordism.target, layers=layers)


def dual_map(algebra: FrobeniusAlgebra, state_map: StateSpaceMap) -> StateSpaceMap:
    """Adjoint with respect to the pairing: ``G_s^-1 Z^T G_t``."""
    matrix = (
        algebra.inverse_pairing_power(state_map.source)
        @ state_map.matrix.T
        @ algebra.pairing_power(state_map.target)
    )
    return StateSpaceMap(matrix, state_map.target, state_map.source, algebra.dim)


def glue_pair(algebra: FrobeniusAlgebra, left: Cobordism, right: Cobordism) -> Any:
    """Contract ``Z(left)`` with ``Z(right)`` through the pairing on the shared circles.

    ``Z(right)`` is turned into dual vectors with the inverse pairing and
    paired against the states produced by ``Z(left)``. Closed results come
    back as a QQ scalar.
    """
    if left.target != right.source:
        raise CompositionError(
            f"left ends on {left.target} circles but right begins on {right.source}"
        )
    circles = left.target
    z_left = evaluate(algebra, left).matrix
    z_right = evaluate(algebra, right).matrix
    duals = algebra.inverse_pairing_power(circles) @ z_right.T
    glued = duals.T @ algebra.pairing_power(circles) @ z_left
    result = StateSpaceMap(glued, left.source, right.target, algebra.dim)
    return result.scalar() if result.is_closed() else result


def genus_word(genus: int) -> Cobordism:
    """cap, then ``genus`` handles (copants followed by pants), then cup."""
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    handle = ((Generator.COPANTS,), (Generator.PANTS,))
    layers = ((Generator.CAP,),) + handle * genus + ((Generator.CUP,),)
    return Cobordism(source=0, layers=layers)


def closed_surface(algebra: FrobeniusAlgebra, genus: int) -> Any:
    return evaluate(algebra, genus_word(genus)).scalar()


def handle_element(algebra: FrobeniusAlgebra) -> np.ndarray:
    """``m(Delta(1))``; the torus is its counit."""
    d = algebra.dim
    comult_unit = algebra.comult @ algebra.unit
    pants = algebra.generator_matrix(Generator.PANTS)
    return (pants @ comult_unit.reshape(d * d, 1)).reshape(d)


def check_handle_powers(algebra: FrobeniusAlgebra, max_genus: int = 3) -> list[str]:
    """Z of the genus-g surface is the counit of the g-th power of the handle element."""
    d = algebra.dim
    pants = algebra.generator_matrix(Generator.PANTS)
    handle = handle_element(algebra)
    power = algebra.unit
    failures = []
    for genus in range(max_genus + 1):
        by_handles = algebra.counit @ power
        closed = closed_surface(algebra, genus)
        if by_handles != closed:
            failures.append(
                f"{algebra!r} genus {genus}: handle power gives {by_handles}, Z gives {closed}"
            )
        power = pants @ np.outer(power, handle).reshape(d * d)
    return failures


# -- random cobordisms and the axiom sweep ------------------------------------


def _random_layer(rng: np.random.Generator, width: int, max_width: int) -> Layer:
    if width == 0:
        return (Generator.CAP,) if rng.random() < 0.7 else ()
    pieces: list[Generator] = []
    remaining, produced = width, 0
    while remaining:
        options = [
            g
            for g in Generator
            if 1 <= g.inputs <= remaining
            and produced + g.outputs + (remaining - g.inputs) <= max_width
        ]
        choice = options[int(rng.integers(len(options)))]
        pieces.append(choice)
        remaining -= choice.inputs
        produced += choice.outputs
    if produced < max_width and rng.random() < 0.2:
        pieces.insert(int(rng.integers(len(pieces) + 1)), Generator.CAP)
    return tuple(pieces)


def random_cobordism(
    rng: np.random.Generator,
    source: int,
    depth: int = 4,
    max_width: int | None = None,
) -> Cobordism:
    """Random layered cobordism starting on ``source`` circles, never wider than ``max_width``."""
    max_width = max_width or settings.max_cobordism_width
    if source > max_width:
        raise CompositionError(f"source {source} exceeds the width bound {max_width}")
    layers: list[Layer] = []
    width = source
    for _ in range(depth):
        layer = _random_layer(rng, width, max_width)
        layers.append(layer)
        width = _layer_arity(layer)[1]
    return Cobordism(source=source, layers=tuple(layers))


def check_axioms(
    algebra: FrobeniusAlgebra,
    rng: np.random.Generator,
    cases: int | None = None,
    max_width: int | None = None,
) -> list[str]:
    """Functoriality, monoidality, duality and gluing on random cobordisms.

    Returns one line per failed identity.
    """
    cases = settings.fuzz_cases if cases is None else cases
    max_width = max_width or settings.max_cobordism_width
    failures: list[str] = []
    for case in range(cases):
        first = random_cobordism(rng, int(rng.integers(max_width + 1)), max_width=max_width)
        second = random_cobordism(rng, first.target, max_width=max_width)
        z_first, z_second = evaluate(algebra, first), evaluate(algebra, second)
        composed = evaluate(algebra, compose(first, second))
        if not np.array_equal(composed.matrix, z_second.matrix @ z_first.matrix):
            failures.append(f"case {case}: functoriality {first.to_word()} ; {second.to_word()}")

        if max_width >= 2:
            # split the width bound so the disjoint union stays within it
            share = int(rng.integers(1, max_width))
            left = random_cobordism(rng, int(rng.integers(share + 1)), max_width=share)
            right_width = max_width - share
            right = random_cobordism(
                rng, int(rng.integers(right_width + 1)), max_width=right_width
            )
            side = evaluate(algebra, parallel(left, right))
            expected_side = np.kron(evaluate(algebra, left).matrix, evaluate(algebra, right).matrix)
            if not np.array_equal(side.matrix, expected_side):
                failures.append(f"case {case}: monoidality {left.to_word()} | {right.to_word()}")

        if evaluate(algebra, reverse(first)) != dual_map(algebra, z_first):
            failures.append(f"case {case}: duality {first.to_word()}")

        glued = glue_pair(algebra, first, second)
        expected = composed.scalar() if composed.is_closed() else composed
        if glued != expected:
            failures.append(f"case {case}: gluing {first.to_word()} ; {second.to_word()}")
    logger.debug("%r: %d axiom cases, %d failures", algebra, cases, len(failures))
    return failures


def algebra_from_mapping(document: Mapping[str, Any]) -> FrobeniusAlgebra:
    """Validate a parsed JSON object and build the algebra."""
    return FrobeniusAlgebra.from_document(FrobeniusAlgebraDocument.model_validate(document))


def cobordism_from_json(data: Any) -> Cobordism:
    """Accept either a bare word list or ``{"source": n, "word": [...]}``."""
    if isinstance(data, list):
        data = {"word": data}
    return Cobordism.from_document(CobordismDocument.model_validate(data))
