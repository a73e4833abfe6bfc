"""Prequantization of polynomial observables on flat phase space R^2n.

Observables are polynomials in ``q1..qn, p1..pn`` whose coefficients are
Gaussian rationals extended by integer powers of ``hbar``. With the
symplectic form ``sum dq_j ^ dp_j`` and the global potential
``A = -sum p_j dq_j`` the prequantum operator is

    Q(f) = -i hbar X_f + sum_j p_j df/dp_j - f

where ``X_f = sum_j (df/dp_j) d/dq_j - (df/dq_j) d/dp_j``. Operators are
kept normal ordered: polynomial coefficients to the left of derivatives.
``hbar`` lives in the coefficient field, so derivations only see the
coordinates and ``q1/hbar`` is as good an observable as ``hbar*q1``.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from functools import lru_cache
from typing import Any, Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from sympy import I, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import QQ_I
from sympy.polys.fields import FracElement
from sympy.polys.rings import PolyElement, PolyRing, ring

from src.shared.config import settings
from src.shared.errors import DimensionMismatchError, InputError, LabelRangeError, ParseError

logger = logging.getLogger(__name__)

_TRANSFORMATIONS = standard_transformations + (convert_xor,)

HBAR = "hbar"

# Gaussian rationals with hbar adjoined; parsed coefficients are Laurent polynomials in hbar
_SCALARS = QQ_I.frac_field(Symbol(HBAR))


@lru_cache(maxsize=None)
def _polynomial_ring(names: tuple[str, ...]) -> PolyRing:
    return ring(",".join(names), _SCALARS)[0]


def _is_laurent_in_hbar(coeff: FracElement) -> bool:
    return len(coeff.denom) == 1


class _PolynomialSpace(BaseModel):
    """Polynomial ring in the coordinates over QQ_I(hbar)."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Degrees of freedom")

    def coordinate_names(self) -> tuple[str, ...]:
        raise NotImplementedError

    @property
    def names(self) -> tuple[str, ...]:
        return self.coordinate_names() + (HBAR,)

    @property
    def ring(self) -> PolyRing:
        return _polynomial_ring(self.coordinate_names())

    @property
    def coordinates(self) -> tuple[PolyElement, ...]:
        return self.ring.gens

    @property
    def hbar(self) -> PolyElement:
        return self.ring(Symbol(HBAR))

    @property
    def i_hbar(self) -> PolyElement:
        return self.ring(I * Symbol(HBAR))

    def check_index(self, k: int) -> None:
        if not 1 <= k <= self.n:
            raise LabelRangeError(f"index {k} outside 1..{self.n}")

    def parse(self, text: str) -> PolyElement:
        """Read a polynomial such as ``"q1^2*p1 + 3*q2"`` or ``"q1/hbar"``."""
        symbols = {name: Symbol(name) for name in self.names}
        try:
            expr = parse_expr(
                text, local_dict={**symbols, "I": I}, transformations=_TRANSFORMATIONS
            ).expand()
        except Exception as exc:  # sympy raises a wide range of errors on bad input
            raise ParseError(f"cannot parse observable {text!r}: {exc}") from exc
        unknown = expr.free_symbols - set(symbols.values())
        if unknown:
            raise ParseError(
                f"unknown symbols {sorted(map(str, unknown))} in {text!r}; "
                f"expected polynomials in {', '.join(self.names)}"
            )
        try:
            poly = self.ring.from_expr(expr)
        except ValueError as exc:
            raise ParseError(f"{text!r} is not a polynomial: {exc}") from exc
        for coeff in poly.values():
            if not _is_laurent_in_hbar(coeff):
                raise ParseError(
                    f"coefficient {coeff.as_expr()} in {text!r} is not"
                    " a Laurent polynomial in hbar"
                )
        return poly


class PhaseSpace(_PolynomialSpace):
    """R^2n with coordinates q1..qn, p1..pn."""

    def coordinate_names(self) -> tuple[str, ...]:
        return tuple(f"q{j}" for j in range(1, self.n + 1)) + tuple(
            f"p{j}" for j in range(1, self.n + 1)
        )

    def q(self, k: int) -> PolyElement:
        self.check_index(k)
        return self.coordinates[k - 1]

    def p(self, k: int) -> PolyElement:
        self.check_index(k)
        return self.coordinates[self.n + k - 1]


class ConfigurationSpace(_PolynomialSpace):
    """R^n with coordinates x1..xn; the Schrodinger representation acts here."""

    def coordinate_names(self) -> tuple[str, ...]:
        return tuple(f"x{j}" for j in range(1, self.n + 1))

    def x(self, k: int) -> PolyElement:
        self.check_index(k)
        return self.coordinates[k - 1]


class HolomorphicSpace(_PolynomialSpace):
    """C^n with coordinates z1..zn and their conjugates zbar1..zbarn."""

    def coordinate_names(self) -> tuple[str, ...]:
        return tuple(f"z{j}" for j in range(1, self.n + 1)) + tuple(
            f"zbar{j}" for j in range(1, self.n + 1)
        )

    @property
    def antiholomorphic(self) -> tuple[PolyElement, ...]:
        return self.coordinates[self.n :]


def _same_space(left: _PolynomialSpace, right: _PolynomialSpace) -> None:
    if left != right or type(left) is not type(right):
        raise DimensionMismatchError(f"{left!r} and {right!r} are different spaces")


def _poly_text(poly: PolyElement) -> str:
    return str(poly.as_expr()) if poly else "0"


# -- observables and vector fields -------------------------------------------------


class PolyObservable:
    """Polynomial function on a phase space."""

    __slots__ = ("space", "poly")

    def __init__(self, space: PhaseSpace, poly: Any):
        self.space = space
        self.poly = poly if isinstance(poly, PolyElement) else space.ring(poly)
        if self.poly.ring != space.ring:
            raise DimensionMismatchError(f"polynomial does not live on {space!r}")

    def _other(self, other: Any) -> PolyObservable:
        if isinstance(other, PolyObservable):
            _same_space(self.space, other.space)
            return other
        return PolyObservable(self.space, other)

    def __add__(self, other: Any) -> PolyObservable:
        return PolyObservable(self.space, self.poly + self._other(other).poly)

    __radd__ = __add__

    def __sub__(self, other: Any) -> PolyObservable:
        return PolyObservable(self.space, self.poly - self._other(other).poly)

    def __mul__(self, other: Any) -> PolyObservable:
        return PolyObservable(self.space, self.poly * self._other(other).poly)

    __rmul__ = __mul__

    def __neg__(self) -> PolyObservable:
        return PolyObservable(self.space, -self.poly)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PolyObservable):
            return self.space == other.space and self.poly == other.poly
        if isinstance(other, int):
            return self.poly == self.space.ring(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.space.n, self.poly))

    def is_zero(self) -> bool:
        return not self.poly

    def total_degree(self) -> int:
        """Degree in the phase-space coordinates, ignoring hbar."""
        return max((sum(monom) for monom in self.poly.itermonoms()), default=0)

    def __str__(self) -> str:
        return _poly_text(self.poly)

    def __repr__(self) -> str:
        return f"PolyObservable({self}, n={self.space.n})"


class VectorFieldPoly:
    """Polynomial vector field; ``components`` are the coefficients of d/dq1..d/dpn."""

    __slots__ = ("space", "components")

    def __init__(self, space: PhaseSpace, components: Sequence[PolyElement]):
        if len(components) != 2 * space.n:
            raise DimensionMismatchError(
                f"expected {2 * space.n} components on {space!r}, got {len(components)}"
            )
        self.space = space
        self.components = tuple(components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorFieldPoly):
            return NotImplemented
        return self.space == other.space and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.space.n, self.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def __sub__(self, other: VectorFieldPoly) -> VectorFieldPoly:
        _same_space(self.space, other.space)
        return VectorFieldPoly(
            self.space, [a - b for a, b in zip(self.components, other.components)]
        )

    def __str__(self) -> str:
        pieces = [
            f"({_poly_text(c)})*d_{name}"
            for c, name in zip(self.components, self.space.coordinate_names())
            if c
        ]
        return " + ".join(pieces) or "0"


def parse_observable(text: str, n: int) -> PolyObservable:
    space = PhaseSpace(n=n)
    return PolyObservable(space, space.parse(text))


def hamiltonian_vf(f: PolyObservable) -> VectorFieldPoly:
    """``X_f = sum_j (df/dp_j) d/dq_j - (df/dq_j) d/dp_j``."""
    space = f.space
    qs, ps = space.coordinates[: space.n], space.coordinates[space.n :]
    return VectorFieldPoly(
        space, [f.poly.diff(p) for p in ps] + [-f.poly.diff(q) for q in qs]
    )


def apply_vector_field(field: VectorFieldPoly, g: PolyObservable) -> PolyObservable:
    _same_space(field.space, g.space)
    total = g.space.ring.zero
    for component, variable in zip(field.components, g.space.coordinates):
        if component:
            total += component * g.poly.diff(variable)
    return PolyObservable(g.space, total)


def poisson(f: PolyObservable, g: PolyObservable) -> PolyObservable:
    """``{f, g} = X_f(g)``; in particular ``{q_i, p_j} = -delta_ij``."""
    _same_space(f.space, g.space)
    return apply_vector_field(hamiltonian_vf(f), g)


def vector_field_bracket(first: VectorFieldPoly, second: VectorFieldPoly) -> VectorFieldPoly:
    """Lie bracket ``[X, Y]^v = X(Y^v) - Y(X^v)``."""
    _same_space(first.space, second.space)
    space = first.space
    components = []
    for x_comp, y_comp in zip(first.components, second.components):
        forward = apply_vector_field(first, PolyObservable(space, y_comp)).poly
        backward = apply_vector_field(second, PolyObservable(space, x_comp)).poly
        components.append(forward - backward)
    return VectorFieldPoly(space, components)


# -- differential operators ---------------------------------------------------------

MultiIndex = tuple[int, ...]


def _differentiate(poly: PolyElement, index: MultiIndex, variables: Sequence[PolyElement]):
    for variable, count in zip(variables, index):
        for _ in range(count):
            if not poly:
                return poly
            poly = poly.diff(variable)
    return poly


class DiffOperator:
    """Normal-ordered operator ``sum_alpha c_alpha(x, hbar) d^alpha``.

    ``terms`` maps a derivative multi-index over the space's coordinates to
    its coefficient polynomial; zero coefficients are never stored.
    """

    __slots__ = ("space", "_terms")

    def __init__(self, space: _PolynomialSpace, terms: Mapping[MultiIndex, PolyElement] = None):
        width = len(space.coordinate_names())
        clean: dict[MultiIndex, PolyElement] = {}
        for index, coeff in (terms or {}).items():
            if len(index) != width:
                raise DimensionMismatchError(
                    f"multi-index {index} has the wrong length for {space!r}"
                )
            if coeff:
                clean[tuple(index)] = coeff
        self.space = space
        self._terms = clean

    @classmethod
    def multiplication(cls, space: _PolynomialSpace, coeff: Any) -> DiffOperator:
        poly = coeff if isinstance(coeff, PolyElement) else space.ring(coeff)
        return cls(space, {(0,) * len(space.coordinate_names()): poly})

    @classmethod
    def derivative(cls, space: _PolynomialSpace, position: int, coeff: Any = 1) -> DiffOperator:
        """``coeff * d/d(coordinate[position])`` with a 0-based position."""
        index = [0] * len(space.coordinate_names())
        index[position] = 1
        poly = coeff if isinstance(coeff, PolyElement) else space.ring(coeff)
        return cls(space, {tuple(index): poly})

    @classmethod
    def from_vector_field(cls, field: VectorFieldPoly) -> DiffOperator:
        width = len(field.components)
        terms = {}
        for position, component in enumerate(field.components):
            index = [0] * width
            index[position] = 1
            terms[tuple(index)] = component
        return cls(field.space, terms)

    @property
    def terms(self) -> dict[MultiIndex, PolyElement]:
        return dict(self._terms)

    def order(self) -> int:
        return max((sum(index) for index in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def _combine(self, other: DiffOperator, sign: int) -> DiffOperator:
        _same_space(self.space, other.space)
        out = dict(self._terms)
        for index, coeff in other._terms.items():
            out[index] = out.get(index, self.space.ring.zero) + sign * coeff
        return DiffOperator(self.space, out)

    def __add__(self, other: DiffOperator) -> DiffOperator:
        return self._combine(other, 1)

    def __sub__(self, other: DiffOperator) -> DiffOperator:
        return self._combine(other, -1)

    def __neg__(self) -> DiffOperator:
        return DiffOperator(self.space, {k: -c for k, c in self._terms.items()})

    def scale(self, coeff: Any) -> DiffOperator:
        """Left multiplication by a polynomial."""
        poly = coeff if isinstance(coeff, PolyElement) else self.space.ring(coeff)
        return DiffOperator(self.space, {k: poly * c for k, c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.space == other.space and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((type(self.space).__name__, self.space.n, tuple(sorted(self._terms))))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = self.space.coordinate_names()
        pieces = []
        for index in sorted(self._terms, key=lambda idx: (sum(idx), idx)):
            expr = self._terms[index].as_expr()
            derivs = [
                name if count == 1 else f"{name}^{count}"
                for name, count in zip(names, index)
                if count
            ]
            if not derivs:
                pieces.append(f"({expr})" if expr.is_Add else str(expr))
                continue
            text = "d_" + "*d_".join(derivs)
            if expr == 1:
                pieces.append(text)
            elif expr == -1:
                pieces.append(f"-{text}")
            else:
                coeff = f"({expr})" if expr.is_Add else str(expr)
                pieces.append(f"{coeff}*{text}")
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"DiffOperator({self})"


def compose(first: DiffOperator, second: DiffOperator) -> DiffOperator:
    """``first o second``, re-normal-ordered with the multi-index Leibniz rule."""
    _same_space(first.space, second.space)
    variables = first.space.coordinates
    out: dict[MultiIndex, PolyElement] = {}
    zero = first.space.ring.zero
    for alpha, c_alpha in first._terms.items():
        for beta, d_beta in second._terms.items():
            for gamma in itertools.product(*(range(a + 1) for a in alpha)):
                derived = _differentiate(d_beta, gamma, variables)
                if not derived:
                    continue
                weight = math.prod(math.comb(a, g) for a, g in zip(alpha, gamma))
                index = tuple(a - g + b for a, g, b in zip(alpha, gamma, beta))
                out[index] = out.get(index, zero) + c_alpha * derived * weight
    return DiffOperator(first.space, out)


def commutator(first: DiffOperator, second: DiffOperator) -> DiffOperator:
    return compose(first, second) - compose(second, first)


def apply_operator(operator: DiffOperator, poly: PolyElement) -> PolyElement:
    """Act on a polynomial in the operator's ring."""
    variables = operator.space.coordinates
    total = operator.space.ring.zero
    for index, coeff in operator._terms.items():
        total += coeff * _differentiate(poly, index, variables)
    return total


# -- quantization -----------------------------------------------------------------


def prequant(f: PolyObservable) -> DiffOperator:
    """``Q(f) = -i hbar X_f - A(X_f) - f`` with ``A = -sum p_j dq_j``."""
    space = f.space
    field = DiffOperator.from_vector_field(hamiltonian_vf(f)).scale(-space.i_hbar)
    ps = space.coordinates[space.n :]
    potential_term = sum((p * f.poly.diff(p) for p in ps), space.ring.zero)
    return field + DiffOperator.multiplication(space, potential_term - f.poly)


def dirac_residual(f: PolyObservable, g: PolyObservable) -> DiffOperator:
    """``[Q(f), Q(g)] + i hbar Q({f, g})``, the zero operator when Dirac's condition holds."""
    _same_space(f.space, g.space)
    bracket = commutator(prequant(f), prequant(g))
    return bracket + prequant(poisson(f, g)).scale(f.space.i_hbar)


def schrodinger_rep(which: Literal["q", "p"], k: int, n: int) -> DiffOperator:
    """``Q(q_k) = x_k`` and ``Q(p_k) = -i hbar d/dx_k`` on polynomials in x1..xn."""
    space = ConfigurationSpace(n=n)
    if which == "q":
        return DiffOperator.multiplication(space, space.x(k))
    if which == "p":
        space.check_index(k)
        return DiffOperator.derivative(space, k - 1, -space.i_hbar)
    raise InputError(f"unknown coordinate kind {which!r}; expected 'q' or 'p'")


def schrodinger_quantize(f: PolyObservable) -> DiffOperator:
    """Schrodinger operator of an affine observable ``c + sum a_k q_k + b_k p_k``."""
    if f.total_degree() > 1:
        raise InputError(f"the Schrodinger picture quantizes affine observables only, got {f}")
    phase = f.space
    config = ConfigurationSpace(n=phase.n)
    operator = DiffOperator(config)
    for monom, coeff in f.poly.terms():
        degree = sum(monom)
        scalar = config.ring.ground_new(coeff)
        if degree == 0:
            operator = operator + DiffOperator.multiplication(config, scalar)
            continue
        position = monom.index(1)
        kind, k = ("q", position + 1) if position < phase.n else ("p", position - phase.n + 1)
        operator = operator + schrodinger_rep(kind, k, phase.n).scale(scalar)
    return operator


def schrodinger_residual(f: PolyObservable, g: PolyObservable) -> DiffOperator:
    """``[Q(f), Q(g)] + i hbar Q({f, g})`` in the Schrodinger picture."""
    config = ConfigurationSpace(n=f.space.n)
    bracket = commutator(schrodinger_quantize(f), schrodinger_quantize(g))
    return bracket + schrodinger_quantize(poisson(f, g)).scale(config.i_hbar)


class PolarizationCheck(NamedTuple):
    """Whether a section is holomorphic, with the first nonzero d/dzbar_k otherwise."""

    polarized: bool
    index: Optional[int] = None
    derivative: Optional[PolyElement] = None


def is_polarized(section: PolyElement, space: HolomorphicSpace) -> PolarizationCheck:
    """Flat Kahler polarization test: every d/dzbar_k must vanish."""
    if section.ring != space.ring:
        raise DimensionMismatchError(f"section does not live on {space!r}")
    for k, zbar in enumerate(space.antiholomorphic, start=1):
        derivative = section.diff(zbar)
        if derivative:
            return PolarizationCheck(polarized=False, index=k, derivative=derivative)
    return PolarizationCheck(polarized=True)


# -- generators and property sweeps ----------------------------------------------


def monomials(space: PhaseSpace, max_degree: int) -> list[PolyObservable]:
    """All coordinate monomials of total degree 0..max_degree, in graded order."""
    width = 2 * space.n
    out = []
    for degree in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(width), degree):
            exponents = [0] * width
            for position in combo:
                exponents[position] += 1
            out.append(PolyObservable(space, space.ring({tuple(exponents): 1})))
    return out


def random_observable(
    rng: np.random.Generator, space: PhaseSpace, degree: int, terms: int = 3
) -> PolyObservable:
    """Sum of ``terms`` random monomials of degree <= ``degree`` with small integer coefficients."""
    width = 2 * space.n
    poly = space.ring.zero
    for _ in range(terms):
        total = int(rng.integers(degree + 1))
        exponents = rng.multinomial(total, [1 / width] * width).tolist()
        coeff = int(rng.choice([-3, -2, -1, 1, 2, 3]))
        poly += space.ring({tuple(exponents): coeff})
    return PolyObservable(space, poly)


def _dirac_pairs(space: PhaseSpace, max_degree: int) -> Iterator[tuple[PolyObservable, ...]]:
    basis = monomials(space, max_degree)
    for f, g in itertools.combinations_with_replacement(basis, 2):
        if f.total_degree() + g.total_degree() <= max_degree:
            yield f, g


def check_dirac_sweep(n_max: int = 2, max_degree: int = 4) -> list[str]:
    """Dirac residual on every monomial pair with total degree <= max_degree, for n <= n_max."""
    failures = []
    checked = 0
    for n in range(1, n_max + 1):
        for f, g in _dirac_pairs(PhaseSpace(n=n), max_degree):
            residual = dirac_residual(f, g)
            if not residual.is_zero():
                failures.append(f"n={n} f={f} g={g}: residual {residual}")
            checked += 1
    logger.debug("dirac sweep: %d pairs, %d failures", checked, len(failures))
    return failures


def check_jacobi(
    rng: np.random.Generator, cases: int | None = None, n_max: int = 2, degree: int = 3
) -> list[str]:
    """Jacobi identity, antisymmetry and the Leibniz rule of the Poisson bracket."""
    cases = settings.fuzz_cases if cases is None else cases
    failures = []
    for case in range(cases):
        space = PhaseSpace(n=int(rng.integers(1, n_max + 1)))
        f, g, h = (random_observable(rng, space, degree) for _ in range(3))
        jacobi = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))
        if not jacobi.is_zero():
            failures.append(f"case {case}: Jacobi fails for {f}, {g}, {h}")
        if not (poisson(f, g) + poisson(g, f)).is_zero():
            failures.append(f"case {case}: antisymmetry fails for {f}, {g}")
        if poisson(f, g * h) != poisson(f, g) * h + g * poisson(f, h):
            failures.append(f"case {case}: Leibniz fails for {f}, {g}, {h}")
    return failures


def check_vector_field_homomorphism(
    rng: np.random.Generator, cases: int | None = None, n_max: int = 2, degree: int = 3
) -> list[str]:
    """``X_{f,g} = [X_f, X_g]`` on random pairs."""
    cases = settings.fuzz_cases if cases is None else cases
    failures = []
    for case in range(cases):
        space = PhaseSpace(n=int(rng.integers(1, n_max + 1)))
        f, g = random_observable(rng, space, degree), random_observable(rng, space, degree)
        lhs = hamiltonian_vf(poisson(f, g))
        rhs = vector_field_bracket(hamiltonian_vf(f), hamiltonian_vf(g))
        if lhs != rhs:
            failures.append(f"case {case}: X of {{{f}, {g}}} != [X_f, X_g]")
    return failures


def check_normal_ordering(
    rng: np.random.Generator, cases: int | None = None, n_max: int = 2, degree: int = 3
) -> list[str]:
    """Composed operators act like applying their factors one after the other."""
    cases = settings.fuzz_cases if cases is None else cases
    failures = []
    for case in range(cases):
        space = PhaseSpace(n=int(rng.integers(1, n_max + 1)))
        f, g, h = (random_observable(rng, space, degree) for _ in range(3))
        first, second = prequant(f), prequant(g)
        lhs = apply_operator(compose(first, second), h.poly)
        rhs = apply_operator(first, apply_operator(second, h.poly))
        if lhs != rhs:
            failures.append(f"case {case}: Q({f}) o Q({g}) acts wrongly on {h}")
    return failures


def check_heisenberg(n: int) -> list[str]:
    """Schrodinger operators satisfy ``[Q(p_i), Q(q_j)] = -i hbar delta_ij``."""
    space = ConfigurationSpace(n=n)
    failures = []
    for i, j in itertools.product(range(1, n + 1), repeat=2):
        expected = DiffOperator.multiplication(space, -space.i_hbar if i == j else 0)
        zero = DiffOperator(space)
        if commutator(schrodinger_rep("p", i, n), schrodinger_rep("q", j, n)) != expected:
            failures.append(f"[Q(p{i}), Q(q{j})] != -i hbar delta")
        if commutator(schrodinger_rep("p", i, n), schrodinger_rep("p", j, n)) != zero:
            failures.append(f"[Q(p{i}), Q(p{j})] != 0")
        if commutator(schrodinger_rep("q", i, n), schrodinger_rep("q", j, n)) != zero:
            failures.append(f"[Q(q{i}), Q(q{j})] != 0")
    return failures
