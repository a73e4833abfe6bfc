"""Exact sparse Laurent polynomials in one formal variable.

Coefficients are elements of a sympy ground domain (``ZZ``, ``QQ`` or
``QQ_I``). The exponent map never stores a zero coefficient, so two equal
polynomials always have identical term dictionaries.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from typing import Any

import numpy as np
from sympy import I, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import QQ, QQ_I, ZZ
from sympy.polys.domains.domain import Domain
from sympy.polys.polyerrors import NotReversible

from src.shared.errors import ParityError, ParseError, VariableMismatchError

DOMAINS: dict[str, Domain] = {"ZZ": ZZ, "QQ": QQ, "QQ_I": QQ_I}

_TRANSFORMATIONS = standard_transformations + (convert_xor,)


def domain_by_name(name: str) -> Domain:
    """Look up a coefficient domain by its sympy name."""
    try:
        return DOMAINS[name]
    except KeyError:
        raise ParseError(f"unknown coefficient ring {name!r}; expected one of {sorted(DOMAINS)}")


class LaurentPoly:
    """Immutable Laurent polynomial ``sum(c_e * var**e)``."""

    __slots__ = ("_terms", "_var", "_domain")

    def __init__(
        self,
        terms: Mapping[int, Any] | None = None,
        var: str = "s",
        domain: Domain = ZZ,
    ):
        clean: dict[int, Any] = {}
        for exponent, coeff in (terms or {}).items():
            value = domain.convert(coeff)
            if not domain.is_zero(value):
                clean[int(exponent)] = value
        self._terms = clean
        self._var = var
        self._domain = domain

    @classmethod
    def _canonical(cls, terms: dict[int, Any], var: str, domain: Domain) -> LaurentPoly:
        poly = cls.__new__(cls)
        poly._terms = {e: c for e, c in terms.items() if not domain.is_zero(c)}
        poly._var = var
        poly._domain = domain
        return poly

    @classmethod
    def monomial(
        cls, exponent: int, coeff: Any = 1, var: str = "s", domain: Domain = ZZ
    ) -> LaurentPoly:
        return cls({exponent: coeff}, var=var, domain=domain)

    @classmethod
    def constant(cls, coeff: Any, var: str = "s", domain: Domain = ZZ) -> LaurentPoly:
        return cls({0: coeff}, var=var, domain=domain)

    @classmethod
    def zero(cls, var: str = "s", domain: Domain = ZZ) -> LaurentPoly:
        return cls({}, var=var, domain=domain)

    # -- accessors ---------------------------------------------------------

    @property
    def var(self) -> str:
        return self._var

    @property
    def domain(self) -> Domain:
        return self._domain

    @property
    def terms(self) -> dict[int, Any]:
        """Copy of the exponent map."""
        return dict(self._terms)

    def items(self) -> list[tuple[int, Any]]:
        """Terms sorted by ascending exponent."""
        return sorted(self._terms.items())

    def exponents(self) -> list[int]:
        return sorted(self._terms)

    def coefficient(self, exponent: int) -> Any:
        return self._terms.get(exponent, self._domain.zero)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> float:
        return max(self._terms) if self._terms else -math.inf

    def valuation(self) -> float:
        return min(self._terms) if self._terms else math.inf

    # -- arithmetic --------------------------------------------------------

    def _unify(self, other: LaurentPoly) -> tuple[Domain, dict[int, Any], dict[int, Any]]:
        if self._var != other._var:
            raise VariableMismatchError(
                f"cannot combine polynomials in {self._var!r} and {other._var!r}"
            )
        if self._domain == other._domain:
            return self._domain, self._terms, other._terms
        domain = self._domain.unify(other._domain)
        left = {e: domain.convert_from(c, self._domain) for e, c in self._terms.items()}
        right = {e: domain.convert_from(c, other._domain) for e, c in other._terms.items()}
        return domain, left, right

    def _coerce(self, other: Any) -> LaurentPoly | None:
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(other, var=self._var, domain=self._domain)
        return None

    def __add__(self, other: Any) -> LaurentPoly:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        domain, left, right = self._unify(other)
        out = dict(left)
        for e, c in right.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly._canonical(out, self._var, domain)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._canonical(
            {e: -c for e, c in self._terms.items()}, self._var, self._domain
        )

    def __sub__(self, other: Any) -> LaurentPoly:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> LaurentPoly:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Any) -> LaurentPoly:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        domain, left, right = self._unify(other)
        out: dict[int, Any] = {}
        for e1, c1 in left.items():
            for e2, c2 in right.items():
                e = e1 + e2
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPoly._canonical(out, self._var, domain)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            ((e, c),) = self._terms.items()
            try:
                inverse_coeff = self._domain.revert(c)
            except NotReversible as exc:
                raise ValueError(f"coefficient {c} is not a unit in {self._domain}") from exc
            inverse = LaurentPoly._canonical({-e: inverse_coeff}, self._var, self._domain)
            return inverse ** (-n)
        result = LaurentPoly.constant(1, var=self._var, domain=self._domain)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(other, var=self._var, domain=self._domain)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._var == other._var and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._var, tuple(sorted(self._terms))))

    # -- substitutions -----------------------------------------------------

    def invert_var(self) -> LaurentPoly:
        """Substitute ``v -> v**-1``."""
        return LaurentPoly._canonical(
            {-e: c for e, c in self._terms.items()}, self._var, self._domain
        )

    def reindex_even(self, new_var: str) -> LaurentPoly:
        """Map ``old**(2m)`` to ``new**(-m)``; with ``new = old**-2`` this is A -> s."""
        odd = [e for e in self._terms if e % 2]
        if odd:
            raise ParityError(
                f"cannot reindex {self._var!r} polynomial with odd exponents {sorted(odd)}"
            )
        return LaurentPoly._canonical(
            {-(e // 2): c for e, c in self._terms.items()}, new_var, self._domain
        )

    def evaluate_at_root_of_unity(self, numerator: int, denominator: int) -> tuple[float, float]:
        """Evaluate at ``v = exp(2*pi*i*numerator/denominator)`` in double precision."""
        if denominator <= 0:
            raise ValueError("denominator must be positive")
        total = 0j
        for e, c in self._terms.items():
            # reduce the angle exactly before going to floating point
            turn = (numerator * e) % denominator
            total += complex(self._domain.to_sympy(c)) * np.exp(2j * np.pi * turn / denominator)
        return float(total.real), float(total.imag)

    # -- text and documents ------------------------------------------------

    def _format_coeff(self, c: Any) -> tuple[str, str]:
        """Return (sign, magnitude text) of a coefficient."""
        expr = self._domain.to_sympy(c)
        if expr.is_real and expr.is_negative:
            sign, expr = "-", -expr
        else:
            sign = "+"
        text = str(expr)
        if any(ch in text for ch in " /+*"):
            text = f"({text})"
        return sign, text

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for e, c in sorted(self._terms.items(), reverse=True):
            sign, mag = self._format_coeff(c)
            if e == 0:
                body = mag
            else:
                power = self._var if e == 1 else f"{self._var}^{e}"
                body = power if mag == "1" else f"{mag}*{power}"
            if not pieces:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f"{sign} {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r}, var={self._var!r}, domain={self._domain})"

    @classmethod
    def parse(cls, text: str, var: str = "s", domain: Domain = ZZ) -> LaurentPoly:
        """Inverse of ``str``: read ``-s^8 + s^6 + s^2`` style text."""
        symbol = Symbol(var)
        try:
            expr = parse_expr(
                text,
                local_dict={var: symbol, "I": I},
                transformations=_TRANSFORMATIONS,
            ).expand()
        except Exception as exc:  # sympy raises a wide range of errors on bad input
            raise ParseError(f"cannot parse Laurent polynomial {text!r}: {exc}") from exc
        if expr.free_symbols - {symbol}:
            raise ParseError(f"unexpected symbols {expr.free_symbols - {symbol}} in {text!r}")
        terms: dict[int, Any] = {}
        for monomial, coeff in expr.as_coefficients_dict().items():
            c, exponent = monomial.as_coeff_exponent(symbol)
            if not exponent.is_Integer:
                raise ParseError(f"non-integer exponent {exponent} in {text!r}")
            try:
                value = domain.from_sympy(coeff * c)
            except Exception as exc:
                raise ParseError(f"coefficient {coeff * c} is not in {domain}") from exc
            terms[int(exponent)] = terms.get(int(exponent), domain.zero) + value
        return cls(terms, var=var, domain=domain)

    def to_document(self) -> dict[str, Any]:
        """JSON term-list form, sorted by ascending exponent."""
        return {
            "var": self._var,
            "ring": str(self._domain),
            "terms": [[e, str(self._domain.to_sympy(c))] for e, c in self.items()],
        }

    @classmethod
    def from_document(cls, document: Mapping[str, Any]) -> LaurentPoly:
        domain = domain_by_name(document.get("ring", "ZZ"))
        var = document["var"]
        terms: dict[int, Any] = {}
        for exponent, text in document["terms"]:
            parsed = cls.parse(str(text), var=var, domain=domain)
            if parsed.exponents() not in ([], [0]):
                raise ParseError(f"coefficient {text!r} is not a constant")
            terms[int(exponent)] = parsed.coefficient(0)
        return cls(terms, var=var, domain=domain)
