import pytest
from sympy.polys.domains import QQ, QQ_I, ZZ

from src.engine.laurent import LaurentPoly, domain_by_name
from src.shared.errors import ParityError, ParseError, VariableMismatchError


def s(exponent, coeff=1):
    return LaurentPoly.monomial(exponent, coeff)


def test_zero_coefficients_are_dropped():
    poly = LaurentPoly({1: 0, 2: 3, -4: 0})
    assert poly.terms == {2: 3}
    assert LaurentPoly({0: 0}).is_zero()


def test_arithmetic_is_exact():
    square = (s(1) + s(-1)) ** 2
    assert square == LaurentPoly({2: 1, 0: 2, -2: 1})
    assert square - square == 0
    assert s(3) * s(-3) == 1
    assert -s(2) + 5 == LaurentPoly({2: -1, 0: 5})


def test_degree_and_valuation():
    poly = LaurentPoly({-3: 1, 4: 2})
    assert poly.degree() == 4
    assert poly.valuation() == -3
    assert poly.coefficient(4) == 2
    assert poly.coefficient(0) == 0


def test_mixed_variables_are_rejected():
    with pytest.raises(VariableMismatchError):
        LaurentPoly.monomial(1, var="A") + s(1)


def test_domains_unify():
    half = LaurentPoly.monomial(1, QQ(1, 2), domain=QQ)
    total = half + s(1)
    assert total.domain == QQ
    assert total.coefficient(1) == QQ(3, 2)


def test_negative_powers_of_monomials():
    assert s(2) ** -1 == s(-2)
    assert LaurentPoly.monomial(1, 2, domain=QQ) ** -1 == LaurentPoly.monomial(
        -1, QQ(1, 2), domain=QQ
    )
    with pytest.raises(ValueError):
        s(1, 2) ** -1
    with pytest.raises(ValueError):
        (s(1) + 1) ** -1


def test_invert_var():
    assert LaurentPoly({3: 2, -1: -1}).invert_var() == LaurentPoly({-3: 2, 1: -1})


def test_reindex_even_maps_a_squared_to_s_inverse():
    poly = LaurentPoly({4: 1, -2: -1}, var="A")
    assert poly.reindex_even("s") == LaurentPoly({-2: 1, 1: -1})


def test_reindex_even_rejects_odd_exponents():
    with pytest.raises(ParityError):
        LaurentPoly({3: 1}, var="A").reindex_even("s")


def test_evaluate_at_root_of_unity():
    re_part, im_part = s(1).evaluate_at_root_of_unity(1, 4)
    assert re_part == pytest.approx(0.0, abs=1e-12)
    assert im_part == pytest.approx(1.0)
    # s^8 at the 8th root of unity reduces exactly to 1
    assert s(8).evaluate_at_root_of_unity(1, 8) == pytest.approx((1.0, 0.0))


def test_text_form():
    assert str(LaurentPoly({8: -1, 6: 1, 2: 1})) == "-s^8 + s^6 + s^2"
    assert str(LaurentPoly({1: -1, -1: -1})) == "-s - s^-1"
    assert str(LaurentPoly({3: 2, 0: -1})) == "2*s^3 - 1"
    assert str(LaurentPoly.zero()) == "0"


def test_parse_inverts_text_form():
    poly = LaurentPoly({-4: 1, -2: -1, 0: 1, 2: -1, 4: 1})
    assert LaurentPoly.parse(str(poly)) == poly
    assert LaurentPoly.parse("s^-1 + 2") == LaurentPoly({-1: 1, 0: 2})


@pytest.mark.parametrize("text", ["s^(1/2)", "s + t", "s +* 2"])
def test_parse_rejects_bad_text(text):
    with pytest.raises(ParseError):
        LaurentPoly.parse(text)


def test_document_form():
    poly = LaurentPoly({-1: 3, 2: -1})
    document = poly.to_document()
    assert document == {"var": "s", "ring": "ZZ", "terms": [[-1, "3"], [2, "-1"]]}
    assert LaurentPoly.from_document(document) == poly


def test_domain_lookup():
    assert domain_by_name("ZZ") == ZZ
    with pytest.raises(ParseError):
        domain_by_name("RR")


def random_poly(rng, domain):
    terms = {}
    for _ in range(int(rng.integers(0, 4))):
        exponent = int(rng.integers(-4, 5))
        a, b = (int(x) for x in rng.integers(-5, 6, size=2))
        if domain == QQ_I:
            terms[exponent] = QQ_I(a, b)
        elif domain == QQ:
            terms[exponent] = QQ(a, int(rng.integers(1, 4)))
        else:
            terms[exponent] = a
    return LaurentPoly(terms, domain=domain)


def random_triples(rng, count=1000):
    domains = [ZZ, QQ, QQ_I]
    for _ in range(count):
        domain = domains[int(rng.integers(len(domains)))]
        yield tuple(random_poly(rng, domain) for _ in range(3))


def test_ring_axioms_on_random_triples(rng):
    for f, g, h in random_triples(rng):
        one = LaurentPoly.constant(1, domain=f.domain)
        assert (f + g) + h == f + (g + h)
        assert (f * g) * h == f * (g * h)
        assert f + g == g + f
        assert f * g == g * f
        assert f * (g + h) == f * g + f * h
        assert f + 0 == f
        assert f * one == f
        assert (f - f).is_zero()


def test_root_of_unity_evaluation_is_multiplicative(rng):
    for f, g, _ in random_triples(rng):
        denominator = int(rng.integers(1, 13))
        numerator = int(rng.integers(0, denominator))
        product = complex(*(f * g).evaluate_at_root_of_unity(numerator, denominator))
        first = complex(*f.evaluate_at_root_of_unity(numerator, denominator))
        second = complex(*g.evaluate_at_root_of_unity(numerator, denominator))
        assert product == pytest.approx(first * second, abs=1e-9)


def test_text_round_trip_on_random_polynomials(rng):
    for f, _, _ in random_triples(rng):
        assert LaurentPoly.parse(str(f), domain=f.domain) == f
