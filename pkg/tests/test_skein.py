import pytest

from src.engine import skein
from src.engine.diagram import (
    BraidWord,
    LinkDiagram,
    braid_closure,
    braid_connected_sum,
    crossing_smooth,
    crossing_switch,
    mirror,
    parse_braid,
    parse_pd,
)
from src.engine.laurent import LaurentPoly
from src.shared.config import settings
from src.shared.errors import (
    CrossingIndexError,
    DiagramValidityError,
    InputError,
    StateSumLimitError,
)


def test_trefoil_bracket(trefoil):
    bracket = skein.kauffman_bracket(trefoil)
    assert bracket == LaurentPoly({-7: 1, -3: -1, 5: -1}, var="A")
    assert str(bracket) == "-A^5 - A^-3 + A^-7"


def test_trefoil_jones(trefoil):
    polynomial = skein.jones(trefoil)
    assert str(polynomial) == "-s^8 + s^6 + s^2"
    assert polynomial.components == 1
    assert polynomial.check_parity()


def test_golden_pd_trefoil_agrees_with_closure(trefoil):
    assert skein.jones(parse_pd(skein.GOLDEN_PD["trefoil"])) == skein.jones(trefoil)


@pytest.mark.parametrize(
    "braid, expected",
    [
        ("B1", "1"),
        ("B2", "-s - s^-1"),
        ("B2 1 1", "-s^5 - s"),
        ("B3 1 -2 1 -2", "s^4 - s^2 + 1 - s^-2 + s^-4"),
    ],
)
def test_jones_of_small_closures(braid, expected):
    polynomial = skein.jones(braid_closure(parse_braid(braid)))
    assert str(polynomial) == expected
    assert polynomial.check_parity()


@pytest.mark.parametrize("name", ["positive-kink", "negative-kink"])
def test_kinks_are_unknots(name):
    assert skein.jones(parse_pd(skein.GOLDEN_PD[name])).poly == 1


def test_figure_eight_is_amphichiral(figure_eight):
    assert skein.jones(mirror(figure_eight)) == skein.jones(figure_eight)


def test_mirror_inverts_the_variable(trefoil):
    assert str(skein.jones(mirror(trefoil))) == "s^-2 + s^-6 - s^-8"


def test_jones_is_multiplicative_under_connected_sum():
    first = parse_braid("B2 1 1 1")
    second = parse_braid("B3 1 -2 1 -2")
    total = skein.jones(braid_closure(braid_connected_sum(first, second))).poly
    assert total == (
        skein.jones(braid_closure(first)).poly * skein.jones(braid_closure(second)).poly
    )


def test_empty_diagram_has_no_bracket():
    with pytest.raises(DiagramValidityError):
        skein.kauffman_bracket(LinkDiagram())


def test_state_sum_limit(monkeypatch, trefoil):
    monkeypatch.setattr(settings, "max_state_sum_crossings", 2)
    with pytest.raises(StateSumLimitError):
        skein.kauffman_bracket(trefoil)


def test_skein_triple_orders_by_sign(trefoil):
    negative = mirror(trefoil)
    plus, minus, zero = skein.skein_triple(negative, 0)
    assert minus == negative
    assert plus.signs[0] == 1
    assert zero.crossing_count == 2
    with pytest.raises(CrossingIndexError):
        skein.skein_triple(negative, 3)


def test_skein_residual_vanishes_on_golden_diagrams(trefoil, hopf, figure_eight):
    diagrams = [trefoil, hopf, figure_eight]
    diagrams += [parse_pd(text) for text in skein.GOLDEN_PD.values()]
    for diagram in diagrams:
        for index in range(diagram.crossing_count):
            assert skein.skein_residual(diagram, index).is_zero()


def test_skein_corpus_of_short_braids():
    assert skein.check_skein_corpus(skein.closure_corpus(3, 3)) == []


def test_skein_relation_at_roots_of_unity(trefoil, figure_eight):
    assert skein.check_skein_corpus([trefoil, figure_eight], levels=range(1, 6)) == []


def test_jones_at_level_one(trefoil):
    assert skein.jones_at_level(trefoil, 1) == pytest.approx((1.0, 0.0), abs=1e-12)


def test_jones_at_level_rejects_bad_level(trefoil):
    with pytest.raises(ValueError):
        skein.jones_at_level(trefoil, 0)


def test_mirror_and_markov_checks():
    braids = list(skein.braid_corpus(3, 2))
    assert skein.check_mirror(braid_closure(b) for b in braids) == []
    assert skein.check_markov(braids) == []


def test_braid_corpus_size():
    # 1 strand: the empty word; 2 strands: 1 + 2 + 4; 3 strands: 1 + 4 + 16
    assert len(list(skein.braid_corpus(3, 2))) == 1 + 7 + 21


def test_braid_relation_check():
    braids = list(skein.braid_corpus(3, 2))
    assert skein.check_braid_relation(braids) == []
    assert skein.check_braid_relation([parse_braid("B2 1")]) == []


@pytest.mark.parametrize("strands, size", [(1, 1), (2, 2), (3, 5), (4, 14)])
def test_temperley_lieb_basis_is_catalan(strands, size):
    assert skein._temperley_lieb(strands).size == size


def test_closure_table_matches_state_sum():
    for strands in (1, 2, 3):
        table = skein.closure_table(strands, 4)
        for letters in table.words:
            closure = braid_closure(BraidWord(strand_count=strands, letters=letters))
            assert table.jones(letters) == skein.jones(closure).poly, letters


def test_closure_table_golden_words():
    table = skein.closure_table(3, 4)
    assert str(table.jones((1, -2, 1, -2))) == "s^4 - s^2 + 1 - s^-2 + s^-4"
    assert str(table.jones(())) == "s^2 + 2 + s^-2"
    assert str(skein.closure_table(2, 4).jones((1, 1, 1))) == "-s^8 + s^6 + s^2"
    assert len(table) == 1 + 4 + 16 + 64 + 256
    with pytest.raises(InputError):
        table.jones((1, 1, 1, 1, 1))


def test_letter_surgery_matches_crossing_surgery():
    table = skein.closure_table(3, 4)
    for letters in table.words:
        closure = braid_closure(BraidWord(strand_count=3, letters=letters))
        for index, letter in enumerate(letters):
            switched = letters[:index] + (-letter,) + letters[index + 1 :]
            removed = letters[:index] + letters[index + 1 :]
            assert table.jones(switched) == skein.jones(crossing_switch(closure, index)).poly
            assert table.jones(removed) == skein.jones(crossing_smooth(closure, index)).poly


def test_closure_corpus_of_short_words():
    results = skein.check_closure_corpus(3, 5, levels=range(1, 5))
    assert sorted(results) == [
        "braid-relation",
        "mirror",
        "parity",
        "skein-exact",
        "skein-root-of-unity",
    ]
    assert all(lines == [] for lines in results.values())


@pytest.mark.slow
def test_closure_corpus_exhaustive():
    results = skein.check_closure_corpus(3, 8, levels=range(1, 11))
    assert results == {name: [] for name in results}


@pytest.mark.slow
def test_skein_corpus_exhaustive():
    corpus = list(skein.closure_corpus(3, 5))
    assert skein.check_skein_corpus(corpus, levels=range(1, 11)) == []
    assert skein.check_mirror(corpus) == []
