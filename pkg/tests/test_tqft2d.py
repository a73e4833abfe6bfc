import pytest
from pydantic import ValidationError
from sympy.polys.domains import QQ

from src.engine import tqft2d
from src.engine.fusion import FusionLevel, verlinde_dim
from src.engine.tqft2d import Cobordism, FrobeniusAlgebra, Generator
from src.shared.errors import AlgebraError, CompositionError, ParseError

Z2_MULT = [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]

GENUS_TWO_ALTERNATE = [
    "cap",
    "copants",
    ["copants", "identity"],
    ["identity", "pants"],
    "pants",
    "cup",
]


def test_generator_arities_and_reversal():
    assert (Generator.PANTS.inputs, Generator.PANTS.outputs) == (2, 1)
    assert Generator.CAP.reversed is Generator.CUP
    assert Generator.COPANTS.reversed is Generator.PANTS
    assert Generator.SWAP.reversed is Generator.SWAP


def test_word_round_trip():
    cobordism = Cobordism.from_word(GENUS_TWO_ALTERNATE)
    assert cobordism.source == 0
    assert cobordism.target == 0
    assert cobordism.to_word() == GENUS_TWO_ALTERNATE
    assert cobordism.euler_characteristic() == -2


def test_arity_mismatch_is_rejected():
    with pytest.raises(CompositionError):
        Cobordism.from_word(["pants"], source=1)
    with pytest.raises(CompositionError):
        Cobordism.from_word(["cap", "pants"])


def test_unknown_generator():
    with pytest.raises(ParseError):
        Cobordism.from_word(["cap", "torus"])


def test_empty_word_is_the_empty_identity():
    empty = Cobordism.from_word([])
    assert (empty.source, empty.target) == (0, 0)
    assert Cobordism.identity(2).target == 2


def test_genus_word_shape():
    assert tqft2d.genus_word(2).to_word() == [
        "cap",
        "copants",
        "pants",
        "copants",
        "pants",
        "cup",
    ]
    for genus in range(4):
        assert tqft2d.genus_word(genus).euler_characteristic() == 2 - 2 * genus
    with pytest.raises(ValueError):
        tqft2d.genus_word(-1)


def test_reverse_of_a_closed_surface_is_itself():
    assert tqft2d.reverse(tqft2d.genus_word(2)) == tqft2d.genus_word(2)
    assert tqft2d.reverse(Cobordism.from_word(["cap", "copants"])).to_word() == ["pants", "cup"]


def test_compose_and_parallel():
    cap = Cobordism.from_word(["cap"])
    cup = Cobordism.from_word(["cup"])
    assert tqft2d.compose(cap, cup).to_word() == ["cap", "cup"]
    with pytest.raises(CompositionError):
        tqft2d.compose(cup, cup)

    both = tqft2d.parallel(Cobordism.from_word(["cap", "copants"]), cap)
    assert both.to_word() == [["cap", "cap"], ["copants", "identity"]]
    assert (both.source, both.target) == (0, 3)


def test_z2_closed_surfaces(z2):
    for genus in range(5):
        assert tqft2d.closed_surface(z2, genus) == 2**genus


def test_z2_handle_element(z2):
    assert list(tqft2d.handle_element(z2)) == [2, 0]


def test_z2_document(z2):
    assert z2.to_document() == {
        "dim": 2,
        "mult": [[["1", "0"], ["0", "1"]], [["0", "1"], ["1", "0"]]],
        "unit": ["1", "0"],
        "pairing": [["1", "0"], ["0", "1"]],
    }


def test_swap_is_a_permutation(z2):
    swap = tqft2d.evaluate(z2, Cobordism.from_word(["swap"]))
    assert swap.to_strings() == [
        ["1", "0", "0", "0"],
        ["0", "0", "1", "0"],
        ["0", "1", "0", "0"],
        ["0", "0", "0", "1"],
    ]


def test_rescaled_pairing_changes_the_sphere_only():
    algebra = tqft2d.algebra_from_mapping(
        {"dim": 2, "mult": Z2_MULT, "unit": [1, 0], "pairing": [["1/2", 0], [0, "1/2"]]}
    ).require_valid()
    sphere = tqft2d.evaluate(algebra, tqft2d.genus_word(0))
    assert sphere.to_strings() == [["1/2"]]
    assert tqft2d.closed_surface(algebra, 1) == 2


def test_degenerate_pairing_is_reported():
    algebra = FrobeniusAlgebra(Z2_MULT, [1, 0], [[1, 0], [0, 0]])
    report = tqft2d.validate_frobenius(algebra)
    assert not report.valid
    assert "pairing is degenerate" in report.violations
    with pytest.raises(AlgebraError):
        algebra.require_valid()
    with pytest.raises(AlgebraError):
        algebra.inverse_pairing


def test_wrong_unit_is_reported():
    report = tqft2d.validate_frobenius(FrobeniusAlgebra(Z2_MULT, [0, 1], [[1, 0], [0, 1]]))
    assert "unit: 1 * e_j != e_j" in report.violations


def test_inconsistent_shapes():
    with pytest.raises(ValueError):
        FrobeniusAlgebra(Z2_MULT, [1, 0, 0], [[1, 0], [0, 1]])
    with pytest.raises(ValidationError):
        tqft2d.algebra_from_mapping(
            {"dim": 2, "mult": Z2_MULT, "unit": [1], "pairing": [[1, 0], [0, 1]]}
        )


def test_bad_rational_text():
    with pytest.raises(ParseError):
        FrobeniusAlgebra(Z2_MULT, ["one", 0], [[1, 0], [0, 1]])


def test_verlinde_algebra_is_frobenius(verlinde_algebra):
    assert tqft2d.validate_frobenius(verlinde_algebra).valid


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_closed_surfaces_match_verlinde(k):
    level = FusionLevel(k=k)
    algebra = tqft2d.frobenius_from_fusion(level)
    for genus in range(4):
        assert tqft2d.closed_surface(algebra, genus) == verlinde_dim(level, genus)


def test_alternate_genus_two_word(verlinde_algebra, z2):
    alternate = Cobordism.from_word(GENUS_TWO_ALTERNATE)
    for algebra in (verlinde_algebra, z2):
        assert tqft2d.evaluate(algebra, alternate).scalar() == tqft2d.closed_surface(algebra, 2)


def test_scalar_of_an_open_map(z2):
    state_map = tqft2d.evaluate(z2, Cobordism.from_word(["cap"]))
    assert not state_map.is_closed()
    with pytest.raises(CompositionError):
        state_map.scalar()


def test_glue_pair_closes_the_sphere(z2):
    cap = Cobordism.from_word(["cap"])
    cup = Cobordism.from_word(["cup"])
    assert tqft2d.glue_pair(z2, cap, cup) == QQ(1)
    with pytest.raises(CompositionError):
        tqft2d.glue_pair(z2, cap, cap)


def test_dual_of_cap_is_cup(verlinde_algebra):
    cap = tqft2d.evaluate(verlinde_algebra, Cobordism.from_word(["cap"]))
    cup = tqft2d.evaluate(verlinde_algebra, Cobordism.from_word(["cup"]))
    assert tqft2d.dual_map(verlinde_algebra, cap) == cup


def test_cobordism_from_json():
    assert tqft2d.cobordism_from_json(["cap", "cup"]) == Cobordism.from_word(["cap", "cup"])
    opened = tqft2d.cobordism_from_json({"source": 1, "word": ["cup"]})
    assert (opened.source, opened.target) == (1, 0)


def test_random_cobordisms_respect_the_width_bound(rng):
    for _ in range(20):
        cobordism = tqft2d.random_cobordism(rng, 2, depth=5, max_width=3)
        assert cobordism.source == 2
        assert len(cobordism.layers) == 5
        for layer in cobordism.layers:
            assert sum(g.outputs for g in layer) <= 3
    with pytest.raises(CompositionError):
        tqft2d.random_cobordism(rng, 4, max_width=3)


def test_axioms_hold_on_random_cobordisms(verlinde_algebra, rng):
    assert tqft2d.check_axioms(verlinde_algebra, rng, cases=5, max_width=2) == []


def test_axioms_hold_for_z2(z2, rng):
    assert tqft2d.check_axioms(z2, rng, cases=10) == []


@pytest.mark.slow
def test_axioms_full_sweep_z2(z2, rng):
    assert tqft2d.check_axioms(z2, rng, cases=200) == []


@pytest.mark.slow
def test_axioms_full_sweep_verlinde(verlinde_algebra, rng):
    assert tqft2d.check_axioms(verlinde_algebra, rng, cases=200) == []


def test_handle_powers_give_closed_surfaces(z2, verlinde_algebra):
    assert tqft2d.check_handle_powers(z2, max_genus=4) == []
    assert tqft2d.check_handle_powers(verlinde_algebra) == []


def test_perturbed_multiplication_breaks_associativity():
    broken = [[[2, 0], [0, 1]], [[0, 1], [1, 0]]]
    report = tqft2d.validate_frobenius(FrobeniusAlgebra(broken, [1, 0], [[1, 0], [0, 1]]))
    assert not report.valid
    assert any(v.startswith("associativity") for v in report.violations)


def test_glue_torus_halves(z2):
    left = Cobordism.from_word(["cap", "copants"])
    right = Cobordism.from_word(["pants", "cup"])
    assert tqft2d.glue_pair(z2, left, right) == 2
