import json

import pytest
from click.testing import CliRunner

from src.cli.main import cli
from src.engine.skein import GOLDEN_PD
from src.shared.config import settings

TORUS_WORD = '["cap", "copants", "pants", "cup"]'


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args))


def test_jones_of_the_trefoil(runner):
    result = invoke(runner, "jones", "--braid", "B2 1 1 1")
    assert result.exit_code == 0
    assert result.output == "-s^8 + s^6 + s^2\n"


def test_jones_from_pd(runner):
    result = invoke(runner, "jones", "--pd", GOLDEN_PD["hopf"])
    assert result.exit_code == 0
    assert result.output.strip() == "-s^5 - s"


def test_jones_at_a_level(runner):
    result = invoke(runner, "jones", "--braid", "B2 1 1 1", "--level", "1")
    assert result.exit_code == 0
    assert "at k=1: 1.000000000000 +0.000000000000i" in result.output


def test_jones_json_is_deterministic(runner):
    first = invoke(runner, "jones", "--braid", "B3 1 -2 1 -2", "--json")
    second = invoke(runner, "jones", "--braid", "B3 1 -2 1 -2", "--json")
    assert first.exit_code == 0
    assert first.output == second.output
    document = json.loads(first.output)
    assert document["polynomial"] == "s^4 - s^2 + 1 - s^-2 + s^-4"
    assert document["components"] == 1
    assert document["writhe"] == 0
    assert document["terms"]["terms"][0] == [-4, "1"]


@pytest.mark.parametrize(
    "args",
    [
        ["jones"],
        ["jones", "--braid", "B2 5"],
        ["jones", "--braid", "B2 1", "--pd", "X(1,2,2,1)"],
        ["jones", "--pd", "X(1,2,3"],
        ["jones", "--braid", "B2 1", "--level", "0"],
    ],
)
def test_usage_errors_exit_2(runner, args):
    assert invoke(runner, *args).exit_code == 2


def test_empty_diagram_is_a_domain_error(runner):
    result = invoke(runner, "jones", "--pd", "")
    assert result.exit_code == 1


def test_bracket(runner):
    result = invoke(runner, "bracket", "--braid", "B2 1 1 1")
    assert result.exit_code == 0
    assert result.output.strip() == "-A^5 - A^-3 + A^-7"


def test_skein_check_passes(runner):
    result = invoke(runner, "skein-check", "--braid", "B3 1 -2 1 -2", "--level", "3")
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[:4] == [f"crossing {i}: 0" for i in range(4)]
    assert lines[-1] == "ok"


def test_parse_echo(runner):
    result = invoke(runner, "parse", "--pd", GOLDEN_PD["hopf"])
    assert result.exit_code == 0
    assert result.output.splitlines() == [
        "X(1,4,2,3) X(3,2,4,1)",
        "signs: + +",
        "components: 2",
        "free loops: 0",
        "writhe: 2",
        "linking number: 1",
    ]


def test_parse_empty_braid(runner):
    result = invoke(runner, "parse", "--braid", "B2", "--json")
    document = json.loads(result.output)
    assert document["free_loops"] == 2
    assert document["input"] == "B2"


def test_fusion_dim(runner):
    result = invoke(runner, "fusion-dim", "--level", "3", "--marked", "1,1,1,1")
    assert result.exit_code == 0
    assert result.output.strip() == "2"


def test_fusion_dim_json(runner):
    result = invoke(runner, "fusion-dim", "--level", "2", "--marked", "1,1", "--json")
    document = json.loads(result.output)
    assert document["dim"] == 1
    assert document["method"] == "paths"
    assert document["verlinde"] == 1
    assert document["quantum_dimensions"] == [pytest.approx(2**0.5)] * 2


@pytest.mark.parametrize("marked", ["1,x", "1,7"])
def test_fusion_dim_bad_labels(runner, marked):
    result = invoke(runner, "fusion-dim", "--level", "3", "--marked", marked)
    assert result.exit_code == 2


def test_verlinde(runner):
    result = invoke(runner, "verlinde", "--level", "2", "--genus", "1")
    assert result.exit_code == 0
    assert result.output.strip() == "3"
    marked = invoke(runner, "verlinde", "--level", "2", "--marked", "1,1,1,1")
    assert marked.output.strip() == "2"


def test_tqft_builtin_torus(runner):
    result = invoke(runner, "tqft-eval", "--builtin", "z2", "--genus", "1")
    assert result.exit_code == 0
    assert result.output.strip() == "2"


def test_tqft_verlinde_word(runner):
    result = invoke(runner, "tqft-eval", "--level", "2", "--word", TORUS_WORD)
    assert result.exit_code == 0
    assert result.output.strip() == "3"


def test_tqft_open_cobordism_from_file(runner, tmp_path):
    path = tmp_path / "cup.json"
    path.write_text(json.dumps({"source": 1, "word": ["cup"]}))
    result = invoke(runner, "tqft-eval", "--builtin", "z2", "--cobordism", str(path), "--json")
    assert result.exit_code == 0
    document = json.loads(result.output)
    assert document["matrix"] == [["1", "0"]]
    assert document["scalar"] is None
    assert document["euler_characteristic"] == 1


def test_tqft_algebra_from_file(runner, tmp_path):
    path = tmp_path / "algebra.json"
    path.write_text(
        json.dumps(
            {
                "dim": 2,
                "mult": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
                "unit": [1, 0],
                "pairing": [["1/2", 0], [0, "1/2"]],
            }
        )
    )
    result = invoke(runner, "tqft-eval", "--algebra", str(path), "--genus", "0")
    assert result.exit_code == 0
    assert result.output.strip() == "1/2"


def test_tqft_degenerate_algebra_is_a_domain_error(runner, tmp_path):
    path = tmp_path / "algebra.json"
    path.write_text(
        json.dumps(
            {
                "dim": 2,
                "mult": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
                "unit": [1, 0],
                "pairing": [[1, 0], [0, 0]],
            }
        )
    )
    result = invoke(runner, "tqft-eval", "--algebra", str(path), "--genus", "1")
    assert result.exit_code == 1


@pytest.mark.parametrize(
    "args",
    [
        ["tqft-eval", "--genus", "1"],
        ["tqft-eval", "--builtin", "z2"],
        ["tqft-eval", "--builtin", "z2", "--word", "[cap"],
        ["tqft-eval", "--builtin", "z2", "--word", '["cap", "torus"]'],
    ],
)
def test_tqft_usage_errors(runner, args):
    assert invoke(runner, *args).exit_code == 2


def test_tqft_arity_mismatch_is_a_domain_error(runner):
    result = invoke(runner, "tqft-eval", "--builtin", "z2", "--word", '["cap", "pants"]')
    assert result.exit_code == 1


def test_gq_check_canonical_pair(runner):
    result = invoke(runner, "gq-check", "--f", "q1", "--g", "p1")
    assert result.exit_code == 0
    assert result.output.strip() == "0"


def test_gq_check_infers_degrees_of_freedom(runner):
    result = invoke(runner, "gq-check", "--f", "q2^2*p1", "--g", "p2", "--json")
    assert result.exit_code == 0
    assert json.loads(result.output)["is_zero"] is True


def test_gq_check_schrodinger(runner):
    ok = invoke(runner, "gq-check", "--f", "q1", "--g", "p1", "--rep", "schrodinger")
    assert ok.exit_code == 0
    nonlinear = invoke(runner, "gq-check", "--f", "q1^2", "--g", "p1", "--rep", "schrodinger")
    assert nonlinear.exit_code == 2


def test_verify_skein(runner, monkeypatch):
    monkeypatch.setattr(settings, "skein_corpus_letters", 4)
    result = invoke(runner, "verify", "skein", "--cases", "5")
    assert result.exit_code == 0
    assert result.output.startswith("skein (seed 1729, 5 cases): 10 properties, 0 failures")


def test_verify_rejects_unknown_suite(runner):
    assert invoke(runner, "verify", "everything").exit_code == 2


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["fusion", "tqft", "gq"])
def test_verify_suites(runner, suite):
    result = invoke(runner, "verify", suite, "--cases", "3", "--json")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["failures"] == []
    assert report["seed"] == 1729


def test_parse_knot_has_no_linking_number(runner):
    result = invoke(runner, "parse", "--braid", "B2 1 1 1", "--json")
    assert result.exit_code == 0
    assert json.loads(result.output)["linking_number"] is None
    text = invoke(runner, "parse", "--braid", "B2 1 1 1")
    assert "linking number" not in text.output


def test_parse_output_feeds_back_into_jones(runner):
    echo = invoke(runner, "parse", "--braid", "B2 1 -1")
    assert echo.exit_code == 0
    pd = echo.output.splitlines()[0]
    result = invoke(runner, "jones", "--pd", pd)
    assert result.exit_code == 0
    assert result.output.strip() == "-s - s^-1"


def test_verlinde_json(runner):
    result = invoke(runner, "verlinde", "--level", "3", "--genus", "2", "--json")
    assert result.exit_code == 0
    document = json.loads(result.output)
    assert document["method"] == "verlinde"
    assert document["dim"] == 20


def test_tqft_torus_euler_characteristic(runner):
    result = invoke(runner, "tqft-eval", "--level", "2", "--word", TORUS_WORD, "--json")
    assert json.loads(result.output)["euler_characteristic"] == 0


def test_gq_check_inverse_hbar_coefficient(runner):
    result = invoke(runner, "gq-check", "--f", "q1/hbar", "--g", "p1")
    assert result.exit_code == 0
    assert result.output.strip() == "0"


def test_gq_check_rejects_non_laurent_hbar(runner):
    result = invoke(runner, "gq-check", "--f", "q1/(hbar + 1)", "--g", "p1")
    assert result.exit_code == 2


@pytest.mark.slow
def test_verify_tqft_at_default_size(runner):
    result = invoke(runner, "verify", "tqft", "--json")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["cases"] == 200
    assert report["properties"] == ["frobenius", "axioms", "handle-powers", "closed-surfaces"]
    assert report["failures"] == []
