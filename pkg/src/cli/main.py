"""Command-line entry point: ``quantinv <subcommand>``.

Exit codes: 0 on success, 1 on domain errors and failed checks, 2 on usage
errors (malformed input included).
"""

import functools
import json
from typing import Any, Callable, Optional

import click
from pydantic import BaseModel, ValidationError

from src.cli.services.invariant_service import InvariantService
from src.shared.config import settings
from src.shared.errors import InputError, QuantInvError
from src.shared.log import configure_logging
from src.shared.models import Representation, VerifySuite


def _emit(result: Any, as_json: bool, text: str) -> None:
    """Print one sorted-key JSON document or the text rendering."""
    if as_json:
        document = result.model_dump(mode="json") if isinstance(result, BaseModel) else result
        click.echo(json.dumps(document, sort_keys=True, indent=settings.json_indent))
    else:
        click.echo(text)


def _handle_errors(command: Callable) -> Callable:
    """Map domain errors onto click's exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (InputError, ValidationError) as exc:
            raise click.UsageError(str(exc)) from exc
        except QuantInvError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _fail_unless(passed: bool) -> None:
    if not passed:
        click.get_current_context().exit(1)


def _parse_labels(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    if value is None:
        return None
    try:
        return [int(token) for token in value.split(",") if token.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from None


def diagram_options(command: Callable) -> Callable:
    command = click.option("--pd", help='PD code, e.g. "X(1,4,2,3) X(3,2,4,1)"')(command)
    command = click.option("--braid", help='Braid word, e.g. "B2 1 1 1"')(command)
    return command


json_option = click.option("--json", "as_json", is_flag=True, help="Emit one JSON document")


@click.group()
@click.option(
    "--log-level", default=None, help="Engine log level (default from QUANTINV_LOG_LEVEL)"
)
def cli(log_level: Optional[str]) -> None:
    """Exact quantum-invariant computations."""
    configure_logging(log_level)


@cli.command()
@diagram_options
@click.option(
    "--level", type=click.IntRange(min=1), help="Also evaluate at q = exp(2 pi i/(k+2))"
)
@json_option
@_handle_errors
def jones(braid: Optional[str], pd: Optional[str], level: Optional[int], as_json: bool) -> None:
    """Jones polynomial in s = q^(1/2), normalized so the unknot is 1."""
    result = InvariantService().jones(braid=braid, pd=pd, level=level)
    text = result.polynomial
    if result.value is not None:
        re_part, im_part = result.value
        text += f"\nat k={level}: {re_part:.12f} {im_part:+.12f}i"
    _emit(result, as_json, text)


@cli.command()
@diagram_options
@json_option
@_handle_errors
def bracket(braid: Optional[str], pd: Optional[str], as_json: bool) -> None:
    """Kauffman bracket in A, normalized so the unknot is 1."""
    result = InvariantService().bracket(braid=braid, pd=pd)
    _emit(result, as_json, result.bracket)


@cli.command("skein-check")
@diagram_options
@click.option("--level", type=click.IntRange(min=1), help="Also check numerically at level k")
@json_option
@_handle_errors
def skein_check(braid: Optional[str], pd: Optional[str], level: Optional[int], as_json: bool):
    """Skein residual at every crossing; exits 1 if any is nonzero."""
    result = InvariantService().skein_check(braid=braid, pd=pd, level=level)
    lines = [f"crossing {i}: {residual}" for i, residual in enumerate(result.residuals)]
    lines += result.failures
    lines.append("ok" if result.passed else "FAILED")
    _emit(result, as_json, "\n".join(lines))
    _fail_unless(result.passed)


@cli.command()
@diagram_options
@json_option
@_handle_errors
def parse(braid: Optional[str], pd: Optional[str], as_json: bool) -> None:
    """Echo a parsed diagram with its orientation data."""
    document = InvariantService().parse(braid=braid, pd=pd)
    signs = " ".join("+" if s > 0 else "-" for s in document["signs"])
    text = "\n".join(
        [
            document["pd"] or "(no crossings)",
            f"signs: {signs}",
            f"components: {document['components']}",
            f"free loops: {document['free_loops']}",
            f"writhe: {document['writhe']}",
        ]
    )
    if document["linking_number"] is not None:
        text += f"\nlinking number: {document['linking_number']}"
    _emit(document, as_json, text)


@cli.command("fusion-dim")
@click.option("--level", type=click.IntRange(min=1), required=True, help="Level k")
@click.option(
    "--marked", required=True, callback=_parse_labels, help="Labels, e.g. 1,1,1,1"
)
@json_option
@_handle_errors
def fusion_dim(level: int, marked: list[int], as_json: bool) -> None:
    """Conformal-block dimension on the sphere with marked points."""
    result = InvariantService().fusion_dim(level, marked)
    _emit(result, as_json, str(result.dim))


@cli.command()
@click.option("--level", type=click.IntRange(min=1), required=True, help="Level k")
@click.option("--genus", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--marked", default=None, callback=_parse_labels, help="Labels, e.g. 1,2")
@json_option
@_handle_errors
def verlinde(level: int, genus: int, marked: Optional[list[int]], as_json: bool) -> None:
    """Verlinde dimension of a genus-g surface with marked points."""
    result = InvariantService().verlinde(level, genus, marked or [])
    _emit(result, as_json, str(result.dim))


@cli.command("tqft-eval")
@click.option("--algebra", "algebra_path", type=click.Path(dir_okay=False), help="Algebra JSON")
@click.option("--builtin", type=click.Choice(["z2"]), help="Built-in algebra")
@click.option("--level", type=click.IntRange(min=1), help="Verlinde algebra at level k")
@click.option(
    "--cobordism", "cobordism_path", type=click.Path(dir_okay=False), help="Cobordism JSON"
)
@click.option("--word", help='Inline word, e.g. \'["cap", ["copants"], ["pants"], "cup"]\'')
@click.option("--genus", type=click.IntRange(min=0), help="Standard closed surface of genus g")
@json_option
@_handle_errors
def tqft_eval(
    algebra_path: Optional[str],
    builtin: Optional[str],
    level: Optional[int],
    cobordism_path: Optional[str],
    word: Optional[str],
    genus: Optional[int],
    as_json: bool,
) -> None:
    """Evaluate Z(M) for a cobordism M over a Frobenius algebra."""
    service = InvariantService()
    algebra = service.load_algebra(algebra_path, builtin, level)
    cobordism = service.load_cobordism(cobordism_path, word, genus)
    result = service.tqft_eval(algebra, cobordism)
    if result.scalar is not None:
        text = result.scalar
    else:
        text = "\n".join(" ".join(row) for row in result.matrix)
    _emit(result, as_json, text)


@cli.command("gq-check")
@click.option("--f", "f", required=True, help='Observable, e.g. "q1^2*p1"')
@click.option("--g", "g", required=True, help="Second observable")
@click.option(
    "--rep",
    type=click.Choice([r.value for r in Representation]),
    default=Representation.PREQUANTUM.value,
    show_default=True,
)
@click.option("--n", "n", type=click.IntRange(min=1), help="Degrees of freedom (inferred)")
@json_option
@_handle_errors
def gq_check(f: str, g: str, rep: str, n: Optional[int], as_json: bool) -> None:
    """Residual [Q(f), Q(g)] + i hbar Q({f, g}); prints 0 when Dirac's condition holds."""
    result = InvariantService().gq_check(f, g, Representation(rep), n)
    _emit(result, as_json, result.residual)
    _fail_unless(result.is_zero)


@cli.command()
@click.argument("suite", type=click.Choice([s.value for s in VerifySuite]))
@click.option("--seed", type=int, default=None, help="Random seed (default from settings)")
@click.option("--cases", type=click.IntRange(min=0), default=None, help="Random cases")
@json_option
@_handle_errors
def verify(suite: str, seed: Optional[int], cases: Optional[int], as_json: bool) -> None:
    """Run one seeded property sweep; exits 1 on any failure."""
    report = InvariantService(seed=seed).verify(VerifySuite(suite), cases)
    lines = [
        f"{report.suite.value} (seed {report.seed}, {report.cases} cases): "
        f"{len(report.properties)} properties, {len(report.failures)} failures"
    ]
    lines += report.failures
    _emit(report, as_json, "\n".join(lines))
    _fail_unless(report.passed)


if __name__ == "__main__":
    cli()
