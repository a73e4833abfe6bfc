"""Service that runs engine operations and converts them to result models."""

import json
import logging
import re
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from src.engine import fusion, gq, skein, tqft2d
from src.engine.diagram import (
    BraidWord,
    LinkDiagram,
    braid_closure,
    parse_braid,
    parse_pd,
    serialize_braid,
    serialize_pd,
    to_document,
    writhe,
)
from src.shared.config import settings
from src.shared.errors import InputError, ParseError
from src.shared.models import (
    BracketResult,
    FusionDimResult,
    GqCheckResult,
    JonesResult,
    Representation,
    SkeinCheckResult,
    TqftResult,
    VerificationReport,
    VerifySuite,
    VerlindeResult,
)

logger = logging.getLogger(__name__)

_COORDINATE_INDEX = re.compile(r"\b[qp](\d+)\b")


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _clean_float(value: float) -> float:
    # 12 digits; adding 0.0 turns -0.0 into 0.0
    return round(value, 12) + 0.0


class InvariantService:
    """Runs invariant computations for the command line."""

    def __init__(self, seed: Optional[int] = None):
        self.seed = settings.default_seed if seed is None else seed

    # -- diagrams --------------------------------------------------------------

    def load_diagram(
        self, braid: Optional[str] = None, pd: Optional[str] = None
    ) -> tuple[LinkDiagram, str]:
        """Parse exactly one of a braid word or a PD code; return it with its echo text."""
        if (braid is None) == (pd is None):
            raise InputError("give exactly one of --braid or --pd")
        if braid is not None:
            word = parse_braid(braid)
            return braid_closure(word), serialize_braid(word)
        diagram = parse_pd(pd)
        return diagram, serialize_pd(diagram)

    def jones(
        self, braid: Optional[str] = None, pd: Optional[str] = None, level: Optional[int] = None
    ) -> JonesResult:
        diagram, label = self.load_diagram(braid, pd)
        polynomial = skein.jones(diagram)
        value = None
        if level is not None:
            re_part, im_part = skein.jones_at_level(diagram, level)
            value = (_clean_float(re_part), _clean_float(im_part))
        return JonesResult(
            diagram=label,
            polynomial=str(polynomial),
            terms=polynomial.poly.to_document(),
            components=polynomial.components,
            writhe=writhe(diagram),
            level=level,
            value=value,
        )

    def bracket(self, braid: Optional[str] = None, pd: Optional[str] = None) -> BracketResult:
        diagram, label = self.load_diagram(braid, pd)
        poly = skein.kauffman_bracket(diagram)
        return BracketResult(diagram=label, bracket=str(poly), terms=poly.to_document())

    def skein_check(
        self, braid: Optional[str] = None, pd: Optional[str] = None, level: Optional[int] = None
    ) -> SkeinCheckResult:
        diagram, label = self.load_diagram(braid, pd)
        residuals = [
            str(skein.skein_residual(diagram, index)) for index in range(diagram.crossing_count)
        ]
        levels = [level] if level is not None else []
        failures = skein.check_skein_corpus([diagram], levels=levels)
        return SkeinCheckResult(
            diagram=label,
            crossings_checked=diagram.crossing_count,
            residuals=residuals,
            failures=failures,
            passed=not failures,
        )

    def parse(self, braid: Optional[str] = None, pd: Optional[str] = None) -> dict:
        diagram, label = self.load_diagram(braid, pd)
        document = to_document(diagram)
        document["input"] = label
        document["pd"] = serialize_pd(diagram)
        return document

    # -- fusion ----------------------------------------------------------------

    def fusion_dim(self, level: int, marked: Sequence[int]) -> FusionDimResult:
        lv = fusion.FusionLevel(k=level)
        paths = fusion.block_dim_sphere(lv, marked)
        return FusionDimResult(
            level=level,
            marked=list(marked),
            dim=paths,
            verlinde=fusion.verlinde_dim(lv, 0, marked),
            quantum_dimensions=[
                _clean_float(fusion.quantum_dimension(lv, a)) for a in marked
            ],
        )

    def verlinde(self, level: int, genus: int, marked: Sequence[int] = ()) -> VerlindeResult:
        lv = fusion.FusionLevel(k=level)
        return VerlindeResult(
            level=level,
            genus=genus,
            marked=list(marked),
            dim=fusion.verlinde_dim(lv, genus, marked),
        )

    # -- 2d TQFT ---------------------------------------------------------------

    def load_algebra(
        self,
        algebra_path: Optional[str] = None,
        builtin: Optional[str] = None,
        level: Optional[int] = None,
    ) -> tqft2d.FrobeniusAlgebra:
        given = [x is not None for x in (algebra_path, builtin, level)]
        if sum(given) != 1:
            raise InputError("give exactly one of --algebra, --builtin or --level")
        if algebra_path is not None:
            algebra = tqft2d.algebra_from_mapping(_read_json(algebra_path))
        elif builtin is not None:
            if builtin != "z2":
                raise InputError(f"unknown builtin algebra {builtin!r}; expected 'z2'")
            algebra = tqft2d.z2_group_algebra()
        else:
            algebra = tqft2d.frobenius_from_fusion(fusion.FusionLevel(k=level))
        return algebra.require_valid()

    def load_cobordism(
        self,
        cobordism_path: Optional[str] = None,
        word: Optional[str] = None,
        genus: Optional[int] = None,
    ) -> tqft2d.Cobordism:
        given = [x is not None for x in (cobordism_path, word, genus)]
        if sum(given) != 1:
            raise InputError("give exactly one of --cobordism, --word or --genus")
        if cobordism_path is not None:
            return tqft2d.cobordism_from_json(_read_json(cobordism_path))
        if word is not None:
            try:
                data = json.loads(word)
            except json.JSONDecodeError as exc:
                raise ParseError(f"--word is not valid JSON ({exc})") from exc
            return tqft2d.cobordism_from_json(data)
        return tqft2d.genus_word(genus)

    def tqft_eval(
        self, algebra: tqft2d.FrobeniusAlgebra, cobordism: tqft2d.Cobordism
    ) -> TqftResult:
        state_map = tqft2d.evaluate(algebra, cobordism)
        matrix = state_map.to_strings()
        return TqftResult(
            source=cobordism.source,
            target=cobordism.target,
            matrix=matrix,
            euler_characteristic=cobordism.euler_characteristic(),
            scalar=matrix[0][0] if state_map.is_closed() else None,
        )

    # -- prequantization -------------------------------------------------------

    def gq_check(
        self,
        f: str,
        g: str,
        representation: Representation = Representation.PREQUANTUM,
        n: Optional[int] = None,
    ) -> GqCheckResult:
        if n is None:
            indices = [int(i) for i in _COORDINATE_INDEX.findall(f"{f} {g}")]
            n = max(indices, default=1)
        f_obs, g_obs = gq.parse_observable(f, n), gq.parse_observable(g, n)
        if representation == Representation.SCHRODINGER:
            residual = gq.schrodinger_residual(f_obs, g_obs)
        else:
            residual = gq.dirac_residual(f_obs, g_obs)
        return GqCheckResult(
            f=str(f_obs),
            g=str(g_obs),
            representation=representation,
            residual=str(residual),
            is_zero=residual.is_zero(),
        )

    # -- property sweeps -------------------------------------------------------

    def verify(self, suite: VerifySuite, cases: Optional[int] = None) -> VerificationReport:
        cases = settings.fuzz_cases if cases is None else cases
        rng = np.random.default_rng(self.seed)
        runner = {
            VerifySuite.SKEIN: self._verify_skein,
            VerifySuite.FUSION: self._verify_fusion,
            VerifySuite.TQFT: self._verify_tqft,
            VerifySuite.GQ: self._verify_gq,
        }[suite]
        results = runner(rng, cases)
        failures = [f"{name}: {line}" for name, lines in results.items() for line in lines]
        logger.info(
            "verify %s: %d properties, %d failures", suite.value, len(results), len(failures)
        )
        return VerificationReport(
            suite=suite,
            seed=self.seed,
            cases=cases,
            properties=list(results),
            failures=failures,
        )

    def _random_braids(self, rng: np.random.Generator, cases: int) -> list[BraidWord]:
        braids = []
        for _ in range(cases):
            strands = int(rng.integers(2, 4))
            length = int(rng.integers(0, 9))
            letters = tuple(
                int(rng.integers(1, strands)) * int(rng.choice([-1, 1])) for _ in range(length)
            )
            braids.append(BraidWord(strand_count=strands, letters=letters))
        return braids

    def _verify_skein(self, rng: np.random.Generator, cases: int) -> dict[str, list[str]]:
        braids = self._random_braids(rng, cases)
        diagrams = [braid_closure(b) for b in braids]
        diagrams += [parse_pd(text) for text in skein.GOLDEN_PD.values()]
        results = {
            "skein-exact": skein.check_skein_corpus(diagrams),
            "skein-root-of-unity": skein.check_skein_corpus(diagrams, levels=range(1, 11)),
            "mirror": skein.check_mirror(diagrams),
            "markov": skein.check_markov(braids),
            "braid-relation": skein.check_braid_relation(braids),
        }
        corpus = skein.check_closure_corpus(
            settings.skein_corpus_strands, settings.skein_corpus_letters, levels=range(1, 11)
        )
        results.update({f"corpus-{name}": lines for name, lines in corpus.items()})
        return results

    def _verify_fusion(self, rng: np.random.Generator, cases: int) -> dict[str, list[str]]:
        s_matrix = []
        algebra = []
        for k in range(1, 11):
            level = fusion.FusionLevel(k=k)
            s = fusion.s_matrix(level)
            if not (s.is_symmetric() and s.is_involution() and s.first_row_positive()):
                s_matrix.append(f"k={k}: S-matrix is not a positive symmetric involution")
            algebra += fusion.check_fusion_algebra(level)
        return {
            "four-point-bound": fusion.check_four_point_bound(64),
            "s-matrix": s_matrix,
            "fusion-algebra": algebra,
            "verlinde-agreement": fusion.check_fusion_agreement(8, 6),
        }

    def _verify_tqft(self, rng: np.random.Generator, cases: int) -> dict[str, list[str]]:
        algebras = [tqft2d.z2_group_algebra()] + [
            tqft2d.frobenius_from_fusion(fusion.FusionLevel(k=k)) for k in (1, 2, 3)
        ]
        results: dict[str, list[str]] = {
            "frobenius": [],
            "axioms": [],
            "handle-powers": [],
            "closed-surfaces": [],
        }
        for algebra in algebras:
            report = tqft2d.validate_frobenius(algebra)
            results["frobenius"] += [f"{algebra!r}: {v}" for v in report.violations]
            if report.valid:
                results["axioms"] += [
                    f"{algebra!r} {line}" for line in tqft2d.check_axioms(algebra, rng, cases)
                ]
                results["handle-powers"] += tqft2d.check_handle_powers(algebra)
        for k in range(1, 7):
            lv = fusion.FusionLevel(k=k)
            algebra = tqft2d.frobenius_from_fusion(lv)
            for genus in range(4):
                closed = tqft2d.closed_surface(algebra, genus)
                expected = fusion.verlinde_dim(lv, genus)
                if closed != expected:
                    results["closed-surfaces"].append(
                        f"k={k} g={genus}: TQFT {closed} != Verlinde {expected}"
                    )
        return results

    def _verify_gq(self, rng: np.random.Generator, cases: int) -> dict[str, list[str]]:
        return {
            "dirac": gq.check_dirac_sweep(2, 4),
            "jacobi": gq.check_jacobi(rng, cases),
            "hamiltonian-homomorphism": gq.check_vector_field_homomorphism(rng, cases),
            "normal-ordering": gq.check_normal_ordering(rng, cases),
            "heisenberg": gq.check_heisenberg(2),
        }
