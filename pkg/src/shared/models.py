"""Shared data models for command input documents and results."""

from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, Field, model_validator


class Representation(str, Enum):
    """Operator picture used by ``gq-check``."""

    PREQUANTUM = "prequantum"
    SCHRODINGER = "schrodinger"


class VerifySuite(str, Enum):
    """Property sweeps runnable from ``verify``."""

    SKEIN = "skein"
    FUSION = "fusion"
    TQFT = "tqft"
    GQ = "gq"


Rational = Union[int, str]


class FrobeniusAlgebraDocument(BaseModel):
    """JSON form of a commutative Frobenius algebra; rationals may be strings like ``"1/2"``."""

    dim: int = Field(..., ge=1, description="Dimension d of the algebra")
    mult: list[list[list[Rational]]] = Field(..., description="d x d x d structure constants")
    unit: list[Rational] = Field(..., description="Coordinates of the unit")
    pairing: list[list[Rational]] = Field(..., description="d x d pairing matrix")

    @model_validator(mode="after")
    def check_shapes(self) -> "FrobeniusAlgebraDocument":
        d = self.dim
        if len(self.mult) != d or any(
            len(row) != d or any(len(entry) != d for entry in row) for row in self.mult
        ):
            raise ValueError(f"mult must be a {d}x{d}x{d} array")
        if len(self.unit) != d:
            raise ValueError(f"unit must have {d} entries")
        if len(self.pairing) != d or any(len(row) != d for row in self.pairing):
            raise ValueError(f"pairing must be a {d}x{d} array")
        return self


class CobordismDocument(BaseModel):
    """JSON form of a cobordism word; a layer is a generator name or a list of them."""

    source: Optional[int] = Field(None, ge=0, description="Incoming circles; inferred if omitted")
    word: list[Union[str, list[str]]] = Field(default_factory=list)


class FrobeniusReport(BaseModel):
    """Outcome of checking the Frobenius algebra identities."""

    valid: bool
    violations: list[str] = Field(default_factory=list)


class JonesResult(BaseModel):
    """Jones polynomial of a diagram, optionally evaluated at a root of unity."""

    diagram: str
    polynomial: str
    terms: dict
    components: int
    writhe: int
    level: Optional[int] = None
    value: Optional[tuple[float, float]] = None


class BracketResult(BaseModel):
    """Kauffman bracket in A with its exponent-to-coefficient map."""

    diagram: str
    bracket: str
    terms: dict


class SkeinCheckResult(BaseModel):
    """Skein residuals at every crossing of one diagram."""

    diagram: str
    crossings_checked: int
    residuals: list[str]
    failures: list[str] = Field(default_factory=list)
    passed: bool


class FusionDimResult(BaseModel):
    """Conformal-block dimension on the sphere, counted by fusion paths.

    ``dim`` is the path count; ``verlinde`` repeats it from the Verlinde formula.
    """

    level: int
    marked: list[int]
    dim: int
    method: str = "paths"
    verlinde: int
    quantum_dimensions: list[float]


class VerlindeResult(BaseModel):
    """Verlinde dimension of a marked genus-g surface."""

    level: int
    genus: int
    marked: list[int]
    dim: int
    method: str = "verlinde"


class TqftResult(BaseModel):
    """Matrix of Z(M), with its single entry when the cobordism is closed."""

    source: int
    target: int
    matrix: list[list[str]]
    euler_characteristic: int
    scalar: Optional[str] = None


class GqCheckResult(BaseModel):
    """Dirac residual of two observables in one operator picture."""

    f: str
    g: str
    representation: Representation
    residual: str
    is_zero: bool


class VerificationReport(BaseModel):
    """Result of one seeded property sweep."""

    suite: VerifySuite
    seed: int
    cases: int = Field(..., description="Random cases per randomized property")
    properties: list[str] = Field(default_factory=list, description="Properties that were swept")
    failures: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures
