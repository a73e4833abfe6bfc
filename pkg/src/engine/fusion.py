"""SU(2) level-k fusion rules, S-matrix and Verlinde dimensions.

Labels use the twice-spin convention: label ``a`` in ``0..k`` stands for
spin ``a/2``. Fusion is multiplicity free, so ``N_ab^c`` is 0 or 1.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.shared.config import settings
from src.shared.errors import LabelRangeError, VerlindeRoundingError

logger = logging.getLogger(__name__)


class FusionLevel(BaseModel):
    """The label set 0..k of SU(2) at level k."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1, description="Chern-Simons level")

    @property
    def labels(self) -> range:
        return range(self.k + 1)

    def check_label(self, label: int) -> int:
        if not 0 <= label <= self.k:
            raise LabelRangeError(f"label {label} outside 0..{self.k} at level {self.k}")
        return label


class SMatrix:
    """Modular S-matrix ``S[a][b] = sqrt(2/(k+2)) sin(pi (a+1)(b+1)/(k+2))``."""

    def __init__(self, entries: np.ndarray):
        self.entries = entries
        self.entries.setflags(write=False)

    def __getitem__(self, index):
        return self.entries[index]

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def is_symmetric(self, tol: float | None = None) -> bool:
        atol = settings.numeric_tolerance if tol is None else tol
        return bool(np.allclose(self.entries, self.entries.T, rtol=0.0, atol=atol))

    def is_involution(self, tol: float | None = None) -> bool:
        atol = settings.numeric_tolerance if tol is None else tol
        product = self.entries @ self.entries
        return bool(np.allclose(product, np.eye(self.size), rtol=0.0, atol=atol))

    def first_row_positive(self) -> bool:
        return bool(np.all(self.entries[0] > 0))


def fuse(level: FusionLevel, a: int, b: int) -> list[int]:
    """Quantum Clebsch-Gordan rule: |a-b| <= c <= min(a+b, 2k-a-b), c = a+b mod 2."""
    level.check_label(a)
    level.check_label(b)
    return list(range(abs(a - b), min(a + b, 2 * level.k - a - b) + 1, 2))


def fusion_multiplicity(level: FusionLevel, a: int, b: int, c: int) -> int:
    """``N_ab^c``: 1 when c occurs in a x b, else 0."""
    level.check_label(c)
    return int(c in fuse(level, a, b))


@lru_cache(maxsize=None)
def _fusion_matrices(k: int) -> np.ndarray:
    """N[a, b, c] = N_ab^c as an integer tensor."""
    level = FusionLevel(k=k)
    tensor = np.zeros((k + 1, k + 1, k + 1), dtype=np.int64)
    for a, b in itertools.product(level.labels, repeat=2):
        for c in fuse(level, a, b):
            tensor[a, b, c] = 1
    tensor.setflags(write=False)
    return tensor


def fusion_matrix(level: FusionLevel, a: int) -> np.ndarray:
    """``N_a`` with ``N_a[b, c] = N_ab^c``."""
    level.check_label(a)
    return _fusion_matrices(level.k)[a]


def block_dim_sphere(level: FusionLevel, marked: Sequence[int]) -> int:
    """Number of fusion paths 0 -> ... -> 0 through the marked labels."""
    if not marked:
        raise LabelRangeError("at least one marked point is required")
    state = np.zeros(level.k + 1, dtype=np.int64)
    state[0] = 1
    for label in marked:
        state = state @ fusion_matrix(level, label)
    return int(state[0])


@lru_cache(maxsize=None)
def _s_entries(k: int) -> np.ndarray:
    index = np.arange(1, k + 2)
    return np.sqrt(2.0 / (k + 2)) * np.sin(np.pi * np.outer(index, index) / (k + 2))


def s_matrix(level: FusionLevel) -> SMatrix:
    """Read-only copy of the level-k S-matrix."""
    return SMatrix(_s_entries(level.k).copy())


def quantum_dimension(level: FusionLevel, a: int) -> float:
    """``S_0a / S_00``, the value of the a-colored unknot."""
    level.check_label(a)
    entries = _s_entries(level.k)
    return float(entries[0, a] / entries[0, 0])


def verlinde_dim(level: FusionLevel, genus: int, marked: Sequence[int] = ()) -> int:
    """Verlinde formula ``sum_a S_0a^(2-2g-n) prod_i S_(l_i) a``, rounded."""
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    for label in marked:
        level.check_label(label)
    entries = _s_entries(level.k)
    first_row = entries[0]
    terms = first_row ** (2 - 2 * genus - len(marked))
    for label in marked:
        terms = terms * entries[label]
    value = float(terms.sum())
    rounded = round(value)
    residual = abs(value - rounded)
    if residual > settings.verlinde_tolerance:
        raise VerlindeRoundingError(
            f"Verlinde sum {value!r} at level {level.k}, genus {genus} is {residual:.3g} "
            "away from an integer"
        )
    return int(rounded)


def check_fusion_agreement(k_max: int, max_len: int) -> list[str]:
    """Compare Verlinde and fusion-path dimensions on every label sequence.

    Sequences of one length are handled together: row ``i`` of ``paths``
    holds ``e_0 N_(l_1) ... N_(l_n)`` and row ``i`` of ``weights`` holds
    ``prod_j S_(l_j) a`` for the i-th sequence in ``itertools.product`` order.
    """
    failures: list[str] = []
    for k in range(1, k_max + 1):
        level = FusionLevel(k=k)
        size = k + 1
        tensor = _fusion_matrices(k)
        entries = _s_entries(k)
        paths = np.zeros((1, size), dtype=np.int64)
        paths[0, 0] = 1
        weights = np.ones((1, size))
        for length in range(1, max_len + 1):
            paths = np.einsum("sb,abc->sac", paths, tensor).reshape(-1, size)
            weights = (weights[:, None, :] * entries[None, :, :]).reshape(-1, size)
            values = (weights * entries[0] ** (2 - length)).sum(axis=1)
            rounded = np.rint(values)
            off_integer = np.abs(values - rounded) > settings.verlinde_tolerance
            mismatch = rounded.astype(np.int64) != paths[:, 0]
            for bad in np.flatnonzero(off_integer | mismatch):
                marked = tuple(int(x) for x in np.unravel_index(bad, (size,) * length))
                failures.append(
                    f"k={k} {marked}: paths {paths[bad, 0]} != verlinde {values[bad]:.9g}"
                )
        logger.debug("fusion agreement checked at level %d", level.k)
    return failures


def check_fusion_algebra(level: FusionLevel, tol: float | None = None) -> list[str]:
    """The ``N_a`` commute pairwise and the S-matrix diagonalizes each of them.

    ``S N_a S = diag(S_ab / S_0b)`` since S is a real symmetric involution.
    """
    atol = settings.numeric_tolerance if tol is None else tol
    tensor = _fusion_matrices(level.k)
    entries = _s_entries(level.k)
    failures = []
    for a, b in itertools.combinations(level.labels, 2):
        if not np.array_equal(tensor[a] @ tensor[b], tensor[b] @ tensor[a]):
            failures.append(f"k={level.k}: N_{a} and N_{b} do not commute")
    for a in level.labels:
        diagonal = entries @ tensor[a] @ entries
        expected = np.diag(entries[a] / entries[0])
        if not np.allclose(diagonal, expected, rtol=0.0, atol=atol):
            failures.append(f"k={level.k}: S does not diagonalize N_{a}")
    return failures


def check_four_point_bound(k_max: int = 64) -> list[str]:
    """Four fundamental points carry 2 blocks at every level k >= 2 and 1 at k = 1."""
    failures = []
    for k in range(1, k_max + 1):
        dim = block_dim_sphere(FusionLevel(k=k), [1, 1, 1, 1])
        if dim != (1 if k == 1 else 2):
            failures.append(f"k={k}: four fundamental points give {dim}")
    return failures
