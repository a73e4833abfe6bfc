"""Shared fixtures: golden diagrams, Frobenius algebras and a seeded generator."""

import numpy as np
import pytest

from src.engine.diagram import braid_closure, parse_braid, parse_pd
from src.engine.fusion import FusionLevel
from src.engine.skein import GOLDEN_PD
from src.engine.tqft2d import frobenius_from_fusion, z2_group_algebra
from src.shared.config import settings


@pytest.fixture
def trefoil():
    return braid_closure(parse_braid("B2 1 1 1"))


@pytest.fixture
def hopf():
    return braid_closure(parse_braid("B2 1 1"))


@pytest.fixture
def figure_eight():
    return braid_closure(parse_braid("B3 1 -2 1 -2"))


@pytest.fixture
def hopf_pd():
    return parse_pd(GOLDEN_PD["hopf"])


@pytest.fixture
def z2():
    return z2_group_algebra()


@pytest.fixture(params=[1, 2, 3], ids=lambda k: f"k={k}")
def verlinde_algebra(request):
    return frobenius_from_fusion(FusionLevel(k=request.param))


@pytest.fixture
def rng():
    return np.random.default_rng(settings.default_seed)
