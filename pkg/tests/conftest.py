"""Shared family fixtures and sampling helpers."""
import numpy as np
import pytest

from orthotoric.chart import Point
from orthotoric.metrics import (DomainRect, HyperkahlerParams, FlatFamily,
                                OrthotoricFamily, OrthotoricParams,
                                PerturbedOrthotoricFamily)

SEED = 20240801


def box(z=(-0.6, 0.6), t=(-0.6, 0.6)):
    return dict(z=z, t=t)


@pytest.fixture(scope="session")
def generic_family():
    """F = x^2 + 1, G = 2 - y on 0 < y < 1 < x < 2: curved, not Einstein."""
    params = OrthotoricParams((1.0, 0.0, 1.0), (2.0, -1.0),
                              DomainRect((1.05, 1.95), (0.05, 0.95), **box()))
    return OrthotoricFamily(params)


@pytest.fixture(scope="session")
def cubic_family():
    """F = x^3 + 1, G = 3 - y: a third distinct profile choice."""
    params = OrthotoricParams((1.0, 0.0, 0.0, 1.0), (3.0, -1.0),
                              DomainRect((1.05, 1.95), (0.05, 0.95), **box()))
    return OrthotoricFamily(params)


@pytest.fixture(scope="session")
def hk_linear():
    """c = 0, a = 1/2: F = x, G = 2 - y (Ricci flat, every sphere member
    orthotoric)."""
    return HyperkahlerParams(0.0, 0.5, 2.0, 0.0,
                             DomainRect((1.2, 1.9), (0.2, 0.9), **box()))


@pytest.fixture(scope="session")
def hk_linear_family(hk_linear):
    return OrthotoricFamily(hk_linear.to_orthotoric())


@pytest.fixture(scope="session")
def hk_quadratic():
    """c = 1, a = 0: F = x^2, G = 4 - y^2 (Ricci flat, unique orthotoric
    structure)."""
    return HyperkahlerParams(1.0, 0.0, 4.0, 0.0,
                             DomainRect((1.1, 1.9), (0.1, 0.9), **box()))


@pytest.fixture(scope="session")
def hk_quadratic_family(hk_quadratic):
    return OrthotoricFamily(hk_quadratic.to_orthotoric())


@pytest.fixture(scope="session")
def hk_mixed():
    """c = 1, a = 1/2: both rotation rates nonzero."""
    return HyperkahlerParams(1.0, 0.5, 4.0, 0.5,
                             DomainRect((1.2, 1.8), (0.2, 0.8), **box()))


@pytest.fixture(scope="session")
def hk_mixed_family(hk_mixed):
    return OrthotoricFamily(hk_mixed.to_orthotoric())


@pytest.fixture(scope="session")
def constant_family():
    """F = G = 1: constant profiles, constant frame angle (Calabi type)."""
    params = OrthotoricParams((1.0,), (1.0,),
                              DomainRect((1.1, 1.9), (0.1, 0.9), **box()))
    return OrthotoricFamily(params)


@pytest.fixture(scope="session")
def flat_family():
    return FlatFamily()


@pytest.fixture(scope="session")
def perturbed_family():
    params = OrthotoricParams((1.0, 0.0, 1.0), (2.0, -1.0),
                              DomainRect((1.05, 1.95), (0.05, 0.95), **box()))
    return PerturbedOrthotoricFamily(params, 1e-2)


def sample(family, n, seed=SEED, margin=0.04):
    """n reproducible points in the family's box."""
    rng = np.random.default_rng(seed)
    pts = []
    ranges = family.domain.ranges
    while len(pts) < n:
        vals = [rng.uniform(lo + (hi - lo) * margin, hi - (hi - lo) * margin)
                for lo, hi in ranges]
        p = Point(*vals)
        if family.admissible(p):
            pts.append(p)
    return pts
