"""Shared fixtures for the test suite."""
import random
import sys
from pathlib import Path
from typing import List, Optional

import pytest
import structlog

ROOT = Path(__file__).parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from algebra.poly import MultiPoly  # noqa: E402
from algebra.truncated import configure_parallelism  # noqa: E402
from core.config_loader import ConfigLoader  # noqa: E402
from invariants.series import (  # noqa: E402
    DonaldsonSeries,
    Sector,
    SeriesFlags,
    from_km_form,
    series_variables,
    symmetrize,
)
from lattice.forms import CohClass, Lattice, ManifoldData, is_characteristic  # noqa: E402


@pytest.fixture(autouse=True)
def sequential():
    """Every test starts single-threaded."""
    configure_parallelism(1)
    yield
    configure_parallelism(1)


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    structlog.reset_defaults()


@pytest.fixture
def config_loader():
    return ConfigLoader(ROOT / "config" / "donaldson.yaml")


@pytest.fixture
def two_class_manifold():
    return ManifoldData(Lattice.diagonal([1, -1], ["h", "e"]), b1=0, bplus=3, name="X")


@pytest.fixture
def two_class(two_class_manifold):
    """Classes +-(1,1) on diag(1,-1), w = (1,1), d0 = -6."""
    return from_km_form(
        [(CohClass.of([1, 1]), 1), (CohClass.of([-1, -1]), 1)],
        two_class_manifold,
        CohClass.of([1, 1]),
    )


@pytest.fixture
def lambda_squared(two_class_manifold):
    variables = series_variables(2)
    poly = MultiPoly.from_terms(variables, {(0, 0, 2): "1/2"})
    terms = [(Sector.PLUS, CohClass.of([1, 1]), poly), (Sector.PLUS, CohClass.of([-1, -1]), poly)]
    flags = SeriesFlags(claims_characteristic=True)
    return symmetrize(DonaldsonSeries.build(two_class_manifold, CohClass.of([1, 1]), terms, flags=flags))


@pytest.fixture
def hyperbolic():
    """Classes +-(2,0) on the hyperbolic plane; K.a = +-2 for a = (1,0)."""
    manifold = ManifoldData(Lattice(((0, 1), (1, 0)), ("a", "b")), b1=0, bplus=3, name="H")
    return from_km_form(
        [(CohClass.of([2, 0]), 1), (CohClass.of([-2, 0]), 1)], manifold, CohClass.of([0, 0])
    )


def random_lattice(rng: random.Random, rank: int) -> Lattice:
    """Odd diagonal lattice with at least one positive and one negative entry."""
    entries = [1, -1] + [rng.choice([1, -1]) for _ in range(rank - 2)]
    rng.shuffle(entries)
    return Lattice.diagonal(entries)


def random_characteristic(rng: random.Random, lattice: Lattice, bound: int = 3) -> CohClass:
    coords = []
    for j in range(lattice.rank):
        parity = lattice.gram[j][j] % 2
        choices = [c for c in range(-bound, bound + 1) if c % 2 == parity]
        coords.append(rng.choice(choices))
    K = CohClass.of(coords)
    assert is_characteristic(lattice, K)
    return K


def random_sst_series(rng: random.Random, rank: Optional[int] = None, pairs: Optional[int] = None) -> DonaldsonSeries:
    """Simple type series with +-K pairs and small integer KM coefficients."""
    rank = rank or rng.randint(2, 4)
    lattice = random_lattice(rng, rank)
    manifold = ManifoldData(lattice, b1=0, bplus=3)
    w = CohClass.of([rng.choice([0, 1]) for _ in range(rank)])
    classes: List[CohClass] = []
    for _ in range(pairs or rng.randint(1, 3)):
        K = random_characteristic(rng, lattice)
        if K not in classes and -K not in classes:
            classes.append(K)
    km = []
    for K in classes:
        a = rng.choice([1, 2, -1, 3])
        km.append((K, a))
        if not K.is_zero():
            km.append((-K, a))
    return from_km_form(km, manifold, w)
