import csv
from pathlib import Path

import pytest

from bayesrr.priors import BetaParams, Design, PriorSpec, resolve_prior
from bayesrr.trial import bundled_points

HERE = Path(__file__).parent
REFERENCE = HERE / "reference"
GOLDEN = HERE / "golden"

PRIOR_SPECS = {
    "uniform": PriorSpec.uniform(),
    "informative": PriorSpec.informative(0.1, 0.55),
    "jeffreys": PriorSpec.jeffreys(),
}


def reference_rows(kind, prior):
    """Rows of the 4-decimal reference tables for the 24-point dataset."""
    with open(REFERENCE / f"{kind}_{prior}.csv", newline="") as f:
        return list(csv.DictReader(f))


def resolved(prior_name, design=None):
    return resolve_prior(PRIOR_SPECS[prior_name], design or Design())


@pytest.fixture(scope="session")
def points():
    return bundled_points()


@pytest.fixture
def design():
    return Design()


@pytest.fixture
def uniform():
    return BetaParams(1.0, 1.0)
