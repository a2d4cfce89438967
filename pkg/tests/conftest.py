import numpy as np
import pytest

from entbrach.hamiltonian import CanonicalTwoQubit, from_canonical


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture(params=[(1.0, 1.0, 0.0), (1.3, 0.7, 0.25)], ids=["mu110", "mu-generic"])
def mu(request):
    return CanonicalTwoQubit(request.param)


@pytest.fixture
def canonical_h(mu):
    return from_canonical(mu)
