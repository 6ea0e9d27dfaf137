import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su11net.elements import ModeSqueeze, Passive, SqueezeParams, complete_unitary, unitarity_defect
from su11net.errors import InvalidArgumentError, NonUnitaryError


def test_squeeze_params_wraps_phase():
    p = SqueezeParams(1.0, 3 * math.pi)
    assert p.beta == pytest.approx(math.pi)
    assert p.zeta == pytest.approx(-1.0)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_complete_unitary(M, seed):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=M) + 1j * rng.normal(size=M)
    u /= np.linalg.norm(u)
    W = complete_unitary(u)
    assert unitarity_defect(W) < 1e-12
    assert np.allclose(W[:, 0], u, atol=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_complete_unitary_basis_vectors(k):
    u = np.eye(3)[k]
    W = complete_unitary(u)
    assert unitarity_defect(W) < 1e-14
    assert np.allclose(W[:, 0], u)


def test_passive_dagger():
    U = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
    assert np.allclose(Passive(U).dagger().U @ U, np.eye(2))


def test_passive_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        Passive(np.array([[2.0]]))


def test_mode_squeeze_needs_unit_vector():
    with pytest.raises(InvalidArgumentError):
        ModeSqueeze(np.array([1.0, 1.0]), SqueezeParams(0.5))
