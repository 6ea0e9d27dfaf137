import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su11net import gaussian
from su11net.elements import Displace, ModeSqueeze, Passive, Rotate, Squeeze, SqueezeParams
from su11net.errors import InvalidArgumentError, NonUnitaryError

from helpers import random_unitary

radii = st.floats(0.0, 2.0)
phases = st.floats(0.0, 2 * math.pi)


@st.composite
def circuits(draw, max_modes=4):
    M = draw(st.integers(1, max_modes))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    elems = []
    for _ in range(draw(st.integers(1, 6))):
        kind = draw(st.sampled_from(["squeeze", "displace", "rotate", "passive"]))
        mode = draw(st.integers(0, M - 1))
        if kind == "squeeze":
            elems.append(Squeeze(mode, SqueezeParams(draw(radii), draw(phases)), inverse=draw(st.booleans())))
        elif kind == "displace":
            elems.append(Displace(mode, complex(*rng.normal(scale=0.5, size=2))))
        elif kind == "rotate":
            elems.append(Rotate(mode, draw(phases)))
        else:
            elems.append(Passive(random_unitary(rng, M)))
    return M, elems


def run(M, elems):
    state = gaussian.vacuum(M)
    for e in elems:
        state = gaussian.apply_element(state, e)
    return state


def test_vacuum_moments():
    v = gaussian.vacuum(3)
    assert np.allclose(v.cov, np.eye(6) / 2)
    assert gaussian.photon_mean(v, 1) == 0.0
    assert gaussian.photon_variance(v, 1) == 0.0


def test_squeezed_vacuum_photon_number():
    r = 1.3
    s = gaussian.squeeze(gaussian.vacuum(1), 0, SqueezeParams(r))
    assert gaussian.photon_mean(s, 0) == pytest.approx(math.sinh(r) ** 2, rel=1e-14)
    assert gaussian.photon_variance(s, 0) == pytest.approx(2 * math.sinh(r) ** 2 * math.cosh(r) ** 2, rel=1e-12)


def test_squeeze_orientation():
    r = 0.7
    x_sq = gaussian.squeeze(gaussian.vacuum(1), 0, SqueezeParams(r, 0.0))
    assert x_sq.cov[0, 0] == pytest.approx(math.exp(2 * r) / 2)
    p_sq = gaussian.squeeze(gaussian.vacuum(1), 0, SqueezeParams(r, math.pi))
    assert p_sq.cov[1, 1] == pytest.approx(math.exp(2 * r) / 2)


def test_coherent_state_number_statistics():
    alpha = 1.5 - 0.5j
    s = gaussian.displace(gaussian.vacuum(1), 0, alpha)
    assert s.amplitudes[0] == pytest.approx(alpha)
    assert gaussian.photon_mean(s, 0) == pytest.approx(abs(alpha) ** 2)
    assert gaussian.photon_variance(s, 0) == pytest.approx(abs(alpha) ** 2)


def test_rotation_phase():
    s = gaussian.rotate(gaussian.displace(gaussian.vacuum(1), 0, 1.0), 0, 0.3)
    assert s.amplitudes[0] == pytest.approx(np.exp(0.3j))


def test_passive_maps_amplitudes(rng):
    U = random_unitary(rng, 3)
    alpha = np.array([0.3, -0.2j, 0.5 + 0.1j])
    s = gaussian.vacuum(3)
    for j, a in enumerate(alpha):
        s = gaussian.displace(s, j, a)
    s = gaussian.apply_passive(s, U)
    assert np.allclose(s.amplitudes, U @ alpha, atol=1e-14)


def test_single_mode_variance_closed_form():
    # Var n = (tr(sigma^2) - 1/2)/2 + d^T sigma d for one mode
    s = gaussian.squeeze(gaussian.displace(gaussian.vacuum(1), 0, 0.4 + 0.3j), 0, SqueezeParams(0.6, 1.0))
    cov, d = s.cov, s.mean
    want = (np.trace(cov @ cov) - 0.5) / 2 + d @ cov @ d
    assert gaussian.photon_variance(s, 0) == pytest.approx(want, rel=1e-12)


def test_mode_squeeze_matches_literal_sequence(rng):
    # U S_0 |0> equals S_b |0> for b built from U's first column
    U = random_unitary(rng, 3)
    params = SqueezeParams(0.9, 0.4)
    literal = gaussian.apply_passive(gaussian.squeeze(gaussian.vacuum(3), 0, params), U)
    compact = gaussian.apply_element(gaussian.vacuum(3), ModeSqueeze(U[:, 0], params))
    assert np.allclose(literal.cov, compact.cov, atol=1e-12)


@pytest.mark.parametrize(
    "call",
    [
        lambda: gaussian.vacuum(0),
        lambda: gaussian.squeeze(gaussian.vacuum(2), 2, SqueezeParams(1.0)),
        lambda: gaussian.rotate(gaussian.vacuum(1), -1, 0.1),
        lambda: gaussian.apply_passive(gaussian.vacuum(2), np.eye(3)),
        lambda: SqueezeParams(-0.1),
        lambda: SqueezeParams(float("nan")),
    ],
)
def test_invalid_arguments(call):
    with pytest.raises(InvalidArgumentError):
        call()


def test_non_unitary_rejected():
    with pytest.raises(NonUnitaryError) as info:
        gaussian.apply_passive(gaussian.vacuum(2), np.array([[1, 0.1], [0, 1]]))
    assert info.value.defect > 1e-3


@given(circuits())
def test_purity_preserved(circuit):
    state = run(*circuit)
    assert state.purity_defect() < 1e-9 * max(1.0, float(np.linalg.cond(state.symplectic)))
    assert state.min_uncertainty_eigenvalue() > -1e-9 * float(np.max(np.abs(state.cov)))


@given(circuits())
def test_symplectic_form_preserved(circuit):
    M, elems = circuit
    F = run(M, elems).symplectic
    Om = gaussian.symplectic_form(M)
    scale = max(1.0, float(np.max(np.abs(F))) ** 2)
    assert np.max(np.abs(F @ Om @ F.T - Om)) < 1e-10 * scale


@given(circuits())
def test_bogoliubov_unit_condition(circuit):
    # a -> A a + B a^dag must preserve [a, a^dag] = 1: A A^H - B B^H = I and A B^T symmetric
    state = run(*circuit)
    A, B = state.bogoliubov
    scale = max(1.0, float(np.max(np.abs(A))) ** 2)
    M = state.mode_count
    assert np.max(np.abs(A @ A.conj().T - B @ B.conj().T - np.eye(M))) < 1e-10 * scale
    assert np.max(np.abs(A @ B.T - (A @ B.T).T)) < 1e-10 * scale


@given(radii, phases)
def test_single_mode_bogoliubov(r, beta):
    A, B = gaussian.squeeze(gaussian.vacuum(1), 0, SqueezeParams(r, beta)).bogoliubov
    assert abs(abs(A[0, 0]) ** 2 - abs(B[0, 0]) ** 2 - 1) < 1e-10 * math.cosh(r) ** 2
    assert abs(A[0, 0]) == pytest.approx(math.cosh(r), rel=1e-12)
    assert abs(B[0, 0]) == pytest.approx(math.sinh(r), rel=1e-12, abs=1e-15)


@given(circuits())
def test_time_reversal_identity(circuit):
    M, elems = circuit
    state = run(M, elems)
    for e in reversed(elems):
        if isinstance(e, Squeeze):
            e = Squeeze(e.mode, e.params, inverse=not e.inverse)
        elif isinstance(e, Displace):
            e = Displace(e.mode, -e.alpha)
        elif isinstance(e, Rotate):
            e = Rotate(e.mode, -e.phi)
        else:
            e = e.dagger()
        state = gaussian.apply_element(state, e)
    scale = max(1.0, float(np.linalg.cond(run(M, elems).symplectic)))
    assert np.max(np.abs(state.cov - np.eye(2 * M) / 2)) < 1e-10 * scale
    assert np.max(np.abs(state.mean)) < 1e-10 * scale
