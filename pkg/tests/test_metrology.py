import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su11net.errors import DegenerateSlopeError, InvalidArgumentError
from su11net.interferometer import Scheme, build_pipeline
from su11net.metrology import (
    UNBOUNDED,
    default_step,
    error_sensitivity,
    homodyne_sensitivity,
    qcrb,
    qfi_closed_form,
    qfi_fock,
    qfi_generator_variance,
    saturation_report,
    signal_stats,
)


def phase_bound(r):
    return 1 / (2 * math.sqrt(2) * math.sinh(r) * math.cosh(r))


def test_qcrb_values():
    assert qcrb(4.0) == 0.5
    assert qcrb(0) is UNBOUNDED
    with pytest.raises(InvalidArgumentError):
        qcrb(-1.0)


def test_default_step():
    assert default_step(0.0) == 1e-6
    assert default_step(1.0) == 1e-4


@given(st.floats(0.0, 2.0), st.floats(0.01, 1.0))
def test_single_displacement_saturates(r, alpha):
    d = error_sensitivity(build_pipeline("single-displacement", 1, r, encoding=alpha))
    assert d == pytest.approx(math.exp(-r) / 2, rel=1e-6)
    assert d == pytest.approx(qcrb(4 * math.exp(2 * r)), rel=1e-6)


@given(st.sampled_from([1, 2, 3, 4, 8]), st.floats(0.0, 1.5), st.floats(0.01, 0.2))
def test_network_displacement_saturates(M, r, alpha):
    scheme = "single-displacement" if M == 1 else "network-displacement"
    d = error_sensitivity(build_pipeline(scheme, M, r, encoding=alpha))
    assert d == pytest.approx(1 / (2 * math.sqrt(M) * math.exp(r)), rel=1e-6)


def test_displacement_slope_vanishes_at_zero():
    with pytest.raises(DegenerateSlopeError):
        error_sensitivity(build_pipeline("single-displacement", 1, 1.0), eta0=0.0)


def test_phase_rejects_zero_point():
    with pytest.raises(DegenerateSlopeError):
        error_sensitivity(build_pipeline("single-phase", 1, 1.0), eta0=0.0)


@pytest.mark.parametrize("r", [0.5, 1.0, 1.5])
def test_single_phase_near_bound(r):
    d = error_sensitivity(build_pipeline("single-phase", 1, r), eta0=1e-4)
    assert d == pytest.approx(phase_bound(r), rel=5e-3)


@given(st.floats(0.1, 2.0), st.floats(1e-3, 0.05))
def test_phase_signal_law(r, phi):
    S, _ = signal_stats(build_pipeline("single-phase", 1, r, encoding=phi))
    want = 4 * math.sin(phi) ** 2 * math.cosh(r) ** 2 * math.sinh(r) ** 2
    assert S == pytest.approx(want, rel=1e-9, abs=1e-12)


@given(st.floats(0.3, 1.5), st.floats(1e-5, 1e-3))
def test_phase_signal_quadratic_in_small_phase(r, phi):
    S, _ = signal_stats(build_pipeline("single-phase", 1, r, encoding=phi))
    assert S / phi**2 == pytest.approx(4 * math.cosh(r) ** 2 * math.sinh(r) ** 2, rel=1e-3)


@given(st.sampled_from([1, 2, 4, 8]))
def test_variance_to_signal_ratio_near_dark_fringe(M):
    scheme = "single-phase" if M == 1 else "network-phase"
    S, dS = signal_stats(build_pipeline(scheme, M, 1.0, encoding=1e-4))
    assert dS**2 / S == pytest.approx(2.0, rel=1e-2)


@pytest.mark.parametrize("M", [2, 4])
@pytest.mark.parametrize("r", [1.0, 1.5])
def test_homogeneous_phase_network(M, r):
    d = error_sensitivity(build_pipeline("network-phase", M, r, encoding=1e-4))
    assert d == pytest.approx(phase_bound(r), rel=5e-3)
    assert d >= qcrb(qfi_closed_form("network-phase", M, r)) * (1 - 1e-9)


@pytest.mark.parametrize("M", [1, 2, 4])
def test_weak_squeezing_misses_bound(M):
    r = 0.3
    scheme = "single-phase" if M == 1 else "network-phase"
    d = error_sensitivity(build_pipeline(scheme, M, r, encoding=1e-4))
    assert d > qcrb(qfi_closed_form(scheme, M, r))


def test_inhomogeneous_signal_from_phase_spread():
    h, r = 1e-3, 1.0
    S, _ = signal_stats(build_pipeline("network-phase", 2, r, encoding=[h, -h]))
    assert S == pytest.approx(h**2 * math.sinh(r) ** 2, rel=2e-2)


def test_inhomogeneity_costs_sensitivity():
    r = 1.0
    homo = saturation_report("network-phase", 4, r, 1e-4)
    inhomo = saturation_report("network-phase", 4, r, 1e-4 + 1e-4 * (-1.0) ** np.arange(4))
    assert inhomo.saturation_ratio > homo.saturation_ratio
    assert "inhomogeneous" in inhomo.flags and "inhomogeneous" not in homo.flags


def test_homodyne_scheme():
    r, alpha = 1.0, 10.0
    p = build_pipeline("network-phase-homodyne", 4, r, seed=alpha)
    d = homodyne_sensitivity(p)
    assert d == pytest.approx(math.exp(-2 * r) / (2 * alpha), rel=5e-3)
    F = qfi_closed_form("network-phase-homodyne", 4, r, alpha)
    assert d / qcrb(F) == pytest.approx(1.0, rel=1e-2)


def test_homodyne_coherent_limit():
    p = build_pipeline("network-phase-homodyne", 1, 0.0, seed=1.0)
    assert homodyne_sensitivity(p) == pytest.approx(0.5, rel=1e-6)


def test_homodyne_needs_seeded_scheme():
    with pytest.raises(InvalidArgumentError):
        homodyne_sensitivity(build_pipeline("network-phase", 2, 1.0, encoding=1e-3))
    with pytest.raises(InvalidArgumentError):
        error_sensitivity(build_pipeline("network-phase-homodyne", 2, 1.0, seed=1.0))


@given(st.sampled_from([1, 2, 4]), st.floats(0.0, 1.5))
def test_generator_variance_matches_closed_form(M, r):
    for scheme, enc, seed in (
        ("network-displacement", 0.1, None),
        ("network-phase", 1e-3, None),
        ("network-phase-homodyne", 0.0, 2.0),
    ):
        if M == 1 and scheme == "network-displacement":
            scheme = "single-displacement"
        p = build_pipeline(scheme, M, r, encoding=enc, seed=seed)
        want = qfi_closed_form(scheme, M, r, seed)
        # the phase closed forms hold at the unencoded point; a small encoding shifts them slightly
        got = qfi_generator_variance(p, eta0=0.0 if Scheme(scheme).is_phase else None)
        assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_qfi_fock_matches_closed_forms():
    est = qfi_fock(build_pipeline("network-displacement", 2, 0.5, encoding=0.1), 25)
    assert est.value == pytest.approx(qfi_closed_form("network-displacement", 2, 0.5), rel=1e-3)
    sh = math.sinh(1.0)
    est = qfi_fock(build_pipeline("single-phase", 1, 1.0), 60)
    assert est.value == pytest.approx(8 * sh**2 * (1 + sh**2), rel=1e-3)
    est = qfi_fock(build_pipeline("network-phase", 2, 1.0), 30)
    assert est.value == pytest.approx(8 * sh**2 * (1 + sh**2), rel=1e-3)
    est = qfi_fock(build_pipeline("network-phase-homodyne", 1, 0.5, seed=2.0), 80)
    assert est.value == pytest.approx(qfi_closed_form("network-phase-homodyne", 1, 0.5, 2.0), rel=1e-3)


def test_saturation_report_fields():
    rep = saturation_report("network-displacement", 2, 0.5, 0.1, qfi_cutoff=25)
    assert rep.delta_measured == pytest.approx(1 / (2 * math.sqrt(2) * math.exp(0.5)), rel=1e-6)
    assert rep.saturation_ratio == pytest.approx(1.0, abs=1e-6)
    assert rep.qfi_numeric == pytest.approx(rep.qfi_closed, rel=1e-3)
    assert rep.flags == ()
    assert set(rep.as_dict()) >= {"scheme", "M", "r", "beta", "qcrb", "flags"}


def test_report_flags():
    assert "small-r" in saturation_report("network-phase", 2, 0.3, 1e-4).flags
    assert "misaligned-probe" in saturation_report("network-displacement", 2, 1.0, 0.1, beta=0.0).flags
    assert "misaligned-probe" in saturation_report("network-phase-homodyne", 2, 1.0, 1e-3, seed=1.0, beta=1.0).flags
    assert "misaligned-probe" not in saturation_report("network-displacement", 2, 1.0, 0.1, theta=math.pi / 2, beta=0.0).flags


def test_zero_squeezing_phase_report_is_unbounded():
    # no squeezing means no Fisher information about the phase of vacuum
    with pytest.raises(DegenerateSlopeError):
        saturation_report("network-phase", 2, 0.0, 1e-3)
    assert qcrb(qfi_closed_form("network-phase", 2, 0.0)) is UNBOUNDED
