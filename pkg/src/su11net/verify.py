"""Acceptance checks against the closed-form results, shared by the CLI and the test suite.

Expected values are written out here with ``math`` rather than taken from
:mod:`su11net.metrology`, so a check never compares a formula with itself.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import fock, gaussian
from .elements import SqueezeParams
from .interferometer import Scheme, build_pipeline, run
from .metrology import (
    error_sensitivity,
    homodyne_sensitivity,
    qcrb,
    qfi_fock,
    qfi_generator_variance,
    signal_stats,
)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    worst: float  # largest observed error, in the units of ``tolerance``
    tolerance: float
    seconds: float
    budget: float
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.passed and self.seconds < self.budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        timing = f"{self.seconds:.2f}s/{self.budget:g}s"
        return f"[{status}] {self.number}. {self.name}: worst {self.worst:.3e} (tol {self.tolerance:.0e}), {timing} {self.detail}".rstrip()


class _Tracker:
    def __init__(self, tol):
        self.tol = tol
        self.worst = 0.0
        self.notes = []
        self.extra_fail = False

    def rel(self, got, want, tol=None, label=""):
        err = abs(got - want) / abs(want)
        self._record(err, tol, label)

    def abs(self, got, want, tol=None, label=""):
        self._record(abs(got - want), tol, label)

    def _record(self, err, tol, label):
        tol = self.tol if tol is None else tol
        # errors are reported relative to the headline tolerance
        self.worst = max(self.worst, err * self.tol / tol)
        if not err <= tol:
            self.notes.append(f"{label}: {err:.3e} > {tol:.0e}")

    def require(self, cond, label):
        if not cond:
            self.extra_fail = True
            self.notes.append(label)

    @property
    def passed(self):
        return not self.notes and not self.extra_fail


def _timed(number, name, tol, budget, body) -> CheckResult:
    t = _Tracker(tol)
    start = time.perf_counter()
    body(t)
    elapsed = time.perf_counter() - start
    return CheckResult(number, name, t.passed, t.worst, tol, elapsed, budget, "; ".join(t.notes))


def check_single_displacement() -> CheckResult:
    def body(t):
        for r in (0.0, 0.5, 1.0, 1.5):
            p = build_pipeline(Scheme.SINGLE_DISPLACEMENT, 1, r, encoding=0.1)
            d = error_sensitivity(p)
            t.rel(d, math.exp(-r) / 2, label=f"r={r} vs e^-r/2")
            t.rel(d, qcrb(4 * math.exp(2 * r)), label=f"r={r} vs qcrb")

    return _timed(1, "single-mode displacement saturation", 1e-6, 1.0, body)


def check_single_phase() -> CheckResult:
    def body(t):
        for r in (0.5, 1.0, 1.5):
            p = build_pipeline(Scheme.SINGLE_PHASE, 1, r)
            d = error_sensitivity(p, eta0=1e-4)
            t.rel(d, 1 / (2 * math.sqrt(2) * math.sinh(r) * math.cosh(r)), label=f"r={r} sensitivity")
        r, phi = 1.0, 0.01
        S, _ = signal_stats(build_pipeline(Scheme.SINGLE_PHASE, 1, r, encoding=phi))
        want = 4 * math.sin(phi) ** 2 * math.cosh(r) ** 2 * math.sinh(r) ** 2
        t.abs(S, want, tol=1e-8, label="signal at phi=0.01")

    return _timed(2, "single-mode phase saturation", 5e-3, 1.0, body)


def check_displacement_network() -> CheckResult:
    rng = np.random.default_rng(20240611)

    def body(t):
        for M in (2, 4, 8):
            for r in (0.5, 1.0):
                alphas = rng.uniform(-0.2, 0.2, M)
                p = build_pipeline(Scheme.NETWORK_DISPLACEMENT, M, r, "dft", alphas)
                t.rel(error_sensitivity(p), 1 / (2 * math.sqrt(M) * math.exp(r)), label=f"M={M} r={r}")
                S = signal_stats(p)[0]
                S_perm = signal_stats(p.with_encoding(rng.permutation(alphas)))[0]
                t.abs(S_perm, S, tol=1e-10, label=f"M={M} r={r} permutation")
                # only the symmetric mode is squeezed, so ports l > 0 carry the bare
                # transformed displacement: <a_l> = sum_j conj(U_jl) alpha_j
                U = p.distributor.matrix
                amps = run(p).amplitudes
                want = U.conj().T @ alphas
                t.abs(float(np.max(np.abs(amps[1:] - want[1:]))), 0.0, tol=1e-10, label=f"M={M} r={r} ports")
        # for the real Hadamard distributor the conjugate makes no difference
        alphas = rng.uniform(-0.2, 0.2, 4)
        p = build_pipeline(Scheme.NETWORK_DISPLACEMENT, 4, 1.0, "hadamard", alphas)
        want = p.distributor.matrix.T @ alphas
        t.abs(float(np.max(np.abs(run(p).amplitudes[1:] - want[1:]))), 0.0, tol=1e-10, label="hadamard ports")

    return _timed(3, "displacement network", 1e-6, 2.0, body)


def check_phase_network() -> CheckResult:
    def body(t):
        for M in (2, 4):
            for r in (1.0, 1.5):
                p = build_pipeline(Scheme.NETWORK_PHASE, M, r, encoding=1e-4)
                bound = 1 / (2 * math.sqrt(2) * math.sinh(r) * math.cosh(r))
                t.rel(error_sensitivity(p), bound, label=f"M={M} r={r}")
        r = 0.3
        bound = 1 / math.sqrt(8 * math.sinh(r) ** 2 * (1 + math.sinh(r) ** 2))
        for M in (2, 4):
            d = error_sensitivity(build_pipeline(Scheme.NETWORK_PHASE, M, r, encoding=1e-4))
            t.require(d > bound, f"M={M} r=0.3: {d:.9g} does not exceed the bound {bound:.9g}")
        h, r = 1e-3, 1.0
        S, _ = signal_stats(build_pipeline(Scheme.NETWORK_PHASE, 2, r, encoding=[h, -h]))
        t.rel(S, h**2 * math.sinh(r) ** 2, tol=2e-2, label="inhomogeneous signal")

    return _timed(4, "phase network", 5e-3, 2.0, body)


def check_homodyne() -> CheckResult:
    def body(t):
        r, alpha = 1.0, 10.0
        p = build_pipeline(Scheme.NETWORK_PHASE_HOMODYNE, 4, r, seed=alpha)
        d = homodyne_sensitivity(p)
        t.rel(d, math.exp(-2 * r) / (2 * alpha), label="vs e^-2r/2alpha")
        s, c = math.sinh(r), math.cosh(r)
        F = 4 * (s**4 + s**2 + s**2 * c**2 + alpha**2 * math.exp(2 * r) * (1 + 2 * s**2 + 2 * s * c))
        t.rel(d / qcrb(F), 1.0, tol=1e-2, label="ratio to qcrb")

    return _timed(5, "homodyne scheme", 5e-3, 1.0, body)


def check_qfi_oracle() -> CheckResult:
    def body(t):
        r = 0.5
        p = build_pipeline(Scheme.NETWORK_DISPLACEMENT, 2, r, encoding=0.1)
        t.rel(qfi_fock(p, 25).value, 4 * 2 * math.exp(2 * r), label="displacement M=2 cutoff 25")
        r = 1.0
        want = 8 * math.sinh(r) ** 2 * (1 + math.sinh(r) ** 2)
        t.rel(qfi_fock(build_pipeline(Scheme.SINGLE_PHASE, 1, r), 60).value, want, label="phase M=1 cutoff 60")
        t.rel(qfi_fock(build_pipeline(Scheme.NETWORK_PHASE, 2, r), 30).value, want, label="phase M=2 cutoff 30")
        r, alpha = 0.5, 2.0
        s, c = math.sinh(r), math.cosh(r)
        want = 4 * (s**4 + s**2 + s**2 * c**2 + alpha**2 * math.exp(2 * r) * (1 + 2 * s**2 + 2 * s * c))
        p = build_pipeline(Scheme.NETWORK_PHASE_HOMODYNE, 1, r, seed=alpha)
        t.rel(qfi_fock(p, 80).value, want, label="squeezed coherent cutoff 80")

    return _timed(6, "QFI oracle agreement", 1e-3, 60.0, body)


def check_properties() -> CheckResult:
    """Deterministic spot checks of the properties the hypothesis suites explore."""

    def body(t):
        rng = np.random.default_rng(7)
        for M, kind in ((1, "dft"), (3, "dft"), (4, "hadamard")):
            enc = rng.uniform(-0.1, 0.1, M)
            p = build_pipeline(Scheme.NETWORK_PHASE if M > 1 else Scheme.SINGLE_PHASE, M, 0.8, kind, enc)
            state = run(p)
            t.abs(state.purity_defect(), 0.0, tol=1e-9, label=f"purity M={M}")
            F = state.symplectic
            Om = gaussian.symplectic_form(M)
            t.abs(float(np.max(np.abs(F @ Om @ F.T - Om))), 0.0, tol=1e-10, label=f"symplectic M={M}")
            zero = run(p.with_encoding(np.zeros(M)))
            t.abs(float(np.max(np.abs(zero.cov - 0.5 * np.eye(2 * M)))), 0.0, tol=1e-10, label=f"time reversal M={M}")
            sq = gaussian.squeeze(gaussian.vacuum(1), 0, SqueezeParams(0.8, rng.uniform(0, 6)))
            A, B = sq.bogoliubov
            # a -> A a + B a^dag here, so the unit-determinant condition reads |A|^2 - |B|^2 = 1
            t.abs(abs(A[0, 0]) ** 2 - abs(B[0, 0]) ** 2, 1.0, tol=1e-10, label="bogoliubov")
        # Gaussian vs Fock moments
        p = build_pipeline(Scheme.NETWORK_DISPLACEMENT, 2, 0.4, encoding=[0.1, -0.05])
        gs = run(p)
        fs, weight = fock.run_traced(p.compact_elements(), 2, 40, guard=1e-9)
        for mode in range(2):
            gm = (gaussian.photon_mean(gs, mode), gaussian.photon_variance(gs, mode))
            fm = fock.photon_moments(fs, mode)
            t.abs(fm[0], gm[0], tol=1e-8 + weight, label=f"fock mean mode {mode}")
            t.abs(fm[1], gm[1], tol=1e-8 + weight, label=f"fock variance mode {mode}")
        # distributor invariance
        for scheme, enc in ((Scheme.NETWORK_DISPLACEMENT, 0.1), (Scheme.NETWORK_PHASE, 1e-3)):
            a = build_pipeline(scheme, 4, 1.0, "dft", enc)
            b = build_pipeline(scheme, 4, 1.0, "hadamard", enc)
            t.abs(signal_stats(a)[0], signal_stats(b)[0], tol=1e-10, label=f"{scheme.value} signal invariance")
            qa, qb = qfi_generator_variance(a), qfi_generator_variance(b)
            t.abs(qa / qb, 1.0, tol=1e-10, label=f"{scheme.value} QFI invariance")
        # shot-noise-like statistics near the dark fringe
        S, dS = signal_stats(build_pipeline(Scheme.NETWORK_PHASE, 4, 1.0, encoding=1e-4))
        t.rel(dS**2 / S, 2.0, tol=1e-2, label="variance/signal limit")

    return _timed(7, "property spot checks", 1e-8, 10.0, body)


CHECKS = (
    check_single_displacement,
    check_single_phase,
    check_displacement_network,
    check_phase_network,
    check_homodyne,
    check_qfi_oracle,
    check_properties,
)


def run_all(selected=None) -> list[CheckResult]:
    return [check() for i, check in enumerate(CHECKS, 1) if selected is None or i in selected]
