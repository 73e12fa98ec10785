import math

import numpy as np
import pytest

from qcascade import cascade
from qcascade.cascade import (
    IDENT4,
    NUMBER1,
    NUMBER2,
    SIGMA1_MINUS,
    SIGMA1_PLUS,
    SIGMA2_MINUS,
    SIGMA2_PLUS,
    CascadeModel,
    IntegrationAbort,
    build_h0,
    build_h_eff,
    build_h_ex,
    build_h_sys,
    build_jump_operator,
    heisenberg_consistency,
    integrate_master,
    lindblad_rhs,
    liouvillian,
)
from qcascade.hilbert import composite_ket, dagger, density_from_ket, kron, two_level_ket
from qcascade.wavepacket import TransformSpec


def plus_g_density():
    plus = (two_level_ket("e") + two_level_ket("g")) / math.sqrt(2.0)
    psi = kron(plus, two_level_ket("g"))
    return density_from_ket(psi)


def random_density(rng, dim=4):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_model_invariants():
    with pytest.raises(ValueError):
        CascadeModel(gamma1=0.0, gamma2=1.0)
    with pytest.raises(ValueError):
        CascadeModel(gamma1=1.0, gamma2=-2.0)
    with pytest.raises(ValueError):
        CascadeModel(gamma1=1.0, gamma2=1.0, tau=-1.0)
    m = CascadeModel(gamma1=1.0, gamma2=1.0, omega1=3.0, omega2=5.0, rotating_frame=True)
    assert m.frame_omegas() == (0.0, 0.0)
    lab = CascadeModel(gamma1=1.0, gamma2=1.0, omega1=3.0, omega2=5.0, rotating_frame=False)
    assert lab.frame_omegas() == (3.0, 5.0)


def test_jump_operator():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    assert np.array_equal(build_jump_operator(m), SIGMA1_MINUS + SIGMA2_MINUS)
    assert np.array_equal(build_jump_operator(m) @ composite_ket("gg"), np.zeros(4))
    mb = CascadeModel(gamma1=4.0, gamma2=1.0, beta=0.5 + 0.25j)
    assert np.allclose(
        build_jump_operator(mb),
        2.0 * SIGMA1_MINUS + SIGMA2_MINUS + (0.5 + 0.25j) * IDENT4,
    )


def test_h_ex_structure():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    expected = (-0.5j) * (SIGMA2_PLUS @ SIGMA1_MINUS - SIGMA1_PLUS @ SIGMA2_MINUS)
    assert np.array_equal(build_h_ex(m), expected)
    # coefficient of the s2+ s1- term is -i sqrt(gamma1 gamma2)/2
    m41 = CascadeModel(gamma1=1.0, gamma2=4.0)
    assert build_h_ex(m41)[2, 1] == -1j  # <g,e| H_ex |e,g>
    assert np.array_equal(build_h0(m), build_h_sys(m) + build_h_ex(m))


def test_h_ex_hermitian_random_models():
    rng = np.random.default_rng(5)
    for _ in range(10):
        m = CascadeModel(
            gamma1=float(rng.uniform(0.1, 4.0)),
            gamma2=float(rng.uniform(0.1, 4.0)),
            beta=complex(rng.normal(), rng.normal()),
        )
        hex_ = build_h_ex(m)
        assert np.max(np.abs(hex_ - dagger(hex_))) == 0.0
        heff = build_h_eff(m)
        j = build_jump_operator(m)
        anti = (heff - dagger(heff)) / 2.0
        assert np.max(np.abs(anti - (-0.5j) * (dagger(j) @ j))) < 1e-14


def test_h_eff_explicit_form():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)  # rotating frame, H_sys = 0
    expected = (-0.5j) * (NUMBER1 + NUMBER2 + 2.0 * SIGMA1_MINUS @ SIGMA2_PLUS)
    assert np.allclose(build_h_eff(m), expected, atol=1e-15)


@pytest.mark.parametrize("g1,g2", [(1.0, 1.0), (1.0, 4.0), (2.0, 0.5)])
def test_h_eff_unidirectional_elements(g1, g2):
    m = CascadeModel(gamma1=g1, gamma2=g2)
    heff = build_h_eff(m)
    # basis |ee>=0, |eg>=1, |ge>=2, |gg>=3
    assert heff[2, 1] == pytest.approx(-1j * math.sqrt(g1 * g2), abs=1e-15)
    assert heff[1, 2] == 0.0


def test_lindblad_rhs_values():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    dark = density_from_ket(composite_ket("gg"))
    assert np.max(np.abs(lindblad_rhs(dark, m))) < 1e-15
    rho = density_from_ket(composite_ket("eg"))
    # d<P1>/dt = Tr(N1 rhs) = -gamma1 for the excited state
    assert np.trace(NUMBER1 @ lindblad_rhs(rho, m)).real == pytest.approx(-1.0, abs=1e-12)


def test_lindblad_rhs_traceless_random():
    rng = np.random.default_rng(13)
    m = CascadeModel(gamma1=1.3, gamma2=0.7, beta=0.4 - 0.2j)
    for _ in range(10):
        rho = random_density(rng)
        assert abs(np.trace(lindblad_rhs(rho, m))) < 1e-12


def test_liouvillian_matches_direct_rhs():
    rng = np.random.default_rng(17)
    m = CascadeModel(gamma1=2.0, gamma2=0.5, beta=0.3 + 0.1j)
    lmat = liouvillian(m)
    for _ in range(5):
        rho = random_density(rng)
        direct = lindblad_rhs(rho, m)
        assert np.max(np.abs(lmat @ rho.reshape(-1) - direct.reshape(-1))) < 1e-12


def test_integrate_master_decay():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    run = integrate_master(density_from_ket(composite_ket("eg")), m, (0.0, 1.0), 1e-3)
    assert abs(run.p1[-1] - math.exp(-1.0)) < 1e-6
    assert run.p2[0] == 0.0


def test_integrate_master_stationary():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    rho0 = density_from_ket(composite_ket("gg"))
    run = integrate_master(rho0, m, (0.0, 2.0), 1e-2)
    assert np.max(np.abs(run.rhos - rho0)) < 1e-12


def test_integrate_master_peak():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    run = integrate_master(density_from_ket(composite_ket("eg")), m, (0.0, 5.0), 1e-3)
    peak = float(np.max(run.p2))
    assert abs(peak - 4.0 * math.exp(-2.0)) < 1e-4
    assert abs(run.times[int(np.argmax(run.p2))] - 2.0) <= 1e-3 + 1e-12


def test_integrate_master_state_quality():
    m = CascadeModel(gamma1=1.0, gamma2=1.0, beta=0.5)
    rho0 = density_from_ket(composite_ket("eg"))
    run = integrate_master(rho0, m, (0.0, 10.0), 1e-3)
    assert float(np.max(run.trace_deviation())) < 1e-9
    assert float(np.min(run.min_eigenvalues())) >= -1e-8
    herm = np.max(np.abs(run.rhos - run.rhos.conj().transpose(0, 2, 1)))
    assert herm < 1e-12


def test_two_clock_tagging():
    m = CascadeModel(gamma1=1.0, gamma2=1.0, tau=1.5)
    run = integrate_master(density_from_ket(composite_ket("gg")), m, (0.0, 1.0), 0.1)
    assert np.allclose(run.tilde_t, run.times - 1.5)
    spec = TransformSpec(alpha=2.0, omega0=0.0, T=54.0, Delta=6.0, X=12.0)
    run2 = integrate_master(
        density_from_ket(composite_ket("gg")), m, (10.0, 32.0), 0.5, transform=spec
    )
    states = run2.states()
    by_t = {round(s.t, 6): s for s in states}
    assert by_t[20.0].tilde_t == pytest.approx((54.0 - 20.0) / 2.0 - 1.5)
    assert by_t[14.0].tilde_t is None
    assert by_t[31.0].tilde_t == pytest.approx(31.0 - 1.5)


def test_unidirectionality_system2_alone():
    # system 1 in the ground state must leave system 2's evolution untouched
    m = CascadeModel(gamma1=1.7, gamma2=0.6)
    plus = (two_level_ket("e") + two_level_ket("g")) / math.sqrt(2.0)
    rho0 = density_from_ket(kron(two_level_ket("g"), plus))
    run = integrate_master(rho0, m, (0.0, 4.0), 1e-3)

    # reference: lone two-level atom with the same gamma2, integrated with
    # the same superoperator machinery on the 2-dim space
    sm = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    lone = cascade._superoperator(np.zeros((2, 2), dtype=complex), math.sqrt(0.6) * sm)
    hist = cascade._rk4_density_history(lone, density_from_ket(plus), 4000, 1e-3)
    p2_alone = hist[:, 0, 0].real
    assert np.max(np.abs(run.p2 - p2_alone)) < 1e-10


def test_heisenberg_consistency_superposition():
    m = CascadeModel(gamma1=1.0, gamma2=2.0)
    report = heisenberg_consistency(m, (0.0, 10.0), 1e-3)
    assert report.max_deviation < 1e-6


def test_lab_frame_coherence_rotates():
    # without the rotating frame the coherence carries the carrier e^{-i w1 t}
    m = CascadeModel(gamma1=1.0, gamma2=1.0, omega1=3.0, omega2=5.0, rotating_frame=False)
    run = integrate_master(plus_g_density(), m, (0.0, 2.0), 1e-3)
    expected = 0.5 * np.exp(-(0.5 + 3.0j) * run.times)
    assert np.max(np.abs(run.sigma1 - expected)) < 1e-9
    report = heisenberg_consistency(m, (0.0, 5.0), 1e-3)
    assert report.max_deviation < 1e-6


def test_heisenberg_consistency_ground_trivial():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    report = heisenberg_consistency(
        m, (0.0, 2.0), 1e-2, rho0=density_from_ket(composite_ket("gg"))
    )
    assert report.max_deviation <= 1e-15


def test_heisenberg_consistency_excited_state():
    # |e,g> has no coherences, so both sides vanish identically
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    report = heisenberg_consistency(
        m, (0.0, 10.0), 1e-2, rho0=density_from_ket(composite_ket("eg"))
    )
    assert report.max_deviation < 1e-6


def test_heisenberg_consistency_weak_drive():
    # beta != 0 makes the sz -> -1 closure approximate; from the ground
    # state the bias stays at the 2 P1 sqrt(gamma) beta scale (~1e-3 here)
    m = CascadeModel(gamma1=1.0, gamma2=1.0, beta=0.05)
    report = heisenberg_consistency(
        m, (0.0, 5.0), 1e-3, rho0=density_from_ket(composite_ket("gg"))
    )
    assert report.max_deviation < 5e-3
    assert report.analytic_sigma1_deviation is None


def test_heisenberg_rk4_order():
    # Richardson check against the closed-form decay: halving dt divides the
    # integrator error by ~2^4
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    coarse = heisenberg_consistency(m, (0.0, 4.0), 0.1).analytic_sigma1_deviation
    fine = heisenberg_consistency(m, (0.0, 4.0), 0.05).analytic_sigma1_deviation
    assert coarse is not None and fine is not None
    assert coarse > 1e-12  # above round-off so the ratio is meaningful
    assert 8.0 < coarse / fine < 32.0


def test_integrate_master_abort_on_blowup():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    with pytest.raises(IntegrationAbort, match="step"):
        integrate_master(density_from_ket(composite_ket("eg")), m, (0.0, 100.0), 5.0)


def test_integrate_master_input_validation():
    m = CascadeModel(gamma1=1.0, gamma2=1.0)
    rho0 = density_from_ket(composite_ket("eg"))
    with pytest.raises(ValueError):
        integrate_master(rho0, m, (0.0, 1.0), -0.1)
    with pytest.raises(ValueError):
        integrate_master(rho0, m, (1.0, 0.0), 0.1)
    with pytest.raises(ValueError):
        integrate_master(np.eye(3) / 3.0, m, (0.0, 1.0), 0.1)
