import math
import warnings

import numpy as np
import pytest

from qcascade import wavepacket as wp
from qcascade.wavepacket import (
    Envelope,
    PhaseTag,
    Spectrum,
    TransformSpec,
    apply_u_frequency_domain,
    apply_u_time_domain,
    assemble_piecewise_field,
    derive_transform_params,
    envelope_to_spectrum,
    gap_geometry,
    heaviside,
    matched_timing,
    phase_schedule,
    read_envelope,
    read_spectrum,
    spectrum_to_envelope,
    time_map,
    time_map_inverse,
    time_map_inverse_slope,
    time_map_slope,
    write_envelope,
    write_spectrum,
)

FIG2 = TransformSpec(alpha=2.0, omega0=0.0, T=54.0, Delta=6.0, X=12.0)


def decaying_envelope(gamma=1.0, t0=0.0, t1=40.0, dt=1e-3):
    t = t0 + dt * np.arange(int(round((t1 - t0) / dt)) + 1)
    vals = np.where(t >= 0.0, np.exp(-gamma * t / 2.0), 0.0)
    return Envelope(float(t[0]), dt, vals.astype(complex))


def test_envelope_invariants():
    with pytest.raises(ValueError):
        Envelope(0.0, 0.1, np.array([1.0]))
    with pytest.raises(ValueError):
        Envelope(0.0, -0.1, np.array([1.0, 2.0]))
    env = Envelope(1.0, 0.5, np.array([1.0, 2.0, 3.0, 4.0]))
    assert np.allclose(env.times, [1.0, 1.5, 2.0, 2.5])
    assert env.squared_norm() == pytest.approx((1 + 4 + 9 + 16) * 0.5)


def test_envelope_interp():
    t = np.linspace(0.0, 10.0, 2001)
    env = Envelope(0.0, t[1] - t[0], np.exp(-0.3 * t) * np.exp(1j * t))
    # exact at nodes
    assert env.interp(t[123]) == env.samples[123]
    # cubic accuracy between nodes
    probe = np.linspace(0.2, 9.8, 101) + 0.2345 * (t[1] - t[0])
    exact = np.exp(-0.3 * probe) * np.exp(1j * probe)
    assert np.max(np.abs(env.interp(probe) - exact)) < 1e-8
    # zero outside support
    assert env.interp(-1.0) == 0.0
    assert env.interp(11.0) == 0.0


def test_derive_transform_params():
    assert derive_transform_params(1.0, 1.0, 3.0, 3.0) == (1.0, 6.0)
    alpha, omega0 = derive_transform_params(2.0, 1.0, 10.0, 7.0)
    assert alpha == 2.0
    assert omega0 == 12.0
    for g1, g2 in [(0.5, 2.0), (3.0, 1.5)]:
        a, _ = derive_transform_params(g1, g2, 0.0, 0.0)
        assert a * g2 == pytest.approx(g1)


def test_transform_spec_invariants():
    with pytest.raises(ValueError):
        TransformSpec(alpha=0.0, omega0=0.0, T=1.0, Delta=1.0, X=1.0)
    with pytest.raises(ValueError):
        TransformSpec(alpha=1.0, omega0=0.0, T=1.0, Delta=0.0, X=1.0)
    with pytest.raises(ValueError):
        TransformSpec(alpha=1.0, omega0=0.0, T=1.0, Delta=1.0, X=-1.0)
    assert FIG2.position_ok(tau=20.0)
    assert not FIG2.position_ok(tau=10.0)


def test_phase_schedule_fig2():
    s = phase_schedule(FIG2)
    assert (s.t_i, s.t_s, s.t_f, s.t_a) == (12.0, 18.0, 30.0, 18.0)
    # T = (1 + alpha) t_a reproduces the matched timing
    assert matched_timing(2.0, 6.0, 12.0) == 54.0
    # alpha -> 1 with T = 2 t_a gives t_s = t_a
    spec = TransformSpec(alpha=1.0, omega0=0.0, T=2.0 * 18.0, Delta=6.0, X=12.0)
    s1 = phase_schedule(spec)
    assert s1.t_s == s1.t_a == 18.0


def test_apply_u_pure_reversal():
    dt = 0.01
    t = np.arange(-6.0, 0.0 + dt / 2, dt)
    env = Envelope(-6.0, dt, np.exp(-((t + 3.0) ** 2)) * (1.0 + 0.5j))
    spec = TransformSpec(alpha=1.0, omega0=0.0, T=0.0, Delta=6.0, X=1.0)
    out = apply_u_time_domain(env, spec)
    # out(t) = env(-t) on [t_s, t_f] = [0, 6]
    assert out.t0 == pytest.approx(0.0)
    assert np.max(np.abs(out.samples - env.samples[::-1])) < 1e-14


def test_apply_u_rising_exponential():
    env = decaying_envelope()
    out = apply_u_time_domain(env, FIG2)
    assert out.n_zero_filled == 0
    assert out.t0 == pytest.approx(18.0)
    assert out.t_end == pytest.approx(30.0)
    # closed form (1/sqrt(2)) e^{-(54 - t)/4}: a rising exponential
    t_probe = 24.0
    k = int(round((t_probe - out.t0) / out.dt))
    expected = math.exp(-(54.0 - t_probe) / 4.0) / math.sqrt(2.0)
    assert abs(out.samples[k] - expected) < 1e-12
    rate = np.polyfit(out.times, np.log(np.abs(out.samples)), 1)[0]
    assert abs(rate - 0.25) < 1e-6


def test_apply_u_rate_equation_property():
    # the produced envelope grows at +gamma1/(2 alpha): central differences
    env = decaying_envelope()
    out = apply_u_time_domain(env, FIG2)
    mag = np.abs(out.samples)
    deriv = (mag[2:] - mag[:-2]) / (2.0 * out.dt)
    ratio = deriv / mag[1:-1]
    assert np.max(np.abs(ratio - 0.25)) < 1e-6


def test_apply_u_norm_preservation():
    env = decaying_envelope()
    out = apply_u_time_domain(env, FIG2)
    window = env.slice_window(12.0, 18.0)
    assert abs(out.squared_norm() - window.squared_norm()) < 1e-9 * window.squared_norm()


def test_apply_u_zero_fill_and_errors():
    short = decaying_envelope(t1=15.0)  # support ends inside the preimage window
    with pytest.warns(RuntimeWarning, match="zero-filled"):
        out = apply_u_time_domain(short, FIG2)
    assert out.n_zero_filled > 0
    # preimage [12, 18] entirely outside the support -> error
    tiny = decaying_envelope(t1=5.0)
    with pytest.raises(ValueError, match="empty overlap"):
        apply_u_time_domain(tiny, FIG2)


def test_apply_u_explicit_grid():
    env = decaying_envelope(dt=5e-4)
    t_out = np.linspace(19.0, 29.0, 401)
    out = apply_u_time_domain(env, FIG2, t_out=t_out)
    expected = np.exp(-(54.0 - t_out) / 4.0) / math.sqrt(2.0)
    assert np.max(np.abs(out.samples - expected)) < 1e-10


def test_spectrum_roundtrip_and_parseval():
    env = decaying_envelope(dt=0.01, t1=40.95)
    spec = envelope_to_spectrum(env)
    back = spectrum_to_envelope(spec)
    assert back.t0 == pytest.approx(env.t0)
    assert back.dt == pytest.approx(env.dt)
    assert np.max(np.abs(back.samples - env.samples)) < 1e-12
    assert abs(spec.squared_norm() - env.squared_norm()) < 1e-9


def test_apply_u_frequency_trivial_reversal():
    dt = 0.02
    t = np.arange(-20.0, 20.0, dt)
    env = Envelope(float(t[0]), dt, np.exp(-(t**2) / 4.0).astype(complex))
    f = envelope_to_spectrum(env)
    spec = TransformSpec(alpha=1.0, omega0=0.0, T=0.0, Delta=1.0, X=1.0)
    out = apply_u_frequency_domain(f, spec)
    assert np.max(np.abs(out.samples - f.samples[::-1])) < 1e-9
    assert np.allclose(out.nus, -f.nus[::-1], atol=1e-9)


def test_apply_u_frequency_lorentzian_remap():
    # packet from system 1 (gamma1 = 2, omega1 = 10) remapped onto system 2
    g1, g2, w1, w2 = 2.0, 1.0, 10.0, 7.0
    alpha, omega0 = derive_transform_params(g1, g2, w1, w2)
    dt = 0.02
    t = np.arange(0.0, 81.92, dt)
    env = Envelope(0.0, dt, np.sqrt(g1) * np.exp(-(g1 / 2.0 + 1j * w1) * t))
    f = envelope_to_spectrum(env)
    spec = TransformSpec(alpha=alpha, omega0=omega0, T=30.0, Delta=10.0, X=1.0)
    # the sharp turn-on leaves Lorentzian tails at the band edges: advisory fires
    with pytest.warns(RuntimeWarning, match="band edges"):
        out = apply_u_frequency_domain(f, spec)
    mag = np.abs(out.samples)
    peak_nu = out.nus[int(np.argmax(mag))]
    assert abs(peak_nu - w2) < out.dnu
    # FWHM of |f|^2 for a Lorentzian of half-width g2/2 is g2
    power = mag**2
    half = 0.5 * power.max()
    above = out.nus[power >= half]
    assert abs((above[-1] - above[0]) - g2) < 0.05


def test_apply_u_frequency_custom_grid_matches_direct():
    env = decaying_envelope(dt=0.02, t1=40.0)
    f = envelope_to_spectrum(env)
    spec = TransformSpec(alpha=2.0, omega0=1.0, T=10.0, Delta=5.0, X=1.0)
    nus = np.linspace(-2.0, 2.0, 101)
    with pytest.warns(RuntimeWarning, match="band edges"):
        out = apply_u_frequency_domain(f, spec, nu_out=nus)
    u = -spec.alpha * (nus - spec.omega0)
    # reference: evaluate the forward transform at the remapped points
    ref = np.array(
        [
            (env.dt / math.sqrt(2 * math.pi)) * np.sum(env.samples * np.exp(1j * uu * env.times))
            for uu in u
        ]
    )
    expected = math.sqrt(spec.alpha) * ref * np.exp(1j * nus * spec.T)
    assert np.max(np.abs(out.samples - expected)) < 1e-10


def test_apply_u_frequency_band_error():
    env = decaying_envelope(dt=0.02, t1=40.0)
    f = envelope_to_spectrum(env)
    spec = TransformSpec(alpha=2.0, omega0=1.0, T=10.0, Delta=5.0, X=1.0)
    width = f.nu_end - f.nu0
    bad = np.linspace(f.nu0 - width, f.nu0, 64)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # band-edge advisory
        with pytest.raises(ValueError, match="band"):
            apply_u_frequency_domain(f, spec, nu_out=bad)


def test_path_equivalence_time_vs_frequency():
    for kind in ("gaussian", "truncated"):
        dt = 0.02
        n = 4096
        t = -40.0 + dt * np.arange(n)
        if kind == "gaussian":
            vals = np.exp(-(t**2) / 8.0) * np.exp(0.5j * t)
        else:
            vals = np.where(t >= 0.0, np.exp(-t / 2.0), 0.0)
        env = Envelope(-40.0, dt, vals.astype(complex))
        spec = TransformSpec(alpha=2.0, omega0=1.3, T=10.0, Delta=20.0, X=1.0)
        out_t = apply_u_time_domain(env, spec)
        f = envelope_to_spectrum(env)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)  # band-edge advisory
            fo = apply_u_frequency_domain(f, spec)
        out_f = spectrum_to_envelope(fo, t0=out_t.t0, dt=out_t.dt, n=out_t.samples.size)
        rel = np.linalg.norm(out_f.samples - out_t.samples) / np.linalg.norm(out_t.samples)
        assert rel < 1e-6


def test_heaviside_convention():
    assert heaviside(-1.0) == 0.0
    assert heaviside(0.0) == 0.5
    assert heaviside(2.0) == 1.0


def test_assemble_piecewise_field_fig2():
    env = decaying_envelope()
    transformed = apply_u_time_domain(env, FIG2)
    sched = phase_schedule(FIG2)
    # inside the buffering gap at the device: vacuum
    amp, tag = assemble_piecewise_field(12.0, 15.0, env, transformed, FIG2, sched)
    assert tag is PhaseTag.VACUUM and amp == 0.0
    # during production: the rising exponential
    amp, tag = assemble_piecewise_field(12.0, 24.0, env, transformed, FIG2, sched)
    assert tag is PhaseTag.TRANSFORMED
    assert abs(amp - math.exp(-(54.0 - 24.0) / 4.0) / math.sqrt(2.0)) < 1e-10
    # the transformed packet propagates at speed c
    amp2, tag2 = assemble_piecewise_field(15.0, 27.0, env, transformed, FIG2, sched)
    assert tag2 is PhaseTag.TRANSFORMED
    assert amp2 == pytest.approx(amp)
    # upstream of the device: freely propagated initial field
    amp, tag = assemble_piecewise_field(5.0, 8.0, env, transformed, FIG2, sched)
    assert tag is PhaseTag.INITIAL
    assert abs(amp - math.exp(-(8.0 - 5.0) / 2.0)) < 1e-10
    # x < 0: Heaviside cutoff
    amp, tag = assemble_piecewise_field(-1.0, 8.0, env, transformed, FIG2, sched)
    assert tag is PhaseTag.INITIAL and amp == 0.0
    # u(0) = 1/2 at the emitter
    amp, tag = assemble_piecewise_field(0.0, 8.0, env, transformed, FIG2, sched)
    assert abs(amp - 0.5 * math.exp(-4.0)) < 1e-10
    # after production ends the initial field passes again
    amp, tag = assemble_piecewise_field(12.0, 31.0, env, transformed, FIG2, sched)
    assert tag is PhaseTag.INITIAL
    assert abs(amp - math.exp(-(31.0 - 12.0) / 2.0)) < 1e-10


def test_time_map_values():
    sched = phase_schedule(FIG2)
    assert time_map(20.0, FIG2, sched, 0.0) == pytest.approx(17.0)
    assert time_map(14.0, FIG2, sched, 0.0) is None
    assert time_map(5.0, FIG2, sched, 0.0) == 5.0
    assert time_map(35.0, FIG2, sched, 1.0) == 34.0
    # boundary convention: continuous branch values
    assert time_map(18.0, FIG2, sched, 0.0) == 18.0
    assert time_map(30.0, FIG2, sched, 0.0) == 30.0


def test_time_map_slopes_and_monotone_branch():
    sched = phase_schedule(FIG2)
    assert time_map_slope(20.0, FIG2, sched) == -0.5
    assert time_map_slope(5.0, FIG2, sched) == 1.0
    assert time_map_slope(14.0, FIG2, sched) is None
    assert time_map_inverse_slope(13.0, FIG2, sched, 0.0) == -2.0
    # the fictitious clock runs backwards on the production window
    ts = np.linspace(18.001, 29.999, 50)
    vals = [time_map(float(t), FIG2, sched, 0.0) for t in ts]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_time_map_inverse_and_identity():
    sched = phase_schedule(FIG2)
    tau = 0.7
    assert time_map_inverse(13.0 - tau, FIG2, sched, tau) == pytest.approx(54.0 - 2.0 * 13.0)
    assert time_map_inverse(20.0 - tau, FIG2, sched, tau) is None
    for t in np.linspace(-5.0, 45.0, 401):
        finv = time_map_inverse(float(t), FIG2, sched, tau)
        if finv is None:
            continue
        assert time_map(finv, FIG2, sched, tau) == pytest.approx(float(t), abs=1e-12)


def test_gap_geometry():
    sched = phase_schedule(FIG2)
    horizontal, vertical = gap_geometry(FIG2, sched)
    assert horizontal == 6.0
    assert vertical == 12.0
    # measured from the map itself: the undefined window and the skipped band
    f_at = lambda t: time_map(t, FIG2, sched, 0.0)
    assert f_at(sched.t_f) - f_at(sched.t_s) == vertical
    assert f_at(12.0 + 1e-9) is None and f_at(18.0 - 1e-9) is None


def test_envelope_file_roundtrip(tmp_path):
    env = decaying_envelope(dt=0.05, t1=4.0)
    path = tmp_path / "env.csv"
    write_envelope(env, path)
    back = read_envelope(path)
    assert back.t0 == pytest.approx(env.t0)
    assert back.dt == pytest.approx(env.dt)
    assert np.max(np.abs(back.samples - env.samples)) < 1e-15
    text = path.read_text()
    assert text.startswith("#") and "t,re,im" in text


def test_spectrum_file_roundtrip(tmp_path):
    env = decaying_envelope(dt=0.05, t1=4.0)
    spec = envelope_to_spectrum(env)
    path = tmp_path / "spec.csv"
    write_spectrum(spec, path)
    back = read_spectrum(path)
    assert back.nu0 == pytest.approx(spec.nu0)
    assert back.dnu == pytest.approx(spec.dnu)
    assert back.t_ref == pytest.approx(spec.t_ref)
    assert np.max(np.abs(back.samples - spec.samples)) < 1e-12
