"""Command-line front end: run named experiments from a JSON config.

Usage: qcascade [EXPERIMENT] --config cfg.json [--out DIR] [--svg]
       [--seed N] [--validate-only]

The config is a single JSON file with nested sections (model, transform,
numerics, output); the optional positional argument overrides the
experiment named in the config.  Each run writes <experiment>.csv
(comma-separated, '#'-prefixed header comments embedding the resolved
config, undefined values encoded as empty fields) and optionally a
self-contained <experiment>.svg.  All outputs are in the natural units
of the problem (time in 1/gamma1, length in c/gamma1) and are
byte-identical for identical configs, seed included.

Exit status: 0 on success, 2 for an invalid config (the message names
the offending field), 3 when an integrator aborts.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cascade, trajectory, transfer, wavepacket
from .cascade import CascadeModel, IntegrationAbort
from .hilbert import composite_ket, density_from_ket, kron, two_level_ket
from .svgplot import line_plot
from .wavepacket import TransformSpec, matched_timing, phase_schedule

__all__ = ["RunConfig", "ConfigError", "load_config", "validate", "run", "main"]

EXPERIMENTS = (
    "decay",
    "lindblad",
    "trajectories",
    "transform",
    "phases",
    "timemap",
    "transfer",
)

INITIAL_STATES = ("eg", "ge", "ee", "gg", "plus_g")

_SPAN_REQUIRED = {"decay", "lindblad", "trajectories", "transform", "phases"}


class ConfigError(ValueError):
    """Configuration problem; the message names the offending field."""


@dataclass
class RunConfig:
    """Parsed but not yet materialized run configuration."""

    experiment: str
    model: dict
    numerics: dict
    output: dict
    transform: dict | None = None

    def resolved(self) -> dict:
        out = {
            "experiment": self.experiment,
            "model": dict(self.model),
            "numerics": dict(self.numerics),
            "output": dict(self.output),
        }
        if self.transform is not None:
            out["transform"] = dict(self.transform)
        return out


def _expect_mapping(raw: dict, key: str, required: bool) -> dict | None:
    if key not in raw:
        if required:
            raise ConfigError(f"{key}: section missing")
        return None
    if not isinstance(raw[key], dict):
        raise ConfigError(f"{key}: expected an object")
    return dict(raw[key])


def load_config(path) -> RunConfig:
    """Parse the JSON config; structural problems raise ConfigError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    if "experiment" not in raw or not isinstance(raw["experiment"], str):
        raise ConfigError("experiment: required string field")
    model = _expect_mapping(raw, "model", required=True)
    numerics = _expect_mapping(raw, "numerics", required=True)
    output = _expect_mapping(raw, "output", required=False) or {}
    transform = _expect_mapping(raw, "transform", required=False)
    return RunConfig(
        experiment=raw["experiment"],
        model=model,
        numerics=numerics,
        output=output,
        transform=transform,
    )


def _number(section: dict, section_name: str, key: str, default=None) -> float:
    if key not in section:
        if default is None:
            raise ConfigError(f"{section_name}.{key}: required number")
        return float(default)
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section_name}.{key}: expected a number, got {v!r}")
    return float(v)


def _beta(model: dict) -> complex:
    v = model.get("beta", 0.0)
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError("model.beta: expected a number or a [re, im] pair")


def build_model(cfg: RunConfig) -> CascadeModel:
    m = cfg.model
    rotating = m.get("rotating_frame", True)
    if not isinstance(rotating, bool):
        raise ConfigError("model.rotating_frame: expected a boolean")
    try:
        return CascadeModel(
            gamma1=_number(m, "model", "gamma1"),
            gamma2=_number(m, "model", "gamma2"),
            omega1=_number(m, "model", "omega1", 0.0),
            omega2=_number(m, "model", "omega2", 0.0),
            tau=_number(m, "model", "tau", 0.0),
            beta=_beta(m),
            rotating_frame=rotating,
        )
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


def _auto_or_number(section: dict, name: str, key: str) -> float | None:
    if key not in section or section[key] == "auto":
        return None
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name}.{key}: expected a number or 'auto', got {v!r}")
    return float(v)


def build_transform_spec(cfg: RunConfig, model: CascadeModel) -> TransformSpec:
    """Resolve the transform section; alpha/omega0/T may be 'auto'."""
    section = cfg.transform
    if section is None:
        if cfg.experiment != "transfer":
            raise ConfigError("transform: section required for this experiment")
        section = {}
    name = "transform"
    w1, w2 = model.frame_omegas()
    auto_alpha, auto_omega0 = wavepacket.derive_transform_params(
        model.gamma1, model.gamma2, w1, w2
    )
    delta = _number(section, name, "Delta", 8.0 / model.gamma1 if cfg.experiment == "transfer" else None)
    c = _number(section, name, "c", 1.0)
    x = _number(section, name, "X", c * delta if cfg.experiment == "transfer" else None)
    alpha = _auto_or_number(section, name, "alpha")
    if alpha is None:
        alpha = auto_alpha
    omega0 = _auto_or_number(section, name, "omega0")
    if omega0 is None:
        omega0 = auto_omega0
    timing = _auto_or_number(section, name, "T")
    if timing is None:
        timing = matched_timing(alpha, delta, x, c)
    try:
        return TransformSpec(alpha=alpha, omega0=omega0, T=timing, Delta=delta, X=x, c=c)
    except ValueError as exc:
        raise ConfigError(f"transform: {exc}") from exc


def _numerics(cfg: RunConfig) -> dict:
    n = cfg.numerics
    out: dict = {}
    out["dt"] = _number(n, "numerics", "dt", 0.0) if "dt" in n else None
    if "t_span" in n:
        span = n["t_span"]
        if (
            not isinstance(span, (list, tuple))
            or len(span) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in span)
        ):
            raise ConfigError("numerics.t_span: expected [t0, t1]")
        out["t_span"] = (float(span[0]), float(span[1]))
    else:
        out["t_span"] = None
    n_traj = n.get("n_traj", 1000)
    if isinstance(n_traj, bool) or not isinstance(n_traj, int):
        raise ConfigError("numerics.n_traj: expected an integer")
    out["n_traj"] = n_traj
    seed = n.get("seed", 12345)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("numerics.seed: expected an integer")
    out["seed"] = seed
    stride = n.get("record_stride", 1)
    if isinstance(stride, bool) or not isinstance(stride, int):
        raise ConfigError("numerics.record_stride: expected an integer")
    out["record_stride"] = stride
    initial = n.get("initial_state", "eg")
    if not isinstance(initial, str):
        raise ConfigError("numerics.initial_state: expected a string")
    out["initial_state"] = initial
    snaps = n.get("snapshot_times")
    if snaps is not None:
        if not isinstance(snaps, (list, tuple)) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in snaps
        ):
            raise ConfigError("numerics.snapshot_times: expected a list of numbers")
        snaps = [float(v) for v in snaps]
    out["snapshot_times"] = snaps
    out["x_max"] = _number(n, "numerics", "x_max", 0.0) if "x_max" in n else None
    nx = n.get("nx", 961)
    if isinstance(nx, bool) or not isinstance(nx, int):
        raise ConfigError("numerics.nx: expected an integer")
    out["nx"] = nx
    return out


def validate(cfg: RunConfig) -> list[str]:
    """Return every violated precondition without running anything."""
    diags: list[str] = []
    if cfg.experiment not in EXPERIMENTS:
        diags.append(
            f"experiment: unknown {cfg.experiment!r}, expected one of {', '.join(EXPERIMENTS)}"
        )
    model = None
    try:
        model = build_model(cfg)
    except ConfigError as exc:
        diags.append(str(exc))
    try:
        num = _numerics(cfg)
    except ConfigError as exc:
        diags.append(str(exc))
        return diags
    dt = num["dt"]
    span = num["t_span"]
    needs_dt = cfg.experiment in _SPAN_REQUIRED | {"transfer"}
    if dt is None:
        if needs_dt:
            diags.append("numerics.dt: required for this experiment")
    elif dt <= 0.0:
        diags.append("numerics.dt: must be positive")
    if span is None:
        if cfg.experiment in _SPAN_REQUIRED:
            diags.append("numerics.t_span: required for this experiment")
    elif span[1] <= span[0]:
        diags.append("numerics.t_span: must satisfy t1 > t0")
    if model is not None and dt is not None and dt > 0.0:
        scale = max(model.gamma1, model.gamma2, abs(model.beta) ** 2)
        if dt * scale > 0.1:
            diags.append(
                f"numerics.dt: dt*max(gamma1, gamma2, |beta|^2) = {dt * scale:.3g} "
                "exceeds the bound 0.1"
            )
        if cfg.experiment == "trajectories":
            b = 4.0 * dt * (model.gamma1 + model.gamma2 + abs(model.beta) ** 2)
            if b >= 0.1:
                diags.append(
                    f"numerics.dt: 4*dt*(gamma1 + gamma2 + |beta|^2) = {b:.3g} "
                    "must stay below 0.1 for trajectories"
                )
    if cfg.experiment == "trajectories":
        if num["n_traj"] < 1:
            diags.append("numerics.n_traj: must be at least 1")
        if not 0 <= num["seed"] < 2**64:
            diags.append("numerics.seed: must fit in an unsigned 64-bit integer")
    if num["initial_state"] not in INITIAL_STATES:
        diags.append(
            f"numerics.initial_state: unknown {num['initial_state']!r}, "
            f"expected one of {', '.join(INITIAL_STATES)}"
        )
    spec = None
    if cfg.experiment in ("transform", "phases", "timemap", "transfer") and model is not None:
        try:
            spec = build_transform_spec(cfg, model)
        except ConfigError as exc:
            diags.append(str(exc))
    if spec is not None and model is not None:
        if model.tau > 0.0 and not spec.position_ok(model.tau):
            diags.append(
                f"transform.X: device position {spec.X} must satisfy 0 < X < c*tau = "
                f"{spec.c * model.tau}"
            )
        if cfg.experiment in ("transform", "phases") and span is not None:
            sched = phase_schedule(spec)
            pre_lo = (spec.T - sched.t_f) / spec.alpha
            pre_hi = (spec.T - sched.t_s) / spec.alpha
            shift = spec.X / spec.c
            if span[0] + shift > pre_lo + 1e-9 or span[1] + shift < pre_hi - 1e-9:
                diags.append(
                    "numerics.t_span: envelope window does not cover the "
                    f"transformation preimage [{pre_lo - shift:.6g}, {pre_hi - shift:.6g}] "
                    "(band coverage)"
                )
        if cfg.experiment == "transfer" and span is not None:
            sched = phase_schedule(spec)
            if span[1] < sched.t_f:
                diags.append(
                    f"numerics.t_span: ends at {span[1]:.6g} before the transformed "
                    f"packet is fully produced (t_f = {sched.t_f:.6g})"
                )
    out_dir = cfg.output.get("directory", ".")
    if not isinstance(out_dir, str):
        diags.append("output.directory: expected a string path")
    if not isinstance(cfg.output.get("emit_svg", False), bool):
        diags.append("output.emit_svg: expected a boolean")
    return diags


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return ""
    return repr(f)


def _write_csv(path: Path, comments: list[str], header: list[str], rows) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _provenance(cfg: RunConfig) -> str:
    return "config " + json.dumps(cfg.resolved(), sort_keys=True, separators=(",", ":"))


def _units_comment(model: CascadeModel) -> str:
    return (
        "units: time in 1/gamma1, length in c/gamma1, field amplitude in "
        f"sqrt(gamma1)*<sigma1-(0)>; gamma1 = {model.gamma1!r}"
    )


def _initial_ket(name: str) -> np.ndarray:
    if name == "plus_g":
        plus = (two_level_ket("e") + two_level_ket("g")) / math.sqrt(2.0)
        return kron(plus, two_level_ket("g"))
    return composite_ket(name)


def _run_decay(cfg: RunConfig, out_dir: Path, emit_svg: bool) -> list[Path]:
    model = build_model(cfg)
    num = _numerics(cfg)
    dt = num["dt"]
    t0, t1 = num["t_span"]
    n_steps = int(round((t1 - t0) / dt))
    rho_eg = density_from_ket(_initial_ket("eg"))
    rho_plus = density_from_ket(_initial_ket("plus_g"))
    hist = cascade._rk4_density_history(
        cascade.liouvillian(model), np.stack([rho_eg, rho_plus]), n_steps, dt
    )
    times = t0 + dt * np.arange(n_steps + 1)
    eg = hist[:, 0]
    plus = hist[:, 1]
    p1 = np.einsum("nij,ji->n", eg, cascade.NUMBER1).real
    p2 = np.einsum("nij,ji->n", eg, cascade.NUMBER2).real
    s1 = np.einsum("nij,ji->n", eg, cascade.SIGMA1_MINUS)
    s2 = np.einsum("nij,ji->n", eg, cascade.SIGMA2_MINUS)
    coh = np.einsum("nij,ji->n", plus, cascade.SIGMA1_MINUS)
    ratio = coh / coh[0]
    rows = zip(times, p1, p2, s1.real, s1.imag, s2.real, s2.imag, ratio.real, ratio.imag)
    csv_path = out_dir / "decay.csv"
    _write_csv(
        csv_path,
        [
            _provenance(cfg),
            _units_comment(model),
            "free decay: P columns from |e,g>, decay_* = <sigma1->(t)/<sigma1->(0) "
            "from ((|e>+|g>)/sqrt2) (x) |g>",
        ],
        ["t", "P1", "P2", "re_sigma1", "im_sigma1", "re_sigma2", "im_sigma2",
         "decay_re", "decay_im"],
        rows,
    )
    paths = [csv_path]
    if emit_svg:
        svg_path = out_dir / "decay.svg"
        line_plot(
            svg_path,
            [(times, p1, "P1"), (times, p2, "P2"), (times, np.abs(ratio), "|decay|")],
            title="free decay",
            xlabel="t (1/gamma1)",
            ylabel="probability / amplitude",
        )
        paths.append(svg_path)
    return paths


def _run_lindblad(cfg: RunConfig, out_dir: Path, emit_svg: bool) -> list[Path]:
    model = build_model(cfg)
    num = _numerics(cfg)
    rho0 = density_from_ket(_initial_ket(num["initial_state"]))
    spec = build_transform_spec(cfg, model) if cfg.transform is not None else None
    run_ = cascade.integrate_master(rho0, model, num["t_span"], num["dt"], transform=spec)
    trace_dev = run_.trace_deviation()
    min_eig = run_.min_eigenvalues()
    rows = zip(
        run_.times,
        run_.tilde_t,
        run_.p1,
        run_.p2,
        run_.sigma1.real,
        run_.sigma1.imag,
        run_.sigma2.real,
        run_.sigma2.imag,
        trace_dev,
        min_eig,
    )
    csv_path = out_dir / "lindblad.csv"
    _write_csv(
        csv_path,
        [_provenance(cfg), _units_comment(model),
         f"initial state {num['initial_state']}"],
        ["t", "tilde_t", "P1", "P2", "re_sigma1", "im_sigma1", "re_sigma2",
         "im_sigma2", "trace_dev", "min_eig"],
        rows,
    )
    paths = [csv_path]
    if emit_svg:
        svg_path = out_dir / "lindblad.svg"
        line_plot(
            svg_path,
            [(run_.times, run_.p1, "P1"), (run_.times, run_.p2, "P2")],
            title="master equation",
            xlabel="t (1/gamma1)",
            ylabel="excitation probability",
        )
        paths.append(svg_path)
    return paths


def _run_trajectories(cfg: RunConfig, out_dir: Path, emit_svg: bool) -> list[Path]:
    model = build_model(cfg)
    num = _numerics(cfg)
    tcfg = trajectory.TrajectoryConfig(
        dt=num["dt"],
        n_traj=num["n_traj"],
        seed=num["seed"],
        t_span=num["t_span"],
        record_stride=num["record_stride"],
    )
    psi0 = _initial_ket(num["initial_state"])
    ens = trajectory.ensemble_average(psi0, model, tcfg)
    master = cascade.integrate_master(
        density_from_ket(psi0), model, num["t_span"], num["dt"]
    )
    p2_me = master.p2[:: num["record_stride"]][: ens.times.size]
    dev = np.abs(ens.p2 - p2_me)
    csv_path = out_dir / "trajectories.csv"
    rows = zip(ens.times, ens.p1, ens.p2, ens.sem_p2, p2_me, dev)
    _write_csv(
        csv_path,
        [
            _provenance(cfg),
            _units_comment(model),
            f"n_traj = {ens.n_traj}, seed = {num['seed']}",
            f"mean_jumps = {ens.mean_jumps!r}",
            f"max_abs_dev = {float(np.max(dev))!r}",
        ],
        ["t", "P1", "P2", "sem_P2", "P2_master", "abs_dev"],
        rows,
    )
    edges = np.linspace(num["t_span"][0], num["t_span"][1], 51)
    counts, _ = np.histogram(ens.jump_times, bins=edges)
    hist_path = out_dir / "trajectories_jumps.csv"
    _write_csv(
        hist_path,
        [_provenance(cfg), "jump-time histogram"],
        ["bin_lo", "bin_hi", "count"],
        zip(edges[:-1], edges[1:], counts),
    )
    paths = [csv_path, hist_path]
    if emit_svg:
        svg_path = out_dir / "trajectories.svg"
        line_plot(
            svg_path,
            [(ens.times, ens.p2, "P2 ensemble"), (ens.times, p2_me, "P2 master")],
            title=f"quantum trajectories (n = {ens.n_traj})",
            xlabel="t (1/gamma1)",
            ylabel="P2",
        )
        paths.append(svg_path)
    return paths


def _device_envelope(model: CascadeModel, spec: TransformSpec, num: dict):
    """Emitted envelope referenced to device time (shifted by X/c)."""
    t0, t1 = num["t_span"]
    dt = num["dt"]
    grid = t0 + dt * np.arange(int(round((t1 - t0) / dt)) + 1)
    w1, _ = model.frame_omegas()
    emitted = transfer.emit_envelope(
        model.gamma1, w1, 1.0, grid, rotating_frame=model.rotating_frame
    )
    return emitted.shifted(spec.X / spec.c)


def _run_transform(cfg: RunConfig, out_dir: Path, emit_svg: bool) -> list[Path]:
    model = build_model(cfg)
    num = _numerics(cfg)
    spec = build_transform_spec(cfg, model)
    sched = phase_schedule(spec)
    at_device = _device_envelope(model, spec, num)
    out_env = wavepacket.apply_u_time_domain(at_device, spec)
    pre_lo = (spec.T - sched.t_f) / spec.alpha
    pre_hi = (spec.T - sched.t_s) / spec.alpha
    window = at_device.slice_window(pre_lo, pre_hi)
    rows = [
        ("in", t, v.real, v.imag, abs(v))
        for t, v in zip(at_device.times, at_device.samples)
    ] + [
        ("out", t, v.real, v.imag, abs(v))
        for t, v in zip(out_env.times, out_env.samples)
    ]
    csv_path = out_dir / "transform.csv"
    _write_csv(
        csv_path,
        [
            _provenance(cfg),
            _units_comment(model),
            f"alpha = {spec.alpha!r}, omega0 = {spec.omega0!r}, T = {spec.T!r}",
            f"schedule.t_i = {sched.t_i!r}",
            f"schedule.t_s = {sched.t_s!r}",
            f"schedule.t_f = {sched.t_f!r}",
            f"schedule.t_a = {sched.t_a!r}",
            f"norm_in_window = {window.squared_norm()!r}",
            f"norm_out = {out_env.squared_norm()!r}",
            f"n_zero_filled = {out_env.n_zero_filled}",
        ],
        ["segment", "t", "re", "im", "abs"],
        rows,
    )
    paths = [csv_path]
    if emit_svg:
        svg_path = out_dir / "transform.svg"
        line_plot(
            svg_path,
            [
                (at_device.times, np.abs(at_device.samples), "|in| at device"),
                (out_env.times, np.abs(out_env.samples), "|out|"),
            ],
            title="wave-packet transformation",
            xlabel="t (1/gamma1)",
            ylabel="|A|",
        )
        paths.append(svg_path)
    return paths


def _run_phases(cfg: RunConfig, out_dir: Path, emit_svg: bool) -> list[Path]:
    model = build_model(cfg)
    num = _numerics(cfg)
    spec = build_transform_spec(cfg, model)
    sched = phase_schedule(spec)
    t0, t1 = num["t_span"]
    dt = num["dt"]
    grid = t0 + dt * np.arange(int(round((t1 - t0) / dt)) + 1)
    w1, _ = model.frame_omegas()
    emitted = transfer.emit_envelope(
        model.gamma1, w1, 1.0, grid, rotating_frame=model.rotating_frame
    )
    transformed = wavepacket.apply_u_time_domain(emitted.shifted(spec.X / spec.c), spec)
    snaps = num["snapshot_times"]
    if snaps is None:
        snaps = [
            0.5 * sched.t_i,
            0.5 * (sched.t_i + sched.t_s),
            0.5 * (sched.t_s + sched.t_f),
            sched.t_f + 0.5 * (sched.t_f - sched.t_s),
        ]
    x_max = num["x_max"]
    if x_max is None or x_max <= 0.0:
        x_max = spec.c * (sched.t_f + 2.0 * spec.Delta)
    xs = np.linspace(0.0, x_max, num["nx"])
    rows = []
    for k, t_snap in enumerate(snaps):
        for x in xs:
            amp, tag = wavepacket.assemble_piecewise_field(
                float(x), float(t_snap), emitted, transformed, spec, sched
            )
            rows.append((k, t_snap, x, abs(amp), amp.real, amp.imag, tag.value))
    csv_path = out_dir / "phases.csv"
    _write_csv(
        csv_path,
        [
            _provenance(cfg),
            _units_comment(model),
            f"schedule.t_i = {sched.t_i!r}",
            f"schedule.t_s = {sched.t_s!r}",
            f"schedule.t_f = {sched.t_f!r}",
            f"schedule.t_a = {sched.t_a!r}",
            "snapshot_times = " + ",".join(repr(float(s)) for s in snaps),
        ],
        ["snapshot", "t", "x", "abs", "re", "im", "tag"],
        rows,
    )
    paths = [csv_path]
    if emit_svg:
        svg_path = out_dir / "phases.svg"
        series = []
        for k, t_snap in enumerate(snaps):
            amps = np.array(
                [
                    abs(
                        wavepacket.assemble_piecewise_field(
                            float(x), float(t_snap), emitted, transformed, spec, sched
                        )[0]
                    )
                    for x in xs
                ]
            )
            series.append((xs, amps, f"t = {t_snap:.6g}"))
        line_plot(
            svg_path,
            series,
            title="transformation phases",
            xlabel="x (c/gamma1)",
            ylabel="|A|",
        )
        paths.append(svg_path)
    return paths


def _run_timemap(cfg: RunConfig, out_dir: Path, emit_svg: bool) -> list[Path]:
    model = build_model(cfg)
    num = _numerics(cfg)
    spec = build_transform_spec(cfg, model)
    sched = phase_schedule(spec)
    span = num["t_span"]
    if span is None:
        span = (sched.t_i - spec.Delta, sched.t_f + spec.Delta)
    dt = num["dt"]
    if dt is None or dt <= 0.0:
        dt = (span[1] - span[0]) / 600.0
    ts = span[0] + dt * np.arange(int(round((span[1] - span[0]) / dt)) + 1)
    rows = []
    f_vals = []
    for t in ts:
        f = wavepacket.time_map(float(t), spec, sched, model.tau)
        fs = wavepacket.time_map_slope(float(t), spec, sched)
        g = wavepacket.time_map_inverse(float(t), spec, sched, model.tau)
        gs = wavepacket.time_map_inverse_slope(float(t), spec, sched, model.tau)
        rows.append((t, f, fs, g, gs))
        f_vals.append(np.nan if f is None else f)
    csv_path = out_dir / "timemap.csv"
    _write_csv(
        csv_path,
        [
            _provenance(cfg),
            _units_comment(model),
            f"schedule.t_i = {sched.t_i!r}",
            f"schedule.t_s = {sched.t_s!r}",
            f"schedule.t_f = {sched.t_f!r}",
            "horizontal_gap = " + repr(sched.t_s - sched.t_i),
            "vertical_gap = " + repr(sched.t_f - sched.t_s),
        ],
        ["t", "f", "f_slope", "f_inv", "f_inv_slope"],
        rows,
    )
    paths = [csv_path]
    if emit_svg:
        g_vals = [
            np.nan
            if (v := wavepacket.time_map_inverse(float(t), spec, sched, model.tau)) is None
            else v
            for t in ts
        ]
        svg_path = out_dir / "timemap.svg"
        line_plot(
            svg_path,
            [(ts, np.array(f_vals), "f(t)"), (ts, np.array(g_vals), "f_inv(t)")],
            title="system-1 clock maps",
            xlabel="t (1/gamma1)",
            ylabel="mapped time",
        )
        paths.append(svg_path)
    return paths


def _run_transfer(cfg: RunConfig, out_dir: Path, emit_svg: bool) -> list[Path]:
    model = build_model(cfg)
    num = _numerics(cfg)
    spec = build_transform_spec(cfg, model)
    sched = phase_schedule(spec)
    dt = num["dt"]
    span = num["t_span"]
    if span is None:
        span = (0.0, sched.t_f + 10.0 / model.gamma2)
    grid = span[0] + dt * np.arange(int(round((span[1] - span[0]) / dt)) + 1)
    comparison = transfer.transfer_experiment(model, spec=spec, t_grid=grid)
    off, on = comparison.off, comparison.on
    csv_path = out_dir / "transfer.csv"
    _write_csv(
        csv_path,
        [
            _provenance(cfg),
            _units_comment(model),
            f"alpha = {spec.alpha!r}, omega0 = {spec.omega0!r}, T = {spec.T!r}, "
            f"Delta = {spec.Delta!r}, X = {spec.X!r}",
            f"p2_max_off = {off.p2_max!r} at t = {off.t_at_max!r}",
            f"p2_max_on = {on.p2_max!r} at t = {on.t_at_max!r}",
            f"ratio_on_off = {comparison.ratio!r}",
            f"fidelity_off = {off.fidelity!r} (equal superposition |a|^2 = |b|^2 = 1/2)",
            f"fidelity_on = {on.fidelity!r} (equal superposition |a|^2 = |b|^2 = 1/2)",
        ],
        ["t", "P2_off", "P2_on"],
        zip(off.times, off.p2, on.p2),
    )
    paths = [csv_path]
    if emit_svg:
        svg_path = out_dir / "transfer.svg"
        line_plot(
            svg_path,
            [(off.times, off.p2, "transform off"), (on.times, on.p2, "transform on")],
            title="state transfer",
            xlabel="t (1/gamma1)",
            ylabel="P2",
        )
        paths.append(svg_path)
    return paths


_RUNNERS = {
    "decay": _run_decay,
    "lindblad": _run_lindblad,
    "trajectories": _run_trajectories,
    "transform": _run_transform,
    "phases": _run_phases,
    "timemap": _run_timemap,
    "transfer": _run_transfer,
}


def run(cfg: RunConfig) -> list[Path]:
    """Run the configured experiment; returns the artifact paths.

    Assumes the config already passed validate().
    """
    out_dir = Path(cfg.output.get("directory", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    emit_svg = bool(cfg.output.get("emit_svg", False))
    return _RUNNERS[cfg.experiment](cfg, out_dir, emit_svg)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcascade",
        description="cascaded-pair experiments with wave-packet transformation",
    )
    parser.add_argument("experiment", nargs="?", choices=EXPERIMENTS,
                        help="override the experiment named in the config")
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--svg", action="store_true", help="emit SVG plots")
    parser.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    parser.add_argument("--validate-only", action="store_true",
                        help="report diagnostics without running")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.experiment:
        cfg.experiment = args.experiment
    if args.out is not None:
        cfg.output["directory"] = args.out
    if args.svg:
        cfg.output["emit_svg"] = True
    if args.seed is not None:
        cfg.numerics["seed"] = args.seed
    diagnostics = validate(cfg)
    if args.validate_only:
        for d in diagnostics:
            print(d)
        if not diagnostics:
            print("config ok")
        return 2 if diagnostics else 0
    if diagnostics:
        for d in diagnostics:
            print(d, file=sys.stderr)
        return 2
    try:
        paths = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationAbort as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return 3
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
