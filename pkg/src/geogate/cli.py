"""Command-line front end: ``geogate <command> --config run.ini --out results/``.

Config files are INI-style. Frequencies are given in Hz and multiplied by
2 pi; keys ending in ``_pi`` are angles in units of pi. Example::

    [scenario]
    preset = transmon
    scheme = OCNGQG-A
    gate = S
    k_pi = 1.13

    [noise]
    epsilon = 0.1

    [sweep]
    points = 21

Sections and keys
-----------------
scenario
    ``preset`` (square, sin2-damped, transmon, cp, cp-effective),
    ``scheme``, ``gate`` (S, H, CP), ``k_pi``, ``loops``, ``dt``.
gate
    ``alpha0_pi``, ``beta0_pi``, ``gamma_g_pi``: a custom gate instead of a preset.
model
    ``setting`` (ideal, transmon, two-transmon, effective), ``levels``,
    ``anharmonicity``, ``g12``, ``delta_omega``, ``alpha1``, ``alpha2``,
    ``beta``, ``nu``.
envelope
    ``kind`` (square, sin2), ``omega_max``, ``drag`` (true/false).
noise
    ``epsilon``, ``delta``.
decoherence
    ``kappa_z``, ``kappa_minus`` in Hz, or ``kappa_ratio`` for both as a
    fraction of ``omega_max``.
sweep
    ``path``, ``mode`` (X, Z, Both), ``points``, ``schemes`` (comma list),
    ``error_axis`` (epsilon, delta, both), ``min``, ``max``,
    ``delta_omega_min``, ``delta_omega_max``, ``beta_min``, ``beta_max``,
    ``samples``.
output
    ``dir``.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import models, sweeps
from .models import DecoherenceSpec, NoiseSpec
from .pulseforge import PRESETS, SCHEMES, SIN2, SQUARE, GateSpec

TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("not finite")
    return v


def _hz(text: str) -> float:
    return TWO_PI * _float(text)


def _pi(text: str) -> float:
    return math.pi * _float(text)


def _int(text: str) -> int:
    return int(text)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true or false")


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t

    return parse


def _schemes(text: str) -> list[str]:
    out = [s.strip() for s in text.split(",") if s.strip()]
    for s in out:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s}")
    return out


SCHEMA: dict[str, dict[str, Callable[[str], object]]] = {
    "scenario": {
        "preset": _choice(*sweeps.SCENARIOS),
        "scheme": _choice(*SCHEMES),
        "gate": _choice(*PRESETS),
        "k_pi": _pi,
        "loops": _int,
        "dt": _float,
    },
    "gate": {"alpha0_pi": _pi, "beta0_pi": _pi, "gamma_g_pi": _pi},
    "model": {
        "setting": _choice(models.IDEAL, models.TRANSMON, models.TWO_TRANSMON, sweeps.EFFECTIVE),
        "levels": _int,
        "anharmonicity": _hz,
        "g12": _hz,
        "delta_omega": _hz,
        "alpha1": _hz,
        "alpha2": _hz,
        "beta": _float,
        "nu": _hz,
    },
    "envelope": {"kind": _choice(SQUARE, SIN2), "omega_max": _hz, "drag": _bool},
    "noise": {"epsilon": _float, "delta": _float},
    "decoherence": {"kappa_z": _hz, "kappa_minus": _hz, "kappa_ratio": _float},
    "sweep": {
        "path": _choice("A", "B"),
        "mode": _choice(*sweeps.ERROR_MODES),
        "points": _int,
        "schemes": _schemes,
        "error_axis": _choice("epsilon", "delta", "both"),
        "min": _float,
        "max": _float,
        "delta_omega_min": _hz,
        "delta_omega_max": _hz,
        "beta_min": _float,
        "beta_max": _float,
        "samples": _int,
    },
    "output": {"dir": str},
}


@dataclass
class ScenarioConfig:
    scheme: str = "OCNGQG-A"
    gate: GateSpec = PRESETS["S"]
    scenario: sweeps.Scenario = sweeps.SQUARE_IDEAL
    k: float | None = None
    noise: NoiseSpec = NoiseSpec()
    sweep: dict = field(default_factory=dict)
    output: str | None = None


def read_config(text: str) -> dict[str, dict[str, object]]:
    """Parse and type-check config text against :data:`SCHEMA`."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from exc
    out: dict[str, dict[str, object]] = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        out[section] = {}
        for key, raw in cp.items(section):
            parser = SCHEMA[section].get(key)
            if parser is None:
                raise ConfigError(f"unknown key '{key}' in [{section}]")
            try:
                out[section][key] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"invalid value for '{key}' in [{section}]: {raw!r} ({exc})") from exc
    return out


def build_config(data: dict[str, dict[str, object]], dt: float | None = None) -> ScenarioConfig:
    s = data.get("scenario", {})
    base = sweeps.SCENARIOS[s.get("preset", "square")]
    model = data.get("model", {})
    env = data.get("envelope", {})
    dec = data.get("decoherence", {})

    gate = PRESETS[s.get("gate", "CP" if base.two_qubit else "S")]
    if "gate" in data:
        g = data["gate"]
        missing = [k for k in ("alpha0_pi", "beta0_pi", "gamma_g_pi") if k not in g]
        if missing:
            raise ConfigError(f"missing key '{missing[0]}' in [gate]")
        try:
            gate = GateSpec(g["alpha0_pi"], g["beta0_pi"], g["gamma_g_pi"], name="custom")
        except ValueError as exc:
            raise ConfigError(f"invalid [gate]: {exc}") from exc

    transmon = base.transmon
    if "levels" in model or "anharmonicity" in model:
        try:
            transmon = replace(transmon, **{k: model[k] for k in ("levels", "anharmonicity") if k in model})
        except ValueError as exc:
            raise ConfigError(f"invalid value for 'levels' in [model]: {exc}") from exc
    pair_keys = ("g12", "delta_omega", "alpha1", "alpha2", "beta", "nu")
    pair = replace(base.pair, **{k: model[k] for k in pair_keys if k in model})

    omega = env.get("omega_max", base.omega_max)
    if "kappa_ratio" in dec:
        if "kappa_z" in dec or "kappa_minus" in dec:
            raise ConfigError("key 'kappa_ratio' in [decoherence] conflicts with explicit rates")
        rate = dec["kappa_ratio"] * omega
        decoherence = DecoherenceSpec(rate, rate)
    else:
        try:
            decoherence = DecoherenceSpec(
                dec.get("kappa_z", base.decoherence.kappa_z), dec.get("kappa_minus", base.decoherence.kappa_minus)
            )
        except ValueError as exc:
            raise ConfigError(f"invalid value for 'kappa_z' in [decoherence]: {exc}") from exc
    if not omega > 0:
        raise ConfigError("invalid value for 'omega_max' in [envelope]: must be positive")
    scenario = replace(
        base,
        setting=model.get("setting", base.setting),
        envelope_kind=env.get("kind", base.envelope_kind),
        omega_max=omega,
        drag=env.get("drag", base.drag),
        decoherence=decoherence,
        transmon=transmon,
        pair=pair,
        loops=s.get("loops", base.loops),
        dt=dt if dt is not None else s.get("dt", base.dt),
    )
    if scenario.loops < 1:
        raise ConfigError("invalid value for 'loops' in [scenario]: must be at least 1")
    n = data.get("noise", {})
    return ScenarioConfig(
        scheme=s.get("scheme", "OCNGQG-A"),
        gate=gate,
        scenario=scenario,
        k=s.get("k_pi"),
        noise=NoiseSpec(n.get("epsilon", 0.0), n.get("delta", 0.0)),
        sweep=data.get("sweep", {}),
        output=data.get("output", {}).get("dir"),
    )


def load_config(path: str | None, dt: float | None = None) -> ScenarioConfig:
    text = ""
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return build_config(read_config(text), dt)


# ---- output ---------------------------------------------------------------


def write_json(path: str, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _ramp(x: float) -> str:
    # white to dark blue
    lo, hi = np.array([255, 255, 255]), np.array([8, 48, 107])
    c = lo + (hi - lo) * min(max(x, 0.0), 1.0)
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def heatmap_svg(result: sweeps.SweepResult, title: str = "") -> str:
    """Rect-grid heatmap with a linear colour ramp and labelled axes."""
    vals = result.values if result.values.ndim == 2 else result.values[:, None]
    axes = result.grid.axes
    nx, ny = vals.shape
    cell, left, top = 12, 70, 30
    w, h = left + nx * cell + 90, top + ny * cell + 50
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo if hi > lo else 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">',
        f'<text x="{left}" y="18">{title}</text>',
    ]
    for i in range(nx):
        for j in range(ny):
            x = left + i * cell
            y = top + (ny - 1 - j) * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_ramp((vals[i, j] - lo) / span)}"/>'
            )
    a0 = axes[0]
    parts.append(f'<text x="{left}" y="{top + ny * cell + 15}">{a0.min:.4g}</text>')
    parts.append(f'<text x="{left + nx * cell}" y="{top + ny * cell + 15}" text-anchor="end">{a0.max:.4g}</text>')
    parts.append(
        f'<text x="{left + nx * cell / 2}" y="{top + ny * cell + 35}" text-anchor="middle">{a0.name} [{a0.unit}]</text>'
    )
    if len(axes) > 1:
        a1 = axes[1]
        parts.append(f'<text x="{left - 5}" y="{top + ny * cell}" text-anchor="end">{a1.min:.4g}</text>')
        parts.append(f'<text x="{left - 5}" y="{top + 10}" text-anchor="end">{a1.max:.4g}</text>')
        parts.append(
            f'<text x="12" y="{top + ny * cell / 2}" transform="rotate(-90 12 {top + ny * cell / 2})" '
            f'text-anchor="middle">{a1.name} [{a1.unit}]</text>'
        )
    bx = left + nx * cell + 15
    parts.append(f'<text x="{bx}" y="{top + 10}">{hi:.6g}</text>')
    parts.append(f'<text x="{bx}" y="{top + ny * cell}">{lo:.6g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _emit_sweep(out: str, stem: str, result: sweeps.SweepResult, svg: bool, title: str) -> dict:
    result.write_csv(os.path.join(out, f"{stem}.csv"))
    summary = result.summary()
    write_json(os.path.join(out, f"{stem}.json"), summary)
    if svg:
        with open(os.path.join(out, f"{stem}.svg"), "w", encoding="utf-8") as fh:
            fh.write(heatmap_svg(result, title))
    return summary


def _check_fidelity(values) -> None:
    v = np.asarray(values, dtype=float)
    if np.any(v < -1e-9) or np.any(v > 1 + 1e-9) or not np.all(np.isfinite(v)):
        raise ArithmeticError("fidelity outside [0, 1]")


# ---- commands -------------------------------------------------------------


def run_fidelity(cfg: ScenarioConfig, out: str, args) -> dict:
    seq = cfg.scenario.sequence(cfg.scheme, cfg.gate, cfg.k)
    res = cfg.scenario.fidelity(cfg.scheme, cfg.gate, cfg.k, cfg.noise)
    _check_fidelity(res.per_state)
    report = {
        "scheme": cfg.scheme,
        "gate": cfg.gate.name,
        "duration_s": seq.duration,
        "fidelity": res.fidelity,
        "per_state": res.per_state,
    }
    write_json(os.path.join(out, "fidelity.json"), report)
    return report


def run_sweep_k(cfg: ScenarioConfig, out: str, args) -> dict:
    sw = cfg.sweep
    res = sweeps.optimize_k(
        cfg.gate,
        sw.get("path", "A"),
        sw.get("mode", "Both"),
        sw.get("points", sweeps.K_POINTS),
        cfg.scenario,
        args.threads,
    )
    _check_fidelity(res.values)
    summary = _emit_sweep(out, "sweep_k", res, args.svg, f"{cfg.gate.name} fidelity vs k")
    summary["argmax_pi"] = res.argmax[0] / math.pi
    return summary


def run_robustness(cfg: ScenarioConfig, out: str, args) -> dict:
    sw = cfg.sweep
    axis = sw.get("error_axis", "both")
    lo, hi = sw.get("min", -0.1), sw.get("max", 0.1)
    if axis == "both":
        res = sweeps.robustness_map(
            cfg.scheme, cfg.gate, (lo, hi), (lo, hi), sw.get("points", sweeps.MAP_POINTS), cfg.scenario, cfg.k,
            args.threads,
        )
        _check_fidelity(res.values)
        return _emit_sweep(out, f"map_{cfg.scheme}", res, args.svg, f"{cfg.scheme} {cfg.gate.name}")
    curves = sweeps.robustness_curve(
        sw.get("schemes", [cfg.scheme]), cfg.gate, axis, (lo, hi), sw.get("points", 41), cfg.scenario, cfg.k,
        args.threads,
    )
    summaries = {}
    for scheme, res in curves.items():
        _check_fidelity(res.values)
        summaries[scheme] = _emit_sweep(out, f"curve_{scheme}_{axis}", res, args.svg, f"{scheme} vs {axis}")
    return summaries


def run_cp_map(cfg: ScenarioConfig, out: str, args) -> dict:
    sw = cfg.sweep
    pair = cfg.scenario.pair
    res = sweeps.cp_parameter_map(
        (sw.get("delta_omega_min", TWO_PI * 494e6), sw.get("delta_omega_max", TWO_PI * 694e6)),
        (sw.get("beta_min", 1.3), sw.get("beta_max", 2.3)),
        sw.get("points", 11),
        pair,
        cfg.scenario.decoherence,
        cfg.k if cfg.k is not None else 1.27 * math.pi,
        cfg.scheme,
        cfg.scenario.dt,
        args.threads,
    )
    _check_fidelity(res.values)
    return _emit_sweep(out, "cp_map", res, args.svg, "CP fidelity")


def run_dynamics(cfg: ScenarioConfig, out: str, args) -> dict:
    tr = sweeps.dynamics_trace(
        cfg.scenario.pair,
        cfg.scenario.decoherence,
        k=cfg.k if cfg.k is not None else 1.27 * math.pi,
        scheme=cfg.scheme,
        samples=cfg.sweep.get("samples", 200),
        dt=cfg.scenario.dt,
    )
    for v in tr.fidelity.values():
        _check_fidelity(v)
    with open(os.path.join(out, "dynamics.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(tr.to_csv())
    report = {"final": tr.final, "infidelity": tr.decomposition()}
    write_json(os.path.join(out, "dynamics.json"), report)
    return report


def run_export(cfg: ScenarioConfig, out: str, args) -> dict:
    seq = cfg.scenario.sequence(cfg.scheme, cfg.gate, cfg.k)
    data = seq.to_dict()
    write_json(os.path.join(out, "sequence.json"), data)
    return data


COMMANDS = {
    "fidelity": run_fidelity,
    "sweep-k": run_sweep_k,
    "robustness": run_robustness,
    "cp-map": run_cp_map,
    "dynamics": run_dynamics,
    "export": run_export,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geogate", description="Composite geometric gate simulator.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="INI scenario file")
    p.add_argument("--out", help="output directory (overrides [output] dir)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    p.add_argument("--svg", action="store_true", help="also write SVG heatmaps")
    p.add_argument("--dt", type=float, help="integrator step in seconds")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config, args.dt)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = args.out or cfg.output or "."
    os.makedirs(out, exist_ok=True)
    try:
        report = COMMANDS[args.command](cfg, out, args)
    except (ValueError, KeyError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(report, indent=1, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
