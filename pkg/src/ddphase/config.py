"""TOML run configuration.

Frequencies are written as ordinary frequencies in Hz and fields in Gauss;
everything is converted to angular units on parse. Phases are written in
units of pi. Example::

    [sequence]
    kind = "XY8"
    n_units = 70
    rabi_hz = 30e6

    [target]
    engine = "quantum"
    b_field_gauss = 100
    [[target.spins]]
    label = "13C"
    hyperfine_hz = [15.0e3, 6.4e3, 11.9e3]
    gyromagnetic_hz_per_gauss = 1070.5

    [errors]
    detuning_hz = 1e6
    rabi_relative_error = 0.03

    [sweep]
    alpha_start = 0.5
    alpha_stop = 4.5
    alpha_step = 0.005
    phases_pi = [0, 0.25, -0.25]
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .classical import ClassicalSignal
from .core import ControlErrors
from .disambiguation import SequenceSpec, SweepConfig
from .quantum import NuclearSpin, QuantumScene
from .sequences import SequenceKind, admissible_xi

TWO_PI = 2 * np.pi


class ConfigError(ValueError):
    pass


_SCHEMA: dict[str, Any] = {
    "sequence": {
        "kind": str,
        "n_units": int,
        "rabi_hz": float,
        "t_flip": float,
        "theta_pulse_pi": float,
        "harmonic": int,
        "xi": float,
        "allow_overlap": bool,
    },
    "target": {
        "engine": str,
        "signals": [
            {
                "amplitude_hz": float,
                "gyromagnetic_hz_per_gauss": float,
                "field_gauss": float,
                "frequency_hz": float,
                "theta_pi": float,
            }
        ],
        "b_field_gauss": float,
        "reference_spin": int,
        "spins": [
            {
                "label": str,
                "hyperfine_hz": list,
                "gyromagnetic_hz_per_gauss": float,
            }
        ],
    },
    "errors": {"detuning_hz": float, "rabi_relative_error": float},
    "sweep": {
        "alpha_start": float,
        "alpha_stop": float,
        "alpha_step": float,
        "alpha_count": int,
        "alpha_list": list,
        "phases_pi": list,
        "reference_frequency_hz": float,
    },
    "numerics": {"slices_per_pulse": int, "slices_free": int, "max_dim": int},
    "output": {"path": str, "format": str},
}


def _check(node: dict, schema: dict, prefix: str):
    for key, value in node.items():
        path = f"{prefix}{key}"
        if key not in schema:
            raise ConfigError(f"unknown key '{path}'")
        expected = schema[key]
        if isinstance(expected, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{path}' must be a table")
            _check(value, expected, path + ".")
        elif isinstance(expected, list):
            if not isinstance(value, list) or not all(isinstance(v, dict) for v in value):
                raise ConfigError(f"'{path}' must be an array of tables")
            for i, item in enumerate(value):
                _check(item, expected[0], f"{path}[{i}].")
        elif expected is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"'{path}' must be a number, got {value!r}")
        elif not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
            raise ConfigError(f"'{path}' must be of type {expected.__name__}, got {value!r}")


def _require(table: dict, key: str, prefix: str):
    if key not in table:
        raise ConfigError(f"missing required key '{prefix}.{key}'")
    return table[key]


def _positive(value, name):
    if not value > 0:
        raise ConfigError(f"'{name}' must be > 0, got {value}")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Validated run description in internal (angular) units."""

    sweep: SweepConfig
    output_path: str | None = None
    output_format: str = "csv"
    source: dict = field(default_factory=dict, compare=False)

    def resolved(self) -> dict:
        """JSON-friendly view of the resolved configuration (angular units)."""
        s = self.sweep
        seq = s.sequence
        out = {
            "engine": s.engine,
            "sequence": {
                "kind": seq.kind.value,
                "n_units": seq.n_units,
                "rabi_rad_s": seq.rabi,
                "t_flip_s": seq.flip_time,
                "theta_pulse_rad": seq.theta_pulse,
                "xi": seq.xi,
                "allow_overlap": seq.allow_overlap,
            },
            "errors": {
                "detuning_rad_s": s.errors.detuning,
                "rabi_relative_error": s.errors.rabi_relative_error,
            },
            "sweep": {
                "alphas": list(s.alphas),
                "phases_rad": list(s.phases),
                "omega_ref_rad_s": s.omega_ref,
            },
            "numerics": {"slices_per_pulse": s.slices_per_pulse, "slices_free": s.slices_free},
        }
        if s.scene is not None:
            out["target"] = {
                "b_field_gauss": s.scene.b_field,
                "max_dim": s.scene.max_dim,
                "reference_spin": s.reference_spin,
                "spins": [
                    {"label": n.label, "hyperfine_rad_s": list(n.hyperfine), "gyromagnetic_rad_s_g": n.gyromagnetic}
                    for n in s.scene.spins
                ],
            }
        else:
            out["target"] = {
                "signals": [
                    {"amplitude_rad_s": g.amplitude, "omega_ac_rad_s": g.omega_ac, "theta_rad": g.theta}
                    for g in s.signals
                ]
            }
        return out


def _alpha_grid(sw: dict) -> tuple[float, ...]:
    if "alpha_list" in sw:
        if any(k in sw for k in ("alpha_start", "alpha_stop", "alpha_step", "alpha_count")):
            raise ConfigError("give either 'sweep.alpha_list' or a start/stop range, not both")
        vals = sw["alpha_list"]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            raise ConfigError("'sweep.alpha_list' must hold numbers")
        return tuple(float(v) for v in vals)
    start = float(_require(sw, "alpha_start", "sweep"))
    stop = float(_require(sw, "alpha_stop", "sweep"))
    if stop < start:
        raise ConfigError("'sweep.alpha_stop' must be >= 'sweep.alpha_start'")
    if ("alpha_step" in sw) == ("alpha_count" in sw):
        raise ConfigError("give exactly one of 'sweep.alpha_step' or 'sweep.alpha_count'")
    if "alpha_count" in sw:
        n = _positive(sw["alpha_count"], "sweep.alpha_count")
        return tuple(np.linspace(start, stop, n).tolist())
    step = _positive(float(sw["alpha_step"]), "sweep.alpha_step")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple((start + step * np.arange(n)).tolist())


def _sequence(seq: dict) -> SequenceSpec:
    kind = str(_require(seq, "kind", "sequence")).upper().replace("-", "")
    n_units = _positive(_require(seq, "n_units", "sequence"), "sequence.n_units")
    rabi = TWO_PI * _positive(float(_require(seq, "rabi_hz", "sequence")), "sequence.rabi_hz")
    xi = None
    if kind in ("XY8", "CPMG"):
        for k in ("harmonic", "xi"):
            if k in seq:
                raise ConfigError(f"'sequence.{k}' only applies to AXY8")
        seq_kind = SequenceKind(kind)
    elif kind == "AXY8":
        harmonic = seq.get("harmonic", 1)
        if harmonic not in (1, 3):
            raise ConfigError("'sequence.harmonic' must be 1 or 3")
        seq_kind = SequenceKind.AXY8_F1 if harmonic == 1 else SequenceKind.AXY8_F3
        xi = float(_require(seq, "xi", "sequence"))
        lo, hi = admissible_xi(harmonic)
        if not lo < xi < hi:
            raise ConfigError(
                f"'sequence.xi' = {xi} outside the admissible range ({lo:.6g}, {hi:.6g}) "
                f"for harmonic {harmonic}"
            )
    else:
        raise ConfigError(f"'sequence.kind' must be XY8, CPMG or AXY8, got {seq['kind']!r}")
    t_flip = seq.get("t_flip")
    if t_flip is not None:
        _positive(t_flip, "sequence.t_flip")
    return SequenceSpec(
        kind=seq_kind,
        n_units=n_units,
        rabi=rabi,
        t_flip=None if t_flip is None else float(t_flip),
        theta_pulse=np.pi * float(seq.get("theta_pulse_pi", 0.0)),
        xi=xi,
        allow_overlap=bool(seq.get("allow_overlap", False)),
    )


def _signals(items: list) -> tuple[ClassicalSignal, ...]:
    out = []
    for i, sig in enumerate(items):
        name = f"target.signals[{i}]"
        if "amplitude_hz" in sig:
            if "field_gauss" in sig or "gyromagnetic_hz_per_gauss" in sig:
                raise ConfigError(f"'{name}': give amplitude_hz or gyromagnetic_hz_per_gauss*field_gauss")
            amp_hz = float(sig["amplitude_hz"])
        elif "field_gauss" in sig and "gyromagnetic_hz_per_gauss" in sig:
            amp_hz = float(sig["field_gauss"]) * float(sig["gyromagnetic_hz_per_gauss"])
        else:
            raise ConfigError(f"missing required key '{name}.amplitude_hz'")
        if amp_hz < 0:
            raise ConfigError(f"'{name}' amplitude must be >= 0")
        freq = _positive(float(_require(sig, "frequency_hz", name)), f"{name}.frequency_hz")
        out.append(
            ClassicalSignal(TWO_PI * amp_hz, TWO_PI * freq, np.pi * float(sig.get("theta_pi", 0.0)))
        )
    if not out:
        raise ConfigError("'target.signals' is empty")
    return tuple(out)


def _scene(tg: dict, max_dim: int) -> QuantumScene:
    spins = []
    for i, sp in enumerate(_require(tg, "spins", "target")):
        name = f"target.spins[{i}]"
        a = _require(sp, "hyperfine_hz", name)
        if len(a) != 3 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in a):
            raise ConfigError(f"'{name}.hyperfine_hz' must be three numbers")
        gamma = float(_require(sp, "gyromagnetic_hz_per_gauss", name))
        spins.append(NuclearSpin(tuple(TWO_PI * float(v) for v in a), TWO_PI * gamma, sp.get("label", "")))
    try:
        return QuantumScene(float(_require(tg, "b_field_gauss", "target")), tuple(spins), max_dim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}") from exc
    _check(doc, _SCHEMA, "")
    seq = _sequence(doc.get("sequence", {}))
    tg = doc.get("target", {})
    engine = tg.get("engine", "classical")
    num = doc.get("numerics", {})
    if engine == "classical":
        for k in ("b_field_gauss", "spins", "reference_spin"):
            if k in tg:
                raise ConfigError(f"'target.{k}' only applies to the quantum engine")
        signals, scene = _signals(_require(tg, "signals", "target")), None
    elif engine == "quantum":
        if "signals" in tg:
            raise ConfigError("'target.signals' only applies to the classical engine")
        signals, scene = (), _scene(tg, int(num.get("max_dim", 32)))
    else:
        raise ConfigError(f"'target.engine' must be classical or quantum, got {engine!r}")

    er = doc.get("errors", {})
    try:
        errors = ControlErrors(
            TWO_PI * float(er.get("detuning_hz", 0.0)), float(er.get("rabi_relative_error", 0.0))
        )
    except ValueError as exc:
        raise ConfigError(f"errors: {exc}") from exc

    sw = doc.get("sweep")
    if sw is None:
        raise ConfigError("missing required table 'sweep'")
    phases = tuple(np.pi * float(p) for p in sw.get("phases_pi", [0.0, 0.25, -0.25]))
    ref = sw.get("reference_frequency_hz")
    out = doc.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"'output.format' must be csv or json, got {fmt!r}")
    for k in ("slices_per_pulse", "slices_free"):
        if k in num:
            _positive(num[k], f"numerics.{k}")
    try:
        sweep = SweepConfig(
            alphas=_alpha_grid(sw),
            sequence=seq,
            phases=phases,
            signals=signals,
            scene=scene,
            errors=errors,
            slices_per_pulse=num.get("slices_per_pulse"),
            slices_free=num.get("slices_free"),
            reference_omega=None if ref is None else TWO_PI * _positive(float(ref), "sweep.reference_frequency_hz"),
            reference_spin=int(tg.get("reference_spin", 0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if scene is not None and not 0 <= sweep.reference_spin < len(scene.spins):
        raise ConfigError("'target.reference_spin' is out of range")
    return RunConfig(sweep, out.get("path"), fmt, doc)


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
