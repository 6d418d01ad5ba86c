"""Run-configuration parsing: strict INI-style sections or equivalent JSON.

Sections: [model], [grid], [solver], [experiment], [output].  Unknown
sections/keys are rejected; all semantic problems are collected and reported
together, each addressed by its key path.
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .fields import FieldError, Grid1D
from .hyperbolic import SolverConfig, SolverError
from .model import (
    KernelSpec,
    ModelError,
    ModelSpec,
    ObstacleSpec,
    Penalization,
    VelocitySpec,
)
from .viscous import ViscousConfig

__all__ = ["ConfigError", "RunConfigFile", "parse_config", "load_config"]

_EXPERIMENT_KINDS = ("run", "eps-sweep", "nu-sweep", "compare", "osl-surface")

_SCHEMA: Dict[str, Tuple[str, ...]] = {
    "model": (
        "kernel", "kernel_rate", "kernel_table", "kernel_spacing",
        "kernel_tail", "velocity", "velocity_coefficients", "obstacle",
        "obstacle_level", "epsilon", "initial", "locality",
    ),
    "grid": ("x_left", "x_right", "n_cells"),
    "solver": (
        "cfl", "t_final", "snapshot_times", "extension", "flux_opt_tol",
        "nu", "mollifier_width", "picard_tol", "picard_max",
    ),
    "experiment": ("kind", "eps_list", "nu_list", "n_times"),
    "output": ("directory", "formats"),
}


class ConfigError(ValueError):
    """All collected configuration problems, one message per line."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class RunConfigFile:
    model: ModelSpec
    grid: Grid1D
    solver: SolverConfig
    viscous: ViscousConfig
    experiment: str = "run"
    eps_list: Tuple[float, ...] = ()
    nu_list: Tuple[float, ...] = ()
    n_times: int = 64
    out_dir: str = "out"
    formats: Tuple[str, ...] = ("csv", "json")
    raw: Dict[str, Dict[str, str]] = field(default_factory=dict)


def _to_sections(text: str) -> Dict[str, Dict[str, str]]:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"JSON syntax error at line {e.lineno}, column {e.colno}: {e.msg}"])
        if not isinstance(data, dict):
            raise ConfigError(["top-level JSON value must be an object"])
        out: Dict[str, Dict[str, str]] = {}
        for sec, body in data.items():
            if not isinstance(body, dict):
                raise ConfigError([f"section {sec!r} must be an object"])
            out[str(sec)] = {
                str(k): (",".join(str(x) for x in v) if isinstance(v, list) else str(v))
                for k, v in body.items()
            }
        return out
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as e:
        msg = str(e).replace("\n", " ")
        raise ConfigError([f"config syntax error: {msg}"])
    return {sec: dict(cp.items(sec)) for sec in cp.sections()}


class _Reader:
    """Typed access into one section, accumulating path-addressed errors."""

    def __init__(self, sections, name, errors):
        self.body = sections.get(name, {})
        self.name = name
        self.errors = errors

    def get(self, key, default=None):
        return self.body.get(key, default)

    def err(self, key, msg):
        self.errors.append(f"{self.name}.{key}: {msg}")

    def number(self, key, default, kind=float):
        raw = self.body.get(key)
        if raw is None:
            return default
        try:
            return kind(raw)
        except ValueError:
            self.err(key, f"expected a number, got {raw!r}")
            return default

    def floats(self, key, default=()):
        raw = self.body.get(key)
        if raw is None:
            return tuple(default)
        try:
            return tuple(float(t) for t in raw.replace(";", ",").split(",") if t.strip())
        except ValueError:
            self.err(key, f"expected a comma-separated number list, got {raw!r}")
            return tuple(default)

    def choice(self, key, options, default):
        raw = self.body.get(key, default)
        if raw not in options:
            self.err(key, f"must be one of {options}, got {raw!r}")
            return default
        return raw


def _load_table_initial(path: str, errors: List[str]):
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError:
        errors.append(f"model.initial: table file {path!r} not readable")
        return "q01"
    except ValueError as e:
        errors.append(f"model.initial: table file {path!r} not parseable: {e}")
        return "q01"
    if data.shape[1] != 2:
        errors.append(f"model.initial: table {path!r} needs two columns x,q")
        return "q01"
    xs, qs = data[:, 0], data[:, 1]

    def datum(x):
        return np.interp(x, xs, qs, left=qs[0], right=qs[-1])

    return datum


def parse_config(text: str) -> RunConfigFile:
    """Parse and validate; raises ConfigError listing every problem found."""
    sections = _to_sections(text)
    errors: List[str] = []
    for sec, body in sections.items():
        if sec not in _SCHEMA:
            errors.append(f"{sec}: unknown section")
            continue
        for key in body:
            if key not in _SCHEMA[sec]:
                errors.append(f"{sec}.{key}: unknown key")

    m = _Reader(sections, "model", errors)
    g = _Reader(sections, "grid", errors)
    s = _Reader(sections, "solver", errors)
    e = _Reader(sections, "experiment", errors)
    o = _Reader(sections, "output", errors)

    # model block
    kernel_kind = m.choice("kernel", ("exponential", "custom-tabulated"), "exponential")
    kernel = None
    try:
        if kernel_kind == "exponential":
            kernel = KernelSpec("exponential", rate=m.number("kernel_rate", 1.0))
        else:
            table_path = m.get("kernel_table")
            spacing = m.number("kernel_spacing", 0.0)
            tail = m.number("kernel_tail", 0.0)
            if table_path is None:
                m.err("kernel_table", "required for custom-tabulated kernels")
            else:
                table = np.loadtxt(table_path, ndmin=1)
                kernel = KernelSpec("custom-tabulated", table=tuple(table),
                                    spacing=spacing, tail_mass=tail)
    except (ModelError, OSError, ValueError) as exc:
        m.err("kernel", str(exc))
    if kernel is None:
        kernel = KernelSpec("exponential", rate=1.0)

    vel_kind = m.choice("velocity", ("lwr", "constant", "custom-polynomial"), "lwr")
    try:
        if vel_kind == "custom-polynomial":
            coeffs = m.floats("velocity_coefficients", (1.0,))
            velocity = VelocitySpec("custom-polynomial", coefficients=coeffs)
        else:
            velocity = VelocitySpec(vel_kind)
    except ModelError as exc:
        m.err("velocity", str(exc))
        velocity = VelocitySpec("lwr")

    obst_kind = m.choice("obstacle", ("paper-gauss", "constant"), "paper-gauss")
    try:
        if obst_kind == "paper-gauss":
            obstacle = ObstacleSpec.gauss()
        else:
            obstacle = ObstacleSpec.constant(m.number("obstacle_level", 1.2))
    except ModelError as exc:
        m.err("obstacle", str(exc))
        obstacle = ObstacleSpec.gauss()

    eps_raw = m.get("epsilon", "0.0009765625")  # 2^-10
    penalization = None
    if str(eps_raw).strip().lower() != "none":
        try:
            penalization = Penalization(float(eps_raw))
        except ValueError:
            m.err("epsilon", f"expected a number or 'none', got {eps_raw!r}")
        except ModelError as exc:
            m.err("epsilon", str(exc))

    initial_raw = m.get("initial", "q01")
    if initial_raw in ("q01", "q02"):
        initial = initial_raw
    else:
        initial = _load_table_initial(initial_raw, errors)

    locality = m.choice("locality", ("nonlocal", "local"), "nonlocal")

    # grid block
    x_left = g.number("x_left", -3.0)
    x_right = g.number("x_right", 4.0)
    n_cells = g.number("n_cells", 3500, kind=int)
    grid = None
    try:
        grid = Grid1D(x_left, x_right, n_cells)
    except FieldError as exc:
        g.err("n_cells", str(exc))

    # solver block
    base = dict(
        t_final=s.number("t_final", 1.5),
        snapshot_times=s.floats("snapshot_times", ()),
        cfl=s.number("cfl", 0.45),
        extension=s.choice("extension", ("constant", "zero"), "constant"),
        flux_opt_tol=s.number("flux_opt_tol", 1e-10),
    )
    solver = None
    viscous = None
    try:
        solver = SolverConfig(**base)
        width = s.get("mollifier_width")
        viscous = ViscousConfig(
            **base,
            nu=s.number("nu", 1e-3),
            mollifier_width=None if width is None else float(width),
            picard_tol=s.number("picard_tol", 1e-10),
            picard_max=s.number("picard_max", 50, kind=int),
        )
    except (SolverError, ValueError) as exc:
        s.err("t_final", str(exc))

    kind = e.choice("kind", _EXPERIMENT_KINDS, "run")
    eps_list = e.floats("eps_list", (2.0**-6, 2.0**-7, 2.0**-8, 2.0**-9, 2.0**-10))
    nu_list = e.floats("nu_list", (1e-2, 1e-3, 1e-4))
    n_times = e.number("n_times", 64, kind=int)

    out_dir = o.get("directory", "out")
    formats = tuple(t.strip() for t in o.get("formats", "csv,json").split(",") if t.strip())
    for f in formats:
        if f not in ("csv", "json"):
            o.err("formats", f"unknown format {f!r}")

    model = None
    if penalization is not None or str(eps_raw).strip().lower() == "none":
        try:
            model = ModelSpec(kernel, velocity, obstacle, penalization,
                              initial, locality)
        except ModelError as exc:
            errors.append(f"model: {exc}")

    if errors:
        raise ConfigError(errors)
    assert model is not None and grid is not None
    assert solver is not None and viscous is not None
    return RunConfigFile(
        model=model, grid=grid, solver=solver, viscous=viscous,
        experiment=kind, eps_list=eps_list, nu_list=nu_list, n_times=n_times,
        out_dir=out_dir, formats=formats, raw=sections,
    )


def load_config(path: str) -> RunConfigFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
