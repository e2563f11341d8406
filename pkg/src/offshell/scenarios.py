"""Bundled run scenarios.

Each scenario is a plain config dict in the same shape accepted by the
CLI from a JSON file.  Initial values are decimal strings so they parse
exactly at any working precision.
"""

from __future__ import annotations

import copy

from .core import ModelParams, ScalarState, WorldlineState, FourVector
from .errors import ConfigError
from .numerics import real, sqrt_pos

BUNDLED = {
    # eps_0 = 0.5, deps_0 = 0.1: rises briefly, then falls smoothly on-shell
    "converge-fig2": {
        "name": "converge-fig2",
        "form": "scalar",
        "initial": {"eps": "0.5", "deps": "0.1"},
        "params": {"D": "1", "tau_max": 12.0},
        "record_every": 0.05,
        "emit": ["state", "k_potentials"],
    },
    # eps_0 = 0.5, rho_0 = -0.1: finite-time blow-up near tau ~ 0.787.
    # The approach to the pole is stability-limited (the usable step size
    # shrinks like the square of the remaining time), so the blow-up
    # declaration cap sits above every plotted scale but below the wall
    # where explicit stepping stalls.
    "diverge-fig4": {
        "name": "diverge-fig4",
        "form": "scalar",
        "initial": {"eps": "0.5", "rho": "-0.1"},
        "params": {"D": "1", "tau_max": 5.0, "eps_cap": 25.0,
                   "abs_tol": 1e-14, "rel_tol": 1e-14},
        "record_every": 0.005,
        "emit": ["state", "k_potentials"],
    },
    # vector-form convergence matched to converge-fig2 via the t-x gauge
    "converge-vector": {
        "name": "converge-vector",
        "form": "vector",
        "initial": {"scalars": {"eps": "0.5", "deps": "0.1"}},
        "params": {"D": "1", "tau_max": 12.0},
        "record_every": 0.05,
        "emit": ["state", "velocity"],
    },
    # vector-form blow-up; motion in the t-x plane, v_x stays bounded
    "diverge-vector": {
        "name": "diverge-vector",
        "form": "vector",
        "initial": {"u": ["sqrt1.5", "0", "0", "0"],
                    "a": ["0.2", "0.1", "0", "0"],
                    "j": ["0.3", "0", "0", "0"]},
        "params": {"D": "1", "tau_max": 5.0, "eps_cap": 25.0,
                   "abs_tol": 1e-14, "rel_tol": 1e-14},
        "record_every": 0.002,
        "emit": ["state", "scalars", "velocity"],
    },
    # K-potential landscape on an (eps, deps) grid, remaining scalars zero
    "kplus-grid": {
        "name": "kplus-grid",
        "kind": "grid",
        "grid": {"eps": {"min": "0.05", "max": "2.0", "n": 40},
                 "deps": {"min": "-1.0", "max": "1.0", "n": 41}},
        "fixed": {"ddeps": "0", "rho": "0"},
        "params": {"D": "1"},
    },
    # accelerated constant-eps stationary point (unstable)
    "constant-eps": {
        "name": "constant-eps",
        "form": "scalar",
        "initial": {"fixed_point": {"eps": "0.5", "rho": "0.1"}},
        "params": {"D": "1", "tau_max": 20.0},
        "record_every": 0.1,
        "emit": ["state", "eigenvalues"],
    },
}

SCALAR_FIELDS = ("eps", "deps", "ddeps", "rho", "drho", "eta")
PARAM_FIELDS = ("D", "precision_bits", "eps_floor", "eps_cap", "abs_tol",
                "rel_tol", "tau_max", "h_min")
EMIT_OPTIONS = ("state", "scalars", "k_potentials", "eigenvalues", "velocity")


def bundled_config(name: str) -> dict:
    if name not in BUNDLED:
        raise ConfigError(f"unknown bundled scenario {name!r}; "
                          f"available: {', '.join(sorted(BUNDLED))}")
    return copy.deepcopy(BUNDLED[name])


def build_params(config: dict, precision_override: int | None = None) -> ModelParams:
    raw = dict(config.get("params", {}))
    unknown = set(raw) - set(PARAM_FIELDS)
    if unknown:
        raise ConfigError(f"unknown params keys: {sorted(unknown)}")
    if precision_override is not None:
        raw["precision_bits"] = precision_override
    if "precision_bits" in raw:
        raw["precision_bits"] = int(raw["precision_bits"])
    return ModelParams(**raw)


def _parse_component(v):
    # "sqrtX" marks exact square roots in bundled configs
    if isinstance(v, str) and v.startswith("sqrt"):
        return sqrt_pos(real(v[4:]), "sqrt argument")
    return real(v)


def build_initial(config: dict, params: ModelParams):
    """Build the initial state under the active precision."""
    form = config.get("form", "scalar")
    init = config.get("initial")
    if not isinstance(init, dict):
        raise ConfigError("config must carry an 'initial' mapping")
    if "fixed_point" in init:
        from .dynamics import constant_eps_fixed_point
        fp = init["fixed_point"]
        return constant_eps_fixed_point(real(fp["eps"]), real(fp.get("rho", 0)), params)
    if form == "scalar":
        unknown = set(init) - set(SCALAR_FIELDS)
        if unknown:
            raise ConfigError(f"unknown scalar initial keys: {sorted(unknown)}")
        values = {k: real(init.get(k, 0)) for k in SCALAR_FIELDS}
        if values["eps"] <= 0:
            raise ConfigError(f"initial eps must be > 0, got {values['eps']}")
        return ScalarState(**values)
    if form == "vector":
        if "scalars" in init:
            from .dynamics import worldline_from_scalars
            sc = {k: real(init["scalars"].get(k, 0)) for k in SCALAR_FIELDS}
            if sc["eps"] <= 0:
                raise ConfigError(f"initial eps must be > 0, got {sc['eps']}")
            return worldline_from_scalars(ScalarState(**sc))
        try:
            u = FourVector(*[_parse_component(v) for v in init["u"]])
            a = FourVector(*[_parse_component(v) for v in init.get("a", [0, 0, 0, 0])])
            j = FourVector(*[_parse_component(v) for v in init.get("j", [0, 0, 0, 0])])
        except KeyError as exc:
            raise ConfigError(f"vector initial requires component lists: {exc}") from exc
        from .core import epsilon_of
        if epsilon_of(u) <= 0:
            raise ConfigError(f"initial eps must be > 0, got {epsilon_of(u)}")
        return WorldlineState(u=u, a=a, j=j)
    raise ConfigError(f"unknown form {form!r}")


def validate_emit(config: dict) -> list:
    emit = list(config.get("emit", ["state"]))
    for e in emit:
        if e not in EMIT_OPTIONS:
            raise ConfigError(f"unknown emit option {e!r}")
    for opt in ("scalars", "velocity"):
        if opt in emit and config.get("form", "scalar") != "vector":
            raise ConfigError(f"emit {opt!r} requires vector form")
    return emit
