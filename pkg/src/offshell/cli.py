"""Batch-run command line interface.

Subcommands: run, sweep, fixed-point, eigen-trace, regdemo.  Every run
writes <name>.csv plus <name>.meta.json with the fully resolved config,
so results are self-describing and exactly reproducible.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .core import ScalarState, three_velocity
from .dynamics import (constant_eps_fixed_point, k_positive_part,
                       k_potentials, scalar_rhs)
from .errors import (ConfigError, ConvergenceError, DomainError, FitError,
                     OffshellError)
from .integrator import (Outcome, Trajectory, blowup_time_estimate, integrate,
                         sweep_D, _as_scalar_state, _worldline_of)
from .numerics import format_real, precision, real, sig_digits
from .scenarios import (BUNDLED, bundled_config, build_initial, build_params,
                        validate_emit)
from .stability import classify_local, eigenvalues, jacobian

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SCALAR_COLUMNS = ["eps", "deps", "ddeps", "rho", "drho", "eta"]
VECTOR_COLUMNS = ["u_t", "u_x", "u_y", "u_z", "a_t", "a_x", "a_y", "a_z",
                  "j_t", "j_x", "j_y", "j_z"]


def _load_config(config_ref: str) -> dict:
    if config_ref in BUNDLED:
        return bundled_config(config_ref)
    path = Path(config_ref)
    if not path.exists():
        raise ConfigError(f"no bundled scenario or config file named {config_ref!r}")
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file does not parse: {exc}") from exc


def _resolve_precision(cli_bits, config):
    if cli_bits is not None:
        return int(cli_bits)
    env = os.environ.get("OFFSHELL_PRECISION")
    if env:
        return int(env)
    return int(config.get("params", {}).get("precision_bits", 256))


def _columns(form: str, emit: list) -> list:
    cols = ["tau"] + (SCALAR_COLUMNS if form == "scalar" else VECTOR_COLUMNS)
    if "scalars" in emit:
        cols += SCALAR_COLUMNS
    if "k_potentials" in emit:
        cols += ["k1", "k2", "k3"]
    if "eigenvalues" in emit:
        cols += [f"re{i}" for i in range(6)] + [f"im{i}" for i in range(6)]
    if "velocity" in emit:
        cols += ["v_x", "v_y", "v_z"]
    return cols


def _emit_rows(traj: Trajectory, params, emit, digits):
    rows = []
    for tau, st in traj.samples:
        row = [format_real(tau, digits)]
        row += [format_real(c, digits) for c in st]
        needs_scalars = any(e in emit
                            for e in ("scalars", "k_potentials", "eigenvalues"))
        if needs_scalars:
            s = _as_scalar_state(traj.form, st)
        if "scalars" in emit:
            row += [format_real(c, digits) for c in s.as_tuple()]
        if "k_potentials" in emit:
            k = k_potentials(s, params)
            row += [format_real(v, digits) for v in k.as_tuple()]
        if "eigenvalues" in emit:
            spec = eigenvalues(jacobian(s, params))
            row += [format_real(real(str(v.real)), digits) for v in spec.values]
            row += [format_real(real(str(v.imag)), digits) for v in spec.values]
        if "velocity" in emit:
            w = _worldline_of(st)
            row += [format_real(v, digits) for v in three_velocity(w.u)]
        rows.append(row)
    return rows


def _write_csv(path: Path, columns, rows):
    with open(path, "w") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


def _write_meta(path: Path, config, params, bits, traj: Trajectory,
                blowup=None, extra=None):
    meta = {
        "config": config,
        "resolved_params": {
            "D": str(params.D),
            "precision_bits": bits,
            "eps_floor": params.eps_floor,
            "eps_cap": params.eps_cap,
            "abs_tol": params.abs_tol,
            "rel_tol": params.rel_tol,
            "tau_max": params.tau_max,
            "h_min": params.h_min,
        },
        "outcome": traj.outcome.value,
        "tau_end": float(traj.tau_end),
        "blowup_tau": None if blowup is None else float(blowup),
        "samples": len(traj.samples),
        "library_version": __version__,
        "precision_bits": bits,
    }
    if extra:
        meta.update(extra)
    with open(path, "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")


def _execute_run(config, out_dir: Path, bits, form_override=None, force_eigen=False):
    if form_override:
        config["form"] = form_override
    form = config.get("form", "scalar")
    emit = validate_emit(config)
    if force_eigen and "eigenvalues" not in emit:
        emit.append("eigenvalues")
    with precision(bits):
        params = build_params(config, precision_override=bits)
        initial = build_initial(config, params)
        record_every = float(config.get("record_every", 0.1))
        traj = integrate(initial, params, form=form, record_every=record_every)
        blowup = None
        if traj.outcome is Outcome.DIVERGED:
            try:
                blowup = blowup_time_estimate(traj)
            except FitError:
                blowup = traj.blowup_tau
        digits = sig_digits(bits)
        name = config.get("name", "run")
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"{name}.csv"
        _write_csv(csv_path, _columns(form, emit), _emit_rows(traj, params, emit, digits))
        _write_meta(out_dir / f"{name}.meta.json", config, params, bits, traj,
                    blowup=blowup)
    return traj, blowup, csv_path


GRID_COLUMNS = ["eps", "deps", "k1", "k2", "k3", "k1p", "k2p", "k3p"]
GRID_FIXED_FIELDS = ("ddeps", "rho", "drho", "eta")


def _grid_axis(spec, what: str) -> list:
    if not isinstance(spec, dict):
        raise ConfigError(f"grid axis {what!r} must be a mapping with min, max, n")
    try:
        lo, hi, n = real(spec["min"]), real(spec["max"]), int(spec["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"grid axis {what!r} needs min, max, n: {exc}") from exc
    if n < 2:
        raise ConfigError(f"grid axis {what!r} needs n >= 2, got {n}")
    if not hi > lo:
        raise ConfigError(f"grid axis {what!r} needs max > min")
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _execute_grid(config, out_dir: Path, bits):
    """Tabulate the K-potentials and their positive parts on an (eps, deps) grid."""
    with precision(bits):
        params = build_params(config, precision_override=bits)
        gspec = config.get("grid")
        if not isinstance(gspec, dict) or not {"eps", "deps"} <= set(gspec):
            raise ConfigError("grid config needs a 'grid' mapping with 'eps' and 'deps' axes")
        unknown = set(gspec) - {"eps", "deps"}
        if unknown:
            raise ConfigError(f"unknown grid axes: {sorted(unknown)}")
        eps_axis = _grid_axis(gspec["eps"], "eps")
        deps_axis = _grid_axis(gspec["deps"], "deps")
        if eps_axis[0] <= 0:
            raise ConfigError(f"grid eps values must be > 0, got min {eps_axis[0]}")
        fixed_raw = config.get("fixed", {})
        unknown = set(fixed_raw) - set(GRID_FIXED_FIELDS)
        if unknown:
            raise ConfigError(f"unknown fixed-state keys: {sorted(unknown)}")
        fixed = {k: real(v) for k, v in fixed_raw.items()}
        digits = sig_digits(bits)
        rows = []
        for e in eps_axis:
            for de in deps_axis:
                k = k_potentials(ScalarState(e, de, **fixed), params)
                kp = k_positive_part(k)
                rows.append([format_real(v, digits)
                             for v in (e, de, *k.as_tuple(), *kp.as_tuple())])
        out_dir.mkdir(parents=True, exist_ok=True)
        name = config.get("name", "grid")
        csv_path = out_dir / f"{name}.csv"
        _write_csv(csv_path, GRID_COLUMNS, rows)
        meta = {
            "config": config,
            "resolved_params": {"D": str(params.D), "precision_bits": bits},
            "kind": "grid",
            "samples": len(rows),
            "library_version": __version__,
            "precision_bits": bits,
        }
        with open(out_dir / f"{name}.meta.json", "w") as f:
            json.dump(meta, f, indent=2)
            f.write("\n")
    return csv_path, len(rows)


@click.group()
def main():
    """Off-shell radiation-reaction simulation runs."""


@main.command("run")
@click.option("--config", "config_ref", required=True,
              help="Config JSON path or a bundled scenario name.")
@click.option("--out", "out_dir", default=".", type=click.Path(file_okay=False))
@click.option("--precision", "bits", default=None, type=int)
@click.option("--form", "form_override", default=None,
              type=click.Choice(["scalar", "vector"]))
def run_cmd(config_ref, out_dir, bits, form_override):
    """Integrate one scenario and write <name>.csv + <name>.meta.json."""
    _guarded(lambda: _run_impl(config_ref, out_dir, bits, form_override, False))


def _run_impl(config_ref, out_dir, bits, form_override, force_eigen):
    config = _load_config(config_ref)
    bits = _resolve_precision(bits, config)
    if config.get("kind") == "grid":
        if form_override or force_eigen:
            raise ConfigError("grid configs take no --form and no eigen-trace")
        csv_path, n = _execute_grid(config, Path(out_dir), bits)
        click.echo(f"{config.get('name', 'grid')}: grid ({n} points)")
        click.echo(f"wrote {csv_path}")
        return
    traj, blowup, csv_path = _execute_run(config, Path(out_dir), bits,
                                          form_override, force_eigen)
    click.echo(f"{config.get('name', 'run')}: {traj.outcome.value} "
               f"tau_end={float(traj.tau_end):.6g}"
               + (f" blowup_tau={float(blowup):.6g}" if blowup is not None else ""))
    click.echo(f"wrote {csv_path}")
    if traj.outcome is Outcome.STEP_COLLAPSE:
        raise ConvergenceError("integration halted by step collapse")


@main.command("eigen-trace")
@click.option("--config", "config_ref", required=True)
@click.option("--out", "out_dir", default=".", type=click.Path(file_okay=False))
@click.option("--precision", "bits", default=None, type=int)
@click.option("--form", "form_override", default=None,
              type=click.Choice(["scalar", "vector"]))
def eigen_trace_cmd(config_ref, out_dir, bits, form_override):
    """Like run, but always emits the eigenvalue columns re0..re5, im0..im5."""
    _guarded(lambda: _run_impl(config_ref, out_dir, bits, form_override, True))


@main.command("sweep")
@click.option("--config", "config_ref", required=True)
@click.option("--d-values", "d_values", required=True,
              help="Comma-separated list of D values.")
@click.option("--out", "out_dir", default=".", type=click.Path(file_okay=False))
@click.option("--precision", "bits", default=None, type=int)
def sweep_cmd(config_ref, d_values, out_dir, bits):
    """Run the scenario once per D value and write a summary CSV."""
    def impl():
        config = _load_config(config_ref)
        nbits = _resolve_precision(bits, config)
        ds = [v.strip() for v in d_values.split(",") if v.strip()]
        if not ds:
            raise ConfigError("empty --d-values list")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        name = config.get("name", "run")
        summary = [["D", "outcome", "blowup_tau_or_final_eps", "tau_end"]]
        for d in ds:
            sub = json.loads(json.dumps(config))
            sub.setdefault("params", {})["D"] = d
            sub["name"] = f"{name}-D{d}"
            traj, blowup, _ = _execute_run(sub, out, nbits)
            if traj.outcome is Outcome.DIVERGED:
                marker = format_real(blowup, 17)
            else:
                final = _as_scalar_state(traj.form, traj.samples[-1][1]).eps
                marker = format_real(final, 17)
            summary.append([str(d), traj.outcome.value, marker,
                            format_real(traj.tau_end, 17)])
        path = out / f"{name}.sweep.csv"
        with open(path, "w") as f:
            for row in summary:
                f.write(",".join(row) + "\n")
        click.echo(f"wrote {path}")
    _guarded(impl)


@main.command("fixed-point")
@click.argument("eps")
@click.argument("rho")
@click.argument("d")
@click.option("--precision", "bits", default=256, type=int)
def fixed_point_cmd(eps, rho, d, bits):
    """Construct the constant-eps state, verify it, and print its spectrum."""
    def impl():
        from .core import ModelParams
        with precision(int(bits)):
            try:
                params = ModelParams(D=d, precision_bits=int(bits))
                fp = constant_eps_fixed_point(real(eps), real(rho), params)
            except (DomainError, ConfigError, ValueError) as exc:
                raise ConfigError(str(exc)) from exc
            rhs = scalar_rhs(fp, params)
            resid = max(abs(v) for v in rhs)
            digits = sig_digits(int(bits))
            click.echo("fixed point (eps, deps, ddeps, rho, drho, eta):")
            click.echo("  " + ", ".join(format_real(v, digits) for v in fp.as_tuple()))
            click.echo(f"rhs residual (max |f|): {format_real(resid, 6)}")
            spec = eigenvalues(jacobian(fp, params))
            click.echo("eigenvalue real parts (descending): "
                       + ", ".join(f"{float(v.real):+.8g}" for v in spec.values))
            click.echo(f"classification: {classify_local(spec)}")
    _guarded(impl)


@main.command("regdemo")
@click.option("--precision", "bits", default=256, type=int)
def regdemo_cmd(bits):
    """Run the regularization identity suite on fixed seeds and print a table."""
    def impl():
        from .regdemo import run_regdemo
        ok = run_regdemo(int(bits), echo=click.echo)
        if not ok:
            raise ConvergenceError("regularization identity suite failed")
    _guarded(impl)


def _guarded(fn):
    try:
        fn()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except (ConvergenceError, DomainError, FitError) as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    except OffshellError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)


if __name__ == "__main__":
    main()
