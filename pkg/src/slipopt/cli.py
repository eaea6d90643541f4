"""Command-line front end: validation study, optimization, export.

Commands share a small validated configuration (shape file, resolution,
mode) and write deterministic artifacts: JSON results with floats fixed
to 17 significant digits, legacy-VTK surface/path files, CSV paths, and
an optional binary cache keyed by the shape content hash and resolution.

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 validation-threshold failure.
"""

import json
import os
import sys
from dataclasses import dataclass

import click
import numpy as np
from scipy.linalg import cho_factor

from . import shapes as shapes_mod
from .axisym import (ModeMismatchError, axisym_optimize, cross_check_general)
from .bie import SolverError, assemble_operators, solve_dirichlet, solve_mixed
from .grid import build_grid
from .kernels import point_force_solution, point_force_velocity
from .optimizer import global_minimize, partial_minimize
from .reduction import GaitSystem, build_gait_system, power_from_alpha
from .rigid_body import ResolutionError, RigidSystem, assemble_rigid_system
from .shapes import ShapeError, ShapeSpec
from .symmetry import build_symmetry_report, check_prop_symmetry_consequences
from .trajectory import (analytic_helix, helix_geometry, integrate_path,
                         net_velocity, write_path_csv, write_path_vtk)

EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_THRESHOLD = 4


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    shape: ShapeSpec
    p: int
    mode: str = "auto"
    out: str = "."
    cache: bool = True
    fixed_W: np.ndarray = None
    alpha: np.ndarray = None
    multistart: int = 26
    cross_check: bool = False
    traj_T: float = None
    traj_dt: float = None


def _parse_vector(text, n, name):
    if text is None:
        return None
    try:
        vals = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ConfigError(f"{name} must be {n} comma-separated numbers")
    if vals.size != n:
        raise ConfigError(f"{name} must have {n} components, got {vals.size}")
    return vals


def load_config(shape_path, p, mode="auto", out=".", cache=True,
                fixed_w=None, alpha=None, multistart=26, cross_check=False,
                traj_t=None, traj_dt=None):
    """Validate raw CLI parameters into a RunConfig (before any solve)."""
    if p < 4:
        raise ConfigError("resolution p must be at least 4")
    if mode not in ("auto", "general", "axisym"):
        raise ConfigError(f"unknown mode {mode!r}")
    try:
        shape = ShapeSpec.from_file(shape_path)
    except (OSError, ShapeError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot load shape {shape_path}: {exc}")
    W = _parse_vector(fixed_w, 3, "--fixed-W")
    if W is not None and not np.any(W):
        raise ConfigError("--fixed-W must be nonzero")
    a = _parse_vector(alpha, 6, "--alpha")
    if multistart < 1:
        raise ConfigError("--multistart must be positive")
    if (traj_t is None) != (traj_dt is None):
        raise ConfigError("--traj-T and --traj-dt must be given together")
    if traj_t is not None and (traj_t <= 0 or traj_dt <= 0):
        raise ConfigError("trajectory duration and step must be positive")
    return RunConfig(shape=shape, p=p, mode=mode, out=out, cache=cache,
                     fixed_W=W, alpha=a, multistart=multistart,
                     cross_check=cross_check, traj_T=traj_t, traj_dt=traj_dt)


# -- deterministic JSON ---------------------------------------------------

def _json_fmt(value, indent=0):
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_json_fmt(v, indent + 1)}'
            for k, v in value.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        seq = list(np.asarray(value).tolist()) \
            if isinstance(value, np.ndarray) else list(value)
        items = ", ".join(_json_fmt(v, indent + 1) for v in seq)
        return "[" + items + "]"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not np.isfinite(v):
            return json.dumps(None)
        return format(v, ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return json.dumps(value)


def write_json(path, data):
    """Deterministic JSON: 17-significant-digit floats, stable layout."""
    with open(path, "w") as fh:
        fh.write(_json_fmt(data) + "\n")


def write_surface_vtk(path, grid, vector_fields):
    """Legacy-VTK point cloud of the grid with named vector point data."""
    n = grid.n_nodes
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("swimmer surface fields\nASCII\nDATASET POLYDATA\n")
        fh.write(f"POINTS {n} double\n")
        for x in grid.nodes:
            fh.write(f"{x[0]:.17g} {x[1]:.17g} {x[2]:.17g}\n")
        fh.write(f"POINT_DATA {n}\n")
        for name, field in vector_fields.items():
            fh.write(f"VECTORS {name} double\n")
            for v in np.asarray(field):
                fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")


# -- pipeline with caching ------------------------------------------------

def _cache_path(config, mode):
    key = f"{config.shape.content_hash()}_p{config.p}_{mode}"
    return os.path.join(config.out, "cache", f"{key}.npz")


def _save_cache(path, rigid, system):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    np.savez_compressed(
        path,
        C=rigid.C, rigid_tractions=rigid.tractions,
        extractors=rigid.extractors,
        symmetry_residual=rigid.symmetry_residual,
        A=system.A, Z=system.Z, z_fields=system.z_fields,
        y_fields=system.y_fields, tractions=system.tractions,
        rigid_parts=system.rigid_parts,
        asymmetry_residual=system.asymmetry_residual,
        degenerate_directions=np.array(system.degenerate_directions,
                                       dtype=int),
        unreachable_dimension=system.unreachable_dimension,
    )


def _load_cache(path, grid):
    from .rigid_body import rigid_basis

    data = np.load(path)
    rigid = RigidSystem(
        grid=grid, basis=rigid_basis(grid),
        tractions=data["rigid_tractions"], C=data["C"],
        extractors=data["extractors"],
        symmetry_residual=float(data["symmetry_residual"]))
    rigid._cho = cho_factor(rigid.C)
    system = GaitSystem(
        grid=grid, rigid=rigid, A=data["A"], Z=data["Z"],
        z_fields=data["z_fields"], y_fields=data["y_fields"],
        tractions=data["tractions"], rigid_parts=data["rigid_parts"],
        asymmetry_residual=float(data["asymmetry_residual"]),
        degenerate_directions=tuple(int(k) for k in
                                    data["degenerate_directions"]),
        unreachable_dimension=int(data["unreachable_dimension"]))
    return rigid, system


def run_reduction_pipeline(config, reduction_mode):
    """Grid + operators + rigid + gait system, honoring the binary cache."""
    grid = build_grid(config.shape, config.p)
    cache_file = _cache_path(config, reduction_mode)
    if config.cache and os.path.exists(cache_file):
        rigid, system = _load_cache(cache_file, grid)
        return grid, None, rigid, system
    operators = assemble_operators(grid)
    rigid = assemble_rigid_system(grid, operators)
    system = build_gait_system(grid, operators, rigid, mode=reduction_mode)
    if config.cache:
        _save_cache(cache_file, rigid, system)
    return grid, operators, rigid, system


def _resolve_mode(config, report):
    if config.mode != "auto":
        return config.mode
    if report.classification == "A" and config.p % 2 == 0:
        return "axisym"
    return "general"


# -- studies --------------------------------------------------------------

def point_force_study(shape, p_values, F=(1.0, 0.5, 1.0 / 3.0),
                      x0=(0.1, 0.2, -0.3), n_eval=40, radius=2.5, seed=0):
    """Exterior point-force benchmark: solver errors versus resolution.

    For each p, solves the Dirichlet problem with boundary data from an
    interior Stokeslet and the mixed problem with the matching tangential
    traction / normal velocity data, then reports the off-surface flow
    error (L-infinity over points on a sphere of ``radius``) and the
    relative power-pairing error.
    """
    F = np.asarray(F, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n_eval, 3))
    pts = radius * pts / np.linalg.norm(pts, axis=1)[:, None]
    u_ref = point_force_velocity(F, x0, pts)
    records = []
    for p in p_values:
        grid = build_grid(shape, p)
        operators = assemble_operators(grid)
        u_exact, f_exact = point_force_solution(F, x0, grid)
        _, f_num, evaluate = solve_dirichlet(grid, operators, u_exact)
        flow_err = float(np.abs(evaluate(pts) - u_ref).max())
        nn = grid.normals
        f_tan = f_exact - np.sum(f_exact * nn, axis=1)[:, None] * nn
        u_norm = np.sum(u_exact * nn, axis=1)
        sol = solve_mixed(grid, operators, f_tan, normal_data=u_norm)
        P_num = float(np.sum(grid.weights
                             * np.sum(sol.traction * sol.velocity, axis=1)))
        P_ref = float(np.sum(grid.weights
                             * np.sum(f_exact * u_exact, axis=1)))
        records.append({
            "p": int(p),
            "n_nodes": grid.n_nodes,
            "flow_error": flow_err,
            "traction_error": float(np.abs(f_num - f_exact).max()),
            "power_error": abs(P_num - P_ref) / abs(P_ref),
        })
    return records


def _gait_dict(gait):
    d = {
        "W": gait.W, "s": gait.s, "V": gait.V,
        "U": gait.U, "Omega": gait.Omega,
        "power": gait.power,
        "classification": gait.classification,
        "consistent": gait.consistent,
        "near_degenerate": gait.near_degenerate,
        "scalars": dict(gait.scalars),
    }
    if np.isfinite(gait.stationarity_residual):
        d["stationarity_residual"] = gait.stationarity_residual
    return d


def _maybe_write_trajectory(config, U, Omega, prefix):
    if config.traj_T is None:
        return None
    times, positions, quaternions = integrate_path(
        U, Omega, config.traj_T, config.traj_dt)
    csv_path = os.path.join(config.out, f"{prefix}_path.csv")
    vtk_path = os.path.join(config.out, f"{prefix}_path.vtk")
    write_path_csv(csv_path, times, positions, quaternions)
    write_path_vtk(vtk_path, positions)
    return [csv_path, vtk_path]


# -- commands -------------------------------------------------------------

def cmd_validate(config, p_values, flow_threshold=1e-6):
    """Point-force convergence study; threshold gate on the finest grid."""
    records = point_force_study(config.shape, p_values)
    passed = records[-1]["flow_error"] < flow_threshold
    monotone = all(records[i + 1]["flow_error"] < records[i]["flow_error"]
                   for i in range(len(records) - 1))
    report = {
        "shape": config.shape.to_dict(),
        "records": records,
        "flow_threshold": flow_threshold,
        "monotone_decay": monotone,
        "passed": passed,
    }
    os.makedirs(config.out, exist_ok=True)
    write_json(os.path.join(config.out, "validate.json"), report)
    return report


def cmd_optimize(config):
    """Full pipeline: reduction, symmetry report, global gait optimum."""
    os.makedirs(config.out, exist_ok=True)
    report = build_symmetry_report(config.shape)
    mode = _resolve_mode(config, report)
    if mode == "axisym" and config.fixed_W is None and config.alpha is None:
        return cmd_axisym(config)
    reduction_mode = "axisym" if mode == "axisym" else "general"
    grid, _, rigid, system = run_reduction_pipeline(config, reduction_mode)
    report = build_symmetry_report(
        config.shape, {"C": rigid.C, "A": system.A, "Z": system.Z})
    result = {
        "shape": config.shape.to_dict(),
        "p": config.p,
        "mode_used": reduction_mode,
        "matrices": {
            "C": rigid.C, "A": system.A, "Z": system.Z,
            "C_symmetry_residual": rigid.symmetry_residual,
            "A_asymmetry_residual": system.asymmetry_residual,
            "unreachable_dimension": system.unreachable_dimension,
        },
        "symmetry": report.to_dict(),
    }
    if config.alpha is not None:
        result["alpha_query"] = {
            "alpha": config.alpha,
            "power": power_from_alpha(system, config.alpha),
        }
    if config.fixed_W is not None:
        gait = partial_minimize(system, config.fixed_W)
        result["fixed_W_gait"] = _gait_dict(gait)
    if config.fixed_W is None and config.alpha is None:
        gait = global_minimize(system, multistart_count=config.multistart)
        result["gait"] = _gait_dict(gait)
        result["symmetry_consequences"] = check_prop_symmetry_consequences(
            report, gait)
        W_net, motion_class = net_velocity(gait.U, gait.Omega)
        result["net_motion"] = {"W": W_net, "class": motion_class}
        if gait.s != 0.0 and np.linalg.norm(gait.V) > 0:
            geom = helix_geometry(gait.s, gait.V, gait.W)
            result["helix"] = {
                "radius": geom.radius, "pitch": geom.pitch,
                "period": geom.period, "axis": geom.axis,
            }
        files = _maybe_write_trajectory(config, gait.U, gait.Omega,
                                        "optimize")
        if files:
            result["trajectory_files"] = files
        if gait.slip is not None:
            write_surface_vtk(
                os.path.join(config.out, "optimal_slip.vtk"), grid,
                {"slip": gait.slip, "normal": grid.normals})
    write_json(os.path.join(config.out, "optimize.json"), result)
    return result


def cmd_axisym(config):
    """Six-solve axisymmetric pipeline with optional general cross-check."""
    os.makedirs(config.out, exist_ok=True)
    grid = build_grid(config.shape, config.p)
    operators = assemble_operators(grid)
    gait = axisym_optimize(grid, operators)
    result = {
        "shape": config.shape.to_dict(),
        "p": config.p,
        "mode_used": "axisym-6",
        "gait": gait.to_dict(),
    }
    if config.cross_check:
        result["cross_check"] = cross_check_general(grid, operators)
    write_surface_vtk(
        os.path.join(config.out, "optimal_slip.vtk"), grid,
        {"slip": gait.slip, "normal": grid.normals})
    write_json(os.path.join(config.out, "axisym.json"), result)
    return result


def cmd_trajectory(config, U, Omega):
    """Integrate and export the path of a rigid motion (U, Omega)."""
    os.makedirs(config.out, exist_ok=True)
    if config.traj_T is None:
        raise ConfigError("trajectory needs --traj-T and --traj-dt")
    files = _maybe_write_trajectory(config, U, Omega, "trajectory")
    W, motion_class = net_velocity(U, Omega)
    result = {"U": np.asarray(U), "Omega": np.asarray(Omega),
              "W": W, "class": motion_class, "files": files}
    write_json(os.path.join(config.out, "trajectory.json"), result)
    return result


def cmd_export(config):
    """Write matrices (JSON) and slip basis fields (legacy VTK)."""
    os.makedirs(config.out, exist_ok=True)
    grid, _, rigid, system = run_reduction_pipeline(
        config, "axisym" if config.mode == "axisym" else "general")
    write_json(os.path.join(config.out, "matrices.json"), {
        "shape": config.shape.to_dict(),
        "p": config.p,
        "C": rigid.C, "C_inverse": rigid.C_inverse,
        "A": system.A, "Z": system.Z,
    })
    fields = {"normal": grid.normals}
    for i in range(6):
        fields[f"y{i + 1}"] = system.y_fields[i]
    write_surface_vtk(os.path.join(config.out, "fields.vtk"), grid, fields)
    return {"out": config.out}


# -- click wiring ---------------------------------------------------------

def _common(f):
    f = click.option("--shape", "shape_path", required=True,
                     type=click.Path(exists=False),
                     help="YAML shape specification")(f)
    f = click.option("--p", default=12, show_default=True,
                     help="grid resolution degree")(f)
    f = click.option("--mode", default="auto", show_default=True,
                     type=click.Choice(["auto", "general", "axisym"]))(f)
    f = click.option("--out", default=".", show_default=True,
                     help="output directory")(f)
    f = click.option("--cache/--no-cache", default=True,
                     show_default=True)(f)
    return f


def _run(builder):
    try:
        return builder()
    except (ConfigError, ShapeError, ModeMismatchError, ValueError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except (SolverError, ResolutionError) as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_SOLVER)


@click.group()
def main():
    """Minimum-power slip gaits of rigid microswimmers in Stokes flow."""


@main.command("validate")
@_common
@click.option("--p-values", default="8,12,16", show_default=True,
              help="comma-separated resolution sweep")
def validate_command(shape_path, p, mode, out, cache, p_values):
    def run():
        config = load_config(shape_path, p, mode, out, cache)
        sweep = [int(v) for v in p_values.split(",")]
        return cmd_validate(config, sweep)

    report = _run(run)
    for rec in report["records"]:
        click.echo(f"p={rec['p']:3d}  flow={rec['flow_error']:.3e}  "
                   f"power={rec['power_error']:.3e}")
    if not report["passed"]:
        click.echo("flow-error threshold not met", err=True)
        sys.exit(EXIT_THRESHOLD)
    click.echo("validation passed")


@main.command("optimize")
@_common
@click.option("--fixed-W", "fixed_w", default=None,
              help="fix the net direction, e.g. '0,0,1'")
@click.option("--alpha", default=None,
              help="power query for a rigid motion, 6 components")
@click.option("--multistart", default=26, show_default=True)
@click.option("--traj-T", "traj_t", default=None, type=float)
@click.option("--traj-dt", "traj_dt", default=None, type=float)
def optimize_command(shape_path, p, mode, out, cache, fixed_w, alpha,
                     multistart, traj_t, traj_dt):
    def run():
        config = load_config(shape_path, p, mode, out, cache,
                             fixed_w=fixed_w, alpha=alpha,
                             multistart=multistart,
                             traj_t=traj_t, traj_dt=traj_dt)
        return cmd_optimize(config)

    result = _run(run)
    if "gait" in result:
        g = result["gait"]
        power = g.get("power", g.get("P_star"))
        click.echo(f"optimal power {power:.6f}  "
                   f"class {g['classification']}")
    if "alpha_query" in result:
        click.echo(f"power(alpha) = {result['alpha_query']['power']:.6f}")
    if "fixed_W_gait" in result:
        click.echo(
            f"fixed-W power {result['fixed_W_gait']['power']:.6f}")


@main.command("axisym")
@_common
@click.option("--cross-check", is_flag=True, default=False,
              help="also run the general 12-solve pipeline and compare")
def axisym_command(shape_path, p, mode, out, cache, cross_check):
    def run():
        config = load_config(shape_path, p, mode, out, cache,
                             cross_check=cross_check)
        return cmd_axisym(config)

    result = _run(run)
    g = result["gait"]
    click.echo(f"P*={g['P_star']:.6f}  {g['classification']}  "
               f"Z11={g['Z11']:.6f} Z33={g['Z33']:.6f}")
    if "cross_check" in result and not result["cross_check"]["agrees"]:
        click.echo("cross-check disagreement", err=True)
        sys.exit(EXIT_THRESHOLD)


@main.command("trajectory")
@_common
@click.option("--U", "u_text", required=True, help="body velocity 'ux,uy,uz'")
@click.option("--Omega", "omega_text", required=True,
              help="body angular velocity 'wx,wy,wz'")
@click.option("--traj-T", "traj_t", required=True, type=float)
@click.option("--traj-dt", "traj_dt", required=True, type=float)
def trajectory_command(shape_path, p, mode, out, cache, u_text, omega_text,
                       traj_t, traj_dt):
    def run():
        config = load_config(shape_path, p, mode, out, cache,
                             traj_t=traj_t, traj_dt=traj_dt)
        U = _parse_vector(u_text, 3, "--U")
        Omega = _parse_vector(omega_text, 3, "--Omega")
        return cmd_trajectory(config, U, Omega)

    result = _run(run)
    click.echo(f"motion class {result['class']}; files: "
               + ", ".join(result["files"]))


@main.command("export")
@_common
def export_command(shape_path, p, mode, out, cache):
    def run():
        config = load_config(shape_path, p, mode, out, cache)
        return cmd_export(config)

    _run(run)
    click.echo(f"wrote matrices.json and fields.vtk to {out}")


if __name__ == "__main__":
    main()
