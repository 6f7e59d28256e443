"""Command-line surface: single runs, parameter sweeps, root reports, verification.

Configuration is a single JSON document; command-line flags override file
values.  Parameters can be given either explicitly (lambda, W, alpha1,
alpha2, K) or dimensionlessly as (R_rel, K_rel, r1) with lambda = 1 implied,
matching how the regimes of interest are usually quoted.

Exit codes: 0 success, 1 verification failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .analysis import concurrence_series, steady_state_verdict
from .closedform import (
    DegenerateRootsError,
    char_cubic,
    char_roots,
    residue_coefficients,
    surviving_pole,
)
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    integrate_pseudomode,
    integrate_volterra,
    leak_series,
    sample_closed_form,
)
from .model import InitialAmplitudes, SystemParams, bell_state, validate_initial
from .verification import (
    LEAK_IDENTITY_TOL,
    THREE_SOLVER_TOL,
    compare_solvers,
    leak_identity_residual,
)
from . import svgplot

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2

TRAJECTORY_COLUMNS = (
    "tau", "re_c1", "im_c1", "re_c2", "im_c2", "re_b", "im_b",
    "p1", "p2", "pb", "p_leak", "concurrence",
)

_KNOWN_KEYS = {
    "lambda", "W", "alpha1", "alpha2", "K", "omega0",
    "R_rel", "K_rel", "r1",
    "init", "renormalize",
    "t_end", "solver", "samples", "n_steps",
    "rel_tol", "abs_tol", "fixed_dt", "max_step", "sample_stride",
    "out", "svg", "jobs",
    "K_values", "K_rel_values", "tau_grid",
}


class ConfigError(Exception):
    """Bad configuration; maps to exit code 2."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# configuration handling


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    unknown = set(cfg) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    return cfg


def _require_number(cfg: dict, key: str) -> float:
    if key not in cfg:
        raise ConfigError(f"missing required field '{key}'")
    v = cfg[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"field '{key}' must be a number, got {v!r}")
    return float(v)


def params_from_config(cfg: dict) -> SystemParams:
    dimless = {"R_rel", "K_rel", "r1"} & set(cfg)
    explicit = {"W", "alpha1", "alpha2"} & set(cfg)
    if dimless and explicit:
        raise ConfigError(
            "give either dimensionless (R_rel, K_rel, r1) or explicit "
            "(W, alpha1, alpha2, K) parameters, not both"
        )
    try:
        if dimless:
            lam = float(cfg.get("lambda", 1.0))
            r1 = _require_number(cfg, "r1")
            if not 0.0 <= r1 <= 1.0:
                raise ConfigError(f"field 'r1' must lie in [0, 1], got {r1}")
            r2 = math.sqrt(max(0.0, 1.0 - r1 * r1))
            return SystemParams(
                lam=lam,
                W=_require_number(cfg, "R_rel") * lam,
                alpha1=r1,
                alpha2=r2,
                K=float(cfg.get("K_rel", 0.0)) * lam,
                omega0=float(cfg.get("omega0", 0.0)),
            )
        return SystemParams(
            lam=_require_number(cfg, "lambda"),
            W=_require_number(cfg, "W"),
            alpha1=_require_number(cfg, "alpha1"),
            alpha2=_require_number(cfg, "alpha2"),
            K=_require_number(cfg, "K"),
            omega0=float(cfg.get("omega0", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from exc


def init_from_config(cfg: dict, default: str | None = None) -> InitialAmplitudes:
    value = cfg.get("init", default)
    if value is None:
        raise ConfigError("missing required field 'init'")
    if isinstance(value, str):
        if value not in ("phi_plus", "phi_minus"):
            raise ConfigError(
                f"named initial state must be 'phi_plus' or 'phi_minus', got {value!r}"
            )
        return bell_state(value.removeprefix("phi_"))
    if isinstance(value, dict):
        extra = set(value) - {"c10", "c20"}
        if extra:
            raise ConfigError(f"unknown init field(s): {', '.join(sorted(extra))}")
        amps = []
        for key in ("c10", "c20"):
            pair = value.get(key)
            if (
                not isinstance(pair, (list, tuple))
                or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
            ):
                raise ConfigError(f"init field '{key}' must be a [re, im] pair")
            amps.append(complex(pair[0], pair[1]))
        mode = "renormalize" if cfg.get("renormalize", False) else "strict"
        try:
            return validate_initial(InitialAmplitudes(amps[0], amps[1]), mode)
        except ValueError as exc:
            raise ConfigError(f"invalid init: {exc}") from exc
    raise ConfigError("field 'init' must be a state name or {c10, c20} pairs")


def integrator_from_config(cfg: dict) -> IntegratorConfig:
    try:
        return IntegratorConfig(
            rel_tol=float(cfg.get("rel_tol", 1e-9)),
            abs_tol=float(cfg.get("abs_tol", 1e-12)),
            dt=float(cfg["fixed_dt"]) if cfg.get("fixed_dt") is not None else None,
            max_step=float(cfg.get("max_step", math.inf)),
            sample_stride=int(cfg.get("sample_stride", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid integrator settings: {exc}") from exc


def _merged_config(args: argparse.Namespace) -> dict:
    cfg = load_config(args.config) if args.config else {}
    overrides = {
        "out": getattr(args, "out", None),
        "solver": getattr(args, "solver", None),
        "t_end": getattr(args, "t_end", None),
        "fixed_dt": getattr(args, "fixed_dt", None),
        "jobs": getattr(args, "jobs", None),
    }
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    if getattr(args, "svg", False):
        cfg["svg"] = True
    return cfg


# ---------------------------------------------------------------------------
# CSV emission


def write_trajectory_csv(path: str, traj: Trajectory) -> None:
    """Write the canonical trajectory table; tau is lam * t."""
    lam = traj.params.lam
    tau = lam * traj.t
    p1, p2, pb = traj.p1, traj.p2, traj.pb
    _, p_leak = leak_series(traj)
    conc = np.minimum(2.0 * np.abs(traj.c1) * np.abs(traj.c2), 1.0)
    clip = lambda a: np.clip(a, 0.0, 1.0)
    cols = [
        tau,
        traj.c1.real, traj.c1.imag,
        traj.c2.real, traj.c2.imag,
        traj.b.real, traj.b.imag,
        clip(p1), clip(p2), clip(pb), p_leak, conc,
    ]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
            for row in zip(*cols):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _write_sweep_csv(path: str, tau: np.ndarray, k_values, columns) -> None:
    header = ["tau"] + [f"K={_fmt(k)}" for k in k_values]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for i, tv in enumerate(tau):
                fh.write(
                    ",".join([_fmt(tv)] + [_fmt(col[i]) for col in columns]) + "\n"
                )
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# run


def _run_trajectory(
    params: SystemParams,
    init: InitialAmplitudes,
    t_end: float,
    solver: str,
    cfg_json: dict,
) -> Trajectory:
    samples = int(cfg_json.get("samples", 2001))
    if samples < 2:
        raise ConfigError(f"field 'samples' must be >= 2, got {samples}")
    grid = np.linspace(0.0, t_end, samples)
    icfg = integrator_from_config(cfg_json)
    if solver == "closed":
        try:
            return sample_closed_form(params, init, grid)
        except DegenerateRootsError as exc:
            print(
                f"note: closed form unavailable ({exc}); falling back to the "
                "adaptive integrator",
                file=sys.stderr,
            )
            solver = "ode"
    if solver == "ode":
        if icfg.dt is not None:
            return integrate_pseudomode(params, init, t_end, cfg=icfg)
        return integrate_pseudomode(params, init, t_end, cfg=icfg, times=grid)
    if solver == "volterra":
        n_steps = int(cfg_json.get("n_steps", 20000))
        per = max(1, math.ceil(n_steps / (samples - 1)))
        traj = integrate_volterra(params, init, t_end, per * (samples - 1))
        idx = slice(None, None, per)
        return Trajectory(
            params=params,
            derived=traj.derived,
            init=init,
            t=traj.t[idx],
            c1=traj.c1[idx],
            c2=traj.c2[idx],
            b=traj.b[idx],
            solver_tag="volterra",
        )
    raise ConfigError(
        f"solver for 'run' must be one of closed|ode|volterra, got {solver!r}"
    )


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    params = params_from_config(cfg)
    init = init_from_config(cfg)
    if "t_end" not in cfg:
        raise ConfigError("missing required field 't_end' (or --t-end)")
    t_end = _require_number(cfg, "t_end")
    if t_end <= 0.0:
        raise ConfigError(f"field 't_end' must be positive, got {t_end}")
    solver = cfg.get("solver", "ode")
    traj = _run_trajectory(params, init, t_end, solver, cfg)
    out = cfg.get("out", "trajectory.csv")
    write_trajectory_csv(out, traj)
    print(f"wrote {len(traj)} samples to {out} (solver: {traj.solver_tag})")
    if cfg.get("svg", False):
        svg_path = os.path.splitext(out)[0] + ".svg"
        tau, conc = concurrence_series(traj)
        tau = params.lam * tau
        _, p_leak = leak_series(traj)
        svgplot.line_chart(
            svg_path,
            tau,
            {
                "concurrence": conc,
                "p1 + p2": traj.p1 + traj.p2,
                "pb": traj.pb,
                "p_leak": p_leak,
            },
            title="time evolution",
            xlabel="tau = lam * t",
            ylabel="concurrence / population",
        )
        print(f"wrote {svg_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def _sweep_column(task) -> np.ndarray:
    """Concurrence column for one dipole strength; closed form with ODE fallback."""
    params, init, times = task
    try:
        sol = residue_coefficients(params, init)
        c1, c2, _ = sol.evolve(times)
    except DegenerateRootsError:
        if times[0] == 0.0:
            grid = times
            drop = 0
        else:
            grid = np.concatenate(([0.0], times))
            drop = 1
        traj = integrate_pseudomode(params, init, float(times[-1]), times=grid)
        c1, c2 = traj.c1[drop:], traj.c2[drop:]
    return np.minimum(2.0 * np.abs(c1) * np.abs(c2), 1.0)


def _tau_grid_from_config(cfg: dict) -> np.ndarray:
    value = cfg.get("tau_grid")
    if value is None:
        raise ConfigError("missing required field 'tau_grid'")
    if (
        isinstance(value, (list, tuple))
        and len(value) == 3
        and isinstance(value[2], int)
        and not isinstance(value[2], bool)
    ):
        start, stop, num = float(value[0]), float(value[1]), value[2]
        if num < 2 or stop <= start or start < 0.0:
            raise ConfigError("field 'tau_grid' [start, stop, num] must satisfy 0 <= start < stop, num >= 2")
        return np.linspace(start, stop, num)
    if isinstance(value, (list, tuple)) and value:
        grid = np.asarray(value, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0.0) or grid[0] < 0.0:
            raise ConfigError("field 'tau_grid' must be strictly increasing and nonnegative")
        return grid
    raise ConfigError("field 'tau_grid' must be [start, stop, num] or a nonempty list")


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    base = params_from_config(cfg)
    init = init_from_config(cfg)
    tau = _tau_grid_from_config(cfg)
    if "K_values" in cfg and "K_rel_values" in cfg:
        raise ConfigError("give 'K_values' or 'K_rel_values', not both")
    if "K_values" in cfg:
        k_values = [float(v) for v in cfg["K_values"]]
    elif "K_rel_values" in cfg:
        k_values = [float(v) * base.lam for v in cfg["K_rel_values"]]
    else:
        raise ConfigError("missing required field 'K_values' (or 'K_rel_values')")
    if not k_values:
        raise ConfigError("sweep axis must be nonempty")

    times = tau / base.lam
    tasks = []
    for k in k_values:
        p = SystemParams(
            lam=base.lam, W=base.W, alpha1=base.alpha1, alpha2=base.alpha2,
            K=k, omega0=base.omega0,
        )
        tasks.append((p, init, times))

    jobs = int(cfg.get("jobs") or os.cpu_count() or 1)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            columns = list(pool.map(_sweep_column, tasks))
    else:
        columns = [_sweep_column(t) for t in tasks]

    out = cfg.get("out", "sweep.csv")
    _write_sweep_csv(out, tau, k_values, columns)
    print(f"wrote {tau.size} x {len(k_values)} sweep to {out}")
    if cfg.get("svg", False):
        svg_path = os.path.splitext(out)[0] + ".svg"
        z = np.vstack(columns)
        svgplot.heatmap(
            svg_path, tau, np.asarray(k_values), z,
            title="concurrence vs dipole strength",
            xlabel="tau = lam * t", ylabel="K",
        )
        print(f"wrote {svg_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# roots


def cmd_roots(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    params = params_from_config(cfg)
    init = init_from_config(cfg, default="phi_minus")
    cubic = char_cubic(params)
    roots = char_roots(params)
    e1 = sum(roots.roots)
    e2 = (
        roots.roots[0] * roots.roots[1]
        + roots.roots[0] * roots.roots[2]
        + roots.roots[1] * roots.roots[2]
    )
    e3 = roots.roots[0] * roots.roots[1] * roots.roots[2]
    print(
        f"characteristic cubic: s^3 + {cubic.a2:g} s^2 + {cubic.a1:g} s + "
        f"({cubic.a0.real:g}{cubic.a0.imag:+g}i)"
    )
    for i, s in enumerate(roots.roots, start=1):
        print(f"  s_{i} = {s.real:+.12e} {s.imag:+.12e}i   |D(s)| = {abs(cubic(s)):.3e}")
    print(
        "Vieta residuals: "
        f"|e1 + a2| = {abs(e1 + cubic.a2):.3e}, "
        f"|e2 - a1| = {abs(e2 - cubic.a1):.3e}, "
        f"|e3 + a0| = {abs(e3 + cubic.a0):.3e}"
    )
    if roots.degenerate:
        print("note: (near-)degenerate roots; closed-form evolution is refused here")
    pole = surviving_pole(roots, params.lam)
    if pole is None:
        print("surviving pole: none")
    else:
        print(f"surviving pole: {pole.real:+.3e} {pole.imag:+.6e}i")
    try:
        verdict = steady_state_verdict(params, init)
        print(
            f"verdict: {'steady' if verdict.steady else 'fully decaying'} "
            f"(regime {verdict.regime}, asymptotic concurrence "
            f"{verdict.asymptotic_concurrence:.6f})"
        )
    except ValueError as exc:
        print(f"verdict: not applicable ({exc})")
    if cfg.get("out"):
        try:
            with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
                fh.write("re_s,im_s,abs_D\n")
                for s in roots.roots:
                    fh.write(f"{_fmt(s.real)},{_fmt(s.imag)},{_fmt(abs(cubic(s)))}\n")
        except OSError as exc:
            raise ConfigError(f"cannot write {cfg['out']}: {exc}") from exc
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    params = params_from_config(cfg)
    init = init_from_config(cfg)
    t_end = float(cfg.get("t_end", 10.0))
    if t_end <= 0.0:
        raise ConfigError(f"field 't_end' must be positive, got {t_end}")
    n_steps = int(cfg.get("n_steps", 20000))
    solver = cfg.get("solver", "all")
    if solver not in ("closed", "ode", "volterra", "all"):
        raise ConfigError(
            f"solver for 'verify' must be one of closed|ode|volterra|all, got {solver!r}"
        )
    kernel_sign = -1.0 if args.corrupt_kernel_sign else 1.0

    failures = 0

    comp = compare_solvers(
        params, init, t_end=t_end, n_steps=n_steps, _kernel_sign=kernel_sign
    )
    if comp.closed_form_skipped:
        print("note: degenerate characteristic roots; closed form skipped, "
              "checking ODE vs memory-kernel only")
    pairs = [
        ("closed_form vs pseudomode_ode", ("closed", "ode"), comp.closed_vs_ode),
        ("closed_form vs volterra", ("closed", "volterra"), comp.closed_vs_volterra),
        ("pseudomode_ode vs volterra", ("ode", "volterra"), comp.ode_vs_volterra),
    ]
    for name, members, val in pairs:
        if val is None or (solver != "all" and solver not in members):
            continue
        ok = val <= THREE_SOLVER_TOL
        failures += 0 if ok else 1
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: sup-norm {val:.3e} "
              f"(threshold {THREE_SOLVER_TOL:.0e})")

    if solver in ("all", "ode"):
        leak_t_end = min(t_end, 10.0)
        resid = leak_identity_residual(params, init, t_end=leak_t_end)
        ok = resid <= LEAK_IDENTITY_TOL
        failures += 0 if ok else 1
        print(f"[{'PASS' if ok else 'FAIL'}] population-balance identity: "
              f"max residual {resid:.3e} (threshold {LEAK_IDENTITY_TOL:.0e})")

    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_CHECK_FAILED
    print("all checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry points


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atompair",
        description=(
            "Entanglement dynamics of two dipole-coupled two-level atoms in a "
            "common Lorentzian reservoir"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, solver_choices=None) -> None:
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path (overrides config)")
        p.add_argument("--svg", action="store_true", help="also write an SVG chart")
        if solver_choices:
            p.add_argument("--solver", choices=solver_choices, help="solution route")
        p.add_argument("--jobs", type=int, help="worker processes for sweeps")
        p.add_argument("--t-end", dest="t_end", type=float, help="integration horizon")
        p.add_argument("--fixed-dt", dest="fixed_dt", type=float,
                       help="fixed RK4 step (reproducible grids)")

    p_run = sub.add_parser("run", help="integrate one configuration and write a trajectory CSV")
    common(p_run, solver_choices=("closed", "ode", "volterra"))
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="concurrence over a grid of dipole strengths")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_roots = sub.add_parser("roots", help="report characteristic roots and the steady-state verdict")
    common(p_roots)
    p_roots.set_defaults(func=cmd_roots)

    p_verify = sub.add_parser("verify", help="cross-check the solution routes on one configuration")
    common(p_verify, solver_choices=("closed", "ode", "volterra", "all"))
    p_verify.add_argument(
        "--corrupt-kernel-sign", action="store_true", help=argparse.SUPPRESS
    )
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
