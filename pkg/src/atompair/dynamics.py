"""Time-domain solvers for the coupled atom-pair / reservoir-mode amplitudes.

Two independent routes produce trajectories:

* :func:`integrate_pseudomode` integrates the local-in-time three-amplitude
  system (the memory of the Lorentzian reservoir is carried by one auxiliary
  mode ``b``) with an adaptive Runge-Kutta 5(4) pair, or with fixed-step RK4
  when bit-reproducible grids matter.

* :func:`integrate_volterra` discretizes the original integro-differential
  equations directly, where the reservoir enters through the memory kernel
  ``W^2 exp(-lam (t - t1))`` convolved against the stored amplitude history.
  It exists to cross-check the other solvers, so it shares no stepping code
  with them.

Both return :class:`Trajectory` values sampled on their respective grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .closedform import (
    SURVIVING_POLE_TOL,
    char_roots,
    residue_coefficients,
)
from .model import (
    DerivedParams,
    InitialAmplitudes,
    SystemParams,
    derive,
    validate_initial,
)

__all__ = [
    "StepUnderflowError",
    "TrajectoryState",
    "Trajectory",
    "IntegratorConfig",
    "rhs",
    "integrate_pseudomode",
    "integrate_volterra",
    "sample_closed_form",
    "leak_series",
    "asymptotic_t_end",
]

SOLVER_TAGS = ("closed_form", "pseudomode_ode", "volterra")


class StepUnderflowError(Exception):
    """The adaptive integrator needed a pathologically small step."""


@dataclass(frozen=True)
class TrajectoryState:
    """One sample: time, both atomic amplitudes, and the reservoir-mode amplitude."""

    t: float
    c1: complex
    c2: complex
    b: complex

    @property
    def tracked_population(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2 + abs(self.b) ** 2


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A solved time series with its provenance.

    Samples are strictly increasing in time and start at
    ``(0, c10, c20, 0)``.  The arrays are made read-only so trajectories can
    be shared across workers safely.
    """

    params: SystemParams
    derived: DerivedParams
    init: InitialAmplitudes
    t: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    b: np.ndarray
    solver_tag: str

    def __post_init__(self) -> None:
        if self.solver_tag not in SOLVER_TAGS:
            raise ValueError(f"unknown solver_tag {self.solver_tag!r}")
        t = np.asarray(self.t, dtype=float)
        arrays = {"t": t}
        for name in ("c1", "c2", "b"):
            arrays[name] = np.asarray(getattr(self, name), dtype=complex)
            if arrays[name].shape != t.shape:
                raise ValueError(f"{name} and t have mismatched shapes")
        if t.ndim != 1 or t.size == 0:
            raise ValueError("t must be a nonempty 1-D array")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        if t[0] != 0.0:
            raise ValueError("trajectories start at t = 0")
        if (
            abs(arrays["c1"][0] - self.init.c10) > 1e-9
            or abs(arrays["c2"][0] - self.init.c20) > 1e-9
            or abs(arrays["b"][0]) > 1e-9
        ):
            raise ValueError("first sample does not match the initial state")
        for name, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.t.size

    def __getitem__(self, i: int) -> TrajectoryState:
        return TrajectoryState(
            t=float(self.t[i]),
            c1=complex(self.c1[i]),
            c2=complex(self.c2[i]),
            b=complex(self.b[i]),
        )

    @property
    def p1(self) -> np.ndarray:
        return np.abs(self.c1) ** 2

    @property
    def p2(self) -> np.ndarray:
        return np.abs(self.c2) ** 2

    @property
    def pb(self) -> np.ndarray:
        return np.abs(self.b) ** 2

    @property
    def tracked_population(self) -> np.ndarray:
        return self.p1 + self.p2 + self.pb


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for :func:`integrate_pseudomode`.

    Adaptive mode uses ``rel_tol``/``abs_tol``; setting ``dt`` switches to
    fixed-step RK4 on a reproducible grid.  ``sample_stride`` keeps every
    n-th accepted step (the final one always survives).
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    dt: float | None = None
    max_step: float = math.inf
    sample_stride: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol <= 1e-2:
            raise ValueError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if not 0.0 < self.abs_tol <= 1e-2:
            raise ValueError(f"abs_tol must lie in (0, 1e-2], got {self.abs_tol}")
        if self.dt is not None and not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.max_step > 0.0:
            raise ValueError(f"max_step must be positive, got {self.max_step}")
        if self.sample_stride < 1:
            raise ValueError(f"sample_stride must be >= 1, got {self.sample_stride}")


def rhs(params: SystemParams, state: TrajectoryState) -> tuple[complex, complex, complex]:
    """Right-hand side of the local-in-time amplitude equations.

        dc1/dt = -i W alpha1 b - i K c2
        dc2/dt = -i W alpha2 b - i K c1
        db/dt  = -lam b - i W (alpha1 c1 + alpha2 c2)
    """
    W, K, lam = params.W, params.K, params.lam
    a1, a2 = params.alpha1, params.alpha2
    c1, c2, b = state.c1, state.c2, state.b
    return (
        -1j * W * a1 * b - 1j * K * c2,
        -1j * W * a2 * b - 1j * K * c1,
        -lam * b - 1j * W * (a1 * c1 + a2 * c2),
    )


def _system_matrix(params: SystemParams) -> np.ndarray:
    W, K, lam = params.W, params.K, params.lam
    a1, a2 = params.alpha1, params.alpha2
    return np.array(
        [
            [0.0, -1j * K, -1j * W * a1],
            [-1j * K, 0.0, -1j * W * a2],
            [-1j * W * a1, -1j * W * a2, -lam],
        ],
        dtype=complex,
    )


def _stride_indices(n: int, stride: int) -> np.ndarray:
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    return idx


def integrate_pseudomode(
    params: SystemParams,
    init: InitialAmplitudes,
    t_end: float,
    cfg: IntegratorConfig | None = None,
    times: np.ndarray | None = None,
) -> Trajectory:
    """Integrate the three-amplitude system up to ``t_end``.

    With ``times`` given (adaptive mode only), the solution is emitted on
    that grid, which must start at 0 and stay within ``[0, t_end]``;
    otherwise the solver's own accepted steps are emitted, thinned by
    ``cfg.sample_stride``.

    Raises
    ------
    StepUnderflowError
        If the adaptive solver cannot proceed, which for this linear
        non-stiff system indicates pathological inputs.
    """
    if not t_end > 0.0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    cfg = cfg or IntegratorConfig()
    init = validate_initial(init, "strict")
    d = derive(params)
    y0 = np.array([init.c10, init.c20, 0.0], dtype=complex)

    if cfg.dt is not None:
        if times is not None:
            raise ValueError("a custom sample grid requires adaptive mode (dt=None)")
        t, y = _rk4_fixed(params, y0, t_end, cfg.dt)
        idx = _stride_indices(t.size, cfg.sample_stride)
        return Trajectory(
            params=params,
            derived=d,
            init=init,
            t=t[idx],
            c1=y[0, idx],
            c2=y[1, idx],
            b=y[2, idx],
            solver_tag="pseudomode_ode",
        )

    M = _system_matrix(params)

    def f(t, y):
        return M @ y

    if times is not None:
        times = np.asarray(times, dtype=float)
        if times.size == 0 or times[0] != 0.0:
            raise ValueError("sample grid must start at t = 0")
        if times[-1] > t_end:
            raise ValueError("sample grid extends past t_end")
    sol = solve_ivp(
        f,
        (0.0, t_end),
        y0,
        method="RK45",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        t_eval=times,
        dense_output=False,
    )
    if not sol.success:
        raise StepUnderflowError(f"adaptive integration failed: {sol.message}")
    if times is None:
        idx = _stride_indices(sol.t.size, cfg.sample_stride)
    else:
        idx = slice(None)
    return Trajectory(
        params=params,
        derived=d,
        init=init,
        t=sol.t[idx],
        c1=sol.y[0, idx],
        c2=sol.y[1, idx],
        b=sol.y[2, idx],
        solver_tag="pseudomode_ode",
    )


def _rk4_fixed(
    params: SystemParams, y0: np.ndarray, t_end: float, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Classic RK4 with a deterministic grid; the last step shrinks to land on t_end."""
    M = _system_matrix(params)
    n_full = int(math.floor(t_end / dt))
    t = dt * np.arange(n_full + 1)
    if t[-1] < t_end - 1e-12 * max(1.0, t_end):
        t = np.append(t, t_end)
    else:
        t[-1] = min(t[-1], t_end)
    y = np.empty((3, t.size), dtype=complex)
    y[:, 0] = y0
    cur = y0
    for k in range(t.size - 1):
        h = t[k + 1] - t[k]
        k1 = M @ cur
        k2 = M @ (cur + 0.5 * h * k1)
        k3 = M @ (cur + 0.5 * h * k2)
        k4 = M @ (cur + h * k3)
        cur = cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        y[:, k + 1] = cur
    return t, y


def integrate_volterra(
    params: SystemParams,
    init: InitialAmplitudes,
    t_end: float,
    n_steps: int,
    _kernel_sign: float = 1.0,
) -> Trajectory:
    """Integrate the memory-kernel form of the amplitude equations.

    The convolution integral I(t) = int_0^t exp(-lam (t - t1)) u(t1) dt1 with
    u = alpha1 c1 + alpha2 c2 is evaluated from the stored history by
    composite Simpson quadrature (a 3/8 panel closes odd prefixes), with the
    kernel's exponential factored out exactly so each step costs O(1).  The
    stepper is a fourth-order Adams-Bashforth-Moulton predictor-corrector;
    the first three nodes come from solving the cubic-collocation startup
    system, which is linear in the unknown amplitudes, exactly.  The
    reservoir-mode amplitude is reported as the derived quantity
    b = -i W I(t) on the same grid.

    ``_kernel_sign`` is a verification hook that flips the sign of the memory
    kernel; leave it at +1 for physical results.

    Raises
    ------
    ValueError
        If ``n_steps < 100`` (the scheme needs a few nodes per oscillation
        period to be meaningful, and coarser grids defeat its purpose as an
        oracle).
    """
    if not t_end > 0.0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if n_steps < 100:
        raise ValueError(f"n_steps must be >= 100, got {n_steps}")
    init = validate_initial(init, "strict")
    d = derive(params)
    lam, K, W = params.lam, params.K, params.W
    a1, a2 = params.alpha1, params.alpha2
    W2 = _kernel_sign * W * W
    h = t_end / n_steps
    e1 = math.exp(-lam * h)
    e2 = e1 * e1
    e3 = e2 * e1

    c1 = np.empty(n_steps + 1, dtype=complex)
    c2 = np.empty(n_steps + 1, dtype=complex)
    u = np.empty(n_steps + 1, dtype=complex)
    conv = np.empty(n_steps + 1, dtype=complex)
    c1[0], c2[0] = init.c10, init.c20
    u[0] = a1 * c1[0] + a2 * c2[0]
    conv[0] = 0.0

    # Node-0..3 startup: integrals of the cubic interpolant (exact for
    # cubics) give one-interval, Simpson, and 3/8 weights; the resulting
    # collocation equations are linear in the six unknown amplitudes, so
    # probe the affine map once per basis vector and solve directly.
    g_row = [np.exp(lam * h * (np.arange(4.0) - k)) for k in range(4)]
    w1 = h * np.array([9.0, 19.0, -5.0, 1.0]) / 24.0
    w2 = h * np.array([1.0, 4.0, 1.0, 0.0]) / 3.0
    w3 = 3.0 * h * np.array([1.0, 3.0, 3.0, 1.0]) / 8.0
    weights = (w1, w2, w3)

    def startup_map(x: np.ndarray) -> np.ndarray:
        cc1 = np.array([c1[0], x[0], x[2], x[4]])
        cc2 = np.array([c2[0], x[1], x[3], x[5]])
        uu = a1 * cc1 + a2 * cc2
        integ = np.array(
            [0.0] + [np.dot(w, g_row[k + 1] * uu) for k, w in enumerate(weights)]
        )
        f1 = -a1 * W2 * integ - 1j * K * cc2
        f2 = -a2 * W2 * integ - 1j * K * cc1
        out = np.empty(6, dtype=complex)
        for k, w in enumerate(weights):
            out[2 * k] = c1[0] + np.dot(w, f1)
            out[2 * k + 1] = c2[0] + np.dot(w, f2)
        return out

    d0 = startup_map(np.zeros(6, dtype=complex))
    T = np.empty((6, 6), dtype=complex)
    for j in range(6):
        e = np.zeros(6, dtype=complex)
        e[j] = 1.0
        T[:, j] = startup_map(e) - d0
    x = np.linalg.solve(np.eye(6) - T, d0)
    c1[1:4] = x[0::2]
    c2[1:4] = x[1::2]
    u[1:4] = a1 * c1[1:4] + a2 * c2[1:4]
    for k, w in enumerate(weights):
        conv[k + 1] = np.dot(w, g_row[k + 1] * u[:4])

    def f_at(k: int) -> tuple[complex, complex]:
        m = W2 * conv[k]
        return (-a1 * m - 1j * K * c2[k], -a2 * m - 1j * K * c1[k])

    fk3, fk2, fk1, fk = (f_at(k) for k in range(4))

    # Simpson prefix sums at the two most recent even nodes; the exponential
    # kernel telescopes exactly, so advancing them is O(1) and reproduces the
    # dense composite rule to rounding.
    E_old, E_new = complex(conv[0]), complex(conv[2])

    h38 = 3.0 * h / 8.0
    h13 = h / 3.0
    ab = (55.0 * h / 24.0, -59.0 * h / 24.0, 37.0 * h / 24.0, -9.0 * h / 24.0)
    am = (9.0 * h / 24.0, 19.0 * h / 24.0, -5.0 * h / 24.0, h / 24.0)

    for k in range(3, n_steps):
        m = k + 1
        p1 = c1[k] + ab[0] * fk[0] + ab[1] * fk1[0] + ab[2] * fk2[0] + ab[3] * fk3[0]
        p2 = c2[k] + ab[0] * fk[1] + ab[1] * fk1[1] + ab[2] * fk2[1] + ab[3] * fk3[1]
        up = a1 * p1 + a2 * p2
        if m % 2 == 0:
            base = e2 * E_new + h13 * (e2 * u[m - 2] + 4.0 * e1 * u[m - 1])
            w_last = h13
        else:
            base = e3 * E_old + h38 * (e3 * u[m - 3] + 3.0 * e2 * u[m - 2] + 3.0 * e1 * u[m - 1])
            w_last = h38
        mem_p = W2 * (base + w_last * up)
        fp1 = -a1 * mem_p - 1j * K * p2
        fp2 = -a2 * mem_p - 1j * K * p1
        c1[m] = c1[k] + am[0] * fp1 + am[1] * fk[0] + am[2] * fk1[0] + am[3] * fk2[0]
        c2[m] = c2[k] + am[0] * fp2 + am[1] * fk[1] + am[2] * fk1[1] + am[3] * fk2[1]
        u[m] = a1 * c1[m] + a2 * c2[m]
        conv[m] = base + w_last * u[m]
        if m % 2 == 0:
            E_old, E_new = E_new, complex(conv[m])
        fk3, fk2, fk1 = fk2, fk1, fk
        fk = f_at(m)

    t = np.linspace(0.0, t_end, n_steps + 1)
    b = -1j * W * _kernel_sign * conv
    return Trajectory(
        params=params,
        derived=d,
        init=init,
        t=t,
        c1=c1,
        c2=c2,
        b=b,
        solver_tag="volterra",
    )


def sample_closed_form(
    params: SystemParams, init: InitialAmplitudes, times: np.ndarray
) -> Trajectory:
    """Evaluate the closed-form solution on ``times`` and wrap it as a trajectory.

    Raises :class:`atompair.closedform.DegenerateRootsError` for parameter
    sets with (near-)repeated characteristic roots.
    """
    times = np.asarray(times, dtype=float)
    sol = residue_coefficients(params, init)
    c1, c2, b = sol.evolve(times)
    return Trajectory(
        params=params,
        derived=sol.derived,
        init=sol.init,
        t=times,
        c1=c1,
        c2=c2,
        b=b,
        solver_tag="closed_form",
    )


def leak_series(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Population lost to the reservoir continuum, clamped at zero from below.

    The continuum amplitudes are not tracked individually; their total weight
    is whatever is missing from the tracked populations.
    """
    p_leak = 1.0 - traj.tracked_population
    return traj.t, np.maximum(p_leak, 0.0)


def asymptotic_t_end(params: SystemParams) -> float:
    """Horizon for steady-state studies, tied to the actual spectral gap.

    Returns max(50/lam, 10/|Re s_slow|) where s_slow is the slowest decaying
    characteristic root, ignoring any root sitting on the imaginary axis
    (its residue never decays).
    """
    lam = params.lam
    roots = char_roots(params).roots
    decaying = [s.real for s in roots if s.real < -SURVIVING_POLE_TOL * lam]
    if not decaying:
        return 50.0 / lam
    slow = max(decaying)
    return max(50.0 / lam, 10.0 / abs(slow))
