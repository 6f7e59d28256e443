"""Cross-solver agreement and conservation-law checks.

The three solution routes (residue closed form, adaptive ODE, direct memory
kernel) share no numerics, so their mutual agreement is the strongest
correctness evidence the package can produce.  This module packages those
comparisons for both the test suite and the ``verify`` CLI command.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closedform import DegenerateRootsError
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    integrate_pseudomode,
    integrate_volterra,
    sample_closed_form,
)
from .model import InitialAmplitudes, SystemParams

__all__ = [
    "THREE_SOLVER_TOL",
    "LEAK_IDENTITY_TOL",
    "SolverComparison",
    "compare_solvers",
    "leak_identity_residual",
]

THREE_SOLVER_TOL = 1e-5
LEAK_IDENTITY_TOL = 1e-6


def _sup_norm(a: Trajectory, b: Trajectory, idx_a=slice(None), idx_b=slice(None)) -> float:
    return max(
        float(np.abs(a.c1[idx_a] - b.c1[idx_b]).max()),
        float(np.abs(a.c2[idx_a] - b.c2[idx_b]).max()),
        float(np.abs(a.b[idx_a] - b.b[idx_b]).max()),
    )


@dataclass(frozen=True)
class SolverComparison:
    """Pairwise sup-norm discrepancies on a shared grid.

    ``closed_vs_ode`` and ``closed_vs_volterra`` are None when the parameter
    set has (near-)degenerate characteristic roots and the closed form
    refused; ``ode_vs_volterra`` is always available.
    """

    closed_vs_ode: float | None
    closed_vs_volterra: float | None
    ode_vs_volterra: float
    closed_form_skipped: bool

    def worst(self) -> float:
        vals = [
            v
            for v in (self.closed_vs_ode, self.closed_vs_volterra, self.ode_vs_volterra)
            if v is not None
        ]
        return max(vals)

    def passes(self, tol: float = THREE_SOLVER_TOL) -> bool:
        return self.worst() <= tol


def compare_solvers(
    params: SystemParams,
    init: InitialAmplitudes,
    t_end: float = 10.0,
    n_steps: int = 20000,
    n_compare: int = 2001,
    cfg: IntegratorConfig | None = None,
    _kernel_sign: float = 1.0,
) -> SolverComparison:
    """Run all three solvers and report pairwise sup-norm discrepancies.

    The comparison grid has ``n_compare`` uniform points; ``n_compare - 1``
    must divide ``n_steps`` so the memory-kernel solver's own grid contains
    it exactly.
    """
    if (n_compare - 1) <= 0 or n_steps % (n_compare - 1) != 0:
        raise ValueError("n_compare - 1 must divide n_steps")
    stride = n_steps // (n_compare - 1)
    grid = np.linspace(0.0, t_end, n_compare)

    ode = integrate_pseudomode(params, init, t_end, cfg=cfg, times=grid)
    vol = integrate_volterra(params, init, t_end, n_steps, _kernel_sign=_kernel_sign)
    vol_idx = slice(None, None, stride)

    closed_skipped = False
    closed = None
    try:
        closed = sample_closed_form(params, init, grid)
    except DegenerateRootsError:
        closed_skipped = True

    return SolverComparison(
        closed_vs_ode=None if closed_skipped else _sup_norm(closed, ode),
        closed_vs_volterra=(
            None if closed_skipped else _sup_norm(closed, vol, slice(None), vol_idx)
        ),
        ode_vs_volterra=_sup_norm(ode, vol, slice(None), vol_idx),
        closed_form_skipped=closed_skipped,
    )


def leak_identity_residual(
    params: SystemParams,
    init: InitialAmplitudes,
    t_end: float = 10.0,
    dt: float = 5e-5,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-13,
) -> float:
    """Worst-case residual of the population balance along dense ODE output.

    The tracked population P = |c1|^2 + |c2|^2 + |b|^2 obeys
    dP/dt = -2 lam |b|^2 exactly.  The check samples the solution at spacing
    dt/2, forms the difference quotient of P between consecutive grid nodes,
    and compares it with -2 lam |b|^2 evaluated at the midpoints; the
    returned value is the largest absolute mismatch.  The default spacing and
    tolerances keep both the O(dt^2) differencing bias and the integrator's
    interpolation noise comfortably below 1e-6 at the frequency scales of
    interest.
    """
    n_half = 2 * int(round(t_end / dt))
    grid = np.linspace(0.0, t_end, n_half + 1)
    cfg = IntegratorConfig(rel_tol=rel_tol, abs_tol=abs_tol)
    traj = integrate_pseudomode(params, init, t_end, cfg=cfg, times=grid)
    pop = traj.tracked_population
    h = grid[2] - grid[0]
    quotient = (pop[2::2] - pop[:-2:2]) / h
    rate_mid = -2.0 * params.lam * traj.pb[1::2]
    return float(np.abs(quotient - rate_mid).max())
