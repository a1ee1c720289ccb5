"""Semi-implicit Euler-Maruyama integration of the regularized dynamics.

One step solves

    w - dt*lap(w) + dt*beta_lam(w) = u + dt*(2c*u + g) + B_lam(u) dW,

keeping the maximal monotone pieces (Laplacian and beta_lam) implicit and
the concave part -2c*u, the forcing, and the Ito noise explicit.  The
implicit operator is strictly monotone for every dt and lam, so the step
is unconditionally solvable; the convex/concave split also makes the
deterministic scheme dissipate the regularized free energy for any dt.

The nonlinear solve is a damped Newton iteration whose SPD Jacobian
systems go to conjugate gradients preconditioned by the exact heat
operator (I - dt*lap)^(-1), applied spectrally.

Fields may carry leading batch axes (replicates, coupled lanes); the
whole pipeline broadcasts over them and per-member noise increments are
drawn from counter streams keyed (seed, replicate, step, mode).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from . import grid as gr
from . import noise as nz
from . import potential as pot

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    t_end: float
    outer_newton_tol: float = 1e-10
    outer_newton_max: int = 50
    linear_tol: float = 1e-11
    linear_max: int = 500

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0.0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.t_end > 0.0 and self.dt > self.t_end * (1.0 + 1e-12):
            raise ValueError(f"dt={self.dt} exceeds t_end={self.t_end}")
        if not (self.outer_newton_tol > 0.0 and self.linear_tol > 0.0):
            raise ValueError("solver tolerances must be positive")

    @property
    def n_steps(self) -> int:
        if self.t_end == 0.0:
            return 0
        return int(math.ceil(self.t_end / self.dt - 1e-12))


def _expand(a, ndim: int):
    # append singleton field axes so per-batch scalars broadcast over the mesh
    return np.asarray(a)[(...,) + (None,) * ndim]


def _batch_max_abs(u, dim: int):
    return np.max(np.abs(u), axis=tuple(range(u.ndim - dim, u.ndim)))


def _batch_sum(u, dim: int):
    return np.sum(u, axis=tuple(range(u.ndim - dim, u.ndim)))


def _pcg(g: gr.Grid, dt: float, diag, b, cfg: StepperConfig):
    """CG on (I - dt*lap + dt*diag) x = b with an exact heat preconditioner."""
    dim = g.dim

    def matvec(p):
        out = p - dt * gr.laplacian_neumann(g, p)
        if diag is not None:
            out = out + dt * diag * p
        return out

    x = np.zeros_like(b)
    r = b.copy()
    tol = np.maximum(cfg.linear_tol * np.sqrt(_batch_sum(b * b, dim)), _TINY)
    z = gr.helmholtz_solve(g, r, dt)
    p = z.copy()
    rz = _batch_sum(r * z, dim)
    for _ in range(cfg.linear_max):
        active = np.sqrt(_batch_sum(r * r, dim)) > tol
        if not np.any(active):
            return x
        Ap = matvec(p)
        pAp = _batch_sum(p * Ap, dim)
        alpha = _expand(np.where(active, rz / np.maximum(pAp, _TINY), 0.0), dim)
        x = x + alpha * p
        r = r - alpha * Ap
        z = gr.helmholtz_solve(g, r, dt)
        rz_new = _batch_sum(r * z, dim)
        beta = _expand(np.where(active, rz_new / np.maximum(rz, _TINY), 0.0), dim)
        p = z + beta * p
        rz = rz_new
    raise RuntimeError(f"inner linear solve stagnated after {cfg.linear_max} iterations")


def _monotone_solve(g: gr.Grid, lam, rhs, dt: float, cfg: StepperConfig, w0=None):
    """Solve w - dt*lap(w) + dt*beta_lam(w) = rhs; lam=None drops the beta term.

    lam may be a scalar or an array broadcastable against the batch axes.
    Returns (w, beta_lam(w)) so callers can reuse the final evaluation.
    """
    dim = g.dim
    w = rhs.copy() if w0 is None else np.array(w0, dtype=float, copy=True)

    def residual(w_):
        if lam is None:
            bl, blp = None, None
        else:
            bl, blp = pot.yosida_pair(lam, w_)
        F = w_ - dt * gr.laplacian_neumann(g, w_)
        if bl is not None:
            F = F + dt * bl
        return F - rhs, bl, blp

    F, bl, blp = residual(w)
    res = _batch_max_abs(F, dim)
    for _ in range(cfg.outer_newton_max):
        if np.all(res <= cfg.outer_newton_tol):
            if bl is None:
                bl = np.zeros_like(w)
            return w, bl
        delta = _pcg(g, dt, blp if lam is not None else None, F, cfg)
        damp = np.ones_like(res)
        for _bt in range(12):
            w_try = w - _expand(damp, dim) * delta
            F_try, bl_try, blp_try = residual(w_try)
            res_try = _batch_max_abs(F_try, dim)
            bad = (res_try > res) & (res_try > cfg.outer_newton_tol)
            if not np.any(bad):
                break
            damp = np.where(bad, 0.5 * damp, damp)
        w, F, bl, blp, res = w_try, F_try, bl_try, blp_try, res_try
    raise RuntimeError(
        f"implicit step failed: residual {float(np.max(res)):.3e} after {cfg.outer_newton_max} Newton iterations"
    )


def implicit_solve(g: gr.Grid, params, level: pot.YosidaLevel | None, rhs, dt: float, cfg: StepperConfig, w0=None):
    """Public implicit-stage solve; see _monotone_solve for the equation."""
    rhs = np.asarray(rhs, dtype=float)
    if params is not None and params.kind == pot.POLYNOMIAL:
        raise ValueError("the time stepper integrates the logarithmic (or potential-free) dynamics")
    lam = None if (params is None or level is None) else level.lam
    w, _ = _monotone_solve(g, lam, rhs, dt, cfg, w0=w0)
    return w


@dataclass
class TrajectoryState:
    """One stochastic path (or a batch of them) plus running diagnostics."""

    t: float
    step_index: int
    u: np.ndarray
    replicates: np.ndarray  # replicate key per batch row (scalar array for a single path)
    beta_of_u: np.ndarray  # cached beta_lam(u), reused by the left-endpoint quadratures
    stoch_integral: np.ndarray  # running sum of the diffusion fields
    sup_h_sq: np.ndarray
    sup_grad_sq: np.ndarray
    int_grad_sq: np.ndarray
    int_f1_sq: np.ndarray
    int_beta_sq: np.ndarray
    int_lap_sq: np.ndarray
    int_abs_gauge_prime: np.ndarray
    excursion_count: np.ndarray
    sample_count: int
    first_excursion_time: np.ndarray
    hasher: "hashlib._Hash"


@dataclass
class PathStats:
    """Pathwise functionals: running sups and left-endpoint time integrals."""

    sup_h_sq: np.ndarray
    sup_grad_sq: np.ndarray
    int_grad_sq: np.ndarray
    int_f1_sq: np.ndarray
    int_beta_sq: np.ndarray
    int_lap_sq: np.ndarray
    int_gauge: np.ndarray | None
    int_abs_gauge_prime: np.ndarray | None
    gauge_series: np.ndarray | None  # spatial integral of G_n at every output time
    excursion_fraction: np.ndarray
    first_excursion_time: np.ndarray
    increments_digest: str
    path: "TrajectoryRecord | None" = None


@dataclass
class TrajectoryRecord:
    """Full path storage for after-the-fact weak-form checks."""

    grid: gr.Grid
    params: pot.PotentialParams | None
    level: pot.YosidaLevel | None
    dt: float
    times: np.ndarray
    states: np.ndarray  # (n_steps+1, *field shape)
    stoch_integral: np.ndarray
    g_force: np.ndarray | None


def _gauge_slice(g: gr.Grid, gauge: pot.GaugeOrder, u):
    """(masked integral of G_n, masked integral of |G_n'|, excursion count).

    G_n is evaluated only where |u| < 1; samples outside count as excursions.
    """
    inside = np.abs(u) < 1.0
    safe = np.where(inside, u, 0.0)
    Gn, Gnp = pot.gauge_eval(gauge, safe)
    axes = tuple(range(u.ndim - g.dim, u.ndim))
    ig = np.sum(np.where(inside, Gn, 0.0), axis=axes) * g.cell_volume
    igp = np.sum(np.where(inside, np.abs(Gnp), 0.0), axis=axes) * g.cell_volume
    count = np.sum(~inside, axis=axes)
    return ig, igp, count


def init_state(g: gr.Grid, params, level, u0, replicates=None) -> TrajectoryState:
    u0 = np.array(np.asarray(u0, dtype=float), copy=True)
    batch = u0.shape[: u0.ndim - g.dim]
    if replicates is None:
        replicates = np.arange(batch[-1]) if batch else np.asarray(0)
    replicates = np.asarray(replicates)
    if params is not None and level is not None:
        beta0, _, _ = pot.yosida_eval(level, u0)
    else:
        beta0 = np.zeros_like(u0)
    hsq, gsq, _ = gr.norms(g, u0)
    zeros = np.zeros(batch)
    return TrajectoryState(
        t=0.0,
        step_index=0,
        u=u0,
        replicates=replicates,
        beta_of_u=beta0,
        stoch_integral=np.zeros_like(u0),
        sup_h_sq=np.asarray(hsq, dtype=float).copy(),
        sup_grad_sq=np.asarray(gsq, dtype=float).copy(),
        int_grad_sq=zeros.copy(),
        int_f1_sq=zeros.copy(),
        int_beta_sq=zeros.copy(),
        int_lap_sq=zeros.copy(),
        int_abs_gauge_prime=zeros.copy(),
        excursion_count=np.sum(np.abs(u0) >= 1.0, axis=tuple(range(u0.ndim - g.dim, u0.ndim))).astype(float),
        sample_count=int(np.prod(g.shape)),
        first_excursion_time=np.where(np.max(np.abs(u0), axis=tuple(range(u0.ndim - g.dim, u0.ndim))) >= 1.0, 0.0, np.inf),
        hasher=hashlib.sha256(),
    )


def step(
    state: TrajectoryState,
    g: gr.Grid,
    params: pot.PotentialParams | None,
    level: pot.YosidaLevel | None,
    spec: nz.NoiseSpec,
    g_force,
    cfg: StepperConfig,
    seed: int,
    increments=None,
    gauge: pot.GaugeOrder | None = None,
) -> TrajectoryState:
    """Advance one time step, accumulating the left-endpoint quadratures at u_m."""
    u = state.u
    dt = cfg.dt
    dim = g.dim
    batch = u.shape[: u.ndim - dim]

    if increments is not None:
        dw = np.asarray(increments, dtype=float)
    elif spec.modes > 0:
        reps = np.atleast_1d(state.replicates)
        dw = np.empty(reps.shape + (spec.modes,))
        flat = dw.reshape(-1, spec.modes)
        for i, rep in enumerate(reps.reshape(-1)):
            flat[i] = nz.counter_normals(seed, nz.CTR_INCREMENTS, state.step_index, int(rep), spec.modes)
        dw *= np.sqrt(dt)
        if state.replicates.ndim == 0:
            dw = dw[0]
        if dw.shape[:-1] != batch:
            dw = np.broadcast_to(dw, batch + (spec.modes,))
    else:
        dw = np.zeros(batch + (0,))

    if spec.modes > 0:
        noise_field = nz.diffusion_apply(spec, u, dw, level, dim)
    else:
        noise_field = np.zeros_like(u)

    # left-endpoint quadrature contributions at u_m
    int_grad_sq = state.int_grad_sq + dt * gr.grad_norm_sq(g, u)
    int_beta_sq = state.int_beta_sq + dt * gr.h_norm_sq(g, state.beta_of_u)
    if params is not None:
        f1 = state.beta_of_u - 2.0 * params.c * u
        int_f1_sq = state.int_f1_sq + dt * gr.h_norm_sq(g, f1)
    else:
        int_f1_sq = state.int_f1_sq
    int_lap_sq = state.int_lap_sq + dt * gr.h_norm_sq(g, gr.laplacian_neumann(g, u))
    if gauge is not None:
        _, igp, _ = _gauge_slice(g, gauge, u)
        int_abs_gauge_prime = state.int_abs_gauge_prime + dt * igp
    else:
        int_abs_gauge_prime = state.int_abs_gauge_prime

    rhs = u + dt * (2.0 * params.c * u if params is not None else 0.0) + noise_field
    if g_force is not None:
        rhs = rhs + dt * g_force
    lam = None if (params is None or level is None) else level.lam
    w, beta_w = _monotone_solve(g, lam, rhs, dt, cfg, w0=u)

    hsq, gsq, supn = gr.norms(g, w)
    t_new = state.t + dt
    excursions_now = np.sum(np.abs(w) >= 1.0, axis=tuple(range(w.ndim - dim, w.ndim)))
    first_exc = np.where(
        np.isinf(state.first_excursion_time) & (supn >= 1.0), t_new, state.first_excursion_time
    )
    hasher = state.hasher
    hasher.update(np.ascontiguousarray(dw).tobytes())

    return replace(
        state,
        t=t_new,
        step_index=state.step_index + 1,
        u=w,
        beta_of_u=beta_w,
        stoch_integral=state.stoch_integral + noise_field,
        sup_h_sq=np.maximum(state.sup_h_sq, hsq),
        sup_grad_sq=np.maximum(state.sup_grad_sq, gsq),
        int_grad_sq=int_grad_sq,
        int_f1_sq=int_f1_sq,
        int_beta_sq=int_beta_sq,
        int_lap_sq=int_lap_sq,
        int_abs_gauge_prime=int_abs_gauge_prime,
        excursion_count=state.excursion_count + excursions_now,
        first_excursion_time=first_exc,
        hasher=hasher,
    )


def simulate(
    u0,
    g_force,
    level: pot.YosidaLevel | None,
    spec: nz.NoiseSpec,
    cfg: StepperConfig,
    g: gr.Grid,
    params: pot.PotentialParams | None,
    seed: int = 0,
    *,
    replicates=None,
    gauge: pot.GaugeOrder | None = None,
    keep_path: bool = False,
    increments=None,
    snapshot_stride: int = 0,
    snapshot_dir: str | None = None,
) -> tuple[TrajectoryState, PathStats]:
    """Run ceil(t_end/dt) steps from u0 and collect PathStats.

    u0 may be a single field or a (replicates, ...) batch; increments, when
    given, override the counter streams and must have shape
    (n_steps, ...batch..., modes).  A positive snapshot_stride writes the
    (single-path) field to snapshot_dir every that-many steps.
    """
    u0 = np.asarray(u0, dtype=float)
    if not np.all(np.isfinite(u0)):
        raise ValueError("u0 must be finite")
    if params is not None and params.kind == pot.LOGARITHMIC:
        if level is None:
            raise ValueError("logarithmic dynamics require a Yosida level")
        if np.any(np.abs(u0) >= 1.0):
            raise ValueError("u0 must satisfy ||u0||_inf < 1 so the initial energy is finite")
    state = init_state(g, params, level, u0, replicates=replicates)
    n_steps = cfg.n_steps

    if snapshot_stride > 0:
        if u0.shape != g.shape:
            raise ValueError("snapshots are emitted for single-path runs only")
        if snapshot_dir is None:
            raise ValueError("snapshot_stride > 0 needs a snapshot_dir")

    def emit(st_):
        if snapshot_stride > 0 and st_.step_index % snapshot_stride == 0:
            gr.save_field(f"{snapshot_dir}/step_{st_.step_index:06d}.acf", g, st_.u)

    gauge_series = None
    if gauge is not None:
        ig0, _, _ = _gauge_slice(g, gauge, state.u)
        gauge_series = [ig0]
    states = [state.u.copy()] if keep_path else None
    emit(state)

    for m in range(n_steps):
        inc_m = None if increments is None else increments[m]
        state = step(state, g, params, level, spec, g_force, cfg, seed, increments=inc_m, gauge=gauge)
        if gauge is not None:
            ig, _, _ = _gauge_slice(g, gauge, state.u)
            gauge_series.append(ig)
        if keep_path:
            states.append(state.u.copy())
        emit(state)

    total_samples = (n_steps + 1) * state.sample_count
    stats = PathStats(
        sup_h_sq=state.sup_h_sq,
        sup_grad_sq=state.sup_grad_sq,
        int_grad_sq=state.int_grad_sq,
        int_f1_sq=state.int_f1_sq,
        int_beta_sq=state.int_beta_sq,
        int_lap_sq=state.int_lap_sq,
        int_gauge=None,
        int_abs_gauge_prime=state.int_abs_gauge_prime if gauge is not None else None,
        gauge_series=np.asarray(gauge_series) if gauge is not None else None,
        excursion_fraction=state.excursion_count / total_samples,
        first_excursion_time=state.first_excursion_time,
        increments_digest=state.hasher.hexdigest(),
    )
    if gauge is not None:
        # left-endpoint time integral of the spatial G_n integrals
        stats.int_gauge = cfg.dt * np.sum(stats.gauge_series[:-1], axis=0) if n_steps > 0 else np.zeros_like(stats.gauge_series[0])
    if keep_path:
        stats.path = TrajectoryRecord(
            grid=g,
            params=params,
            level=level,
            dt=cfg.dt,
            times=cfg.dt * np.arange(n_steps + 1),
            states=np.asarray(states),
            stoch_integral=state.stoch_integral,
            g_force=None if g_force is None else np.asarray(g_force, dtype=float),
        )
    return state, stats


def grad_inner(g: gr.Grid, u, v):
    """Face-gradient inner product <grad u, grad v>_h."""
    total = 0.0
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    for ax in range(g.dim):
        a = u.ndim - g.dim + ax
        du = np.diff(u, axis=a) / g.spacing[ax]
        dv = np.diff(v, axis=a if v.ndim == u.ndim else v.ndim - g.dim + ax) / g.spacing[ax]
        total = total + np.sum(du * dv, axis=tuple(range(u.ndim - g.dim, u.ndim))) * g.cell_volume
    return total


def weak_residual_check(record: TrajectoryRecord, v) -> float:
    """Absolute defect of the tested weak form along a recorded path.

    All time integrals use the left-endpoint rule, so the defect of the
    scheme-consistent identity shrinks like O(dt) for a fixed test field.
    """
    g = record.grid
    v = np.asarray(v, dtype=float)
    us = record.states
    n = us.shape[0] - 1
    u0, uT = us[0], us[-1]
    dt = record.dt

    acc = gr.h_inner(g, uT, v) - gr.h_inner(g, u0, v)
    for m in range(n):
        um = us[m]
        acc += dt * grad_inner(g, um, v)
        if record.params is not None:
            _, f1, _ = (
                pot.regularized_potential_eval(record.params, record.level, um)
                if record.level is not None
                else pot.potential_eval(record.params, um)
            )
            acc += dt * gr.h_inner(g, f1, v)
        if record.g_force is not None:
            acc -= dt * gr.h_inner(g, record.g_force, v)
    acc -= gr.h_inner(g, record.stoch_integral, v)
    return float(np.abs(acc))


def gateaux_check(
    g: gr.Grid,
    params: pot.PotentialParams,
    level: pot.YosidaLevel,
    u,
    h_dir,
    k_dir,
    eps: float | None = None,
) -> tuple[float, float]:
    """Central-difference errors of the first and second derivatives of
    Phi_lam(u) = integral of F_lam(u).

    Both errors shrink like O(eps^2); the default eps is 1e-5*(1+||u||_inf).
    """
    u = np.asarray(u, dtype=float)
    h_dir = np.asarray(h_dir, dtype=float)
    k_dir = np.asarray(k_dir, dtype=float)
    if eps is None:
        eps = 1e-5 * (1.0 + float(np.max(np.abs(u))))

    def phi(w):
        Fl, _, _ = pot.regularized_potential_eval(params, level, w)
        return float(np.sum(Fl)) * g.cell_volume

    def dphi(w, d):
        _, Fl1, _ = pot.regularized_potential_eval(params, level, w)
        return float(gr.h_inner(g, Fl1, d))

    d1_fd = (phi(u + eps * h_dir) - phi(u - eps * h_dir)) / (2.0 * eps)
    d1_err = abs(d1_fd - dphi(u, h_dir))

    d2_fd = (dphi(u + eps * k_dir, h_dir) - dphi(u - eps * k_dir, h_dir)) / (2.0 * eps)
    _, _, Fl2 = pot.regularized_potential_eval(params, level, u)
    d2_exact = float(np.sum(Fl2 * h_dir * k_dir)) * g.cell_volume
    d2_err = abs(d2_fd - d2_exact)
    return d1_err, d2_err
