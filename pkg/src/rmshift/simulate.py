"""Replicated Monte Carlo runs of the shift estimator and their summaries.

Every replication draws from its own counter-based Philox stream keyed by
``(seed, rep_id)``, so results do not depend on execution order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .config import ExperimentConfig
from .densities import density_value, sample_noise, sample_x
from .errors import AdmissibilityError, DomainError, NumericError, ReplicationError
from .estimator import KNOWN_DENSITY, EstimatorState, estimator_step, project, t_hat
from .kde import RecursiveKde, grid_add, grid_interp, grid_sup_error
from .kernels import get_kernel
from .shapes import asymptotic_variance

MSE_CAVEAT = ("unconditional mean squared error over all replications; the "
              "theoretical rate is stated on the event that the iterates and the "
              "density estimate stay close to their targets. See floor_hits_total.")


def stream_key(seed: int, rep_id: int) -> int:
    """128-bit Philox key for one replication."""
    return (int(rep_id) << 64) | int(seed)


def generate_stream(cfg: ExperimentConfig, rep_id: int):
    """Observation times and responses Y = f(X - theta) + eps for one replication."""
    rng = np.random.Generator(np.random.Philox(key=stream_key(cfg.seed, rep_id)))
    u = rng.random((cfg.n_steps, 3))
    xs = np.asarray(sample_x(cfg.density, u[:, 0]), dtype=float)
    eps = np.asarray(sample_noise(cfg.noise, u[:, 1], u[:, 2]), dtype=float)
    ys = np.asarray(cfg.shape(xs - cfg.theta_true), dtype=float) + eps
    return xs, ys


def trajectory_steps(n_steps: int, points: int = 400) -> np.ndarray:
    return np.unique(np.round(np.geomspace(1, n_steps, points)).astype(np.int64))


@numba.njit(cache=True)
def _run_stream(xs, ys, theta0, sign, gain_scale, warmup, known, dcode, amplitude,
                kcode, alpha, grid, periodic, floor_eps, capture, sup_at):
    n_total = xs.shape[0]
    sums = np.zeros(grid.shape[0])
    theta_out = np.empty(capture.shape[0])
    sup_out = np.empty(sup_at.shape[0])
    theta = theta0
    events = 0
    last_event = 0
    floor_hits = 0
    ci = 0
    si = 0
    use_kde = (not known) or sup_at.shape[0] > 0
    for n in range(n_total):
        x = xs[n]
        if n >= warmup:
            if known:
                g_val = density_value(dcode, amplitude, x)
            else:
                g_val = grid_interp(sums, grid, x) / n
                if g_val < floor_eps:
                    g_val = floor_eps
                    floor_hits += 1
            T = t_hat(x, ys[n], theta, g_val)
            pre = theta + sign * (gain_scale / (n + 1)) * T
            if abs(pre) > 0.25:
                events += 1
                last_event = n + 1
            theta = project(pre)
        if use_kde:
            grid_add(sums, grid, x, float(n + 1) ** -alpha, kcode, periodic)
        while ci < capture.shape[0] and capture[ci] == n + 1:
            theta_out[ci] = theta
            ci += 1
        while si < sup_at.shape[0] and sup_at[si] == n + 1:
            sup_out[si] = grid_sup_error(sums, float(n + 1), grid, dcode, amplitude)
            si += 1
    return theta_out, sup_out, events, last_event, floor_hits


@dataclass
class ReplicationResult:
    rep_id: int
    theta_hat_at: dict[int, float]
    projection_events: int
    last_projection_step: int
    floor_hits: int
    kde_sup_error_at: dict[int, float]
    final_standardized_error: float
    trajectory: list[tuple[int, float]] = field(default_factory=list)


def _capture_plan(cfg: ExperimentConfig, rep_id: int):
    record = np.asarray(cfg.record_points, dtype=np.int64)
    traj = (trajectory_steps(cfg.n_steps) if rep_id < cfg.trajectory_reps
            else np.empty(0, dtype=np.int64))
    capture = np.union1d(np.union1d(record, traj), [cfg.n_steps])
    return record, traj, capture


def _assemble(cfg, rep_id, record, traj, capture, thetas, sups, sup_steps,
              events, last_event, floor_hits):
    by_step = dict(zip(capture.tolist(), np.asarray(thetas).tolist()))
    theta_at = {int(s): by_step[int(s)] for s in record}
    final = by_step[cfg.n_steps]
    return ReplicationResult(
        rep_id=rep_id,
        theta_hat_at=theta_at,
        projection_events=int(events),
        last_projection_step=int(last_event),
        floor_hits=int(floor_hits),
        kde_sup_error_at=dict(zip(sup_steps.tolist(), np.asarray(sups).tolist())),
        final_standardized_error=math.sqrt(cfg.n_steps) * (final - cfg.theta_true),
        trajectory=[(int(s), by_step[int(s)]) for s in traj],
    )


def _run_fused(cfg, rep_id):
    xs, ys = generate_stream(cfg, rep_id)
    record, traj, capture = _capture_plan(cfg, rep_id)
    known = cfg.estimator.variant == KNOWN_DENSITY
    sup_steps = np.empty(0, dtype=np.int64) if known else record
    thetas, sups, events, last_event, hits = _run_stream(
        xs, ys, float(cfg.estimator.theta0), float(cfg.sign_f1),
        float(cfg.estimator.gain_scale), int(cfg.estimator.warmup), known,
        cfg.density.code, float(cfg.density.amplitude),
        get_kernel(cfg.kde.kernel).code, float(cfg.kde.alpha),
        np.linspace(-0.5, 0.5, int(cfg.kde.grid_size)), cfg.kde.boundary == "periodic",
        float(cfg.kde.floor_eps), capture, sup_steps)
    return _assemble(cfg, rep_id, record, traj, capture, thetas, sups, sup_steps,
                     events, last_event, hits)


def _run_reference(cfg, rep_id):
    """Step-by-step run through the public objects (any KDE mode)."""
    xs, ys = generate_stream(cfg, rep_id)
    record, traj, capture = _capture_plan(cfg, rep_id)
    known = cfg.estimator.variant == KNOWN_DENSITY
    kde = RecursiveKde(get_kernel(cfg.kde.kernel), cfg.kde.alpha, int(cfg.kde.grid_size),
                       cfg.kde.floor_eps, cfg.kde.mode, cfg.kde.boundary)
    state = EstimatorState(theta_hat=float(cfg.estimator.theta0), step=0,
                           sign_f1=cfg.sign_f1, variant=cfg.estimator.variant,
                           gain_scale=float(cfg.estimator.gain_scale))
    capture_set = set(capture.tolist())
    sup_steps = np.empty(0, dtype=np.int64) if known else record
    sup_set = set(sup_steps.tolist())
    thetas, sups = [], []
    for n in range(cfg.n_steps):
        x, y = float(xs[n]), float(ys[n])
        if n >= cfg.estimator.warmup:
            estimator_step(state, x, y, cfg.density if known else kde)
        else:
            state.step += 1
        if not known:
            kde.update(x)
        if n + 1 in capture_set:
            thetas.append(state.theta_hat)
        if n + 1 in sup_set:
            sups.append(kde.sup_error(cfg.density))
    return _assemble(cfg, rep_id, record, traj, capture, thetas, sups, sup_steps,
                     state.projection_events, state.last_projection_step, kde.floor_hits)


def run_replication(cfg: ExperimentConfig, rep_id: int,
                    engine: str = "auto") -> ReplicationResult:
    """Run one replication.

    ``engine="fused"`` runs the compiled loop (grid mode only),
    ``"reference"`` steps through :class:`RecursiveKde` and
    :func:`estimator_step`. ``"auto"`` picks fused whenever it applies.
    """
    cfg.validate()
    if engine == "auto":
        engine = "fused" if cfg.kde.mode == "grid" else "reference"
    if engine == "fused":
        if cfg.kde.mode != "grid":
            raise DomainError("the fused engine supports grid mode only")
        return _run_fused(cfg, rep_id)
    if engine == "reference":
        return _run_reference(cfg, rep_id)
    raise DomainError(f"unknown engine {engine!r}")


def _safe_replication(args):
    cfg, rep_id = args
    try:
        return run_replication(cfg, rep_id)
    except Exception as exc:
        raise ReplicationError(rep_id, exc) from exc


def run_replications(cfg: ExperimentConfig, jobs: int = 1) -> list[ReplicationResult]:
    """All replications of ``cfg``, ordered by rep_id."""
    cfg.validate()
    tasks = [(cfg, r) for r in range(cfg.n_reps)]
    if jobs <= 1 or cfg.n_reps == 1:
        return [_safe_replication(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_safe_replication, tasks,
                             chunksize=max(1, cfg.n_reps // (4 * jobs))))


def ks_test(samples, sigma: float) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test against N(0, sigma^2), asymptotic p-value."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 10:
        raise DomainError("KS test needs at least 10 samples")
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    import scipy.stats

    res = scipy.stats.kstest(samples, "norm", args=(0.0, sigma), method="asymp")
    return float(res.statistic), float(res.pvalue)


def rate_fit(mse_at: dict[int, float], steps=None) -> float:
    """Least-squares slope of log(MSE) against log(n)."""
    steps = sorted(mse_at) if steps is None else sorted(steps)
    if len(steps) < 3 or steps[-1] < 100 * steps[0]:
        raise DomainError("rate fit needs >= 3 points spanning >= 2 decades")
    mse = np.array([mse_at[s] for s in steps], dtype=float)
    if np.any(mse <= 0) or not np.all(np.isfinite(mse)):
        raise NumericError("MSE values must be positive and finite for a log fit")
    slope, _ = np.polyfit(np.log(steps), np.log(mse), 1)
    return float(slope)


@dataclass
class ExperimentSummary:
    variant: str
    n_steps: int
    n_reps: int
    mean_abs_error_at: dict[int, float]
    mse_at: dict[int, float]
    mean_standardized: float
    empirical_var_standardized: float
    xi2_theoretical: float | None
    ks_statistic: float | None
    ks_pvalue: float | None
    projection_event_histogram: dict[int, int]
    last_projection_histogram: dict[int, int]
    floor_hits_total: int
    mse_caveat: str = MSE_CAVEAT

    def to_dict(self):
        def keyed(d):
            return {str(k): v for k, v in d.items()}

        out = dict(vars(self))
        for name in ("mean_abs_error_at", "mse_at", "projection_event_histogram",
                     "last_projection_histogram"):
            out[name] = keyed(out[name])
        return out


def _decade(step: int) -> int:
    """Bucket a step index by decade: 0 for none, else 10**ceil(log10(step))."""
    if step <= 0:
        return 0
    bucket = 1
    while bucket < step:
        bucket *= 10
    return bucket


def summarize(cfg: ExperimentConfig, reps: list[ReplicationResult]) -> ExperimentSummary:
    """Fold replications (in the given order) into summary statistics."""
    theta = cfg.theta_true
    mae, mse = {}, {}
    for s in cfg.record_points:
        err = np.array([r.theta_hat_at[s] - theta for r in reps])
        mae[s] = float(np.mean(np.abs(err)))
        mse[s] = float(np.mean(err ** 2))
    z = np.array([r.final_standardized_error for r in reps])
    var = float(np.var(z, ddof=1)) if z.size >= 2 else 0.0

    xi2 = ks_stat = ks_p = None
    if cfg.clt_checks:
        try:
            xi2 = asymptotic_variance(theta, cfg.shape, cfg.density, cfg.noise.sigma).xi2
        except AdmissibilityError:
            xi2 = None
        if xi2 is not None and z.size >= 10:
            ks_stat, ks_p = ks_test(z, math.sqrt(xi2))

    hist: dict[int, int] = {}
    last_hist: dict[int, int] = {}
    for r in reps:
        hist[r.projection_events] = hist.get(r.projection_events, 0) + 1
        b = _decade(r.last_projection_step)
        last_hist[b] = last_hist.get(b, 0) + 1
    return ExperimentSummary(
        variant=cfg.estimator.variant,
        n_steps=cfg.n_steps,
        n_reps=len(reps),
        mean_abs_error_at=mae,
        mse_at=mse,
        mean_standardized=float(np.mean(z)),
        empirical_var_standardized=var,
        xi2_theoretical=xi2,
        ks_statistic=ks_stat,
        ks_pvalue=ks_p,
        projection_event_histogram=dict(sorted(hist.items())),
        last_projection_histogram=dict(sorted(last_hist.items())),
        floor_hits_total=int(sum(r.floor_hits for r in reps)),
    )


def run_experiment(cfg: ExperimentConfig, jobs: int = 1,
                   return_reps: bool = False):
    """Run every replication and summarize them.

    Returns the summary, or ``(summary, reps)`` when ``return_reps`` is set.
    """
    reps = run_replications(cfg, jobs)
    summary = summarize(cfg, reps)
    return (summary, reps) if return_reps else summary
