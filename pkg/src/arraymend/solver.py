"""
Constrained minimum-l1 search for excitation corrections.

Solves, over the unmasked entries of a correction vector dw,

    minimize    sum_n |dw_n|
    subject to  |F(u; w + dw)|^2 <= ratio * |F(0; w + dw)|^2   for u in region
                dw_n = 0 on masked elements

with ratio = 10^(target_db / 10). The unknowns are the real and imaginary
parts of the free entries; everything is deterministic.

Two phases:

* feasibility phase: Barzilai-Borwein gradient descent with a nonmonotone
  backtracking line search on the squared hinge of the per-sample relative
  violations (exact gradients, including the broadside-growth term), until
  the bound holds strictly. Failure to reach the feasible region is the
  infeasibility signal.
* shrink phase: log-barrier stages over the per-sample constraints
  ratio*|F(0)|^2 - |F(u)|^2 > 0, each stage minimized by damped Newton
  steps (analytic Hessian, ridge-escalated Cholesky). The l1 objective is
  smoothed as sqrt(|dw|^2 + mu^2) with mu annealed toward zero while the
  barrier weight grows geometrically; the barrier domain keeps every
  iterate feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InfeasibleError, NumericalFailureError
from .model import ArrayGeometry, MetricSpec, as_weights, steering_matrix

_ARMIJO = 1e-4
_STEP_GROW = 2.0
_STEP_MAX = 1e12
_NONMONOTONE_WINDOW = 10
_STALL_WINDOW = 120


@dataclass(frozen=True)
class SolverConfig:
    """Control parameters for the correction solvers."""

    max_iterations: int = 500        # cap on barrier stages
    max_grad_steps: int = 2000       # descent-step budget across all stages
    feasibility_steps: int = 2000    # descent-step budget of the feasibility phase
    min_step: float = 1e-10          # smallest accepted line-search step
    optimality_tol: float = 1e-6     # first-order stationarity target
    constraint_tol_db: float = 0.02  # accepted overshoot of the dB target
    zero_threshold: float = 1e-12    # support-counting threshold
    smooth_start: float = 1e-2       # l1 smoothing anneal
    smooth_floor: float = 1e-8
    smooth_decay: float = 0.1
    barrier_start: float = 1.0       # barrier weight anneal
    barrier_growth: float = 10.0

    def __post_init__(self):
        for name in ("max_iterations", "max_grad_steps", "feasibility_steps", "min_step",
                     "optimality_tol", "constraint_tol_db", "smooth_start", "smooth_floor",
                     "smooth_decay", "barrier_start", "barrier_growth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.zero_threshold < 0:
            raise ValueError("zero_threshold must be non-negative")

    def with_overrides(self, **kwargs) -> "SolverConfig":
        return replace(self, **kwargs)


def l1_norm(delta) -> float:
    """Sum of complex magnitudes of the correction entries."""
    return float(np.sum(np.abs(as_weights(delta))))


def l0_norm(delta, zero_threshold: float) -> int:
    """Number of correction entries with magnitude above the threshold."""
    if zero_threshold < 0:
        raise ValueError("zero_threshold must be non-negative")
    return int(np.count_nonzero(np.abs(as_weights(delta)) > zero_threshold))


def _real_dot(a: np.ndarray, b: np.ndarray) -> float:
    # Euclidean inner product of the underlying real parameter vectors.
    return float(np.real(np.vdot(a, b)))


class _Landscape:
    """Pattern pieces of one solve: fixed faulty fields plus free-column steering."""

    def __init__(self, geometry: ArrayGeometry, w_faulty: np.ndarray,
                 metric: MetricSpec, free: np.ndarray):
        full = steering_matrix(geometry, metric.region.samples)
        self.A = full[:, free]
        self.F_base = full @ w_faulty
        self.F0_base = complex(np.sum(w_faulty))
        self.tau = 10.0 ** (metric.target_db / 10.0)
        self.m = int(metric.region.samples.size)

    def fields(self, z: np.ndarray):
        return self.F_base + self.A @ z, self.F0_base + np.sum(z)

    def worst_ratio(self, z: np.ndarray) -> float:
        """max |F(u)|^2 / (ratio * |F(0)|^2); feasible iff <= 1."""
        f, f0 = self.fields(z)
        p0 = abs(f0) ** 2
        if p0 == 0.0:
            return np.inf
        return float(np.max(np.abs(f) ** 2) / (self.tau * p0))


def _descend(fun, z, max_steps: int, min_step: float, grad_tol: float, success=None):
    """
    Gradient descent with BB step seeding and backtracking.

    fun(z, with_grad) returns the objective value (np.inf outside the
    domain) and, when asked, the gradient packed as a complex vector
    (d/dRe + i*d/dIm). The sufficient-decrease test is nonmonotone
    (against the worst of the last few accepted values) so the BB step
    length is rarely truncated. Returns (z, value, steps_used, status)
    with status one of "met", "converged", "stalled", "tiny", "budget".
    """
    value, grad = fun(z, True)
    if not np.isfinite(value):
        raise NumericalFailureError("descent started outside the domain")
    alpha = 1.0 / max(1.0, np.sqrt(_real_dot(grad, grad)))
    prev_z = prev_grad = None
    recent = [value]
    best_z, best_value = z, value
    best_step = 0
    steps = 0
    while steps < max_steps:
        if success is not None and success(value, z):
            return z, value, steps, "met"
        if steps - best_step > _STALL_WINDOW:
            return best_z, best_value, steps, "stalled"
        gnorm2 = _real_dot(grad, grad)
        if np.sqrt(gnorm2) <= grad_tol:
            return z, value, steps, "converged"
        if prev_z is not None:
            s = z - prev_z
            y = grad - prev_grad
            sy = _real_dot(s, y)
            alpha = _real_dot(s, s) / sy if sy > 0 else alpha * _STEP_GROW
        alpha = float(np.clip(alpha, 1e-18, _STEP_MAX))
        bound = max(recent)
        t = alpha
        z_new = v_new = None
        while t >= min_step:
            cand = z - t * grad
            v_cand, _ = fun(cand, False)
            if v_cand <= bound - _ARMIJO * t * gnorm2:
                z_new, v_new = cand, v_cand
                break
            t *= 0.5
        if z_new is None:
            return (best_z, best_value, steps, "tiny") if best_value < value else (z, value, steps, "tiny")
        prev_z, prev_grad = z, grad
        z, value = z_new, v_new
        _, grad = fun(z, True)
        if not (np.isfinite(value) and np.all(np.isfinite(grad))):
            raise NumericalFailureError("non-finite objective or gradient")
        recent.append(value)
        if len(recent) > _NONMONOTONE_WINDOW:
            recent.pop(0)
        if best_value - value > 1e-12 * max(1.0, abs(best_value)):
            best_z, best_value, best_step = z, value, steps
        steps += 1
    if best_value < value:
        return best_z, best_value, steps, "budget"
    return z, value, steps, "budget"


def _violation(land: _Landscape, z: np.ndarray, with_grad: bool, push: float = 1e-6):
    """Squared hinge of the relative constraint violations and its gradient.

    The bound is tightened by the relative push so that a zero residual
    leaves the iterate strictly inside the true feasible region.
    """
    f, f0 = land.fields(z)
    p0 = abs(f0) ** 2
    if p0 <= 0.0:
        return np.inf, None
    tau = land.tau * (1.0 - push)
    q = np.abs(f) ** 2
    r = q / (tau * p0) - 1.0
    hinge = np.maximum(r, 0.0)
    value = float(np.sum(hinge ** 2))
    if not with_grad:
        return value, None
    c = 2.0 * hinge / (tau * p0)
    gamma = float(np.sum(c * q)) / p0
    grad = 2.0 * (land.A.conj().T @ (c * f)) - 2.0 * gamma * f0
    return value, grad


def _feasibility_phase(land: _Landscape, z: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    strict = 1.0 - 1e-7

    def fun(x, with_grad):
        return _violation(land, x, with_grad)

    def success(value, x):
        return land.worst_ratio(x) <= strict

    z, value, _, status = _descend(
        fun, z, cfg.feasibility_steps, cfg.min_step,
        grad_tol=1e-14, success=success,
    )
    if status != "met" and land.worst_ratio(z) > strict:
        raise InfeasibleError(
            f"no point satisfying the sidelobe bound found ({status}, residual {value:.3e})"
        )
    return z


def _stage_fun(land: _Landscape, t: float, mu: float, scale: float):
    """Barrier objective of one stage over the exact per-sample constraints."""
    tau = land.tau

    def fun(z, with_grad):
        f0 = land.F0_base + np.sum(z)
        p0 = abs(f0) ** 2
        f = land.F_base + land.A @ z
        q = np.abs(f) ** 2
        b = tau * p0 - q
        if np.any(b <= 0.0):
            return np.inf, None
        s = np.sqrt(np.abs(z) ** 2 + mu * mu)
        value = float(np.sum(s)) + float(np.sum(-np.log(b / scale))) / t
        if not with_grad:
            return value, None
        c = 1.0 / b
        grad = z / s + (2.0 * (land.A.conj().T @ (c * f)) - tau * float(np.sum(c)) * 2.0 * f0) / t
        return value, grad

    return fun


def _real_block(p: np.ndarray) -> np.ndarray:
    # Real 2f x 2f representation of the Hermitian quadratic form z^H P z.
    return np.block([[p.real, -p.imag], [p.imag, p.real]])


def _stage_hessian(land: _Landscape, z: np.ndarray, t: float, mu: float) -> np.ndarray:
    """Hessian of the stage objective in stacked (Re z, Im z) coordinates."""
    nfree = z.size
    tau = land.tau
    f0 = land.F0_base + np.sum(z)
    f = land.F_base + land.A @ z
    q = np.abs(f) ** 2
    b = tau * abs(f0) ** 2 - q

    s = np.sqrt(np.abs(z) ** 2 + mu * mu)
    inv_s = 1.0 / s
    a_re, a_im = z.real, z.imag
    h = np.zeros((2 * nfree, 2 * nfree))
    i = np.arange(nfree)
    h[i, i] = inv_s - a_re * a_re * inv_s ** 3
    h[nfree + i, nfree + i] = inv_s - a_im * a_im * inv_s ** 3
    h[i, nfree + i] = h[nfree + i, i] = -a_re * a_im * inv_s ** 3

    c = 1.0 / b
    csum = float(np.sum(c))
    # curvature of -log(tau*|F0|^2 - |F(u)|^2): outer products of the
    # constraint gradients, plus the sample-power curvature, minus the
    # broadside-power curvature (the nonconvex part).
    p = land.A.conj().T @ (land.A * c[:, None])
    h += 2.0 * _real_block(p) / t
    gb = 2.0 * f[:, None] * np.conj(land.A) - 2.0 * tau * f0
    v = np.concatenate([gb.real, gb.imag], axis=1)
    h += (v * (c ** 2)[:, None]).T @ v / t
    ones = np.ones(nfree)
    jblock = np.zeros((2 * nfree, 2 * nfree))
    jblock[:nfree, :nfree] = np.outer(ones, ones)
    jblock[nfree:, nfree:] = np.outer(ones, ones)
    h -= 2.0 * tau * csum * jblock / t
    return h


def _newton_stage(land: _Landscape, z: np.ndarray, t: float, mu: float,
                  max_iters: int, min_step: float, tol: float):
    """Damped Newton minimization of one barrier stage."""
    nfree = z.size
    f0 = land.F0_base + np.sum(z)
    scale = land.tau * abs(f0) ** 2
    fun = _stage_fun(land, t, mu, scale)

    value, grad = fun(z, True)
    if not np.isfinite(value):
        raise NumericalFailureError("barrier stage started outside the domain")
    for _ in range(max_iters):
        g_real = np.concatenate([grad.real, grad.imag])
        gnorm = float(np.linalg.norm(g_real))
        if gnorm <= tol:
            break
        h = _stage_hessian(land, z, t, mu)
        diag = np.arange(2 * nfree)
        base = max(1.0, float(np.trace(h)) / (2 * nfree))
        step_real = None
        ridge = 1e-12 * base
        for _ in range(25):
            try:
                hc = h.copy()
                hc[diag, diag] += ridge
                np.linalg.cholesky(hc)  # positive-definiteness check
                step_real = np.linalg.solve(hc, -g_real)
                break
            except np.linalg.LinAlgError:
                ridge *= 100.0
        if step_real is None:
            step_real = -g_real
        step = step_real[:nfree] + 1j * step_real[nfree:]
        slope = float(g_real @ step_real)
        if slope >= 0:  # not a descent direction; fall back to steepest descent
            step = -grad
            slope = -gnorm ** 2

        alpha = 1.0
        accepted = False
        while alpha >= min_step:
            cand = z + alpha * step
            v_cand, _ = fun(cand, False)
            if v_cand <= value + _ARMIJO * alpha * slope:
                z, value = cand, v_cand
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        _, grad = fun(z, True)
        if not np.all(np.isfinite(grad)):
            raise NumericalFailureError("non-finite gradient in barrier stage")
    return z


def _shrink_phase(land: _Landscape, z: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    t = cfg.barrier_start
    mu = cfg.smooth_start
    stage_iters = max(8, cfg.max_grad_steps // 100)
    for _ in range(cfg.max_iterations):
        stage_tol = max(cfg.optimality_tol, 1e-4 / np.sqrt(t))
        z = _newton_stage(land, z, t, mu, stage_iters, cfg.min_step, stage_tol)
        gap_ok = land.m / t <= cfg.optimality_tol * max(1.0, float(np.sum(np.abs(z))))
        mu_ok = mu <= cfg.smooth_floor * (1.0 + 1e-12)
        if gap_ok and mu_ok:
            break
        if not gap_ok:
            t *= cfg.barrier_growth
        mu = max(mu * cfg.smooth_decay, cfg.smooth_floor)
    return z


def solve_constrained_l1(geometry: ArrayGeometry, w_faulty, metric: MetricSpec,
                         mask, start=None, config: SolverConfig | None = None) -> np.ndarray:
    """
    Smallest-l1 correction of the faulty excitations meeting the metric target.

    mask marks elements whose correction entry is pinned to zero (failed
    elements plus any entries the caller has frozen). The returned vector is
    exactly zero there. Raises InfeasibleError when no correction within the
    mask can meet the target, NumericalFailureError on non-finite values.
    """
    cfg = config if config is not None else SolverConfig()
    w = as_weights(w_faulty, geometry.n)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (geometry.n,):
        raise ValueError("mask length must match the array size")
    free = ~mask
    nfree = int(free.sum())
    land = _Landscape(geometry, w, metric, free)

    tol_ratio = 10.0 ** (cfg.constraint_tol_db / 10.0)
    zero_free = np.zeros(nfree, dtype=complex)

    # The zero correction is l1-optimal whenever it is admissible.
    if land.worst_ratio(zero_free) <= tol_ratio:
        return np.zeros(geometry.n, dtype=complex)
    if nfree == 0:
        raise InfeasibleError("no free elements and the zero correction misses the target")

    if start is None:
        z = zero_free
        start_l1 = None
    else:
        s = as_weights(start, geometry.n)
        if np.any(s[mask] != 0):
            raise ValueError("start vector must be zero on masked elements")
        z = s[free].copy()
        start_l1 = float(np.sum(np.abs(z))) if land.worst_ratio(z) <= tol_ratio else None

    if land.worst_ratio(z) > 1.0 - 1e-7:
        try:
            z = _feasibility_phase(land, z, cfg)
        except InfeasibleError:
            if start_l1 is not None:
                # the warm start already met the toleranced bound; keep it
                delta = np.zeros(geometry.n, dtype=complex)
                delta[free] = as_weights(start, geometry.n)[free]
                return delta
            raise
    z = _shrink_phase(land, z, cfg)

    if land.worst_ratio(z) > tol_ratio:
        raise NumericalFailureError("shrink phase left the constraint violated")
    if start_l1 is not None and float(np.sum(np.abs(z))) > start_l1:
        z = as_weights(start, geometry.n)[free].copy()

    delta = np.zeros(geometry.n, dtype=complex)
    delta[free] = z
    return delta
