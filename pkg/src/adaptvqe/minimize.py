"""Dense BFGS minimizer with a strong-Wolfe cubic line search.

The inner VQE loop relies on three contract points: accepted steps satisfy
sufficient decrease (so the returned energy never exceeds the starting
one), convergence means the gradient norm is at or below tolerance, and
evaluation counts are deterministic because the gradient is always supplied
analytically by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_CURVATURE_FLOOR = 1e-12
_MAX_HALVINGS = 60


@dataclass
class OptimizerConfig:
    gradient_norm_tolerance: float = 1e-10
    max_iterations: int = 1000
    c1: float = 1e-4
    c2: float = 0.9

    def __post_init__(self):
        if self.gradient_norm_tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not (0 < self.c1 < self.c2 < 1):
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")


@dataclass
class OptimizationResult:
    parameters: np.ndarray
    energy: float
    gradient_norm: float
    function_evaluations: int
    gradient_evaluations: int
    converged: bool
    iterations: int = 0
    message: str = ""


class OptimizationFailure(RuntimeError):
    """Non-finite objective/gradient; carries the diagnostic point."""

    def __init__(self, message, point):
        super().__init__(message)
        self.point = np.asarray(point)


class _Counted:
    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


def _strong_wolfe(phi, dphi, phi0, dphi0, c1, c2, x_diag):
    """Nocedal-Wright bracketing line search; returns (alpha, phi(alpha)).

    Armijo tests carry a machine-epsilon slack so steps keep being accepted
    on the float plateau near an optimum (approximate-Wolfe behavior); the
    caller's best-point tracking preserves strict monotonicity.  Non-finite
    trial values halve the step; returns None when no Wolfe point is found
    on finite values (caller treats it as a clean stall).
    """
    slack = 1e-14 * (1.0 + abs(phi0))

    def armijo(a, val):
        return val <= phi0 + c1 * a * dphi0 + slack

    def safe_phi(a):
        for _ in range(_MAX_HALVINGS):
            val = phi(a)
            if np.isfinite(val):
                return a, val
            a *= 0.5
        raise OptimizationFailure("objective stayed non-finite while halving the step", x_diag)

    def zoom(alo, ahi, phi_lo, dphi_lo, phi_hi):
        for _ in range(60):
            if abs(ahi - alo) < 1e-16 * max(1.0, abs(alo)):
                break
            # cubic model from (alo, phi_lo, dphi_lo) and (ahi, phi_hi)
            d = ahi - alo
            denom = phi_hi - phi_lo - dphi_lo * d
            if abs(denom) > 1e-18:
                aj = alo - dphi_lo * d * d / (2.0 * denom)
            else:
                aj = alo + 0.5 * d
            lo, hi = min(alo, ahi), max(alo, ahi)
            width = hi - lo
            if not np.isfinite(aj) or aj <= lo + 0.05 * width or aj >= hi - 0.05 * width:
                aj = alo + 0.5 * d
            val = phi(aj)
            if not np.isfinite(val):
                ahi, phi_hi = aj, np.inf
                continue
            if not armijo(aj, val) or val >= phi_lo + slack:
                ahi, phi_hi = aj, val
            else:
                dj = dphi(aj)
                if abs(dj) <= -c2 * dphi0:
                    return aj, val
                if dj * (ahi - alo) >= 0:
                    ahi, phi_hi = alo, phi_lo
                alo, phi_lo, dphi_lo = aj, val, dj
        if armijo(alo, phi_lo) and alo > 0:
            return alo, phi_lo  # sufficient decrease even without curvature
        return None

    a_prev, phi_prev, dphi_prev = 0.0, phi0, dphi0
    a, val = safe_phi(1.0)
    for it in range(30):
        if not armijo(a, val) or (it > 0 and val >= phi_prev + slack):
            return zoom(a_prev, a, phi_prev, dphi_prev, val)
        d = dphi(a)
        if abs(d) <= -c2 * dphi0:
            return a, val
        if d >= 0:
            return zoom(a, a_prev, val, d, phi_prev)
        a_prev, phi_prev, dphi_prev = a, val, d
        a, val = safe_phi(2.0 * a)
        if a <= a_prev:  # halving collided with the previous point
            return None
    return None


def minimize(objective, gradient, x0, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Quasi-Newton minimization with analytic gradients.

    Returns a point whose gradient norm is at or below tolerance, or the
    best point found when iterations or the line search are exhausted; the
    returned energy never exceeds objective(x0).
    """
    cfg = cfg or OptimizerConfig()
    f = _Counted(objective)
    g = _Counted(gradient)
    x = np.asarray(x0, dtype=float).copy()
    n = x.size

    fx = float(f(x))
    if not np.isfinite(fx):
        raise OptimizationFailure("objective is non-finite at the initial point", x)
    gx = np.asarray(g(x), dtype=float)
    if not np.all(np.isfinite(gx)):
        raise OptimizationFailure("gradient is non-finite at the initial point", x)

    hinv = np.eye(n)
    best = (fx, x.copy(), gx.copy())
    message = "converged"
    iterations = 0
    for iterations in range(cfg.max_iterations + 1):
        gnorm = float(np.linalg.norm(gx))
        if gnorm <= cfg.gradient_norm_tolerance:
            message = "converged"
            break
        if iterations == cfg.max_iterations:
            message = "max-iterations"
            break
        p = -hinv @ gx
        dphi0 = float(gx @ p)
        if dphi0 >= 0:  # stale curvature; steepest-descent restart
            hinv = np.eye(n)
            p = -gx
            dphi0 = float(gx @ p)
        phi = lambda a: float(f(x + a * p))
        latest_grad = {}

        def dphi(a):
            gv = np.asarray(g(x + a * p), dtype=float)
            latest_grad[a] = gv
            return float(gv @ p)

        hit = _strong_wolfe(phi, dphi, fx, dphi0, cfg.c1, cfg.c2, x)
        if hit is None:
            message = "line-search-failed"
            break
        alpha, fnew = hit
        x_new = x + alpha * p
        g_new = latest_grad.get(alpha)
        if g_new is None:
            g_new = np.asarray(g(x_new), dtype=float)
        if not (np.isfinite(fnew) and np.all(np.isfinite(g_new))):
            raise OptimizationFailure("non-finite value at an accepted step", x_new)
        s = x_new - x
        y = g_new - gx
        sy = float(s @ y)
        if sy > _CURVATURE_FLOOR * float(np.linalg.norm(s) * np.linalg.norm(y) + 1e-300):
            rho = 1.0 / sy
            v = np.eye(n) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        x, fx, gx = x_new, fnew, g_new
        if fx < best[0] or (fx == best[0] and gnorm > float(np.linalg.norm(gx))):
            best = (fx, x.copy(), gx.copy())

    # prefer the converged endpoint; otherwise the best energy seen
    if float(np.linalg.norm(gx)) > cfg.gradient_norm_tolerance and best[0] < fx:
        fx, x, gx = best[0], best[1], best[2]
    return OptimizationResult(
        parameters=x,
        energy=fx,
        gradient_norm=float(np.linalg.norm(gx)),
        function_evaluations=f.calls,
        gradient_evaluations=g.calls,
        converged=float(np.linalg.norm(gx)) <= cfg.gradient_norm_tolerance,
        iterations=iterations,
        message=message,
    )


def initialize_parameters(previous, new_count: int, mode: str, seed: int = 0) -> np.ndarray:
    """Parameter vector for a grown ansatz.

    warm keeps previous optima and appends zeros; cold is all zeros; random
    draws every entry i.i.d. uniform from [-pi, pi] with a reproducible seed.
    """
    previous = np.asarray(previous, dtype=float)
    if new_count < previous.size:
        raise ValueError("new_count smaller than the previous parameter count")
    if mode == "warm":
        out = np.zeros(new_count)
        out[: previous.size] = previous
        return out
    if mode == "cold":
        return np.zeros(new_count)
    if mode == "random":
        rng = np.random.default_rng(seed)
        return rng.uniform(-np.pi, np.pi, size=new_count)
    raise ValueError(f"unknown initialization mode {mode!r}")
