"""Time integration of the curvature flows and the Newton solver.

Two descent flows drive the curvature error L - Lhat to zero, written in
the log-cotangent coordinates K where both are gradient flows:

    calabi:     dK/dt = -J^T (L - Lhat)     (steepest descent of the energy
                                             0.5 ||L - Lhat||^2)
    curvature:  dK/dt = -(L - Lhat)         (steepest descent of the convex
                                             potential; equivalently
                                             dr/dt = (L-Lhat)/2 sin 2r)

Both converge to the same unique fixed point exactly when the
prescription is feasible; infeasible prescriptions push some coordinate
to infinity, which the runner reports as divergence together with a
violating-subset certificate.  A damped Newton iteration on the same
fixed-point equation is provided for fast polishing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .curvature import CurvatureState, evaluate
from .errors import (DomainError, InputError, IntegrationError,
                     NonConvergenceError)
from .feasibility import FeasibilityVerdict, check_mincut
from .surface import Prescription, SurfaceComplex

METHODS = ("calabi", "curvature", "newton")
INTEGRATORS = ("rk4", "rkf45")
_INTEGRATOR_ALIASES = {"rk4-fixed": "rk4", "rkf45-adaptive": "rkf45"}

VERDICT_CONVERGED = "converged"
VERDICT_DIVERGED = "diverged"
VERDICT_BUDGET = "budget-exhausted"


@dataclass(frozen=True)
class FlowConfig:
    """Integration parameters for one flow run."""

    method: str = "calabi"
    integrator: str = "rkf45"
    step: float = 1e-2
    tol_curvature: float = 1e-10
    tol_ode: float = 1e-9
    max_time: float = 1e4
    max_iters: int = 500_000
    divergence_k: float = 50.0
    newton_max_iters: int = 100
    attach_certificate: bool = True

    def __post_init__(self):
        integrator = _INTEGRATOR_ALIASES.get(self.integrator, self.integrator)
        object.__setattr__(self, "integrator", integrator)
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        if integrator not in INTEGRATORS:
            raise InputError(f"unknown integrator {self.integrator!r}")
        for name in ("step", "tol_curvature", "tol_ode", "max_time"):
            if getattr(self, name) <= 0.0:
                raise InputError(f"{name} must be positive")
        if self.max_iters <= 0 or self.newton_max_iters <= 0:
            raise InputError("iteration budgets must be positive")
        if self.divergence_k <= 0.0:
            raise InputError("divergence_k must be positive")


@dataclass(frozen=True)
class FlowSample:
    """One accepted integration state."""

    t: float
    K: np.ndarray
    err_inf: float      # ||L - Lhat||_inf
    energy: float       # 0.5 ||L - Lhat||^2
    speed: float        # ||dK/dt||_2 (Newton: step norm)
    min_eig: float      # smallest eigenvalue of J
    clamped: bool


@dataclass
class FlowTrace:
    """Time series of a flow run plus its termination verdict."""

    method: str
    samples: list[FlowSample] = field(default_factory=list)
    verdict: str = VERDICT_BUDGET
    fitted_rate: float | None = None
    certificate: FeasibilityVerdict | None = None

    @property
    def final(self) -> FlowSample:
        return self.samples[-1]

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.samples])

    def final_k(self) -> np.ndarray:
        return self.samples[-1].K.copy()


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of ln(energy) against t."""

    slope: float
    r_squared: float
    degenerate: bool = False


# ----------------------------------------------------------------------
# Right-hand sides
# ----------------------------------------------------------------------

def calabi_rhs(complex: SurfaceComplex, prescription: Prescription, K) -> np.ndarray:
    """dK/dt = -J^T (L - Lhat), using the analytic Jacobian."""
    state = evaluate(complex, K)
    return _calabi_direction(state, prescription)


def _calabi_direction(state: CurvatureState, prescription: Prescription) -> np.ndarray:
    return -state.J.T @ (state.L - prescription.lhat)


def curvature_rhs(complex: SurfaceComplex, prescription: Prescription, r) -> np.ndarray:
    """dr_v/dt = (L_v - Lhat_v)/2 * sin(2 r_v), the radius-space flow."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r >= 0.5 * np.pi):
        raise DomainError("radii must lie in (0, pi/2)")
    state = evaluate(complex, geometry.r_to_k(r))
    return 0.5 * (state.L - prescription.lhat) * np.sin(2.0 * r)


# ----------------------------------------------------------------------
# Runner
# ----------------------------------------------------------------------

def run(complex: SurfaceComplex, prescription: Prescription, K0,
        config: FlowConfig | None = None) -> FlowTrace:
    """Integrate the configured flow from K0 until it converges, diverges,
    or exhausts its budget.

    The trace is sampled at every accepted step.  Convergence means
    ||L - Lhat||_inf dropped below ``tol_curvature``; divergence means
    ||K||_inf crossed ``divergence_k`` (possible only for infeasible
    prescriptions, so the returned trace carries a violating-subset
    certificate).  The curvature flow is integrated in K-space through
    the identity dK/dt = -(L - Lhat), which avoids the radius-interval
    boundary entirely.
    """
    if config is None:
        config = FlowConfig()
    if not complex.is_valid:
        raise InputError("invalid complex: " + "; ".join(complex.violations))
    K0 = np.asarray(K0, dtype=float)
    if K0.shape != (complex.n_vertices,):
        raise InputError(f"K0 must have length {complex.n_vertices}")
    if not np.all(np.isfinite(K0)):
        raise InputError("K0 must be finite")
    if len(prescription) != complex.n_vertices:
        raise InputError("prescription length does not match complex")

    if config.method == "newton":
        return _run_newton(complex, prescription, K0, config)
    return _run_ode(complex, prescription, K0, config)


def _sample(t: float, state: CurvatureState, prescription: Prescription,
            speed: float) -> FlowSample:
    err = state.L - prescription.lhat
    return FlowSample(
        t=t, K=state.K.copy(),
        err_inf=float(np.max(np.abs(err))),
        energy=0.5 * float(np.dot(err, err)),
        speed=speed,
        min_eig=state.min_eigenvalue,
        clamped=state.clamped,
    )


def _finish(trace: FlowTrace, verdict: str, complex: SurfaceComplex,
            prescription: Prescription, config: FlowConfig) -> FlowTrace:
    trace.verdict = verdict
    if verdict == VERDICT_CONVERGED:
        window = max(10, int(np.ceil(0.3 * len(trace.samples))))
        try:
            trace.fitted_rate = fit_decay_rate(trace, window).slope
        except InputError:
            trace.fitted_rate = None
    elif config.attach_certificate:
        # Infeasibility is the only cause of non-convergence, so explain a
        # divergence with the violated subset; a budget verdict gets the
        # certificate too when the prescription turns out infeasible.
        cert = check_mincut(complex, prescription)
        if verdict == VERDICT_DIVERGED or not cert.feasible:
            trace.certificate = cert
    return trace


# Fehlberg 4(5) tableau; the fifth-order solution is propagated.
_RKF_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_RKF_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_RKF_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_MIN_STEP = 1e-14
# Step ceiling h * |J_flow| for the adaptive integrator, safely inside the
# real-axis stability extent (about 3.68) of the propagated fifth-order
# solution.
_RKF_STAB = 3.2


def _run_ode(complex: SurfaceComplex, prescription: Prescription,
             K0: np.ndarray, config: FlowConfig) -> FlowTrace:
    lhat = prescription.lhat
    if config.method == "calabi":
        def direction(state: CurvatureState) -> np.ndarray:
            return -state.J.T @ (state.L - lhat)
    else:
        def direction(state: CurvatureState) -> np.ndarray:
            return lhat - state.L

    trace = FlowTrace(method=config.method)
    t = 0.0
    K = K0.copy()
    state = evaluate(complex, K)
    f0 = direction(state)
    trace.samples.append(_sample(t, state, prescription, float(np.linalg.norm(f0))))

    h = config.step
    steps = 0
    while True:
        last = trace.samples[-1]
        if last.err_inf < config.tol_curvature:
            return _finish(trace, VERDICT_CONVERGED, complex, prescription, config)
        if float(np.max(np.abs(K))) > config.divergence_k:
            return _finish(trace, VERDICT_DIVERGED, complex, prescription, config)
        if steps >= config.max_iters or t >= config.max_time:
            return _finish(trace, VERDICT_BUDGET, complex, prescription, config)

        if config.integrator == "rk4":
            h_step = min(config.step, config.max_time - t)
            k1 = f0
            k2 = direction(evaluate(complex, K + 0.5 * h_step * k1))
            k3 = direction(evaluate(complex, K + 0.5 * h_step * k2))
            k4 = direction(evaluate(complex, K + h_step * k3))
            K = K + (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h_step
        else:
            # Linear-stability ceiling from the current spectrum: the flow
            # Jacobian is about -J^2 (calabi) or -J (curvature), so holding
            # h below the explicit stability limit keeps the local error
            # shrinking with the residual instead of riding the boundary.
            lam = state.max_eigenvalue
            cap = _RKF_STAB / (lam * lam if config.method == "calabi" else lam)
            h = min(h, cap, config.max_time - t)
            K, t, h = _rkf45_step(complex, direction, K, f0, t, h,
                                  config.tol_ode, trace)
        state = evaluate(complex, K)
        f0 = direction(state)
        trace.samples.append(_sample(t, state, prescription,
                                     float(np.linalg.norm(f0))))
        steps += 1


def _rkf45_step(complex, direction, K, f0, t, h, tol, trace):
    """Advance one accepted Fehlberg step, shrinking h as needed."""
    k = [None] * 6
    k[0] = f0
    while True:
        for i in range(1, 6):
            y = K.copy()
            for j, a in enumerate(_RKF_A[i]):
                y += (h * a) * k[j]
            k[i] = direction(evaluate(complex, y))
        y5 = K.copy()
        y4 = K.copy()
        for i in range(6):
            y5 += (h * _RKF_B5[i]) * k[i]
            y4 += (h * _RKF_B4[i]) * k[i]
        err = float(np.max(np.abs(y5 - y4)))
        if err <= tol:
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
            return y5, t + h, h * factor
        h *= max(0.1, 0.9 * (tol / err) ** 0.2)
        if h < _MIN_STEP:
            raise IntegrationError(
                f"step size underflow at t={t:g} (local error {err:g})",
                trace=trace,
            )


# ----------------------------------------------------------------------
# Newton
# ----------------------------------------------------------------------

def _newton_step(complex: SurfaceComplex, prescription: Prescription,
                 state: CurvatureState) -> tuple[np.ndarray, CurvatureState, float]:
    """One damped Newton update; returns (K_new, state_new, step_norm)."""
    residual = state.L - prescription.lhat
    try:
        delta = np.linalg.solve(state.J.T, residual)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"linear solve failed: {exc}") from exc
    merit = float(np.linalg.norm(residual))
    s = 1.0
    while True:
        K_new = state.K - s * delta
        state_new = evaluate(complex, K_new)
        if float(np.linalg.norm(state_new.L - prescription.lhat)) < merit:
            return K_new, state_new, float(s * np.linalg.norm(delta))
        s *= 0.5
        if s < 1e-12:
            raise NonConvergenceError(
                "backtracking found no decrease; prescription likely infeasible")


def newton_solve(complex: SurfaceComplex, prescription: Prescription, K0,
                 tol: float = 1e-10, max_iters: int = 100) -> np.ndarray:
    """Damped Newton iteration K <- K - s J^{-T} (L - Lhat).

    Step lengths backtrack on the curvature-error norm.  Requires a
    feasible prescription; on infeasible input the iterates run away and
    the iteration cap triggers a NonConvergenceError.
    """
    if tol <= 0.0:
        raise InputError("tol must be positive")
    if not complex.is_valid:
        raise InputError("invalid complex: " + "; ".join(complex.violations))
    K = np.asarray(K0, dtype=float).copy()
    state = evaluate(complex, K)
    for _ in range(max_iters):
        if float(np.max(np.abs(state.L - prescription.lhat))) <= tol:
            return K
        K, state, _ = _newton_step(complex, prescription, state)
    raise NonConvergenceError(f"no convergence within {max_iters} Newton iterations")


def _run_newton(complex: SurfaceComplex, prescription: Prescription,
                K0: np.ndarray, config: FlowConfig) -> FlowTrace:
    trace = FlowTrace(method="newton")
    state = evaluate(complex, K0)
    trace.samples.append(_sample(0.0, state, prescription, 0.0))
    it = 0
    while True:
        if trace.samples[-1].err_inf < config.tol_curvature:
            return _finish(trace, VERDICT_CONVERGED, complex, prescription, config)
        if float(np.max(np.abs(state.K))) > config.divergence_k:
            return _finish(trace, VERDICT_DIVERGED, complex, prescription, config)
        if it >= config.newton_max_iters:
            return _finish(trace, VERDICT_BUDGET, complex, prescription, config)
        try:
            _, state, step_norm = _newton_step(complex, prescription, state)
        except NonConvergenceError:
            return _finish(trace, VERDICT_BUDGET, complex, prescription, config)
        it += 1
        trace.samples.append(_sample(float(it), state, prescription, step_norm))


# ----------------------------------------------------------------------
# Diagnostics
# ----------------------------------------------------------------------

def fit_decay_rate(trace: FlowTrace, window: int) -> RateFit:
    """Least-squares slope of ln(energy) over the trailing ``window`` samples.

    Only samples with strictly positive energy enter the fit; at least 10
    must remain.  A negative slope measures the exponential decay rate of
    the curvature error energy along a converged run.
    """
    if trace.verdict != VERDICT_CONVERGED:
        raise InputError("decay rate is only fitted on converged traces")
    if window < 10:
        raise InputError("window must cover at least 10 samples")
    tail = trace.samples[-window:]
    pts = [(s.t, s.energy) for s in tail if s.energy > 0.0]
    if len(pts) < 10:
        raise InputError(f"only {len(pts)} usable samples in the window")
    ts = np.array([p[0] for p in pts])
    ys = np.log(np.array([p[1] for p in pts]))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    if ss_tot < 1e-30 or float(np.ptp(ts)) == 0.0:
        return RateFit(slope=0.0, r_squared=0.0, degenerate=True)
    slope, intercept = np.polyfit(ts, ys, 1)
    residuals = ys - (slope * ts + intercept)
    r_squared = 1.0 - float(np.sum(residuals ** 2)) / ss_tot
    return RateFit(slope=float(slope), r_squared=r_squared)
