"""Solver de precodificación a nivel de símbolo sobre (X, Phi).

Lazo externo: Lagrangiano aumentado para la restricción de potencia
||X||^2 <= 1. Lazo interno: gradiente conjugado riemanniano (Hestenes-Stiefel)
sobre X (euclidiano) y Phi (producto de círculos complejos), con búsqueda
lineal de Armijo y paso común para ambas variables.

Convención de gradientes: para f real de z complejo, grad = df/dRe(z) + j df/dIm(z).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Callable

import numpy as np

from .channel import PhaseVector, RisChannel, apply, effective_channel
from .exceptions import ArgumentError
from .manifold import TangentVec, project_tangent, retract, transport
from .numerics import CVec, Rng, as_cvec, check_length, gaussian_complex

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 1e-3
HS_DENOMINATOR_FLOOR = 1e-14

STOP_CONVERGED = "converged"
STOP_MAX_OUTER = "max_outer_iters"
STOP_ZERO_TARGET = "zero_target"


@dataclass(frozen=True)
class AlmParams:
    eps0: float = 1e-3
    eps_min: float = 1e-6
    # El valor impreso 1000^(1/30) > 1 haría crecer la tolerancia; se usa el inverso.
    theta_eps: float = 1000.0 ** (-1.0 / 30.0)
    rho0: float = 1.0
    theta_rho: float = 10.0
    theta_sigma: float = 0.8
    lambda0: float = 1.0
    lambda_max: float = 10000.0
    d_min: float = 1e-6
    armijo_c: float = 1e-4
    step_shrink: float = 0.5
    alpha_init: float = 1.0
    max_backtracks: int = 50
    max_inner_iters: int = 2000
    max_outer_iters: int = 60

    def __post_init__(self):
        problems = []
        if not 0 < self.theta_eps < 1:
            problems.append("theta_eps debe estar en (0, 1)")
        if not self.theta_rho > 1:
            problems.append("theta_rho debe ser > 1")
        if not 0 < self.theta_sigma < 1:
            problems.append("theta_sigma debe estar en (0, 1)")
        if self.eps_min > self.eps0:
            problems.append("eps_min no puede superar eps0")
        if self.eps_min <= 0:
            problems.append("eps_min debe ser positivo")
        if self.rho0 <= 0:
            problems.append("rho0 debe ser positivo")
        if self.lambda_max <= 0:
            problems.append("lambda_max debe ser positivo")
        if not 0 <= self.lambda0 <= self.lambda_max:
            problems.append("lambda0 debe estar en [0, lambda_max]")
        if self.d_min <= 0:
            problems.append("d_min debe ser positivo")
        if not 0 < self.armijo_c < 1:
            problems.append("armijo_c debe estar en (0, 1)")
        if not 0 < self.step_shrink < 1:
            problems.append("step_shrink debe estar en (0, 1)")
        if self.alpha_init <= 0:
            problems.append("alpha_init debe ser positivo")
        if self.max_backtracks < 1 or self.max_inner_iters < 1 or self.max_outer_iters < 1:
            problems.append("los topes de iteración deben ser >= 1")
        if problems:
            raise ArgumentError("; ".join(problems))

    @classmethod
    def from_dict(cls, data: dict | None) -> "AlmParams":
        data = data or {}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ArgumentError(f"Parámetros de solver desconocidos: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class InnerResult:
    x: CVec
    phase: PhaseVector
    grad_norm: float
    iters: int
    stalled: bool = False


@dataclass(frozen=True, eq=False)
class SlpSolution:
    x: CVec
    phase: PhaseVector
    residual: float
    feasible: bool
    outer_iters: int
    inner_iters: int
    stop_reason: str
    stalled: bool = False

    def with_threshold(self, delta: float) -> "SlpSolution":
        return replace(self, feasible=bool(self.residual < delta))


@dataclass
class SolverState:
    """Variables del lazo externo."""

    x: CVec
    phase: PhaseVector
    lam: float
    rho: float
    eps: float
    sigma_viol: float | None = None
    outer_iter: int = 0
    inner_iter: int = 0


def objective(ch: RisChannel, target, x, phase: PhaseVector) -> float:
    target = as_cvec(target, name="target")
    check_length(target, ch.k, name="target")
    diff = target - apply(ch, phase, x)
    return float(np.real(np.vdot(diff, diff)))


def augmented_lagrangian(f: float, x, lam: float, rho: float) -> float:
    if rho <= 0:
        raise ArgumentError("rho debe ser positivo")
    x = as_cvec(x, name="X")
    excess = max(0.0, lam / rho + float(np.real(np.vdot(x, x))) - 1.0)
    return f + 0.5 * rho * excess * excess


def grad_x(ch: RisChannel, target, x, phase: PhaseVector, lam: float, rho: float) -> CVec:
    x = as_cvec(x, name="X")
    target = as_cvec(target, name="target")
    check_length(target, ch.k, name="target")
    a = ch.cascaded(phase)
    check_length(x, ch.m, name="X")
    residual = target - ch.amplitude * (a @ x)
    penalty = max(0.0, lam + rho * (float(np.real(np.vdot(x, x))) - 1.0))
    return -2.0 * ch.amplitude * (a.conj().T @ residual) + 2.0 * penalty * x


def grad_phi_euclidean(ch: RisChannel, target, x, phase: PhaseVector) -> CVec:
    target = as_cvec(target, name="target")
    check_length(target, ch.k, name="target")
    check_length(phase.phi, ch.n, name="Phi")
    h_bar = effective_channel(ch, x)
    x = as_cvec(x, name="X")
    residual = target - ch.amplitude * (ch.f @ x + h_bar @ phase.phi)
    return -2.0 * ch.amplitude * (h_bar.conj().T @ residual)


def clip(x: float, lo: float, hi: float) -> float:
    if lo > hi:
        raise ArgumentError(f"clip: lo={lo} mayor que hi={hi}")
    return max(lo, min(hi, x))


def riemannian_grad_phi(ch: RisChannel, target, x, phase: PhaseVector) -> TangentVec:
    return project_tangent(phase, grad_phi_euclidean(ch, target, x, phase))


def _real_inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.vdot(b, a)))


def rcg_solve(
    ch: RisChannel,
    target,
    start: tuple,
    lam: float,
    rho: float,
    eps: float,
    params: AlmParams,
    *,
    fixed_x: bool = False,
) -> InnerResult:
    """Minimiza L(., ., lam, rho) con gradiente conjugado riemanniano.

    Devuelve el primer iterado con ||(grad_X L, grad_Phi L)|| < eps, o el
    iterado en ``max_inner_iters``. Si la búsqueda lineal agota los
    retrocesos, devuelve el iterado actual con ``stalled=True``.
    """

    if eps <= 0:
        raise ArgumentError("eps debe ser positivo")
    target = as_cvec(target, name="target")
    x, phase = start
    x = as_cvec(x, name="X").copy()

    def value(x_, phase_) -> float:
        f = objective(ch, target, x_, phase_)
        # Con X fijo la penalización es constante.
        return f if fixed_x else augmented_lagrangian(f, x_, lam, rho)

    def gradients(x_, phase_) -> tuple[CVec, TangentVec]:
        gx = np.zeros_like(x_) if fixed_x else grad_x(ch, target, x_, phase_, lam, rho)
        return gx, riemannian_grad_phi(ch, target, x_, phase_)

    current = value(x, phase)
    gx, gphi = gradients(x, phase)
    prev = None
    j = 0
    while True:
        grad_norm = math.sqrt(_real_inner(gx, gx) + gphi.norm**2)
        if grad_norm < eps or j >= params.max_inner_iters:
            return InnerResult(x, phase, grad_norm, j)

        if prev is None:
            dx, dphi = -gx, -gphi.z
        else:
            gx_old, gphi_old, dx_old, dphi_old, phase_old = prev
            g_old_t = transport(phase_old, phase, gphi_old)
            d_old_t = transport(phase_old, phase, TangentVec(phase_old, dphi_old))
            diff_x = gx - gx_old
            diff_phi = gphi.z - g_old_t.z
            numerator = _real_inner(gx, diff_x) + _real_inner(gphi.z, diff_phi)
            denominator = _real_inner(dx_old, diff_x) + _real_inner(d_old_t.z, diff_phi)
            if abs(denominator) < HS_DENOMINATOR_FLOOR:
                beta = 0.0
            else:
                beta = max(0.0, numerator / denominator)
            dx = -gx + beta * dx_old
            dphi = -gphi.z + beta * d_old_t.z

        slope = _real_inner(gx, dx) + _real_inner(gphi.z, dphi)
        if slope >= 0:
            dx, dphi = -gx, -gphi.z
            slope = -grad_norm**2

        if params.armijo_c * params.alpha_init * abs(slope) <= 4 * np.finfo(float).eps * max(abs(current), 1e-300):
            # Ningún paso puede producir un descenso representable.
            return InnerResult(x, phase, grad_norm, j)

        alpha = params.alpha_init
        accepted = None
        for _ in range(params.max_backtracks):
            x_new = x + alpha * dx
            phase_new = retract(phase.phi + alpha * dphi)
            trial = value(x_new, phase_new)
            if trial <= current + params.armijo_c * alpha * slope:
                accepted = (x_new, phase_new, trial)
                break
            alpha *= params.step_shrink

        if accepted is None:
            logger.debug("Búsqueda lineal agotada en la iteración %s (||grad||=%.3e)", j, grad_norm)
            return InnerResult(x, phase, grad_norm, j, stalled=True)

        prev = (gx, gphi, dx, dphi, phase)
        x, phase, current = accepted
        gx, gphi = gradients(x, phase)
        j += 1


def initial_point(rng: Rng, m: int, n: int) -> tuple[CVec, PhaseVector]:
    """Punto inicial aleatorio: theta ~ U(-pi, pi], X ~ CN(0, I/M) dentro de la bola unitaria."""

    # uniform da [-pi, pi); al negar queda (-pi, pi]
    theta = -rng.uniform(-np.pi, np.pi, n)
    x = gaussian_complex(rng, m, 1)[:, 0] / np.sqrt(m)
    norm = float(np.linalg.norm(x))
    if norm > 1.0:
        x = x / norm
    return x, PhaseVector.from_angles(theta)


def alm_solve(
    ch: RisChannel,
    target,
    start: tuple | None = None,
    params: AlmParams | None = None,
    *,
    rng: Rng | None = None,
    fixed_x: bool = False,
    delta: float = DEFAULT_DELTA,
    on_outer: Callable[[dict], None] | None = None,
) -> SlpSolution:
    """Lagrangiano aumentado para min f(X, Phi) s.a. ||X||^2 <= 1, |Phi_i| = 1.

    ``stalled`` queda en True si cualquiera de las resoluciones internas
    agotó la búsqueda lineal, aunque las siguientes hayan avanzado.
    """

    params = params or AlmParams()
    target = as_cvec(target, name="target")
    check_length(target, ch.k, name="target")

    if start is None:
        if rng is None:
            raise ArgumentError("Se requiere un punto inicial o un generador aleatorio")
        start = initial_point(rng, ch.m, ch.n)
    x0, phase0 = start
    x0 = as_cvec(x0, name="X")
    check_length(x0, ch.m, name="X")
    check_length(phase0.phi, ch.n, name="Phi")

    if not fixed_x and not np.any(target):
        return SlpSolution(
            x=np.zeros(ch.m, dtype=np.complex128),
            phase=phase0,
            residual=0.0,
            feasible=True,
            outer_iters=0,
            inner_iters=0,
            stop_reason=STOP_ZERO_TARGET,
        )

    state = SolverState(x=x0, phase=phase0, lam=params.lambda0, rho=params.rho0, eps=params.eps0)
    stop_reason = STOP_MAX_OUTER
    stalled = False

    for k in range(params.max_outer_iters):
        inner = rcg_solve(
            ch, target, (state.x, state.phase), state.lam, state.rho, state.eps, params, fixed_x=fixed_x
        )
        state.inner_iter += inner.iters
        state.outer_iter = k + 1
        stalled = stalled or inner.stalled

        x_norm2 = float(np.real(np.vdot(inner.x, inner.x)))
        dist = float(
            np.real(np.vdot(inner.x - state.x, inner.x - state.x))
            + np.real(np.vdot(inner.phase.phi - state.phase.phi, inner.phase.phi - state.phase.phi))
        )

        record = {
            "k": k,
            "residual": math.sqrt(objective(ch, target, inner.x, inner.phase)),
            "x_norm2": x_norm2,
            "lambda": state.lam,
            "rho": state.rho,
            "eps": state.eps,
            "inner_iters": inner.iters,
        }
        logger.debug("ALM %s", record)
        if on_outer is not None:
            on_outer(record)

        converged = dist < params.d_min and state.eps <= params.eps_min
        state.x, state.phase = inner.x, inner.phase
        if converged:
            stop_reason = STOP_CONVERGED
            break

        sigma = max(x_norm2 - 1.0, -state.lam / state.rho)
        lam_next = clip(state.lam + state.rho * (x_norm2 - 1.0), 0.0, params.lambda_max)
        state.eps = max(params.eps_min, params.theta_eps * state.eps)
        if k > 0 and state.sigma_viol is not None and abs(sigma) > params.theta_sigma * abs(state.sigma_viol):
            state.rho *= params.theta_rho
        state.lam = lam_next
        state.sigma_viol = sigma

    x = state.x
    x_norm2 = float(np.real(np.vdot(x, x)))
    if not fixed_x and x_norm2 > 1.0:
        x = x / math.sqrt(x_norm2)

    residual = math.sqrt(objective(ch, target, x, state.phase))
    return SlpSolution(
        x=x,
        phase=state.phase,
        residual=residual,
        feasible=bool(residual < delta),
        outer_iters=state.outer_iter,
        inner_iters=state.inner_iter,
        stop_reason=stop_reason,
        stalled=stalled,
    )
