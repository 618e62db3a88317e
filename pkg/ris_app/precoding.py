"""Precodificación a nivel de símbolo (conjunta o solo fases) y decodificación ML."""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from django.conf import settings

from .channel import (
    PhaseVector,
    RisChannel,
    apply,
    channel_from_dict,
    channel_to_dict,
    vector_from_pairs,
    vector_to_pairs,
)
from .exceptions import ArgumentError, ConstellationSizeError, DimensionError
from .numerics import CVec, Rng, as_cvec, check_length
from .optimizer import (
    DEFAULT_DELTA,
    STOP_ZERO_TARGET,
    AlmParams,
    SlpSolution,
    alm_solve,
    initial_point,
)

logger = logging.getLogger(__name__)

MODE_JOINT = "joint"
MODE_PHASE_ONLY = "phase-only"
MODES = (MODE_JOINT, MODE_PHASE_ONLY)

DEFAULT_RESTARTS = 4
DEFAULT_DECODE_CAP = 2**20
TIE_RTOL = 1e-12


def feasibility_delta() -> float:
    return float(getattr(settings, "RIS_FEASIBILITY_DELTA", DEFAULT_DELTA))


@dataclass(frozen=True, eq=False)
class SlpProblem:
    channel: RisChannel
    target: CVec
    mode: str = MODE_JOINT
    fixed_x: CVec | None = None

    def __post_init__(self):
        target = as_cvec(self.target, name="target")
        check_length(target, self.channel.k, name="target")
        object.__setattr__(self, "target", target)
        if self.mode not in MODES:
            raise ArgumentError(f"Modo desconocido: {self.mode!r} (use {' | '.join(MODES)})")
        if self.mode == MODE_PHASE_ONLY:
            if self.fixed_x is None:
                raise ArgumentError("El modo phase-only requiere un X fijo")
            x = as_cvec(self.fixed_x, name="X")
            check_length(x, self.channel.m, name="X")
            if np.any(np.abs(self.channel.g @ x) == 0):
                raise ArgumentError("El modo phase-only requiere G·X sin componentes nulas")
            object.__setattr__(self, "fixed_x", x)

    @property
    def reduced_target(self) -> CVec:
        """Y - sqrt(P) F X para el subproblema en Phi (solo modo phase-only)."""

        return self.target - self.channel.amplitude * (self.channel.f @ self.fixed_x)


def _tag_restart(on_outer: Callable[[dict], None], attempt: int, record: dict) -> None:
    on_outer({**record, "restart": attempt})


def solve(
    problem: SlpProblem,
    params: AlmParams | None = None,
    restarts: int = DEFAULT_RESTARTS,
    rng: Rng | None = None,
    *,
    delta: float | None = None,
    on_outer: Callable[[dict], None] | None = None,
) -> SlpSolution:
    """Mejor solución (menor residuo) entre ``restarts`` arranques aleatorios.

    ``on_outer`` recibe el registro de cada iteración externa con la clave
    adicional ``restart``.
    """

    if restarts < 1:
        raise ArgumentError("restarts debe ser >= 1")
    rng = rng or Rng(0)
    delta = feasibility_delta() if delta is None else delta
    ch = problem.channel
    phase_only = problem.mode == MODE_PHASE_ONLY

    best: SlpSolution | None = None
    all_stalled = True
    for attempt in range(restarts):
        x0, phase0 = initial_point(rng.child(attempt), ch.m, ch.n)
        if phase_only:
            x0 = problem.fixed_x
        callback = None
        if on_outer is not None:
            callback = functools.partial(_tag_restart, on_outer, attempt)
        sol = alm_solve(
            ch, problem.target, (x0, phase0), params, fixed_x=phase_only, delta=delta, on_outer=callback
        )
        all_stalled = all_stalled and sol.stalled
        if best is None or sol.residual < best.residual:
            best = sol
        if sol.stop_reason == STOP_ZERO_TARGET:
            break

    assert best is not None
    best = best.with_threshold(delta)
    if all_stalled and not best.feasible:
        logger.warning("Todos los arranques quedaron estancados (residuo=%.3e)", best.residual)
        return replace(best, stalled=True)
    return replace(best, stalled=False)


def is_feasible(sol: SlpSolution, delta: float = DEFAULT_DELTA) -> bool:
    if delta <= 0:
        raise ArgumentError("delta debe ser positivo")
    return bool(sol.residual < delta)


@dataclass(frozen=True, eq=False)
class Constellation:
    """Lista finita de pares candidatos (X, Phi)."""

    pairs: tuple

    def __post_init__(self):
        if not self.pairs:
            raise ArgumentError("La constelación no puede estar vacía")
        clean = []
        for x, phase in self.pairs:
            x = as_cvec(x, name="X")
            if float(np.real(np.vdot(x, x))) > 1.0 + 1e-12:
                raise ArgumentError("Todos los candidatos X deben cumplir ||X||^2 <= 1")
            if not isinstance(phase, PhaseVector):
                phase = PhaseVector.from_angles(phase)
            clean.append((x, phase))
        object.__setattr__(self, "pairs", tuple(clean))

    def __len__(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_alphabets(
        cls,
        x_alphabet,
        m: int,
        theta_alphabet,
        n: int,
        *,
        cap: int | None = None,
    ) -> "Constellation":
        """Producto de alfabetos por antena (símbolos) y por elemento (ángulos).

        El orden es lexicográfico con X por fuera: el índice de candidato es
        ``ix * |A_theta|^n + itheta``.
        """

        x_alphabet = list(as_cvec(x_alphabet, name="x_alphabet"))
        theta_alphabet = [float(t) for t in theta_alphabet]
        size = len(x_alphabet) ** m * len(theta_alphabet) ** n
        _check_cap(size, cap)
        xs = [np.array(combo, dtype=np.complex128) for combo in itertools.product(x_alphabet, repeat=m)]
        phases = [PhaseVector.from_angles(combo) for combo in itertools.product(theta_alphabet, repeat=n)]
        return cls(tuple((x, phase) for x in xs for phase in phases))


@dataclass(frozen=True, eq=False)
class DecodeResult:
    x: CVec
    phase: PhaseVector
    metric: float
    index: int
    tie: bool


def _check_cap(size: int, cap: int | None) -> None:
    cap = int(getattr(settings, "RIS_ML_DECODE_CAP", DEFAULT_DECODE_CAP)) if cap is None else cap
    if size > cap:
        raise ConstellationSizeError(
            f"La constelación tiene {size} pares; el máximo para búsqueda exhaustiva es {cap}"
        )


def ml_decode(ch: RisChannel, y, constellation: Constellation, *, cap: int | None = None) -> DecodeResult:
    """argmin ||Y - sqrt(P)(H diag(Phi) G + F) X||^2 sobre la constelación."""

    y = as_cvec(y, name="Y")
    check_length(y, ch.k, name="Y")
    _check_cap(len(constellation), cap)

    metrics = np.empty(len(constellation))
    for idx, (x, phase) in enumerate(constellation.pairs):
        if x.shape[0] != ch.m or phase.n != ch.n:
            raise DimensionError(f"Candidato {idx} no conforma con el canal")
        diff = y - apply(ch, phase, x)
        metrics[idx] = float(np.real(np.vdot(diff, diff)))

    best_metric = float(np.min(metrics))
    near = np.flatnonzero(metrics <= best_metric + TIE_RTOL * (1.0 + best_metric))
    index = int(near[0])
    x, phase = constellation.pairs[index]
    return DecodeResult(x=x, phase=phase, metric=float(metrics[index]), index=index, tie=bool(near.size > 1))


def problem_to_dict(problem: SlpProblem) -> dict:
    data = channel_to_dict(problem.channel)
    data["target"] = vector_to_pairs(problem.target)
    data["mode"] = problem.mode
    if problem.fixed_x is not None:
        data["x"] = vector_to_pairs(problem.fixed_x)
    return data


def problem_from_dict(data: dict) -> SlpProblem:
    channel = channel_from_dict(data)
    mode = data.get("mode", MODE_JOINT)
    fixed = data.get("x")
    return SlpProblem(
        channel=channel,
        target=vector_from_pairs(data.get("target") or [], name="target"),
        mode=mode,
        fixed_x=vector_from_pairs(fixed, name="X") if fixed is not None else None,
    )


def solution_to_dict(sol: SlpSolution) -> dict:
    return {
        "x": vector_to_pairs(sol.x),
        "theta": [float(t) for t in sol.phase.theta],
        "residual": sol.residual,
        "feasible": sol.feasible,
        "outer_iters": sol.outer_iters,
        "inner_iters": sol.inner_iters,
        "stop_reason": sol.stop_reason,
        "stalled": sol.stalled,
    }
