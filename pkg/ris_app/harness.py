"""Experimentos Monte-Carlo: región factible, transición de fase y tabla de percentiles.

Cada ensayo usa su propio stream ``Rng(seed, clave)``; los resultados se
agregan por clave y se ordenan antes de escribir, de modo que la salida no
depende del número de hilos.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .channel import sample_channel
from .dof import effective_transmit_dimension, expected_transition
from .exceptions import ArgumentError, PercentileRangeError
from .numerics import Rng
from .optimizer import AlmParams
from .precoding import SlpProblem, solve

logger = logging.getLogger(__name__)

KIND_FEASGRID = "feasgrid"
KIND_TRANSITION = "transition"
KIND_PERCENTILES = "percentiles"

# Prefijos de stream por tipo de sorteo.
STREAM_CHANNEL = 0
STREAM_TARGET = 1
STREAM_SOLVER = 2


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    m: int = 2
    n: int = 5
    k: int = 4
    n_min: int = 2
    n_max: int = 8
    k_list: tuple[int, ...] = (4,)
    directs: tuple[bool, ...] = (False,)
    p: float = 1.0
    sigma2: float = 1.0
    trials: int = 200
    grid_res: int = 81
    grid_extent: float = 1.5
    delta: float = 1e-3
    restarts: int = 4
    seed: int = 0
    threads: int = 1
    levels: tuple[float, ...] = (0.2, 0.5, 0.8)
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ArgumentError("trials debe ser >= 1")
        if self.grid_res < 2:
            raise ArgumentError("grid_res debe ser >= 2")
        if self.n_min > self.n_max or self.n_min < 1:
            raise ArgumentError("El rango de N está vacío")
        if not self.k_list:
            raise ArgumentError("k_list no puede estar vacía")
        if self.restarts < 1 or self.threads < 1:
            raise ArgumentError("restarts y threads deben ser >= 1")
        if self.delta <= 0:
            raise ArgumentError("delta debe ser positivo")

    @property
    def n_range(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def alm_params(self) -> AlmParams:
        return AlmParams.from_dict(self.solver)


def _run_items(func: Callable, items: Iterable, threads: int) -> list:
    items = list(items)
    if threads <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


@dataclass(frozen=True)
class GridPoint:
    re: float
    im: float
    residual: float
    feasible: bool
    stalled: bool = False


@dataclass
class FeasGridResult:
    n: int
    points: list[GridPoint]
    channel_stream: tuple[int, ...]

    def rows(self) -> list[tuple]:
        return [(p.re, p.im, p.residual, p.feasible) for p in self.points]

    @property
    def stalled(self) -> int:
        return sum(1 for p in self.points if p.stalled)

    def feasible_fraction(self, min_modulus: float = 0.0) -> float:
        selected = [p for p in self.points if abs(complex(p.re, p.im)) >= min_modulus]
        if not selected:
            return 0.0
        return sum(1 for p in selected if p.feasible) / len(selected)


def grid_axis(extent: float, resolution: int) -> np.ndarray:
    return np.linspace(-extent, extent, resolution)


def run_feasgrid(cfg: ExperimentConfig, params: AlmParams | None = None) -> FeasGridResult:
    """Región factible de y para Y = [y, ..., y] sobre un único canal muestreado."""

    params = params or cfg.alm_params()
    channel_stream = (STREAM_CHANNEL,)
    ch = sample_channel(
        Rng(cfg.seed, channel_stream),
        cfg.m,
        cfg.n,
        cfg.k,
        direct_path=cfg.directs[0],
        power=cfg.p,
        noise_variance=cfg.sigma2,
    )
    axis = grid_axis(cfg.grid_extent, cfg.grid_res)
    keys = [(i, j) for i in range(cfg.grid_res) for j in range(cfg.grid_res)]

    def work(key: tuple[int, int]) -> tuple[tuple[int, int], GridPoint]:
        i, j = key
        y = complex(axis[i], axis[j])
        problem = SlpProblem(channel=ch, target=np.full(cfg.k, y, dtype=np.complex128))
        sol = solve(problem, params, cfg.restarts, Rng(cfg.seed, (STREAM_SOLVER, i, j)), delta=cfg.delta)
        return key, GridPoint(float(axis[i]), float(axis[j]), float(sol.residual), sol.feasible, sol.stalled)

    logger.info(
        "feasgrid M=%s N=%s K=%s P=%s: %s puntos, M+N/2-1/2=%s",
        cfg.m,
        cfg.n,
        cfg.k,
        cfg.p,
        len(keys),
        effective_transmit_dimension(cfg.m, cfg.n),
    )
    results = dict(_run_items(work, keys, cfg.threads))
    points = [results[key] for key in sorted(results)]
    for i in range(cfg.grid_res):
        row = points[i * cfg.grid_res : (i + 1) * cfg.grid_res]
        logger.info(
            "feasgrid fila %s/%s (re=%.3f): %s factibles de %s",
            i + 1,
            cfg.grid_res,
            row[0].re,
            sum(1 for p in row if p.feasible),
            len(row),
        )
    return FeasGridResult(n=cfg.n, points=points, channel_stream=channel_stream)


@dataclass(frozen=True)
class TransitionRow:
    m: int
    k: int
    n: int
    direct: bool
    trials: int
    successes: int
    stalled: int = 0

    @property
    def prob(self) -> float:
        return self.successes / self.trials

    def as_csv(self) -> tuple:
        return (self.m, self.k, self.n, self.direct, self.trials, self.successes, self.prob)


@dataclass
class TransitionResult:
    rows: list[TransitionRow]

    @property
    def stalled(self) -> int:
        return sum(r.stalled for r in self.rows)

    @property
    def total_trials(self) -> int:
        return sum(r.trials for r in self.rows)

    def curve(self, k: int, direct: bool) -> list[tuple[int, float]]:
        return sorted((r.n, r.prob) for r in self.rows if r.k == k and r.direct == direct)

    def ks(self) -> list[int]:
        return sorted({r.k for r in self.rows})

    def directs(self) -> list[bool]:
        return sorted({r.direct for r in self.rows})


def _transition_trial(cfg: ExperimentConfig, params: AlmParams, key: tuple[int, int, int, int]):
    k, n, direct, trial = key
    rng = Rng(cfg.seed, key)
    ch = sample_channel(
        rng.child(STREAM_CHANNEL),
        cfg.m,
        n,
        k,
        direct_path=bool(direct),
        power=cfg.p,
        noise_variance=cfg.sigma2,
    )
    target = np.exp(1j * rng.child(STREAM_TARGET).uniform(-np.pi, np.pi, k))
    sol = solve(SlpProblem(channel=ch, target=target), params, cfg.restarts, rng.child(STREAM_SOLVER), delta=cfg.delta)
    return key, sol.feasible, sol.stalled


def run_transition(cfg: ExperimentConfig, params: AlmParams | None = None) -> TransitionResult:
    """Probabilidad de sintetizar Y (componentes en el círculo unitario) vs N."""

    params = params or cfg.alm_params()
    keys = [
        (k, n, int(direct), trial)
        for k in cfg.k_list
        for direct in cfg.directs
        for n in cfg.n_range
        for trial in range(cfg.trials)
    ]
    started = time.monotonic()
    outcomes = _run_items(lambda key: _transition_trial(cfg, params, key), keys, cfg.threads)

    counts: dict[tuple[int, int, int], list[int]] = {}
    for (k, n, direct, _trial), feasible, stalled in outcomes:
        bucket = counts.setdefault((k, n, direct), [0, 0, 0])
        bucket[0] += 1
        bucket[1] += int(feasible)
        bucket[2] += int(stalled)

    rows = []
    for (k, n, direct), (trials, successes, stalled) in sorted(counts.items()):
        rows.append(TransitionRow(cfg.m, k, n, bool(direct), trials, successes, stalled))
        logger.info("transition K=%s N=%s direct=%s: %s/%s", k, n, bool(direct), successes, trials)
        if stalled:
            logger.warning("transition K=%s N=%s direct=%s: %s ensayos estancados", k, n, bool(direct), stalled)
    rows.sort(key=lambda r: (r.k, r.direct, r.n))
    logger.info("transition terminada en %.1fs", time.monotonic() - started)
    return TransitionResult(rows=rows)


@dataclass(frozen=True)
class PercentileRow:
    k: int
    level: float
    n_first: int
    n_interp: float


def _crossing(curve: list[tuple[int, float]], level: float) -> tuple[int, float]:
    ns = [n for n, _ in curve]
    if not ns:
        raise PercentileRangeError("No hay datos de probabilidad para este K")
    if ns != list(range(ns[0], ns[0] + len(ns))):
        raise PercentileRangeError(f"El rango de N no es contiguo: {ns}")
    for idx, (n, prob) in enumerate(curve):
        if prob >= level:
            if prob == level:
                return n, float(n)
            if idx == 0:
                raise PercentileRangeError(f"El nivel {level} queda por debajo de N={n} (p={prob})")
            n_prev, p_prev = curve[idx - 1]
            return n, n_prev + (level - p_prev) / (prob - p_prev) * (n - n_prev)
    raise PercentileRangeError(f"El nivel {level} no se alcanza en N <= {ns[-1]}")


def percentile_table(
    result: TransitionResult,
    levels: Iterable[float],
    *,
    direct: bool | None = None,
) -> list[PercentileRow]:
    """N más pequeño con probabilidad >= nivel, por K y nivel (más el valor interpolado)."""

    available = result.directs()
    if not available:
        raise PercentileRangeError("La transición no tiene filas")
    if direct is None:
        direct = False if False in available else available[0]
    if direct not in available:
        raise PercentileRangeError(f"No hay filas con direct={direct}")
    rows = []
    for k in result.ks():
        curve = result.curve(k, direct)
        for level in sorted(levels):
            n_first, n_interp = _crossing(curve, level)
            rows.append(PercentileRow(k, float(level), n_first, float(n_interp)))
    return rows


def crossing_n(result: TransitionResult, k: int, direct: bool, level: float = 0.5) -> float:
    return _crossing(result.curve(k, direct), level)[1]


def theory_curves(m: int, ks: Iterable[int]) -> dict[str, list[list[int]]]:
    """Curvas teóricas N = 2K - 2M + 1 (sin camino directo) y 2K - 2M (con camino directo)."""

    ks = [k for k in ks if k >= m]
    return {
        "no_direct": [[k, expected_transition(m, k, False)] for k in ks],
        "direct": [[k, expected_transition(m, k, True)] for k in ks],
    }


def transition_from_rows(raw_rows: Iterable[dict]) -> TransitionResult:
    rows = []
    for raw in raw_rows:
        rows.append(
            TransitionRow(
                m=int(raw["m"]),
                k=int(raw["k"]),
                n=int(raw["n"]),
                direct=str(raw["direct"]).strip().lower() in {"1", "true", "yes"},
                trials=int(raw["trials"]),
                successes=int(raw["successes"]),
            )
        )
    rows.sort(key=lambda r: (r.k, r.direct, r.n))
    return TransitionResult(rows=rows)
