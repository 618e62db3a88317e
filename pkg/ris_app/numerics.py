"""Aritmética compleja densa, SVD y generación aleatoria determinista.

Los vectores (CVec) y matrices (CMat) son arreglos numpy complex128. Al
guardarlos dentro de objetos del dominio se congelan (``writeable=False``)
para que sus dimensiones y contenido no cambien después de construidos.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from .exceptions import ArgumentError, DimensionError


CVec = npt.NDArray[np.complex128]
CMat = npt.NDArray[np.complex128]

DEFAULT_RANK_TOL = 1e-10


class Rng:
    """Generador reproducible identificado por (semilla maestra, stream).

    El stream es una tupla de enteros (p.ej. ``(K, N, trial)``) que se pasa
    como ``spawn_key`` a ``SeedSequence``: streams distintos son
    independientes y no dependen del orden en que se crean.
    """

    def __init__(self, seed: int, stream: Sequence[int] | int = ()):
        if isinstance(stream, int):
            stream = (stream,)
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def child(self, *keys: int) -> "Rng":
        return Rng(self.seed, (*self.stream, *keys))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def normal(self, size, scale: float = 1.0) -> np.ndarray:
        return self._gen.normal(0.0, scale, size=size)

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        return self._gen.uniform(low, high, size=size)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream={self.stream})"


def as_cvec(values: Iterable | np.ndarray, *, name: str = "vector") -> CVec:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionError(f"{name}: se esperaba un vector, forma recibida {arr.shape}")
    return arr


def as_cmat(values: Iterable | np.ndarray, *, name: str = "matrix") -> CMat:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name}: se esperaba una matriz, forma recibida {arr.shape}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def check_length(vec: np.ndarray, expected: int, *, name: str) -> None:
    if vec.ndim != 1 or vec.shape[0] != expected:
        raise DimensionError(f"{name}: longitud esperada {expected}, recibida {vec.shape}")


def gaussian_complex(rng: Rng, rows: int, cols: int) -> CMat:
    """Matriz rows×cols con entradas i.i.d. CN(0, 1)."""

    if rows < 1 or cols < 1:
        raise DimensionError(f"Dimensiones inválidas para CN(0,1): {rows}x{cols}")
    real = rng.normal((rows, cols))
    imag = rng.normal((rows, cols))
    return (real + 1j * imag) / np.sqrt(2.0)


def svd(a: CMat) -> tuple[CMat, np.ndarray, CMat]:
    """SVD económica ``a = U @ diag(s) @ V`` con ``s`` descendente.

    ``V`` tiene filas ortonormales (es la ``Vh`` de numpy).
    """

    a = as_cmat(a, name="svd")
    if a.size == 0:
        k = min(a.shape)
        return (
            np.zeros((a.shape[0], k), dtype=np.complex128),
            np.zeros(k),
            np.zeros((k, a.shape[1]), dtype=np.complex128),
        )
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh


def numeric_rank(singular_values: Sequence[float] | np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    if tol <= 0:
        raise ArgumentError("La tolerancia de rango debe ser positiva")
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0:
        return 0
    smax = float(np.max(s))
    if smax <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol * smax))
