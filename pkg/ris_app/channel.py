"""Modelo de canal MIMO asistido por RIS.

    Y = sqrt(P) * (H diag(Phi) G + F) X + Z

H es K×N (RIS -> receptor), G es N×M (transmisor -> RIS) y F es K×M (camino
directo; F = 0 significa que no hay camino directo).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ArgumentError, DimensionError
from .numerics import (
    DEFAULT_RANK_TOL,
    CMat,
    CVec,
    Rng,
    as_cmat,
    as_cvec,
    check_length,
    frozen,
    gaussian_complex,
    numeric_rank,
    svd,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RisChannel:
    h: CMat
    g: CMat
    f: CMat
    power: float = 1.0
    noise_variance: float = 1.0

    def __post_init__(self):
        h = as_cmat(self.h, name="H")
        g = as_cmat(self.g, name="G")
        f = as_cmat(self.f, name="F")
        if h.shape[1] != g.shape[0]:
            raise DimensionError(f"H tiene {h.shape[1]} columnas pero G tiene {g.shape[0]} filas")
        if f.shape != (h.shape[0], g.shape[1]):
            raise DimensionError(f"F debe ser {h.shape[0]}x{g.shape[1]}, recibido {f.shape}")
        if self.power < 0:
            raise ArgumentError("La potencia P no puede ser negativa")
        if self.noise_variance < 0:
            raise ArgumentError("La varianza de ruido no puede ser negativa")
        object.__setattr__(self, "h", frozen(h))
        object.__setattr__(self, "g", frozen(g))
        object.__setattr__(self, "f", frozen(f))
        object.__setattr__(self, "power", float(self.power))
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

    @property
    def m(self) -> int:
        return self.g.shape[1]

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def k(self) -> int:
        return self.h.shape[0]

    @property
    def has_direct_path(self) -> bool:
        return bool(np.any(self.f != 0))

    @property
    def amplitude(self) -> float:
        return float(np.sqrt(self.power))

    def cascaded(self, phase: "PhaseVector") -> CMat:
        """Matriz H diag(Phi) G + F (sin el factor sqrt(P))."""

        check_length(phase.phi, self.n, name="Phi")
        return (self.h * phase.phi[np.newaxis, :]) @ self.g + self.f


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Configuración de la RIS: ángulos theta y su forma fasorial Phi."""

    theta: np.ndarray
    phi: CVec = field(repr=False)

    @classmethod
    def from_angles(cls, theta) -> "PhaseVector":
        theta = np.array(theta, dtype=float, ndmin=1)
        if theta.ndim != 1:
            raise DimensionError("theta debe ser un vector")
        theta.setflags(write=False)
        return cls(theta=theta, phi=frozen(np.exp(1j * theta)))

    @classmethod
    def from_unit(cls, phi) -> "PhaseVector":
        """Construye desde fasores ya normalizados (p.ej. salida de la retracción)."""

        phi = as_cvec(phi, name="Phi")
        theta = np.angle(phi)
        theta.setflags(write=False)
        return cls(theta=theta, phi=frozen(phi))

    @classmethod
    def ones(cls, n: int) -> "PhaseVector":
        return cls.from_angles(np.zeros(n))

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    def with_fixed_tail(self, r: int) -> "PhaseVector":
        """Agrega r elementos fijos en fase 0 (bloque identidad del canal absorbido)."""

        if r <= 0:
            return self
        return PhaseVector.from_unit(np.concatenate([self.phi, np.ones(r, dtype=np.complex128)]))


def apply(ch: RisChannel, phase: PhaseVector, x, noise=None) -> CVec:
    x = as_cvec(x, name="X")
    check_length(x, ch.m, name="X")
    check_length(phase.phi, ch.n, name="Phi")
    y = ch.amplitude * (ch.h @ (phase.phi * (ch.g @ x)) + ch.f @ x)
    if noise is not None:
        noise = as_cvec(noise, name="noise")
        check_length(noise, ch.k, name="noise")
        y = y + noise
    return y


def effective_channel(ch: RisChannel, x) -> CMat:
    """Canal equivalente H diag(G X), lineal en Phi."""

    x = as_cvec(x, name="X")
    check_length(x, ch.m, name="X")
    return ch.h * (ch.g @ x)[np.newaxis, :]


def absorb_direct_path(ch: RisChannel, tol: float = DEFAULT_RANK_TOL) -> tuple[RisChannel, int]:
    """Absorbe F = U S V en una RIS de N + r elementos con los últimos r fijos.

    H' = [H, U_r S_r] y G' = [G; V_r], de modo que
    H' diag([Phi; 1_r]) G' = H diag(Phi) G + F.
    """

    u, s, v = svd(ch.f)
    r = numeric_rank(s, tol)
    if r == 0:
        return ch, 0
    h_ext = np.hstack([ch.h, u[:, :r] * s[np.newaxis, :r]])
    g_ext = np.vstack([ch.g, v[:r, :]])
    absorbed = RisChannel(
        h=h_ext,
        g=g_ext,
        f=np.zeros_like(ch.f),
        power=ch.power,
        noise_variance=ch.noise_variance,
    )
    logger.debug("Camino directo absorbido: rango r=%s, N'=%s", r, absorbed.n)
    return absorbed, r


def sample_channel(
    rng: Rng,
    m: int,
    n: int,
    k: int,
    *,
    direct_path: bool = False,
    power: float = 1.0,
    noise_variance: float = 1.0,
) -> RisChannel:
    """Canal Rayleigh i.i.d. CN(0,1); F = 0 si no hay camino directo."""

    h = gaussian_complex(rng, k, n)
    g = gaussian_complex(rng, n, m)
    f = gaussian_complex(rng, k, m) if direct_path else np.zeros((k, m), dtype=np.complex128)
    return RisChannel(h=h, g=g, f=f, power=power, noise_variance=noise_variance)


def sample_noise(rng: Rng, k: int, noise_variance: float) -> CVec:
    if noise_variance <= 0:
        return np.zeros(k, dtype=np.complex128)
    return np.sqrt(noise_variance) * gaussian_complex(rng, k, 1)[:, 0]


def _pairs(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _from_pairs(pairs, shape: tuple[int, ...], *, name: str) -> np.ndarray:
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in pairs], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"{name}: se esperaban pares [re, im]") from exc
    if arr.size != int(np.prod(shape)):
        raise DimensionError(f"{name}: {arr.size} entradas, se esperaban {int(np.prod(shape))}")
    return arr.reshape(shape)


def vector_to_pairs(vec) -> list[list[float]]:
    return _pairs(as_cvec(vec))


def vector_from_pairs(pairs, *, name: str = "vector") -> CVec:
    return _from_pairs(pairs, (len(pairs),), name=name)


def channel_to_dict(ch: RisChannel) -> dict:
    return {
        "m": ch.m,
        "n": ch.n,
        "k": ch.k,
        "h": _pairs(ch.h),
        "g": _pairs(ch.g),
        "f": _pairs(ch.f),
        "p": ch.power,
        "sigma2": ch.noise_variance,
    }


def channel_from_dict(data: dict) -> RisChannel:
    try:
        m, n, k = int(data["m"]), int(data["n"]), int(data["k"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError("El canal JSON requiere m, n y k enteros") from exc
    f_pairs = data.get("f")
    f = _from_pairs(f_pairs, (k, m), name="F") if f_pairs else np.zeros((k, m), dtype=np.complex128)
    return RisChannel(
        h=_from_pairs(data.get("h") or [], (k, n), name="H"),
        g=_from_pairs(data.get("g") or [], (n, m), name="G"),
        f=f,
        power=float(data.get("p", 1.0)),
        noise_variance=float(data.get("sigma2", 1.0)),
    )
