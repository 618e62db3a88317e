"""Geometría del producto de N círculos complejos {z : |z| = 1}.

La métrica es el producto interno euclidiano real del espacio ambiente.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import PhaseVector
from .exceptions import ArgumentError, DegenerateRetractionError, DimensionError
from .numerics import CVec, as_cvec, check_length

MIN_RETRACTION_MODULUS = 1e-14


@dataclass(frozen=True, eq=False)
class TangentVec:
    """Vector z del espacio tangente en ``base``: Re{z_i conj(Phi_i)} = 0."""

    base: PhaseVector
    z: CVec

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.z))

    def scaled(self, alpha: float) -> "TangentVec":
        return TangentVec(self.base, alpha * self.z)


def project_tangent(phase: PhaseVector, z) -> TangentVec:
    z = as_cvec(z, name="z")
    check_length(z, phase.n, name="z")
    normal = np.real(z * np.conj(phase.phi))
    return TangentVec(phase, z - normal * phase.phi)


def retract(v) -> PhaseVector:
    v = as_cvec(v, name="v")
    modulus = np.abs(v)
    if modulus.size:
        idx = int(np.argmin(modulus))
        if modulus[idx] < MIN_RETRACTION_MODULUS:
            raise DegenerateRetractionError(idx, float(modulus[idx]))
    return PhaseVector.from_unit(v / modulus)


def transport(phase_from: PhaseVector, phase_to: PhaseVector, d: TangentVec) -> TangentVec:
    # Proyección sobre el tangente de destino; no es una isometría.
    if phase_from.n != phase_to.n:
        raise DimensionError(f"Transporte entre variedades de tamaño {phase_from.n} y {phase_to.n}")
    return project_tangent(phase_to, d.z)


def _same_base(a: PhaseVector, b: PhaseVector) -> bool:
    return a is b or (a.n == b.n and np.array_equal(a.phi, b.phi))


def inner(a: TangentVec, b: TangentVec) -> float:
    if not _same_base(a.base, b.base):
        raise ArgumentError("Producto interno entre vectores de espacios tangentes distintos")
    return float(np.real(np.vdot(b.z, a.z)))
