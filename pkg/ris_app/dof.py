"""Grados de libertad (DoF) en forma cerrada y regiones DoF del canal de acceso múltiple.

Todos los valores son racionales exactos (``Fraction``) con denominador 1 o 2.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exceptions import ArgumentError

HALF = Fraction(1, 2)

KIND_NONCOHERENT = "noncoherent-magnitude"
KIND_CONSTANT_ENVELOPE = "constant-envelope"

SHAPE_PENTAGON = "pentagon"
SHAPE_RECTANGLE = "rectangle"
SHAPE_SIMPLEX = "simplex"
SHAPE_TRAPEZOID = "trapezoid"


@dataclass(frozen=True)
class DofSpec:
    m: int
    n: int
    k: int
    r: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.k < 1:
            raise ArgumentError(f"Dimensiones deben ser positivas: M={self.m}, N={self.n}, K={self.k}")
        if self.r < 0:
            raise ArgumentError("El rango r del camino directo no puede ser negativo")
        if self.r > min(self.m, self.k):
            raise ArgumentError(f"r={self.r} excede min(M, K)={min(self.m, self.k)}")


@dataclass(frozen=True)
class Constraint:
    """Semiplano a·DoF_X + b·DoF_Theta <= c."""

    a: Fraction
    b: Fraction
    c: Fraction

    def holds(self, x: Fraction, y: Fraction) -> bool:
        return self.a * x + self.b * y <= self.c

    def tight(self, x: Fraction, y: Fraction) -> bool:
        return self.a * x + self.b * y == self.c


@dataclass(frozen=True)
class DofRegion:
    constraints: tuple[Constraint, ...]
    vertices: tuple[tuple[Fraction, Fraction], ...]

    @property
    def x_bound(self) -> Fraction:
        return self.constraints[0].c

    @property
    def theta_bound(self) -> Fraction:
        return self.constraints[1].c

    @property
    def sum_bound(self) -> Fraction:
        return self.constraints[2].c

    def to_dict(self) -> dict:
        return {
            "constraints": [{"a": float(c.a), "b": float(c.b), "c": float(c.c)} for c in self.constraints],
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dof_x", "dof_theta"])
        for x, y in self.vertices:
            writer.writerow([_fmt(x), _fmt(y)])
        return buf.getvalue()


def _fmt(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else str(float(value))


def format_dof(value: Fraction) -> str:
    return _fmt(Fraction(value))


def _joint_terms(spec: DofSpec) -> list[tuple[str, Fraction]]:
    # Orden de preferencia de la etiqueta cuando hay empate.
    if spec.r == 0:
        return [
            ("receiver-limited: K", Fraction(spec.k)),
            ("RIS-limited: N", Fraction(spec.n)),
            ("transmit-limited: M+N/2-1/2", spec.m + HALF * spec.n - HALF),
        ]
    return [
        ("receiver-limited: K", Fraction(spec.k)),
        ("RIS-limited: N+r", Fraction(spec.n + spec.r)),
        ("transmit-limited: M+N/2", spec.m + HALF * spec.n),
    ]


def dof_joint(spec: DofSpec) -> Fraction:
    return min(value for _, value in _joint_terms(spec))


def binding_constraint(spec: DofSpec) -> str:
    best = dof_joint(spec)
    return next(label for label, value in _joint_terms(spec) if value == best)


def dof_phase_only(spec: DofSpec) -> Fraction:
    return min(HALF * spec.n, Fraction(spec.k))


def binding_constraint_phase_only(spec: DofSpec) -> str:
    return "receiver-limited: K" if spec.k <= HALF * spec.n else "RIS-limited: N/2"


def effective_transmit_dimension(m: int, n: int, r: int = 0) -> Fraction:
    base = m + HALF * n
    return base if r > 0 else base - HALF


def _intersection(c1: Constraint, c2: Constraint) -> tuple[Fraction, Fraction] | None:
    det = c1.a * c2.b - c2.a * c1.b
    if det == 0:
        return None
    x = (c1.c * c2.b - c2.c * c1.b) / det
    y = (c1.a * c2.c - c2.a * c1.c) / det
    return x, y


def dof_region(spec: DofSpec) -> DofRegion:
    m, n, k, r = spec.m, spec.n, spec.k, spec.r
    one, zero = Fraction(1), Fraction(0)
    constraints = (
        Constraint(one, zero, Fraction(min(m, n + r, k))),
        Constraint(zero, one, min(HALF * n, Fraction(k))),
        Constraint(one, one, dof_joint(spec)),
        Constraint(-one, zero, zero),
        Constraint(zero, -one, zero),
    )

    points: set[tuple[Fraction, Fraction]] = set()
    for c1, c2 in combinations(constraints, 2):
        point = _intersection(c1, c2)
        if point is not None and all(c.holds(*point) for c in constraints):
            points.add(point)

    origin = (zero, zero)
    rest = sorted(
        (p for p in points if p != origin),
        key=lambda p: math.atan2(float(p[1]), float(p[0])),
    )
    return DofRegion(constraints=constraints, vertices=(origin, *rest))


def region_shape(region: DofRegion) -> str:
    cx, ct, cs = region.x_bound, region.theta_bound, region.sum_bound
    if cs >= cx + ct:
        return SHAPE_RECTANGLE
    if cs <= min(cx, ct):
        return SHAPE_SIMPLEX
    if len(region.vertices) == 5:
        return SHAPE_PENTAGON
    return SHAPE_TRAPEZOID


def siso_rate_approx(kind: str, snr: float, x_magnitude: float = 1.0) -> float:
    """Aproximaciones de alta SNR para el caso SISO (bits, log base 2).

    noncoherent-magnitude: 1/2 log(P/sigma^2) - 0.69
    constant-envelope:     1/2 log(P|X|^2/sigma^2) + 1.1
    """

    if snr <= 0:
        raise ArgumentError("La SNR debe ser positiva")
    if kind == KIND_NONCOHERENT:
        return 0.5 * math.log2(snr) - 0.69
    if kind == KIND_CONSTANT_ENVELOPE:
        if x_magnitude <= 0:
            raise ArgumentError("|X| debe ser positivo")
        return 0.5 * math.log2(snr * x_magnitude**2) + 1.1
    raise ArgumentError(f"Tipo desconocido: {kind!r}")


def expected_transition(m: int, k: int, direct: bool) -> int:
    """N donde se espera la mediana de la transición de factibilidad."""

    if k < m:
        raise ArgumentError(f"K={k} < M={m}: el canal ya es de rango completo, no hay transición")
    return 2 * k - 2 * m if direct else 2 * k - 2 * m + 1
