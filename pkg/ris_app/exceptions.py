from __future__ import annotations


class RisError(Exception):
    """Error base de la librería (canal, variedad, solver, DoF, harness)."""


class DimensionError(RisError, ValueError):
    """Dimensiones no conformes entre matrices/vectores."""


class ArgumentError(RisError, ValueError):
    """Argumento fuera de su dominio (p.ej. clip con lo > hi, K < M)."""


class DegenerateRetractionError(RisError, ArithmeticError):
    """Alguna componente a retraer tiene módulo prácticamente nulo."""

    def __init__(self, index: int, modulus: float):
        self.index = index
        self.modulus = modulus
        super().__init__(
            f"Retracción degenerada: |v[{index}]| = {modulus:.3e} está por debajo del mínimo permitido."
        )


class ConstellationSizeError(RisError):
    """La constelación supera el tope configurado para búsqueda exhaustiva."""


class PercentileRangeError(RisError):
    """El nivel pedido no queda acotado por el rango de N disponible."""
