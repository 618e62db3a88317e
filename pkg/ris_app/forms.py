from __future__ import annotations

from django import forms
from django.conf import settings

from .exceptions import ArgumentError
from .harness import KIND_FEASGRID, KIND_PERCENTILES, KIND_TRANSITION, ExperimentConfig
from .optimizer import AlmParams

DIRECT_NO = "false"
DIRECT_YES = "true"
DIRECT_BOTH = "both"


class ListField(forms.Field):
    """Lista de números: acepta una lista JSON o un texto separado por comas ("4,6,8")."""

    item_type = float
    item_label = "número"

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if isinstance(value, str):
            items = [v.strip() for v in value.split(",") if v.strip()]
        elif isinstance(value, (list, tuple)):
            items = list(value)
        else:
            items = [value]
        try:
            return [self._convert(item) for item in items]
        except (TypeError, ValueError, OverflowError):
            raise forms.ValidationError(f"Cada elemento debe ser un {self.item_label}.", code="invalid")

    def _convert(self, item):
        if isinstance(item, bool):
            raise TypeError(item)
        return self.item_type(item)


class IntegerListField(ListField):
    item_label = "entero"

    def _convert(self, item):
        value = super()._convert(item)
        if float(value) != int(value):
            raise ValueError(item)
        return int(value)


def _direct_value(value) -> str:
    if isinstance(value, bool):
        return DIRECT_YES if value else DIRECT_NO
    return str(value).strip().lower()


def kind_defaults(kind: str) -> dict:
    common = {
        "sigma2": 1.0,
        "trials": getattr(settings, "RIS_DEFAULT_TRIALS", 200),
        "delta": getattr(settings, "RIS_FEASIBILITY_DELTA", 1e-3),
        "restarts": getattr(settings, "RIS_RESTARTS", 4),
        "seed": 0,
        "threads": 1,
        "levels": [0.2, 0.5, 0.8],
        "solver": {},
        "direct": DIRECT_NO,
    }
    if kind == KIND_FEASGRID:
        # Región factible: P=1, rejilla 81x81 sobre [-1.5, 1.5]^2.
        common.update({"m": 2, "n": 5, "k": 4, "p": 1.0, "grid_res": 81, "grid_extent": 1.5})
    else:
        common.update({"m": 2, "k": 4, "n_min": 2, "n_max": 8, "p": 10.0})
    return common


class ExperimentConfigForm(forms.Form):
    KIND_CHOICES = [
        (KIND_FEASGRID, "Región factible"),
        (KIND_TRANSITION, "Transición de fase"),
        (KIND_PERCENTILES, "Tabla de percentiles"),
    ]
    DIRECT_CHOICES = [
        (DIRECT_NO, "Sin camino directo"),
        (DIRECT_YES, "Con camino directo"),
        (DIRECT_BOTH, "Ambos"),
    ]

    kind = forms.ChoiceField(label="Experimento", choices=KIND_CHOICES)
    m = forms.IntegerField(label="Antenas de transmisión (M)", min_value=1)
    n = forms.IntegerField(label="Elementos RIS (N)", min_value=1, required=False)
    k = forms.IntegerField(label="Antenas de recepción (K)", min_value=1, required=False)
    n_min = forms.IntegerField(label="N mínimo", min_value=1, required=False)
    n_max = forms.IntegerField(label="N máximo", min_value=1, required=False)
    k_list = IntegerListField(label="Lista de K", required=False)
    direct = forms.ChoiceField(label="Camino directo", choices=DIRECT_CHOICES)
    p = forms.FloatField(label="Potencia de transmisión (P)", min_value=0.0)
    sigma2 = forms.FloatField(label="Varianza de ruido", min_value=0.0)
    trials = forms.IntegerField(label="Ensayos por punto", min_value=1)
    grid_res = forms.IntegerField(label="Resolución de la rejilla", min_value=2, required=False)
    grid_extent = forms.FloatField(label="Semiancho de la rejilla", min_value=0.0, required=False)
    delta = forms.FloatField(label="Umbral de factibilidad", min_value=0.0)
    restarts = forms.IntegerField(label="Arranques aleatorios", min_value=1)
    seed = forms.IntegerField(label="Semilla maestra", min_value=0)
    threads = forms.IntegerField(label="Hilos", min_value=1)
    levels = ListField(label="Niveles de percentil", required=False)
    solver = forms.JSONField(label="Parámetros del solver", required=False)
    input = forms.CharField(label="CSV de transición (percentiles)", required=False)

    @classmethod
    def for_kind(cls, kind: str, values: dict) -> "ExperimentConfigForm":
        """Formulario ligado a los valores ya fusionados, completando los defaults del experimento."""

        data = kind_defaults(kind)
        data.update({key: value for key, value in values.items() if value is not None})
        data["kind"] = kind
        data["direct"] = _direct_value(data.get("direct", DIRECT_NO))
        return cls(data=data)

    def clean_delta(self):
        delta = self.cleaned_data["delta"]
        if delta <= 0:
            raise forms.ValidationError("El umbral debe ser positivo.")
        return delta

    def clean_levels(self):
        levels = self.cleaned_data.get("levels") or []
        for level in levels:
            if not 0.0 < level <= 1.0:
                raise forms.ValidationError("Los niveles deben estar en (0, 1].")
        return sorted(levels)

    def clean_solver(self):
        solver = self.cleaned_data.get("solver") or {}
        if not isinstance(solver, dict):
            raise forms.ValidationError("El bloque solver debe ser un objeto JSON.")
        try:
            AlmParams.from_dict(solver)
        except ArgumentError as exc:
            raise forms.ValidationError(str(exc))
        return solver

    def clean(self):
        cleaned = super().clean()
        kind = cleaned.get("kind")
        if kind == KIND_FEASGRID:
            for name in ("n", "k", "grid_res", "grid_extent"):
                if cleaned.get(name) is None:
                    self.add_error(name, "Requerido para la región factible.")
            if cleaned.get("direct") == DIRECT_BOTH:
                self.add_error("direct", "La región factible usa un único canal: elija true o false.")
            if cleaned.get("grid_extent") is not None and cleaned["grid_extent"] <= 0:
                self.add_error("grid_extent", "Debe ser positivo.")
        elif kind in (KIND_TRANSITION, KIND_PERCENTILES):
            n_min, n_max = cleaned.get("n_min"), cleaned.get("n_max")
            if n_min is None or n_max is None:
                self.add_error("n_min", "Requerido junto con n_max.")
            elif n_min > n_max:
                self.add_error("n_max", "El rango de N está vacío (n_min > n_max).")
            k_list = cleaned.get("k_list") or ([cleaned["k"]] if cleaned.get("k") else [])
            if not k_list or any(k < 1 for k in k_list):
                self.add_error("k_list", "Indique al menos un K positivo.")
            cleaned["k_list"] = sorted(set(k_list))
            if kind == KIND_PERCENTILES and not cleaned.get("levels"):
                self.add_error("levels", "Indique al menos un nivel.")
        return cleaned

    def to_config(self) -> ExperimentConfig:
        data = self.cleaned_data
        directs = {
            DIRECT_NO: (False,),
            DIRECT_YES: (True,),
            DIRECT_BOTH: (False, True),
        }[data["direct"]]
        base = {
            "kind": data["kind"],
            "m": data["m"],
            "directs": directs,
            "p": data["p"],
            "sigma2": data["sigma2"],
            "trials": data["trials"],
            "delta": data["delta"],
            "restarts": data["restarts"],
            "seed": data["seed"],
            "threads": data["threads"],
            "levels": tuple(data.get("levels") or ()),
            "solver": dict(data.get("solver") or {}),
        }
        if data["kind"] == KIND_FEASGRID:
            base.update(
                n=data["n"],
                k=data["k"],
                k_list=(data["k"],),
                grid_res=data["grid_res"],
                grid_extent=data["grid_extent"],
            )
        else:
            base.update(n_min=data["n_min"], n_max=data["n_max"], k_list=tuple(data["k_list"]))
        return ExperimentConfig(**base)

    def effective(self) -> dict:
        """Configuración efectiva (serializable) que se imprime y guarda en el sidecar."""

        data = dict(self.cleaned_data)
        if data["kind"] == KIND_FEASGRID:
            for name in ("n_min", "n_max", "k_list"):
                data.pop(name, None)
        else:
            for name in ("n", "k", "grid_res", "grid_extent"):
                data.pop(name, None)
        if not data.get("input"):
            data.pop("input", None)
        data["solver_params"] = AlmParams.from_dict(data.get("solver") or {}).to_dict()
        return data
