"""Base común de los comandos de experimentos (feasgrid, transition, percentiles).

Orden de precedencia: defaults del experimento < archivo ``--config`` < flags.
La configuración efectiva se imprime siempre en JSON antes de correr.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from .exceptions import RisError
from .forms import DIRECT_BOTH, DIRECT_NO, DIRECT_YES, ExperimentConfigForm, kind_defaults
from .harness import ExperimentConfig, TransitionResult
from .records import write_csv, write_metadata

logger = logging.getLogger(__name__)

# Fracción de ensayos estancados a partir de la cual la corrida termina con código 1.
STALL_EXIT_FRACTION = 0.5

CONFIG_ONLY_KEYS = {"out", "svg", "kind"}


@dataclass
class RunOutcome:
    header: tuple[str, ...]
    rows: list[tuple]
    trials_total: int
    stalled: int = 0
    meta: dict = field(default_factory=dict)
    render_svg: Callable[[Path], Path] | None = None
    transition: TransitionResult | None = None
    extra_csv: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)


def load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    config_path = Path(path)
    if not config_path.is_file():
        raise CommandError(f"No existe el archivo de configuración: {config_path}", returncode=2)
    try:
        data = json.loads(config_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CommandError(f"No se pudo leer {config_path}: {exc}", returncode=2)
    if not isinstance(data, dict):
        raise CommandError(f"{config_path}: se esperaba un objeto JSON", returncode=2)
    return {str(key).replace("-", "_"): value for key, value in data.items()}


def form_errors_text(form: ExperimentConfigForm) -> str:
    parts = []
    for name, errors in form.errors.items():
        parts.append(f"{name}: {' '.join(str(e) for e in errors)}")
    return "Configuración inválida: " + "; ".join(parts)


class ExperimentCommand(BaseCommand):
    kind: str = ""
    csv_name: str = ""

    # Flags propios de cada experimento, además de los comunes.
    def add_experiment_arguments(self, parser, defaults: dict) -> None:
        pass

    def add_arguments(self, parser):
        defaults = kind_defaults(self.kind)

        def default_help(text: str, name: str) -> str:
            return f"{text} (por defecto: {defaults.get(name)})"

        parser.add_argument("--config", help="Archivo JSON de configuración; los flags tienen prioridad.")
        parser.add_argument("--m", type=int, help=default_help("Antenas de transmisión M", "m"))
        parser.add_argument("--p", type=float, help=default_help("Potencia de transmisión P", "p"))
        parser.add_argument("--sigma2", type=float, help=default_help("Varianza de ruido", "sigma2"))
        parser.add_argument(
            "--direct",
            choices=[DIRECT_NO, DIRECT_YES, DIRECT_BOTH],
            help=default_help("Camino directo F", "direct"),
        )
        parser.add_argument("--trials", type=int, help=default_help("Ensayos por punto", "trials"))
        parser.add_argument("--delta", type=float, help=default_help("Umbral de factibilidad", "delta"))
        parser.add_argument("--restarts", type=int, help=default_help("Arranques aleatorios por problema", "restarts"))
        parser.add_argument("--seed", type=int, help=default_help("Semilla maestra", "seed"))
        parser.add_argument("--threads", type=int, help=default_help("Máximo de hilos", "threads"))
        parser.add_argument(
            "--out",
            help=f"Directorio de salida (por defecto: {getattr(settings, 'RIS_OUTPUT_DIR', 'runs')}).",
        )
        parser.add_argument("--svg", action="store_true", default=None, help="Genera también la gráfica SVG (por defecto: no).")
        parser.add_argument(
            "--record",
            action="store_true",
            help=f"Registra la corrida en la base de datos (por defecto: {getattr(settings, 'RIS_RECORD_RUNS', False)}).",
        )
        self.add_experiment_arguments(parser, defaults)

    def config_keys(self) -> set[str]:
        return set(ExperimentConfigForm.base_fields) - {"kind"}

    def merged_values(self, options: dict) -> tuple[dict, dict]:
        """(valores del experimento, opciones de salida) tras aplicar config y flags."""

        file_values = load_config_file(options.get("config"))
        allowed = self.config_keys() | CONFIG_ONLY_KEYS
        unknown = sorted(set(file_values) - allowed)
        if unknown:
            raise CommandError(f"Claves desconocidas en la configuración: {', '.join(unknown)}", returncode=2)
        if file_values.get("kind", self.kind) != self.kind:
            raise CommandError(
                f"La configuración es de tipo {file_values['kind']!r}, no {self.kind!r}", returncode=2
            )

        values = {k: v for k, v in file_values.items() if k in self.config_keys()}
        # --k y --k-list se excluyen: el flag anula ambas claves del archivo.
        for flag, shadowed in (("k", "k_list"), ("k_list", "k")):
            if options.get(flag) is not None:
                values.pop(shadowed, None)
        for key in self.config_keys():
            if options.get(key) is not None:
                values[key] = options[key]

        output = {
            "out": options.get("out") or file_values.get("out") or str(getattr(settings, "RIS_OUTPUT_DIR", "runs")),
            "svg": bool(options.get("svg") if options.get("svg") is not None else file_values.get("svg", False)),
            "record": bool(options.get("record") or getattr(settings, "RIS_RECORD_RUNS", False)),
        }
        return values, output

    def run_experiment(self, cfg: ExperimentConfig, cleaned: dict) -> RunOutcome:
        raise NotImplementedError

    def handle(self, *args, **options):
        values, output = self.merged_values(options)
        form = ExperimentConfigForm.for_kind(self.kind, values)
        if not form.is_valid():
            raise CommandError(form_errors_text(form), returncode=2)

        effective = form.effective()
        self.stdout.write(json.dumps(effective, ensure_ascii=False, indent=2, sort_keys=True))

        try:
            cfg = form.to_config()
            started = time.monotonic()
            outcome = self.run_experiment(cfg, form.cleaned_data)
        except RisError as exc:
            raise CommandError(str(exc), returncode=2)
        wall_time = time.monotonic() - started

        out_dir = Path(output["out"])
        meta = {
            "kind": self.kind,
            "config": effective,
            "seed": cfg.seed,
            "solver_params": effective["solver_params"],
            "wall_time": wall_time,
            "trials_total": outcome.trials_total,
            "stalled": outcome.stalled,
            **outcome.meta,
        }
        try:
            csv_path = write_csv(out_dir / f"{self.csv_name}.csv", outcome.header, outcome.rows)
            for name, (header, rows) in outcome.extra_csv.items():
                write_csv(out_dir / f"{name}.csv", header, rows)

            svg_path = None
            if output["svg"] and outcome.render_svg is not None:
                svg_path = outcome.render_svg(out_dir / f"{self.csv_name}.svg")

            meta_path = write_metadata(out_dir / f"{self.csv_name}.meta.json", meta)
        except OSError as exc:
            raise CommandError(f"No se pudo escribir en {out_dir}: {exc}", returncode=2)
        logger.info("%s: %s filas en %.1fs", self.kind, len(outcome.rows), wall_time)

        if output["record"]:
            self.record_run(cfg, effective, outcome, wall_time, csv_path, meta_path, svg_path)

        self.stdout.write(self.style.SUCCESS(f"CSV escrito en {csv_path}"))
        if svg_path is not None:
            self.stdout.write(self.style.SUCCESS(f"SVG escrito en {svg_path}"))

        if outcome.trials_total and outcome.stalled / outcome.trials_total > STALL_EXIT_FRACTION:
            raise CommandError(
                f"{outcome.stalled} de {outcome.trials_total} ensayos quedaron estancados",
                returncode=1,
            )

    def record_run(self, cfg, effective, outcome, wall_time, csv_path, meta_path, svg_path) -> None:
        from .models import ExperimentRun, TransitionPoint

        run = ExperimentRun.objects.create(
            kind=self.kind,
            seed=cfg.seed,
            config_json=json.dumps(effective, ensure_ascii=False, sort_keys=True),
            solver_params_json=json.dumps(effective["solver_params"], sort_keys=True),
            csv_path=str(csv_path),
            metadata_path=str(meta_path),
            svg_path=str(svg_path or ""),
            trials_total=outcome.trials_total,
            stalled=outcome.stalled,
            wall_time=wall_time,
        )
        if outcome.transition is not None:
            TransitionPoint.objects.bulk_create(
                [
                    TransitionPoint(
                        run=run,
                        m=row.m,
                        k=row.k,
                        n=row.n,
                        direct=row.direct,
                        trials=row.trials,
                        successes=row.successes,
                        prob=row.prob,
                    )
                    for row in outcome.transition.rows
                ]
            )
        self.stdout.write(f"Corrida registrada (id={run.pk}).")


def add_transition_arguments(parser, defaults: dict) -> None:
    parser.add_argument("--k", type=int, help=f"Antenas de recepción K si no hay --k-list (por defecto: {defaults.get('k')})")
    parser.add_argument("--k-list", dest="k_list", help="Lista de K separada por comas, p. ej. 4,6,8 (por defecto: [K])")
    parser.add_argument("--n-min", dest="n_min", type=int, help=f"N mínimo (por defecto: {defaults.get('n_min')})")
    parser.add_argument("--n-max", dest="n_max", type=int, help=f"N máximo (por defecto: {defaults.get('n_max')})")
