from __future__ import annotations

from functools import partial
from pathlib import Path

from django.core.management.base import CommandError

from ris_app.charts import percentile_svg
from ris_app.cli import ExperimentCommand, RunOutcome, add_transition_arguments
from ris_app.harness import KIND_PERCENTILES, percentile_table, run_transition, theory_curves, transition_from_rows
from ris_app.records import PERCENTILE_HEADER, TRANSITION_HEADER, read_csv


class Command(ExperimentCommand):
    help = (
        "Tabla de percentiles: N mínimo con probabilidad de éxito >= nivel, por K. "
        "Usa un CSV de transición (--input) o corre la transición antes."
    )
    kind = KIND_PERCENTILES
    csv_name = "percentiles"

    def add_experiment_arguments(self, parser, defaults):
        add_transition_arguments(parser, defaults)
        parser.add_argument(
            "--levels",
            help=f"Niveles separados por comas (por defecto: {','.join(str(v) for v in defaults['levels'])})",
        )
        parser.add_argument(
            "--input",
            help="CSV de transición ya calculado (por defecto: corre la transición con esta configuración)",
        )

    def run_experiment(self, cfg, cleaned):
        source = cleaned.get("input")
        extra_csv = {}
        if source:
            path = Path(source)
            if not path.is_file():
                raise CommandError(f"No existe el CSV de transición: {path}", returncode=2)
            try:
                result = transition_from_rows(read_csv(path, TRANSITION_HEADER))
            except (ValueError, KeyError) as exc:
                raise CommandError(f"CSV de transición inválido ({path}): {exc}", returncode=2)
            trials_total, stalled = 0, 0
        else:
            result = run_transition(cfg)
            trials_total, stalled = result.total_trials, result.stalled
            extra_csv["percentiles_transition"] = (TRANSITION_HEADER, [row.as_csv() for row in result.rows])

        direct = cfg.directs == (True,)
        rows = percentile_table(result, cfg.levels, direct=direct if direct in result.directs() else None)
        m = result.rows[0].m if result.rows else cfg.m
        theory = theory_curves(m, result.ks())
        return RunOutcome(
            header=PERCENTILE_HEADER,
            rows=[(r.k, r.level, r.n_first, r.n_interp) for r in rows],
            trials_total=trials_total,
            stalled=stalled,
            meta={"theory": theory, "source": source or "transition"},
            render_svg=partial(percentile_svg, rows, theory),
            transition=None if source else result,
            extra_csv=extra_csv,
        )
