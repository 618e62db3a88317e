from __future__ import annotations

import logging
from pathlib import Path

from django.core.management.base import BaseCommand

from ris_app.models import ExperimentRun, TransitionPoint
from ris_app.records import TRANSITION_HEADER, read_csv

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        "Reconstruye la tabla transition_points desde el CSV de cada corrida de "
        "transición registrada (1 fila por (m, k, n, direct) por corrida)."
    )

    def add_arguments(self, parser):
        parser.add_argument(
            "--append",
            action="store_true",
            help="No borra la tabla antes de cargar (puede duplicar filas).",
        )
        parser.add_argument(
            "--limit",
            type=int,
            default=0,
            help="Procesa solo las últimas N corridas (0 = todas).",
        )

    def handle(self, *args, **options):
        append = bool(options.get("append"))
        limit = int(options.get("limit") or 0)

        if not append:
            TransitionPoint.objects.all().delete()

        qs = ExperimentRun.objects.filter(kind=ExperimentRun.KIND_TRANSITION).order_by("-created_at")
        if limit > 0:
            qs = qs[:limit]

        created = 0
        skipped = 0
        for run in qs:
            path = Path(run.csv_path)
            try:
                raw_rows = read_csv(path, TRANSITION_HEADER)
            except (OSError, ValueError) as exc:
                logger.warning("Corrida %s: no se pudo leer %s (%s)", run.pk, path, exc)
                skipped += 1
                continue

            points = []
            for raw in raw_rows:
                try:
                    trials = int(raw["trials"])
                    successes = int(raw["successes"])
                    points.append(
                        TransitionPoint(
                            run=run,
                            m=int(raw["m"]),
                            k=int(raw["k"]),
                            n=int(raw["n"]),
                            direct=str(raw["direct"]).strip().lower() in {"1", "true", "yes"},
                            trials=trials,
                            successes=successes,
                            prob=successes / trials if trials else 0.0,
                            fecha=run.created_at,
                        )
                    )
                except (KeyError, TypeError, ValueError):
                    continue

            if points:
                TransitionPoint.objects.bulk_create(points)
                created += len(points)

        self.stdout.write(
            self.style.SUCCESS(f"OK: {created} filas creadas en transition_points ({skipped} corridas omitidas).")
        )
