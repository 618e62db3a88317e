from __future__ import annotations

import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ris_app.dof import DofSpec, dof_region, format_dof, region_shape
from ris_app.exceptions import RisError


class Command(BaseCommand):
    help = (
        "Región DoF del canal de acceso múltiple (transmisor y RIS con mensajes "
        "independientes): vértices, forma y exportación opcional a JSON/CSV."
    )

    def add_arguments(self, parser):
        parser.add_argument("--m", type=int, default=2, help="Antenas de transmisión M (por defecto: 2)")
        parser.add_argument("--n", type=int, default=8, help="Elementos RIS N (por defecto: 8)")
        parser.add_argument("--k", type=int, default=10, help="Antenas de recepción K (por defecto: 10)")
        parser.add_argument(
            "--rank-r",
            dest="rank_r",
            type=int,
            default=0,
            help="Rango r del camino directo F (por defecto: 0)",
        )
        parser.add_argument(
            "--out",
            help="Archivo de salida; .csv escribe la lista de vértices, cualquier otro sufijo JSON (por defecto: ninguno)",
        )

    def handle(self, *args, **options):
        try:
            spec = DofSpec(m=options["m"], n=options["n"], k=options["k"], r=options["rank_r"])
        except RisError as exc:
            raise CommandError(str(exc), returncode=2)

        region = dof_region(spec)
        self.stdout.write(f"forma: {region_shape(region)}")
        for x, y in region.vertices:
            self.stdout.write(f"({format_dof(x)}, {format_dof(y)})")

        out = options.get("out")
        if out:
            path = Path(out)
            path.parent.mkdir(parents=True, exist_ok=True)
            if path.suffix.lower() == ".csv":
                path.write_text(region.to_csv(), encoding="utf-8")
            else:
                path.write_text(json.dumps(region.to_dict(), indent=2) + "\n", encoding="utf-8")
            self.stdout.write(self.style.SUCCESS(f"Región escrita en {path}"))
