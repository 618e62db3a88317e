from __future__ import annotations

from django.core.management.base import BaseCommand, CommandError

from ris_app.dof import (
    DofSpec,
    binding_constraint,
    binding_constraint_phase_only,
    dof_joint,
    dof_phase_only,
    format_dof,
)
from ris_app.exceptions import RisError


class Command(BaseCommand):
    help = "DoF máximo del canal RIS-MIMO y el término del mínimo que lo limita."

    def add_arguments(self, parser):
        parser.add_argument("--m", type=int, default=2, help="Antenas de transmisión M (por defecto: 2)")
        parser.add_argument("--n", type=int, default=5, help="Elementos RIS N (por defecto: 5)")
        parser.add_argument("--k", type=int, default=4, help="Antenas de recepción K (por defecto: 4)")
        parser.add_argument(
            "--rank-r",
            dest="rank_r",
            type=int,
            default=0,
            help="Rango r del camino directo F; 0 = sin camino directo (por defecto: 0)",
        )
        parser.add_argument(
            "--phase-only",
            dest="phase_only",
            action="store_true",
            help="DoF solo por fases, con X conocido en el receptor (por defecto: no)",
        )

    def handle(self, *args, **options):
        try:
            spec = DofSpec(m=options["m"], n=options["n"], k=options["k"], r=options["rank_r"])
        except RisError as exc:
            raise CommandError(str(exc), returncode=2)

        if options["phase_only"]:
            value, label = dof_phase_only(spec), binding_constraint_phase_only(spec)
        else:
            value, label = dof_joint(spec), binding_constraint(spec)
        self.stdout.write(f"{format_dof(value)} ({label})")
