from __future__ import annotations

import json
from contextlib import nullcontext
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from ris_app.channel import sample_channel
from ris_app.exceptions import RisError
from ris_app.numerics import Rng
from ris_app.optimizer import AlmParams
from ris_app.precoding import SlpProblem, problem_from_dict, problem_to_dict, solution_to_dict, solve
from ris_app.records import JsonLinesWriter, read_json


class Command(BaseCommand):
    help = (
        "Precodificación a nivel de símbolo: busca (X, Phi) con "
        "sqrt(P)(H diag(Phi) G + F) X = Y y ||X||^2 <= 1. Lee el problema de un JSON "
        "o muestrea un canal y un Y en el círculo unitario a partir de la semilla."
    )

    def add_arguments(self, parser):
        parser.add_argument("--problem", help="JSON del problema (canal + target [+ mode, x]) (por defecto: muestrear)")
        parser.add_argument("--m", type=int, default=2, help="Antenas de transmisión M al muestrear (por defecto: 2)")
        parser.add_argument("--n", type=int, default=8, help="Elementos RIS N al muestrear (por defecto: 8)")
        parser.add_argument("--k", type=int, default=4, help="Antenas de recepción K al muestrear (por defecto: 4)")
        parser.add_argument("--p", type=float, default=1.0, help="Potencia P al muestrear (por defecto: 1.0)")
        parser.add_argument("--sigma2", type=float, default=1.0, help="Varianza de ruido al muestrear (por defecto: 1.0)")
        parser.add_argument("--direct", action="store_true", help="Muestrear también el camino directo F (por defecto: no)")
        parser.add_argument("--seed", type=int, default=0, help="Semilla maestra (por defecto: 0)")
        parser.add_argument(
            "--restarts",
            type=int,
            default=None,
            help=f"Arranques aleatorios (por defecto: {getattr(settings, 'RIS_RESTARTS', 4)})",
        )
        parser.add_argument(
            "--delta",
            type=float,
            default=None,
            help=f"Umbral de factibilidad (por defecto: {getattr(settings, 'RIS_FEASIBILITY_DELTA', 1e-3)})",
        )
        parser.add_argument("--solver", default="{}", help='Parámetros del solver en JSON, p. ej. {"eps_min": 1e-8} (por defecto: {})')
        parser.add_argument("--out", help="Archivo JSON de la solución (por defecto: se imprime)")
        parser.add_argument("--save-problem", dest="save_problem", help="Guarda el problema muestreado en JSON (por defecto: no)")
        parser.add_argument("--diagnostics", help="Archivo JSON-lines con una línea por iteración externa (por defecto: no)")

    def handle(self, *args, **options):
        restarts = options["restarts"]
        if restarts is None:
            restarts = int(getattr(settings, "RIS_RESTARTS", 4))
        if restarts < 1:
            raise CommandError("--restarts debe ser al menos 1", returncode=2)
        delta = options["delta"]
        rng = Rng(options["seed"])

        try:
            solver = json.loads(options["solver"] or "{}")
        except json.JSONDecodeError as exc:
            raise CommandError(f"--solver no es JSON válido: {exc}", returncode=2)
        try:
            params = AlmParams.from_dict(solver)
            problem = self._problem(options, rng)
        except (RisError, OSError, ValueError) as exc:
            raise CommandError(str(exc), returncode=2)

        if options.get("save_problem"):
            path = Path(options["save_problem"])
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(problem_to_dict(problem)) + "\n", encoding="utf-8")

        diagnostics = options.get("diagnostics")
        with JsonLinesWriter(diagnostics) if diagnostics else nullcontext() as writer:
            try:
                sol = solve(problem, params, restarts, rng.child(2), delta=delta, on_outer=writer)
            except RisError as exc:
                raise CommandError(str(exc), returncode=2)

        payload = json.dumps(solution_to_dict(sol), indent=2)
        if options.get("out"):
            path = Path(options["out"])
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(payload + "\n", encoding="utf-8")
            self.stdout.write(self.style.SUCCESS(f"Solución escrita en {path}"))
        else:
            self.stdout.write(payload)

        self.stdout.write(
            f"residuo={sol.residual:.3e} factible={'sí' if sol.feasible else 'no'} "
            f"iteraciones={sol.outer_iters}/{sol.inner_iters} parada={sol.stop_reason}"
        )
        if sol.stalled:
            raise CommandError("El solver quedó estancado en todos los arranques", returncode=1)

    def _problem(self, options, rng: Rng) -> SlpProblem:
        if options.get("problem"):
            path = Path(options["problem"])
            if not path.is_file():
                raise CommandError(f"No existe el archivo del problema: {path}", returncode=2)
            return problem_from_dict(read_json(path))

        ch = sample_channel(
            rng.child(0),
            options["m"],
            options["n"],
            options["k"],
            direct_path=options["direct"],
            power=options["p"],
            noise_variance=options["sigma2"],
        )
        target = np.exp(1j * rng.child(1).uniform(-np.pi, np.pi, options["k"]))
        return SlpProblem(channel=ch, target=target)
