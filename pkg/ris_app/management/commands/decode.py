from __future__ import annotations

import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ris_app.channel import channel_from_dict, vector_from_pairs, vector_to_pairs
from ris_app.exceptions import RisError
from ris_app.precoding import Constellation, ml_decode
from ris_app.records import read_json


class Command(BaseCommand):
    help = (
        "Decodificación ML exhaustiva de (X, Phi) a partir del vector recibido. "
        "El JSON de entrada trae el canal (m, n, k, h, g, f, p, sigma2), el vector "
        "recibido 'y' y los alfabetos 'x_alphabet' (pares [re, im]) y 'theta_alphabet' (radianes)."
    )

    def add_arguments(self, parser):
        parser.add_argument("--input", required=True, help="JSON con canal, y y alfabetos (requerido)")
        parser.add_argument(
            "--cap",
            type=int,
            default=None,
            help="Máximo de pares candidatos (por defecto: RIS_ML_DECODE_CAP)",
        )
        parser.add_argument("--out", help="Archivo JSON del resultado (por defecto: se imprime)")

    def handle(self, *args, **options):
        path = Path(options["input"])
        if not path.is_file():
            raise CommandError(f"No existe el archivo de entrada: {path}", returncode=2)

        try:
            data = read_json(path)
            ch = channel_from_dict(data)
            y = vector_from_pairs(data.get("y") or [], name="y")
            constellation = Constellation.from_alphabets(
                vector_from_pairs(data.get("x_alphabet") or [], name="x_alphabet"),
                ch.m,
                data.get("theta_alphabet") or [],
                ch.n,
                cap=options["cap"],
            )
            result = ml_decode(ch, y, constellation, cap=options["cap"])
        except (RisError, ValueError, TypeError) as exc:
            raise CommandError(str(exc), returncode=2)

        payload = json.dumps(
            {
                "index": result.index,
                "metric": result.metric,
                "tie": result.tie,
                "x": vector_to_pairs(result.x),
                "theta": [float(t) for t in result.phase.theta],
            },
            indent=2,
        )
        if options.get("out"):
            out = Path(options["out"])
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(payload + "\n", encoding="utf-8")
            self.stdout.write(self.style.SUCCESS(f"Resultado escrito en {out}"))
        else:
            self.stdout.write(payload)
        self.stdout.write(
            f"índice={result.index} métrica={result.metric:.6g} empate={'sí' if result.tie else 'no'}"
        )
