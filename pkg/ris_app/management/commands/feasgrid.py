from __future__ import annotations

from functools import partial

from ris_app.charts import feasgrid_svg
from ris_app.cli import ExperimentCommand, RunOutcome
from ris_app.dof import effective_transmit_dimension, format_dof
from ris_app.harness import KIND_FEASGRID, run_feasgrid
from ris_app.records import FEASGRID_HEADER


class Command(ExperimentCommand):
    help = (
        "Región factible de y para Y = [y, ..., y] sobre un canal muestreado: "
        "resuelve el SLP en cada punto de una rejilla del plano complejo."
    )
    kind = KIND_FEASGRID
    csv_name = "feasgrid"

    def add_experiment_arguments(self, parser, defaults):
        parser.add_argument("--n", type=int, help=f"Elementos RIS N (por defecto: {defaults['n']})")
        parser.add_argument("--k", type=int, help=f"Antenas de recepción K (por defecto: {defaults['k']})")
        parser.add_argument(
            "--grid-res",
            dest="grid_res",
            type=int,
            help=f"Puntos por eje de la rejilla (por defecto: {defaults['grid_res']})",
        )
        parser.add_argument(
            "--grid-extent",
            dest="grid_extent",
            type=float,
            help=f"La rejilla cubre [-e, e]^2 (por defecto: {defaults['grid_extent']})",
        )

    def run_experiment(self, cfg, cleaned):
        result = run_feasgrid(cfg)
        r = 1 if cfg.directs[0] else 0
        return RunOutcome(
            header=FEASGRID_HEADER,
            rows=result.rows(),
            trials_total=len(result.points),
            stalled=result.stalled,
            meta={
                "channel_seed": cfg.seed,
                "channel_stream": list(result.channel_stream),
                "effective_transmit_dimension": format_dof(effective_transmit_dimension(cfg.m, cfg.n, r)),
                "feasible_fraction": result.feasible_fraction(),
            },
            render_svg=partial(feasgrid_svg, result),
        )
