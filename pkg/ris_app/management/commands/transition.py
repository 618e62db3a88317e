from __future__ import annotations

from functools import partial

from ris_app.charts import transition_svg
from ris_app.cli import ExperimentCommand, RunOutcome, add_transition_arguments
from ris_app.exceptions import PercentileRangeError
from ris_app.harness import KIND_TRANSITION, crossing_n, run_transition, theory_curves
from ris_app.records import TRANSITION_HEADER


def median_crossings(result) -> list[dict]:
    """Cruce interpolado del 50 % por (K, camino directo); None si la curva no lo alcanza."""

    crossings = []
    for k in result.ks():
        for direct in result.directs():
            try:
                value = crossing_n(result, k, direct, 0.5)
            except PercentileRangeError:
                value = None
            crossings.append({"k": k, "direct": direct, "n50": value})
    return crossings


class Command(ExperimentCommand):
    help = (
        "Transición de fase: probabilidad de sintetizar un Y con componentes en el "
        "círculo unitario, en función del número de elementos RIS N."
    )
    kind = KIND_TRANSITION
    csv_name = "transition"

    def add_experiment_arguments(self, parser, defaults):
        add_transition_arguments(parser, defaults)

    def run_experiment(self, cfg, cleaned):
        result = run_transition(cfg)
        return RunOutcome(
            header=TRANSITION_HEADER,
            rows=[row.as_csv() for row in result.rows],
            trials_total=result.total_trials,
            stalled=result.stalled,
            meta={
                "median_crossings": median_crossings(result),
                "theory": theory_curves(cfg.m, cfg.k_list),
            },
            render_svg=partial(transition_svg, result),
            transition=result,
        )
