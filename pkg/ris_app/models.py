from django.db import models
from django.utils import timezone


class ExperimentRun(models.Model):
    """Registro de una corrida (``--record``): configuración efectiva, semilla y archivos generados."""

    KIND_FEASGRID = "feasgrid"
    KIND_TRANSITION = "transition"
    KIND_PERCENTILES = "percentiles"

    KIND_CHOICES = [
        (KIND_FEASGRID, "Región factible"),
        (KIND_TRANSITION, "Transición de fase"),
        (KIND_PERCENTILES, "Tabla de percentiles"),
    ]

    kind = models.CharField(max_length=20, choices=KIND_CHOICES)
    seed = models.BigIntegerField(default=0)

    config_json = models.TextField(blank=True, default="")
    solver_params_json = models.TextField(blank=True, default="")

    csv_path = models.CharField(max_length=500)
    metadata_path = models.CharField(max_length=500, blank=True)
    svg_path = models.CharField(max_length=500, blank=True)

    trials_total = models.IntegerField(default=0)
    stalled = models.IntegerField(default=0)
    wall_time = models.FloatField(default=0.0, help_text="Segundos de reloj de la corrida.")

    created_at = models.DateTimeField(default=timezone.now)

    class Meta:
        db_table = "experiment_runs"
        ordering = ["-created_at"]
        verbose_name = "Corrida de experimento"
        verbose_name_plural = "Corridas de experimentos"
        indexes = [
            models.Index(fields=["kind"], name="ris_run_kind_idx"),
            models.Index(fields=["created_at"], name="ris_run_created_idx"),
        ]

    def __str__(self):
        return f"{self.kind} seed={self.seed} ({self.created_at:%Y-%m-%d %H:%M})"

    @property
    def stall_fraction(self) -> float:
        if not self.trials_total:
            return 0.0
        return self.stalled / self.trials_total


class TransitionPoint(models.Model):
    """Tabla plana: 1 fila por (m, k, n, direct) de una corrida de transición."""

    run = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        null=True,
        blank=True,
        related_name="transition_points",
    )

    m = models.IntegerField()
    k = models.IntegerField()
    n = models.IntegerField()
    direct = models.BooleanField(default=False)

    trials = models.IntegerField()
    successes = models.IntegerField()
    prob = models.FloatField()

    fecha = models.DateTimeField(default=timezone.now)

    class Meta:
        db_table = "transition_points"
        verbose_name = "Punto de transición"
        verbose_name_plural = "Puntos de transición"
        indexes = [
            models.Index(fields=["run"], name="ris_tp_run_idx"),
            models.Index(fields=["k", "n"], name="ris_tp_k_n_idx"),
            models.Index(fields=["direct"], name="ris_tp_direct_idx"),
        ]
