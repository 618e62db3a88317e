# Generated by Django 6.0.2 on 2026-10-16 10:12

import django.db.models.deletion
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('feasgrid', 'Región factible'), ('transition', 'Transición de fase'), ('percentiles', 'Tabla de percentiles')], max_length=20)),
                ('seed', models.BigIntegerField(default=0)),
                ('config_json', models.TextField(blank=True, default='')),
                ('solver_params_json', models.TextField(blank=True, default='')),
                ('csv_path', models.CharField(max_length=500)),
                ('metadata_path', models.CharField(blank=True, max_length=500)),
                ('svg_path', models.CharField(blank=True, max_length=500)),
                ('trials_total', models.IntegerField(default=0)),
                ('stalled', models.IntegerField(default=0)),
                ('wall_time', models.FloatField(default=0.0, help_text='Segundos de reloj de la corrida.')),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now)),
            ],
            options={
                'verbose_name': 'Corrida de experimento',
                'verbose_name_plural': 'Corridas de experimentos',
                'db_table': 'experiment_runs',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['kind'], name='ris_run_kind_idx'), models.Index(fields=['created_at'], name='ris_run_created_idx')],
            },
        ),
        migrations.CreateModel(
            name='TransitionPoint',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('m', models.IntegerField()),
                ('k', models.IntegerField()),
                ('n', models.IntegerField()),
                ('direct', models.BooleanField(default=False)),
                ('trials', models.IntegerField()),
                ('successes', models.IntegerField()),
                ('prob', models.FloatField()),
                ('fecha', models.DateTimeField(default=django.utils.timezone.now)),
                ('run', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.CASCADE, related_name='transition_points', to='ris_app.experimentrun')),
            ],
            options={
                'verbose_name': 'Punto de transición',
                'verbose_name_plural': 'Puntos de transición',
                'db_table': 'transition_points',
                'indexes': [models.Index(fields=['run'], name='ris_tp_run_idx'), models.Index(fields=['k', 'n'], name='ris_tp_k_n_idx'), models.Index(fields=['direct'], name='ris_tp_direct_idx')],
            },
        ),
    ]
