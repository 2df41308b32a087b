# Generated by Django 5.2.8 on 2026-10-17 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='BenchmarkRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('table', models.CharField(choices=[('1', 'Table 1: pure rotation'), ('2', 'Table 2: pure scaling'), ('3', 'Table 3: pure translation'), ('4', 'Table 4: combined RST'), ('envelope', 'Combined RST either side of the scale envelope'), ('all', 'Tables 1 to 4')], max_length=10)),
                ('seed', models.IntegerField()),
                ('glyph_count', models.PositiveIntegerField()),
                ('config', models.JSONField(default=dict, help_text='Rotation search settings and threshold used for the run.')),
                ('rows_requested', models.PositiveIntegerField(default=0)),
                ('rows_skipped', models.PositiveIntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ExperimentRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('sample', models.CharField(max_length=64)),
                ('table', models.CharField(choices=[('1', 'Table 1: pure rotation'), ('2', 'Table 2: pure scaling'), ('3', 'Table 3: pure translation'), ('4', 'Table 4: combined RST'), ('envelope', 'Combined RST either side of the scale envelope'), ('all', 'Tables 1 to 4')], max_length=10)),
                ('mode', models.CharField(choices=[('full', 'Rotation, translation and scaling'), ('rotation', 'Pure rotation'), ('scaling', 'Pure scaling'), ('translation', 'Pure translation')], max_length=20)),
                ('actual_rotation', models.FloatField()),
                ('actual_scale', models.FloatField()),
                ('actual_tx', models.IntegerField()),
                ('actual_ty', models.IntegerField()),
                ('detected_rotation', models.FloatField(blank=True, null=True)),
                ('detected_scale', models.FloatField(blank=True, null=True)),
                ('detected_tx', models.IntegerField(blank=True, null=True)),
                ('detected_ty', models.IntegerField(blank=True, null=True)),
                ('rot_err', models.FloatField(blank=True, help_text='Absolute rotation error in degrees.', null=True)),
                ('scale_err_pct', models.FloatField(blank=True, null=True)),
                ('trans_exact', models.BooleanField(blank=True, null=True)),
                ('skipped', models.BooleanField(default=False)),
                ('reason', models.TextField(blank=True, default='')),
                ('position', models.PositiveIntegerField(help_text='Row index in the emitted CSV.')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='records', to='experiments.benchmarkrun')),
            ],
            options={
                'ordering': ['run', 'position'],
                'unique_together': {('run', 'position')},
            },
        ),
    ]
