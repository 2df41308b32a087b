from django.db import models

from experiments.choices import TableChoice
from registration.choices import CorrectionMode


class BenchmarkRun(models.Model):
    """
    One `bench --record` invocation. Rows keep the CSV values so runs with
    different seeds or search settings can be compared later.
    """
    table = models.CharField(max_length=10, choices=TableChoice.choices)
    seed = models.IntegerField()
    glyph_count = models.PositiveIntegerField()
    config = models.JSONField(default=dict, help_text="Rotation search settings and threshold used for the run.")
    rows_requested = models.PositiveIntegerField(default=0)
    rows_skipped = models.PositiveIntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"Table {self.table} seed {self.seed} ({self.rows_requested} rows)"


class ExperimentRecord(models.Model):
    run = models.ForeignKey(BenchmarkRun, on_delete=models.CASCADE, related_name='records')
    sample = models.CharField(max_length=64)
    table = models.CharField(max_length=10, choices=TableChoice.choices)
    mode = models.CharField(max_length=20, choices=CorrectionMode.choices)

    actual_rotation = models.FloatField()
    actual_scale = models.FloatField()
    actual_tx = models.IntegerField()
    actual_ty = models.IntegerField()

    detected_rotation = models.FloatField(null=True, blank=True)
    detected_scale = models.FloatField(null=True, blank=True)
    detected_tx = models.IntegerField(null=True, blank=True)
    detected_ty = models.IntegerField(null=True, blank=True)

    rot_err = models.FloatField(null=True, blank=True, help_text="Absolute rotation error in degrees.")
    scale_err_pct = models.FloatField(null=True, blank=True)
    trans_exact = models.BooleanField(null=True, blank=True)

    skipped = models.BooleanField(default=False)
    reason = models.TextField(blank=True, default='')
    position = models.PositiveIntegerField(help_text="Row index in the emitted CSV.")

    class Meta:
        ordering = ['run', 'position']
        unique_together = ('run', 'position')

    def __str__(self):
        return f"{self.sample} ({'skipped' if self.skipped else 'measured'})"
