from django.db import models


class CorrectionMode(models.TextChoices):
    FULL = "full", "Rotation, translation and scaling"
    ROTATION = "rotation", "Pure rotation"
    SCALING = "scaling", "Pure scaling"
    TRANSLATION = "translation", "Pure translation"


class ReportFormat(models.TextChoices):
    JSON = "json", "JSON"
    CSV = "csv", "CSV"
