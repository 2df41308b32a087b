from rest_framework import serializers

from imaging.exceptions import InvalidConfigError
from registration.choices import ReportFormat
from registration.services.pipeline_service import RstParams
from registration.services.rotation_service import RotationSearchConfig
from registration.services.translation_service import Translation2D


# ----------------- REPORT OUTPUT -----------------
class Translation2DSerializer(serializers.Serializer):
    dx = serializers.IntegerField()
    dy = serializers.IntegerField()


class RstParamsSerializer(serializers.Serializer):
    rotation = serializers.FloatField()
    scale = serializers.FloatField()
    translation = Translation2DSerializer()


class TraceEntrySerializer(serializers.Serializer):
    angle = serializers.FloatField()
    raw_r = serializers.FloatField()
    normalized_r = serializers.FloatField(allow_null=True)


class CorrelationTraceSerializer(serializers.Serializer):
    entries = TraceEntrySerializer(many=True)


class ParameterErrorsSerializer(serializers.Serializer):
    rotation_deg = serializers.FloatField(allow_null=True)
    rotation_pct = serializers.FloatField(allow_null=True)
    scale_pct = serializers.FloatField(allow_null=True)
    translation_exact = serializers.BooleanField(allow_null=True)


class RegistrationReportSerializer(serializers.Serializer):
    """Read-only rendering of a RegistrationReport; rotation is counterclockwise-positive degrees."""

    mode = serializers.CharField()
    detected = RstParamsSerializer()
    x_scale = serializers.FloatField(allow_null=True)
    user_translation = Translation2DSerializer(allow_null=True)
    reference_crop_size = serializers.ListField(child=serializers.IntegerField())
    user_crop_size = serializers.ListField(child=serializers.IntegerField(), allow_null=True)
    coarse_trace = CorrelationTraceSerializer(allow_null=True)
    fine_trace = CorrelationTraceSerializer(allow_null=True)
    config = serializers.DictField()
    threshold = serializers.FloatField()
    durations_ms = serializers.DictField(child=serializers.FloatField())
    ground_truth = RstParamsSerializer(allow_null=True)
    errors = ParameterErrorsSerializer(allow_null=True)
    envelope_flags = serializers.ListField(child=serializers.CharField())


# ----------------- GROUND-TRUTH SIDECAR -----------------
class GroundTruthSerializer(serializers.Serializer):
    """Sidecar schema {rotation_deg, scale, tx, ty}; tx/ty in the bottom-left frame."""

    rotation_deg = serializers.FloatField()
    scale = serializers.FloatField()
    tx = serializers.IntegerField(min_value=0)
    ty = serializers.IntegerField(min_value=0)

    def validate_scale(self, value):
        if value <= 0:
            raise serializers.ValidationError("scale must be positive.")
        return value

    def create(self, validated_data):
        return RstParams(
            rotation=validated_data["rotation_deg"],
            scale=validated_data["scale"],
            translation=Translation2D(validated_data["tx"], validated_data["ty"]),
        )

    @staticmethod
    def from_params(params: RstParams) -> dict:
        return {
            "rotation_deg": params.rotation,
            "scale": params.scale,
            "tx": params.translation.dx,
            "ty": params.translation.dy,
        }


# ----------------- RUN CONFIGURATION -----------------
class RunConfigSerializer(serializers.Serializer):
    """Validates command flags before any image is read."""

    threshold = serializers.FloatField()
    range_min = serializers.FloatField()
    range_max = serializers.FloatField()
    coarse_step = serializers.FloatField()
    fine_step = serializers.FloatField()
    fine_halfwidth = serializers.FloatField()
    fill = serializers.FloatField()
    height_match = serializers.BooleanField(default=True)
    report_format = serializers.ChoiceField(choices=ReportFormat.choices, default=ReportFormat.JSON)
    workers = serializers.IntegerField(min_value=1, default=1)
    seed = serializers.IntegerField(required=False, allow_null=True)

    def validate_threshold(self, value):
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError("threshold must lie strictly between 0 and 1.")
        return value

    def validate(self, attrs):
        try:
            attrs["search"] = RotationSearchConfig(
                range_min=attrs["range_min"],
                range_max=attrs["range_max"],
                coarse_step=attrs["coarse_step"],
                fine_step=attrs["fine_step"],
                fine_halfwidth=attrs["fine_halfwidth"],
                fill=attrs["fill"],
                height_match=attrs["height_match"],
            )
        except InvalidConfigError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs
