from django.db import models


class TableChoice(models.TextChoices):
    ROTATION = "1", "Table 1: pure rotation"
    SCALING = "2", "Table 2: pure scaling"
    TRANSLATION = "3", "Table 3: pure translation"
    COMBINED = "4", "Table 4: combined RST"
    ENVELOPE = "envelope", "Combined RST either side of the scale envelope"
    ALL = "all", "Tables 1 to 4"

    @classmethod
    def expand(cls, selector: str) -> list:
        if selector == cls.ALL:
            return [cls.ROTATION, cls.SCALING, cls.TRANSLATION, cls.COMBINED]
        return [cls(selector)]
