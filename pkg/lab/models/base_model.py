from pydantic import BaseModel, ConfigDict


class LabModel(BaseModel):
    # infinite exponents and quotients are legitimate values; keep them through JSON
    model_config = ConfigDict(ser_json_inf_nan="strings")


class FieldModel(LabModel):
    """Models that carry numpy arrays or RadialField instances"""

    model_config = ConfigDict(ser_json_inf_nan="strings", arbitrary_types_allowed=True)
