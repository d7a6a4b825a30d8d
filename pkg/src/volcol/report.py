"""Selection reports and their JSON encoding."""

import json
import math
from dataclasses import dataclass
from importlib import resources

import jsonschema

FIELDS = (
    "method",
    "seed",
    "r",
    "k",
    "chosen",
    "residual_trace",
    "rank_k_error",
    "achieved_ratio",
    "bound",
    "bound_satisfied",
    "wall_time",
)


def load_schema():
    text = resources.files("volcol").joinpath("report.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of one column selection measured against the rank-k error."""

    method: str
    r: int
    k: int
    chosen: tuple
    residual_trace: float
    rank_k_error: float
    achieved_ratio: float
    bound: float
    bound_satisfied: bool
    seed: int | None = None
    wall_time: float | None = None

    def to_dict(self):
        d = {name: getattr(self, name) for name in FIELDS}
        d["chosen"] = [int(i) for i in self.chosen]
        if math.isinf(self.achieved_ratio):
            d["achieved_ratio"] = None
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d):
        validate_report(d)
        d = dict(d)
        d["chosen"] = tuple(d["chosen"])
        if d["achieved_ratio"] is None:
            d["achieved_ratio"] = math.inf
        return cls(**d)


def validate_report(d):
    """Raise ``jsonschema.ValidationError`` unless ``d`` matches the report schema."""
    jsonschema.validate(d, load_schema())
