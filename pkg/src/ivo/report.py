"""Outcome records shared by every sampled check."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .interval import Interval

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
VERDICTS = (PASS, FAIL, INCONCLUSIVE)


@dataclass
class CheckReport:
    """Verdict of a quantified property check.

    ``witnesses`` hold the offending inputs and the residual that exceeded the
    tolerance.  A ``fail`` verdict always carries at least one witness.
    ``details`` is free-form (branch counts, sub-verdicts, residual maxima).
    """

    name: str
    verdict: str
    samples: int = 0
    tolerance: float = 0.0
    witnesses: list[dict] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    anchor: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and not self.witnesses:
            raise ValueError(f"{self.name}: fail verdict without a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "verdict": self.verdict,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "witnesses": [to_jsonable(w) for w in self.witnesses],
            "details": to_jsonable(self.details),
        }


@dataclass
class Certificate(CheckReport):
    """A :class:`CheckReport` whose verdict speaks about one candidate point."""

    kind: str = ""

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["kind"] = self.kind
        return out


def combine(verdicts) -> str:
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return FAIL
    if verdicts and all(v == PASS for v in verdicts):
        return PASS
    return INCONCLUSIVE


def to_jsonable(obj):
    """Convert intervals, arrays and numpy scalars into JSON-ready values."""
    if isinstance(obj, Interval):
        return obj.to_list()
    if isinstance(obj, CheckReport):
        return obj.to_dict()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
