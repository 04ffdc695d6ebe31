"""Structured verdicts shared by the model, verification and CLI layers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional


def _finite_or_str(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


@dataclass
class IdentityReport:
    """Outcome of a residual check. ``passed`` is always ``max_residual <= tolerance``."""

    name: str
    samples: int
    max_residual: float
    tolerance: float
    notes: str = ""
    seed: Optional[int] = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "type": "IdentityReport",
            "name": self.name,
            "samples": int(self.samples),
            "max_residual": _finite_or_str(float(self.max_residual)),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "notes": self.notes,
        }
        if self.seed is not None:
            d["seed"] = int(self.seed)
        if self.details:
            d["details"] = self.details
        return d


EQUALITY_TOL = 1e-9


@dataclass
class BoundReport:
    """First-eigenvalue bound verdict; ``slack = bound - lambda1``."""

    name: str
    lambda1: float
    bound: float
    family_params: dict
    case: str = ""
    applies: bool = True
    notes: str = ""
    details: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.bound - self.lambda1

    @property
    def equality(self) -> bool:
        return abs(self.slack) < EQUALITY_TOL

    @property
    def passed(self) -> bool:
        # only meaningful where the bound's hypotheses hold
        return (not self.applies) or self.slack >= -EQUALITY_TOL

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "BoundReport",
            "name": self.name,
            "case": self.case,
            "lambda1": self.lambda1,
            "bound": self.bound,
            "slack": self.slack,
            "equality": self.equality,
            "applies": self.applies,
            "pass": self.passed,
            "family_params": dict(self.family_params),
            "notes": self.notes,
            **({"details": self.details} if self.details else {}),
        }


def as_plain(obj):
    """Recursively convert dataclasses / numpy scalars into JSON-able values."""
    import numpy as np

    if hasattr(obj, "to_dict"):
        return as_plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): as_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [as_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [as_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "__dataclass_fields__"):
        return as_plain(asdict(obj))
    return obj
