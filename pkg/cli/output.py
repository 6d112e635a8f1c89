"""
Machine-readable output: JSON with 12 significant digits or CSV tables.

Divergence never reaches the output as a float; it is serialized as the
tagged union {"diverged": true}, finite verdicts as {"finite": x}.
"""
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from core.conf import get_setting


@dataclass
class CommandResult:
    payload: dict
    table: Optional[pd.DataFrame] = None
    # domain verdict such as "not in L^Phi"; the command exits with status 2
    verdict: Optional[str] = None


def round_significant(value: float, digits: Optional[int] = None) -> float:
    digits = digits or get_setting("OUTPUT_DIGITS")
    return float(f"{value:.{digits}g}")


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return {"diverged": True}
        return round_significant(value)
    if isinstance(obj, pd.DataFrame):
        return [to_jsonable(row) for row in obj.to_dict(orient="records")]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def render_json(payload: dict) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True)


def render_csv(result: CommandResult) -> str:
    digits = get_setting("OUTPUT_DIGITS")
    frame = result.table if result.table is not None else pd.json_normalize(to_jsonable(result.payload))
    return frame.to_csv(index=False, float_format=f"%.{digits}g", lineterminator="\n")


def verdict(estimate_or_result) -> dict:
    """Tagged union for a scalar that may have diverged."""
    value = getattr(estimate_or_result, "value", estimate_or_result)
    diverged = getattr(estimate_or_result, "diverged", None)
    if diverged is None:
        diverged = not getattr(estimate_or_result, "finite", math.isfinite(value))
    return {"diverged": True} if diverged else {"finite": value}
