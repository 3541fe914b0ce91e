"""Shared small helpers: strict JSON handling and deterministic dumps."""

from __future__ import annotations

import json

import numpy as np

from .errors import InputError


def _reject_constant(name):
    raise InputError(f"non-finite JSON constant {name!r} rejected")


def strict_json_loads(text: str):
    """json.loads that refuses NaN/Infinity tokens and non-finite floats."""
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    _check_finite(obj)
    return obj


def _check_finite(obj):
    if isinstance(obj, float):
        if not np.isfinite(obj):
            raise InputError("non-finite number in JSON input")
    elif isinstance(obj, list):
        for item in obj:
            _check_finite(item)
    elif isinstance(obj, dict):
        for value in obj.values():
            _check_finite(value)


def canonical_json_dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, stable float repr, newline at end."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def as_float_array(data, name, shape_hint=None):
    arr = np.asarray(data, dtype=float)
    if not np.isfinite(arr).all():
        raise InputError(f"{name} contains non-finite values")
    if shape_hint is not None and arr.ndim != shape_hint:
        raise InputError(f"{name} has wrong shape {arr.shape}")
    return arr
