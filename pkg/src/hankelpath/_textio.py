"""Deterministic text serialization helpers.

Every float is rendered with 17 significant digits so values round-trip
exactly and repeated runs produce byte-identical files.
"""

from __future__ import annotations


def fmt17(x: float) -> str:
    """17-significant-digit decimal form of a finite float."""
    return format(float(x), ".17g")


def json_list(values) -> str:
    return "[" + ", ".join(fmt17(v) for v in values) + "]"


def json_nested_list(rows) -> str:
    return "[" + ", ".join(json_list(row) for row in rows) + "]"
