"""Structural quality of an adapted test against a manually adapted reference."""

from __future__ import annotations

from .appmodel import TestCase


def _key(e) -> tuple:
    return (e.action, e.target_xpath, e.input_text)


def matched_events(generated: TestCase, reference: TestCase) -> int:
    """Size of the largest in-order, one-to-one matching of identical events."""
    gen = [_key(e) for e in generated.events]
    ref = [_key(e) for e in reference.events]
    prev = [0] * (len(gen) + 1)
    for r in ref:
        row = [0]
        for j, g in enumerate(gen, start=1):
            row.append(prev[j - 1] + 1 if r == g else max(prev[j], row[j - 1]))
        prev = row
    return prev[-1]


def structural_quality(generated: TestCase, reference: TestCase) -> float:
    """``1 - missing / len(reference)`` where missing reference events have no counterpart."""
    if not reference.events:
        raise ValueError("reference test has no events")
    missing = len(reference.events) - matched_events(generated, reference)
    return 1.0 - missing / len(reference.events)
