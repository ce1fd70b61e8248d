"""Test reduction and oracle injection for the fittest individual."""

from __future__ import annotations

import random
from typing import Callable

from .appmodel import Assertion, TestCase
from .donor import DonorProfile
from .fitness import FitnessReport

Evaluator = Callable[[TestCase], FitnessReport]


def reduce_test(t: TestCase, report: FitnessReport, evaluator: Evaluator) -> tuple[TestCase, FitnessReport]:
    """Drop events outside the mapping one at a time, last first, unless fitness drops.

    ``evaluator`` runs and scores a candidate on the recipient app.  Removing
    an event can make later events non-executable; the evaluator's
    normalization discards those too, and positions before the removed one
    are unaffected, so the backwards scan stays valid.
    """
    current, rep = report.normalized_test, report
    pos = len(current.events) - 1
    while pos >= 0:
        if pos < len(current.events) and pos not in rep.mapped_recipient_indices:
            events = current.events[:pos] + current.events[pos + 1 :]
            cand = evaluator(TestCase(events, current.assertions))
            if cand.fraction >= rep.fraction:
                current, rep = cand.normalized_test, cand
        pos -= 1
    return current, rep


def inject_oracles(t: TestCase, report: FitnessReport, profile: DonorProfile) -> TestCase:
    """Append the applicable donor assertions, retargeted onto the recipient."""
    added = []
    for k in report.applicable:
        a = profile.assertions[k]
        if a.target_xpath is not None:
            a = Assertion(a.kind, a.text, report.retarget.get(k) or a.target_xpath)
        added.append(a)
    return TestCase(t.events, tuple(t.assertions) + tuple(added))
