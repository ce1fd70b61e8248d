"""Semantic information extracted by replaying the donor test on the donor app."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .appmodel import FILL, AppModel, Assertion, GuiState, TestCase, Trace, check_assertion, is_present_interactable, run_test
from .descriptors import Descriptor, assertion_descriptor, event_descriptor


class DonorError(RuntimeError):
    pass


class DonorReplayError(DonorError):
    pass


class DonorAssertionError(DonorError):
    pass


@dataclass(frozen=True)
class AssertionRecord:
    assertion: Assertion
    descriptor: Descriptor
    state: GuiState
    expected: bool = True


def can_reorder(trace: Trace, i: int) -> bool:
    """Whether donor events ``i`` and ``i + 1`` (0-based) could swap.

    ``e[i+1]`` must be enabled before ``e[i]`` ran, and ``e[i]`` must still be
    enabled after ``e[i+1]`` ran.  Uses recorded states only.
    """
    events = trace.executed_events
    if not 0 <= i < len(events) - 1:
        raise IndexError(f"no consecutive pair at index {i}")
    before, after = trace.states[i], trace.states[i + 2]
    return is_present_interactable(events[i + 1], before) and is_present_interactable(events[i], after)


def build_clusters(reorder_flags, n_events: int) -> list[tuple[int, int]]:
    """Maximal runs of reorderable consecutive events, as inclusive 0-based ranges."""
    if n_events == 0:
        return []
    assert len(reorder_flags) == n_events - 1
    clusters = []
    start = 0
    for i, ok in enumerate(reorder_flags):
        if not ok:
            clusters.append((start, i))
            start = i + 1
    clusters.append((start, n_events - 1))
    return clusters


@dataclass(frozen=True)
class DonorProfile:
    donor_test: TestCase
    trace: Trace
    event_descriptors: tuple
    assertion_records: tuple
    reorder_flags: tuple
    clusters: tuple

    @property
    def events(self) -> tuple:
        return self.donor_test.events

    @property
    def states(self) -> tuple:
        return self.trace.states

    @property
    def inputs(self) -> tuple:
        return tuple(e.input_text if e.action == FILL else None for e in self.events)

    @cached_property
    def cluster_ids(self) -> tuple:
        ids = []
        for k, (lo, hi) in enumerate(self.clusters):
            ids.extend([k] * (hi - lo + 1))
        return tuple(ids)

    def can_reorder(self, i: int) -> bool:
        return self.reorder_flags[i]

    def is_before(self, i: int, j: int) -> bool:
        ids = self.cluster_ids
        return ids[i] != ids[j] and i < j

    @property
    def assertions(self) -> tuple:
        return self.donor_test.assertions


def extract_donor_profile(app_d: AppModel, t_d: TestCase) -> DonorProfile:
    trace = run_test(app_d, t_d)
    for k, ok in enumerate(trace.executed_flags, start=1):
        if not ok:
            raise DonorReplayError(f"donor test not replayable at event {k}: {t_d.events[k - 1]}")
    final = trace.final_state
    records = []
    for a in t_d.assertions:
        if not check_assertion(a, final):
            raise DonorAssertionError(f"donor assertion fails on the donor app: {a}")
        records.append(AssertionRecord(a, assertion_descriptor(a, final), final))
    descriptors = tuple(event_descriptor(e, trace.states[k]) for k, e in enumerate(t_d.events))
    flags = tuple(can_reorder(trace, i) for i in range(len(t_d.events) - 1))
    return DonorProfile(
        donor_test=t_d,
        trace=trace,
        event_descriptors=descriptors,
        assertion_records=tuple(records),
        reorder_flags=flags,
        clusters=tuple(build_clusters(flags, len(t_d.events))),
    )
