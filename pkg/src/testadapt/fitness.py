"""Fitness of a recipient test: matched donor events plus applicable donor assertions."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .appmodel import AppModel, Assertion, GuiState, TestCase, Trace, run_test
from .descriptors import Descriptor, event_descriptor, widget_descriptor
from .donor import DonorProfile
from .guigraph import GuiGraph
from .matching import MatchContext, find_best_mapping, match_matrix
from .textsem import sentence_similarity


def fitness_score(n_mapped: int, n_applicable: int, n_events: int, n_assertions: int) -> Fraction:
    total = n_events + n_assertions
    if total == 0:
        raise ValueError("donor test has neither events nor assertions")
    if not (0 <= n_mapped <= n_events and 0 <= n_applicable <= n_assertions):
        raise ValueError("counts out of range")
    return Fraction(n_mapped + n_applicable, total)


@dataclass(frozen=True)
class FitnessReport:
    score: float
    fraction: Fraction
    mapping: frozenset
    applicable: tuple  # indices of applicable donor assertions
    normalized_test: TestCase
    trace: Trace
    recipient_descriptors: tuple
    retarget: dict = field(default_factory=dict, compare=False)

    @property
    def mapped_recipient_indices(self) -> frozenset:
        return frozenset(r for r, _ in self.mapping)

    @property
    def mapped_donor_indices(self) -> frozenset:
        return frozenset(d for _, d in self.mapping)

    def applicable_assertions(self, profile: DonorProfile) -> tuple:
        return tuple(profile.assertions[i] for i in self.applicable)


def similar_widgets(desc: Descriptor, state: GuiState, ctx: MatchContext) -> list[tuple[float, str]]:
    """``(similarity, xpath)`` of widgets in ``state`` whose descriptor clears the threshold."""
    out = []
    for w in state.widgets:
        sim = sentence_similarity(widget_descriptor(w, state).text, desc.text, ctx.store)
        if sim > ctx.cfg.tau:
            out.append((sim, w.xpath))
    return out


def best_widget(desc: Descriptor, state: GuiState, ctx: MatchContext) -> str | None:
    """Most similar qualifying widget; ties go to the smaller xpath."""
    hits = similar_widgets(desc, state, ctx)
    if not hits:
        return None
    return min(hits, key=lambda h: (-h[0], h[1]))[1]


def is_applicable_positive(desc: Descriptor, reference: GuiState, ctx: MatchContext) -> bool:
    return bool(similar_widgets(desc, reference, ctx))


def negated_witness(desc: Descriptor, states, first_after: int, ctx: MatchContext) -> tuple[int, int] | None:
    """Indices ``(i, j)`` with the positive form applicable at ``states[i]``,
    not applicable at ``states[j]``, ``i < j``, ``j >= first_after`` and both
    states on the same window.  Returns the pair with the smallest ``j``
    (latest ``i`` for that ``j``), or ``None``.
    """
    positive = [is_applicable_positive(desc, s, ctx) for s in states]
    last_positive: dict = {}
    for j, s in enumerate(states):
        if j >= first_after and not positive[j] and s.window_id in last_positive:
            return last_positive[s.window_id], j
        if positive[j]:
            last_positive[s.window_id] = j
    return None


def is_applicable_negated(desc: Descriptor, trace: Trace, mapping, ctx: MatchContext) -> bool:
    return negated_witness(desc, trace.states, _first_after(mapping, len(trace.states)), ctx) is not None


def _first_after(mapping, n_states: int) -> int:
    # states[k + 1] is reached by event k; with no mapping only the final state counts
    return max(r for r, _ in mapping) + 1 if mapping else n_states - 1


def assess_assertions(records, trace: Trace, mapping, ctx: MatchContext) -> tuple[tuple, dict]:
    """Applicable donor-assertion indices and the recipient xpath each would target."""
    applicable, retarget = [], {}
    final = trace.final_state
    first_after = _first_after(mapping, len(trace.states))
    for k, rec in enumerate(records):
        a: Assertion = rec.assertion
        if a.negated:
            hit = negated_witness(rec.descriptor, trace.states, first_after, ctx)
            if hit is not None:
                applicable.append(k)
                retarget[k] = best_widget(rec.descriptor, trace.states[hit[0]], ctx)
        else:
            xpath = best_widget(rec.descriptor, final, ctx)
            if xpath is not None:
                applicable.append(k)
                retarget[k] = xpath
    return tuple(applicable), retarget


def evaluate(
    t_r: TestCase,
    app_r: AppModel,
    profile: DonorProfile,
    ctx: MatchContext,
    graph: GuiGraph | None = None,
    rng: random.Random | None = None,
) -> FitnessReport:
    """Run ``t_r`` from a clean state and score it against the donor profile."""
    trace = run_test(app_r, t_r)
    if graph is not None:
        graph.record_trace(trace)
    events = trace.executed_events
    normalized = TestCase(events, t_r.assertions)
    if len(events) != len(t_r.events):
        # skipped events leave no state behind, so the states already align
        trace = Trace(trace.states, (True,) * len(events), events)
    descs = tuple(event_descriptor(e, trace.states[k]) for k, e in enumerate(events))
    mapping = find_best_mapping(match_matrix(events, descs, ctx), ctx, descs, rng)
    applicable, retarget = assess_assertions(profile.assertion_records, trace, mapping, ctx)
    frac = fitness_score(len(mapping), len(applicable), len(profile.events), len(profile.assertions))
    return FitnessReport(float(frac), frac, mapping, applicable, normalized, trace, descs, retarget)
