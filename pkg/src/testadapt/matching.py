"""Semantic event matching and the maximum valid mapping between two tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .appmodel import CLICK, FILL, Event
from .descriptors import Descriptor
from .textsem import EmbeddingStore, SimilarityConfig, is_sem_sim, normalize_text

# how many equal-cardinality optima are sampled before pruning turns strict
TIE_CAP = 256


@dataclass(frozen=True)
class MatchContext:
    donor_events: tuple
    donor_descriptors: tuple
    cluster_ids: tuple
    store: EmbeddingStore
    cfg: SimilarityConfig

    def __post_init__(self):
        if not len(self.donor_events) == len(self.donor_descriptors) == len(self.cluster_ids):
            raise ValueError("donor events, descriptors and clusters must align")

    @classmethod
    def from_profile(cls, profile, store: EmbeddingStore, cfg: SimilarityConfig) -> "MatchContext":
        return cls(profile.events, profile.event_descriptors, profile.cluster_ids, store, cfg)

    @property
    def donor_inputs(self) -> tuple:
        return tuple(e.input_text if e.action == FILL else None for e in self.donor_events)

    def is_before(self, i: int, j: int) -> bool:
        return self.cluster_ids[i] != self.cluster_ids[j] and i < j

    def __len__(self) -> int:
        return len(self.donor_events)


def events_match(
    e_r: Event,
    d_r: Descriptor,
    e_d: Event,
    d_d: Descriptor,
    store: EmbeddingStore,
    cfg: SimilarityConfig,
) -> bool:
    """The semantic matching relation between a recipient and a donor event."""
    if e_r.action == CLICK and e_d.action == CLICK:
        return is_sem_sim(d_r.text, d_d.text, store, cfg)
    if e_r.action == FILL and e_d.action == FILL:
        return e_r.input_text == e_d.input_text and is_sem_sim(d_r.text, d_d.text, store, cfg)
    if e_r.action == CLICK and e_d.action == FILL:
        return is_sem_sim(normalize_text(e_d.input_text or ""), d_r.text, store, cfg)
    # a donor click never maps onto a recipient fill
    return False


def match_matrix(r_events: Sequence[Event], r_descriptors: Sequence[Descriptor], ctx: MatchContext) -> list[list[bool]]:
    """``m[r][d]`` is true iff recipient event ``r`` matches donor event ``d``."""
    return [
        [events_match(er, dr, ed, dd, ctx.store, ctx.cfg) for ed, dd in zip(ctx.donor_events, ctx.donor_descriptors)]
        for er, dr in zip(r_events, r_descriptors)
    ]


def is_valid_mapping(pairs, ctx: MatchContext, recipient_descriptors: Sequence[Descriptor]) -> bool:
    """Injective on the donor side, order preserving across clusters, and consistent."""
    pairs = list(set(pairs))
    donors = [d for _, d in pairs]
    if len(donors) != len(set(donors)):
        return False
    for ra, da in pairs:
        for rb, db in pairs:
            if ctx.is_before(da, db) and not ra < rb:
                return False
            if (
                ctx.donor_descriptors[da].text == ctx.donor_descriptors[db].text
                and recipient_descriptors[ra].text != recipient_descriptors[rb].text
            ):
                return False
    return True


def find_best_mapping(
    matches: Sequence[Sequence[bool]],
    ctx: MatchContext,
    recipient_descriptors: Sequence[Descriptor],
    rng: random.Random | None = None,
) -> frozenset:
    """A maximum-cardinality valid mapping, as a frozenset of ``(recipient, donor)`` pairs.

    Branch and bound over donor events in index order: each donor event is
    assigned one matching recipient event or left unmatched.  Because donors
    are visited in order and clusters are contiguous, the ordering criterion
    reduces to a floor on recipient positions set by earlier clusters.
    Equal-cardinality optima are sampled uniformly (reservoir) with ``rng``.
    """
    n_r, n_d = len(matches), len(ctx)
    cands = [[r for r in range(n_r) if matches[r][d]] for d in range(n_d)]
    # suffix[d] = donors at index >= d with at least one candidate
    suffix = [0] * (n_d + 1)
    for d in range(n_d - 1, -1, -1):
        suffix[d] = suffix[d + 1] + (1 if cands[d] else 0)
    d_keys = [desc.text for desc in ctx.donor_descriptors]
    r_keys = [desc.text for desc in recipient_descriptors]
    clusters = ctx.cluster_ids

    best = {"size": -1, "pick": frozenset(), "ties": 0}
    assigned: list[tuple[int, int]] = []
    required: dict = {}  # donor descriptor -> (recipient descriptor, refcount)

    def leaf() -> None:
        size = len(assigned)
        if size > best["size"]:
            best.update(size=size, pick=frozenset(assigned), ties=1)
        elif size == best["size"]:
            best["ties"] += 1
            if rng is not None and rng.random() * best["ties"] < 1.0:
                best["pick"] = frozenset(assigned)

    def visit(d: int, floor: int, cluster_max: int) -> None:
        bound = len(assigned) + suffix[d]
        if bound < best["size"] or (bound == best["size"] and best["ties"] >= TIE_CAP):
            return
        if d == n_d:
            leaf()
            return
        if d > 0 and clusters[d] != clusters[d - 1]:
            floor, cluster_max = max(floor, cluster_max), -1
        key = d_keys[d]
        for r in cands[d]:
            if r <= floor:
                continue
            held = required.get(key)
            if held is not None and held[0] != r_keys[r]:
                continue
            required[key] = (r_keys[r], 1 if held is None else held[1] + 1)
            assigned.append((r, d))
            visit(d + 1, floor, max(cluster_max, r))
            assigned.pop()
            if held is None:
                del required[key]
            else:
                required[key] = held
        visit(d + 1, floor, cluster_max)

    visit(0, -1, -1)
    return best["pick"]
