"""Evolutionary search for an adapted recipient test.

Every random decision draws from a stream derived from ``(seed, generation,
individual, purpose)``, so results do not depend on whether evaluations run
in parallel.
"""

from __future__ import annotations

import logging
import math
import random
import string
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Sequence

import numpy as np

from .appmodel import CLICK, FILL, AppModel, Event, TestCase, enabled_events, execute_event, initial_state, run_test
from .descriptors import event_descriptor
from .donor import DonorProfile, extract_donor_profile
from .fitness import FitnessReport, evaluate
from .guigraph import GuiGraph
from .matching import MatchContext, events_match
from .textsem import EmbeddingStore, SimilarityConfig

log = logging.getLogger(__name__)

MODES = ("full", "basic", "random")
RANDOM_INPUT_PROB = 0.25
LENGTH_CAP_FACTOR = 4

# stream purposes
_GENERATE, _EVALUATE, _SELECT, _CROSSOVER, _MUTATE, _REDUCE = range(6)


@dataclass(frozen=True)
class SearchConfig:
    tau: float = 0.65
    population_size: int = 100
    elite_size: int = 10
    max_initial_length: int | None = None  # None means |t_D|
    n_random: int = 90
    n_greedy: int = 10
    crossover_prob: float = 0.40
    random_mut_prob: float = 0.35
    fitness_mut_prob: float = 0.35
    budget_generations: int = 100
    budget_wall_clock: float | None = None
    mode: str = "full"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n_random + self.n_greedy != self.population_size:
            raise ValueError("n_random + n_greedy must equal population_size")
        if not 0 < self.elite_size < self.population_size:
            raise ValueError("elite_size must satisfy 0 < E < N")
        if min(self.n_random, self.n_greedy) < 0:
            raise ValueError("population split must be non-negative")
        for name in ("tau", "crossover_prob", "random_mut_prob", "fitness_mut_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.budget_generations < 0:
            raise ValueError("budget_generations must be non-negative")
        if self.max_initial_length is not None and self.max_initial_length < 0:
            raise ValueError("max_initial_length must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))

    def with_population(self, n: int) -> "SearchConfig":
        """Resize the population keeping the default 90/10 split and 10% elitism."""
        n_greedy = max(1, round(n * 0.1))
        return replace(self, population_size=n, n_greedy=n_greedy, n_random=n - n_greedy, elite_size=max(1, round(n * 0.1)))

    @property
    def similarity(self) -> SimilarityConfig:
        return SimilarityConfig(self.tau)

    @property
    def effective_split(self) -> tuple[int, int]:
        if self.mode == "full":
            return self.n_random, self.n_greedy
        return self.population_size, 0

    @property
    def effective_fm(self) -> float:
        return self.fitness_mut_prob if self.mode == "full" else 0.0

    @property
    def elitism(self) -> bool:
        return self.mode != "random"


def derive_rng(seed: int, *keys: int) -> random.Random:
    state = np.random.SeedSequence([seed, *keys]).generate_state(2, dtype=np.uint64)
    return random.Random(int(state[0]) << 64 | int(state[1]))


class InputPool:
    """Fill inputs: donor fill texts and assertion texts, or a random string."""

    def __init__(self, texts: Sequence[str]):
        self.texts = tuple(dict.fromkeys(t for t in texts if t))

    @classmethod
    def from_profile(cls, profile: DonorProfile) -> "InputPool":
        fills = [e.input_text for e in profile.events if e.action == FILL]
        return cls(fills + [a.text for a in profile.assertions])

    def draw(self, rng: random.Random) -> str:
        if self.texts and rng.random() >= RANDOM_INPUT_PROB:
            return rng.choice(self.texts)
        alphabet = string.ascii_letters + string.digits
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))


def concretize(template: Event, rng: random.Random, pool: InputPool) -> Event:
    if template.action == FILL and template.input_text is None:
        return Event(FILL, template.target_xpath, pool.draw(rng))
    return template


# --- individual generation -------------------------------------------------


def generate_random_test(app: AppModel, length: int, rng: random.Random, pool: InputPool) -> TestCase:
    state = initial_state(app)
    events = []
    for _ in range(length):
        templates = enabled_events(state)
        if not templates:
            break
        e = concretize(rng.choice(templates), rng, pool)
        state, _ = execute_event(state, e, app)
        events.append(e)
    return TestCase(tuple(events))


def matching_candidates(state, ctx: MatchContext, donors: Sequence[int] | None = None) -> list[Event]:
    """Concrete events enabled in ``state`` that match some donor event in ``donors``."""
    donors = range(len(ctx)) if donors is None else donors
    out = []
    for tmpl in enabled_events(state):
        desc = event_descriptor(tmpl, state)
        for d in donors:
            ed, dd = ctx.donor_events[d], ctx.donor_descriptors[d]
            if tmpl.action == FILL:
                if ed.action != FILL:
                    continue
                e = Event(FILL, tmpl.target_xpath, ed.input_text)
            else:
                e = tmpl
            if e not in out and events_match(e, desc, ed, dd, ctx.store, ctx.cfg):
                out.append(e)
    return out


def generate_greedy_test(app: AppModel, ctx: MatchContext, length: int, rng: random.Random, pool: InputPool) -> TestCase:
    state = initial_state(app)
    events = []
    for _ in range(length):
        templates = enabled_events(state)
        if not templates:
            break
        cands = matching_candidates(state, ctx)
        e = rng.choice(cands) if cands else concretize(rng.choice(templates), rng, pool)
        state, _ = execute_event(state, e, app)
        events.append(e)
    return TestCase(tuple(events))


# --- population -----------------------------------------------------------

Individual = tuple  # (TestCase, FitnessReport)


@dataclass
class Population:
    individuals: list
    generation: int = 0
    elite_archive: list = field(default_factory=list)

    @property
    def best(self) -> Individual:
        return self.elite_archive[0]

    @property
    def best_score(self) -> float:
        return self.elite_archive[0][1].score if self.elite_archive else 0.0

    def __len__(self) -> int:
        return len(self.individuals)


def update_archive(archive: list, candidates, size: int) -> list:
    """Best ``size`` distinct tests ever seen, score descending, earliest first on ties."""
    seen = {t.events for t, _ in archive}
    merged = list(archive)
    for t, rep in candidates:
        if t.events not in seen:
            seen.add(t.events)
            merged.append((t, rep))
    merged.sort(key=lambda ind: -ind[1].fraction)
    return merged[:size]


@dataclass
class SearchContext:
    """Everything a generation step needs besides the population."""

    cfg: SearchConfig
    app: AppModel
    profile: DonorProfile
    ctx: MatchContext
    graph: GuiGraph
    pool: InputPool
    length_cap: int
    evaluations: int = 0

    @classmethod
    def build(cls, cfg: SearchConfig, app_r: AppModel, profile: DonorProfile, store: EmbeddingStore, graph=None):
        ctx = MatchContext.from_profile(profile, store, cfg.similarity)
        cap = LENGTH_CAP_FACTOR * max(1, len(profile.events))
        return cls(cfg, app_r, profile, ctx, graph if graph is not None else GuiGraph(), InputPool.from_profile(profile), cap)

    @property
    def initial_length(self) -> int:
        cfg = self.cfg
        return len(self.profile.events) if cfg.max_initial_length is None else cfg.max_initial_length

    def rng(self, *keys: int) -> random.Random:
        return derive_rng(self.cfg.seed, *keys)

    def evaluate(self, t: TestCase, rng: random.Random) -> FitnessReport:
        self.evaluations += 1
        return evaluate(t, self.app, self.profile, self.ctx, self.graph, rng)

    def evaluate_all(self, tests: Sequence[TestCase], generation: int) -> list[Individual]:
        """Evaluate ``tests``; individual ``i`` always uses the same derived stream."""

        def one(i: int) -> Individual:
            rep = self.evaluate(tests[i], self.rng(generation, i, _EVALUATE))
            return (rep.normalized_test, rep)

        idx = range(len(tests))
        if self.cfg.workers > 1 and len(tests) > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as ex:
                return list(ex.map(one, idx))
        return [one(i) for i in idx]


def init_population(sc: SearchContext) -> Population:
    n_random, n_greedy = sc.cfg.effective_split
    length = sc.initial_length
    tests = []
    for i in range(n_random + n_greedy):
        rng = sc.rng(0, i, _GENERATE)
        if i < n_random:
            tests.append(generate_random_test(sc.app, length, rng, sc.pool))
        else:
            tests.append(generate_greedy_test(sc.app, sc.ctx, length, rng, sc.pool))
    individuals = sc.evaluate_all(tests, 0)
    archive = update_archive([], individuals, sc.cfg.elite_size)
    return Population(individuals, 0, archive)


# --- operators --------------------------------------------------------------


def select_pairs(individuals: Sequence[Individual], rng: random.Random, uniform: bool = False) -> list[tuple[int, int]]:
    """Roulette-wheel parent pairs (indices), drawn with replacement."""
    n = len(individuals)
    weights = [float(rep.fraction) for _, rep in individuals]
    if uniform or sum(weights) == 0:
        weights = None
    out = []
    for _ in range(math.ceil(n / 2)):
        a, b = rng.choices(range(n), weights=weights, k=2)
        out.append((a, b))
    return out


def _bridge(first: Sequence[Event], second: Sequence[Event], target_window: str, app: AppModel, graph: GuiGraph) -> tuple:
    if not second:
        return tuple(first)
    w1 = run_test(app, first).final_state.window_id
    path = graph.find_path(w1, target_window) if w1 != target_window else []
    return tuple(first) + tuple(path or ()) + tuple(second)


def crossover(
    parents: tuple[Individual, Individual],
    graph: GuiGraph,
    cp: float,
    rng: random.Random,
    app: AppModel,
) -> tuple[TestCase, TestCase] | None:
    """Single-point crossover with window-path repair.

    Returns ``None`` when the pair is passed through unchanged.
    """
    if rng.random() >= cp:
        return None
    (t1, _), (t2, _) = parents
    c1, c2 = rng.randint(0, len(t1.events)), rng.randint(0, len(t2.events))
    return splice(parents, c1, c2, graph, app)


def splice(parents: tuple[Individual, Individual], c1: int, c2: int, graph: GuiGraph, app: AppModel) -> tuple[TestCase, TestCase]:
    """``t1[:c1] + t2[c2:]`` and ``t2[:c2] + t1[c1:]``, each bridged by a recorded window path."""
    (t1, r1), (t2, r2) = parents
    e1, e2 = t1.events, t2.events
    # the window where each second segment's first event originally ran
    w2 = r2.trace.states[c2].window_id
    w1 = r1.trace.states[c1].window_id
    a = _bridge(e1[:c1], e2[c2:], w2, app, graph)
    b = _bridge(e2[:c2], e1[c1:], w1, app, graph)
    return TestCase(a), TestCase(b)


def _states_before(app: AppModel, events: Sequence[Event]) -> list:
    """State in which each insertion position would act (``len(events) + 1`` entries)."""
    state = initial_state(app)
    out = [state]
    for e in events:
        state, _ = execute_event(state, e, app)
        out.append(state)
    return out


def mutate_add_random(events: list, app: AppModel, rng: random.Random, pool: InputPool) -> bool:
    pos = rng.randint(0, len(events))
    state = _states_before(app, events[:pos])[-1]
    templates = enabled_events(state)
    if not templates:
        return False
    events.insert(pos, concretize(rng.choice(templates), rng, pool))
    return True


def mutate_remove_random(events: list, rng: random.Random) -> bool:
    if not events:
        return False
    del events[rng.randrange(len(events))]
    return True


def mutate_bulk_fill(events: list, app: AppModel, rng: random.Random, pool: InputPool) -> bool:
    """Fill every text field of a window that holds more than one."""
    states = _states_before(app, events)
    spots = []
    for pos, s in enumerate(states):
        fills = [e for e in enabled_events(s) if e.action == FILL]
        if len(fills) > 1:
            spots.append((pos, fills))
    if not spots:
        return False
    pos, fills = rng.choice(spots)
    events[pos:pos] = [concretize(f, rng, pool) for f in fills]
    return True


def mutate_remove_unmatched(events: list, report: FitnessReport, rng: random.Random) -> bool:
    cands = [k for k in range(len(events)) if k not in report.mapped_recipient_indices]
    if not cands:
        return False
    del events[rng.choice(cands)]
    return True


def mutate_add_matching(events: list, report: FitnessReport, ctx: MatchContext, rng: random.Random) -> bool:
    """Insert an event matching a random unmatched donor event where it is enabled."""
    unmatched = [d for d in range(len(ctx)) if d not in report.mapped_donor_indices]
    if not unmatched:
        return False
    d = rng.choice(unmatched)
    spots = [(pos, e) for pos, s in enumerate(report.trace.states) for e in matching_candidates(s, ctx, [d])]
    if not spots:
        return False
    pos, e = rng.choice(spots)
    events.insert(pos, e)
    return True


def mutate(
    t: TestCase,
    report: FitnessReport | Callable[[], FitnessReport] | None,
    sc: SearchContext,
    rng: random.Random,
    rm: float | None = None,
    fm: float | None = None,
) -> TestCase:
    """Apply at most one fitness-driven and at most one random mutation.

    ``report`` must describe ``t`` (which must then be normalized); it may be
    a callable producing the report on demand.
    """
    rm = sc.cfg.random_mut_prob if rm is None else rm
    fm = sc.cfg.effective_fm if fm is None else fm
    events = list(t.events)
    if rng.random() < fm:
        rep = report() if callable(report) else report
        events = list(rep.normalized_test.events)
        if rng.randrange(2) == 0:
            mutate_remove_unmatched(events, rep, rng)
        else:
            mutate_add_matching(events, rep, sc.ctx, rng)
    if rng.random() < rm:
        op = rng.randrange(3)
        if op == 0:
            mutate_add_random(events, sc.app, rng, sc.pool)
        elif op == 1:
            mutate_remove_random(events, rng)
        else:
            mutate_bulk_fill(events, sc.app, rng, sc.pool)
    return TestCase(tuple(events[: sc.length_cap]), t.assertions)


def evolve_generation(pop: Population, sc: SearchContext) -> Population:
    """Elitism, selection, crossover and mutation, then evaluation of the offspring."""
    cfg = sc.cfg
    gen = pop.generation + 1
    elites = list(pop.elite_archive) if cfg.elitism else []
    n_offspring = cfg.population_size - len(elites)
    pairs = select_pairs(pop.individuals, sc.rng(gen, 0, _SELECT), uniform=not cfg.elitism)
    children: list = []  # (test, report or None)
    for k, (a, b) in enumerate(pairs):
        pa, pb = pop.individuals[a], pop.individuals[b]
        out = crossover((pa, pb), sc.graph, cfg.crossover_prob, sc.rng(gen, k, _CROSSOVER), sc.app)
        if out is None:
            children.extend([pa, pb])
        else:
            children.extend([(out[0], None), (out[1], None)])
    children = children[:n_offspring]

    tests = []
    reused: dict = {}
    for i, (t, rep) in enumerate(children):
        rng = sc.rng(gen, i, _MUTATE)
        if rep is None:
            lazy = lambda t=t, i=i: sc.evaluate(t, sc.rng(gen, i, _MUTATE, _EVALUATE))
            mutated = mutate(t, lazy, sc, rng)
        else:
            mutated = mutate(t, rep, sc, rng)
            if mutated == t:
                reused[i] = (t, rep)
        tests.append(mutated)

    fresh_idx = [i for i in range(len(tests)) if i not in reused]
    fresh = sc.evaluate_all([tests[i] for i in fresh_idx], gen)
    evaluated = dict(reused)
    for i, ind in zip(fresh_idx, fresh):
        evaluated[i] = ind
    offspring = [evaluated[i] for i in range(len(tests))]
    archive = update_archive(pop.elite_archive, offspring, cfg.elite_size)
    return Population(elites + offspring, gen, archive)


# --- driver -----------------------------------------------------------------


@dataclass
class SearchResult:
    best_test: TestCase
    best_report: FitnessReport
    trajectory: list
    profile: DonorProfile
    context: SearchContext
    population: Population

    @property
    def generations(self) -> int:
        return len(self.trajectory) - 1


def run_search(
    cfg: SearchConfig,
    app_d: AppModel,
    t_d: TestCase,
    app_r: AppModel,
    store: EmbeddingStore,
    profile: DonorProfile | None = None,
    on_generation: Callable[[Population], None] | None = None,
) -> SearchResult:
    """Evolve until fitness 1.0 or the generation / wall-clock budget runs out."""
    profile = profile if profile is not None else extract_donor_profile(app_d, t_d)
    sc = SearchContext.build(cfg, app_r, profile, store)
    started = time.monotonic()
    pop = init_population(sc)
    trajectory = [pop.best_score]
    if on_generation:
        on_generation(pop)
    for _ in range(cfg.budget_generations):
        if pop.best_score >= 1.0:
            break
        if cfg.budget_wall_clock is not None and time.monotonic() - started >= cfg.budget_wall_clock:
            break
        pop = evolve_generation(pop, sc)
        trajectory.append(pop.best_score)
        log.debug("generation %d best %.4f", pop.generation, pop.best_score)
        if on_generation:
            on_generation(pop)
    best_test, best_report = pop.best
    return SearchResult(best_test, best_report, trajectory, profile, sc, pop)
