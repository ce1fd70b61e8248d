import random
import statistics
from fractions import Fraction
from types import SimpleNamespace

import pytest

import testadapt.evolve as ev
from appkit import app, rule, widget
from testadapt.appmodel import Event, TestCase, run_test
from testadapt.datasets import bills_app, tasks_app, tasks_test
from testadapt.donor import extract_donor_profile
from testadapt.evolve import (
    InputPool,
    SearchConfig,
    SearchContext,
    crossover,
    derive_rng,
    evolve_generation,
    generate_greedy_test,
    generate_random_test,
    init_population,
    mutate,
    mutate_bulk_fill,
    mutate_remove_unmatched,
    run_search,
    select_pairs,
    splice,
    update_archive,
)
from testadapt.guigraph import GuiGraph


@pytest.fixture(scope="module")
def profile():
    return extract_donor_profile(tasks_app(), tasks_test())


def context(store, profile, recipient=None, **cfg):
    return SearchContext.build(SearchConfig(**cfg), recipient or bills_app(), profile, store)


def fake(score):
    return (TestCase(), SimpleNamespace(fraction=Fraction(score), score=float(score)))


# --- configuration -----------------------------------------------------------


def test_defaults():
    c = SearchConfig()
    assert (c.tau, c.population_size, c.elite_size, c.n_random, c.n_greedy) == (0.65, 100, 10, 90, 10)
    assert (c.crossover_prob, c.random_mut_prob, c.fitness_mut_prob) == (0.40, 0.35, 0.35)
    assert c.max_initial_length is None


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_random=80), dict(elite_size=0), dict(elite_size=100), dict(crossover_prob=1.5), dict(mode="greedy"),
     dict(seed=-1), dict(seed=2**64), dict(workers=0), dict(budget_generations=-1)],
)
def test_invalid_configs(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


def test_mode_switches():
    assert SearchConfig(mode="random").effective_split == (100, 0)
    assert SearchConfig(mode="basic").effective_split == (100, 0)
    assert SearchConfig().effective_split == (90, 10)
    assert SearchConfig(mode="basic").effective_fm == 0 and SearchConfig(mode="basic").elitism
    assert SearchConfig(mode="random").effective_fm == 0 and not SearchConfig(mode="random").elitism


def test_derived_streams_are_independent_and_stable():
    a = derive_rng(1, 2, 3).random()
    assert a == derive_rng(1, 2, 3).random()
    assert a != derive_rng(1, 2, 4).random()
    assert a != derive_rng(2, 2, 3).random()


# --- generation --------------------------------------------------------------


def test_random_length_zero():
    assert generate_random_test(bills_app(), 0, random.Random(0), InputPool([])) == TestCase()


def test_single_button_app():
    a = app({"w": [widget("/w/b", text="B")]})
    t = generate_random_test(a, 3, random.Random(0), InputPool([]))
    assert t.events == (Event("click", "/w/b"),) * 3


def test_dead_end_truncates():
    a = app({"w": [widget("/w/b", text="B")], "end": [widget("/end/l", "label", "done")]}, [rule("w", "/w/b", "end")])
    assert len(generate_random_test(a, 5, random.Random(0), InputPool([]))) == 1


def test_random_tests_replay():
    a = bills_app()
    pool = InputPool(["Test"])
    for seed in range(100):
        t = generate_random_test(a, 8, random.Random(seed), pool)
        assert all(run_test(a, t).executed_flags)


def test_input_pool():
    pool = InputPool(["Test", "", "Test", "10"])
    assert pool.texts == ("Test", "10")
    rng = random.Random(0)
    draws = [pool.draw(rng) for _ in range(2000)]
    share = sum(d in pool.texts for d in draws) / len(draws)
    assert 0.7 < share < 0.8
    assert all(1 <= len(d) <= 8 and d.isalnum() for d in draws)


def test_greedy_uses_donor_fill_input(store, profile):
    sc = context(store, profile, recipient=tasks_app())
    fills = set()
    for seed in range(30):
        t = generate_greedy_test(tasks_app(), sc.ctx, 4, random.Random(seed), sc.pool)
        fills |= {e.input_text for e in t.events if e.action == "fill"}
        if t.events == tasks_test().events:
            break
    else:
        pytest.fail("greedy never reproduced the donor test")
    assert fills <= {"Test"}


def test_greedy_falls_back_to_random(store, profile):
    a = app({"w": [widget("/w/zzz", text="Quux")]})
    sc = context(store, profile, recipient=a)
    assert generate_greedy_test(a, sc.ctx, 2, random.Random(0), sc.pool).events == (Event("click", "/w/zzz"),) * 2


def test_greedy_beats_random_on_identity(store, profile):
    sc = context(store, profile, recipient=tasks_app())
    greedy, rand = [], []
    for seed in range(20):
        g = generate_greedy_test(tasks_app(), sc.ctx, 4, random.Random(seed), sc.pool)
        r = generate_random_test(tasks_app(), 4, random.Random(seed), sc.pool)
        greedy.append(sc.evaluate(g, random.Random(0)).score)
        rand.append(sc.evaluate(r, random.Random(0)).score)
    assert statistics.mean(greedy) >= statistics.mean(rand)


@pytest.mark.parametrize("mode, greedy", [("full", 10), ("basic", 0), ("random", 0)])
def test_initial_population_split(store, profile, monkeypatch, mode, greedy):
    calls = []
    real = ev.generate_greedy_test
    monkeypatch.setattr(ev, "generate_greedy_test", lambda *a: calls.append(1) or real(*a))
    pop = init_population(context(store, profile, mode=mode))
    assert len(pop) == 100 and len(calls) == greedy
    assert len(pop.elite_archive) == 10


# --- selection ---------------------------------------------------------------


def test_roulette_single_nonzero():
    pop = [fake(1)] + [fake(0)] * 9
    pairs = select_pairs(pop, random.Random(0))
    assert len(pairs) == 5 and all(p == (0, 0) for p in pairs)


def test_all_zero_is_uniform():
    pop = [fake(0)] * 4
    rng = random.Random(0)
    counts = [0] * 4
    for _ in range(5000):
        for a, b in select_pairs(pop, rng):
            counts[a] += 1
            counts[b] += 1
    assert max(counts) / min(counts) < 1.1


def test_roulette_frequencies_proportional():
    scores = [Fraction(1, 5), Fraction(2, 5), Fraction(3, 5), Fraction(4, 5), 0, 1]
    pop = [fake(s) for s in scores]
    rng = random.Random(1)
    counts = [0] * len(pop)
    draws = 0
    while draws < 100_000:
        for a, b in select_pairs(pop, rng):
            counts[a] += 1
            counts[b] += 1
            draws += 2
    total = sum(scores)
    for c, s in zip(counts, scores):
        assert abs(c / draws - float(s / total)) < 0.02
    assert counts[4] == 0


def test_uniform_flag_ignores_scores():
    pop = [fake(1)] + [fake(0)] * 3
    rng = random.Random(0)
    seen = {i for _ in range(200) for p in select_pairs(pop, rng, uniform=True) for i in p}
    assert seen == {0, 1, 2, 3}


def test_odd_population_gets_ceil_half_pairs():
    assert len(select_pairs([fake(1)] * 5, random.Random(0))) == 3


# --- crossover ---------------------------------------------------------------


def individual(sc, events):
    rep = sc.evaluate(TestCase(tuple(events)), random.Random(0))
    return (rep.normalized_test, rep)


def test_no_crossover_when_cp_zero(store, profile):
    sc = context(store, profile)
    p = individual(sc, [Event("click", "/main/add")])
    assert crossover((p, p), sc.graph, 0.0, random.Random(0), sc.app) is None


def test_identical_parents_same_cut(store, profile):
    sc = context(store, profile)
    events = [Event("click", "/main/add"), Event("fill", "/editor/payee", "x"), Event("click", "/editor/cancel")]
    p = individual(sc, events)
    a, b = splice((p, p), 2, 2, sc.graph, sc.app)
    assert a.events == b.events == tuple(events)


def test_repair_inserts_bridge(store, profile):
    sc = context(store, profile)
    back = Event("click", "/settings/back")
    graph = GuiGraph([("settings", back, "main")])
    p1 = individual(sc, [Event("click", "/main/settings")])
    p2 = individual(sc, [Event("click", "/main/add"), Event("fill", "/editor/payee", "x")])
    a, b = splice((p1, p2), 1, 0, graph, sc.app)
    assert a.events == (Event("click", "/main/settings"), back) + p2[0].events
    assert all(run_test(sc.app, a).executed_flags)
    # the other child is t2[:0] + t1[1:], which is empty
    assert b.events == ()


def test_missing_path_keeps_raw_concatenation(store, profile):
    sc = context(store, profile)
    p1 = individual(sc, [Event("click", "/main/settings")])
    p2 = individual(sc, [Event("click", "/main/add")])
    a, _ = splice((p1, p2), 1, 0, GuiGraph(), sc.app)
    assert a.events == (Event("click", "/main/settings"), Event("click", "/main/add"))


# --- mutation ----------------------------------------------------------------


def test_no_mutation_at_zero_rates(store, profile):
    sc = context(store, profile)
    ind = individual(sc, [Event("click", "/main/add")])
    assert mutate(ind[0], ind[1], sc, random.Random(0), rm=0.0, fm=0.0) == ind[0]


def test_remove_unmatched_needs_candidates(store, profile):
    sc = context(store, profile, recipient=tasks_app())
    t, rep = individual(sc, tasks_test().events)
    events = list(t.events)
    assert not mutate_remove_unmatched(events, rep, random.Random(0))
    assert events == list(t.events)


def test_bulk_fill_three_fields():
    a = app({"w": [widget(f"/w/f{k}", "textfield", y=60 * k) for k in range(3)] + [widget("/w/ok", text="OK")]})
    events = []
    assert mutate_bulk_fill(events, a, random.Random(0), InputPool(["v"]))
    assert [e.target_xpath for e in events] == ["/w/f0", "/w/f1", "/w/f2"]
    assert all(e.action == "fill" for e in events)


def test_fitness_driven_add_targets_unmatched_donor(store, profile):
    sc = context(store, profile, recipient=tasks_app())
    t, rep = individual(sc, tasks_test().events[:1])
    events = list(t.events)
    assert ev.mutate_add_matching(events, rep, sc.ctx, random.Random(0))
    assert len(events) == 2


def test_length_cap(store, profile):
    sc = context(store, profile)
    long = TestCase((Event("click", "/main/settings"), Event("click", "/settings/back")) * 20)
    assert len(mutate(long, None, sc, random.Random(0), rm=0.0, fm=0.0)) == sc.length_cap == 16


# --- generations and search --------------------------------------------------


def test_archive_keeps_best_distinct():
    t1, t2 = TestCase((Event("click", "/a"),)), TestCase((Event("click", "/b"),))
    r = lambda s: SimpleNamespace(fraction=Fraction(s), score=float(s))
    archive = update_archive([], [(t1, r(Fraction(1, 2))), (t1, r(Fraction(1, 2))), (t2, r(Fraction(1, 5)))], 2)
    assert [a[0] for a in archive] == [t1, t2]
    archive = update_archive(archive, [(TestCase(), r(0))], 2)
    assert [a[0] for a in archive] == [t1, t2]


@pytest.mark.parametrize("mode", ["full", "basic", "random"])
def test_generation_size_and_monotone_best(store, profile, mode):
    sc = context(store, profile, mode=mode, population_size=20, n_random=18, n_greedy=2, elite_size=2,
                 crossover_prob=1.0, random_mut_prob=1.0)
    pop = init_population(sc)
    best = pop.best_score
    for _ in range(6):
        pop = evolve_generation(pop, sc)
        assert len(pop) == 20
        assert pop.best_score >= best
        best = pop.best_score


def test_elites_carried_unmutated(store, profile):
    sc = context(store, profile, population_size=20, n_random=18, n_greedy=2, elite_size=3, random_mut_prob=1.0)
    pop = init_population(sc)
    nxt = evolve_generation(pop, sc)
    assert nxt.individuals[:3] == pop.elite_archive


def test_random_mode_avoids_guided_operators(store, profile, monkeypatch):
    def boom(*a, **k):
        raise AssertionError("guided operator used in random mode")

    monkeypatch.setattr(ev, "generate_greedy_test", boom)
    monkeypatch.setattr(ev, "mutate_add_matching", boom)
    monkeypatch.setattr(ev, "mutate_remove_unmatched", boom)
    flags = []
    real = ev.select_pairs
    monkeypatch.setattr(ev, "select_pairs", lambda pop, rng, uniform=False: flags.append(uniform) or real(pop, rng, uniform))
    cfg = SearchConfig(mode="random", budget_generations=3, fitness_mut_prob=1.0).with_population(20)
    res = run_search(cfg, tasks_app(), tasks_test(), bills_app(), store)
    assert res.generations == 3 and flags and all(flags)


def test_basic_mode_uses_roulette_and_elitism(store, profile, monkeypatch):
    def boom(*a, **k):
        raise AssertionError("fitness-driven operator used in basic mode")

    monkeypatch.setattr(ev, "generate_greedy_test", boom)
    monkeypatch.setattr(ev, "mutate_add_matching", boom)
    monkeypatch.setattr(ev, "mutate_remove_unmatched", boom)
    cfg = SearchConfig(mode="basic", budget_generations=3, fitness_mut_prob=1.0).with_population(20)
    res = run_search(cfg, tasks_app(), tasks_test(), bills_app(), store)
    assert res.trajectory == sorted(res.trajectory)


def test_identity_stops_early(store):
    res = run_search(SearchConfig(seed=1), tasks_app(), tasks_test(), tasks_app(), store)
    assert res.best_report.score == 1.0
    assert res.generations < 100
    assert res.trajectory[-1] == 1.0


def test_zero_budget(store):
    res = run_search(SearchConfig(budget_generations=0, mode="basic").with_population(10), tasks_app(), tasks_test(),
                     bills_app(), store)
    assert len(res.trajectory) == 1
    assert res.best_report.score == max(r.score for _, r in res.population.individuals)


def test_same_seed_same_run(store):
    cfg = SearchConfig(seed=5, budget_generations=8).with_population(20)
    a = run_search(cfg, tasks_app(), tasks_test(), bills_app(), store)
    b = run_search(cfg, tasks_app(), tasks_test(), bills_app(), store)
    assert a.trajectory == b.trajectory and a.best_test == b.best_test


def test_parallel_matches_serial(store):
    cfg = SearchConfig(seed=9, budget_generations=8).with_population(20)
    a = run_search(cfg, tasks_app(), tasks_test(), bills_app(), store)
    b = run_search(SearchConfig(**{**cfg.__dict__, "workers": 4}), tasks_app(), tasks_test(), bills_app(), store)
    assert a.trajectory == b.trajectory and a.best_test == b.best_test
    assert a.context.graph == b.context.graph
