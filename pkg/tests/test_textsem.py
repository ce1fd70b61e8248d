import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from testadapt.textsem import (
    EmbeddingLoadError,
    EmbeddingStore,
    SimilarityConfig,
    is_sem_sim,
    load_embeddings,
    normalize_text,
    sentence_similarity,
    stem,
    stop_words,
    transport_cost,
)

WORDS = ["alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma", "zeta"]


def assignment_oracle(a, b, store) -> float:
    """1 - (min over perfect assignments of the mean cost) / 2."""
    va = [store.vector(t) for t in a]
    vb = [store.vector(t) for t in b]
    best = min(
        sum(np.linalg.norm(va[i] - vb[p[i]]) for i in range(len(a)))
        for p in itertools.permutations(range(len(b)))
    )
    return 1.0 - best / len(a) / 2.0


# --- normalization -----------------------------------------------------------


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("bs_add_task", ("bs", "add", "task")),
        ("", ()),
        ("Mark as Paid", ("mark", "paid")),
        ("action_save_task", ("action", "save", "task")),
        ("saveTaskButton", ("save", "task", "button")),
        ("item42Name", ("item", "42", "name")),
        ("What is to be done?", ("done",)),
        ("Bills", ("bill",)),
        ("Payee/Item", ("payee", "item")),
        ("HTTPServer", ("http", "server")),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize_text(raw) == expected


def test_stop_word_list_is_shipped():
    words = stop_words()
    assert 40 <= len(words) <= 80
    assert {"as", "the", "is", "to"} <= words


@pytest.mark.parametrize("word, expected", [("tasks", "task"), ("entries", "entry"), ("classes", "class"),
                                            ("status", "status"), ("bus", "bus"), ("analysis", "analysis")])
def test_stem(word, expected):
    assert stem(word) == expected


@given(st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=40))
def test_normalize_idempotent_and_clean(raw):
    toks = normalize_text(raw)
    assert normalize_text(" ".join(toks)) == toks
    for t in toks:
        assert t and t == t.lower() and "_" not in t and not t.isspace()
        assert t not in stop_words()


@given(st.text(max_size=20))
def test_stem_idempotent(word):
    assert stem(stem(word)) == stem(word)


# --- embeddings file ---------------------------------------------------------


def write(tmp_path, text, name="emb.txt"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_three_words(tmp_path):
    s = load_embeddings(write(tmp_path, "3 4\na 1 0 0 0\nb 0 2 0 0\nc 1 1 1 1\n"))
    assert len(s) == 3 and s.dimension == 4
    assert np.allclose(np.linalg.norm(s.vectors, axis=1), 1.0, atol=1e-9)


def test_zero_vector_is_rejected(tmp_path):
    with pytest.raises(EmbeddingLoadError, match="zero vector at line 1"):
        load_embeddings(write(tmp_path, "1 4\ncat 0 0 0 0\n"))


def test_duplicate_keeps_first(tmp_path):
    s = load_embeddings(write(tmp_path, "3 2\nadd 1 0\nsave 0 1\nadd 0 1\n"))
    assert len(s) == 2
    assert np.allclose(s.vector("add"), [1, 0])


@pytest.mark.parametrize(
    "text, pattern",
    [
        ("2 2\na 1 0\nb 1\n", "line 2"),
        ("1 2\na 1 x\n", "non-numeric value at line 1"),
        ("two 2\na 1 0\n", "header"),
        ("3 2\na 1 0\n", "announces 3"),
    ],
)
def test_malformed_files(tmp_path, text, pattern):
    with pytest.raises(EmbeddingLoadError, match=pattern):
        load_embeddings(write(tmp_path, text))


def test_from_dict_rejects_zero_vector():
    with pytest.raises(ValueError):
        EmbeddingStore.from_dict({"a": [0.0, 0.0]})


# --- similarity --------------------------------------------------------------


def test_identical_sentences(store):
    assert sentence_similarity(("add", "task"), ("add", "task"), store) == 1.0


def test_orthogonal_words_give_one_minus_sqrt2_over_2():
    s = EmbeddingStore.from_dict({"x": [1, 0, 0], "y": [0, 1, 0], "z": [0, 0, 1]})
    value = sentence_similarity(("x",), ("y", "z"), s)
    assert value == pytest.approx(1 - math.sqrt(2) / 2, abs=1e-12)
    assert not is_sem_sim(("x",), ("y", "z"), s, SimilarityConfig(0.65))


def test_threshold_is_strict():
    s = EmbeddingStore.from_dict({"x": [1, 0], "y": [0, 1]})
    v = sentence_similarity(("x",), ("y",), s)
    assert not is_sem_sim(("x",), ("y",), s, SimilarityConfig(v))
    assert is_sem_sim(("x",), ("y",), s, SimilarityConfig(v - 1e-9))


def test_default_threshold():
    assert SimilarityConfig().tau == 0.65
    with pytest.raises(ValueError):
        SimilarityConfig(1.5)


def test_oov_fallback(store):
    # "bs" and "action" are absent from the toy vocabulary
    assert sentence_similarity(("bs",), ("bs",), store) == 1.0
    assert sentence_similarity(("bs",), ("action",), store) == 0.0
    assert sentence_similarity((), (), store) == 1.0
    assert sentence_similarity(("bs",), ("task",), store) == 0.0
    # once OOV tokens are dropped, the rest is compared by transport
    assert sentence_similarity(("bs", "task"), ("task",), store) == 1.0


def test_working_example_pairs_clear_threshold(store, sim_cfg):
    assert is_sem_sim(normalize_text("bs_add_task"), normalize_text("action_add"), store, sim_cfg)
    assert is_sem_sim(normalize_text("action_save_task"), normalize_text("action_save"), store, sim_cfg)
    assert is_sem_sim(("task",), ("bill",), store, sim_cfg)
    assert not is_sem_sim(("task",), ("bill", "amount"), store, sim_cfg)


def test_transport_cost_matches_assignment_on_square_uniform():
    rng = np.random.default_rng(3)
    for n in range(1, 5):
        c = rng.random((n, n))
        brute = min(sum(c[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n))) / n
        assert transport_cost(c) == pytest.approx(brute, abs=1e-9)


def test_transport_cost_unequal_sizes():
    # one source word split evenly over two targets
    c = np.array([[1.0, 3.0]])
    assert transport_cost(c) == pytest.approx(2.0)
    c = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0]])
    # masses 1/2 vs 1/3: move 1/3 free from each, 1/6 from each to column 2 at cost 1
    assert transport_cost(c) == pytest.approx(1 / 3)


sentences = st.lists(st.sampled_from(WORDS), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(a=sentences, b=sentences)
def test_similarity_symmetric_and_bounded(tiny_store, a, b):
    x = sentence_similarity(tuple(a), tuple(b), tiny_store)
    y = sentence_similarity(tuple(b), tuple(a), tiny_store)
    assert x == y
    assert 0.0 <= x <= 1.0


@settings(max_examples=60, deadline=None)
@given(a=sentences, b=sentences, data=st.data())
def test_similarity_permutation_invariant(tiny_store, a, b, data):
    fresh = EmbeddingStore(tiny_store.dimension, tiny_store.index, tiny_store.vectors)
    shuffled = data.draw(st.permutations(a))
    assert sentence_similarity(tuple(shuffled), tuple(b), fresh) == pytest.approx(
        sentence_similarity(tuple(a), tuple(b), tiny_store), abs=1e-9
    )


@settings(max_examples=80, deadline=None)
@given(n=st.integers(1, 4), data=st.data())
def test_equal_length_matches_assignment_oracle(tiny_store, n, data):
    a = data.draw(st.lists(st.sampled_from(WORDS), min_size=n, max_size=n))
    b = data.draw(st.lists(st.sampled_from(WORDS), min_size=n, max_size=n))
    assert sentence_similarity(tuple(a), tuple(b), tiny_store) == pytest.approx(
        assignment_oracle(a, b, tiny_store), abs=1e-6
    )
