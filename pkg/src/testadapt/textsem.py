"""Text normalization, word embeddings and Word Mover's Distance similarity.

Descriptors are compared as bags of embedded words.  The transport cost
between two bags is the exact optimum of a small linear program (no entropic
smoothing), and the distance is mapped onto a ``[0, 1]`` similarity with
``1 - wmd / 2`` since the ground cost between unit vectors never exceeds 2.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

NormalizedText = tuple  # tuple[str, ...] of lowercase stems

_TOKEN_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


class EmbeddingLoadError(ValueError):
    """Raised when an embedding file cannot be parsed."""


@lru_cache(maxsize=None)
def stop_words() -> frozenset[str]:
    """The bundled English stop-word list."""
    text = resources.files("testadapt.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def stem(token: str) -> str:
    """Strip plural suffixes. Idempotent: ``stem(stem(t)) == stem(t)``."""
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if token.endswith("sses"):
        return token[:-2]
    if (
        len(token) > 3
        and token.endswith("s")
        and not token.endswith(("ss", "us", "is"))
    ):
        return token[:-1]
    return token


@lru_cache(maxsize=65536)
def normalize_text(raw: str) -> NormalizedText:
    """Split ``raw`` into lowercase stems, dropping stop-words.

    Splits on whitespace, underscores, punctuation, digit/letter and
    camel-case boundaries.  Characters outside ASCII letters and digits act
    as separators.
    """
    stops = stop_words()
    out = []
    for piece in _TOKEN_RE.findall(raw or ""):
        tok = piece.lower()
        if tok in stops:
            continue
        tok = stem(tok)
        if tok and tok not in stops:
            out.append(tok)
    return tuple(out)


@dataclass(frozen=True)
class SimilarityConfig:
    tau: float = 0.65
    oov_policy: str = "drop"

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")
        if self.oov_policy != "drop":
            raise ValueError("only the 'drop' out-of-vocabulary policy is supported")


@dataclass(eq=False)
class EmbeddingStore:
    """Immutable word -> unit-vector table.

    Similarity values are memoised per store; the cache is keyed on the
    canonical (sorted) token bags so that lookups are order independent.
    """

    dimension: int
    index: dict
    vectors: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def from_dict(cls, entries: dict[str, Sequence[float]]) -> "EmbeddingStore":
        words = list(entries)
        if not words:
            raise ValueError("cannot build an empty embedding store")
        mat = np.asarray([entries[w] for w in words], dtype=float)
        if mat.ndim != 2:
            raise ValueError("all vectors must share one dimension")
        norms = np.linalg.norm(mat, axis=1)
        if np.any(norms == 0):
            bad = words[int(np.argmin(norms))]
            raise ValueError(f"zero vector for word {bad!r}")
        return cls(mat.shape[1], {w: i for i, w in enumerate(words)}, mat / norms[:, None])

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.index[word]]

    def entries(self) -> dict[str, np.ndarray]:
        return {w: self.vectors[i] for w, i in self.index.items()}


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Parse a word2vec-style text file: ``<count> <dimension>`` then one word per line."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or not all(h.isdigit() for h in header):
            raise EmbeddingLoadError(f"{path}: malformed header at line 0")
        count, dim = int(header[0]), int(header[1])
        if dim <= 0:
            raise EmbeddingLoadError(f"{path}: dimension must be positive")
        index: dict[str, int] = {}
        rows = []
        n_lines = 0
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            n_lines += 1
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise EmbeddingLoadError(
                    f"{path}: expected {dim + 1} fields at line {lineno}, found {len(parts)}"
                )
            try:
                vec = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise EmbeddingLoadError(f"{path}: non-numeric value at line {lineno}") from None
            if not np.all(np.isfinite(vec)):
                raise EmbeddingLoadError(f"{path}: non-finite value at line {lineno}")
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise EmbeddingLoadError(f"zero vector at line {lineno}")
            if parts[0] in index:
                continue
            index[parts[0]] = len(rows)
            rows.append(vec / norm)
    if n_lines != count:
        raise EmbeddingLoadError(f"{path}: header announces {count} entries, found {n_lines}")
    if not rows:
        raise EmbeddingLoadError(f"{path}: no entries")
    return EmbeddingStore(dim, index, np.vstack(rows))


def transport_cost(cost: np.ndarray, a: np.ndarray | None = None, b: np.ndarray | None = None) -> float:
    """Exact optimal-transport value for cost matrix ``cost`` and masses ``a``, ``b``.

    Masses default to uniform.  Solved as a transportation LP with HiGHS.
    """
    n, m = cost.shape
    a = np.full(n, 1.0 / n) if a is None else np.asarray(a, dtype=float)
    b = np.full(m, 1.0 / m) if b is None else np.asarray(b, dtype=float)
    if n == 1:
        return float(cost[0] @ b)
    if m == 1:
        return float(cost[:, 0] @ a)
    rows = np.kron(np.eye(n), np.ones(m))
    cols = np.kron(np.ones(n), np.eye(m))
    # one equality is redundant since both marginals sum to one
    a_eq = np.vstack([rows, cols[:-1]])
    b_eq = np.concatenate([a, b[:-1]])
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(res.fun)


def word_movers_distance(a: Iterable[str], b: Iterable[str], store: EmbeddingStore) -> float | None:
    """WMD between in-vocabulary tokens of ``a`` and ``b``; ``None`` if either side is empty."""
    ra = [t for t in a if t in store]
    rb = [t for t in b if t in store]
    if not ra or not rb:
        return None
    va = store.vectors[[store.index[t] for t in ra]]
    vb = store.vectors[[store.index[t] for t in rb]]
    diff = va[:, None, :] - vb[None, :, :]
    cost = np.sqrt(np.maximum((diff * diff).sum(axis=-1), 0.0))
    return transport_cost(cost)


def sentence_similarity(a: NormalizedText, b: NormalizedText, store: EmbeddingStore) -> float:
    """Similarity in ``[0, 1]``: ``1 - WMD / 2`` over in-vocabulary tokens.

    When either side has no in-vocabulary token, falls back to equality of
    the normalized token bags (order is ignored, as it is by the transport).
    """
    ka, kb = tuple(sorted(a)), tuple(sorted(b))
    if ka > kb:
        ka, kb = kb, ka
    key = (ka, kb)
    hit = store._cache.get(key)
    if hit is not None:
        return hit
    if ka == kb:
        value = 1.0
    else:
        wmd = word_movers_distance(ka, kb, store)
        value = 0.0 if wmd is None else min(1.0, max(0.0, 1.0 - wmd / 2.0))
    with store._lock:
        store._cache[key] = value
    return value


def is_sem_sim(a: NormalizedText, b: NormalizedText, store: EmbeddingStore, cfg: SimilarityConfig) -> bool:
    return sentence_similarity(a, b, store) > cfg.tau
