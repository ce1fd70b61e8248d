import numpy as np
import pytest

from testadapt.datasets import toy_embeddings
from testadapt.textsem import EmbeddingStore, SimilarityConfig


@pytest.fixture(scope="session")
def store() -> EmbeddingStore:
    return toy_embeddings()


@pytest.fixture(scope="session")
def sim_cfg() -> SimilarityConfig:
    return SimilarityConfig()


@pytest.fixture(scope="session")
def tiny_store() -> EmbeddingStore:
    """Eight random words in 8 dimensions."""
    rng = np.random.default_rng(7)
    words = ["alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma", "zeta"]
    return EmbeddingStore.from_dict({w: rng.normal(size=8) for w in words})
