"""Adapt GUI tests, oracles included, from a donor app to a similar recipient app."""

from .appmodel import (
    AppModel,
    Assertion,
    Event,
    GuiState,
    ModelError,
    TestCase,
    Widget,
    check_assertions,
    enabled_events,
    execute_event,
    initial_state,
    load_app,
    load_test,
    run_test,
)
from .donor import DonorProfile, extract_donor_profile
from .evolve import SearchConfig, run_search
from .fitness import FitnessReport, evaluate
from .guigraph import GuiGraph
from .matching import MatchContext, events_match, find_best_mapping, is_valid_mapping
from .pipeline import Adaptation, adapt
from .quality import structural_quality
from .textsem import EmbeddingStore, SimilarityConfig, is_sem_sim, load_embeddings, normalize_text, sentence_similarity

__version__ = "0.1.0"
