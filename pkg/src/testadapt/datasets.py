"""Bundled fixtures: the task/bills working example and the toy embedding."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .appmodel import AppModel, TestCase, load_app, load_test
from .textsem import EmbeddingStore, load_embeddings


def data_path(name: str) -> Path:
    return Path(str(resources.files("testadapt.data").joinpath(name)))


def fixture_path(name: str) -> Path:
    return data_path("fixtures") / name


def toy_embeddings_path() -> Path:
    return data_path("toy_embeddings.txt")


@lru_cache(maxsize=None)
def toy_embeddings() -> EmbeddingStore:
    return load_embeddings(toy_embeddings_path())


def tasks_app() -> AppModel:
    """Donor: a task list where a new task is saved, then ticked off."""
    return load_app(fixture_path("tasks_app.json"))


def tasks_test() -> TestCase:
    return load_test(fixture_path("tasks_test.json"))


def bills_app() -> AppModel:
    """Recipient: a bill reminder where a bill is saved, then marked paid on a date."""
    return load_app(fixture_path("bills_app.json"))


def bills_reference_test() -> TestCase:
    """Hand-adapted version of the donor test for the bills app."""
    return load_test(fixture_path("bills_reference_test.json"))
