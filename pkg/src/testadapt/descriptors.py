"""Natural-language descriptors of widgets, events and assertions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import PurePosixPath, PureWindowsPath

from .appmodel import CLICK, Assertion, Event, GuiState, Widget
from .textsem import NormalizedText, normalize_text

WIDGET_TEXT = "widget_text"
IMAGE_FILENAME = "image_filename"
RESOURCE_ID = "resource_id"
NEAREST_LABEL = "nearest_label"
ASSERTION_TEXT = "assertion_text"


class DescriptorError(LookupError):
    pass


@dataclass(frozen=True)
class Descriptor:
    text: NormalizedText
    source: str

    def __str__(self) -> str:
        return " ".join(self.text)


def _file_stem(name: str) -> str:
    base = PureWindowsPath(PurePosixPath(name).name).name
    return base.rsplit(".", 1)[0] if "." in base else base


def nearest_label(target: Widget, state: GuiState) -> Widget | None:
    """Closest label/button with text, by center distance; ties go to the smaller xpath."""
    cx, cy = target.center
    best, best_key = None, None
    for w in state.widgets:
        if w.xpath == target.xpath or w.kind not in ("label", "button") or not w.text:
            continue
        wx, wy = w.center
        key = (math.hypot(wx - cx, wy - cy), w.xpath)
        if best_key is None or key < best_key:
            best, best_key = w, key
    return best


def _field_descriptor(w: Widget, state: GuiState) -> Descriptor:
    label = nearest_label(w, state)
    if label is not None:
        return Descriptor(normalize_text(label.text), NEAREST_LABEL)
    return Descriptor(normalize_text(w.resource_id), RESOURCE_ID)


def widget_descriptor(w: Widget, state: GuiState) -> Descriptor:
    if w.text:
        return Descriptor(normalize_text(w.text), WIDGET_TEXT)
    if w.kind == "textfield":
        return _field_descriptor(w, state)
    if w.image_file:
        return Descriptor(normalize_text(_file_stem(w.image_file)), IMAGE_FILENAME)
    return Descriptor(normalize_text(w.resource_id), RESOURCE_ID)


def event_descriptor(e: Event, state: GuiState) -> Descriptor:
    w = state.widget(e.target_xpath)
    if w is None:
        raise DescriptorError(f"unknown widget {e.target_xpath!r} in window {state.window_id!r}")
    if e.action == CLICK:
        return widget_descriptor(w, state)
    return _field_descriptor(w, state)


def assertion_descriptor(o: Assertion, donor_final_state: GuiState) -> Descriptor:
    if o.kind in ("exists", "not_exists"):
        return Descriptor(normalize_text(o.text), ASSERTION_TEXT)
    w = donor_final_state.widget(o.target_xpath)
    if w is None:
        raise DescriptorError(f"assertion target {o.target_xpath!r} absent from the logged state")
    return widget_descriptor(w, donor_final_state)
