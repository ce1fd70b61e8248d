"""Deterministic GUI state machines loaded from JSON, and a test executor.

An app model declares windows with their initial widgets plus guarded
transition rules.  The runtime state keeps the widgets of every window so
that effects on background windows (e.g. a list row created when a form is
saved) persist, but only the active window is observable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import jsonschema

CLICK = "click"
FILL = "fill"
ACTIONS = (CLICK, FILL)
WIDGET_KINDS = ("button", "textfield", "label", "image", "checkbox")
ASSERTION_KINDS = ("exists", "not_exists", "has_text", "not_has_text")
NEGATED = {"not_exists": "exists", "not_has_text": "has_text"}


class ModelError(ValueError):
    """Invalid app-model or test document."""


@dataclass(frozen=True)
class Widget:
    xpath: str
    kind: str
    text: str = ""
    resource_id: str = ""
    image_file: str = ""
    bounds: tuple = (0.0, 0.0, 1.0, 1.0)
    interactable: bool = True
    supported_events: frozenset = frozenset({CLICK})

    def __post_init__(self):
        if self.kind not in WIDGET_KINDS:
            raise ModelError(f"widget {self.xpath}: unknown kind {self.kind!r}")
        if FILL in self.supported_events and self.kind != "textfield":
            raise ModelError(f"widget {self.xpath}: only textfields support fill")
        if len(self.bounds) != 4 or self.bounds[2] <= 0 or self.bounds[3] <= 0:
            raise ModelError(f"widget {self.xpath}: bounds need positive width and height")

    @property
    def center(self) -> tuple[float, float]:
        x, y, w, h = self.bounds
        return (x + w / 2.0, y + h / 2.0)


@dataclass(frozen=True)
class Event:
    action: str
    target_xpath: str
    input_text: str | None = None

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ModelError(f"unknown action {self.action!r}")
        if self.action == CLICK and self.input_text is not None:
            raise ModelError("click events carry no input text")

    def sort_key(self) -> tuple:
        return (self.target_xpath, self.action, self.input_text or "")

    def __str__(self) -> str:
        if self.action == FILL:
            return f"fill({self.target_xpath}, {self.input_text!r})"
        return f"click({self.target_xpath})"


@dataclass(frozen=True)
class Assertion:
    kind: str
    text: str
    target_xpath: str | None = None

    def __post_init__(self):
        if self.kind not in ASSERTION_KINDS:
            raise ModelError(f"unknown assertion kind {self.kind!r}")
        needs_target = self.kind in ("has_text", "not_has_text")
        if needs_target != (self.target_xpath is not None):
            raise ModelError(f"{self.kind} assertion: target_xpath presence mismatch")

    @property
    def negated(self) -> bool:
        return self.kind in NEGATED

    def positive(self) -> "Assertion":
        return replace(self, kind=NEGATED.get(self.kind, self.kind))


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    events: tuple = ()
    assertions: tuple = ()

    def __len__(self) -> int:
        return len(self.events)

    def with_events(self, events: Iterable[Event]) -> "TestCase":
        return TestCase(tuple(events), self.assertions)


@dataclass(frozen=True)
class GuiState:
    """Active window plus the current widgets of every window.

    Only ``widgets`` (the active window's content) is observable; the other
    windows are carried along so that background effects persist.
    """

    window_id: str
    windows: Mapping[str, tuple]

    @property
    def widgets(self) -> tuple:
        return self.windows[self.window_id]

    @cached_property
    def _by_xpath(self) -> dict:
        return {w.xpath: w for w in self.widgets}

    def widget(self, xpath: str) -> Widget | None:
        return self._by_xpath.get(xpath)

    def texts(self) -> list[str]:
        return [w.text for w in self.widgets]


# --- transition rules ------------------------------------------------------


@dataclass(frozen=True)
class Guard:
    widget_xpath: str
    predicate: str
    value: str | None = None

    def holds(self, widgets: Mapping[str, Widget]) -> bool:
        w = widgets.get(self.widget_xpath)
        if w is None:
            return False
        if self.predicate == "nonempty":
            return w.text != ""
        return w.text == self.value


@dataclass(frozen=True)
class SetText:
    window: str
    widget_xpath: str
    value: str | None = None
    copy_from: str | None = None


@dataclass(frozen=True)
class CreateWidget:
    window: str
    widget: Widget
    text_copy_from: str | None = None


@dataclass(frozen=True)
class RemoveWidget:
    window: str
    widget_xpath: str


@dataclass(frozen=True)
class SetInteractable:
    window: str
    widget_xpath: str
    value: bool


@dataclass(frozen=True)
class TransitionRule:
    from_window: str
    widget_xpath: str
    action: str
    to_window: str
    guards: tuple = ()
    effects: tuple = ()


@dataclass(frozen=True)
class AppModel:
    name: str
    initial_window: str
    windows: Mapping[str, tuple]
    transitions: tuple = ()
    _rules: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.initial_window not in self.windows:
            raise ModelError(f"initial window {self.initial_window!r} is not declared")
        for wid, widgets in self.windows.items():
            seen = set()
            for w in widgets:
                if w.xpath in seen:
                    raise ModelError(f"window {wid}: duplicate xpath {w.xpath}")
                seen.add(w.xpath)
        created: dict[str, set] = {}
        for rule in self.transitions:
            for eff in rule.effects:
                if isinstance(eff, CreateWidget):
                    created.setdefault(eff.window, set()).add(eff.widget.xpath)

        def known(window: str, xpath: str, where: str) -> None:
            if window not in self.windows:
                raise ModelError(f"{where}: unknown window {window!r}")
            declared = {w.xpath for w in self.windows[window]}
            if xpath not in declared and xpath not in created.get(window, ()):
                raise ModelError(f"{where}: unknown xpath {xpath!r} in window {window!r}")

        free_keys = set()
        for i, rule in enumerate(self.transitions):
            where = f"transitions[{i}]"
            known(rule.from_window, rule.widget_xpath, where)
            if rule.to_window not in self.windows:
                raise ModelError(f"{where}: unknown window {rule.to_window!r}")
            for g in rule.guards:
                known(rule.from_window, g.widget_xpath, where + ".guards")
            for eff in rule.effects:
                if isinstance(eff, CreateWidget):
                    if eff.window not in self.windows:
                        raise ModelError(f"{where}.effects: unknown window {eff.window!r}")
                    if eff.text_copy_from is not None:
                        known(rule.from_window, eff.text_copy_from, where + ".effects")
                else:
                    known(eff.window, eff.widget_xpath, where + ".effects")
                    if isinstance(eff, SetText) and eff.copy_from is not None:
                        known(rule.from_window, eff.copy_from, where + ".effects")
            key = (rule.from_window, rule.widget_xpath, rule.action)
            if not rule.guards:
                if key in free_keys:
                    raise ModelError(f"{where}: ambiguous guard-free rule for {key}")
                free_keys.add(key)
            self._rules.setdefault(key, []).append(rule)

    def rules_for(self, window: str, xpath: str, action: str) -> list:
        return self._rules.get((window, xpath, action), [])


# --- loading ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    return json.loads(resources.files("testadapt.data").joinpath(name).read_text("utf-8"))


def _validate(doc, schema_name: str, source: str) -> None:
    try:
        jsonschema.validate(doc, _schema(schema_name))
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ModelError(f"{source}: at {loc}: {exc.message}") from None


def _default_events(kind: str) -> frozenset:
    if kind == "textfield":
        return frozenset({FILL})
    if kind == "label":
        return frozenset()
    return frozenset({CLICK})


def widget_from_dict(d: Mapping) -> Widget:
    kind = d["kind"]
    return Widget(
        xpath=d["xpath"],
        kind=kind,
        text=d.get("text", ""),
        resource_id=d.get("resource_id", ""),
        image_file=d.get("image_file", ""),
        bounds=tuple(float(v) for v in d["bounds"]),
        interactable=d.get("interactable", kind != "label"),
        supported_events=frozenset(d["supported_events"]) if "supported_events" in d else _default_events(kind),
    )


def widget_to_dict(w: Widget) -> dict:
    return {
        "xpath": w.xpath,
        "kind": w.kind,
        "text": w.text,
        "resource_id": w.resource_id,
        "image_file": w.image_file,
        "bounds": list(w.bounds),
        "interactable": w.interactable,
        "supported_events": sorted(w.supported_events),
    }


def _effect_from_dict(d: Mapping, default_window: str, where: str):
    kind = d["type"]
    window = d.get("window", default_window)
    if kind == "create_widget":
        if "widget" not in d:
            raise ModelError(f"{where}: create_widget needs a widget template")
        return CreateWidget(window, widget_from_dict(d["widget"]), d.get("text_copy_from"))
    if "widget_xpath" not in d:
        raise ModelError(f"{where}: {kind} needs widget_xpath")
    if kind == "remove_widget":
        return RemoveWidget(window, d["widget_xpath"])
    if kind == "set_interactable":
        if not isinstance(d.get("value"), bool):
            raise ModelError(f"{where}: set_interactable needs a boolean value")
        return SetInteractable(window, d["widget_xpath"], d["value"])
    value, copy_from = d.get("value"), d.get("copy_from")
    if (value is None) == (copy_from is None) or (value is not None and not isinstance(value, str)):
        raise ModelError(f"{where}: set_text needs exactly one of a string value or copy_from")
    return SetText(window, d["widget_xpath"], value, copy_from)


def app_from_dict(doc: Mapping, source: str = "<app>") -> AppModel:
    _validate(doc, "app_model.schema.json", source)
    try:
        windows = {wid: tuple(widget_from_dict(w) for w in ws) for wid, ws in doc["windows"].items()}
        rules = []
        for i, r in enumerate(doc.get("transitions", [])):
            where = f"{source}: transitions[{i}]"
            guards = []
            for g in r.get("guards", []):
                if g["predicate"] == "equals" and "value" not in g:
                    raise ModelError(f"{where}: equals guard needs a value")
                guards.append(Guard(g["widget_xpath"], g["predicate"], g.get("value")))
            effects = tuple(
                _effect_from_dict(e, r["from_window"], f"{where}.effects[{j}]")
                for j, e in enumerate(r.get("effects", []))
            )
            rules.append(
                TransitionRule(r["from_window"], r["widget_xpath"], r["action"], r["to_window"], tuple(guards), effects)
            )
        return AppModel(doc["name"], doc["initial_window"], windows, tuple(rules))
    except ModelError as exc:
        msg = str(exc)
        raise ModelError(msg if msg.startswith(source) else f"{source}: {msg}") from None


def load_app(path: str | Path) -> AppModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from None
    return app_from_dict(doc, str(path))


def test_from_dict(doc: Mapping, source: str = "<test>") -> TestCase:
    _validate(doc, "test_case.schema.json", source)
    try:
        events = []
        for k, e in enumerate(doc["events"]):
            text = e.get("input_text")
            if e["action"] == FILL and text is None:
                raise ModelError(f"events[{k}]: fill needs input_text")
            events.append(Event(e["action"], e["target_xpath"], text))
        assertions = tuple(Assertion(a["kind"], a["text"], a.get("target_xpath")) for a in doc.get("assertions", []))
    except ModelError as exc:
        raise ModelError(f"{source}: {exc}") from None
    return TestCase(tuple(events), assertions)


def test_to_dict(t: TestCase) -> dict:
    events = []
    for e in t.events:
        d = {"action": e.action, "target_xpath": e.target_xpath}
        if e.action == FILL:
            d["input_text"] = e.input_text or ""
        events.append(d)
    assertions = []
    for a in t.assertions:
        d = {"kind": a.kind, "text": a.text}
        if a.target_xpath is not None:
            d["target_xpath"] = a.target_xpath
        assertions.append(d)
    return {"events": events, "assertions": assertions}


def load_test(path: str | Path) -> TestCase:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from None
    return test_from_dict(doc, str(path))


def dump_test(t: TestCase, path: str | Path) -> None:
    Path(path).write_text(json.dumps(test_to_dict(t), indent=2) + "\n", encoding="utf-8")


# test_from_dict / test_to_dict / load_test are not pytest tests
test_from_dict.__test__ = False
test_to_dict.__test__ = False


# --- execution -------------------------------------------------------------


def initial_state(app: AppModel) -> GuiState:
    return GuiState(app.initial_window, dict(app.windows))


def _is_enabled(w: Widget | None, action: str) -> bool:
    if w is None or not w.interactable or action not in w.supported_events:
        return False
    return action == CLICK or w.kind == "textfield"


def enabled_events(state: GuiState) -> list[Event]:
    """Event templates enabled in ``state``; fill templates carry no input."""
    out = []
    for w in state.widgets:
        if _is_enabled(w, CLICK):
            out.append(Event(CLICK, w.xpath))
        if _is_enabled(w, FILL):
            out.append(Event(FILL, w.xpath))
    return out


def is_enabled(event: Event, state: GuiState) -> bool:
    return _is_enabled(state.widget(event.target_xpath), event.action)


def is_present_interactable(event: Event, state: GuiState) -> bool:
    """Enabledness used for reordering: same xpath present and interactable."""
    w = state.widget(event.target_xpath)
    return w is not None and w.interactable


def _replace_widget(widgets: tuple, xpath: str, **changes) -> tuple:
    return tuple(replace(w, **changes) if w.xpath == xpath else w for w in widgets)


def _text_of(windows: Mapping[str, tuple], window: str, xpath: str) -> str:
    for w in windows[window]:
        if w.xpath == xpath:
            return w.text
    return ""


def _apply(windows: dict, eff, source: str) -> None:
    if isinstance(eff, SetText):
        value = eff.value if eff.copy_from is None else _text_of(windows, source, eff.copy_from)
        windows[eff.window] = _replace_widget(windows[eff.window], eff.widget_xpath, text=value)
    elif isinstance(eff, SetInteractable):
        windows[eff.window] = _replace_widget(windows[eff.window], eff.widget_xpath, interactable=eff.value)
    elif isinstance(eff, RemoveWidget):
        windows[eff.window] = tuple(w for w in windows[eff.window] if w.xpath != eff.widget_xpath)
    elif isinstance(eff, CreateWidget):
        new = eff.widget
        if eff.text_copy_from is not None:
            new = replace(new, text=_text_of(windows, source, eff.text_copy_from))
        current = windows[eff.window]
        if any(w.xpath == new.xpath for w in current):
            windows[eff.window] = tuple(new if w.xpath == new.xpath else w for w in current)
        else:
            windows[eff.window] = current + (new,)


def execute_event(state: GuiState, e: Event, app: AppModel) -> tuple[GuiState, bool]:
    """Fire ``e`` on ``state``.  Returns the input state and ``False`` if ``e`` is not enabled."""
    if not is_enabled(e, state):
        return state, False
    window = state.window_id
    windows = dict(state.windows)
    if e.action == FILL:
        windows[window] = _replace_widget(windows[window], e.target_xpath, text=e.input_text or "")
    current = {w.xpath: w for w in windows[window]}
    for rule in app.rules_for(window, e.target_xpath, e.action):
        if all(g.holds(current) for g in rule.guards):
            for eff in rule.effects:
                _apply(windows, eff, window)
            window = rule.to_window
            break
    return GuiState(window, windows), True


@dataclass(frozen=True)
class Trace:
    states: tuple
    executed_flags: tuple
    events: tuple

    @property
    def final_state(self) -> GuiState:
        return self.states[-1]

    @property
    def executed_events(self) -> tuple:
        return tuple(e for e, ok in zip(self.events, self.executed_flags) if ok)


def run_test(app: AppModel, t: TestCase | Sequence[Event]) -> Trace:
    """Execute events in order from a fresh initial state.

    Non-executable events leave the state unchanged and are not recorded as
    state transitions, so ``len(states) == sum(executed_flags) + 1``.
    """
    events = t.events if isinstance(t, TestCase) else tuple(t)
    state = initial_state(app)
    states = [state]
    flags = []
    for e in events:
        state, ok = execute_event(state, e, app)
        flags.append(ok)
        if ok:
            states.append(state)
    return Trace(tuple(states), tuple(flags), tuple(events))


def check_assertion(a: Assertion, state: GuiState) -> bool:
    """Concrete truth value of ``a`` on ``state``."""
    if a.kind in ("exists", "not_exists"):
        holds = any(w.text == a.text for w in state.widgets)
    else:
        w = state.widget(a.target_xpath)
        holds = w is not None and w.text == a.text
    return not holds if a.negated else holds


def check_assertions(state: GuiState, assertions: Iterable[Assertion]) -> list[bool]:
    return [check_assertion(a, state) for a in assertions]
