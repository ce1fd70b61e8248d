"""Seeded generator of donor/recipient app pairs over the toy vocabulary.

Both apps implement "create an entry through a form, then (optionally)
complete it"; the recipient renames everything with synonyms, reorders and
paginates its form, adds unmatched fields, hides completion behind a
confirmation dialog and scatters distractor windows around the main screen.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .appmodel import AppModel, Assertion, Event, TestCase, app_from_dict

SYNONYMS = {
    "entity": ["task", "bill", "todo", "entry", "expense", "payment", "item"],
    "add": ["add", "new", "create", "plus", "insert"],
    "save": ["save", "confirm", "apply", "submit"],
    "done": ["done", "complete", "finish", "paid"],
    "name": ["name", "title", "subject", "label"],
    "amount": ["amount", "price", "cost", "value", "total"],
    "date": ["date", "day", "deadline", "due"],
    "note": ["note", "memo", "journal"],
    "category": ["category", "group", "folder", "tag"],
    "description": ["description", "detail", "comment"],
    "quantity": ["quantity", "count", "number"],
}
FIELD_CONCEPTS = ["name", "amount", "date", "note", "category", "description", "quantity"]
DISTRACTORS = ["Settings", "About", "Share", "Sort", "Filter", "Account", "Statistics", "Theme", "Archive", "Help"]
SUB_BUTTONS = ["Export", "Reset", "Sync", "Language", "Rate", "Backup", "Import", "Privacy"]
INPUTS = ["Rent", "Gym", "Milk", "42", "Friday", "Home", "Call Bob", "Water", "Tax", "Coffee"]


def _pick2(rng: random.Random, concept: str) -> tuple[str, str]:
    a, b = rng.sample(SYNONYMS[concept], 2)
    return a, b


def _title(word: str) -> str:
    return word[:1].upper() + word[1:]


def _w(xpath, kind, y, text="", image="", rid="", x=16, w=328, h=48, **extra):
    d = {"xpath": xpath, "kind": kind, "bounds": [x, y, w, h]}
    if text:
        d["text"] = text
    if image:
        d["image_file"] = image
    if rid:
        d["resource_id"] = rid
    d.update(extra)
    return d


def _form(prefix: str, fields, y0: int = 80) -> list:
    """Labels with a text field just below each, spaced well apart."""
    out = []
    for k, (key, label) in enumerate(fields):
        y = y0 + 90 * k
        out.append(_w(f"{prefix}/lbl_{key}", "label", y, text=label, h=24))
        out.append(_w(f"{prefix}/{key}", "textfield", y + 28, rid=f"et_{key}"))
    return out


@dataclass(frozen=True)
class SyntheticPair:
    name: str
    donor_app: AppModel
    donor_test: TestCase
    recipient_app: AppModel
    donor_doc: dict
    recipient_doc: dict


def make_pair(seed: int) -> SyntheticPair:
    rng = random.Random(seed)
    ent_d, ent_r = _pick2(rng, "entity")
    add_d, add_r = _pick2(rng, "add")
    save_d, save_r = _pick2(rng, "save")
    done_d, done_r = _pick2(rng, "done")
    n_fields = rng.randint(2, 3)
    concepts = rng.sample(FIELD_CONCEPTS, n_fields + 1)
    used, extra = concepts[:n_fields], concepts[n_fields]
    labels = {c: _pick2(rng, c) for c in concepts}
    inputs = rng.sample(INPUTS, n_fields)
    delete_flow = rng.random() < 0.6
    paginate = n_fields >= 2 and rng.random() < 0.7
    confirm = rng.random() < 0.7
    n_distract = rng.randint(3, 6)

    # --- donor -------------------------------------------------------------
    d_fields = [(c, _title(labels[c][0])) for c in used]
    donor = {
        "name": f"donor-{seed}",
        "initial_window": "main",
        "windows": {
            "main": [
                _w("/main/title", "label", 0, text=f"My {ent_d}s", h=56),
                _w("/main/add", "button", 560, image=f"ic_{add_d}_{ent_d}.png", x=290, w=56, h=56),
            ],
            "editor": _form("/editor", d_fields)
            + [_w("/editor/save", "button", 560, text=_title(save_d), x=200, w=140, h=56)],
            "list": [
                _w("/list/title", "label", 0, text=f"{_title(ent_d)}s", h=56),
                _w("/list/add", "button", 560, image=f"ic_{add_d}_{ent_d}.png", x=290, w=56, h=56),
            ],
            "details": [
                _w("/details/back", "button", 0, text="Back", w=100, h=56),
                _w("/details/done", "button", 400, text=f"Mark as {done_d}", x=190, w=150),
            ],
        },
        "transitions": [
            {"from_window": "main", "widget_xpath": "/main/add", "action": "click", "to_window": "editor"},
            {"from_window": "list", "widget_xpath": "/list/add", "action": "click", "to_window": "editor"},
            {
                "from_window": "editor", "widget_xpath": "/editor/save", "action": "click", "to_window": "list",
                "guards": [{"widget_xpath": f"/editor/{used[0]}", "predicate": "nonempty"}],
                "effects": [
                    {"type": "create_widget", "window": "list", "text_copy_from": f"/editor/{used[0]}",
                     "widget": _w("/list/row", "button", 120, rid="row")},
                ] + [{"type": "set_text", "widget_xpath": f"/editor/{c}", "value": ""} for c in used],
            },
            {"from_window": "list", "widget_xpath": "/list/row", "action": "click", "to_window": "details"},
            {"from_window": "details", "widget_xpath": "/details/back", "action": "click", "to_window": "list"},
            {
                "from_window": "details", "widget_xpath": "/details/done", "action": "click", "to_window": "list",
                "effects": [{"type": "remove_widget", "window": "list", "widget_xpath": "/list/row"}],
            },
        ],
    }
    events = [Event("click", "/main/add")]
    events += [Event("fill", f"/editor/{c}", v) for c, v in zip(used, inputs)]
    events.append(Event("click", "/editor/save"))
    if delete_flow:
        events += [Event("click", "/list/row"), Event("click", "/details/done")]
        assertions = (Assertion("not_exists", inputs[0]),)
    else:
        assertions = (Assertion("exists", inputs[0]), Assertion("has_text", f"{_title(ent_d)}s", "/list/title"))

    # --- recipient ---------------------------------------------------------
    r_used = list(used)
    rng.shuffle(r_used)
    r_fields = [(c, _title(labels[c][1])) for c in r_used + [extra]]
    if paginate:
        cut = rng.randint(1, len(r_fields) - 1)
        page1, page2 = r_fields[:cut], r_fields[cut:]
        if all(k != used[0] for k, _ in page2):
            # the row text is copied from the page holding the save button
            page1, page2 = page2, page1
    else:
        page1, page2 = r_fields, []
    form_windows = ["form1"] + (["form2"] if page2 else [])
    first_key = used[0]
    first_window = form_windows[-1]
    windows = {
        "main": [
            _w("/main/title", "label", 0, text=f"{_title(ent_r)} manager", h=56),
            _w("/main/add", "button", 60, image=f"action_{add_r}.png", x=300, w=56, h=56),
        ],
        "form1": [_w("/form1/cancel", "button", 0, text="Cancel", w=100, h=56)] + _form("/form1", page1),
        "list": [
            _w("/list/title", "label", 0, text=f"{_title(ent_r)}s", h=56),
            _w("/list/add", "button", 60, image=f"action_{add_r}.png", x=300, w=56, h=56),
        ],
        "details": [
            _w("/details/back", "button", 0, text="Back", w=100, h=56),
            _w("/details/edit", "button", 400, text="Edit", w=150),
            _w("/details/done", "button", 400, text=f"Mark as {done_r}", x=190, w=150),
        ],
    }
    transitions = [
        {"from_window": "main", "widget_xpath": "/main/add", "action": "click", "to_window": "form1"},
        {"from_window": "list", "widget_xpath": "/list/add", "action": "click", "to_window": "form1"},
        {"from_window": "form1", "widget_xpath": "/form1/cancel", "action": "click", "to_window": "main"},
        {"from_window": "list", "widget_xpath": "/list/row", "action": "click", "to_window": "details"},
        {"from_window": "details", "widget_xpath": "/details/back", "action": "click", "to_window": "list"},
    ]
    save_button = _w("/{}/save", "button", 0, image=f"action_{save_r}.png", x=300, w=56, h=56)
    clear = [{"type": "set_text", "window": w, "widget_xpath": f"/{w}/{k}", "value": ""}
             for w, page in zip(form_windows, [page1, page2]) for k, _ in page]
    save_rule = {
        "widget_xpath": None, "action": "click", "to_window": "list",
        "guards": [],
        "effects": [
            {"type": "create_widget", "window": "list", "text_copy_from": f"/{first_window}/{first_key}",
             "widget": _w("/list/row", "button", 130, rid="row")},
        ] + clear,
    }
    last = form_windows[-1]
    if page2:
        windows["form1"].append(_w("/form1/next", "button", 560, text="Next", x=200, w=140, h=56))
        windows["form2"] = [_w("/form2/prev", "button", 0, text="Previous", w=120, h=56)] + _form("/form2", page2)
        transitions += [
            {"from_window": "form1", "widget_xpath": "/form1/next", "action": "click", "to_window": "form2"},
            {"from_window": "form2", "widget_xpath": "/form2/prev", "action": "click", "to_window": "form1"},
        ]
    windows[last].append({**save_button, "xpath": f"/{last}/save"})
    save_rule.update(from_window=last, widget_xpath=f"/{last}/save")
    save_rule["guards"] = [{"widget_xpath": f"/{last}/{first_key}", "predicate": "nonempty"}]
    transitions.append(save_rule)

    removal = [{"type": "remove_widget", "window": "list", "widget_xpath": "/list/row"}]
    if confirm:
        windows["confirm"] = [
            _w("/confirm/msg", "label", 200, text="Are you sure?", h=24),
            _w("/confirm/yes", "button", 300, text="Yes", w=150),
            _w("/confirm/no", "button", 300, text="No", x=190, w=150),
        ]
        transitions += [
            {"from_window": "details", "widget_xpath": "/details/done", "action": "click", "to_window": "confirm"},
            {"from_window": "confirm", "widget_xpath": "/confirm/no", "action": "click", "to_window": "details"},
            {"from_window": "confirm", "widget_xpath": "/confirm/yes", "action": "click", "to_window": "list", "effects": removal},
        ]
    else:
        transitions.append(
            {"from_window": "details", "widget_xpath": "/details/done", "action": "click", "to_window": "list", "effects": removal}
        )

    for k, label in enumerate(rng.sample(DISTRACTORS, n_distract)):
        wid = f"aux{k}"
        windows["main"].append(_w(f"/main/{wid}", "button", 140 + 60 * k, text=label, w=200))
        subs = rng.sample(SUB_BUTTONS, 3)
        windows[wid] = [_w(f"/{wid}/title", "label", 0, text=label, h=56)] + [
            _w(f"/{wid}/b{j}", "button", 80 + 60 * j, text=s, w=200) for j, s in enumerate(subs)
        ] + [_w(f"/{wid}/back", "button", 560, text="Back", w=120, h=56)]
        transitions.append({"from_window": "main", "widget_xpath": f"/main/{wid}", "action": "click", "to_window": wid})
        transitions.append({"from_window": wid, "widget_xpath": f"/{wid}/back", "action": "click", "to_window": "main"})

    recipient = {"name": f"recipient-{seed}", "initial_window": "main", "windows": windows, "transitions": transitions}
    return SyntheticPair(
        name=f"pair{seed}",
        donor_app=app_from_dict(donor, f"donor-{seed}"),
        donor_test=TestCase(tuple(events), assertions),
        recipient_app=app_from_dict(recipient, f"recipient-{seed}"),
        donor_doc=donor,
        recipient_doc=recipient,
    )
