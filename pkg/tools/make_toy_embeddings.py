"""Regenerate src/testadapt/data/toy_embeddings.txt.

Each concept gets its own orthonormal axis; a word is its concept axis plus a
shared "generic" component and a little per-word noise, so synonyms sit close
(cosine ~0.94) and unrelated words keep a small positive cosine (~0.25).
"""

from pathlib import Path

import numpy as np

CONCEPTS = {
    "add": ["add", "new", "create", "plus", "insert"],
    "save": ["save", "confirm", "ok", "apply", "submit"],
    "item": ["task", "bill", "item", "todo", "entry", "expense", "payment"],
    "done": ["done", "paid", "complete", "finish", "finished", "check"],
    "test": ["test", "trial"],
    "amount": ["amount", "price", "cost", "sum", "value", "total"],
    "name": ["name", "title", "label", "subject"],
    "mark": ["mark", "flag", "tick"],
    "delete": ["delete", "remove", "trash", "discard", "erase"],
    "cancel": ["cancel", "back", "close", "dismiss"],
    "setting": ["setting", "preference", "option", "config"],
    "date": ["date", "day", "calendar", "due", "deadline"],
    "search": ["search", "find", "query", "lookup"],
    "cart": ["cart", "basket", "bag"],
    "buy": ["buy", "purchase", "checkout", "order"],
    "edit": ["edit", "modify", "change", "update"],
    "list": ["list", "overview", "home"],
    "category": ["category", "group", "folder", "tag"],
    "note": ["note", "memo", "journal"],
    "about": ["about", "info", "help"],
    "share": ["share", "send", "export"],
    "sort": ["sort", "arrange"],
    "account": ["account", "profile", "user"],
    "reminder": ["reminder", "alert", "notification", "alarm"],
    "priority": ["priority", "importance", "urgent"],
    "color": ["color", "colour", "theme"],
    "product": ["product", "article", "goods"],
    "quantity": ["quantity", "count", "number"],
    "description": ["description", "detail", "comment"],
    "payee": ["payee", "recipient", "vendor"],
    "shop": ["shop", "store", "market"],
    "login": ["login", "signin"],
    "password": ["password", "passcode", "pin"],
    "email": ["email", "mail"],
    "repeat": ["repeat", "recur", "recurring"],
    "stat": ["stat", "chart", "report"],
    "menu": ["menu", "more", "drawer"],
    "filter": ["filter", "refine"],
    "archive": ["archive", "hide"],
    "size": ["size", "dimension"],
    "shirt": ["shirt", "tshirt", "tee"],
    "usb": ["usb", "drive", "stick"],
}

GENERIC = 0.577  # weight of the shared axis
NOISE = 0.30
DIM = 64


def build(seed: int = 20210501) -> dict:
    rng = np.random.default_rng(seed)
    n = len(CONCEPTS) + 1
    assert n <= DIM
    basis, _ = np.linalg.qr(rng.standard_normal((DIM, DIM)))
    generic = basis[:, 0]
    out = {}
    for k, (concept, words) in enumerate(CONCEPTS.items(), start=1):
        axis = basis[:, k]
        for w in words:
            assert w not in out, w
            v = axis + GENERIC * generic + NOISE * rng.standard_normal(DIM) / np.sqrt(DIM)
            out[w] = v / np.linalg.norm(v)
    return out


def main() -> None:
    vecs = build()
    target = Path(__file__).resolve().parents[1] / "src" / "testadapt" / "data" / "toy_embeddings.txt"
    lines = [f"{len(vecs)} {DIM}"]
    for w, v in vecs.items():
        lines.append(w + " " + " ".join(f"{x:.6f}" for x in v))
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(vecs)} words to {target}")


if __name__ == "__main__":
    main()
