"""How labels become descriptors and which pairs count as the same action.

Prints normalized tokens for a few raw labels and the similarity of label
pairs under the bundled toy embeddings, flagging those above the threshold.
"""

from testadapt import SimilarityConfig, normalize_text, sentence_similarity
from testadapt.datasets import toy_embeddings

LABELS = ["bs_add_task", "action_save_task.png", "What is to be done?", "btnSaveBill", "Mark as paid"]
PAIRS = [
    ("Add task", "New bill"),
    ("Save", "action_confirm.png"),
    ("Tasks", "Bills"),
    ("Settings", "Add"),
    ("Mark as done", "Mark as paid"),
    ("Test", "test"),
]


def main() -> None:
    store, cfg = toy_embeddings(), SimilarityConfig()
    for raw in LABELS:
        print(f"{raw!r:26} -> {list(normalize_text(raw))}")
    print(f"\nsimilarity, threshold {cfg.tau}:")
    for a, b in PAIRS:
        s = sentence_similarity(normalize_text(a), normalize_text(b), store)
        print(f"  {a!r:16} {b!r:22} {s:.3f} {'match' if s > cfg.tau else ''}")


if __name__ == "__main__":
    main()
