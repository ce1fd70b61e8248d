"""Full search against its two ablations on generated app pairs.

Each pair has a donor app with a short create or delete flow and a recipient
app that renames everything, reorders form fields, may split the form over
two pages, asks for confirmation, and hides the flow among distractor
screens.  ``basic`` drops greedy seeding and fitness-driven mutation;
``random`` also drops roulette selection and elitism.

    python3 demos/compare_modes.py [pairs] [seeds]
"""

import statistics
import sys
import time

from testadapt import SearchConfig, run_search
from testadapt.datasets import toy_embeddings
from testadapt.synthetic import make_pair

MODES = ("full", "basic", "random")


def main(n_pairs: int, n_seeds: int) -> None:
    store = toy_embeddings()
    scores = {m: [] for m in MODES}
    start = time.perf_counter()
    print(f"{'pair':28}" + "".join(f"{m:>9}" for m in MODES))
    for p in range(n_pairs):
        pair = make_pair(p)
        row = {}
        for mode in MODES:
            finals = []
            for seed in range(n_seeds):
                cfg = SearchConfig(seed=seed, mode=mode, budget_generations=50).with_population(40)
                res = run_search(cfg, pair.donor_app, pair.donor_test, pair.recipient_app, store)
                finals.append(res.best_report.score)
            scores[mode] += finals
            row[mode] = statistics.mean(finals)
        print(f"{pair.name:28}" + "".join(f"{row[m]:9.3f}" for m in MODES))
    print(f"{'mean':28}" + "".join(f"{statistics.mean(scores[m]):9.3f}" for m in MODES))
    wins = sum(f > r for f, r in zip(scores["full"], scores["random"]))
    print(f"\nfull beat random in {wins} of {len(scores['full'])} paired runs ({time.perf_counter() - start:.0f}s)")


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:3]]
    main(*(args + [3, 3][len(args):]))
