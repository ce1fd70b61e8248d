"""Adapt the bundled to-do test to the bills app and show what was matched.

Run with ``python3 demos/working_example.py [seed]``.  The donor test adds a
task called "Test", saves it and ticks it off, then checks "Test" is gone.
The recipient app names things differently (bills, payees, an image save
button) and needs extra steps, so the search has to find an equivalent flow.

Some seeds score a perfect 1: the donor's typed "Test" is credited to a
click on the "Test" row, and the not_exists check is witnessed by the payee
field being cleared when the editor reopens.  Both are legal under the
matching and applicability rules, even though a person would not pick them.
"""

import sys

from testadapt import SearchConfig, adapt
from testadapt.datasets import bills_app, tasks_app, tasks_test, toy_embeddings


def show(label, test):
    print(label)
    for e in test.events:
        extra = f" {e.input_text!r}" if e.input_text is not None else ""
        print(f"  {e.action:5} {e.target_xpath}{extra}")
    for a in test.assertions:
        print(f"  assert {a.kind}({a.text!r}{', ' + a.target_xpath if a.target_xpath else ''})")


def main(seed: int) -> None:
    store = toy_embeddings()
    cfg = SearchConfig(seed=seed, budget_generations=100).with_population(40)
    run = adapt(cfg, tasks_app(), tasks_test(), bills_app(), store)

    show("donor test:", tasks_test())
    show(f"\nadapted test (fitness {run.reduced_report.fraction}):", run.adapted_test)

    profile, rep = run.search.profile, run.reduced_report
    print("\nmatched events (recipient <- donor):")
    for r, d in sorted(rep.mapping):
        print(f"  {rep.recipient_descriptors[r]!s:24} <- {profile.event_descriptors[d]}")

    traj = run.search.trajectory
    print(f"\n{run.search.generations} generations, best fitness by generation:")
    print("  " + " ".join(f"{v:.2f}" for v in traj[:: max(1, len(traj) // 12)]))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2)
