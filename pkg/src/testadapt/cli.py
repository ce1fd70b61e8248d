"""Command line entry point: ``adapt`` a donor test, or score one with ``eval-qs``.

Exit status 0 on success, 2 on invalid input or an unwritable output
directory, 3 when the donor test does not replay on the donor app.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .appmodel import FILL, ModelError, load_app, load_test, test_to_dict
from .donor import DonorError
from .evolve import SearchConfig
from .pipeline import Adaptation, adapt
from .quality import structural_quality
from .textsem import EmbeddingLoadError, load_embeddings, normalize_text, sentence_similarity

EXIT_OK, EXIT_INPUT, EXIT_DONOR = 0, 2, 3

# names of the search parameters echoed in the summary
SEARCH_PARAMETERS = (
    "tau", "population_size", "elite_size", "max_initial_length", "n_random",
    "n_greedy", "crossover_prob", "random_mut_prob", "fitness_mut_prob",
)


class InputError(Exception):
    pass


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def load_config(path: Path | None, overrides: dict) -> SearchConfig:
    """Defaults, then the JSON config file, then command-line overrides."""
    values: dict = {}
    if path is not None:
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: malformed JSON at line {exc.lineno}") from None
        if not isinstance(doc, dict):
            raise InputError(f"{path}: config must be a JSON object")
        unknown = sorted(set(doc) - set(SearchConfig.field_names()))
        if unknown:
            raise InputError(f"{path}: unknown config keys {unknown}")
        values.update(doc)
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SearchConfig(**values)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid search configuration: {exc}") from None


def mapping_report(run: Adaptation, store) -> dict:
    rep = run.reduced_report
    profile = run.search.profile
    pairs = []
    for r, d in sorted(rep.mapping):
        e_r, e_d = rep.normalized_test.events[r], profile.events[d]
        d_r, d_d = rep.recipient_descriptors[r], profile.event_descriptors[d]
        entry = {
            "recipient_index": r,
            "donor_index": d,
            "recipient_event": test_to_dict_event(e_r),
            "donor_event": test_to_dict_event(e_d),
            "recipient_descriptor": list(d_r.text),
            "donor_descriptor": list(d_d.text),
            "descriptor_similarity": round(sentence_similarity(d_r.text, d_d.text, store), 12),
        }
        if e_d.action == FILL and e_r.action != FILL:
            entry["donor_input_similarity"] = round(
                sentence_similarity(normalize_text(e_d.input_text or ""), d_r.text, store), 12
            )
        pairs.append(entry)
    assertions = []
    for k, rec in enumerate(profile.assertion_records):
        assertions.append({
            "donor_index": k,
            "kind": rec.assertion.kind,
            "text": rec.assertion.text,
            "descriptor": list(rec.descriptor.text),
            "applicable": k in rep.applicable,
            "recipient_target": rep.retarget.get(k),
        })
    return {"fitness": str(rep.fraction), "pairs": pairs, "assertions": assertions}


def test_to_dict_event(e) -> dict:
    d = {"action": e.action, "target_xpath": e.target_xpath}
    if e.input_text is not None:
        d["input_text"] = e.input_text
    return d


test_to_dict_event.__test__ = False


def write_report(run: Adaptation, cfg: SearchConfig, inputs: dict, store, out_dir: Path) -> None:
    """Write the adapted test and the run artifacts; raises OSError if ``out_dir`` is unusable."""
    out_dir.mkdir(parents=True, exist_ok=True)

    def dump(name: str, obj) -> None:
        (out_dir / name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    dump("adapted_test.json", test_to_dict(run.adapted_test))
    dump("mapping.json", mapping_report(run, store))
    with (out_dir / "trajectory.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "best_fitness"])
        for g, f in enumerate(run.search.trajectory):
            w.writerow([g, repr(float(f))])
    (out_dir / "gui_graph.txt").write_text(run.search.context.graph.dump(), encoding="utf-8")
    summary = {
        "parameters": {k: getattr(cfg, k) for k in SEARCH_PARAMETERS},
        "config": {k: getattr(cfg, k) for k in SearchConfig.field_names()},
        "seed": cfg.seed,
        "mode": cfg.mode,
        "inputs": inputs,
        "generations": run.search.generations,
        "search_fitness": run.search.best_report.score,
        "final_fitness": run.fitness,
        "final_fraction": str(run.reduced_report.fraction),
        "adapted_events": len(run.adapted_test.events),
        "injected_assertions": len(run.adapted_test.assertions),
    }
    dump("summary.json", summary)


def run_adapt(args: argparse.Namespace) -> int:
    paths = {
        "donor_app": Path(args.donor_app),
        "donor_test": Path(args.donor_test),
        "recipient_app": Path(args.recipient_app),
        "embeddings": Path(args.embeddings),
    }
    try:
        for name, p in paths.items():
            if not p.is_file():
                raise InputError(f"{name.replace('_', '-')}: no such file {p}")
        overrides = {
            "seed": args.seed,
            "mode": args.mode,
            "budget_generations": args.generations,
            "budget_wall_clock": args.time_budget,
        }
        cfg = load_config(Path(args.config) if args.config else None, overrides)
        app_d = load_app(paths["donor_app"])
        t_d = load_test(paths["donor_test"])
        app_r = load_app(paths["recipient_app"])
        store = load_embeddings(paths["embeddings"])
        inputs = {name: {"path": str(p), "sha256": _digest(p)} for name, p in paths.items()}
        if args.config:
            inputs["config"] = {"path": args.config, "sha256": _digest(Path(args.config))}
    except (InputError, ModelError, EmbeddingLoadError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        run = adapt(cfg, app_d, t_d, app_r, store)
    except DonorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DONOR

    out_dir = Path(args.out)
    try:
        write_report(run, cfg, inputs, store, out_dir)
    except OSError as exc:
        print(f"error: cannot write to {out_dir}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"fitness {run.fitness:.4f} after {run.search.generations} generations; outputs in {out_dir}")
    return EXIT_OK


def run_eval_qs(args: argparse.Namespace) -> int:
    try:
        generated = load_test(args.generated)
        reference = load_test(args.reference)
        q = structural_quality(generated, reference)
    except (ModelError, OSError, UnicodeDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"{q:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="testadapt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log search progress")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("adapt", help="adapt a donor test to a recipient app")
    a.add_argument("--donor-app", required=True)
    a.add_argument("--donor-test", required=True)
    a.add_argument("--recipient-app", required=True)
    a.add_argument("--embeddings", required=True)
    a.add_argument("--config")
    a.add_argument("--seed", type=int)
    a.add_argument("--mode", choices=("full", "basic", "random"))
    a.add_argument("--generations", type=int)
    a.add_argument("--time-budget", type=float, help="wall-clock budget in seconds")
    a.add_argument("--out", default="adapt-out")
    a.set_defaults(func=run_adapt)

    q = sub.add_parser("eval-qs", help="structural quality of a generated test against a reference")
    q.add_argument("--generated", required=True)
    q.add_argument("--reference", required=True)
    q.set_defaults(func=run_eval_qs)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
