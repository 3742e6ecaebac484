"""Command-line interface.

Exit codes: 0 ok, 1 usage error, 2 invalid input, 3 predicted and recounted
violation changes disagree.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import random
import sys
import time
from importlib import resources
from typing import Any

from .condition import constraints_from_json, count_violations
from .cra import cra_optimal_assignment, feature_model_from_json, generate_synthetic
from .graph import GraphError, graph_from_json, graph_to_json, validate_graph
from .ranking import Ranker, RepairConfig, TheoremViolation, greedy_repair, plain_number
from .repair import bundle_to_json, derive_bundle
from .rewrite import rules_from_json
from .simplify import hard_patterns

log = logging.getLogger("graphrepair")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# input --------------------------------------------------------------------

def resolve_path(path: str) -> str:
    """Paths under ``assets/`` fall back to the files bundled with the package."""
    if os.path.exists(path):
        return path
    norm = path.replace("\\", "/")
    if norm.startswith("assets/"):
        bundled = resources.files("graphrepair") / "assets" / norm[len("assets/"):]
        if bundled.is_file():
            return str(bundled)
    return path


def read_json(path: str) -> Any:
    real = resolve_path(path)
    try:
        with open(real, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON ({exc})") from None


def load_graph(path: str, check: bool = True):
    """A graph file, or a feature model (recognised by its ``features`` key)."""
    data = read_json(path)
    if isinstance(data, dict) and "features" in data:
        return feature_model_from_json(data)
    return graph_from_json(data, check=check)


def load_rules(path: str):
    return rules_from_json(read_json(path))


def load_constraints(path: str):
    return constraints_from_json(read_json(path))


def load_weights(path: str | None) -> dict:
    if path is None:
        return {}
    data = read_json(path)
    if not isinstance(data, dict):
        raise GraphError("weights file must map constraint names to numbers")
    return data


def dump(obj: Any, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# commands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    data = read_json(args.graph)
    if isinstance(data, dict) and "features" in data:
        g = feature_model_from_json(data)
        problems = validate_graph(g)
    else:
        g = graph_from_json(data, check=False)
        problems = validate_graph(g)
    dump({"valid": not problems, "problems": problems,
          "nodes": len(g.nodes), "edges": len(g.edges)}, None)
    return EXIT_OK if not problems else EXIT_INPUT


def cmd_violations(args) -> int:
    g = load_graph(args.graph)
    cs = load_constraints(args.constraints)
    rows = [(c.name, c.kind, c.weight, count_violations(c, g)) for c in cs]
    if args.json:
        dump({"violations": [{"constraint": n, "kind": k, "weight": w, "count": v}
                             for n, k, w, v in rows]}, None)
    else:
        print(f"{'constraint':<12} {'kind':<5} {'weight':>7} {'violations':>10}")
        for n, k, w, v in rows:
            print(f"{n:<12} {k:<5} {w:>7g} {v:>10}")
    return EXIT_OK


def cmd_derive(args) -> int:
    rules = load_rules(args.rules)
    cs = load_constraints(args.constraints)
    hard = hard_patterns(cs)
    out = []
    for r in rules:
        for c in cs:
            if c.kind != "weak":
                continue
            b = derive_bundle(r, c, hard, cancel=not args.no_cancel, explain=args.explain)
            out.append(bundle_to_json(b, explain=args.explain))
            if args.explain:
                for ac in b.repair + b.impairment:
                    for src in ac.sources:
                        log.info("%s/%s %s %s: %s", r.name, c.name, ac.kind, ac.branch, src)
    dump({"bundles": out}, args.output)
    return EXIT_OK


def cmd_rank(args) -> int:
    g = load_graph(args.graph)
    rules = load_rules(args.rules)
    cs = load_constraints(args.constraints)
    ranker = Ranker(rules, cs, load_weights(args.weights), cancel=not args.no_cancel)
    ranked = ranker.rank(g, args.top)
    if args.json:
        dump({"matches": [r.to_json() for r in ranked]}, None)
        return EXIT_OK
    names = [c.name for c in ranker.constraints]
    head = f"{'#':>4} {'rule':<14} {'gain':>6}  " + "  ".join(f"{n + ' rep/imp':>12}" for n in names) + "  match"
    print(head)
    for i, r in enumerate(ranked, 1):
        per = {s.constraint: s for s in r.scores}
        cols = "  ".join(f"{f'{per[n].repair}/{per[n].impair}':>12}" for n in names)
        nodes = ",".join(f"{k}={v}" for k, v in sorted(r.match["nodes"].items()))
        print(f"{i:>4} {r.rule:<14} {r.gain:>6g}  {cols}  {nodes}")
    return EXIT_OK


def cmd_repair(args) -> int:
    g = load_graph(args.graph)
    rules = load_rules(args.rules)
    cs = load_constraints(args.constraints)
    config = RepairConfig(max_iterations=args.max_iter, restarts=args.restarts,
                          initial_impair_budget=args.budget, budget_top_k=args.top_k,
                          seed=args.seed, cancel=not args.no_cancel, check=not args.no_check)
    res = greedy_repair(g, rules, cs, config, load_weights(args.weights))
    trace = res.to_json()
    dump(trace, args.output)
    if args.graph_out:
        dump(graph_to_json(res.graph), args.graph_out)
    if args.output not in (None, "-"):
        print(f"steps {len(res.steps)}  score {res.initial_score:g} -> {res.final_score:g}  "
              f"({res.reason}, restart {res.restart})")
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import actual_delta, repaired_and_impaired
    from .randomgen import host_with_match, random_constraint, random_rule
    from .ranking import predicted_counts
    from .rewrite import applicable_matches

    rng = random.Random(args.seed)
    failures = []
    cases = 0
    while cases < args.cases:
        i = cases
        rule = random_rule(rng, f"r{i}")
        c = random_constraint(rng, f"c{i}")
        host = host_with_match(rng, rule)
        matches = applicable_matches(rule, host)
        if not matches:
            continue
        m = matches[rng.randrange(len(matches))]
        bundle = derive_bundle(rule, c, cancel=False)
        rep, imp = predicted_counts(bundle, host, m.nodes, m.edges, None, False)
        actual = actual_delta(host, rule, m.nodes, m.edges, c)
        brute = repaired_and_impaired(host, rule, m.nodes, m.edges, c)
        cases += 1
        if imp - rep != actual or (rep, imp) != brute:
            failures.append({"case": i, "predicted": imp - rep, "actual": actual,
                             "repair": rep, "impair": imp,
                             "bruteRepaired": brute[0], "bruteImpaired": brute[1]})
    dump({"cases": cases, "seed": args.seed, "failures": failures}, args.output)
    return EXIT_OK if not failures else EXIT_MISMATCH


def cmd_gen(args) -> int:
    dump(graph_to_json(generate_synthetic(args.classes, args.seed)), args.output)
    return EXIT_OK


def cmd_optimum(args) -> int:
    g = load_graph(args.model)
    best, assign = cra_optimal_assignment(g)
    groups: dict = {}
    for f, k in assign.items():
        groups.setdefault(k, []).append(f)
    dump({"violations": best, "classes": sorted(sorted(v) for v in groups.values())}, args.output)
    return EXIT_OK


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError("--sizes must be a comma-separated list of integers") from None
    if not sizes or min(sizes) < 2:
        raise UsageError("--sizes needs integers >= 2")
    return sizes


def cmd_bench(args) -> int:
    from .cra import base_constraints, cra_rules

    sizes = _parse_sizes(args.sizes)
    rows = []
    summary = []
    for n in sizes:
        g = generate_synthetic(n, args.seed)
        t0 = time.perf_counter()
        ranker = Ranker(cra_rules(), base_constraints())
        matches = len(ranker.rank(g))
        init = time.perf_counter() - t0
        for r in range(args.restarts):
            config = RepairConfig(max_iterations=args.max_iter, restarts=1,
                                  initial_impair_budget=args.budget if r else 0,
                                  seed=args.seed + r, check=not args.no_check)
            t1 = time.perf_counter()
            res = greedy_repair(g, cra_rules(), base_constraints(), config, ranker=ranker)
            spent = time.perf_counter() - t1
            row = {"classes": n, "nodes": len(g.nodes), "edges": len(g.edges), "matches": matches,
                   "restart": r, "initialViolations": plain_number(res.initial_score),
                   "finalViolations": plain_number(res.final_score), "steps": len(res.steps), "reason": res.reason}
            summary.append(row)
            rows.append(dict(row, initSeconds=f"{init:.3f}", repairSeconds=f"{spent:.3f}"))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    # timings go to the CSV only, so stdout stays reproducible
    dump({"runs": summary}, None)
    return EXIT_OK


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphrepair", description="Rank and apply graph repairs by exact violation change.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("validate", help="check a graph file against its type graph")
    s.add_argument("graph")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("violations", help="violation count per constraint")
    s.add_argument("graph")
    s.add_argument("constraints")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_violations)

    s = sub.add_parser("derive-ac", help="derive repair/impairment conditions")
    s.add_argument("rules")
    s.add_argument("constraints")
    s.add_argument("--explain", action="store_true", help="include intermediate conditions")
    s.add_argument("--no-cancel", action="store_true", help="keep mutually cancelling pairs")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("rank", help="rank applicable matches by predicted change")
    s.add_argument("graph")
    s.add_argument("rules")
    s.add_argument("constraints")
    s.add_argument("--weights")
    s.add_argument("--top", type=int)
    s.add_argument("--no-cancel", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("repair", help="greedy repair with optional restarts")
    s.add_argument("graph")
    s.add_argument("rules")
    s.add_argument("constraints")
    s.add_argument("--weights")
    s.add_argument("--restarts", type=int, default=1)
    s.add_argument("--budget", type=int, default=0, help="random steps at the start of each restart")
    s.add_argument("--top-k", type=int, help="random steps pick among the k best matches")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--no-cancel", action="store_true")
    s.add_argument("--no-check", action="store_true", help="skip recounting after each step")
    s.add_argument("-o", "--output")
    s.add_argument("--graph-out", help="write the repaired graph here")
    s.set_defaults(func=cmd_repair)

    s = sub.add_parser("oracle", help="check predictions against brute force on random cases")
    s.add_argument("--cases", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gen-cra", help="generate a synthetic class model")
    s.add_argument("--classes", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("optimum", help="exhaustive best assignment for a small feature model")
    s.add_argument("model")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_optimum)

    s = sub.add_parser("bench", help="greedy repair on synthetic models of several sizes")
    s.add_argument("--sizes", default="25")
    s.add_argument("--csv")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--restarts", type=int, default=1)
    s.add_argument("--budget", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--no-check", action="store_true")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except TheoremViolation as exc:
        print(f"error: prediction mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (GraphError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
