"""Command-line interface: ``solve``, ``verify`` and ``oracle``.

Exit status is 0 on success, 1 when a check fails or no witness is found,
and 2 on usage or input errors.  JSON output is written with sorted keys so
that it is byte-stable for fixed inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .assignment import CostTable, verify_optimality
from .exact import LexCost, format_rational, parse_rational
from .fairness import is_envy_free_for, reallocation_set
from .model import (
    Allocation,
    InstanceError,
    NormalizedInstance,
    allocation_to_dict,
    build_slot_graph,
    is_feasible,
    load_instance,
    normalize,
)
from .oracle import EnumerationLimit, ParetoIndex, check_theorem1, enumeration_limit, feasible_count
from .perturbation import compute_K, edge_costs, make_perturbation, shrink_weights
from .search import (
    CycleLimitExceeded,
    ResultBundle,
    WitnessNotFound,
    derive_ef11,
    find_witness,
    grid_refinement_search,
    two_agent_sweep,
)

FORMAT = 1
DEFAULT_GRID_DEPTH = 4
log = logging.getLogger("catfair")


class UsageError(Exception):
    """Bad input file or flag combination (exit status 2)."""


# --- serialization --------------------------------------------------------------


def _dump(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _offset(x: LexCost) -> dict:
    return {str(r): format_rational(c) for r, c in x.pert_items}


def _parse_point(base: Sequence[str], offsets: Optional[Sequence[dict]]) -> tuple:
    offsets = offsets or [{}] * len(base)
    if len(offsets) != len(base):
        raise UsageError("t_star and t_star_offset differ in length")
    out = []
    for b, off in zip(base, offsets):
        out.append(LexCost(parse_rational(b), {int(r): parse_rational(c) for r, c in off.items()}))
    return tuple(out)


def _split(norm: NormalizedInstance, a: Allocation) -> tuple:
    """Assignment of real items and of dummies, both 1-based."""
    real = allocation_to_dict(a, norm.base.m)
    dummies = {str(j + 1): a.owner[j] + 1 for j in sorted(norm.dummy_items)}
    return real, dummies


def bundle_to_dict(bundle: ResultBundle, alpha=None) -> dict:
    norm = bundle.instance
    real_m = norm.base.m
    allocations, dummy_allocs = {}, {}
    for i, a in enumerate(bundle.per_agent):
        real, dummies = _split(norm, a)
        allocations[str(i + 1)] = real
        dummy_allocs[str(i + 1)] = {"assignment": dummies}
    out = {
        "format": FORMAT,
        "mode": bundle.mode,
        "heuristic": bundle.heuristic,
        "epsilon": bundle.epsilon,
        "t_star": [format_rational(x.base) for x in bundle.t_star.t],
        "t_star_offset": [_offset(x) for x in bundle.t_star.t],
        "allocations": allocations,
        "reallocation_set": sorted(j + 1 for j in bundle.realloc if j < real_m),
        "common": {str(j + 1): i + 1 for j, i in sorted(bundle.common.items()) if j < real_m},
        "dummies": {
            "items": sorted(j + 1 for j in norm.dummy_items),
            "allocations": dummy_allocs,
            "reallocation_set": sorted(j + 1 for j in bundle.realloc if j >= real_m),
        },
        "certificates": bundle.certificates,
        "stats": bundle.stats,
    }
    if bundle.epsilon == "explicit":
        out["alpha"] = format_rational(alpha if alpha is not None else make_perturbation(norm, "explicit").spec.alpha)
    if norm.n == 2 and len(bundle.realloc) <= 2:
        real, _ = _split(norm, derive_ef11(norm, bundle))
        out["ef11_allocation"] = real
    return out


def _allocations_from(data: dict, norm: NormalizedInstance) -> list:
    """Per-agent allocations of the normalized instance from result JSON."""
    try:
        allocs = data["allocations"]
        dummies = data.get("dummies", {}).get("allocations", {})
        out = []
        for i in range(norm.n):
            owner = [-1] * norm.m
            parts = [allocs[str(i + 1)]["assignment"]]
            if str(i + 1) in dummies:
                parts.append(dummies[str(i + 1)]["assignment"])
            for part in parts:
                for key, agent in part.items():
                    j = int(key) - 1
                    if not 0 <= j < norm.m or not isinstance(agent, int) or not 1 <= agent <= norm.n:
                        raise UsageError(f"bad assignment entry {key!r}: {agent!r}")
                    owner[j] = agent - 1
            if -1 in owner:
                # dummies may be omitted; fill them in any feasible way
                owner = _fill_dummies(norm, owner)
            out.append(Allocation(tuple(owner)))
        return out
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise UsageError(f"malformed result: {exc}") from None


def _fill_dummies(norm: NormalizedInstance, owner: list) -> list:
    owner = list(owner)
    for items, cap in zip(norm.categories, norm.capacities):
        load = [0] * norm.n
        for j in items:
            if owner[j] >= 0:
                load[owner[j]] += 1
        for j in items:
            if owner[j] < 0:
                if j not in norm.dummy_items:
                    raise UsageError(f"item {j + 1} is not assigned")
                i = min(range(norm.n), key=lambda a: (load[a] >= cap, load[a], a))
                owner[j] = i
                load[i] += 1
    return owner


# --- commands -------------------------------------------------------------------


def _read_instance(path: str) -> NormalizedInstance:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return normalize(load_instance(text))
    except InstanceError as exc:
        raise UsageError(f"invalid instance: {exc}") from None


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path} must hold a JSON object")
    return data


def _write(args, data: dict, summary: str) -> None:
    text = _dump(data)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def _alpha(args):
    if args.alpha is None:
        return None
    try:
        return parse_rational(args.alpha)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--alpha must be a rational p/q, got {args.alpha!r}") from None


def _solve(norm: NormalizedInstance, args) -> Optional[ResultBundle]:
    if args.alpha is not None and args.epsilon != "explicit":
        raise UsageError("--alpha only applies with --epsilon explicit")
    if args.grid_depth is not None and args.mode != "grid":
        raise UsageError("--grid-depth only applies with --mode grid")
    alpha = _alpha(args)
    try:
        if args.epsilon == "explicit":
            make_perturbation(norm, "explicit", alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.mode == "arrangement":
        return find_witness(norm, args.epsilon, alpha, max_cycles=args.max_cycles, workers=args.threads)
    if args.mode == "sweep2":
        if norm.n != 2:
            raise UsageError("--mode sweep2 needs exactly two agents")
        return two_agent_sweep(norm, args.epsilon, alpha, max_cycles=args.max_cycles)
    depth = DEFAULT_GRID_DEPTH if args.grid_depth is None else args.grid_depth
    return grid_refinement_search(norm, depth, args.epsilon, alpha, max_cycles=args.max_cycles)


def _short(text: str) -> str:
    """A rational for humans: exact when short, a decimal otherwise."""
    return text if len(text) <= 24 else f"~{float(parse_rational(text)):.12g}"


def cmd_solve(args) -> int:
    norm = _read_instance(args.input)
    try:
        bundle = _solve(norm, args)
    except (WitnessNotFound, CycleLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if bundle is None:
        print("no witness found on the grid", file=sys.stderr)
        return 1
    data = bundle_to_dict(bundle, _alpha(args))
    certs = bundle.certificates
    envy = ", ".join(f"agent {i + 1}: {'envy-free' if ok else 'ENVIES'}" for i, ok in enumerate(certs["envy_free"]))
    summary = (
        f"t* = ({', '.join(_short(x) for x in data['t_star'])}){' + infinitesimal' if any(data['t_star_offset']) else ''}; "
        f"|R| = {len(bundle.realloc)} (bound {certs['realloc_bound']}); {envy}"
    )
    _write(args, data, summary)
    ok = (
        all(certs["envy_free"])
        and all(certs["pareto_optimal"])
        and certs["realloc_within_bound"]
        and certs["agree_outside_realloc"]
    )
    return 0 if ok else 1


def verify_result(norm: NormalizedInstance, data: dict, limit: Optional[int] = None) -> dict:
    """Check a solve result clause by clause; every clause has a ``pass`` flag."""
    allocs = _allocations_from(data, norm)
    clauses = {}
    bad = [i + 1 for i, a in enumerate(allocs) if not is_feasible(norm, a)]
    clauses["feasible"] = {"pass": not bad, "counterexamples": bad}
    feasible = not bad
    bad = [i + 1 for i, a in enumerate(allocs) if not is_envy_free_for(norm, a, i)]
    clauses["envy_free_for_own_agent"] = {"pass": not bad, "counterexamples": bad}

    try:
        t = _parse_point(data["t_star"], data.get("t_star_offset"))
        w = shrink_weights(t, compute_K(norm), norm.n)
        alpha = parse_rational(data["alpha"]) if "alpha" in data else None
        pert = make_perturbation(norm, data.get("epsilon", "lex"), alpha)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed t_star: {exc}") from None
    g = build_slot_graph(norm)
    table = CostTable(edge_costs(norm, g, w, pert))
    bad = [i + 1 for i, a in enumerate(allocs) if not feasible or not verify_optimality(g, table, a)]
    clauses["optimal_at_t_star"] = {"pass": feasible and not bad, "counterexamples": bad}

    base = norm.base
    if feasible_count(base) <= enumeration_limit(limit):
        index = ParetoIndex(base, limit)
        bad = [i + 1 for i, a in enumerate(allocs) if not feasible or not index.is_pareto_optimal(a.restrict(base.m))]
        clauses["pareto_optimal"] = {"pass": feasible and not bad, "method": "bruteforce", "counterexamples": bad}
    else:
        clauses["pareto_optimal"] = {
            "pass": clauses["optimal_at_t_star"]["pass"],
            "method": "positive-weight-optimum",
            "counterexamples": clauses["optimal_at_t_star"]["counterexamples"],
        }

    try:
        claimed = {j - 1 for j in data.get("reallocation_set", [])}
        claimed |= {j - 1 for j in data.get("dummies", {}).get("reallocation_set", [])}
    except TypeError:
        raise UsageError("reallocation_set must be a list of item ids") from None
    actual = reallocation_set(allocs)
    missing = sorted(j + 1 for j in actual - claimed)
    clauses["common_outside_realloc"] = {"pass": not missing, "counterexamples": missing}
    n = norm.n
    clauses["realloc_bound"] = {"pass": len(claimed) <= n * (n - 1), "size": len(claimed), "bound": n * (n - 1)}
    return clauses


def cmd_verify(args) -> int:
    norm = _read_instance(args.input)
    data = _read_json(args.result)
    if data.get("format") != FORMAT:
        raise UsageError(f"unsupported result format {data.get('format')!r}")
    try:
        clauses = verify_result(norm, data, args.limit)
    except EnumerationLimit as exc:
        raise UsageError(str(exc)) from None
    failed = sorted(k for k, v in clauses.items() if not v["pass"])
    report = {"format": FORMAT, "pass": not failed, "failed": failed, "clauses": clauses}
    summary = "all clauses pass" if not failed else "FAILED: " + ", ".join(failed)
    _write(args, report, summary)
    return 0 if not failed else 1


def cmd_oracle(args) -> int:
    norm = _read_instance(args.input)
    limit = args.limit
    try:
        if args.result:
            data = _read_json(args.result)
            allocs = _allocations_from(data, norm)
            claimed = {j - 1 for j in data.get("reallocation_set", [])}
            claimed |= {j - 1 for j in data.get("dummies", {}).get("reallocation_set", [])}
            t_star = data.get("t_star")
        else:
            bundle = _solve(norm, args)
            if bundle is None:
                print("no witness to check", file=sys.stderr)
                return 1
            allocs, claimed, t_star = list(bundle.per_agent), set(bundle.realloc), bundle_to_dict(bundle)["t_star"]
        report = check_theorem1(norm, _Claim(allocs, claimed, t_star), limit)
    except EnumerationLimit as exc:
        raise UsageError(str(exc)) from None
    except (WitnessNotFound, CycleLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    base_m = norm.base.m
    out = {
        "format": FORMAT,
        "feasible_count": report.feasible_count,
        "pareto_set": [allocation_to_dict(a, base_m)["assignment"] for a in report.pareto_set],
        "verdicts": report.verdicts,
        "pass": report.passed,
    }
    failed = sorted(k for k, v in report.verdicts.items() if not v["pass"])
    summary = f"{report.feasible_count} feasible allocations; " + (
        "all clauses pass" if not failed else "FAILED: " + ", ".join(failed)
    )
    _write(args, out, summary)
    return 0 if report.passed else 1


class _Claim:
    """Minimal bundle-like view for the oracle check."""

    def __init__(self, per_agent, realloc, t_star):
        self.per_agent = per_agent
        self.realloc = frozenset(realloc)
        self.t_star = t_star


# --- parser ---------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _nonnegative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be at least 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catfair", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", required=True, help="instance JSON file")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--limit", type=_positive, help="enumeration limit (default: $CATFAIR_ENUM_LIMIT or 10^7)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--mode", choices=("arrangement", "sweep2", "grid"), default="arrangement")
    search.add_argument("--epsilon", choices=("lex", "explicit"), default="lex")
    search.add_argument("--alpha", help="explicit perturbation scale as p/q")
    search.add_argument("--max-cycles", type=_positive, default=10**6)
    search.add_argument("--grid-depth", type=_nonnegative, help=f"refinements for --mode grid (default {DEFAULT_GRID_DEPTH})")
    search.add_argument("--threads", type=_positive, default=1, help="worker processes for the vertex scan")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common, search], help="find a witness and its allocations")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("verify", parents=[common], help="check a solve result")
    p.add_argument("--result", "-r", required=True, help="result JSON written by solve")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("oracle", parents=[common, search], help="exhaustive check against brute force")
    p.add_argument("--check", "--result", "-r", dest="result", help="result JSON to check (default: solve first)")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
