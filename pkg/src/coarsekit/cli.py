"""Command-line front end: ``coarsekit generate | experiment | verify``.

Every command is deterministic in its arguments and ``--seed``.  With
``--out DIR`` artifacts are written to files and a summary line is printed;
otherwise the primary artifact goes to stdout.  Exit status is 0 exactly
when every check passed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import generators as gen
from .actions import ActionGenerators, box_space, edge_color_decompose, is_involution, schreier_graph
from .coarse import Entourage, UlfGraph
from .propa import ProbMeasure, ball_average_witness, smooth, verify_smoothing, witness_quality
from .repcheck import compression_state_identity
from .roe import PropOperator, block_constant_ghost, block_constant_projection, ghost_profile, normalized_adjacency, operator_norm
from .suites import SUITES

DEFAULT_CYCLES = list(range(5, 102, 4))
DEFAULT_RADII = [1, 2, 5, 10, 20]


class CommandError(Exception):
    """Bad input; reported on stderr with exit status 2."""


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CommandError(f"cannot read {path}: {exc}") from None


def _emit(args, artifacts: dict[str, str], primary: str, summary: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in artifacts.items():
            (out / name).write_text(text)
        print(summary)
    else:
        sys.stdout.write(artifacts[primary])
        print(summary, file=sys.stderr)


# -- generate ---------------------------------------------------------------


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "schreier":
        if args.action:
            action = ActionGenerators.from_json(_load_json(args.action))
        elif args.cyclic:
            action = ActionGenerators.cyclic(args.cyclic)
        else:
            raise CommandError("schreier needs --cyclic N or --action FILE")
        try:
            g = schreier_graph(action)
        except ValueError as exc:
            raise CommandError(str(exc)) from None
        payload = g.to_json()
        summary = f"schreier graph: {g.n} vertices, {len(g.edges)} edges, max degree {g.max_degree}"
    elif kind in ("box-cycles", "box-complete", "random-regular"):
        if not args.sizes:
            raise CommandError(f"{kind} needs --sizes")
        if kind == "box-cycles":
            comps = [gen.cycle_graph(n) for n in args.sizes]
        elif kind == "box-complete":
            comps = [gen.complete_graph(n) for n in args.sizes]
        else:
            rng = np.random.default_rng(args.seed)
            try:
                comps = [gen.random_regular_graph(rng, n, args.regularity) for n in args.sizes]
            except ValueError as exc:
                raise CommandError(str(exc)) from None
        b = box_space(comps)
        payload = b.to_json()
        seps = ", ".join(f"{i}-{j}:{dist}" for i, j, dist in payload["separations"]) or "none"
        summary = f"box space: {len(comps)} components, {b.n} vertices, cross-distances {seps}"
    elif kind == "entourage":
        if args.empty is None:
            raise CommandError("entourage needs --empty N")
        payload = Entourage(args.empty).to_json()
        summary = f"entourage: {args.empty} points, 0 pairs"
    else:
        raise CommandError(f"unknown kind {kind!r}")
    _emit(args, {f"{kind}.json": _json_text(payload)}, f"{kind}.json", summary)
    return 0


# -- experiment -------------------------------------------------------------


def _amenable_box(args) -> tuple[dict, str, list[str], str]:
    sizes = args.sizes or DEFAULT_CYCLES
    radii = args.radius or DEFAULT_RADII
    scale = args.scale
    b = box_space([gen.cycle_graph(n) for n in sizes])
    offsets = b.offsets
    rows, comp_rows, failures = [], [], []
    artifacts = {}
    for s in radii:
        # per component: ambient balls of the first components reach their neighbours
        worst = 0.0
        witness_rows = []
        for i, (g, off) in enumerate(zip(b.components, offsets)):
            w = ball_average_witness(g, s)
            eps = witness_quality(w, scale, g.metric)
            comp_rows.append([s, scale, i, g.n, repr(eps)])
            if g.n > 2 * s + 1:
                worst = max(worst, eps)
                if scale == 1 and abs(eps - 2 / (2 * s + 1)) > 1e-12:
                    failures.append(f"S={s}, C{g.n}: epsilon {eps!r} differs from 2/(2S+1)")
            if args.out:
                witness_rows.extend((x + off, y + off, wt) for x, y, wt in w.to_csv_rows())
        expected = 2 / (2 * s + 1) if scale == 1 and any(n > 2 * s + 1 for n in sizes) else None
        rows.append([s, scale, repr(worst), "" if expected is None else repr(expected)])
        if args.out:
            artifacts[f"witness_S{s}.csv"] = _csv_text(["x", "support_vertex", "weight"], witness_rows)
    eps_values = [float(r[2]) for r in rows]
    ordered = [e for _, e in sorted(zip(radii, eps_values))]
    if any(later > earlier + 1e-15 for earlier, later in zip(ordered, ordered[1:])):
        failures.append("epsilon is not monotone in S")
    artifacts["quality.csv"] = _csv_text(["S", "R", "epsilon", "expected"], rows)
    artifacts["quality_by_component.csv"] = _csv_text(["S", "R", "component", "size", "epsilon"], comp_rows)
    summary = {"experiment": "amenable-box", "sizes": sizes, "radii": radii, "scale": scale,
               "epsilon": dict(zip(map(str, radii), eps_values)), "failures": failures, "pass": not failures}
    artifacts["summary.json"] = _json_text(summary)
    return artifacts, "quality.csv", failures, f"amenable-box: {len(radii)} radii, {'pass' if not failures else 'FAIL'}"


def _component_spectrum(g: UlfGraph, k: int) -> dict:
    avg = normalized_adjacency(g)
    vals = np.linalg.eigvalsh(avg)
    lam2 = float(vals[-2]) if g.n > 1 else None
    lazy = np.linalg.matrix_power((np.eye(g.n) + avg) / 2, k)
    measured = operator_norm(lazy - np.full((g.n, g.n), 1.0 / g.n))
    return {"lambda2": lam2, "measured": measured}


def _expander_box(args) -> tuple[dict, str, list[str], str]:
    sizes = args.sizes or [16, 32, 64, 128]
    k = args.degree
    rng = np.random.default_rng(args.seed)
    if args.family == "complete":
        comps = [gen.complete_graph(n) for n in sizes]
    else:
        comps = [gen.random_regular_graph(rng, n, args.regularity) for n in sizes]
    b = box_space(comps)
    ghost, bounds = block_constant_ghost(b, k)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        spectra = list(pool.map(lambda g: _component_spectrum(g, k), comps))
    failures = []
    spec_rows = []
    for i, (g, sp, bound) in enumerate(zip(comps, spectra, bounds)):
        gap = "" if sp["lambda2"] is None else repr(1 - sp["lambda2"])
        if sp["measured"] > bound + 1e-9:
            failures.append(f"component {i}: measured error {sp['measured']!r} exceeds bound {bound!r}")
        spec_rows.append([i, g.n, "" if sp["lambda2"] is None else repr(sp["lambda2"]), gap, repr(float(bound)), repr(sp["measured"])])

    projection = block_constant_projection(b)
    profile = ghost_profile(projection)
    radii = args.radius or [0, 1, 2, 3]
    quality_rows = []
    for s in radii:
        eps = witness_quality(ball_average_witness(b, s), args.scale, b.metric)
        quality_rows.append([s, args.scale, repr(eps)])

    artifacts = {
        "spectral.csv": _csv_text(["component", "size", "lambda2", "spectral_gap", "bound", "measured_error"], spec_rows),
        "ghost_profile.csv": _csv_text(["k", "value"], [[i, repr(float(v))] for i, v in enumerate(profile)]),
        "quality.csv": _csv_text(["S", "R", "epsilon"], quality_rows),
        "ghost_operator.json": _json_text(PropOperator(ghost.entries).to_json()) if args.out and b.n <= 512 else "",
    }
    if not artifacts["ghost_operator.json"]:
        del artifacts["ghost_operator.json"]
    summary = {"experiment": "expander-box", "family": args.family, "sizes": sizes, "degree": k,
               "seed": args.seed, "bounds": [float(x) for x in bounds],
               "witness_floor": min(float(r[2]) for r in quality_rows) if quality_rows else None,
               "failures": failures, "pass": not failures}
    artifacts["summary.json"] = _json_text(summary)
    return artifacts, "spectral.csv", failures, f"expander-box: {len(comps)} components, {'pass' if not failures else 'FAIL'}"


def _lemma_suite(args) -> tuple[dict, str, list[str], str]:
    results = [suite(args.seed) for suite in SUITES.values()]
    failures = [f"{r.name}: {len(r.failures)} failing cases" for r in results if not r.passed]
    payload = {"experiment": "lemma-suite", "seed": args.seed, "suites": [r.to_json() for r in results],
               "pass": not failures}
    rows = [[r.name, r.cases, len(r.failures), "pass" if r.passed else "fail"] for r in results]
    artifacts = {"lemma_suite.json": _json_text(payload),
                 "lemma_suite.csv": _csv_text(["suite", "cases", "failures", "status"], rows)}
    primary = "lemma_suite.csv" if args.format == "csv" else "lemma_suite.json"
    return artifacts, primary, failures, f"lemma-suite: {len(results)} suites, {'pass' if not failures else 'FAIL'}"


EXPERIMENTS = {
    "amenable-box": _amenable_box,
    "expander-box": _expander_box,
    "lemma-suite": _lemma_suite,
}


def cmd_experiment(args) -> int:
    try:
        artifacts, primary, failures, summary = EXPERIMENTS[args.name](args)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    if args.format == "json" and primary.endswith(".csv"):
        primary = "summary.json"
    _emit(args, artifacts, primary, summary)
    for line in failures:
        print(f"FAILED: {line}", file=sys.stderr)
    return 1 if failures else 0


# -- verify -----------------------------------------------------------------


def _verify_coloring(files, args) -> dict:
    s = Entourage.from_json(_load_json(files[0]))
    try:
        invs = edge_color_decompose(s)
    except ValueError as exc:
        return {"check": "coloring", "pass": False, "message": str(exc)}
    d = int(s.row_degrees().max()) if s.n else 0
    union = frozenset().union(*(g.graph().pairs for g in invs)) if invs else frozenset()
    checks = {
        "count": len(invs) <= max(2 * d - 1, 0),
        "cover": union == s.pairs,
        "involutions": all(is_involution(g) for g in invs),
    }
    return {"check": "coloring", "involutions": len(invs), "bound": 2 * d - 1, "checks": checks,
            "pass": all(checks.values())}


def _verify_smoothing(files, args) -> dict:
    if len(files) != 2:
        raise CommandError("smoothing needs GRAPH.json SMOOTHING.json")
    g = UlfGraph.from_json(_load_json(files[0]))
    data = _load_json(files[1])
    eps = float(data.get("epsilon", args.epsilon))
    try:
        eta = ProbMeasure(np.array(data["eta"], dtype=float))
        if "eta_prime" in data:
            report = verify_smoothing(eta, np.array(data["eta_prime"], dtype=float), eps, float(data["L"]), g)
        else:
            _, _, report = smooth(eta, eps, g)
    except (KeyError, ValueError) as exc:
        raise CommandError(f"bad smoothing input: {exc}") from None
    return {"check": "smoothing", **report.to_json()}


def _verify_involution(files, args) -> dict:
    action = ActionGenerators.from_json(_load_json(files[0]))
    bad = [name for name, g in zip(action.names, action.generators) if not is_involution(g)]
    out = {"check": "involution", "generators": len(action), "pass": not bad}
    if bad:
        out["message"] = f"not involutions: {', '.join(bad)}"
    return out


def _verify_compression(files, args) -> dict:
    if len(files) != 3:
        raise CommandError("compression-identity needs GRAPH.json OPERATOR.json HS.json")
    if not args.radius:
        raise CommandError("compression-identity needs --radius S")
    g = UlfGraph.from_json(_load_json(files[0]))
    a = PropOperator.from_json(_load_json(files[1]))
    eta = PropOperator.from_json(_load_json(files[2]))
    try:
        rep = compression_state_identity(eta.entries, a, args.radius[0], g.metric)
    except ValueError as exc:
        return {"check": "compression-state-identity", "pass": False, "message": str(exc)}
    return rep.to_json()


VERIFIERS = {
    "coloring": _verify_coloring,
    "smoothing": _verify_smoothing,
    "involution": _verify_involution,
    "compression-identity": _verify_compression,
}


def cmd_verify(args) -> int:
    report = VERIFIERS[args.check](args.files, args)
    text = _json_text(report)
    status = "pass" if report["pass"] else "FAIL"
    _emit(args, {f"verify_{args.check}.json": text}, f"verify_{args.check}.json", f"verify {args.check}: {status}")
    if not report["pass"] and "message" in report:
        print(report["message"], file=sys.stderr)
    return 0 if report["pass"] else 1


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output directory")
    common.add_argument("--sizes", type=_int_list, help="component sizes, e.g. 5,9,13")
    common.add_argument("--radius", type=_int_list, help="ball radius S (comma list for sweeps)")
    common.add_argument("--scale", type=int, default=1, help="witness scale R")
    common.add_argument("--degree", type=int, default=1, help="polynomial degree k of the ghost approximation")
    common.add_argument("--format", choices=("json", "csv"), default="csv")

    parser = argparse.ArgumentParser(prog="coarsekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write graphs, box spaces and entourages as JSON")
    p.add_argument("kind", choices=("schreier", "box-cycles", "box-complete", "random-regular", "entourage"))
    p.add_argument("--cyclic", type=int, help="Z/N acting on itself by +-1")
    p.add_argument("--action", help="action JSON file for the Schreier graph")
    p.add_argument("--regularity", type=int, default=3, help="degree of random regular components")
    p.add_argument("--empty", type=int, metavar="N", help="empty entourage on N points")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", parents=[common], help="run a flagship experiment")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--family", choices=("random-regular", "complete"), default="random-regular")
    p.add_argument("--regularity", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", parents=[common], help="run one verifier on object files")
    p.add_argument("check", choices=sorted(VERIFIERS))
    p.add_argument("files", nargs="+")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"coarsekit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
