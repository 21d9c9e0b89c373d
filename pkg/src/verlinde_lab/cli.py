"""Command-line front end: run the computations and cross-check them.

Subcommands: graphs, count, verlinde, check, polytope, abelian.  Every
command emits a run report (JSON by default, CSV for the tabular payloads
with --format csv) and exits 0 exactly when all embedded cross-checks pass.
Work and memory budgets are explicit flags, seeds are explicit flags, and
the VERLINDE_LAB_THREADS environment variable caps worker fan-out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from verlinde_lab import abelian as abelian_mod
from verlinde_lab import fusion, graph, polytope, weights

#: Environment variable capping CLI parallelism.
THREADS_ENV = "VERLINDE_LAB_THREADS"

DEFAULT_MC_SAMPLES = 10**6
DEFAULT_SEED = 0
DEFAULT_K_MAX = 50

#: The 1% limit-agreement verdict needs enough levels for the extrapolation
#: to settle; below this k_max the relative error is reported without verdict.
MIN_KMAX_FOR_LIMIT_CHECK = 20


@dataclass
class RunReport:
    """Outcome of one CLI command: echo, inputs, outputs, verdicts, timing."""

    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)
    timing_seconds: float = 0.0

    def add_check(self, name: str, passed: bool, **details):
        entry = {"name": name, "passed": bool(passed)}
        entry.update(details)
        self.checks.append(entry)

    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "timing_seconds": round(self.timing_seconds, 6),
        }


def worker_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _parallel_map(fn, items):
    """Order-preserving map, fanned out across at most worker_count() threads."""
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _graphs_for(args) -> list[tuple[str, graph.TrinionGraph]]:
    """Resolve --genus/--graph into (identifier, graph) pairs."""
    if getattr(args, "graph", None):
        G = graph.load_graph(args.graph)
        return [(str(args.graph), G)]
    out = []
    for G in graph.generate_genus_graphs(args.genus):
        name = graph.class_name(G)
        ident = name or "key:" + ",".join(map(str, graph.canonical_form(G).key))
        out.append((ident, G))
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_graphs(args) -> RunReport:
    report = RunReport("graphs", {"genus": args.genus, "out_dir": str(args.out_dir)})
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    classes = graph.generate_genus_graphs(args.genus)
    index = {"genus": args.genus, "count": len(classes), "graphs": []}
    for i, G in enumerate(classes):
        name = graph.class_name(G)
        stem = f"genus{args.genus}_{i:02d}" + (f"_{name}" if name else "")
        filename = stem + graph.GRAPH_FILE_SUFFIX
        graph.save_graph(G, out_dir / filename)
        index["graphs"].append(
            {
                "file": filename,
                "canonical_key": list(graph.canonical_form(G).key),
                "name": name,
            }
        )
    index_path = out_dir / f"genus{args.genus}_index.json"
    index_path.write_bytes((json.dumps(index, indent=2) + "\n").encode())
    report.outputs = {
        "classes": len(classes),
        "files": [g["file"] for g in index["graphs"]] + [index_path.name],
    }
    report.add_check("all-classes-valid", all(G.genus == args.genus for G in classes))
    return report


def _count_one(G: graph.TrinionGraph, level: int, method: str, args) -> int:
    if method == "brute":
        return weights.count_admissible_bruteforce(G, level, max_states=args.max_states)
    return weights.count_via_contraction(G, level, max_frontier=args.max_frontier)


def cmd_count(args) -> RunReport:
    report = RunReport(
        "count",
        {
            "genus": getattr(args, "genus", None),
            "graph": getattr(args, "graph", None),
            "level": args.level,
            "method": args.method,
        },
    )
    pairs = _graphs_for(args)
    counts = _parallel_map(lambda p: _count_one(p[1], args.level, args.method, args), pairs)
    table = [
        {"graph": ident, "count": n} for (ident, _), n in zip(pairs, counts)
    ]
    report.outputs["per_graph"] = table
    if len(pairs) > 1:
        identical = len(set(counts)) == 1
        report.add_check("graph-independence", identical, counts=sorted(set(counts)))
        if identical:
            report.outputs["count"] = counts[0]
    else:
        report.outputs["count"] = counts[0]
    return report


def cmd_verlinde(args) -> RunReport:
    report = RunReport("verlinde", {"genus": args.genus, "level": args.level})
    try:
        dim = fusion.verlinde_dim(args.genus, args.level)
    except fusion.PrecisionError as exc:
        report.add_check("rounding-residual", False, detail=str(exc))
        return report
    report.outputs["dimension"] = dim
    report.add_check(
        "rounding-residual", True, tolerance=fusion.ROUNDING_TOLERANCE
    )
    return report


def cmd_check(args) -> RunReport:
    report = RunReport(
        "check", {"genus": args.genus, "max_level": args.max_level}
    )
    pairs = _graphs_for(args)
    levels = list(range(args.max_level + 1))
    first_discrepancy = None

    def contraction_task(item):
        (ident, G), k = item
        return weights.count_via_contraction(G, k, max_frontier=args.max_frontier)

    tasks = [(pair, k) for k in levels for pair in pairs]
    contraction = dict(zip(tasks, _parallel_map(contraction_task, tasks)))

    for k in levels:
        dim = fusion.verlinde_dim(args.genus, k)
        counts = {ident: contraction[((ident, G), k)] for ident, G in pairs}
        agree_graphs = len(set(counts.values())) == 1
        agree_verlinde = all(n == dim for n in counts.values())
        report.add_check(f"graph-independence[k={k}]", agree_graphs, counts=counts)
        report.add_check(
            f"contraction-equals-verlinde[k={k}]",
            agree_verlinde,
            verlinde=dim,
            counts=counts,
        )
        if not (agree_graphs and agree_verlinde) and first_discrepancy is None:
            first_discrepancy = f"k={k}: verlinde={dim}, counts={counts}"
        for ident, G in pairs:
            states = (k + 1) ** G.edge_count
            if states <= args.max_states:
                brute = weights.count_admissible_bruteforce(
                    G, k, max_states=args.max_states
                )
                ok = brute == counts[ident]
                report.add_check(
                    f"brute-equals-contraction[k={k},{ident}]",
                    ok,
                    brute=brute,
                    contraction=counts[ident],
                )
                if not ok and first_discrepancy is None:
                    first_discrepancy = (
                        f"k={k} {ident}: brute={brute} contraction={counts[ident]}"
                    )
            if k >= 1:
                P = polytope.build_polytope(G)
                lat = polytope.lattice_count(P, G, k)
                ok = lat == counts[ident]
                report.add_check(
                    f"lattice-equals-contraction[k={k},{ident}]",
                    ok,
                    lattice=lat,
                    contraction=counts[ident],
                )
                if not ok and first_discrepancy is None:
                    first_discrepancy = (
                        f"k={k} {ident}: lattice={lat} contraction={counts[ident]}"
                    )
    if first_discrepancy:
        report.outputs["first_discrepancy"] = first_discrepancy
    return report


def cmd_polytope(args) -> RunReport:
    report = RunReport(
        "polytope",
        {
            "genus": getattr(args, "genus", None),
            "graph": getattr(args, "graph", None),
            "mode": args.mode,
        },
    )
    pairs = _graphs_for(args)
    if args.mode == "volume-exact":
        volumes = []
        for ident, G in pairs:
            vol = polytope.exact_volume(polytope.build_polytope(G))
            volumes.append(vol)
            report.outputs.setdefault("volumes", []).append(
                {"graph": ident, "volume": str(vol)}
            )
        if len(pairs) > 1:
            report.add_check(
                "volume-identical-across-genus",
                len(set(volumes)) == 1,
                volumes=sorted({str(v) for v in volumes}),
            )
    elif args.mode == "volume-mc":
        report.inputs["samples"] = args.samples
        report.inputs["seed"] = args.seed
        for ident, G in pairs:
            P = polytope.build_polytope(G)
            estimate, stderr = polytope.mc_volume(P, args.samples, args.seed)
            entry = {"graph": ident, "estimate": estimate, "stderr": stderr}
            if P.dim <= polytope.MAX_EXACT_DIMENSION:
                exact = polytope.exact_volume(P)
                entry["exact"] = str(exact)
                gap = abs(estimate - float(exact))
                report.add_check(
                    f"mc-within-4-sigma[{ident}]",
                    gap <= 4.0 * stderr or gap == 0.0,
                    gap=gap,
                    stderr=stderr,
                )
            report.outputs.setdefault("estimates", []).append(entry)
    else:  # asymptotics
        report.inputs["k_max"] = args.k_max
        for ident, G in pairs:
            table = polytope.asymptotic_table(G, args.k_max)
            entry = {
                "graph": ident,
                "rows": [
                    {"k": r.level, "count": r.count, "ratio": float(r.ratio)}
                    for r in table.rows
                ],
                "volume": str(table.volume),
                "parity_rank": table.parity_rank,
                "volume_parity_corrected": str(table.volume_parity_corrected),
            }
            if table.extrapolated_limit is not None:
                entry["extrapolated_limit"] = str(table.extrapolated_limit)
                entry["extrapolated_limit_float"] = float(table.extrapolated_limit)
                target = table.volume_parity_corrected
                rel = abs(table.extrapolated_limit - target) / target
                entry["limit_relative_error"] = float(rel)
                if args.k_max >= MIN_KMAX_FOR_LIMIT_CHECK:
                    report.add_check(
                        f"limit-matches-parity-corrected-volume[{ident}]",
                        rel <= Fraction(1, 100),
                        relative_error=float(rel),
                    )
            report.outputs.setdefault("tables", []).append(entry)
    return report


def cmd_abelian(args) -> RunReport:
    report = RunReport(
        "abelian",
        {
            "g": getattr(args, "g", None),
            "level": getattr(args, "level", None),
            "multisection": getattr(args, "multisection", None),
        },
    )
    if args.multisection:
        M = abelian_mod.from_json_dict(json.loads(Path(args.multisection).read_text()))
        count = abelian_mod.gft_intersection_count(M)
        fibres = abelian_mod.e_bs_fibres(M)
        report.outputs["count"] = count
        report.outputs["fibres"] = [
            {"point": [str(c) for c in pt], "component": idx} for pt, idx in fibres
        ]
        report.add_check(
            "fibre-total-equals-count", len(fibres) == count, fibres=len(fibres)
        )
    else:
        F = abelian_mod.TorusFibration(args.g, args.level)
        report.outputs["count"] = abelian_mod.bs_count(F)
    return report


# ---------------------------------------------------------------------------
# Output formatting
# ---------------------------------------------------------------------------


def _csv_payload(report: RunReport) -> str | None:
    """CSV rendering of the command's main table, where one is declared."""
    out = report.outputs
    if report.command == "count" and "per_graph" in out:
        lines = ["graph,count"]
        lines += [f"{row['graph']},{row['count']}" for row in out["per_graph"]]
        return "\n".join(lines) + "\n"
    if report.command == "polytope" and "tables" in out:
        blocks = []
        for entry in out["tables"]:
            lines = [f"# graph={entry['graph']}", "k,count,ratio"]
            lines += [
                f"{r['k']},{r['count']},{r['ratio']!r}" for r in entry["rows"]
            ]
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n"
    if report.command == "graphs":
        lines = ["file"]
        lines += out.get("files", [])
        return "\n".join(lines) + "\n"
    return None


def _emit(report: RunReport, fmt: str) -> None:
    if fmt == "csv":
        payload = _csv_payload(report)
        if payload is not None:
            sys.stdout.write(payload)
            return
    sys.stdout.write(json.dumps(report.to_json_dict(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_budgets(p: argparse.ArgumentParser):
    p.add_argument(
        "--max-states",
        type=int,
        default=weights.DEFAULT_MAX_STATES,
        help="state budget (k+1)^E for brute-force enumeration",
    )
    p.add_argument(
        "--max-frontier",
        type=int,
        default=weights.DEFAULT_MAX_FRONTIER,
        help="cell budget (k+1)^frontier for tensor contraction",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verlinde-lab",
        description="Exact rank computations for SU(2) conformal-block spaces.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("graphs", help="enumerate trinion graph classes at a genus")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--out-dir", default=".", help="directory for .trinion.json files")
    _add_common(p)
    p.set_defaults(func=cmd_graphs)

    p = sub.add_parser("count", help="count admissible weights of a level")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--genus", type=int)
    src.add_argument("--graph", help="path to a .trinion.json file")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--method", choices=("contract", "brute"), default="contract")
    _add_budgets(p)
    _add_common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verlinde", help="Verlinde dimension formula")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_verlinde)

    p = sub.add_parser("check", help="three-way reconciliation across all routes")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--max-level", type=int, required=True)
    _add_budgets(p)
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("polytope", help="moment polytope volumes and asymptotics")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--genus", type=int)
    src.add_argument("--graph", help="path to a .trinion.json file")
    p.add_argument(
        "--mode",
        choices=("volume-exact", "volume-mc", "asymptotics"),
        required=True,
    )
    p.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    _add_common(p)
    p.set_defaults(func=cmd_polytope)

    p = sub.add_parser("abelian", help="torus fibration and multisection counts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--g", type=int, help="base dimension (with --level)")
    src.add_argument("--multisection", help="path to a multisection JSON file")
    p.add_argument("--level", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_abelian)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "abelian" and args.g is not None and args.level is None:
        parser.error("abelian --g requires --level")
    start = time.perf_counter()
    try:
        report: RunReport = args.func(args)
    except (
        ValueError,
        OSError,
        json.JSONDecodeError,
        fusion.PrecisionError,
        weights.WorkBoundExceeded,
        weights.FrontierBudgetExceeded,
        abelian_mod.BudgetExceeded,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    report.timing_seconds = time.perf_counter() - start
    _emit(report, args.format)
    if not report.all_passed():
        first = report.outputs.get("first_discrepancy")
        if first:
            sys.stderr.write(f"FIRST DISCREPANCY: {first}\n")
        else:
            failed = [c["name"] for c in report.checks if not c["passed"]]
            sys.stderr.write(f"failed checks: {', '.join(failed)}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
