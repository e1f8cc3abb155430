"""Command-line interface.

Verbs: ``classify``, ``partition``, ``factorize``, ``benchmark``,
``simulate`` and ``graph-export``. Any flag may also be given in a flat
``key=value`` file passed with ``--config``; command-line flags win.

Exit codes: 0 success, 2 parse error, 3 precondition error,
4 eigensolver non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .classify import TABLE_ORDER, SolvabilityClass, graph_predicate
from .factor import FactorizationError, factorize, to_dict
from .hamfile import HamiltonianFileError, resolve
from .hamgraph import build_anti_graph, connected_components, recognize_line_graph, root_graph, twin_free_core
from .partition import (
    Fragment,
    dumps as partition_dumps,
    fragment_from_dict,
    partition_report,
    sorted_insertion,
)
from .pauli import Hamiltonian, PauliError
from .solver import (
    DimensionError,
    NonConvergenceError,
    estimate_energy,
    ground_state,
    variance_metric,
)
from .solver.statevector import MEMORY_CAP_QUBITS

log = logging.getLogger("solvfrag")

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_NONCONVERGENCE = 0, 2, 3, 4

DEFAULTS = {
    "class": "Sym-TWC-FF",
    "shots": 100_000,
    "seed": 1234,
    "out": None,
    "format": None,
    "max_qubits": MEMORY_CAP_QUBITS,
    "tol": 1e-8,
    "jobs": 1,
}
_INT_KEYS = {"shots", "seed", "max_qubits", "jobs"}
_FLOAT_KEYS = {"tol"}


class PreconditionError(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


def read_config(path: str) -> dict:
    """Flat ``key=value`` file; keys as the long flags (``max-qubits`` or
    ``max_qubits``); ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(float(value))
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return out


def _classes(text: str) -> list[SolvabilityClass]:
    if text.strip().lower() == "all":
        return list(TABLE_ORDER)
    return [SolvabilityClass.parse(t) for t in text.split(",")]


def _load(source: str, max_qubits: int | None = None) -> Hamiltonian:
    h = resolve(source).hamiltonian
    if max_qubits is not None and h.n_qubits > max_qubits:
        raise PreconditionError(f"{source}: {h.n_qubits} qubits exceeds --max-qubits {max_qubits}")
    return h


def _emit(text: str, args, name: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
        print(f"wrote {out / name}")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands


def cmd_classify(args) -> int:
    h = _load(args.file)
    g = build_anti_graph(h)
    report = {"file": args.file, "terms": len(h.terms), "classes": {}}
    for cls in _classes(args.cls):
        verdict = graph_predicate(cls)(g)
        report["classes"][cls.value] = verdict
        print(f"{cls.value}: {'true' if verdict else 'false'}")
    if args.certificate:
        core, kept, twins = twin_free_core(g)
        cert = {
            "twin_classes": [list(c) for c in twins.classes],
            "isolated": [v for v in range(g.vertex_count) if g.adj[v] == 0],
            "components": [],
        }
        for comp in connected_components(core):
            kd = recognize_line_graph(core.subgraph(comp)) if len(comp) > 1 else None
            cert["components"].append(
                {
                    "vertices": [kept[v] for v in comp],
                    "krausz_cliques": None
                    if kd is None
                    else [[kept[comp[v]] for v in cl] for cl in kd.cliques],
                }
            )
        report["certificate"] = cert
        _emit(json.dumps(report, indent=1) + "\n", args, "classify.json")
    return EXIT_OK


def cmd_partition(args) -> int:
    h = _load(args.file)
    fmt = args.format or "json"
    for cls in _classes(args.cls):
        p = sorted_insertion(h, cls)
        stats = partition_report(p)
        if not all(f.verified for f in stats.fragments):  # pragma: no cover
            raise PreconditionError("a fragment failed post-hoc class verification")
        print(
            f"{cls.value}: {stats.fragment_count} fragments, largest L1 "
            f"{stats.largest_l1:.6g} ({stats.largest_count} terms)",
            file=sys.stderr if not args.out and fmt == "json" else sys.stdout,
        )
        slug = cls.value.lower()
        if fmt == "json":
            _emit(partition_dumps(p) + "\n", args, f"partition-{slug}.json")
        elif fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf)
            w.writerow(["fragment", "pauli", "coefficient"])
            for i, frag in enumerate(p.fragments):
                for t in frag.terms:
                    w.writerow([i, t.op.label() or "I", repr(t.coeff)])
            _emit(buf.getvalue(), args, f"partition-{slug}.csv")
        else:
            raise ConfigError(f"partition supports json or csv, not {fmt}")
    return EXIT_OK


def _fragment_source(args) -> Fragment | Hamiltonian:
    path = Path(args.file)
    if path.suffix == ".json":
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if "fragments" in doc:
            frags = doc["fragments"]
            if not 0 <= args.fragment < len(frags):
                raise PreconditionError(f"fragment index {args.fragment} out of range")
            return fragment_from_dict(frags[args.fragment], int(doc["n_qubits"]))
        return fragment_from_dict(doc, int(doc["n_qubits"]))
    h = _load(args.file)
    return Hamiltonian(h.n_qubits, tuple(t for t in h.terms if not t.op.is_identity), h.label)


def cmd_factorize(args) -> int:
    src = _fragment_source(args)
    ff = factorize(src)
    dims = [len(c.generators) for c in ff.components]
    print(f"K={ff.K} components={len(ff.components)} d={dims} reconstruction=ok", file=sys.stderr)
    _emit(json.dumps(to_dict(ff), indent=1) + "\n", args, "factorized.json")
    return EXIT_OK


def _benchmark_row(h: Hamiltonian, cls: SolvabilityClass, state) -> dict:
    t0 = time.perf_counter()
    p = sorted_insertion(h, cls)
    stats = partition_report(p)
    budget = variance_metric(p, state)
    return {
        "class": cls.value,
        "metric": budget.metric,
        "largest_l1": stats.largest_l1,
        "largest_terms": stats.largest_count,
        "fragments": stats.fragment_count,
        "seconds": time.perf_counter() - t0,
    }


def cmd_benchmark(args) -> int:
    classes = _classes(args.cls)
    rows = []
    status = EXIT_OK
    for source in args.file:
        h = _load(source, args.max_qubits)
        label = h.label or Path(source).stem
        try:
            gs = ground_state(h, max_qubits=args.max_qubits, tol=args.tol)
        except NonConvergenceError as exc:
            print(f"{source}: {exc}", file=sys.stderr)
            status = EXIT_NONCONVERGENCE
            continue
        log.info("%s: ground energy %.12f (degenerate=%s)", label, gs.energy, gs.degenerate)
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                futures = [pool.submit(_benchmark_row, h, c, gs.state) for c in classes]
                results = [f.result() for f in futures]
        else:
            results = [_benchmark_row(h, c, gs.state) for c in classes]
        for r in results:
            log.info("%s %s: %d fragments in %.2fs", label, r["class"], r["fragments"], r["seconds"])
            rows.append(
                {
                    "system": label,
                    "n_qubits": h.n_qubits,
                    "ground_energy": gs.energy,
                    "degenerate": gs.degenerate,
                    "hamiltonian_l1": h.l1_norm(),
                    "hamiltonian_terms": sum(1 for t in h.terms if not t.op.is_identity),
                    **r,
                }
            )
    fmt = args.format or "csv"
    if fmt == "csv":
        buf = io.StringIO()
        fields = [
            "system", "class", "metric", "largest_l1", "largest_terms", "fragments",
            "n_qubits", "ground_energy", "degenerate", "hamiltonian_l1", "hamiltonian_terms", "seconds",
        ]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        _emit(buf.getvalue(), args, "benchmark.csv")
    elif fmt == "json":
        _emit(json.dumps(rows, indent=1) + "\n", args, "benchmark.json")
    else:
        raise ConfigError(f"benchmark supports csv or json, not {fmt}")
    return status


def cmd_simulate(args) -> int:
    if args.shots <= 0:
        raise PreconditionError("--shots must be positive")
    h = _load(args.file, args.max_qubits)
    gs = ground_state(h, max_qubits=args.max_qubits, tol=args.tol)
    report = []
    as_json = args.format == "json" or args.out
    summary = sys.stderr if as_json and not args.out else sys.stdout
    for cls in _classes(args.cls):
        p = sorted_insertion(h, cls)
        r = estimate_energy(p, gs.state, args.shots, args.seed)
        report.append(
            {
                "class": cls.value,
                "estimate": r.estimate,
                "stderr": r.stderr,
                "exact": r.exact,
                "ground_energy": gs.energy,
                "z_score": r.z_score,
                "shots": r.total_shots,
                "fragments": len(p),
                "metric": r.budget.metric,
                "shots_times_stderr2": args.shots * r.stderr**2,
            }
        )
        print(
            f"{cls.value}: {r.estimate:.10f} +- {r.stderr:.3g} (exact {r.exact:.10f}, "
            f"{r.total_shots} shots over {len(p)} fragment{'s' if len(p) != 1 else ''})",
            file=summary,
        )
    if as_json:
        _emit(json.dumps(report, indent=1) + "\n", args, "simulate.json")
    return EXIT_OK


def cmd_graph_export(args) -> int:
    h = _load(args.file)
    g = build_anti_graph(h)
    fmt = args.format or "dot"
    if fmt != "dot":
        raise ConfigError(f"graph-export writes dot, not {fmt}")
    if args.graph == "anti":
        text = g.to_dot("anticompatibility")
    else:
        core, kept, _ = twin_free_core(g)
        if args.graph == "quotient":
            text = core.to_dot("quotient")
        else:
            comps = connected_components(core)
            if len(comps) != 1:
                raise PreconditionError("root graph export needs a connected twin-free core")
            kd = recognize_line_graph(core) if core.vertex_count else None
            if kd is None:
                raise PreconditionError("twin-free core is not a line graph")
            text = root_graph(kd).to_dot("root")
    _emit(text, args, f"{args.graph}.dot")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file with flag defaults")
    common.add_argument("--class", dest="cls", help="class name, comma list, or 'all'")
    common.add_argument("--shots", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory (stdout when absent)")
    common.add_argument("--format", choices=("json", "csv", "dot"))
    common.add_argument("--max-qubits", dest="max_qubits", type=int)
    common.add_argument("--tol", type=float, help="ground-state residual tolerance")
    common.add_argument("--jobs", type=int, help="worker processes for benchmark")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="solvfrag", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="test class membership")
    p.add_argument("file")
    p.add_argument("--certificate", action="store_true", help="emit twin classes and Krausz cliques")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("partition", parents=[common], help="sorted-insertion partition")
    p.add_argument("file")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("factorize", parents=[common], help="factorize a Sym-TWC-FF fragment")
    p.add_argument("file", help="Hamiltonian file, fragment JSON or partition JSON")
    p.add_argument("--fragment", type=int, default=0, help="index into a partition JSON")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("benchmark", parents=[common], help="variance metric and fragment stats")
    p.add_argument("file", nargs="+")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("simulate", parents=[common], help="shot simulation of the estimator")
    p.add_argument("file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("graph-export", parents=[common], help="write a graph as DOT")
    p.add_argument("file")
    p.add_argument("--graph", choices=("anti", "quotient", "root"), default="anti")
    p.set_defaults(func=cmd_graph_export)
    return parser


def _settle(args) -> None:
    conf = read_config(args.config) if args.config else {}
    defaults = dict(DEFAULTS)
    if args.command in ("benchmark", "classify"):
        defaults["class"] = "all"
    for key, default in defaults.items():
        attr = "cls" if key == "class" else key
        if getattr(args, attr, None) is None:
            setattr(args, attr, conf.get(key, default))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        _settle(args)
        return args.func(args)
    except (HamiltonianFileError, PauliError, ConfigError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        if isinstance(exc, (FactorizationError, DimensionError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
