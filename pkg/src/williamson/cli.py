"""Driver and command line interface.

The enumerate command runs the full pipeline for one order n divisible by 2
or 3: rowsum decompositions, PSD-filtered candidates, compression lists,
pair-sum matching, instance deduplication, and SAT uncompression with the
programmatic PSD callback.  One SAT instance is one task in a worker pool;
results are checkpointed per instance so a killed run can resume.  All found
quadruples are verified exactly before counting.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import constructions, equivalence, oracle, satgen, seqcore
from .diophantine import decompose_four_squares
from .pipeline import DEFAULT_BUDGET_BYTES, build_compression_lists, generate_candidates, match_compressions
from .progsat import CdclSolver, WilliamsonCallback
from .seqcore import EPSILON_DEFAULT, Quadruple, SymmetricSequence, verify_williamson


class DomainError(Exception):
    pass


def smallest_prime_divisor(n: int) -> int:
    for p in range(2, n + 1):
        if n % p == 0:
            return p
    raise DomainError(f"{n} has no prime divisor")


@dataclass
class RunConfig:
    n: int
    epsilon: float = EPSILON_DEFAULT
    workers: int = 1
    out_dir: str = None
    matcher_budget_bytes: int = DEFAULT_BUDGET_BYTES
    automorphism_pruning: bool = True
    product_clauses: bool = True
    programmatic_callback: bool = True
    mod4_filter: bool = True
    dump_cnf: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("order must be positive")
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        env = os.environ.get("WILLIAMSON_WORKERS")
        if env:
            self.workers = int(env)


@dataclass
class EnumerationReport:
    n: int
    instance_count: int
    solutions: list
    canonical: list
    elapsed: float
    instance_stats: list = field(default_factory=list)
    solved_this_run: int = 0
    discarded_instances: int = 0

    @property
    def inequivalent_count(self) -> int:
        return len(self.canonical)

    def total(self, stat: str) -> int:
        return sum(s[stat] for s in self.instance_stats)


def _instance_id(rows) -> str:
    return hashlib.sha1(json.dumps(rows).encode()).hexdigest()[:16]


def _solve_instance(rows, n: int, epsilon: float, use_callback: bool, use_product: bool):
    inst = satgen.encode_uncompression(rows, n)
    clauses = list(inst.clauses)
    if n % 2 == 1 and use_product:
        clauses.extend(list(c) for c in satgen.encode_product_theorem(n, inst.var_map))
    callback = WilliamsonCallback(inst.var_map, n, epsilon) if use_callback else None
    solver = CdclSolver(inst.num_vars, clauses, callback)
    models = solver.solve_all()
    f = inst.var_map.free_count
    solutions = []
    for model in models:
        values = [0] * (inst.num_vars + 1)
        for lit in model:
            values[abs(lit)] = 1 if lit > 0 else -1
        solutions.append([[values[role * f + i + 1] for i in range(f)] for role in range(4)])
    st = solver.stats
    stats = {
        "decisions": st.decisions,
        "conflicts": st.conflicts,
        "propagations": st.propagations,
        "callback_clauses": st.callback_clauses,
        "solutions": len(models),
    }
    return solutions, stats


def _solve_task(args):
    instance_id, rows, n, epsilon, use_callback, use_product = args
    solutions, stats = _solve_instance(rows, n, epsilon, use_callback, use_product)
    return instance_id, solutions, stats


def _generate_instances(cfg: RunConfig):
    n = cfg.n
    m = smallest_prime_divisor(n)
    if m not in (2, 3):
        raise DomainError(f"order {n} unsupported: smallest prime divisor is {m}")
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
    decs = decompose_four_squares(n)
    candidates = generate_candidates(n, decs, cfg.epsilon)
    matched = []
    for dec in decs:
        lists = build_compression_lists(candidates, dec, m, prune_a=cfg.automorphism_pruning)
        matched.extend(
            match_compressions(
                lists, n, cfg.epsilon,
                mod4_filter=cfg.mod4_filter and n % 2 == 0,
                budget_bytes=cfg.matcher_budget_bytes,
                tmp_dir=cfg.out_dir,
            )
        )
    kept, discarded = satgen.dedupe_instances(matched, n)
    kept_ids = [_instance_id([list(r) for r in mc.rows]) for mc in kept]
    tasks = sorted((kept_ids[i], [list(r) for r in mc.rows]) for i, mc in enumerate(kept))
    discard_log = [
        (_instance_id([list(r) for r in mc.rows]), kept_ids[kept_idx])
        for mc, kept_idx in discarded
    ]
    return tasks, discard_log


def run_enumeration(cfg: RunConfig) -> EnumerationReport:
    start = time.time()
    n = cfg.n
    tasks, discarded = _generate_instances(cfg)

    out_dir = cfg.out_dir
    checkpoint_path = None
    done = {}
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        checkpoint_path = os.path.join(out_dir, "checkpoint.jsonl")
        if os.path.exists(checkpoint_path):
            with open(checkpoint_path) as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    done[rec["id"]] = (rec["solutions"], rec["stats"])
        with open(os.path.join(out_dir, "instances_discarded.log"), "w") as f:
            for discarded_id, kept_id in discarded:
                f.write(f"{discarded_id}\tkept={kept_id}\n")

    pending = [
        (iid, rows, n, cfg.epsilon, cfg.programmatic_callback, cfg.product_clauses)
        for iid, rows in tasks
        if iid not in done
    ]
    solved_this_run = 0
    ckpt = open(checkpoint_path, "a") if checkpoint_path else None

    def record(iid, solutions, stats):
        done[iid] = (solutions, stats)
        if ckpt:
            ckpt.write(json.dumps({"id": iid, "solutions": solutions, "stats": stats}) + "\n")
            ckpt.flush()

    try:
        if cfg.workers > 1 and len(pending) > 1:
            import multiprocessing as mp

            with mp.Pool(cfg.workers) as pool:
                for iid, solutions, stats in pool.imap_unordered(_solve_task, pending):
                    record(iid, solutions, stats)
                    solved_this_run += 1
        else:
            for task in pending:
                iid, solutions, stats = _solve_task(task)
                record(iid, solutions, stats)
                solved_this_run += 1
    finally:
        if ckpt:
            ckpt.close()

    solutions = []
    instance_stats = []
    for iid, rows in tasks:
        sols, stats = done[iid]
        stats = dict(stats)
        stats["id"] = iid
        verified = []
        for free_rows in sols:
            q = Quadruple(*(SymmetricSequence.from_free(n, fr) for fr in free_rows))
            if verify_williamson(q):
                verified.append(q)
        stats["verified"] = len(verified)
        instance_stats.append(stats)
        solutions.extend(verified)

    solutions.sort(key=lambda q: tuple(x.entries for x in q.members))
    canonical = equivalence.dedupe(solutions)
    elapsed = time.time() - start

    report = EnumerationReport(
        n=n,
        instance_count=len(tasks),
        solutions=solutions,
        canonical=canonical,
        elapsed=elapsed,
        instance_stats=instance_stats,
        solved_this_run=solved_this_run,
        discarded_instances=len(discarded),
    )
    if out_dir:
        _write_run_outputs(cfg, report, tasks)
    return report


def _write_run_outputs(cfg: RunConfig, report: EnumerationReport, tasks) -> None:
    out_dir = cfg.out_dir
    with open(os.path.join(out_dir, "solutions.txt"), "w") as f:
        seqcore.write_blocks(f, (q.members for q in report.solutions))
    with open(os.path.join(out_dir, "canonical.txt"), "w") as f:
        seqcore.write_blocks(f, (q.members for q in report.canonical))
    with open(os.path.join(out_dir, "summary.tsv"), "w") as f:
        f.write("n\tseconds\tinstances\tsolutions\tinequivalent\n")
        f.write(
            f"{report.n}\t{report.elapsed:.2f}\t{report.instance_count}\t"
            f"{len(report.solutions)}\t{report.inequivalent_count}\n"
        )
    with open(os.path.join(out_dir, "stats.tsv"), "w") as f:
        f.write("instance\tdecisions\tconflicts\tpropagations\tcallback_clauses\tsolutions\n")
        for s in report.instance_stats:
            f.write(
                f"{s['id']}\t{s['decisions']}\t{s['conflicts']}\t{s['propagations']}\t"
                f"{s['callback_clauses']}\t{s['solutions']}\n"
            )
    if cfg.dump_cnf:
        cnf_dir = os.path.join(out_dir, "instances")
        os.makedirs(cnf_dir, exist_ok=True)
        for iid, rows in tasks:
            inst = satgen.encode_uncompression(rows, cfg.n)
            if cfg.n % 2 == 1 and cfg.product_clauses:
                inst.clauses.extend(list(c) for c in satgen.encode_product_theorem(cfg.n, inst.var_map))
            with open(os.path.join(cnf_dir, f"{iid}.cnf"), "w") as f:
                f.write(satgen.export_dimacs(inst))


# -- subcommands -------------------------------------------------------------


def cmd_enumerate(args) -> int:
    cfg = RunConfig(
        n=args.order,
        epsilon=args.epsilon,
        workers=args.workers,
        out_dir=args.out,
        matcher_budget_bytes=args.budget_bytes,
        automorphism_pruning=not args.no_automorphism_pruning,
        product_clauses=not args.no_product_clauses,
        programmatic_callback=not args.no_callback,
        mod4_filter=not args.no_mod4,
        dump_cnf=args.dump_cnf,
    )
    report = run_enumeration(cfg)
    print(
        f"n={report.n}\tinstances={report.instance_count}\t"
        f"solutions={len(report.solutions)}\tinequivalent={report.inequivalent_count}\t"
        f"seconds={report.elapsed:.2f}"
    )
    return 0


def cmd_verify(args) -> int:
    with open(args.file) as f:
        quadruples = seqcore.read_quadruples(f)
    ok = True
    for i, q in enumerate(quadruples, start=1):
        verdict = verify_williamson(q)
        ok = ok and verdict
        print(f"block {i}\torder {q.order}\t{'WILLIAMSON' if verdict else 'NOT-WILLIAMSON'}")
    return 0 if ok else 1


def cmd_decompose(args) -> int:
    for dec in decompose_four_squares(args.order):
        print(" ".join(str(v) for v in dec.values))
    return 0


def cmd_canonicalize(args) -> int:
    stream = open(args.file) if args.file else sys.stdin
    try:
        quadruples = seqcore.read_quadruples(stream)
    finally:
        if args.file:
            stream.close()
    canon = [equivalence.canonical_form(q) for q in quadruples]
    seqcore.write_blocks(sys.stdout, (q.members for q in canon))
    return 0


def cmd_oracle(args) -> int:
    qs = oracle.brute_force_enumerate(args.order)
    classes = equivalence.dedupe(qs)
    print(f"n={args.order}\tquadruples={len(qs)}\tinequivalent={len(classes)}")
    for q in classes:
        print()
        print(seqcore.format_block(q.members))
    return 0


def cmd_double(args) -> int:
    with open(args.file) as f:
        quadruples = seqcore.read_quadruples(f)
    doubled = [constructions.double(q) for q in quadruples]
    seqcore.write_blocks(sys.stdout, (q.members for q in doubled))
    return 0


def cmd_extract8(args) -> int:
    with open(args.file) as f:
        quadruples = seqcore.read_quadruples(f)
    octs = [constructions.extract_eight_williamson(q) for q in quadruples]
    seqcore.write_blocks(sys.stdout, (o.members for o in octs))
    return 0


def cmd_hadamard(args) -> int:
    with open(args.file) as f:
        quadruples = seqcore.read_quadruples(f)
    for i, q in enumerate(quadruples, start=1):
        h = constructions.assemble_hadamard(q)
        print(f"block {i}\thadamard order {h.order}\tverified")
        if args.print_matrix:
            for row in h.entries:
                print("".join("+" if v == 1 else "-" for v in row))
    return 0


def cmd_stats(args) -> int:
    path = os.path.join(args.rundir, "summary.tsv")
    with open(path) as f:
        sys.stdout.write(f.read())
    stats_path = os.path.join(args.rundir, "stats.tsv")
    if os.path.exists(stats_path):
        totals = {"decisions": 0, "conflicts": 0, "callback_clauses": 0, "solutions": 0}
        with open(stats_path) as f:
            header = f.readline().strip().split("\t")
            for line in f:
                row = dict(zip(header, line.strip().split("\t")))
                for k in totals:
                    totals[k] += int(row[k])
        print("\t".join(f"total_{k}={v}" for k, v in totals.items()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="williamson",
        description="Exhaustive enumeration of Williamson sequences of orders divisible by 2 or 3",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="run the full pipeline for one order")
    p.add_argument("--order", "-n", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=EPSILON_DEFAULT)
    p.add_argument("--workers", "-j", type=int, default=1)
    p.add_argument("--out", "-o", default=None, help="run directory (enables checkpointing)")
    p.add_argument("--budget-bytes", type=int, default=DEFAULT_BUDGET_BYTES,
                   help="matcher in-memory budget before spilling key lists")
    p.add_argument("--no-callback", action="store_true", help="disable the programmatic PSD callback")
    p.add_argument("--no-product-clauses", action="store_true")
    p.add_argument("--no-automorphism-pruning", action="store_true")
    p.add_argument("--no-mod4", action="store_true")
    p.add_argument("--dump-cnf", action="store_true", help="write instances/*.cnf DIMACS dumps")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="verify quadruple blocks in a file")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="print rowsum decompositions of 4n")
    p.add_argument("order", type=int)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("canonicalize", help="print canonical forms of quadruple blocks")
    p.add_argument("file", nargs="?", default=None)
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("oracle", help="brute-force enumeration for small orders")
    p.add_argument("--order", "-n", type=int, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("double", help="double odd-order Williamson quadruples")
    p.add_argument("file")
    p.set_defaults(func=cmd_double)

    p = sub.add_parser("extract8", help="extract 8-Williamson sequences from order-2n quadruples")
    p.add_argument("file")
    p.set_defaults(func=cmd_extract8)

    p = sub.add_parser("hadamard", help="assemble and verify Hadamard matrices")
    p.add_argument("file")
    p.add_argument("--print-matrix", action="store_true")
    p.set_defaults(func=cmd_hadamard)

    p = sub.add_parser("stats", help="print the summary of a run directory")
    p.add_argument("rundir")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
