"""Command-line front end: metric, query, diag, asm, run, bench.

Every command renders one report in a chosen format: ``text`` (human),
``tsv`` (stable tab-separated lines), or ``json`` (stable document).
Diagnostics go to stderr and the exit status is nonzero on any failure.
Set LAMP_COLOR=0 to disable text decoration.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction

from . import asm as asm_mod
from .assoc import diagnose, load_table, query, rank
from .bitvec import BitVector
from .errors import LampError, ModeMismatch
from .quality import (
    QualityIndex,
    criterion_arith,
    criterion_vector,
    quality_arith,
    quality_index,
)
from .sim import GRID_SIZE, Grid, M_REGS, Program, builtin_query_program
from .ternary import TernaryVector


def _color_enabled() -> bool:
    return os.environ.get("LAMP_COLOR", "1") != "0" and sys.stdout.isatty()


def _head(s: str) -> str:
    return f"\033[1m{s}\033[0m" if _color_enabled() else s


def _emit(report: dict, text_lines: list[str], tsv_lines: list[list], fmt: str):
    if fmt == "json":
        print(json.dumps(report, indent=2, default=str))
    elif fmt == "tsv":
        for row in tsv_lines:
            print("\t".join(str(x) for x in row))
    else:
        for line in text_lines:
            print(line)


def _frac(f: Fraction) -> str:
    return str(f)


# --------------------------------------------------------------------------
# metric


def cmd_metric(args) -> int:
    fmt = args.format
    if args.mode == "arith":
        m = TernaryVector.parse(args.m)
        a = TernaryVector.parse(args.a)
        s = quality_arith(m, a)
        text = [
            _head(f"interaction quality ({m.symbols()} vs {a.symbols()})"),
            f"d          = {_frac(s.d)}",
            f"mu(m in A) = {_frac(s.mu_m_in_a)}",
            f"mu(A in m) = {_frac(s.mu_a_in_m)}",
            f"Q = {_frac(s.value)}",
        ]
        tsv = [
            ["d", s.d], ["mu_m_in_a", s.mu_m_in_a],
            ["mu_a_in_m", s.mu_a_in_m], ["q", s.value],
        ]
        report = {
            "command": "metric", "mode": "arith",
            "inputs": {"m": m.symbols(), "a": a.symbols()},
            "d": s.d, "mu_m_in_a": s.mu_m_in_a, "mu_a_in_m": s.mu_a_in_m,
            "q": s.value,
        }
    elif args.mode == "int":
        m = BitVector.parse(args.m)
        a = BitVector.parse(args.a)
        s = criterion_arith(m, a)
        text = [
            _head(f"integer criterion ({m.to01()} vs {a.to01()})"),
            f"d_card              = {s.d_card}",
            f"nonmembership(m, A) = {s.nonmembership_m_in_a}",
            f"nonmembership(A, m) = {s.nonmembership_a_in_m}",
            f"Q = {s.value}",
        ]
        tsv = [
            ["d_card", s.d_card],
            ["nonmembership_m_in_a", s.nonmembership_m_in_a],
            ["nonmembership_a_in_m", s.nonmembership_a_in_m],
            ["q", s.value],
        ]
        report = {
            "command": "metric", "mode": "int",
            "inputs": {"m": m.to01(), "a": a.to01()},
            "d_card": s.d_card,
            "nonmembership_m_in_a": s.nonmembership_m_in_a,
            "nonmembership_a_in_m": s.nonmembership_a_in_m,
            "q": s.value,
        }
    else:
        m = BitVector.parse(args.m)
        a = BitVector.parse(args.a)
        qv = criterion_vector(m, a)
        shared = m & a
        idx = quality_index(m, a)
        rows = [
            ("m", m.to01()),
            ("A", a.to01()),
            ("m AND A", shared.to01()),
            ("NOT(m AND A)", (~shared).to01()),
            ("d = m XOR A", qv.d_vec.to01()),
            ("mu(A in m)", qv.mu_a_in_m_vec.to01()),
            ("mu(m in A)", qv.mu_m_in_a_vec.to01()),
            ("Q (OR of three)", qv.q_vec.to01()),
            ("Q compacted", qv.q_compacted.to01()),
        ]
        text = [_head("vector criterion")]
        text += [f"{name:<16} {vec}" for name, vec in rows]
        text.append(f"Q = {idx.k}/{idx.n}")
        tsv = [[name.replace(" ", "_"), vec] for name, vec in rows]
        tsv.append(["q_index", f"{idx.k}/{idx.n}"])
        report = {
            "command": "metric", "mode": "vector",
            "inputs": {"m": m.to01(), "a": a.to01()},
            **{name: vec for name, vec in (
                ("m_and_a", shared.to01()),
                ("not_m_and_a", (~shared).to01()),
                ("d_vec", qv.d_vec.to01()),
                ("mu_a_in_m_vec", qv.mu_a_in_m_vec.to01()),
                ("mu_m_in_a_vec", qv.mu_m_in_a_vec.to01()),
                ("q_vec", qv.q_vec.to01()),
                ("q_compacted", qv.q_compacted.to01()),
            )},
            "k": idx.k, "n": idx.n,
        }
    _emit(report, text, tsv, fmt)
    return 0


# --------------------------------------------------------------------------
# query / diag


def _score_cells(score) -> tuple[str, dict]:
    if isinstance(score, QualityIndex):
        return f"k={score.k}/{score.n}", {"k": score.k, "n": score.n}
    return f"Q={_frac(score.value)}", {
        "q": score.value, "d": score.d,
        "mu_m_in_a": score.mu_m_in_a, "mu_a_in_m": score.mu_a_in_m,
    }


def _run_table_query(args, response_mode: bool) -> int:
    with open(args.table, encoding="utf-8") as fh:
        table = load_table(fh, name=os.path.basename(args.table))
    vec_text = args.response if response_mode else args.m
    if response_mode:
        probe = BitVector.parse(vec_text)
        result = diagnose(table, probe)
    else:
        probe = TernaryVector.parse(vec_text)
        result = query(table, probe)

    mode_name = result.mode.value
    best_disp, best_json = _score_cells(result.best_index)
    text = [
        _head(f"{table.name}: {len(table)} rows, width {table.cols}, {mode_name}"),
        f"query   {vec_text}",
    ]
    tsv, rows_json = [], []
    for idx, label in result.best_rows:
        text.append(f"winner  row {idx}" + (f"  {label}" if label else "") + f"  {best_disp}")
        tsv.append(["winner", idx, label or "", *best_json.values()])
    if args.top:
        ranked = rank(table, probe, args.top)
        text.append(_head(f"top {len(ranked)}"))
        for idx, score in ranked:
            disp, cells = _score_cells(score)
            label = table.labels[idx - 1]
            text.append(f"  row {idx}" + (f"  {label}" if label else "") + f"  {disp}")
            tsv.append(["rank", idx, label or "", *cells.values()])
            rows_json.append({"row": idx, "label": label, **cells})
    report = {
        "command": "diag" if response_mode else "query",
        "inputs": {"table": args.table, "vector": vec_text, "top": args.top},
        "mode": mode_name,
        "best_rows": [
            {"row": idx, "label": label} for idx, label in result.best_rows
        ],
        "best": best_json,
        "per_row": [
            {"row": i + 1, "label": table.labels[i], **_score_cells(s)[1]}
            for i, s in enumerate(result.per_row)
        ],
    }
    if args.top:
        report["ranked"] = rows_json
    _emit(report, text, tsv, args.format)
    return 0


def cmd_query(args) -> int:
    return _run_table_query(args, response_mode=False)


def cmd_diag(args) -> int:
    return _run_table_query(args, response_mode=True)


# --------------------------------------------------------------------------
# asm


def cmd_asm_build(args) -> int:
    with open(args.source, encoding="utf-8") as fh:
        program = asm_mod.assemble(fh.read())
    out = args.output or os.path.splitext(args.source)[0] + ".lprog"
    asm_mod.save_program(out, program)
    used = sum(
        1 for r in range(GRID_SIZE) for c in range(GRID_SIZE) if program.cells[r][c]
    )
    total = sum(len(program.cells[r][c]) for r in range(GRID_SIZE) for c in range(GRID_SIZE))
    print(f"wrote {out}: width={program.width or 'unset'}, "
          f"{total} instructions across {used} cells")
    return 0


def cmd_asm_dump(args) -> int:
    program = asm_mod.load_program(args.program)
    sys.stdout.write(asm_mod.disassemble(program))
    return 0


# --------------------------------------------------------------------------
# run


def _load_freight(args):
    """Resolve the program, table rows, register loads, and the width."""
    table_rows = None
    if args.table:
        with open(args.table, encoding="utf-8") as fh:
            table = load_table(fh, name=os.path.basename(args.table))
        if not table.is_binary:
            raise ModeMismatch("simulator tables must be binary")
        table_rows = table.row_bits()

    loads = []
    for item in args.load or []:
        name, _, bits = item.partition("=")
        regs = {r.name: r for r in M_REGS}
        if name.upper() not in regs or not bits:
            raise LampError(f"bad --load {item!r}, expected REG=BITS")
        loads.append((regs[name.upper()], BitVector.parse(bits)))

    if args.builtin_query:
        if table_rows is None:
            raise LampError("--builtin-query needs --table")
        program = Program.single_cell(builtin_query_program(len(table_rows)))
    else:
        with open(args.program, "rb") as fh:
            blob = fh.read()
        if blob.startswith(asm_mod.MAGIC):
            program = asm_mod.program_from_bytes(blob)
        else:
            program = asm_mod.assemble(blob.decode("utf-8"))

    width = program.width or args.width
    for _, vec in loads:
        width = width or vec.n
    if table_rows:
        width = width or table_rows[0].n
    # a program that never touches data (HALT only, pure control) runs at any width
    return program, table_rows, loads, width or 1


def cmd_run(args) -> int:
    program, table_rows, loads, width = _load_freight(args)
    grid = Grid(width, tracing=args.trace)
    grid.load_program(program)
    if table_rows:
        grid.set_table(table_rows)
    for reg, vec in loads:
        grid.set_register(reg, vec)

    result = grid.run(args.max_cycles)
    text = [
        _head("run"),
        f"outcome {result.outcome.value}",
        f"cycles  {result.cycles}",
    ]
    tsv = [["outcome", result.outcome.value], ["cycles", result.cycles]]
    cells_json = {}
    if result.deadlocked:
        cellset = ", ".join(f"({r},{c})" for r, c in result.deadlocked)
        text.append(f"deadlocked cells: {cellset}")
        tsv.append(["deadlocked", cellset])
    for r in range(GRID_SIZE):
        for c in range(GRID_SIZE):
            seq = grid.cell(r, c)
            if not seq.program:
                continue
            text.append(_head(f"cell {r},{c}") + f"  pc={seq.pc} flag={seq.flag} "
                        f"row={seq.row_idx} cycles={seq.cycles}")
            cell = {"pc": seq.pc, "flag": seq.flag, "row": seq.row_idx,
                    "cycles": seq.cycles, "halted": seq.halted}
            for reg in M_REGS:
                text.append(f"  {reg.name} {seq.regs[reg].to01()}")
                tsv.append(["reg", f"{r},{c}", reg.name, seq.regs[reg].to01()])
                cell[reg.name] = seq.regs[reg].to01()
            cells_json[f"{r},{c}"] = cell
    report = {
        "command": "run",
        "inputs": {
            "program": None if args.builtin_query else args.program,
            "builtin_query": args.builtin_query,
            "table": args.table, "max_cycles": args.max_cycles,
        },
        "outcome": result.outcome.value,
        "cycles": result.cycles,
        "deadlocked": [f"{r},{c}" for r, c in result.deadlocked],
        "cells": cells_json,
    }
    _emit(report, text, tsv, args.format)
    if args.trace and args.format == "text":
        print(_head("trace (cycle cell pc mnemonic)"))
        for line in grid.trace:
            print(line)
    return 0


# --------------------------------------------------------------------------
# bench


def _scalar_criterion(m_bits: list[int], a_bits: list[int]) -> int:
    """Integer criterion computed one coordinate at a time."""
    d = ones_m = ones_a = common = 0
    for mb, ab in zip(m_bits, a_bits):
        if mb != ab:
            d += 1
        ones_m += mb
        ones_a += ab
        if mb and ab:
            common += 1
    return d + (ones_a - common) + (ones_m - common)


def cmd_bench(args) -> int:
    rng = random.Random(args.seed)
    n, rows = args.n, args.rows
    table = [BitVector(n, rng.getrandbits(n)) for _ in range(rows)]
    m = BitVector(n, rng.getrandbits(n))

    winners = []
    t0 = time.perf_counter()
    for _ in range(args.iters):
        ks = [quality_index(m, row).k for row in table]
        best = min(ks)
        winners.append(tuple(i for i, k in enumerate(ks) if k == best))
    vec_elapsed = time.perf_counter() - t0
    vec_rate = rows * args.iters / vec_elapsed if vec_elapsed else float("inf")
    stable = all(w == winners[0] for w in winners)

    report = {
        "command": "bench",
        "inputs": {"n": n, "rows": rows, "iters": args.iters, "seed": args.seed},
        "vector_rows_per_s": round(vec_rate, 1),
        "winner_rows": [i + 1 for i in winners[0]],
        "best_k": min(quality_index(m, table[i]).k for i in winners[0]),
        "winners_stable": stable,
    }
    text = [
        _head("bench"),
        f"n       {n}",
        f"rows    {rows}",
        f"iters   {args.iters}",
        f"vector  {vec_rate:.1f} rows/s",
    ]
    tsv = [["vector_rows_per_s", f"{vec_rate:.1f}"]]

    if args.baseline:
        sample = min(rows, args.baseline_rows)
        bit_rows = [row.bits() for row in table[:sample]]
        m_bits = m.bits()
        t0 = time.perf_counter()
        scalar_scores = [_scalar_criterion(m_bits, row) for row in bit_rows]
        sc_elapsed = time.perf_counter() - t0
        sc_rate = sample / sc_elapsed if sc_elapsed else float("inf")
        # the two paths must agree where both were measured
        agree = all(
            scalar_scores[i] == criterion_arith(m, table[i]).value
            for i in range(sample)
        )
        speedup = vec_rate / sc_rate if sc_rate else float("inf")
        report.update(
            scalar_rows_per_s=round(sc_rate, 1),
            scalar_sample_rows=sample,
            speedup=round(speedup, 2),
            paths_agree=agree,
        )
        text += [
            f"scalar  {sc_rate:.1f} rows/s  (per-coordinate, sampled on {sample} rows)",
            f"speedup {speedup:.2f}x  (measured on this machine, not a claim)",
            f"agree   {'yes' if agree else 'NO'}",
        ]
        tsv += [
            ["scalar_rows_per_s", f"{sc_rate:.1f}"],
            ["scalar_sample_rows", sample],
            ["speedup", f"{speedup:.2f}"],
            ["paths_agree", agree],
        ]
    text.append(
        f"winner  rows {report['winner_rows'][:4]} k={report['best_k']}/{n}"
        + (" (stable)" if stable else " (UNSTABLE)")
    )
    tsv += [
        ["winner_rows", ",".join(str(i) for i in report["winner_rows"])],
        ["best_k", report["best_k"]],
        ["winners_stable", stable],
    ]
    _emit(report, text, tsv, args.format)
    return 0


# --------------------------------------------------------------------------
# entry point


def _add_format(p):
    p.add_argument(
        "--format", choices=("text", "tsv", "json"), default="text",
        help="output format (default: text)",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lamp",
        description="Vector-logic metric, associative table queries, and "
        "the LAMP grid simulator toolchain.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metric", help="score the interaction of two vectors")
    p.add_argument("--m", required=True, help="query vector")
    p.add_argument("--a", required=True, help="associator vector")
    p.add_argument(
        "--mode", choices=("arith", "int", "vector"), default="vector",
        help="arith: normalized rational on {0,1,x}; int: integer sum; "
        "vector: pure logic-vector criterion (default)",
    )
    _add_format(p)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("query", help="find the best rows of a table")
    p.add_argument("table", help="table file ({0,1,x} rows, optional label<TAB>)")
    p.add_argument("--m", required=True, help="query vector")
    p.add_argument("--top", type=int, help="also list the best K rows")
    _add_format(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("diag", help="look up a response in a fault dictionary")
    p.add_argument("table", help="fault dictionary file (binary signatures)")
    p.add_argument("--response", required=True, help="observed response vector")
    p.add_argument("--top", type=int, help="also list the best K candidates")
    _add_format(p)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("asm", help="assemble or dump grid programs")
    asub = p.add_subparsers(dest="asm_command", required=True)
    pb = asub.add_parser("build", help="assemble source into a LAMP1 binary")
    pb.add_argument("source")
    pb.add_argument("-o", "--output", help="output path (default: source.lprog)")
    pb.set_defaults(func=cmd_asm_build)
    pd = asub.add_parser("dump", help="disassemble a LAMP1 binary to stdout")
    pd.add_argument("program")
    pd.set_defaults(func=cmd_asm_dump)

    p = sub.add_parser("run", help="run a program on the 4x4 grid")
    p.add_argument("program", nargs="?", help="program file (.lasm text or LAMP1 binary)")
    p.add_argument(
        "--builtin-query", action="store_true",
        help="run the canonical best-row search instead of a program file "
        "(query in MA, table rows as the matrix)",
    )
    p.add_argument("--table", help="table file loaded into every cell's matrix")
    p.add_argument(
        "--load", action="append", metavar="REG=BITS",
        help="preload an m-register in every cell (repeatable)",
    )
    p.add_argument(
        "--width", type=int,
        help="vector width when neither .width, --table, nor --load sets it",
    )
    p.add_argument("--max-cycles", type=int, default=100_000)
    p.add_argument("--trace", action="store_true", help="print a cycle trace")
    _add_format(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="measure criterion throughput")
    p.add_argument("--n", type=int, default=256, help="vector width")
    p.add_argument("--rows", type=int, default=10_000, help="table rows")
    p.add_argument("--iters", type=int, default=3, help="vector-path passes")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument(
        "--baseline-rows", type=int, default=200,
        help="rows sampled for the per-coordinate baseline (default 200)",
    )
    p.add_argument(
        "--no-baseline", dest="baseline", action="store_false",
        help="skip the scalar baseline",
    )
    _add_format(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run" and not args.builtin_query and not args.program:
        print("error: run needs a program file or --builtin-query", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except LampError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
