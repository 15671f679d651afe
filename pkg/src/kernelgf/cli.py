"""Command-line front end.

    kernelgf kernel GRAPH            list kernels and their colourings
    kernelgf series NAME --order N   coefficient table of a generating function
    kernelgf verify --family F       oracle counts against the series
    kernelgf asym --nmax N           constants and exact ratio tables
    kernelgf play [GRAPH]            play the token game against the engine

Graph files: first line ``n m``, then ``m`` lines ``u v`` for the arc u->v,
vertices 1..n, ``#`` starts a comment.  Exit codes: 0 success, 1 usage or
parse error, 2 no kernel, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from dataclasses import dataclass
from typing import Optional, TextIO

from . import asym, oracle
from . import series as S
from .digraph import Digraph, DigraphError, enumerate_kernels, find_circuit
from .egf import TruncatedEGF
from .game import losing_positions, optimal_move, suggest_move

EXIT_OK, EXIT_USAGE, EXIT_NO_KERNEL, EXIT_MISMATCH = 0, 1, 2, 3
MAX_ORDER = 400

log = logging.getLogger("kernelgf")


class GraphParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {message}")


def parse_graph(text: str) -> Digraph:
    """Parse the ``n m`` / ``u v`` arc-list format."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        tokens, col = [], 0
        for tok in body.split():
            col = body.index(tok, col)
            tokens.append((tok, col + 1))
            col += len(tok)
        rows.append((lineno, tokens))
    if not rows:
        raise GraphParseError(1, 1, "empty graph description")

    def ints(lineno, tokens, what):
        if len(tokens) != 2:
            c = tokens[2][1] if len(tokens) > 2 else len(" ".join(t for t, _ in tokens)) + 1
            raise GraphParseError(lineno, c, f"expected two integers ({what})")
        out = []
        for tok, c in tokens:
            try:
                out.append(int(tok))
            except ValueError:
                raise GraphParseError(lineno, c, f"not an integer: {tok!r}") from None
        return out

    lineno, tokens = rows[0]
    n, m = ints(lineno, tokens, "n m")
    if n < 1 or m < 0:
        raise GraphParseError(lineno, tokens[0][1], "need n >= 1 and m >= 0")
    if len(rows) - 1 != m:
        last = rows[-1][0]
        raise GraphParseError(last, 1, f"header announces {m} arcs, found {len(rows) - 1}")
    arcs = []
    seen = set()
    for lineno, tokens in rows[1:]:
        u, v = ints(lineno, tokens, "u v")
        for x, (_, c) in zip((u, v), tokens):
            if not 1 <= x <= n:
                raise GraphParseError(lineno, c, f"vertex {x} outside 1..{n}")
        if u == v:
            raise GraphParseError(lineno, tokens[0][1], f"loop at vertex {u}")
        if (u, v) in seen:
            raise GraphParseError(lineno, tokens[0][1], f"repeated arc {u} {v}")
        seen.add((u, v))
        arcs.append((u, v))
    return Digraph(n, arcs)


def format_graph(d: Digraph) -> str:
    lines = [f"{d.n} {len(d.arcs)}"] + [f"{u} {v}" for u, v in d.sorted_arcs()]
    return "\n".join(lines) + "\n"


def to_dot(d: Digraph, red=frozenset(), name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in d.vertices:
        attr = ' [style=filled, fillcolor=red]' if v in red else ' [color=green]'
        lines.append(f"  {v}{attr};")
    for u, v in d.sorted_arcs():
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class RunConfig:
    command: str
    source: Optional[str] = None
    inline: Optional[str] = None
    name: Optional[str] = None
    order: int = 7
    n_max: int = 6
    digits: int = 50
    fmt: str = "text"
    jobs: int = 1
    seed: int = 0
    hint: bool = False
    family: str = "all"
    full: bool = False
    inject: Optional[str] = None
    kind: str = "all"
    size: Optional[int] = None
    start: Optional[int] = None
    engine_first: bool = False
    no_check: bool = False

    def validate(self) -> None:
        if self.command == "series" and not 1 <= self.order <= MAX_ORDER:
            raise ValueError(f"--order must be in 1..{MAX_ORDER}")
        if self.command == "asym" and not 2 <= self.n_max <= MAX_ORDER:
            raise ValueError(f"--nmax must be in 2..{MAX_ORDER}")
        if self.command == "verify":
            if self.family in ("trees", "all") and self.n_max > oracle.MAX_TREE_N:
                raise ValueError(f"tree oracle supports n <= {oracle.MAX_TREE_N}")
            if self.family in ("unicyclic", "all"):
                limit = oracle.MAX_UNICYCLIC_N if self.full else oracle.MAX_UNICYCLIC_N - 1
                if self.n_max > limit:
                    raise ValueError(f"unicyclic oracle supports n <= {limit}" + ("" if self.full else " (n = 7 needs --full)"))
            if self.n_max < 2:
                raise ValueError("--nmax must be at least 2")
        if self.jobs < 1:
            raise ValueError("--jobs must be positive")
        if self.digits < 6:
            raise ValueError("--digits must be at least 6")


def _load_graph(cfg: RunConfig, stdin: TextIO) -> Digraph:
    if cfg.inline is not None:
        return parse_graph(cfg.inline.replace(";", "\n"))
    if cfg.source in (None, "-"):
        return parse_graph(stdin.read())
    with open(cfg.source, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# -- commands -----------------------------------------------------------------------


def cmd_kernel(cfg: RunConfig, stdin: TextIO, out: TextIO) -> int:
    d = _load_graph(cfg, stdin)
    kernels = enumerate_kernels(d)
    if cfg.fmt == "json":
        out.write(json.dumps({"n": d.n, "arcs": d.sorted_arcs(), "kernels": [list(k) for k in kernels]}) + "\n")
    elif cfg.fmt == "dot":
        if not kernels:
            out.write(to_dot(d))
        for i, k in enumerate(kernels, 1):
            out.write(to_dot(d, k.as_set(), f"kernel{i}"))
    else:
        if not kernels:
            out.write("no kernel\n")
        for i, k in enumerate(kernels, 1):
            red = k.as_set()
            out.write(f"kernel {i}: {{{', '.join(map(str, k))}}}\n")
            out.write("  coloring: " + " ".join(f"{v}={'red' if v in red else 'green'}" for v in d.vertices) + "\n")
    return EXIT_OK if kernels else EXIT_NO_KERNEL


def cmd_series(cfg: RunConfig, stdin: TextIO, out: TextIO) -> int:
    if cfg.name not in S.SERIES_NAMES:
        raise ValueError(f"unknown series {cfg.name!r}; choose from {', '.join(S.SERIES_NAMES)}")
    f = S.named_series(cfg.name, cfg.order, check=not cfg.no_check)
    rows = [(n, f.count(n), f.coeff(n)) for n in range(1, cfg.order + 1)]
    if cfg.fmt == "json":
        out.write(json.dumps({"name": cfg.name, "order": cfg.order, "counts": [str(a) for _, a, _ in rows]}) + "\n")
    elif cfg.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "count", "coefficient"])
        w.writerows(rows)
    else:
        width = max(len(str(a)) for _, a, _ in rows)
        out.write(f"# {cfg.name}: n, a_n, a_n/n!\n")
        for n, a, c in rows:
            out.write(f"{n:>4} {str(a):>{width}} {c}\n")
    return EXIT_OK


def _inject(text: str, n_max: int) -> dict[str, TruncatedEGF]:
    name, _, n = text.partition(":")
    n = int(n)
    if name not in S.SERIES_NAMES or not 1 <= n <= n_max:
        raise ValueError(f"bad injection {text!r}")
    f = S.named_series(name, n_max)
    counts = list(f.counts)
    counts[n] += 1
    return {name: TruncatedEGF(counts)}


def cmd_verify(cfg: RunConfig, stdin: TextIO, out: TextIO) -> int:
    families = ("trees", "unicyclic") if cfg.family == "all" else (cfg.family,)
    overrides = _inject(cfg.inject, cfg.n_max) if cfg.inject else None
    ok = True
    for fam in families:
        res = oracle.verify_family(fam, cfg.n_max, jobs=cfg.jobs, overrides=overrides, strict=False)
        ok &= res.ok
        if cfg.fmt == "json":
            for r in res.reports:
                out.write(r.to_json() + "\n")
        else:
            out.write(f"# {fam}, n <= {cfg.n_max}\n")
            for c in res.checks:
                out.write(f"{c.series:>6} n={c.n:<2} series={c.expected} oracle={c.got} {'ok' if c.ok else 'MISMATCH'}\n")
        summary = sys.stderr if cfg.fmt == "json" else out
        for c in res.failures():
            summary.write(f"FAIL ({c.family}, {c.series}, n={c.n}, expected={c.expected}, got={c.got})\n")
        summary.write(f"{fam}: {'PASS' if res.ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_asym(cfg: RunConfig, stdin: TextIO, out: TextIO) -> int:
    lam = asym.solve_lambda(cfg.digits)
    consts = asym.constants(lam, cfg.digits)
    kinds = asym.RATIO_KINDS if cfg.kind == "all" else (cfg.kind,)
    if cfg.fmt == "csv":
        for kind in kinds:
            if len(kinds) > 1:
                out.write(f"# {kind}\n")
            out.write(asym.ratio_table(kind, cfg.n_max, consts=consts).to_csv())
        return EXIT_OK
    if cfg.fmt == "json":
        payload = {k: {"value": str(v.value), "error_bound": str(v.error_bound)} for k, v in consts.as_dict().items()}
        out.write(json.dumps(payload) + "\n")
        return EXIT_OK
    out.write(f"lambda = {lam.digits(cfg.digits)}  (|error| <= {lam.error_bound:.0E})\n")
    labels = [
        ("green_root_limit", "green root proportion"),
        ("green_root_1n_coeff", "green root 1/n coefficient"),
        ("red_circuit_limit", "red vertices in circuits"),
        ("unicircuit_limit", "well-coloured unicircuit proportion"),
        ("unicircuit_1n_coeff", "unicircuit 1/n coefficient"),
        ("unicycle_sqrt_coeff", "unicycle 1/sqrt(n) coefficient"),
    ]
    for key, label in labels:
        out.write(f"{label:<38} {getattr(consts, key).digits(10)}\n")
    for kind in kinds:
        out.write("\n")
        out.write(asym.ratio_table(kind, cfg.n_max, consts=consts).to_text(8))
    return EXIT_OK


def cmd_play(cfg: RunConfig, stdin: TextIO, out: TextIO) -> int:
    rng = random.Random(cfg.seed)
    if cfg.source is not None or cfg.inline is not None:
        d = _load_graph(cfg, stdin)
        start = cfg.start or 1
    else:
        d, root = oracle.random_directed_tree(cfg.size or 7, rng)
        start = cfg.start or root
    if not 1 <= start <= d.n:
        raise ValueError(f"start vertex {start} outside 1..{d.n}")
    is_dag = find_circuit(d) is None
    losing = losing_positions(d) if is_dag else None

    def engine(v, visited):
        if is_dag:
            return optimal_move(d, v, losing)
        options = [w for w in sorted(d.children(v)) if w not in visited]
        choice = suggest_move(d, v)
        return choice if choice in options else (options[0] if options else choice)

    out.write(f"game on {d.n} vertices: " + " ".join(f"{u}->{v}" for u, v in d.sorted_arcs()) + "\n")
    if cfg.hint:
        if is_dag:
            out.write("hint: losing positions (kernel) " + "{" + ", ".join(map(str, sorted(losing))) + "}\n")
        else:
            ks = enumerate_kernels(d)
            out.write("hint: kernels " + (" ".join("{" + ", ".join(map(str, k)) + "}" for k in ks) or "none") + "\n")
    human_turn = not cfg.engine_first
    out.write(f"token at {start}; {'you move' if human_turn else 'engine moves'} first\n")
    v, visited = start, {start}
    lines = iter(stdin.readline, "")
    while True:
        children = sorted(d.children(v))
        mover = "you" if human_turn else "engine"
        if not children:
            out.write(f"{mover} cannot move from {v}; {'engine' if human_turn else 'you'} win{'s' if human_turn else ''}\n")
            return EXIT_OK
        if human_turn:
            out.write(f"at {v}, children: {' '.join(map(str, children))}\n")
            while True:
                out.write("your move> ")
                out.flush()
                line = next(lines, None)
                if line is None:
                    out.write("\ngame aborted\n")
                    return EXIT_OK
                text = line.strip()
                out.write(text + "\n")
                if text.isdigit() and int(text) in children:
                    w = int(text)
                    break
                out.write(f"illegal move {text!r}; choose one of {' '.join(map(str, children))}\n")
        else:
            w = engine(v, visited)
            out.write(f"engine moves {v} -> {w}\n")
        if w in visited:
            out.write(f"{mover} revisited {w} and lose{'s' if not human_turn else ''}\n")
            return EXIT_OK
        visited.add(w)
        v = w
        human_turn = not human_turn


COMMANDS = {
    "kernel": cmd_kernel,
    "series": cmd_series,
    "verify": cmd_verify,
    "asym": cmd_asym,
    "play": cmd_play,
}


def build_parser() -> argparse.ArgumentParser:
    env_jobs = oracle.default_jobs()
    p = argparse.ArgumentParser(prog="kernelgf", description="Kernels of digraphs and their generating functions.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="list all kernels")
    k.add_argument("source", nargs="?", default="-", help="graph file, or - for stdin")
    k.add_argument("-e", "--inline", help="graph text with ';' for newlines")
    k.add_argument("--format", dest="fmt", choices=("text", "json", "dot"), default="text")

    s = sub.add_parser("series", help="coefficients of a generating function")
    s.add_argument("name", choices=S.SERIES_NAMES)
    s.add_argument("--order", type=int, default=7)
    s.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default="text")
    s.add_argument("--no-check", action="store_true", help="skip the second derivation route")

    v = sub.add_parser("verify", help="compare brute-force counts with the series")
    v.add_argument("--family", choices=("trees", "unicyclic", "all"), default="all")
    v.add_argument("--nmax", dest="n_max", type=int, default=6)
    v.add_argument("--full", action="store_true", help="allow the n = 7 unicyclic scan")
    v.add_argument("--jobs", type=int, default=env_jobs)
    v.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    v.add_argument("--inject", help=argparse.SUPPRESS)

    a = sub.add_parser("asym", help="asymptotic constants and ratio tables")
    a.add_argument("--nmax", dest="n_max", type=int, default=60)
    a.add_argument("--digits", type=int, default=50)
    a.add_argument("--kind", choices=("all",) + asym.RATIO_KINDS, default="all")
    a.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default="text")

    g = sub.add_parser("play", help="play against the kernel strategy")
    g.add_argument("source", nargs="?", help="graph file, or - for stdin; omit for a random tree")
    g.add_argument("-e", "--inline", help="graph text with ';' for newlines")
    g.add_argument("--size", type=int, help="random tree size when no graph is given (default 7)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--start", type=int)
    g.add_argument("--engine-first", action="store_true")
    g.add_argument("--hint", action="store_true", help="show the kernel colouring")
    return p


def main(argv=None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg, stdin, out)
    except GraphParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, DigraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
