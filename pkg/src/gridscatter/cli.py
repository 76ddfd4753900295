"""Command-line front end: ``run``, ``verify``, ``sweep`` and ``render``."""

from __future__ import annotations

import argparse
import hashlib
import io
import random
import re
import statistics
import sys
from collections import Counter
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .grid import Configuration, Position
from .sim import make_strategy, run
from .trace import TraceError, read_trace, verify_trace, write_trace
from .verifier import check_progress, expected_final

_LINE = re.compile(r"([+-]?\d+) ([+-]?\d+)")


def generate_initial(n: int, box: int, seed: int) -> Configuration:
    """n distinct nodes drawn uniformly from [-box, box]^2, ids in draw order."""
    side = 2 * box + 1
    if n < 1 or box < 0 or n > side * side:
        raise ValueError(f"cannot place {n} robots on distinct nodes of a {side}x{side} square")
    rng = random.Random(seed)
    cells = rng.sample(range(side * side), n)
    return Configuration.from_positions((-box + k % side, -box + k // side) for k in cells)


def parse_initial(path: str | Path) -> Configuration:
    """Read ``x y`` lines (``#`` comments allowed); ids follow line order."""
    positions: list[Position] = []
    seen: dict[Position, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.startswith("#") or not line.strip():
                continue
            m = _LINE.fullmatch(line)
            if m is None:
                raise ValueError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            p = Position(int(m[1]), int(m[2]))
            if p in seen:
                raise ValueError(f"{path}:{lineno}: node {p} already holds the robot from line {seen[p]}")
            seen[p] = lineno
            positions.append(p)
    if not positions:
        raise ValueError(f"{path}: no robots")
    return Configuration.from_positions(positions)


def render_ascii(
    c: Configuration | Iterable[Position],
    viewport: tuple[int, int, int, int] | None = None,
) -> str:
    """Character grid: ``R`` on robots, ``.`` elsewhere, north row first.

    ``viewport`` is ``(x_lo, x_hi, y_lo, y_hi)``, inclusive; defaults to the
    bounding box.
    """
    nodes = set(c.positions if isinstance(c, Configuration) else c)
    if viewport is None:
        xs = [p.x for p in nodes]
        ys = [p.y for p in nodes]
        viewport = (min(xs), max(xs), min(ys), max(ys))
    x_lo, x_hi, y_lo, y_hi = viewport
    width = max(len(str(y_lo)), len(str(y_hi)))
    lines = []
    for y in range(y_hi, y_lo - 1, -1):
        cells = " ".join("R" if (x, y) in nodes else "." for x in range(x_lo, x_hi + 1))
        lines.append(f"{y:>{width}} {cells}")
    return "\n".join(lines)


@dataclass
class RunConfig:
    n: int | None = None
    seed: int = 0
    box: int = 15
    strategy: str = "fsync"
    max_rounds: int = 10000
    initial: Path | None = None
    trace: Path | None = None
    strict: bool = True
    render: bool = False

    def __post_init__(self):
        if (self.n is None) == (self.initial is None):
            raise ValueError("give exactly one of --n and --initial")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.max_rounds < 1:
            raise ValueError("--max-rounds must be positive")
        if self.n is not None:
            if self.n < 1:
                raise ValueError("--n must be positive")
            if self.box < 1:
                raise ValueError("--box must be at least 1")
            if self.n > (2 * self.box + 1) ** 2:
                raise ValueError(f"{self.n} robots do not fit in a box of half-width {self.box}")

    def initial_configuration(self) -> Configuration:
        if self.initial is not None:
            return parse_initial(self.initial)
        return generate_initial(self.n, self.box, self.seed)


def execute(cfg: RunConfig):
    """Run one configured simulation; returns (outcome, records, initial, trace text)."""
    initial = cfg.initial_configuration()
    strategy = make_strategy(cfg.strategy, len(initial))
    outcome, records = run(initial, strategy, cfg.max_rounds, cfg.seed, strict=cfg.strict)
    buf = io.StringIO()
    write_trace(records, outcome, buf, initial, cfg.strategy, cfg.seed)
    return outcome, records, initial, buf.getvalue()


# --- sweeps -----------------------------------------------------------------

@dataclass
class SweepRow:
    n: int
    seed: int
    sched_seed: int
    status: str
    rounds: int = 0
    moves: int = 0
    exact: bool = False
    progress: bool = False
    conflicts: int = 0
    violations: Counter = field(default_factory=Counter)
    error: str = ""

    def line(self) -> str:
        if self.status == "error":
            return f"n={self.n} seed={self.seed} sched={self.sched_seed} status=error error={self.error!r}"
        viol = ",".join(f"{k}:{v}" for k, v in sorted(self.violations.items())) or "0"
        return (
            f"n={self.n} seed={self.seed} sched={self.sched_seed} status={self.status} "
            f"rounds={self.rounds} moves={self.moves} exact={'yes' if self.exact else 'no'} "
            f"progress={'yes' if self.progress else 'no'} conflicts={self.conflicts} violations={viol}"
        )


def sweep_cell(n: int, seed: int, sched_seed: int, strategy: str, max_rounds: int, box: int) -> SweepRow:
    try:
        initial = generate_initial(n, box, seed)
        strat = make_strategy(strategy, n)
        outcome, records = run(initial, strat, max_rounds, sched_seed, strict=False)
    except Exception as exc:  # a failed cell never aborts the sweep
        return SweepRow(n, seed, sched_seed, "error", error=f"{type(exc).__name__}: {exc}")
    violations = Counter(v.kind.value for rec in records for v in rec.violations)
    return SweepRow(
        n, seed, sched_seed, outcome.status, outcome.rounds, outcome.total_moves,
        exact=outcome.converged and outcome.final.positions == expected_final(initial),
        progress=check_progress(records, strat.fairness_window(n)),
        conflicts=sum(len(rec.conflicts) for rec in records),
        violations=violations,
    )


def _cell(args):
    return sweep_cell(*args)


def sweep(
    n_values: Iterable[int],
    seeds: int,
    strategy: str = "fsync",
    max_rounds: int = 10000,
    box: int = 15,
    sched_seeds: int = 1,
    jobs: int = 1,
) -> list[SweepRow]:
    """Every (n, seed, scheduler seed) cell, ordered by those keys."""
    cells = [
        (n, s, k, strategy, max_rounds, box)
        for n in sorted(set(n_values)) for s in range(seeds) for k in range(sched_seeds)
    ]
    if not cells:
        raise ValueError("empty sweep")
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_cell, cells, chunksize=4))
    return [sweep_cell(*c) for c in cells]


def summarize(rows: Sequence[SweepRow]) -> str:
    done = [r for r in rows if r.status == "converged"]
    rounds = [r.rounds for r in done]
    total_viol = sum(sum(r.violations.values()) for r in rows)
    parts = [
        f"summary runs={len(rows)}",
        f"converged={len(done)}",
        f"rate={len(done) / len(rows):.4f}",
        f"exact={sum(r.exact for r in rows)}",
    ]
    if rounds:
        parts += [f"rounds_min={min(rounds)}", f"rounds_median={statistics.median(rounds):g}",
                  f"rounds_max={max(rounds)}"]
    parts += [
        f"moves={sum(r.moves for r in rows)}",
        f"conflicts={sum(r.conflicts for r in rows)}",
        f"violations={total_viol}",
        f"failed={sum(r.status == 'error' for r in rows)}",
    ]
    return " ".join(parts)


# --- argument handling ------------------------------------------------------

def _n_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        values = list(range(int(lo), int(hi) + 1)) if sep else [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a..b' or 'a,b,c', got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"robot counts must be positive: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridscatter",
        description="Simulate oblivious robots scattering onto alternate nodes of a grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one configuration")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--n", type=int, help="number of robots to place at random")
    src.add_argument("--initial", type=Path, help="initial configuration file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=int, default=15, help="half-width of the sampling square")
    p.add_argument("--strategy", default="fsync",
                   help="fsync | ssync:p=<p>,w=<w> | roundrobin | scripted:<path>")
    p.add_argument("--max-rounds", type=int, default=10000)
    p.add_argument("--trace", type=Path, help="write the trace here")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True,
                   help="halt on the first invariant violation")
    p.add_argument("--render", action="store_true", help="print the final configuration")

    p = sub.add_parser("verify", help="replay a trace and re-check every invariant")
    p.add_argument("trace", type=Path)

    p = sub.add_parser("sweep", help="run many seeded configurations and summarize")
    p.add_argument("--n", type=_n_range, default=_n_range("1..30"), help="'a..b' or 'a,b,c'")
    p.add_argument("--seeds", type=int, default=10, help="initial-configuration seeds per n")
    p.add_argument("--sched-seeds", type=int, default=1, help="scheduler seeds per configuration")
    p.add_argument("--box", type=int, default=15)
    p.add_argument("--strategy", default="fsync")
    p.add_argument("--max-rounds", type=int, default=10000)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("render", help="draw a configuration from a trace")
    p.add_argument("trace", type=Path)
    p.add_argument("--round", type=int, help="configuration after this round (default: last)")
    return parser


def _cmd_run(args) -> int:
    cfg = RunConfig(
        n=args.n, seed=args.seed, box=args.box, strategy=args.strategy,
        max_rounds=args.max_rounds, initial=args.initial, trace=args.trace,
        strict=args.strict, render=args.render,
    )
    outcome, records, initial, text = execute(cfg)
    if cfg.trace is not None:
        cfg.trace.write_text(text, encoding="utf-8")
    violations = sum(len(r.violations) for r in records)
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    exact = outcome.final.positions == expected_final(initial)
    print(f"status={outcome.status} rounds={outcome.rounds} moves={outcome.total_moves} "
          f"violations={violations} exact={'yes' if exact else 'no'} trace_sha256={digest}")
    if cfg.render:
        print(render_ascii(outcome.final))
    return 0 if outcome.converged else 2


def _cmd_verify(args) -> int:
    trace = read_trace(args.trace)
    problems = verify_trace(trace)
    for line in problems:
        print(line)
    verdict = "ok" if not problems else f"{len(problems)} problem(s)"
    print(f"verify {args.trace}: {len(trace.rounds)} rounds, {verdict}")
    return 0 if not problems else 1


def _cmd_sweep(args) -> int:
    rows = sweep(args.n, args.seeds, args.strategy, args.max_rounds, args.box,
                 args.sched_seeds, args.jobs)
    for row in rows:
        print(row.line())
    print(summarize(rows))
    return 0 if all(r.status == "converged" for r in rows) else 2


def _cmd_render(args) -> int:
    trace = read_trace(args.trace)
    configs = list(trace.configurations())
    t = len(trace.rounds) if args.round is None else args.round
    if not 0 <= t < len(configs):
        print(f"round must lie in 0..{len(configs) - 1}", file=sys.stderr)
        return 1
    print(f"round {t}")
    print(render_ascii(configs[t]))
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "verify": _cmd_verify, "sweep": _cmd_sweep, "render": _cmd_render}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        if isinstance(exc, TraceError):
            print(f"bad trace: {exc}", file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
