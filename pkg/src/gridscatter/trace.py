"""Line-oriented run traces: writing, parsing and independent re-verification.

Format (one record per line)::

    # gridscatter-trace v1
    meta n=<n> rc=<rc> d=<d> ymax=<y> xmin=<x> strategy=<spec> seed=<seed>
    init <id> <x> <y>
    round <t> activated=<ids>
    move <id> <x1> <y1> -> <x2> <y2> case=<label>
    wait <id> case=<label>
    violation <kind> round=<t> <details>
    end status=<converged|maxrounds|violation> rounds=<t> moves=<m>
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from .compute import MoveDecision, find_dimension
from .grid import Configuration, Position
from .sim import RoundRecord, RunOutcome, decide
from .verifier import check_round, is_final

HEADER = "# gridscatter-trace v1"


class TraceError(ValueError):
    pass


def trace_lines(
    records: Sequence[RoundRecord],
    outcome: RunOutcome,
    initial: Configuration,
    strategy: str,
    seed: int,
) -> Iterator[str]:
    dims = find_dimension(len(initial))
    yield HEADER
    yield (
        f"meta n={len(initial)} rc={dims.rc} d={dims.d} ymax={initial.y_max} "
        f"xmin={initial.x_min} strategy={strategy} seed={seed}"
    )
    for rid, p in initial.items():
        yield f"init {rid} {p.x} {p.y}"
    positions = dict(initial)
    for rec in records:
        yield f"round {rec.round} activated={','.join(map(str, rec.activated))}"
        for rid in rec.activated:
            dec = rec.decisions[rid]
            if rid in rec.applied:
                src, dst = positions[rid], rec.applied[rid]
                yield f"move {rid} {src.x} {src.y} -> {dst.x} {dst.y} case={dec.case.name}"
            else:
                yield f"wait {rid} case={dec.case.name}"
        for v in rec.violations:
            yield f"violation {v.kind.value} round={v.round} {v.details()}"
        positions.update(rec.applied)
    yield f"end status={outcome.status} rounds={outcome.rounds} moves={outcome.total_moves}"


def write_trace(
    records: Sequence[RoundRecord],
    outcome: RunOutcome,
    sink: TextIO,
    initial: Configuration,
    strategy: str,
    seed: int,
) -> None:
    for line in trace_lines(records, outcome, initial, strategy, seed):
        sink.write(line + "\n")


# --- reading ----------------------------------------------------------------

@dataclass
class TraceRound:
    round: int
    activated: tuple[int, ...]
    moves: dict[int, tuple[Position, Position, str]] = field(default_factory=dict)
    waits: dict[int, str] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)


@dataclass
class Trace:
    meta: dict[str, str]
    initial: Configuration
    rounds: list[TraceRound]
    end: dict[str, str]

    def configurations(self) -> Iterator[Configuration]:
        """The initial configuration, then the configuration after each round."""
        c = self.initial
        yield c
        for r in self.rounds:
            c = c.moved({rid: dst for rid, (_, dst, _) in r.moves.items()})
            yield c


_INT = r"-?\d+"
_MOVE = re.compile(rf"move (\d+) ({_INT}) ({_INT}) -> ({_INT}) ({_INT}) case=(\w+)")
_WAIT = re.compile(r"wait (\d+) case=(\w+)")
_ROUND = re.compile(r"round (\d+) activated=(\d+(?:,\d+)*)")
_INIT = re.compile(rf"init (\d+) ({_INT}) ({_INT})")


def _fields(text: str) -> dict[str, str]:
    out = {}
    for tok in text.split():
        key, sep, value = tok.partition("=")
        if not sep:
            raise TraceError(f"expected key=value, got {tok!r}")
        out[key] = value
    return out


def parse_trace(lines: Iterable[str]) -> Trace:
    it = iter(enumerate(lines, start=1))
    first = next(it, (1, ""))[1].rstrip("\n")
    if first != HEADER:
        raise TraceError(f"line 1: expected {HEADER!r}")
    meta: dict[str, str] | None = None
    init: list[tuple[int, Position]] = []
    rounds: list[TraceRound] = []
    end: dict[str, str] | None = None
    for lineno, raw in it:
        line = raw.rstrip("\n")
        kind, _, rest = line.partition(" ")
        if end is not None:
            raise TraceError(f"line {lineno}: content after end")
        if kind == "meta":
            meta = _fields(rest)
        elif kind == "init":
            m = _INIT.fullmatch(line)
            if not m:
                raise TraceError(f"line {lineno}: malformed init")
            init.append((int(m[1]), Position(int(m[2]), int(m[3]))))
        elif kind == "round":
            m = _ROUND.fullmatch(line)
            if not m:
                raise TraceError(f"line {lineno}: malformed round")
            rounds.append(TraceRound(int(m[1]), tuple(int(i) for i in m[2].split(","))))
        elif kind == "move" and rounds:
            m = _MOVE.fullmatch(line)
            if not m:
                raise TraceError(f"line {lineno}: malformed move")
            src, dst = Position(int(m[2]), int(m[3])), Position(int(m[4]), int(m[5]))
            rounds[-1].moves[int(m[1])] = (src, dst, m[6])
        elif kind == "wait" and rounds:
            m = _WAIT.fullmatch(line)
            if not m:
                raise TraceError(f"line {lineno}: malformed wait")
            rounds[-1].waits[int(m[1])] = m[2]
        elif kind == "violation" and rounds:
            rounds[-1].violations.append(line)
        elif kind == "end":
            end = _fields(rest)
        else:
            raise TraceError(f"line {lineno}: unexpected {line!r}")
    if meta is None or end is None or not init:
        raise TraceError("trace lacks meta, init or end lines")
    try:
        initial = Configuration(init)
    except ValueError as exc:
        raise TraceError(str(exc)) from None
    return Trace(meta, initial, rounds, end)


def read_trace(path: str | Path) -> Trace:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh)


# --- verification -----------------------------------------------------------

def verify_trace(trace: Trace) -> list[str]:
    """Replay a trace, recomputing every decision and invariant check.

    Returns human-readable mismatches; an empty list means the trace is
    consistent with the protocol and its recorded violation verdicts.
    """
    problems: list[str] = []
    c = trace.initial
    dims = find_dimension(len(c))
    expected_meta = {
        "n": str(len(c)), "rc": str(dims.rc), "d": str(dims.d),
        "ymax": str(c.y_max), "xmin": str(c.x_min),
    }
    for key, value in expected_meta.items():
        if trace.meta.get(key) != value:
            problems.append(f"meta {key}={trace.meta.get(key)} but init implies {value}")

    moves = 0
    last_moved = True
    for r in trace.rounds:
        logged = set(r.moves) | set(r.waits)
        if logged != set(r.activated) or set(r.moves) & set(r.waits):
            problems.append(f"round {r.round}: move/wait lines do not match the activated set")
            break
        try:
            decisions = decide(c, r.activated)
        except KeyError as exc:
            problems.append(f"round {r.round}: {exc}")
            break
        applied: dict[int, Position] = {}
        for rid in r.activated:
            dec: MoveDecision = decisions[rid]
            if rid in r.moves:
                src, dst, case = r.moves[rid]
                if src != c[rid]:
                    problems.append(f"round {r.round}: robot {rid} logged at {src}, replay has {c[rid]}")
                if not dec.moves or dec.target != dst or dec.case.name != case:
                    problems.append(f"round {r.round}: robot {rid} logged move to {dst} case={case}, "
                                    f"protocol says {dec.kind.value} {dec.target} case={dec.case.name}")
                applied[rid] = dst
            elif r.waits[rid] != dec.case.name:
                problems.append(f"round {r.round}: robot {rid} logged wait case={r.waits[rid]}, "
                                f"protocol says case={dec.case.name}")
        try:
            nxt = c.moved(applied)
        except ValueError as exc:
            problems.append(f"round {r.round}: {exc}")
            break
        rec = RoundRecord(r.round, r.activated, decisions, applied, was_final=is_final(c))
        verdicts = [f"violation {v.kind.value} round={v.round} {v.details()}"
                    for v in check_round(c, rec, nxt)]
        if verdicts != r.violations:
            problems.append(f"round {r.round}: logged violations {r.violations} but replay finds {verdicts}")
        moves += len(applied)
        last_moved = bool(applied)
        c = nxt

    if trace.end.get("moves") != str(moves):
        problems.append(f"end moves={trace.end.get('moves')} but the trace holds {moves} moves")
    status = trace.end.get("status")
    if status == "converged":
        if not is_final(c):
            problems.append("end status=converged but the final configuration is not the formation")
        if last_moved:
            problems.append("end status=converged but the last round moved robots")
        if trace.end.get("rounds") != str(len(trace.rounds) - 1):
            problems.append("end rounds does not match the number of rounds before confirmation")
    elif status not in ("maxrounds", "violation"):
        problems.append(f"unknown end status {status!r}")
    return problems
