"""Semi-synchronous round engine.

Each round one snapshot is frozen, every activated robot computes from it, and
all accepted moves land at once. Nobody ever observes a robot mid-edge.
"""

from __future__ import annotations

import random
from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import kernel
from .compute import CaseLabel, MoveDecision, move_priority
from .grid import Configuration, Position
from .verifier import ViolationEvent, check_round, is_final

Decider = Callable[[Configuration, Sequence[int]], dict[int, MoveDecision]]


# --- schedulers -------------------------------------------------------------

class ScheduleStrategy:
    """Chooses which robots run a Look-Compute-Move cycle in each round."""

    spec: str

    def fairness_window(self, n: int) -> int:
        raise NotImplementedError

    def activations(self, ids: Sequence[int], rng: random.Random) -> Iterator[frozenset[int]]:
        raise NotImplementedError


@dataclass(frozen=True)
class Fsync(ScheduleStrategy):
    spec: str = "fsync"

    def fairness_window(self, n: int) -> int:
        return 1

    def activations(self, ids, rng):
        everyone = frozenset(ids)
        while True:
            yield everyone


@dataclass(frozen=True)
class RandomSubset(ScheduleStrategy):
    """Each robot independently with probability p; nobody idles a full window."""

    activation_probability: Fraction
    window: int
    spec: str = ""

    def __post_init__(self):
        if not 0 < self.activation_probability <= 1:
            raise ValueError("activation probability must lie in (0, 1]")
        if self.window < 1:
            raise ValueError("fairness window must be at least 1")
        if not self.spec:
            p = self.activation_probability
            object.__setattr__(self, "spec", f"ssync:p={float(p)!r},w={self.window}")

    def fairness_window(self, n: int) -> int:
        return self.window

    def activations(self, ids, rng):
        p = float(self.activation_probability)
        idle = dict.fromkeys(ids, 0)
        while True:
            chosen = {rid for rid in ids if rng.random() < p}
            chosen.update(rid for rid in ids if idle[rid] >= self.window - 1)
            if not chosen:
                chosen.add(ids[rng.randrange(len(ids))])
            for rid in ids:
                idle[rid] = 0 if rid in chosen else idle[rid] + 1
            yield frozenset(chosen)


@dataclass(frozen=True)
class RoundRobinSingleton(ScheduleStrategy):
    spec: str = "roundrobin"

    def fairness_window(self, n: int) -> int:
        return n

    def activations(self, ids, rng):
        while True:
            for rid in ids:
                yield frozenset((rid,))


@dataclass(frozen=True)
class Scripted(ScheduleStrategy):
    """A fixed list of activation sets, replayed cyclically."""

    sets: tuple[frozenset[int], ...]
    spec: str = "scripted"

    def fairness_window(self, n: int) -> int:
        return len(self.sets)

    def activations(self, ids, rng):
        while True:
            yield from self.sets


def parse_script(text: str, n: int) -> tuple[frozenset[int], ...]:
    sets = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            ids = frozenset(int(tok) for tok in line.split(","))
        except ValueError:
            raise ValueError(f"line {lineno}: expected comma-separated robot ids, got {line!r}") from None
        bad = sorted(i for i in ids if not 1 <= i <= n)
        if bad:
            raise ValueError(f"line {lineno}: unknown robot ids {bad}")
        sets.append(ids)
    if not sets:
        raise ValueError("script holds no activation sets")
    missing = sorted(set(range(1, n + 1)).difference(*sets))
    if missing:
        raise ValueError(f"script never activates robots {missing}")
    return tuple(sets)


def make_strategy(spec: str, n: int) -> ScheduleStrategy:
    """Parse ``fsync | ssync:p=<p>,w=<w> | roundrobin | scripted:<path>``."""
    if spec == "fsync":
        return Fsync()
    if spec == "roundrobin":
        return RoundRobinSingleton()
    if spec.startswith("ssync:"):
        params = {}
        for part in spec[len("ssync:"):].split(","):
            key, sep, value = part.partition("=")
            if not sep or key not in ("p", "w") or key in params:
                raise ValueError(f"bad ssync parameter {part!r} in {spec!r}")
            params[key] = value
        if set(params) != {"p", "w"}:
            raise ValueError(f"ssync needs both p and w: {spec!r}")
        try:
            p = Fraction(params["p"])
            w = int(params["w"])
        except ValueError:
            raise ValueError(f"bad ssync parameters in {spec!r}") from None
        return RandomSubset(p, w, spec)
    if spec.startswith("scripted:"):
        path = Path(spec[len("scripted:"):])
        return Scripted(parse_script(path.read_text(), n), spec)
    raise ValueError(f"unknown strategy {spec!r}")


# --- rounds -----------------------------------------------------------------

@dataclass(frozen=True)
class ConflictEvent:
    round: int
    target: Position
    claimants: tuple[int, ...]
    winner: int


@dataclass
class RoundRecord:
    round: int
    activated: tuple[int, ...]
    decisions: dict[int, MoveDecision]
    applied: dict[int, Position]
    conflicts: list[ConflictEvent] = field(default_factory=list)
    violations: list[ViolationEvent] = field(default_factory=list)
    was_final: bool = False


@dataclass(frozen=True)
class RunOutcome:
    status: str  # "converged" | "maxrounds" | "violation"
    rounds: int
    total_moves: int
    final: Configuration

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def decide(c: Configuration, activated: Sequence[int]) -> dict[int, MoveDecision]:
    """Compute-phase output of the activated robots from one frozen snapshot."""
    ids = list(c)
    xs = [c[rid].x for rid in ids]
    ys = [c[rid].y for rid in ids]
    labels, go, tx, ty = kernel.decide_all(xs, ys)
    index = {rid: i for i, rid in enumerate(ids)}
    out = {}
    for rid in sorted(activated):
        i = index[rid]
        case = CaseLabel(labels[i])
        if go[i]:
            out[rid] = MoveDecision.go(c[rid], Position(tx[i], ty[i]), case)
        else:
            out[rid] = MoveDecision.stay(case)
    return out


def step(
    c: Configuration,
    activated: Sequence[int] | frozenset[int],
    round_no: int = 1,
    decider: Decider = decide,
) -> tuple[Configuration, RoundRecord]:
    """Run one round: look, compute, arbitrate, move, check."""
    act = tuple(sorted(set(activated)))
    if not act:
        raise ValueError("a round needs at least one activated robot")
    unknown = [rid for rid in act if rid not in c]
    if unknown:
        raise KeyError(f"unknown robot ids {unknown}")

    decisions = decider(c, act)
    claims: dict[Position, list[int]] = {}
    for rid in act:
        dec = decisions[rid]
        if dec.moves:
            claims.setdefault(dec.target, []).append(rid)

    conflicts = []
    movers: dict[int, Position] = {}
    for target in sorted(claims):
        rids = claims[target]
        winner = min(rids, key=lambda r: move_priority(c[r], target))
        if len(rids) > 1:
            conflicts.append(ConflictEvent(round_no, target, tuple(rids), winner))
        movers[winner] = target

    # a target still held by a robot that is not leaving blocks its claimant
    while True:
        held = {c[rid] for rid in c if rid not in movers}
        blocked = [rid for rid, dst in movers.items() if dst in held]
        if not blocked:
            break
        for rid in blocked:
            del movers[rid]

    applied = dict(sorted(movers.items()))
    nxt = c.moved(applied)
    rec = RoundRecord(round_no, act, decisions, applied, conflicts, was_final=is_final(c))
    rec.violations = check_round(c, rec, nxt)
    return nxt, rec


def run(
    initial: Configuration,
    strategy: ScheduleStrategy,
    max_rounds: int = 10000,
    seed: int = 0,
    strict: bool = False,
    decider: Decider = decide,
    on_round: Callable[[RoundRecord, Configuration], None] | None = None,
) -> tuple[RunOutcome, list[RoundRecord]]:
    """Rounds until the formation holds and an all-robot round moves nobody.

    The confirming all-robot round is extra: ``rounds`` in a converged outcome
    counts only the rounds before it.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    ids = list(initial)
    schedule = strategy.activations(ids, random.Random(f"{seed}:schedule"))
    records: list[RoundRecord] = []
    c = initial
    moves = 0
    t = 0
    while True:
        confirming = is_final(c)
        if t >= max_rounds + confirming:
            return RunOutcome("maxrounds", t, moves, c), records
        activated = frozenset(ids) if confirming else next(schedule)
        t += 1
        c, rec = step(c, activated, t, decider)
        records.append(rec)
        moves += len(rec.applied)
        if on_round is not None:
            on_round(rec, c)
        if strict and rec.violations:
            return RunOutcome("violation", t, moves, c), records
        if confirming and not rec.applied:
            return RunOutcome("converged", t - 1, moves, c), records
