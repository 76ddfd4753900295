"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line (also collected into the terminal
summary). The two sweeps are computed once per session and shared.
"""

import hashlib
import random
import time
from collections import Counter

import pytest

from conftest import ACCEPTANCE_LINES
from gridscatter.cli import RunConfig, execute, generate_initial, sweep
from gridscatter.compute import CaseLabel, compute_move, find_dimension
from gridscatter.grid import Configuration, Position, Snapshot
from gridscatter.sim import Fsync, decide, make_strategy, run
from gridscatter.verifier import expected_final, is_final

SAFETY = ("TargetConflict", "PathCrossViolation", "IntermediateOccupied", "DuplicateOccupancy")
INVARIANTS = ("BoundDrift", "EvenRowReentry")


def report(number, title, ok, detail=""):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def brute_ceil_sqrt(n):
    k = 0
    while k * k < n:
        k += 1
    return k


@pytest.fixture(scope="module")
def desk_runs():
    out = {}
    for key, nodes in (("psi1", [(0, 0), (0, -1)]), ("west", [(0, 0), (5, 0)])):
        out[key] = run(Configuration.from_positions(nodes), Fsync())
    return out


@pytest.fixture(scope="module")
def fsync_sweep():
    start = time.perf_counter()
    rows = sweep(range(1, 31), 10, "fsync", 10000, box=15)
    return rows, time.perf_counter() - start


@pytest.fixture(scope="module")
def ssync_sweep():
    rows = sweep(range(1, 31), 10, "ssync:p=0.5,w=32", 10000, box=15, sched_seeds=3)
    return rows


def test_criterion_1_dimension_formula():
    start = time.perf_counter()
    dims = find_dimension(8)
    agree = all(find_dimension(n).rc == brute_ceil_sqrt(n) and find_dimension(n).d == 2 * brute_ceil_sqrt(n) - 1
                for n in range(1, 10001))
    elapsed = time.perf_counter() - start
    report(1, "find_dimension(8)=(3,5) and matches brute-force ceil(sqrt n) for n<=10000",
           (dims.rc, dims.d) == (3, 5) and agree and elapsed < 1.0, f"{elapsed:.3f}s")


def test_criterion_2_desk_traces(desk_runs):
    outcome, records = desk_runs["psi1"]
    moves = [(rid, dst, rec.decisions[rid].case) for rec in records for rid, dst in rec.applied.items()]
    psi1_ok = (
        outcome.converged
        and outcome.final.positions == {(0, 0), (2, 0)}
        and moves == [
            (2, (1, -1), CaseLabel.PSI1),
            (2, (1, 0), CaseLabel.PSI1),
            (2, (2, 0), CaseLabel.PSI3_EAST),
        ]
    )
    outcome2, records2 = desk_runs["west"]
    hops = [(rid, dst, rec.decisions[rid].case) for rec in records2 for rid, dst in rec.applied.items()]
    west_ok = (
        outcome2.converged
        and outcome2.final.positions == {(0, 0), (2, 0)}
        and hops == [(2, (4, 0), CaseLabel.PSI3_WEST), (2, (3, 0), CaseLabel.PSI3_WEST),
                     (2, (2, 0), CaseLabel.PSI3_WEST)]
    )
    violations = sum(len(rec.violations) for rec in records + records2)
    report(2, "desk traces: east,north,east parity fix and three west hops",
           psi1_ok and west_ok and violations == 0, f"violations={violations}")


def test_criterion_3_fsync_convergence(fsync_sweep):
    rows, elapsed = fsync_sweep
    converged = sum(r.status == "converged" for r in rows)
    exact = sum(r.exact for r in rows)
    # shape-only finals that differ from the oracle would be an anchoring finding
    shape_only = sum(r.status == "converged" and not r.exact for r in rows)
    worst = max((r.rounds for r in rows), default=0)
    report(3, "300 fsync runs converge to expected_final within 10000 rounds in <60s",
           len(rows) == 300 and converged == 300 and exact == 300 and elapsed < 60,
           f"converged={converged} exact={exact} shape_only={shape_only} max_rounds={worst} {elapsed:.1f}s")


def test_criterion_4_ssync_robustness(ssync_sweep):
    rows = ssync_sweep
    converged = sum(r.status == "converged" for r in rows)
    progress = sum(r.progress for r in rows)
    worst = max((r.rounds for r in rows), default=0)
    report(4, "900 ssync:p=0.5,w=32 runs converge with no stalled fair window",
           len(rows) == 900 and converged == 900 and progress == 900,
           f"converged={converged} progress={progress} max_rounds={worst}")


def tally(desk_runs, fsync_sweep, ssync_sweep):
    counts = Counter()
    for _, records in desk_runs.values():
        for rec in records:
            counts.update(v.kind.value for v in rec.violations)
            counts["ConflictEvent"] += len(rec.conflicts)
    for row in list(fsync_sweep[0]) + list(ssync_sweep):
        counts.update(row.violations)
        counts["ConflictEvent"] += row.conflicts
        counts["error"] += row.status == "error"
    return counts


def test_criterion_5_collision_freedom(desk_runs, fsync_sweep, ssync_sweep):
    counts = tally(desk_runs, fsync_sweep, ssync_sweep)
    detail = " ".join(f"{k}={counts[k]}" for k in (*SAFETY, "ConflictEvent"))
    report(5, "no target conflicts, path crossings, occupied midpoints or shared nodes",
           all(counts[k] == 0 for k in (*SAFETY, "ConflictEvent", "error")), detail)


def test_criterion_6_bounds_and_band(desk_runs, fsync_sweep, ssync_sweep):
    counts = tally(desk_runs, fsync_sweep, ssync_sweep)
    report(6, "bounds never drift and the odd band is never left",
           all(counts[k] == 0 for k in (*INVARIANTS, "error")),
           " ".join(f"{k}={counts[k]}" for k in INVARIANTS))


def test_criterion_7_determinism():
    digests = set()
    for _ in range(10):
        text = execute(RunConfig(n=20, seed=12345, strategy="ssync:p=0.5,w=32"))[3]
        digests.add(hashlib.sha256(text.encode()).hexdigest())
    fsync = {hashlib.sha256(execute(RunConfig(n=17, seed=7))[3].encode()).hexdigest() for _ in range(10)}
    report(7, "10 repeated runs give byte-identical traces",
           len(digests) == 1 and len(fsync) == 1, f"distinct digests={len(digests)},{len(fsync)}")


def snapshot_corpus(count, rng):
    """Half uniformly random swarms, half configurations visited by real runs."""
    corpus = []
    while len(corpus) < count // 2:
        n = rng.randint(1, 30)
        c = generate_initial(n, rng.randint(3, 15), rng.randrange(2**32))
        corpus.append(c)
    while len(corpus) < count:
        n = rng.randint(2, 20)
        initial = generate_initial(n, 10, rng.randrange(2**32))
        _, records = run(initial, make_strategy("ssync:p=0.5,w=8", n), 3000, rng.randrange(100))
        c = initial
        path = [c]
        for rec in records:
            c = c.moved(rec.applied)
            path.append(c)
        corpus.extend(rng.sample(path, min(5, len(path), count - len(corpus))))
    return corpus


def test_criterion_8_anonymity_and_translation():
    rng = random.Random(2024)
    corpus = snapshot_corpus(1000, rng)
    vectors = [(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6)) for _ in range(100)]
    permutation_ok = translation_ok = True
    for c in corpus:
        nodes = list(c.values())
        me = rng.choice(nodes)
        base = compute_move(Snapshot(frozenset(nodes), me))

        # relabel robots; every robot's decision depends on its node only
        ids = list(range(1, len(nodes) + 1))
        rng.shuffle(ids)
        relabeled = Configuration(dict(zip(ids, nodes)))
        by_node = {c[r]: d for r, d in decide(c, list(c)).items()}
        if any(by_node[relabeled[r]] != d for r, d in decide(relabeled, list(relabeled)).items()):
            permutation_ok = False
        if by_node[me] != base:
            permutation_ok = False

        for dx, dy in vectors:
            moved = compute_move(Snapshot(frozenset(p.shifted(dx, dy) for p in nodes), me.shifted(dx, dy)))
            expect = (base.kind, base.case,
                      None if base.target is None else base.target.shifted(dx, dy),
                      tuple(p.shifted(dx, dy) for p in base.path))
            if (moved.kind, moved.case, moved.target, moved.path) != expect:
                translation_ok = False
                break
    report(8, "1000 snapshots: decisions invariant under relabeling, equivariant under 100 translations",
           len(corpus) == 1000 and permutation_ok and translation_ok,
           f"permutation={'ok' if permutation_ok else 'broken'} translation={'ok' if translation_ok else 'broken'}")


def test_criterion_9_trivial_cases():
    lone, records = run(Configuration({1: Position(7, -3)}), Fsync())
    lone_ok = lone.converged and lone.rounds == 0 and lone.total_moves == 0 and lone.final[1] == (7, -3)
    squares_ok = True
    for n in (4, 9, 16):
        rc = find_dimension(n).rc
        for seed in range(5):
            initial = generate_initial(n, 15, seed)
            outcome, _ = run(initial, Fsync())
            square = {(initial.x_min + 2 * i, initial.y_max - 2 * k) for i in range(rc) for k in range(rc)}
            squares_ok &= outcome.converged and outcome.final.positions == square and is_final(outcome.final)
            squares_ok &= square == expected_final(initial)
    report(9, "n=1 needs no movement; n=4,9,16 fill the full alternate-node square",
           lone_ok and squares_ok and len(records) == 1)
