import random
from fractions import Fraction

import pytest

from gridscatter.compute import CaseLabel, MoveDecision, MoveKind
from gridscatter.grid import Configuration, Position
from gridscatter.sim import (
    Fsync,
    RandomSubset,
    RoundRobinSingleton,
    Scripted,
    make_strategy,
    parse_script,
    run,
    step,
)
from gridscatter.verifier import ViolationKind


def take(strategy, ids, k, seed=0):
    gen = strategy.activations(ids, random.Random(seed))
    return [next(gen) for _ in range(k)]


def test_make_strategy_parses_grammar(tmp_path):
    assert make_strategy("fsync", 3) == Fsync()
    s = make_strategy("ssync:p=0.5,w=32", 3)
    assert isinstance(s, RandomSubset) and s.activation_probability == Fraction(1, 2) and s.window == 32
    assert take(make_strategy("roundrobin", 3), [1, 2, 3], 4) == [{1}, {2}, {3}, {1}]
    script = tmp_path / "s.txt"
    script.write_text("# two rounds\n1,2\n\n3\n")
    scripted = make_strategy(f"scripted:{script}", 3)
    assert isinstance(scripted, Scripted)
    assert take(scripted, [1, 2, 3], 3) == [{1, 2}, {3}, {1, 2}]


@pytest.mark.parametrize(
    "spec",
    ["ssync:p=0,w=3", "ssync:p=1.5,w=3", "ssync:p=0.5,w=0", "ssync:p=0.5", "ssync:p=x,w=2", "async", ""],
)
def test_make_strategy_rejects(spec):
    with pytest.raises(ValueError):
        make_strategy(spec, 3)


@pytest.mark.parametrize("text", ["", "# nothing\n", "1,4\n", "1\n", "1,a\n"])
def test_parse_script_rejects(text):
    with pytest.raises(ValueError):
        parse_script(text, 2)


def test_random_subset_is_fair_and_nonempty():
    ids = list(range(1, 9))
    strategy = RandomSubset(Fraction(1, 10), 4)
    last = dict.fromkeys(ids, 0)
    for t, chosen in enumerate(take(strategy, ids, 500, seed=7), start=1):
        assert chosen
        for rid in chosen:
            last[rid] = t
        assert all(t - last[rid] < 4 for rid in ids)


def test_strategies_are_deterministic():
    s = make_strategy("ssync:p=0.3,w=5", 6)
    assert take(s, list(range(1, 7)), 50, seed=4) == take(s, list(range(1, 7)), 50, seed=4)


def test_step_examples():
    c = Configuration({1: (0, 0), 2: (0, -1)})
    nxt, rec = step(c, {1, 2})
    assert nxt == Configuration({1: (0, 0), 2: (1, -1)})
    assert rec.decisions[1].kind is MoveKind.STAY
    assert rec.decisions[2].case is CaseLabel.PSI1
    assert not rec.violations and not rec.conflicts

    nxt, rec = step(Configuration({1: (0, 0), 2: (5, 0)}), {2})
    assert nxt[2] == (4, 0) and list(rec.decisions) == [2]

    single = Configuration({1: (0, 0)})
    nxt, rec = step(single, {1})
    assert nxt == single and rec.decisions == {1: MoveDecision.stay(CaseLabel.SETTLED)}


def test_step_rejects_bad_activation():
    c = Configuration({1: (0, 0)})
    with pytest.raises(ValueError):
        step(c, set())
    with pytest.raises(KeyError):
        step(c, {2})


def scripted_decider(plan):
    def decider(c, activated):
        out = {}
        for rid in activated:
            if rid in plan:
                out[rid] = MoveDecision.go(c[rid], Position(*plan[rid]), CaseLabel.PSI3_WEST)
            else:
                out[rid] = MoveDecision.stay(CaseLabel.WAIT)
        return out
    return decider


def test_conflicts_are_arbitrated_west_first():
    # 1 moves west into (1,0), 3 moves east into (1,0); west wins
    c = Configuration({1: (2, 0), 2: (5, 5), 3: (0, 0)})
    nxt, rec = step(c, {1, 2, 3}, decider=scripted_decider({1: (1, 0), 3: (1, 0)}))
    assert nxt[1] == (1, 0) and nxt[3] == (0, 0)
    assert len(rec.conflicts) == 1 and rec.conflicts[0].winner == 1
    assert [v.kind for v in rec.violations] == [ViolationKind.TARGET_CONFLICT]


def test_mover_blocked_by_idle_robot_stays():
    c = Configuration({1: (1, 0), 2: (0, 0)})
    nxt, rec = step(c, {1}, decider=scripted_decider({1: (0, 0)}))
    assert nxt == c and rec.applied == {}


def test_chain_of_moves_is_applied_together():
    c = Configuration({1: (1, 0), 2: (2, 0), 3: (-5, 0)})
    nxt, rec = step(c, {1, 2}, decider=scripted_decider({1: (0, 0), 2: (1, 0)}))
    assert nxt == Configuration({1: (0, 0), 2: (1, 0), 3: (-5, 0)}) and not rec.violations


def test_swap_is_a_path_cross():
    c = Configuration({1: (0, 0), 2: (1, 0)})
    nxt, rec = step(c, {1, 2}, decider=scripted_decider({1: (1, 0), 2: (0, 0)}))
    assert nxt == Configuration({1: (1, 0), 2: (0, 0)})
    assert ViolationKind.PATH_CROSS in {v.kind for v in rec.violations}


def test_run_desk_example():
    outcome, records = run(Configuration({1: (0, 0), 2: (0, -1)}), Fsync())
    assert outcome.converged and outcome.rounds == 3 and outcome.total_moves == 3
    assert outcome.final.positions == {(0, 0), (2, 0)}
    assert [rec.applied for rec in records] == [
        {2: (1, -1)}, {2: (1, 0)}, {2: (2, 0)}, {},
    ]
    assert [records[i].decisions[2].case for i in range(3)] == [
        CaseLabel.PSI1, CaseLabel.PSI1, CaseLabel.PSI3_EAST,
    ]


def test_run_single_robot():
    outcome, records = run(Configuration({1: (7, -3)}), RoundRobinSingleton())
    assert outcome.converged and outcome.rounds == 0 and outcome.total_moves == 0
    assert len(records) == 1


def test_run_max_rounds():
    outcome, records = run(Configuration({1: (0, 0), 2: (9, 0)}), Fsync(), max_rounds=2)
    assert outcome.status == "maxrounds" and len(records) == 2


def test_run_strict_halts_on_violation():
    c = Configuration({1: (0, 0), 2: (1, 0)})
    outcome, records = run(c, Fsync(), strict=True, decider=scripted_decider({1: (1, 0), 2: (0, 0)}))
    assert outcome.status == "violation" and len(records) == 1


def test_run_is_deterministic():
    c = Configuration.from_positions([(3, 1), (-2, 4), (0, 0), (5, -5), (1, 2)])
    s = make_strategy("ssync:p=0.5,w=4", 5)
    a = run(c, s, seed=9)
    b = run(c, s, seed=9)
    assert a[0] == b[0] and a[1] == b[1]


def test_roundrobin_converges():
    c = Configuration.from_positions([(3, 1), (-2, 4), (0, 0), (5, -5)])
    outcome, _ = run(c, RoundRobinSingleton())
    assert outcome.converged
