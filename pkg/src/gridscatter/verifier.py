"""Per-round safety checks and the final-formation oracle.

The checks restate the protocol's correctness claims as predicates over
(previous configuration, round record, next configuration):

* collision freedom: no shared nodes, no shared targets, no edge swaps and
  no two-row move through an occupied or claimed node;
* bound invariance: the west bound and north bound never change;
* band closure: once every robot is in an odd row of the formation band,
  none ever leaves it.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .compute import find_dimension, is_final_positions
from .grid import Configuration, Position

if TYPE_CHECKING:
    from .sim import RoundRecord


class ViolationKind(enum.Enum):
    DUPLICATE_OCCUPANCY = "DuplicateOccupancy"
    OFF_LATTICE_MOVE = "OffLatticeMove"
    PATH_CROSS = "PathCrossViolation"
    INTERMEDIATE_OCCUPIED = "IntermediateOccupied"
    BOUND_DRIFT = "BoundDrift"
    EVEN_ROW_REENTRY = "EvenRowReentry"
    TARGET_CONFLICT = "TargetConflict"


@dataclass(frozen=True)
class ViolationEvent:
    kind: ViolationKind
    round: int
    robots: tuple[int, ...] = ()
    nodes: tuple[Position, ...] = ()
    note: str = ""

    def details(self) -> str:
        ids = ",".join(map(str, self.robots)) or "-"
        nodes = ";".join(f"{p.x},{p.y}" for p in self.nodes) or "-"
        text = f"ids={ids} nodes={nodes}"
        return f"{text} note={self.note}" if self.note else text


def is_final(c: Configuration) -> bool:
    return is_final_positions(c.positions)


def formation(n: int, x_min: int, y_max: int) -> set[Position]:
    """The target grid for n robots anchored at (x_min, y_max)."""
    rc = find_dimension(n).rc
    return {Position(x_min + 2 * (k % rc), y_max - 2 * (k // rc)) for k in range(n)}


def expected_final(initial: Configuration) -> set[Position]:
    """Target set computed from the initial bounds, which never move."""
    return formation(len(initial), initial.x_min, initial.y_max)


def in_odd_band(c: Mapping[int, Position]) -> bool:
    d = find_dimension(len(c)).d
    y_max = max(p.y for p in c.values())
    return all((y_max - p.y) % 2 == 0 and y_max - p.y < d for p in c.values())


def _bounds(c: Mapping[int, Position]) -> tuple[int, int]:
    return min(p.x for p in c.values()), max(p.y for p in c.values())


def _straight_path(src: Position, dst: Position) -> bool:
    dx, dy = dst.x - src.x, dst.y - src.y
    return abs(dx) + abs(dy) == 1 or (dx == 0 and abs(dy) == 2)


def _edges(src: Position, dst: Position) -> list[tuple[Position, Position]]:
    if dst.x == src.x and abs(dst.y - src.y) == 2:
        mid = Position(src.x, (src.y + dst.y) // 2)
        return [(src, mid), (mid, dst)]
    return [(src, dst)]


def check_round(
    prev: Mapping[int, Position], rec: RoundRecord, next: Mapping[int, Position]
) -> list[ViolationEvent]:
    """Every invariant violated by one round, in a fixed order.

    ``next`` may be any id-to-node mapping so that shared nodes are reportable.
    """
    if set(prev) != set(next):
        raise ValueError("prev and next hold different robots")
    for rid in rec.applied:
        if rid not in prev:
            raise ValueError(f"record moves unknown robot {rid}")
    for rid in prev:
        expected = rec.applied.get(rid, prev[rid])
        if next[rid] != expected:
            raise ValueError(f"robot {rid} at {next[rid]} but the record implies {expected}")

    t = rec.round
    out: list[ViolationEvent] = []

    holders: dict[Position, list[int]] = {}
    for rid in next:
        holders.setdefault(next[rid], []).append(rid)
    for node, rids in sorted(holders.items()):
        if len(rids) > 1:
            out.append(ViolationEvent(ViolationKind.DUPLICATE_OCCUPANCY, t, tuple(rids), (node,)))

    for rid, dst in sorted(rec.applied.items()):
        if not _straight_path(prev[rid], dst):
            out.append(ViolationEvent(ViolationKind.OFF_LATTICE_MOVE, t, (rid,), (prev[rid], dst)))

    claims: dict[Position, list[int]] = {}
    for rid, dec in sorted(rec.decisions.items()):
        if dec.target is not None:
            claims.setdefault(dec.target, []).append(rid)
    for node, rids in sorted(claims.items()):
        if len(rids) > 1:
            out.append(ViolationEvent(ViolationKind.TARGET_CONFLICT, t, tuple(rids), (node,)))

    used: dict[tuple[Position, Position], int] = {}
    for rid, dst in sorted(rec.applied.items()):
        if _straight_path(prev[rid], dst):
            for edge in _edges(prev[rid], dst):
                used.setdefault(edge, rid)
    for (a, b), rid in sorted(used.items()):
        other = used.get((b, a))
        if other is not None and (a, b) < (b, a):
            out.append(ViolationEvent(ViolationKind.PATH_CROSS, t, tuple(sorted((rid, other))), (a, b)))

    before = set(prev.values())
    claimed = set(rec.applied.values())
    for rid, dst in sorted(rec.applied.items()):
        src = prev[rid]
        if dst.x == src.x and abs(dst.y - src.y) == 2:
            mid = Position(src.x, (src.y + dst.y) // 2)
            if mid in before or mid in claimed:
                out.append(ViolationEvent(ViolationKind.INTERMEDIATE_OCCUPIED, t, (rid,), (mid,)))

    (x0, y0), (x1, y1) = _bounds(prev), _bounds(next)
    if (x0, y0) != (x1, y1):
        note = f"xmin:{x0}->{x1},ymax:{y0}->{y1}"
        out.append(ViolationEvent(ViolationKind.BOUND_DRIFT, t, note=note))

    if in_odd_band(prev) and not in_odd_band(next):
        d = find_dimension(len(next)).d
        y_max = y1
        strays = tuple(
            rid for rid in next
            if (y_max - next[rid].y) % 2 or y_max - next[rid].y >= d
        )
        out.append(ViolationEvent(
            ViolationKind.EVEN_ROW_REENTRY, t, strays, tuple(next[r] for r in strays)
        ))
    return out


def check_progress(records: Sequence[RoundRecord], window: int) -> bool:
    """False iff some `window` consecutive non-final rounds moved nobody."""
    if window < 1:
        raise ValueError("window must be positive")
    stall = 0
    for rec in records:
        if rec.was_final:
            stall = 0
            continue
        stall = 0 if rec.applied else stall + 1
        if stall >= window:
            return False
    return True


def revisit_counts(initial: Configuration, records: Sequence[RoundRecord]) -> dict[int, int]:
    """Per robot, how many moves landed on a node it had occupied before."""
    seen = {rid: {initial[rid]} for rid in initial}
    counts = dict.fromkeys(initial, 0)
    for rec in records:
        for rid, dst in rec.applied.items():
            if dst in seen[rid]:
                counts[rid] += 1
            seen[rid].add(dst)
    return counts
