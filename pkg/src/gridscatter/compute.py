"""The FormGrid compute phase: snapshot in, move decision out.

Every function here is pure. A robot re-derives the formation size, the
north/west bounds and the current phase of the protocol from its snapshot
alone, because it remembers nothing between cycles.

Phases, as seen from a snapshot:

* band migration: robots in even rows or below the formation move north
  (east when the northern node is taken); robots already in the odd band wait;
* row compaction: every row is packed westwards onto alternate columns, each
  robot heading for the slot ``x_min + 2 * (robots west of it)``;
* row balancing: robots among the first ``rc`` of a row climb two rows into
  gaps, excess robots (``rc`` or more on their west) move to other odd rows;
* row lifting: when no balancing move is possible yet the formation is not
  complete, the east-most robot under the top-most short row walks east along
  its row until the node two rows up is the next free slot, then climbs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from .grid import Position, Snapshot, row_index


class CaseLabel(enum.IntEnum):
    # integer codes are shared with the compiled kernel
    WAIT = 0
    SETTLED = 1
    PSI1 = 2
    PSI2 = 3
    PSI3_WEST = 4
    PSI3_EAST = 5
    PSI4 = 6
    PSI5_NORTH = 7
    PSI5_SOUTH = 8


class MoveKind(enum.Enum):
    STAY = "stay"
    GO = "go"


@dataclass(frozen=True)
class Dimensions:
    rc: int
    d: int


@dataclass(frozen=True)
class Bounds:
    y_max: int
    x_min: int


@dataclass(frozen=True)
class MoveDecision:
    """Outcome of one Compute phase.

    ``path`` lists the nodes entered, ending at ``target``. A ``STAY`` decision
    keeps the label of the move it could not make, or WAIT/SETTLED.
    """

    kind: MoveKind
    case: CaseLabel
    target: Position | None = None
    path: tuple[Position, ...] = ()

    @classmethod
    def stay(cls, case: CaseLabel) -> MoveDecision:
        return cls(MoveKind.STAY, case)

    @classmethod
    def go(cls, me: Position, target: Position, case: CaseLabel) -> MoveDecision:
        dx, dy = target.x - me.x, target.y - me.y
        if (abs(dx), abs(dy)) == (0, 2):
            path = (Position(me.x, me.y + dy // 2), target)
        elif abs(dx) + abs(dy) == 1:
            path = (target,)
        else:
            raise ValueError(f"no straight path from {me} to {target}")
        return cls(MoveKind.GO, case, target, path)

    @property
    def moves(self) -> bool:
        return self.kind is MoveKind.GO


# Tie priority between movers claiming one node: west, east, south, north.
_DIRECTION_RANK = {(-1, 0): 0, (1, 0): 1, (0, -1): 2, (0, 1): 3}


def move_priority(src: tuple[int, int], dst: tuple[int, int]) -> tuple[int, int, int]:
    """Sort key for movers claiming the same node; smallest wins."""
    dx, dy = dst[0] - src[0], dst[1] - src[1]
    step = ((dx > 0) - (dx < 0), (dy > 0) - (dy < 0))
    return (_DIRECTION_RANK[step], src[1], src[0])


def find_dimension(n: int) -> Dimensions:
    if n < 1:
        raise ValueError(f"need at least one robot, got n={n}")
    rc = math.isqrt(n - 1) + 1
    return Dimensions(rc, 2 * rc - 1)


def find_y_max(s: Snapshot) -> int:
    if not s.others:
        raise ValueError("empty snapshot")
    return max(p.y for p in s.others)


def find_x_min(s: Snapshot) -> int:
    if not s.others:
        raise ValueError("empty snapshot")
    return min(p.x for p in s.others)


def westward_movable(s: Snapshot, p: Position, x_min: int) -> bool:
    return (
        p.x > x_min
        and (p.x - 1, p.y) not in s.others
        and (p.x - 2, p.y) not in s.others
    )


def west_count(s: Snapshot, p: Position) -> int:
    return sum(1 for q in s.others if q.y == p.y and q.x < p.x)


def settled_in_row(s: Snapshot, p: Position, x_min: int) -> bool:
    """Dense west-packing: p sits on the alternate column its rank predicts."""
    offset = p.x - x_min
    return offset % 2 == 0 and west_count(s, p) == offset // 2


def all_in_odd_band(s: Snapshot, y_max: int, d: int) -> bool:
    for p in s.others:
        j = row_index(p, y_max)
        if j > d or j % 2 == 0:
            return False
    return True


def deficient_odd_row_above(s: Snapshot, p: Position, y_max: int, rc: int) -> bool:
    counts: dict[int, int] = {}
    for q in s.others:
        counts[q.y] = counts.get(q.y, 0) + 1
    j = row_index(p, y_max)
    return any(counts.get(y_max - (k - 1), 0) < rc for k in range(1, j, 2))


def is_final_positions(positions: frozenset[Position] | set[Position]) -> bool:
    """True iff the positions form the target grid anchored at their own bounds."""
    n = len(positions)
    if n == 0:
        return False
    rc = find_dimension(n).rc
    x_min = min(p.x for p in positions)
    y_max = max(p.y for p in positions)
    for p in positions:
        dx, dy = p.x - x_min, y_max - p.y
        if dx % 2 or dy % 2 or dx // 2 >= rc or (dy // 2) * rc + dx // 2 >= n:
            return False
    # n distinct nodes, each on a distinct slot below n: the sets coincide
    return True


class _Frame:
    """Everything a robot derives from one snapshot, shared by all observers."""

    def __init__(self, others: frozenset[Position]):
        self.others = others
        self.n = n = len(others)
        self.dims = find_dimension(n)
        self.y_max = max(p.y for p in others)
        self.x_min = min(p.x for p in others)
        self.final = n == 1 or is_final_positions(others)
        self._raw: dict[Position, tuple[CaseLabel, Position | None]] = {}
        if self.final:
            return

        rc, d = self.dims.rc, self.dims.d
        rows: dict[int, list[int]] = {}
        for p in others:
            rows.setdefault(p.y, []).append(p.x)
        for xs in rows.values():
            xs.sort()
        self.rows = rows
        self.rank = {Position(x, y): i for y, xs in rows.items() for i, x in enumerate(xs)}
        self.band = all(
            (self.y_max - p.y) % 2 == 0 and self.y_max - p.y < d for p in others
        )
        if not self.band:
            return

        self.settled = {
            p for p, w in self.rank.items()
            if (p.x - self.x_min) % 2 == 0 and w == (p.x - self.x_min) // 2
        }
        self.unsettled = [p for p in others if p not in self.settled]
        self.no_excess = all(len(xs) <= rc for xs in rows.values())
        self.top_deficient = next(
            (j for j in range(1, d + 1, 2) if self.count(j) < rc), None
        )
        self.stuck = (
            not self.unsettled
            and self.no_excess
            and all(p.y == self.y_max or (p.x, p.y + 2) in others for p in others)
        )

    def row_y(self, j: int) -> int:
        return self.y_max - (j - 1)

    def count(self, j: int) -> int:
        return len(self.rows.get(self.row_y(j), ()))

    def free(self, x: int, y: int) -> bool:
        return (x, y) not in self.others

    def west_movable(self, p: Position) -> bool:
        # the two-node vacancy test, restricted to robots east of their slot
        return (
            p.x - self.x_min > 2 * self.rank[p]
            and self.free(p.x - 1, p.y)
            and self.free(p.x - 2, p.y)
        )

    def east_most(self, p: Position) -> bool:
        return self.rows[p.y][-1] == p.x

    def raw(self, me: Position) -> tuple[CaseLabel, Position | None]:
        """Label and intended target before tie priority is applied."""
        hit = self._raw.get(me)
        if hit is None:
            hit = self._raw[me] = self._classify(me)
        return hit

    def _classify(self, me: Position) -> tuple[CaseLabel, Position | None]:
        if self.final:
            return CaseLabel.SETTLED, None
        rc, d = self.dims.rc, self.dims.d
        x, y = me
        j = self.y_max - y + 1

        if j > d or j % 2 == 0:
            label = CaseLabel.PSI2 if j > d else CaseLabel.PSI1
            if self.free(x, y + 1):
                return label, Position(x, y + 1)
            if self.free(x + 1, y):
                return label, Position(x + 1, y)
            return label, None
        if not self.band:
            return CaseLabel.WAIT, None

        if me not in self.settled:
            if self._lifting(me, j):
                above = self.count(j - 2)
                if x - self.x_min == 2 * above:
                    return CaseLabel.PSI4, Position(x, y + 2)
                return CaseLabel.PSI3_EAST, Position(x + 1, y)
            if self.west_movable(me):
                return CaseLabel.PSI3_WEST, Position(x - 1, y)
            xs = self.rows[y]
            west_stuck = not any(
                self.west_movable(Position(qx, y)) for qx in xs[: self.rank[me]]
            )
            if west_stuck and self.free(x + 1, y) and self.free(x + 2, y):
                return CaseLabel.PSI3_EAST, Position(x + 1, y)
            return CaseLabel.WAIT, None

        if self.unsettled:
            return CaseLabel.WAIT, None

        if self.stuck:
            if j == self.top_deficient + 2 and self.east_most(me):
                return CaseLabel.PSI3_EAST, Position(x + 1, y)
            return CaseLabel.SETTLED, None

        w = self.rank[me]
        if w < rc and j != 1 and self.free(x, y + 2):
            return CaseLabel.PSI4, Position(x, y + 2)
        if w >= rc:
            if j == 1:
                north = False
            else:
                north = self.top_deficient is not None and self.top_deficient < j
            if north:
                if self.free(x, y + 2):
                    return CaseLabel.PSI5_NORTH, Position(x, y + 2)
            elif self.free(x, y - 2):
                return CaseLabel.PSI5_SOUTH, Position(x, y - 2)
            return CaseLabel.WAIT, None
        return CaseLabel.SETTLED, None

    def _lifting(self, me: Position, j: int) -> bool:
        """Is ``me`` the lone unsettled robot walking east to climb a row?"""
        return (
            len(self.unsettled) == 1
            and self.no_excess
            and j >= 3
            and self.top_deficient == j - 2
            and self.east_most(me)
            and me.x - self.x_min <= 2 * self.count(j - 2)
        )

    def outranked(self, me: Position, target: Position) -> bool:
        """Would a higher-priority robot claim ``target`` from this snapshot?"""
        mine = move_priority(me, target)
        tx, ty = target
        for src in ((tx + 1, ty), (tx - 1, ty), (tx, ty + 2), (tx, ty - 1), (tx, ty - 2)):
            if src == me or src not in self.others:
                continue
            src = Position(*src)
            _, their = self.raw(src)
            if their == target and move_priority(src, target) < mine:
                return True
        return False


@lru_cache(maxsize=64)
def _analyze(others: frozenset[Position]) -> _Frame:
    return _Frame(others)


def _checked_frame(s: Snapshot) -> _Frame:
    if s.me not in s.others:
        raise ValueError(f"{s.me} is not among the observed positions")
    return _analyze(s.others)


def classify(s: Snapshot) -> CaseLabel:
    """Which case of the protocol applies to the observing robot."""
    return _checked_frame(s).raw(s.me)[0]


def compute_move(s: Snapshot) -> MoveDecision:
    """Decide where the observing robot goes this cycle.

    A robot whose intended node would also be claimed by a robot of higher
    move priority (west, east, south, north) waits, so every node is targeted
    by at most one robot per snapshot.
    """
    frame = _checked_frame(s)
    label, target = frame.raw(s.me)
    if target is None or frame.outranked(s.me, target):
        return MoveDecision.stay(label)
    return MoveDecision.go(s.me, target, label)
