"""Grid coordinates, robot configurations and Look-phase snapshots.

All coordinates live in one global frame. Robots only ever use coordinate
differences and the extremal bounds of the swarm, so a shared frame behaves
identically to per-robot local origins with agreed axes.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from typing import NamedTuple


class Position(NamedTuple):
    """A grid node ``(x, y)``; x grows eastwards, y grows northwards."""

    x: int
    y: int

    def shifted(self, dx: int, dy: int) -> Position:
        return Position(self.x + dx, self.y + dy)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


class Configuration(Mapping[int, Position]):
    """Placement of robots on distinct nodes, keyed by simulator robot id.

    Ids are bookkeeping only; the protocol never sees them.
    """

    __slots__ = ("_robots", "_positions", "_bounds")

    def __init__(self, robots: Mapping[int, tuple[int, int]] | Iterable[tuple[int, tuple[int, int]]]):
        items = robots.items() if isinstance(robots, Mapping) else robots
        table: dict[int, Position] = {}
        for rid, pos in items:
            if not isinstance(rid, int) or isinstance(rid, bool):
                raise TypeError(f"robot id must be an int, got {rid!r}")
            if rid in table:
                raise ValueError(f"duplicate robot id {rid}")
            x, y = pos
            if not (isinstance(x, int) and isinstance(y, int)):
                raise TypeError(f"coordinates must be integers, got {pos!r}")
            table[rid] = Position(x, y)
        if not table:
            raise ValueError("a configuration needs at least one robot")
        positions = frozenset(table.values())
        if len(positions) != len(table):
            seen: dict[Position, int] = {}
            for rid, pos in table.items():
                if pos in seen:
                    raise ValueError(f"robots {seen[pos]} and {rid} share node {pos}")
                seen[pos] = rid
        self._robots = dict(sorted(table.items()))
        self._positions = positions
        self._bounds: tuple[int, int] | None = None

    @classmethod
    def from_positions(cls, positions: Iterable[tuple[int, int]]) -> Configuration:
        """Assign ids 1..n in iteration order."""
        return cls({i: p for i, p in enumerate(positions, start=1)})

    def __getitem__(self, rid: int) -> Position:
        return self._robots[rid]

    def __iter__(self) -> Iterator[int]:
        return iter(self._robots)

    def __len__(self) -> int:
        return len(self._robots)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Configuration):
            return self._robots == other._robots
        return super().__eq__(other)

    def __hash__(self) -> int:
        return hash(tuple(self._robots.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{rid}: {pos}" for rid, pos in self._robots.items())
        return f"Configuration({{{body}}})"

    @property
    def positions(self) -> frozenset[Position]:
        return self._positions

    def _extremes(self) -> tuple[int, int]:
        if self._bounds is None:
            self._bounds = (
                max(p.y for p in self._positions),
                min(p.x for p in self._positions),
            )
        return self._bounds

    @property
    def y_max(self) -> int:
        return self._extremes()[0]

    @property
    def x_min(self) -> int:
        return self._extremes()[1]

    def moved(self, applied: Mapping[int, Position]) -> Configuration:
        """Return a new configuration with the given robots relocated."""
        unknown = set(applied) - set(self._robots)
        if unknown:
            raise KeyError(f"unknown robot ids {sorted(unknown)}")
        robots = dict(self._robots)
        robots.update(applied)
        return Configuration(robots)

    def snapshot(self, rid: int) -> Snapshot:
        return Snapshot(self._positions, self._robots[rid])


class Snapshot(NamedTuple):
    """What one robot sees during Look: every robot position plus its own."""

    others: frozenset[Position]
    me: Position

    @classmethod
    def of(cls, positions: Iterable[tuple[int, int]], me: tuple[int, int]) -> Snapshot:
        others = frozenset(Position(*p) for p in positions)
        me = Position(*me)
        if me not in others:
            raise ValueError(f"{me} is not among the observed positions")
        return cls(others, me)


def row_index(p: Position, y_max: int) -> int:
    """1-based row number counted southwards from the north bound."""
    if p.y > y_max:
        raise ValueError(f"{p} lies north of the bound y_max={y_max}")
    return y_max - p.y + 1


def occupied(s: Snapshot, p: tuple[int, int]) -> bool:
    return p in s.others


def robots_in_row(s: Snapshot, y: int) -> list[Position]:
    return sorted((p for p in s.others if p.y == y), key=lambda p: p.x)
