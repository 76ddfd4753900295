"""Pure-Python round kernel: the reference compute path applied to every robot."""

from __future__ import annotations

from collections.abc import Sequence

from .compute import compute_move
from .grid import Position, Snapshot


def decide_all(xs: Sequence[int], ys: Sequence[int]):
    """Decisions of every robot observing one shared snapshot.

    Returns ``(labels, go, tx, ty)`` lists indexed like the inputs; ``tx``/``ty``
    are meaningful only where ``go`` is 1.
    """
    positions = [Position(x, y) for x, y in zip(xs, ys)]
    others = frozenset(positions)
    if len(others) != len(positions):
        raise ValueError("robots must occupy distinct nodes")
    labels, go, tx, ty = [], [], [], []
    for p in positions:
        dec = compute_move(Snapshot(others, p))
        labels.append(int(dec.case))
        if dec.target is None:
            go.append(0)
            tx.append(p.x)
            ty.append(p.y)
        else:
            go.append(1)
            tx.append(dec.target.x)
            ty.append(dec.target.y)
    return labels, go, tx, ty
