"""Granular-ball primitives: center, radius, splitting and threshold covering.

A ball is a finite point set summarised by its mean center and the mean
Euclidean distance of its points to that center.  ``cover`` recursively splits
balls until each one has radius at most ``T`` (or cannot be split further).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _as_points(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = points
        if arr.ndim == 1:
            arr = arr[:, None]
    else:
        points = list(points)
        if not points:
            raise ValueError("empty ball")
        dims = {1 if np.ndim(p) == 0 else len(p) for p in points}
        if len(dims) > 1:
            raise ValueError("dimension mismatch")
        arr = np.array(points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"points must form an (n, d) array, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("empty ball")
    if arr.shape[1] == 0:
        raise ValueError("points must have dimension >= 1")
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def ball_center(points) -> np.ndarray:
    """Coordinatewise mean of ``points``.

    A set of coincident points returns that point exactly, so the radius of
    a degenerate ball is exactly zero.
    """
    pts = _as_points(points)
    if np.all(pts == pts[0]):
        return pts[0].copy()
    return pts.mean(axis=0)


def ball_radius(points, center) -> float:
    """Mean Euclidean distance from ``points`` to ``center``."""
    pts = _as_points(points)
    c = np.asarray(center, dtype=float).reshape(-1)
    if c.shape[0] != pts.shape[1]:
        raise ValueError("dimension mismatch")
    return float(np.linalg.norm(pts - c, axis=1).mean())


@dataclass(frozen=True)
class SplitThreshold:
    max_radius: float

    def __post_init__(self):
        if not self.max_radius > 0:
            raise ValueError(f"max_radius must be positive, got {self.max_radius}")


class GranularBall:
    """Immutable point set with cached center and radius.

    ``indices`` records each point's position in the array originally passed
    to :func:`cover`, so partitions can be compared independently of
    coordinates.
    """

    __slots__ = ("points", "indices", "center", "radius")

    def __init__(self, points, indices=None):
        pts = _as_points(points).copy()
        pts.flags.writeable = False
        if indices is None:
            idx = np.arange(pts.shape[0])
        else:
            idx = np.array(indices, dtype=np.intp).reshape(-1)
            if idx.shape[0] != pts.shape[0]:
                raise ValueError("indices and points differ in length")
        idx.flags.writeable = False
        center = ball_center(pts)
        center.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", ball_radius(pts, center))

    def __setattr__(self, name, value):
        raise AttributeError("GranularBall is immutable")

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"GranularBall(n={len(self)}, center={self.center.tolist()}, radius={self.radius:.6g})"

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def split_ball(ball: GranularBall) -> tuple[GranularBall, GranularBall]:
    """Split at the median of the highest-variance coordinate.

    Ties between coordinates go to the lower index.  Points equal to the
    median join the lower child; if that would leave the upper child empty
    (the median equals the maximum) the comparison becomes strict instead.
    """
    pts = ball.points
    if np.all(pts == pts[0]):
        raise ValueError("unsplittable ball")
    axis = int(np.argmax(pts.var(axis=0)))
    x = pts[:, axis]
    med = np.median(x)
    lower = x <= med
    if lower.all():
        lower = x < med
    upper = ~lower
    return (
        GranularBall(pts[lower], ball.indices[lower]),
        GranularBall(pts[upper], ball.indices[upper]),
    )


def cover(points, threshold) -> list[GranularBall]:
    """Split ``points`` into balls whose radius is at most the threshold.

    ``threshold`` is a :class:`SplitThreshold` or a positive float.  Balls are
    returned in depth-first order, lower child first.
    """
    if not isinstance(threshold, SplitThreshold):
        threshold = SplitThreshold(float(threshold))
    stack = [GranularBall(points)]
    done = []
    while stack:
        ball = stack.pop()
        if ball.radius <= threshold.max_radius or len(ball) == 1:
            done.append(ball)
            continue
        lo, hi = split_ball(ball)
        stack.append(hi)
        stack.append(lo)
    return done


def cover_labels(balls: list[GranularBall], n_points: int) -> np.ndarray:
    """Ball index for each original point (inverse of the ``indices`` map)."""
    labels = np.full(n_points, -1, dtype=np.intp)
    for k, ball in enumerate(balls):
        labels[ball.indices] = k
    return labels
