"""
Granular-ball covering
======================

A granular ball summarises a point set by its mean center and the mean
distance of its points to that center.  ``cover`` splits balls at the median
of their widest coordinate until every ball is tighter than a threshold.
"""

import numpy as np

from gbgm import GranularBall, cover, cover_labels, split_ball

ball = GranularBall([(0, 0), (1, 0), (0, 1), (1, 1)])
print(ball)                      # center (0.5, 0.5), radius sqrt(0.5)

lo, hi = split_ball(GranularBall([(0, 0), (0.1, 0), (10, 0), (10.1, 0)]))
print(lo.points.tolist(), hi.points.tolist())

# three blobs of different spread
rng = np.random.default_rng(1)
points = np.vstack([
    rng.normal((0, 0), 0.3, (40, 2)),
    rng.normal((5, 0), 0.3, (40, 2)),
    rng.normal((2, 4), 1.0, (40, 2)),
])
for threshold in (5.0, 1.0, 0.5):
    balls = cover(points, threshold)
    print(f"T = {threshold}: {len(balls)} balls, radii",
          np.round(sorted(b.radius for b in balls), 2)[:8])

labels = cover_labels(cover(points, 1.0), len(points))
print("ball of each of the first ten points:", labels[:10])
