"""Unit-disk topologies and random generators."""
from __future__ import annotations

import math
from collections import deque
from typing import Optional, Sequence

from coopgeo.geometry import EPS, Point2D, distance


class Topology:
    """Nodes indexed 0..n-1 with a unit-disk adjacency (edge iff d <= range)."""

    def __init__(self, positions: Sequence[Point2D], range_: float,
                 src: Optional[int] = None, dst: Optional[int] = None):
        if not range_ > 0:
            raise ValueError("range must be positive")
        self.positions = [Point2D(float(p[0]), float(p[1])) for p in positions]
        self.range = float(range_)
        self.src = src
        self.dst = dst
        self._adj: dict[int, list[int]] = {}

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i) for i in range(len(self.positions))]

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def nodes(self):
        return list(enumerate(self.positions))

    def position(self, i: int) -> Point2D:
        return self.positions[i]

    def neighbors(self, i: int) -> list[int]:
        """Ids within range of node i, ascending (computed on first use)."""
        row = self._adj.get(i)
        if row is None:
            lim = self.range + EPS
            xi, yi = self.positions[i]
            row = [j for j, (x, y) in enumerate(self.positions)
                   if j != i and math.hypot(x - xi, y - yi) <= lim]
            self._adj[i] = row
        return row

    def edges(self) -> set[tuple[int, int]]:
        return {(i, j) for i in range(len(self)) for j in self.neighbors(i) if i < j}

    def connected(self, a: int, b: int) -> bool:
        seen = {a}
        todo = deque([a])
        while todo:
            u = todo.popleft()
            if u == b:
                return True
            for v in self.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return False

    def __repr__(self):
        return f"Topology(n={len(self)}, range={self.range}, src={self.src}, dst={self.dst})"


def uniform_in_disk(center: Point2D, radius: float, rng) -> Point2D:
    r = radius * math.sqrt(rng.random())
    th = 2.0 * math.pi * rng.random()
    return Point2D(center[0] + r * math.cos(th), center[1] + r * math.sin(th))


def gen_per_hop_topology(neighbor_count: int, range_: float, rng,
                         dst_factor: float = 2.0) -> Topology:
    """Source at the origin (id 0), destination on +x at dst_factor*range
    (id 1), and neighbor_count nodes uniform in the source disk (ids 2..)."""
    if neighbor_count < 1:
        raise ValueError("neighbor_count must be >= 1")
    src = Point2D(0.0, 0.0)
    pts = [src, Point2D(dst_factor * range_, 0.0)]
    for _ in range(neighbor_count):
        pts.append(uniform_in_disk(src, range_, rng))
    return Topology(pts, range_, src=0, dst=1)


def gen_area_topology(node_count: int, area_side: float, range_: float, rng,
                      require_connected: bool = False,
                      max_tries: int = 10_000) -> Topology:
    """Uniform nodes in a square; src/dst are the nodes nearest two opposite
    corners."""
    if node_count < 2:
        raise ValueError("node_count must be >= 2")
    for _ in range(max_tries):
        pts = [Point2D(float(rng.random() * area_side), float(rng.random() * area_side))
               for _ in range(node_count)]
        lo = Point2D(0.0, 0.0)
        hi = Point2D(area_side, area_side)
        src = min(range(node_count), key=lambda i: (distance(pts[i], lo), i))
        rest = [i for i in range(node_count) if i != src]
        dst = min(rest, key=lambda i: (distance(pts[i], hi), i))
        topo = Topology(pts, range_, src=src, dst=dst)
        if not require_connected or topo.connected(src, dst):
            return topo
    raise RuntimeError(f"no connected topology after {max_tries} draws")
