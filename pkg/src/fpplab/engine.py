"""Passage time computation.

Level hitting times run a label-setting sweep (Dijkstra, via scipy's
csgraph) over the BFS ball of the requested radius.  Restricting to the
ball is exact for the level minima: any path reaching level k first has
to cross every earlier level, so the optimal prefix stays inside the
ball even though per-vertex distances inside the ball may overestimate.

The brute-force routines enumerate simple paths directly and serve as
independent oracles for the sweep; both accumulate path weights left to
right so agreement is bit-exact when the optimum is unique.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .errors import ContractError, ResourceBudgetError
from .families import Family
from .weights import edge_digest

DEFAULT_VERTEX_BUDGET = 5_000_000


@dataclass
class LayeredBall:
    """BFS ball with layers D_0..D_n and the complete adjacency inside it."""

    family: Family
    n: int
    keys: list[bytes]               # index -> key, layer-major, sorted per layer
    layer_offsets: np.ndarray       # len n+2; layer k = indices [off[k], off[k+1])
    index: dict[bytes, int]
    edge_u: np.ndarray              # one entry per undirected edge (incl. loops)
    edge_v: np.ndarray
    edge_mult: np.ndarray
    _digests: np.ndarray | None = field(default=None, repr=False)
    _csr: tuple | None = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.keys)

    def layer(self, k: int) -> list[bytes]:
        o = self.layer_offsets
        return self.keys[o[k]:o[k + 1]]

    def depth_of_index(self, i: int) -> int:
        return int(np.searchsorted(self.layer_offsets, i, side="right")) - 1

    def depth(self, key: bytes) -> int:
        return self.depth_of_index(self.index[key])

    def adjacency_sets(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n_vertices)]
        for u, v in zip(self.edge_u, self.edge_v):
            if u != v:
                adj[u].add(int(v))
                adj[v].add(int(u))
        return adj

    def edge_digests(self) -> np.ndarray:
        if self._digests is None:
            ks = self.keys
            self._digests = np.fromiter(
                (edge_digest(ks[u], ks[v], int(m))
                 for u, v, m in zip(self.edge_u, self.edge_v, self.edge_mult)),
                dtype=np.uint64, count=len(self.edge_u))
        return self._digests

    def csr_structure(self):
        """Fixed CSR skeleton; per-run weights are injected via the perm."""
        if self._csr is None:
            loop = self.edge_u == self.edge_v
            eu, ev = self.edge_u[~loop], self.edge_v[~loop]
            widx = np.flatnonzero(~loop)
            rows = np.concatenate([eu, ev])
            cols = np.concatenate([ev, eu])
            perm_src = np.concatenate([widx, widx])
            order = np.lexsort((cols, rows))
            indices = cols[order].astype(np.int32)
            perm = perm_src[order]
            counts = np.bincount(rows, minlength=self.n_vertices)
            indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)
            self._csr = (indptr, indices, perm)
        return self._csr

    def distances(self, weights: np.ndarray, return_predecessors: bool = False):
        """Dijkstra from the ball's start vertex with the given edge weights."""
        indptr, indices, perm = self.csr_structure()
        data = weights[perm]
        graph = csr_matrix((data, indices, indptr),
                           shape=(self.n_vertices, self.n_vertices))
        return _csgraph_dijkstra(graph, directed=True, indices=0,
                                 return_predecessors=return_predecessors)


def build_ball(family: Family, n: int, max_vertices: int = DEFAULT_VERTEX_BUDGET,
               start: bytes | None = None) -> LayeredBall:
    """BFS ball of radius n around start (the family root by default)."""
    if n < 0:
        raise ContractError(f"ball radius must be >= 0, got {n}")
    start = family.root() if start is None else start
    keys: list[bytes] = [start]
    index: dict[bytes, int] = {start: 0}
    offsets = [0, 1]
    eu: list[int] = []
    ev: list[int] = []
    em: list[int] = []
    frontier = [start]
    for k in range(1, n + 1):
        fresh: set[bytes] = set()
        for key in frontier:
            for nb, _ in family.edges_from(key):
                if nb not in index:
                    fresh.add(nb)
        layer = sorted(fresh)
        for key in layer:
            index[key] = len(keys)
            keys.append(key)
        if len(keys) > max_vertices:
            raise ResourceBudgetError(
                f"ball vertex budget {max_vertices} exceeded at radius {k}")
        frontier = layer
        offsets.append(len(keys))
        if not layer:
            break
    while len(offsets) < n + 2:
        offsets.append(len(keys))
    # second pass: record each edge once, from the endpoint with larger index
    for vi, key in enumerate(keys):
        for nb, mult in family.edges_from(key):
            ui = index.get(nb)
            if ui is None:
                continue  # neighbor outside the ball
            if ui < vi or (ui == vi and key <= nb):
                eu.append(ui)
                ev.append(vi)
                em.append(mult)
    return LayeredBall(
        family=family, n=n, keys=keys,
        layer_offsets=np.asarray(offsets, dtype=np.int64),
        index=index,
        edge_u=np.asarray(eu, dtype=np.int64),
        edge_v=np.asarray(ev, dtype=np.int64),
        edge_mult=np.asarray(em, dtype=np.int64))


@dataclass
class FppRun:
    """Level hitting times T_1..T_n of one weight realization."""

    family: Family
    n: int
    hitting_times: np.ndarray       # T_k at position k-1
    argmin_keys: list[bytes]
    optimal_path: list[bytes] | None

    def t(self, k: int) -> float:
        if k == 0:
            return 0.0
        return float(self.hitting_times[k - 1])


@dataclass
class PointToPointResult:
    value: float
    settled_vertices: int
    path: list[bytes] | None


def _ball_weights(field, ball: LayeredBall) -> np.ndarray:
    try:
        return field.weights_for_digests(ball.edge_digests())
    except ContractError:
        ks = ball.keys
        return np.fromiter(
            (field.edge_weight(ks[u], ks[v], int(m))
             for u, v, m in zip(ball.edge_u, ball.edge_v, ball.edge_mult)),
            dtype=np.float64, count=len(ball.edge_u))


def first_passage_levels(family: Family, field, n: int,
                         max_vertices: int = DEFAULT_VERTEX_BUDGET,
                         ball: LayeredBall | None = None,
                         keep_path: bool = True,
                         restrict_to: set[bytes] | None = None) -> FppRun:
    """Hitting times T_1..T_n of the level sets, plus per-level argmins.

    ``restrict_to`` masks the search to a vertex subset (the start vertex
    is always kept); level sets stay those of the full graph.
    """
    if ball is None or ball.n < n:
        ball = build_ball(family, n, max_vertices=max_vertices)
    w = _ball_weights(field, ball)
    allowed = None
    if restrict_to is not None:
        allowed = np.fromiter((k in restrict_to or i == 0
                               for i, k in enumerate(ball.keys)),
                              dtype=bool, count=ball.n_vertices)
        w = w.copy()
        blocked = ~(allowed[ball.edge_u] & allowed[ball.edge_v])
        w[blocked] = np.inf
    dist, pred = ball.distances(w, return_predecessors=True)
    off = ball.layer_offsets
    times = np.empty(n, dtype=np.float64)
    argmins: list[bytes] = []
    last_idx = None
    for k in range(1, n + 1):
        sub = dist[off[k]:off[k + 1]]
        if allowed is not None:
            mask = allowed[off[k]:off[k + 1]]
            sub = np.where(mask, sub, np.inf)
        if len(sub) == 0 or not np.isfinite(sub.min()):
            times[k - 1] = np.inf
            argmins.append(b"")
            continue
        m = sub.min()
        i = int(off[k]) + int(np.flatnonzero(sub == m)[0])
        times[k - 1] = m
        argmins.append(ball.keys[i])
        last_idx = i
    path = None
    if keep_path and last_idx is not None:
        rev = []
        i = last_idx
        while i >= 0:
            rev.append(ball.keys[i])
            i = int(pred[i])
        path = rev[::-1]
    return FppRun(family=family, n=n, hitting_times=times,
                  argmin_keys=argmins, optimal_path=path)


def point_to_point(family: Family, field, source: bytes, target: bytes,
                   max_settled: int = 1_000_000,
                   keep_path: bool = True) -> PointToPointResult:
    """Exact passage time between two vertices by lazy label-setting."""
    if source == target:
        raise ContractError("source and target must differ")
    dist: dict[bytes, float] = {}
    pred: dict[bytes, bytes] = {}
    heap: list[tuple[float, bytes]] = [(0.0, source)]
    best = {source: 0.0}
    settled = 0
    while heap:
        d, key = heapq.heappop(heap)
        if key in dist:
            continue
        dist[key] = d
        settled += 1
        if key == target:
            path = None
            if keep_path:
                rev = [key]
                while rev[-1] != source:
                    rev.append(pred[rev[-1]])
                path = rev[::-1]
            return PointToPointResult(value=d, settled_vertices=settled, path=path)
        if settled >= max_settled:
            break
        for nb, mult in family.edges_from(key):
            if nb in dist:
                continue
            nd = d + field.edge_weight(key, nb, mult)
            if nb not in best or nd < best[nb]:
                best[nb] = nd
                pred[nb] = key
                heapq.heappush(heap, (nd, nb))
    raise ResourceBudgetError(
        f"settled-vertex cap {max_settled} reached before target")


_BRUTE_FORCE_MAX_N = 4
_BRUTE_FORCE_MAX_VERTICES = 6000


def brute_force_level(family: Family, field, n: int,
                      max_vertices: int = _BRUTE_FORCE_MAX_VERTICES) -> float:
    """Minimal weight over simple paths from the root to level n.

    Exhaustive enumeration inside B_n; paths stop at their first arrival
    in D_n.  Guarded to n <= 4 and small balls.
    """
    if n > _BRUTE_FORCE_MAX_N:
        raise ResourceBudgetError(f"brute force limited to n <= {_BRUTE_FORCE_MAX_N}")
    ball = build_ball(family, n, max_vertices=max_vertices)
    return _enumerate_paths(ball, field,
                            stop_at=set(range(ball.layer_offsets[n],
                                              ball.layer_offsets[n + 1])))


def brute_force_p2p(family: Family, field, source: bytes, target: bytes,
                    radius: int,
                    max_vertices: int = _BRUTE_FORCE_MAX_VERTICES) -> float:
    """Minimum over simple paths from source to target inside B_radius(source).

    Exact only when the optimal path stays inside the ball; callers choose
    the radius accordingly.
    """
    if radius > 6:
        raise ResourceBudgetError("brute force p2p limited to radius <= 6")
    ball = build_ball(family, radius, max_vertices=max_vertices, start=source)
    if target not in ball.index:
        raise ContractError("target outside the enumeration ball")
    return _enumerate_paths(ball, field, stop_at={ball.index[target]})


def _enumerate_paths(ball: LayeredBall, field, stop_at: set[int]) -> float:
    ks = ball.keys
    adj: list[list[tuple[int, float]]] = [[] for _ in range(ball.n_vertices)]
    for u, v, m in zip(ball.edge_u, ball.edge_v, ball.edge_mult):
        if u == v:
            continue
        wt = field.edge_weight(ks[u], ks[v], int(m))
        adj[u].append((int(v), wt))
        adj[v].append((int(u), wt))
    best = np.inf
    visited = [False] * ball.n_vertices
    visited[0] = True

    def walk(u: int, acc: float):
        nonlocal best
        for v, wt in adj[u]:
            if visited[v]:
                continue
            cost = acc + wt
            if cost >= best:
                continue
            if v in stop_at:
                best = cost
                continue
            visited[v] = True
            walk(v, cost)
            visited[v] = False

    if 0 in stop_at:
        return 0.0
    walk(0, 0.0)
    return float(best)
