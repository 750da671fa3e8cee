"""Combinatorial layer-by-layer construction of regular {p,q} tessellations.

The disk is grown one "generation" at a time.  The boundary of the built
region is kept as a cyclic doubly linked list; completing a boundary vertex
attaches p-gonal faces around it until its degree reaches q, creating the
next generation of vertices.  No geometry is involved: correctness is pinned
by the degree-q and girth-p invariants checked in the test suite.
"""

from __future__ import annotations

from .errors import ResourceBudgetError


class TilingDisk:
    """Growing combinatorial disk of the {p,q} tiling.

    Vertices are integer ids in creation order.  ``gen[v]`` is the
    construction generation (0 for the center).  A vertex's adjacency is
    final once every vertex of its own generation has been completed.
    """

    def __init__(self, p: int, q: int):
        self.p = p
        self.q = q
        self.adj: list[list[int]] = []
        self.gen: list[int] = []
        self.gen_members: list[list[int]] = []
        # cyclic boundary as linked list: id -> neighbor id on the boundary
        self._next: dict[int, int] = {}
        self._prev: dict[int, int] = {}
        self.generations_done = -1

    def _new_vertex(self, g: int) -> int:
        v = len(self.adj)
        self.adj.append([])
        self.gen.append(g)
        while len(self.gen_members) <= g:
            self.gen_members.append([])
        self.gen_members[g].append(v)
        return v

    def _add_edge(self, u: int, v: int) -> None:
        self.adj[u].append(v)
        self.adj[v].append(u)

    def _bootstrap(self) -> None:
        p, q = self.p, self.q
        root = self._new_vertex(0)
        chain: list[int] = []
        # first face: p-gon through the root
        prev = root
        for _ in range(p - 1):
            w = self._new_vertex(1)
            self._add_edge(prev, w)
            chain.append(w)
            prev = w
        self._add_edge(prev, root)
        # faces 2..q-1 share one root edge with the previous face
        for _ in range(q - 2):
            anchor = chain[-1]
            prev = anchor
            for _ in range(p - 2):
                w = self._new_vertex(1)
                self._add_edge(prev, w)
                chain.append(w)
                prev = w
            self._add_edge(prev, root)
        # closing face shares two root edges; adds p-3 vertices
        prev = chain[-1]
        for _ in range(p - 3):
            w = self._new_vertex(1)
            self._add_edge(prev, w)
            chain.append(w)
            prev = w
        self._add_edge(prev, chain[0])
        for i, v in enumerate(chain):
            self._next[v] = chain[(i + 1) % len(chain)]
            self._prev[v] = chain[(i - 1) % len(chain)]
        self.generations_done = 0

    def _complete_vertex(self, v: int) -> None:
        """Attach faces around boundary vertex v until it has q of them.

        A boundary vertex always has exactly one angular gap, bounded by its
        two boundary edges, and is incident to deg-1 completed faces.  The
        closing face may also be the last missing face of the following
        boundary vertices (this happens for small q); those are absorbed
        into the same p-gon and leave the boundary together with v.
        """
        q, p = self.q, self.p
        g = self.gen[v] + 1
        prev = self._prev[v]
        faces = q - (len(self.adj[v]) - 1)
        if faces < 1:
            raise AssertionError("boundary vertex with no remaining gap")
        chain: list[int] = []
        anchor = prev
        for _ in range(faces - 1):
            # non-closing face: p-gon on edge (anchor, v) with p-2 new
            # vertices on its outer path, ending with a new edge back to v
            if len(self.adj[anchor]) >= q:
                raise AssertionError("attaching face to saturated vertex")
            cur = anchor
            for _ in range(p - 2):
                w = self._new_vertex(g)
                self._add_edge(cur, w)
                chain.append(w)
                cur = w
            self._add_edge(cur, v)
            anchor = cur
        # closing face: covers edges (anchor, v) and (v, next); absorb any
        # following boundary vertices for which this is the last face
        absorbed = []
        end = self._next[v]
        while len(self.adj[end]) == q:
            absorbed.append(end)
            end = self._next[end]
            if end == v:
                raise AssertionError("closing face wrapped the boundary")
        fresh = p - 3 - len(absorbed)
        if fresh < 0:
            raise AssertionError("face cannot absorb that many vertices")
        cur = anchor
        for _ in range(fresh):
            w = self._new_vertex(g)
            self._add_edge(cur, w)
            chain.append(w)
            cur = w
        self._add_edge(cur, end)
        # splice: v and absorbed vertices leave the boundary
        for u in [v] + absorbed:
            del self._next[u], self._prev[u]
        seq = [prev] + chain + [end]
        for a, b in zip(seq, seq[1:]):
            self._next[a] = b
            self._prev[b] = a

    def ensure_generations(self, g: int, max_vertices: int = 5_000_000) -> None:
        """Complete every vertex of generation <= g."""
        if self.generations_done < 0:
            self._bootstrap()
        while self.generations_done < g:
            cur = self.generations_done + 1
            for v in self.gen_members[cur]:
                if v in self._next:  # not already absorbed by a neighbor's face
                    self._complete_vertex(v)
            self.generations_done = cur
            if len(self.adj) > max_vertices:
                raise ResourceBudgetError(
                    f"tiling vertex budget {max_vertices} exceeded at "
                    f"generation {self.generations_done}"
                )

    def index_in_generation(self, v: int) -> int:
        return v - self.gen_members[self.gen[v]][0]

    def vertex_id(self, g: int, idx: int) -> int:
        members = self.gen_members[g]
        if idx < 0 or idx >= len(members):
            raise KeyError((g, idx))
        return members[0] + idx


_disk_cache: dict[tuple[int, int], TilingDisk] = {}


def get_disk(p: int, q: int) -> TilingDisk:
    """Shared per-(p,q) disk; construction is deterministic so sharing is safe."""
    key = (p, q)
    if key not in _disk_cache:
        _disk_cache[key] = TilingDisk(p, q)
    return _disk_cache[key]
