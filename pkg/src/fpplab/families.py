"""Implicit rooted graph families.

Every family exposes a canonical byte encoding for its vertices, a root,
and deterministic neighbor enumeration.  Byte equality is vertex equality
and the lexicographic byte order is the tie-break order used everywhere.

Edges are reported as ``(neighbor_key, multiplicity_index)`` pairs; the
multiplicity index is 0 except for the configuration-model multigraph.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, KeyDecodeError
from .tiling import get_disk

_I32_BIAS = 1 << 31
_I64_BIAS = 1 << 63


def _enc_u32(x: int) -> bytes:
    return struct.pack(">I", x)


def _enc_i64(x: int) -> bytes:
    return struct.pack(">Q", x + _I64_BIAS)


def _dec_i64(b: bytes) -> int:
    return struct.unpack(">Q", b)[0] - _I64_BIAS


class Family:
    """Base interface for implicit graph families."""

    def root(self) -> bytes:
        raise NotImplementedError

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        """Sorted (neighbor_key, multiplicity_index) pairs incident to key."""
        raise NotImplementedError

    def neighbors(self, key: bytes) -> list[bytes]:
        return [k for k, _ in self.edges_from(key)]

    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class DAryTree(Family):
    """Rooted d-ary tree; vertices are digit strings over 0..d-1."""

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ConfigError(f"dary_tree requires d >= 2, got {self.d}")

    def root(self) -> bytes:
        return b""

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        if any(b >= self.d for b in key):
            raise KeyDecodeError(f"digit out of range for d={self.d}: {key!r}")
        out = []
        if key:
            out.append((key[:-1], 0))
        out.extend((key + bytes([i]), 0) for i in range(self.d))
        return out  # parent is a strict prefix, so the list is already sorted

    def label(self) -> str:
        return f"dary_tree[d={self.d}]"


@dataclass(frozen=True)
class PathFamily(Family):
    """Half-line 0 - 1 - 2 - ... rooted at 0."""

    def root(self) -> bytes:
        return struct.pack(">Q", 0)

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        if len(key) != 8:
            raise KeyDecodeError(f"bad path key length {len(key)}")
        (pos,) = struct.unpack(">Q", key)
        out = []
        if pos > 0:
            out.append((struct.pack(">Q", pos - 1), 0))
        out.append((struct.pack(">Q", pos + 1), 0))
        return out

    def label(self) -> str:
        return "path"


@dataclass(frozen=True)
class Grid2D(Family):
    """Square lattice Z^2 rooted at the origin."""

    def root(self) -> bytes:
        return self.encode(0, 0)

    @staticmethod
    def encode(x: int, y: int) -> bytes:
        return struct.pack(">II", x + _I32_BIAS, y + _I32_BIAS)

    @staticmethod
    def decode(key: bytes) -> tuple[int, int]:
        if len(key) != 8:
            raise KeyDecodeError(f"bad grid key length {len(key)}")
        bx, by = struct.unpack(">II", key)
        return bx - _I32_BIAS, by - _I32_BIAS

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        x, y = self.decode(key)
        ks = [self.encode(x - 1, y), self.encode(x + 1, y),
              self.encode(x, y - 1), self.encode(x, y + 1)]
        ks.sort()
        return [(k, 0) for k in ks]

    def label(self) -> str:
        return "grid2d"


@dataclass(frozen=True)
class Lamplighter(Family):
    """Lamplighter over N: finitely many lit lamps plus a marker position.

    Positions are 1-based.  Moves toggle the lamp at the marker or shift
    the marker by one (no move left at position 1).
    """

    def root(self) -> bytes:
        return self.encode(1, ())

    @staticmethod
    def encode(pos: int, lamps) -> bytes:
        lamps = tuple(sorted(lamps))
        return _enc_u32(pos) + b"".join(_enc_u32(l) for l in lamps)

    @staticmethod
    def decode(key: bytes) -> tuple[int, tuple[int, ...]]:
        if len(key) < 4 or len(key) % 4 != 0:
            raise KeyDecodeError(f"bad lamplighter key length {len(key)}")
        vals = struct.unpack(f">{len(key) // 4}I", key)
        pos, lamps = vals[0], vals[1:]
        if pos < 1 or any(l < 1 for l in lamps):
            raise KeyDecodeError("lamplighter positions are 1-based")
        if list(lamps) != sorted(set(lamps)):
            raise KeyDecodeError("lamp list must be strictly increasing")
        return pos, lamps

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        pos, lamps = self.decode(key)
        lampset = set(lamps)
        out = [self.encode(pos, lampset ^ {pos})]
        if pos > 1:
            out.append(self.encode(pos - 1, lamps))
        out.append(self.encode(pos + 1, lamps))
        out.sort()
        return [(k, 0) for k in out]

    def label(self) -> str:
        return "lamplighter"


@dataclass(frozen=True)
class Heisenberg(Family):
    """Cayley graph of the discrete Heisenberg group.

    A vertex (a, b, c) stands for the upper triangular matrix
    [[1, a, c], [0, 1, b], [0, 0, 1]].  Edges are right multiplication by
    the two elementary generators and their inverses:
      x:      (a, b, c) -> (a + 1, b, c)
      y:      (a, b, c) -> (a, b + 1, c + a)
    """

    def root(self) -> bytes:
        return self.encode(0, 0, 0)

    @staticmethod
    def encode(a: int, b: int, c: int) -> bytes:
        return _enc_i64(a) + _enc_i64(b) + _enc_i64(c)

    @staticmethod
    def decode(key: bytes) -> tuple[int, int, int]:
        if len(key) != 24:
            raise KeyDecodeError(f"bad heisenberg key length {len(key)}")
        return _dec_i64(key[:8]), _dec_i64(key[8:16]), _dec_i64(key[16:])

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        a, b, c = self.decode(key)
        ks = [self.encode(a + 1, b, c), self.encode(a - 1, b, c),
              self.encode(a, b + 1, c + a), self.encode(a, b - 1, c - a)]
        ks.sort()
        return [(k, 0) for k in ks]

    def label(self) -> str:
        return "heisenberg"


@dataclass(frozen=True)
class Product(Family):
    """Cartesian product of two families; one coordinate moves per edge."""

    inner_a: Family
    inner_b: Family

    def root(self) -> bytes:
        return self.encode(self.inner_a.root(), self.inner_b.root())

    @staticmethod
    def encode(ka: bytes, kb: bytes) -> bytes:
        return _enc_u32(len(ka)) + ka + kb

    @staticmethod
    def decode(key: bytes) -> tuple[bytes, bytes]:
        if len(key) < 4:
            raise KeyDecodeError("bad product key")
        (la,) = struct.unpack(">I", key[:4])
        if len(key) < 4 + la:
            raise KeyDecodeError("bad product key")
        return key[4:4 + la], key[4 + la:]

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        ka, kb = self.decode(key)
        ks = [self.encode(na, kb) for na in self.inner_a.neighbors(ka)]
        ks += [self.encode(ka, nb) for nb in self.inner_b.neighbors(kb)]
        ks.sort()
        return [(k, 0) for k in ks]

    def label(self) -> str:
        return f"product[{self.inner_a.label()};{self.inner_b.label()}]"


@dataclass(frozen=True)
class HyperbolicTiling(Family):
    """Regular {p,q} tessellation of the hyperbolic plane.

    Vertices carry (construction layer, index within layer) keys assigned
    by the deterministic combinatorial disk construction.
    """

    p: int
    q: int

    def __post_init__(self):
        if self.p < 3 or self.q < 3:
            raise ConfigError(f"tiling requires p, q >= 3, got ({self.p},{self.q})")
        if self.q * 2 + self.p * 2 >= self.p * self.q:  # 1/p + 1/q >= 1/2
            raise ConfigError(
                f"({{{self.p},{self.q}}}) is not hyperbolic: need 1/p + 1/q < 1/2")

    def root(self) -> bytes:
        return self.encode(0, 0)

    @staticmethod
    def encode(gen: int, idx: int) -> bytes:
        return struct.pack(">II", gen, idx)

    @staticmethod
    def decode(key: bytes) -> tuple[int, int]:
        if len(key) != 8:
            raise KeyDecodeError(f"bad tiling key length {len(key)}")
        return struct.unpack(">II", key)

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        gen, idx = self.decode(key)
        disk = get_disk(self.p, self.q)
        disk.ensure_generations(gen + 1)
        try:
            v = disk.vertex_id(gen, idx)
        except KeyError:
            raise KeyDecodeError(f"no tiling vertex ({gen},{idx})")
        ks = sorted(self.encode(disk.gen[w], disk.index_in_generation(w))
                    for w in disk.adj[v])
        return [(k, 0) for k in ks]

    def label(self) -> str:
        return f"tiling[p={self.p};q={self.q}]"


@lru_cache(maxsize=8)
def realize_random_regular(d: int, n_vertices: int, graph_seed: int):
    """Configuration-model multigraph: uniform matching of d*n stubs.

    Returns adjacency: list over vertices of sorted (neighbor, mult) pairs.
    Self-loops appear once per loop with their own multiplicity index.
    """
    if (d * n_vertices) % 2 != 0:
        raise ConfigError(f"d*n_vertices must be even, got d={d}, n={n_vertices}")
    rng = np.random.default_rng(graph_seed)
    stubs = np.repeat(np.arange(n_vertices), d)
    rng.shuffle(stubs)
    pair_mult: dict[tuple[int, int], int] = {}
    adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n_vertices)]
    for i in range(0, len(stubs), 2):
        u, v = int(stubs[i]), int(stubs[i + 1])
        if u > v:
            u, v = v, u
        mult = pair_mult.get((u, v), 0)
        pair_mult[(u, v)] = mult + 1
        adj[u].append((v, mult, 0))
        if v != u:
            adj[v].append((u, mult, 0))
    return [sorted((nb, mult) for nb, mult, _ in lst) for lst in adj]


@dataclass(frozen=True)
class RandomRegular(Family):
    """Random d-regular multigraph from the configuration model."""

    d: int
    n_vertices: int
    graph_seed: int

    def __post_init__(self):
        if self.d < 1 or self.n_vertices < 1:
            raise ConfigError("random_regular requires d >= 1 and n_vertices >= 1")
        if (self.d * self.n_vertices) % 2 != 0:
            raise ConfigError(
                f"d*n_vertices must be even, got d={self.d}, n={self.n_vertices}")

    def _adj(self):
        return realize_random_regular(self.d, self.n_vertices, self.graph_seed)

    def root(self) -> bytes:
        return _enc_u32(0)

    @staticmethod
    def encode(v: int) -> bytes:
        return _enc_u32(v)

    @staticmethod
    def decode(key: bytes) -> int:
        if len(key) != 4:
            raise KeyDecodeError(f"bad vertex key length {len(key)}")
        return struct.unpack(">I", key)[0]

    def edges_from(self, key: bytes) -> list[tuple[bytes, int]]:
        v = self.decode(key)
        if v >= self.n_vertices:
            raise KeyDecodeError(f"vertex {v} out of range")
        return [(self.encode(nb), mult) for nb, mult in self._adj()[v]]

    def label(self) -> str:
        return f"random_regular[d={self.d};n={self.n_vertices};seed={self.graph_seed}]"
