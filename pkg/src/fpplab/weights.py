"""Deterministic i.i.d. edge weight field.

A weight is a pure function of (seed, law, canonical edge key): the edge
key bytes are digested once (seed independent), the digest is mixed with
the seed by a 64-bit finalizer, and the resulting word becomes a uniform
in (0,1) fed through the law's inverse CDF.  Re-evaluating an edge always
gives the same weight, which is what the coupling experiments rely on.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GAMMA) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _splitmix64_np(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(_GAMMA))
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def edge_key_bytes(u: bytes, v: bytes, mult: int = 0) -> bytes:
    """Canonical unordered encoding of an edge, stable under u/v swap."""
    if v < u:
        u, v = v, u
    return struct.pack(">H", len(u)) + u + struct.pack(">H", len(v)) + v + bytes([mult])


def edge_digest(u: bytes, v: bytes, mult: int = 0) -> int:
    """Seed-independent 64-bit digest of a canonical edge key."""
    h = hashlib.blake2b(edge_key_bytes(u, v, mult), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def derive_seed(master_seed: int, *indices: int) -> int:
    """Replicate / stream seed derivation, stable across platforms."""
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack(">Q", master_seed & _MASK))
    for i in indices:
        h.update(struct.pack(">Q", i & _MASK))
    return int.from_bytes(h.digest(), "big")


class WeightLaw:
    """Base for edge weight laws with support in (0, inf)."""

    mean: float
    as_bound: float | None  # almost-sure upper bound, None if unbounded

    def transform(self, u):
        """Inverse CDF applied to uniform(0,1) samples (scalar or array)."""
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(WeightLaw):
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigError(f"constant law requires c > 0, got {self.c}")

    @property
    def mean(self):
        return self.c

    @property
    def as_bound(self):
        return self.c

    def transform(self, u):
        return np.full_like(np.asarray(u, dtype=np.float64), self.c) \
            if np.ndim(u) else self.c

    def cdf(self, x):
        return np.where(np.asarray(x) >= self.c, 1.0, 0.0)

    def label(self):
        return f"constant[c={self.c:g}]"


@dataclass(frozen=True)
class Uniform(WeightLaw):
    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise ConfigError(f"uniform law requires 0 <= a < b, got ({self.a},{self.b})")

    @property
    def mean(self):
        return (self.a + self.b) / 2.0

    @property
    def as_bound(self):
        return self.b

    def transform(self, u):
        return self.a + (self.b - self.a) * u

    def cdf(self, x):
        return np.clip((np.asarray(x) - self.a) / (self.b - self.a), 0.0, 1.0)

    def label(self):
        return f"uniform[a={self.a:g};b={self.b:g}]"


@dataclass(frozen=True)
class Exponential(WeightLaw):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigError(f"exponential law requires rate > 0, got {self.rate}")

    @property
    def mean(self):
        return 1.0 / self.rate

    @property
    def as_bound(self):
        return None

    def transform(self, u):
        return -np.log(u) / self.rate

    def cdf(self, x):
        return 1.0 - np.exp(-self.rate * np.asarray(x))

    def label(self):
        return f"exponential[rate={self.rate:g}]"


@dataclass(frozen=True)
class ShiftedBernoulli(WeightLaw):
    """Two-point law on {delta, 1 + delta} with P(1 + delta) = p_one."""

    delta: float
    p_one: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigError(f"shifted_bernoulli requires delta > 0, got {self.delta}")
        if not 0 <= self.p_one <= 1:
            raise ConfigError(f"p_one must be in [0,1], got {self.p_one}")

    @property
    def mean(self):
        return self.delta + self.p_one

    @property
    def as_bound(self):
        return 1.0 + self.delta

    def transform(self, u):
        return self.delta + np.where(np.asarray(u) < self.p_one, 1.0, 0.0) \
            if np.ndim(u) else self.delta + (1.0 if u < self.p_one else 0.0)

    def cdf(self, x):
        x = np.asarray(x)
        return np.where(x >= 1 + self.delta, 1.0,
                        np.where(x >= self.delta, 1.0 - self.p_one, 0.0))

    def label(self):
        return f"shifted_bernoulli[delta={self.delta:g};p_one={self.p_one:g}]"


def law_bounds(law: WeightLaw) -> tuple[float, float | None]:
    """Exact mean and, when the support is bounded, the a.s. upper bound."""
    return law.mean, law.as_bound


def word_to_unit(word):
    """Map a 64-bit word to a uniform in the open interval (0,1).

    Uses 52 bits so that the +0.5 offset stays exactly representable;
    the result lies in [2^-53, 1 - 2^-53], never touching 0 or 1.
    """
    if isinstance(word, np.ndarray):
        return ((word >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0 ** -52
    return ((word >> 12) + 0.5) * 2.0 ** -52


@dataclass(frozen=True)
class WeightField:
    """Pure map (seed, law, edge) -> positive weight."""

    seed: int
    law: WeightLaw

    def _seed_word(self) -> int:
        return _splitmix64(self.seed & _MASK)

    def uniform_for_digest(self, digest: int) -> float:
        word = _splitmix64(digest ^ self._seed_word())
        return word_to_unit(word)

    def edge_weight(self, u: bytes, v: bytes, mult: int = 0) -> float:
        return float(self.law.transform(self.uniform_for_digest(edge_digest(u, v, mult))))

    def weights_for_digests(self, digests: np.ndarray) -> np.ndarray:
        """Vectorized weights for an array of edge digests (uint64)."""
        words = _splitmix64_np(digests ^ np.uint64(self._seed_word()))
        return np.asarray(self.law.transform(word_to_unit(words)), dtype=np.float64)


def sample_weight(field, e) -> float:
    """Weight of edge e = (u, v) or (u, v, mult) under the field."""
    if len(e) == 2:
        u, v = e
        mult = 0
    else:
        u, v, mult = e
    return field.edge_weight(u, v, mult)


class MappedField:
    """Weight field seen through a vertex map (used for embedded sub-copies).

    The weight of abstract edge (u, v) is the base field's weight of the
    image edge (phi(u), phi(v)).
    """

    def __init__(self, base, phi):
        self.base = base
        self.phi = phi
        self.law = base.law

    def edge_weight(self, u: bytes, v: bytes, mult: int = 0) -> float:
        return self.base.edge_weight(self.phi(u), self.phi(v), mult)

    def weights_for_digests(self, digests):
        raise ContractError("mapped fields have no digest shortcut; "
                            "map the edges instead")
