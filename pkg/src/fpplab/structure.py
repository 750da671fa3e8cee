"""Verification of the recursive structure properties on finite balls.

Checks, for a declared pair of self-embeddings: vertex-disjointness of the
two images, induced-subgraph isomorphism, equality of the root-image
distances, and the no-dead-ends property.  Verification up to radius n
certifies the properties on B_n only; reports say so explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .engine import DEFAULT_VERTEX_BUDGET, build_ball
from .errors import ContractError, ResourceBudgetError
from .families import (DAryTree, Family, Lamplighter, Product)


@dataclass(frozen=True)
class EmbeddingSpec:
    """Two injective vertex maps realizing disjoint isomorphic sub-copies."""

    phi_1: Callable[[bytes], bytes]
    phi_2: Callable[[bytes], bytes]
    declared_root_images: tuple[bytes, bytes]

    def phi(self, b: int) -> Callable[[bytes], bytes]:
        return self.phi_1 if b == 1 else self.phi_2


@dataclass
class VerificationReport:
    radius: int
    disjoint_ok: Optional[bool] = None
    iso_ok: Optional[bool] = None
    no_dead_ends_ok: Optional[bool] = None
    counterexample: Optional[bytes] = None
    r_1: Optional[int] = None
    r_2: Optional[int] = None

    @property
    def c(self) -> Optional[int]:
        if self.r_1 is None or self.r_2 is None:
            return None
        return max(self.r_1, self.r_2)

    @property
    def root_distance_equal(self) -> Optional[bool]:
        if self.r_1 is None:
            return None
        return self.r_1 == self.r_2

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "finite_ball_caveat": (
                f"properties certified on the radius-{self.radius} ball only"),
            "disjoint_ok": self.disjoint_ok,
            "iso_ok": self.iso_ok,
            "no_dead_ends_ok": self.no_dead_ends_ok,
            "counterexample": (self.counterexample.hex()
                               if self.counterexample else None),
            "r_1": self.r_1,
            "r_2": self.r_2,
            "c": self.c,
            "root_distance_equal": self.root_distance_equal,
        }


def verify_disjoint(family: Family, emb: EmbeddingSpec, n: int,
                    max_vertices: int = DEFAULT_VERTEX_BUDGET) -> VerificationReport:
    """Images of B_n under the two maps must not share a vertex."""
    ball = build_ball(family, n, max_vertices=max_vertices)
    img1 = {emb.phi_1(k) for k in ball.keys}
    img2 = {emb.phi_2(k) for k in ball.keys}
    if len(img1) != len(ball.keys) or len(img2) != len(ball.keys):
        # a non-injective map collides with itself
        return VerificationReport(radius=n, disjoint_ok=False,
                                  counterexample=ball.keys[0])
    overlap = img1 & img2
    if overlap:
        return VerificationReport(radius=n, disjoint_ok=False,
                                  counterexample=min(overlap))
    return VerificationReport(radius=n, disjoint_ok=True)


def verify_isomorphism(family: Family, emb: EmbeddingSpec, n: int,
                       max_vertices: int = DEFAULT_VERTEX_BUDGET,
                       induced: bool = True) -> VerificationReport:
    """u ~ v iff phi(u) ~ phi(v) over all pairs in B_n, both maps.

    With induced=False only edge preservation (the forward direction) is
    required.
    """
    ball = build_ball(family, n, max_vertices=max_vertices)
    keys = ball.keys
    adj = ball.adjacency_sets()
    for b in (1, 2):
        phi = emb.phi(b)
        if phi(family.root()) != emb.declared_root_images[b - 1]:
            return VerificationReport(radius=n, iso_ok=False,
                                      counterexample=family.root())
        images = [phi(k) for k in keys]
        img_nbrs = {im: set(family.neighbors(im)) for im in images}
        for i, u in enumerate(keys):
            for j in range(i + 1, len(keys)):
                edge = j in adj[i]
                img_edge = images[j] in img_nbrs[images[i]]
                if edge and not img_edge:
                    return VerificationReport(radius=n, iso_ok=False,
                                              counterexample=u)
                if induced and img_edge and not edge:
                    return VerificationReport(radius=n, iso_ok=False,
                                              counterexample=u)
    return VerificationReport(radius=n, iso_ok=True)


def bfs_distance(family: Family, source: bytes, targets: set[bytes],
                 max_vertices: int = DEFAULT_VERTEX_BUDGET) -> dict[bytes, int]:
    """Graph distances from source to each target, by plain BFS."""
    found: dict[bytes, int] = {}
    seen = {source}
    frontier = [source]
    d = 0
    if source in targets:
        found[source] = 0
    while frontier and len(found) < len(targets):
        d += 1
        nxt = []
        for key in frontier:
            for nb in family.neighbors(key):
                if nb in seen:
                    continue
                seen.add(nb)
                if len(seen) > max_vertices:
                    raise ResourceBudgetError(
                        f"BFS budget {max_vertices} exceeded")
                if nb in targets and nb not in found:
                    found[nb] = d
                nxt.append(nb)
        frontier = nxt
    if len(found) < len(targets):
        raise ContractError("targets unreachable")
    return found


def verify_root_distance(family: Family, emb: EmbeddingSpec,
                         max_vertices: int = DEFAULT_VERTEX_BUDGET) -> tuple[int, int]:
    root = family.root()
    im1, im2 = emb.declared_root_images
    dists = bfs_distance(family, root, {im1, im2}, max_vertices=max_vertices)
    return dists[im1], dists[im2]


def verify_no_dead_ends(family: Family, n: int,
                        max_vertices: int = DEFAULT_VERTEX_BUDGET):
    """Every vertex of D_k (k <= n) must have a neighbor in D_{k+1}."""
    ball = build_ball(family, n + 1, max_vertices=max_vertices)
    adj = ball.adjacency_sets()
    off = ball.layer_offsets
    for k in range(n + 1):
        for i in range(off[k], off[k + 1]):
            if not any(off[k + 1] <= j < off[k + 2] for j in adj[i]):
                return False, ball.keys[i]
    return True, None


def verify_all(family: Family, emb: EmbeddingSpec, n: int,
               max_vertices: int = DEFAULT_VERTEX_BUDGET) -> VerificationReport:
    report = VerificationReport(radius=n)
    d = verify_disjoint(family, emb, n, max_vertices)
    report.disjoint_ok = d.disjoint_ok
    report.counterexample = d.counterexample
    i = verify_isomorphism(family, emb, n, max_vertices)
    report.iso_ok = i.iso_ok
    if report.counterexample is None:
        report.counterexample = i.counterexample
    report.r_1, report.r_2 = verify_root_distance(family, emb, max_vertices)
    nde, witness = verify_no_dead_ends(family, n, max_vertices)
    report.no_dead_ends_ok = nde
    if report.counterexample is None and witness is not None:
        report.counterexample = witness
    return report


# ---------------------------------------------------------------------------
# shipped embedding specs


def tree_embedding(d: int) -> EmbeddingSpec:
    """Sub-copies of the d-ary tree: the subtrees below the first two children."""
    return EmbeddingSpec(
        phi_1=lambda k: bytes([0]) + k,
        phi_2=lambda k: bytes([1]) + k,
        declared_root_images=(bytes([0]), bytes([1])),
    )


def _lamplighter_shift(key: bytes) -> tuple[int, tuple[int, ...]]:
    pos, lamps = Lamplighter.decode(key)
    return pos + 1, tuple(l + 1 for l in lamps)


def lamplighter_embedding() -> EmbeddingSpec:
    """Sub-copies of the lamplighter over N with equal root distances.

    The first copy shifts everything two steps right and keeps lamps 1 and
    2 off; the second shifts one step right and turns lamp 1 on.  Root
    images (all off, pos 3) and (lamp 1 on, pos 2) are both at distance 2
    from the root, and both copies are "deep": the true distance of an
    image vertex equals 2 plus its distance inside the copy, so forward
    paths through a copy certify whole-graph level hitting times.
    """
    def phi_1(key: bytes) -> bytes:
        pos, lamps = Lamplighter.decode(key)
        return Lamplighter.encode(pos + 2, tuple(l + 2 for l in lamps))

    def phi_2(key: bytes) -> bytes:
        pos, lamps = _lamplighter_shift(key)
        return Lamplighter.encode(pos, set(lamps) | {1})

    return EmbeddingSpec(
        phi_1=phi_1, phi_2=phi_2,
        declared_root_images=(Lamplighter.encode(3, ()),
                              Lamplighter.encode(2, (1,))))


def product_embedding(product: Product, inner: EmbeddingSpec) -> EmbeddingSpec:
    """Lift an embedding of the first factor to the product, fixing the second."""
    def lift(phi):
        def mapped(key: bytes) -> bytes:
            ka, kb = Product.decode(key)
            return Product.encode(phi(ka), kb)
        return mapped

    rb = product.inner_b.root()
    return EmbeddingSpec(
        phi_1=lift(inner.phi_1), phi_2=lift(inner.phi_2),
        declared_root_images=(
            Product.encode(inner.declared_root_images[0], rb),
            Product.encode(inner.declared_root_images[1], rb)))


def shipped_embedding(family: Family) -> Optional[EmbeddingSpec]:
    """The embedding spec bundled with a family, if one exists."""
    if isinstance(family, DAryTree):
        return tree_embedding(family.d)
    if isinstance(family, Lamplighter):
        return lamplighter_embedding()
    if isinstance(family, Product):
        inner = shipped_embedding(family.inner_a)
        if inner is None:
            return None
        return product_embedding(family, inner)
    return None
