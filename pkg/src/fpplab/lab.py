"""Monte Carlo estimation and pathwise verification layer.

Replicated first-passage runs, summary statistics, pathwise checks of the
monotonicity / bounded-extension / embedding inequalities, the coupling
bound between independent copies, and tightness and variance diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as sp_stats

from .engine import (DEFAULT_VERTEX_BUDGET, FppRun, build_ball,
                     first_passage_levels, point_to_point)
from .errors import ContractError
from .families import Family, RandomRegular
from .structure import EmbeddingSpec, verify_root_distance
from .weights import (MappedField, WeightField, WeightLaw, derive_seed,
                      _splitmix64)

# tiny absolute slack for comparisons between float path sums
_FLOAT_SLACK = 1e-9


@dataclass
class SampleSet:
    """Replicated level hitting times.

    ``times[i, k-1]`` is replicate i's T_k; every level up to max_n is
    retained so coupling diagnostics can look at shifted levels.
    """

    family: Family
    law: WeightLaw
    n_grid: list[int]
    master_seed: int
    seeds: list[int]
    times: np.ndarray               # shape (replicates, max_n)

    @property
    def replicates(self) -> int:
        return self.times.shape[0]

    @property
    def max_n(self) -> int:
        return self.times.shape[1]

    def samples(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.max_n:
            raise ContractError(f"level {n} not in sample set (max {self.max_n})")
        return self.times[:, n - 1]


def run_replicates(family: Family, law: WeightLaw, n_grid, replicates: int,
                   master_seed: int,
                   max_vertices: int = DEFAULT_VERTEX_BUDGET,
                   n_jobs: int = 1) -> SampleSet:
    """Independent replicate runs; replicate i uses a seed derived from i.

    ``n_grid`` may be a single level or a list; one run to the largest
    level serves every requested level.  ``n_jobs`` only affects wall
    time, never the result.
    """
    if isinstance(n_grid, int):
        n_grid = [n_grid]
    n_grid = sorted(set(int(n) for n in n_grid))
    if replicates < 2 or replicates % 2 != 0:
        raise ContractError("replicates must be even and >= 2")
    max_n = n_grid[-1]
    ball = build_ball(family, max_n, max_vertices=max_vertices)
    ball.edge_digests()
    ball.csr_structure()
    seeds = [derive_seed(master_seed, i) for i in range(replicates)]
    times = np.empty((replicates, max_n), dtype=np.float64)

    def one(i: int) -> None:
        field = WeightField(seed=seeds[i], law=law)
        run = first_passage_levels(family, field, max_n, ball=ball,
                                   keep_path=False)
        times[i] = run.hitting_times

    if n_jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(one, range(replicates)))
    else:
        for i in range(replicates):
            one(i)
    return SampleSet(family=family, law=law, n_grid=n_grid,
                     master_seed=master_seed, seeds=seeds, times=times)


@dataclass
class SummaryStats:
    n: int
    count: int
    mean: float
    se_mean: float
    variance: float
    quantiles: dict[str, float]
    iqr: float
    skewness: float
    kurtosis: float

    def to_dict(self) -> dict:
        return {
            "n": self.n, "count": self.count, "mean": self.mean,
            "se_mean": self.se_mean, "variance": self.variance,
            "quantiles": self.quantiles, "iqr": self.iqr,
            "skewness": self.skewness, "kurtosis": self.kurtosis,
        }


_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def summary_stats(samples: SampleSet, n: int) -> SummaryStats:
    z = samples.samples(n)
    qs = {f"{q:g}": float(np.quantile(z, q)) for q in _QUANTILES}
    var = float(z.var(ddof=1)) if len(z) > 1 else 0.0
    # higher moments of a degenerate sample are 0 by convention
    return SummaryStats(
        n=n, count=len(z), mean=float(z.mean()),
        se_mean=float(np.sqrt(var / len(z))),
        variance=var,
        quantiles=qs, iqr=qs["0.75"] - qs["0.25"],
        skewness=float(sp_stats.skew(z)) if len(z) > 2 and var > 0 else 0.0,
        kurtosis=float(sp_stats.kurtosis(z)) if len(z) > 3 and var > 0 else 0.0)


def check_monotone(run: FppRun) -> bool:
    """Pathwise form of mean monotonicity: T_k nondecreasing in k."""
    t = run.hitting_times
    return bool(np.all(np.diff(t) >= 0))


def check_growth_bound(run_extended: FppRun, n: int, i: int, k_as) -> bool:
    """T_{n+i} <= T_n + K*i, valid on no-dead-end families with bounded law."""
    if k_as is None:
        raise ContractError(
            "growth bound requires an a.s. bounded law (no as_bound present)")
    if run_extended.n < n + i:
        raise ContractError("run does not extend to level n+i")
    return run_extended.t(n + i) <= run_extended.t(n) + k_as * i + _FLOAT_SLACK


def lex_min_shortest_path(family: Family, source: bytes, target: bytes,
                          max_vertices: int = DEFAULT_VERTEX_BUDGET) -> list[bytes]:
    """Lexicographically minimal shortest graph-distance path source -> target."""
    # BFS from the target, then walk greedily downhill from the source
    dist = {target: 0}
    frontier = [target]
    while source not in dist:
        nxt = []
        for key in frontier:
            for nb in family.neighbors(key):
                if nb not in dist:
                    dist[nb] = dist[key] + 1
                    nxt.append(nb)
        if not nxt:
            raise ContractError("target unreachable")
        if len(dist) > max_vertices:
            raise ContractError("BFS budget exceeded in connecting path search")
        frontier = nxt
    path = [source]
    while path[-1] != target:
        here = path[-1]
        step = min(nb for nb in family.neighbors(here)
                   if nb in dist and dist[nb] == dist[here] - 1)
        path.append(step)
    return path


def check_embedding_inequality(family: Family, emb: EmbeddingSpec, field,
                               n: int,
                               max_vertices: int = DEFAULT_VERTEX_BUDGET) -> bool:
    """Pathwise skeleton of the sub-copy inequality.

    For each copy b: cost of the lexicographic shortest connecting path
    from the root to the copy root, plus the copy's own level-(n+1-R_b)
    hitting time under the pulled-back weights.  True iff the whole-graph
    T_{n+1} is at most the smaller of the two.
    """
    root = family.root()
    whole = first_passage_levels(family, field, n + 1,
                                 max_vertices=max_vertices, keep_path=False)
    best = np.inf
    for b in (1, 2):
        copy_root = emb.declared_root_images[b - 1]
        conn = lex_min_shortest_path(family, root, copy_root, max_vertices)
        r_b = len(conn) - 1
        cost = 0.0
        for u, v in zip(conn, conn[1:]):
            cost += field.edge_weight(u, v)
        copy_field = MappedField(field, emb.phi(b))
        copy_run = first_passage_levels(family, copy_field, n + 1 - r_b,
                                        max_vertices=max_vertices,
                                        keep_path=False)
        best = min(best, cost + copy_run.t(n + 1 - r_b))
    return whole.t(n + 1) <= best + _FLOAT_SLACK


@dataclass
class CouplingReport:
    n_1: int
    n_2: int
    pairs: int
    mean_abs_diff: float
    se: float
    bound: float
    extended_bound: float

    def to_dict(self) -> dict:
        return {"n_1": self.n_1, "n_2": self.n_2, "pairs": self.pairs,
                "mean_abs_diff": self.mean_abs_diff, "se": self.se,
                "bound": self.bound, "extended_bound": self.extended_bound}


def estimate_mean_abs_diff(samples: SampleSet, n: int, r_1: int,
                           r_2: int) -> CouplingReport:
    """Mean |Z - Z'| over independent replicate pairs at level n+1-R_1.

    The bound is 2 * K_mean * C with C = max(R_1, R_2); the extended bound
    adds K_mean * (R_1 - R_2) for the unequal-root-distance variant.
    """
    n_1, n_2 = n + 1 - r_1, n + 1 - r_2
    z = samples.samples(n_1)
    if len(z) < 100:
        raise ContractError("coupling estimate needs >= 100 replicates")
    d = np.abs(z[0::2] - z[1::2])
    k_mean = samples.law.mean
    c = max(r_1, r_2)
    return CouplingReport(
        n_1=n_1, n_2=n_2, pairs=len(d),
        mean_abs_diff=float(d.mean()),
        se=float(d.std(ddof=1) / np.sqrt(len(d))),
        bound=2.0 * k_mean * c,
        extended_bound=2.0 * k_mean * c + k_mean * abs(r_1 - r_2))


@dataclass
class TightnessDiagnostic:
    epsilon: float
    n_grid: list[int]
    r_epsilon: list[float]
    slope: float
    slope_ci: tuple[float, float]

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "n_grid": self.n_grid,
                "r_epsilon": self.r_epsilon, "slope": self.slope,
                "slope_ci": list(self.slope_ci)}


def spread_radius(z: np.ndarray, epsilon: float) -> float:
    """Smallest r with empirical P(|Z - mean| > r) < epsilon."""
    dev = np.sort(np.abs(z - z.mean()))
    count = len(dev)
    candidates = np.concatenate([[0.0], np.unique(dev)])
    exceed = count - np.searchsorted(dev, candidates, side="right")
    ok = np.flatnonzero(exceed < epsilon * count)
    return float(candidates[ok[0]])


def _slope_fit(x: np.ndarray, y: np.ndarray):
    res = sp_stats.linregress(x, y)
    tcrit = sp_stats.t.ppf(0.975, len(x) - 2)
    return (float(res.slope),
            (float(res.slope - tcrit * res.stderr),
             float(res.slope + tcrit * res.stderr)))


def tightness_diagnostic(samples: SampleSet, epsilon: float) -> TightnessDiagnostic:
    grid = samples.n_grid
    if len(grid) < 3:
        raise ContractError("tightness diagnostic needs >= 3 levels")
    if samples.replicates < 200:
        raise ContractError("tightness diagnostic needs >= 200 replicates")
    r_eps = [spread_radius(samples.samples(n), epsilon) for n in grid]
    slope, ci = _slope_fit(np.asarray(grid, dtype=float),
                           np.asarray(r_eps, dtype=float))
    return TightnessDiagnostic(epsilon=epsilon, n_grid=list(grid),
                               r_epsilon=r_eps, slope=slope, slope_ci=ci)


@dataclass
class VarianceScaling:
    distance_grid: list[int]
    means: list[float]
    variances: list[float]
    skewness: list[float]
    kurtosis: list[float]
    loglog_slope: float
    loglog_slope_ci: tuple[float, float]

    def to_dict(self) -> dict:
        return {"distance_grid": self.distance_grid, "means": self.means,
                "variances": self.variances, "skewness": self.skewness,
                "kurtosis": self.kurtosis, "loglog_slope": self.loglog_slope,
                "loglog_slope_ci": list(self.loglog_slope_ci)}


def canonical_target(family: Family, m: int,
                     max_vertices: int = DEFAULT_VERTEX_BUDGET) -> bytes:
    """Lexicographically minimal vertex at graph distance m from the root."""
    ball = build_ball(family, m, max_vertices=max_vertices)
    layer = ball.layer(m)
    if not layer:
        raise ContractError(f"no vertices at distance {m}")
    return layer[0]


def variance_vs_distance(family: Family, law: WeightLaw, distance_grid,
                         replicates: int, master_seed: int,
                         max_settled: int = 1_000_000) -> VarianceScaling:
    """Point-to-point passage time statistics per target distance."""
    grid = sorted(set(int(m) for m in distance_grid))
    root = family.root()
    means, variances, skews, kurts = [], [], [], []
    for m in grid:
        target = canonical_target(family, m)
        vals = np.empty(replicates)
        for i in range(replicates):
            field = WeightField(seed=derive_seed(master_seed, m, i), law=law)
            vals[i] = point_to_point(family, field, root, target,
                                     max_settled=max_settled,
                                     keep_path=False).value
        means.append(float(vals.mean()))
        variances.append(float(vals.var(ddof=1)))
        skews.append(float(sp_stats.skew(vals)))
        kurts.append(float(sp_stats.kurtosis(vals)))
    slope, ci = _slope_fit(np.log(np.asarray(grid, dtype=float)),
                           np.log(np.maximum(variances, 1e-300)))
    return VarianceScaling(distance_grid=grid, means=means,
                           variances=variances, skewness=skews,
                           kurtosis=kurts, loglog_slope=slope,
                           loglog_slope_ci=ci)


@dataclass
class RandomPairStats:
    sizes: list[int]
    means: list[float]
    iqrs: list[float]
    values: dict[int, np.ndarray]

    def to_dict(self) -> dict:
        return {"sizes": self.sizes, "means": self.means, "iqrs": self.iqrs}


def random_pair_tightness(d: int, sizes, law: WeightLaw, replicates: int,
                          master_seed: int,
                          max_settled: int = 1_000_000) -> RandomPairStats:
    """Point-to-point passage times between random vertex pairs per graph size."""
    if d < 3:
        raise ContractError("random-regular tightness experiment needs d >= 3")
    sizes = sorted(set(int(s) for s in sizes))
    means, iqrs, values = [], [], {}
    for nv in sizes:
        family = RandomRegular(d=d, n_vertices=nv,
                               graph_seed=derive_seed(master_seed, nv))
        vals = np.empty(replicates)
        for i in range(replicates):
            seed = derive_seed(master_seed, nv, i)
            u = _splitmix64(seed) % nv
            v = _splitmix64(seed ^ 0x5bf0_3635) % (nv - 1)
            if v >= u:
                v += 1
            field = WeightField(seed=seed, law=law)
            vals[i] = point_to_point(family, field, family.encode(u),
                                     family.encode(v),
                                     max_settled=max_settled,
                                     keep_path=False).value
        means.append(float(vals.mean()))
        q75, q25 = np.quantile(vals, 0.75), np.quantile(vals, 0.25)
        iqrs.append(float(q75 - q25))
        values[nv] = vals
    return RandomPairStats(sizes=sizes, means=means, iqrs=iqrs, values=values)


def coupling_context(family: Family) -> Optional[tuple[int, int]]:
    """(R_1, R_2) for the family's shipped embedding, if any."""
    from .structure import shipped_embedding
    emb = shipped_embedding(family)
    if emb is None:
        return None
    return verify_root_distance(family, emb)
