"""Acceptance suite.

Each criterion from the project contract is one test (or one small group
sharing a number).  Monte Carlo sample sets are shared module-level
fixtures so the suite stays inside its runtime budgets.

Two sub-checks of criterion 7 are marked strict-xfail: the lamplighter
and the nilpotent matrix group genuinely contain dead-end vertices
(witnesses asserted in the companion tests), so the no-dead-ends claim
cannot hold for them.  See the repository notes for the full analysis.
"""

import json
import time

import numpy as np
import pytest

from fpplab.cli import main
from fpplab.engine import (brute_force_level, build_ball,
                           first_passage_levels)
from fpplab.families import (DAryTree, Grid2D, Heisenberg, HyperbolicTiling,
                             Lamplighter, PathFamily, Product)
from fpplab.lab import (check_embedding_inequality, check_growth_bound,
                        check_monotone, estimate_mean_abs_diff,
                        run_replicates, summary_stats, tightness_diagnostic)
from fpplab.structure import (EmbeddingSpec, lamplighter_embedding,
                              shipped_embedding, tree_embedding, verify_all,
                              verify_disjoint, verify_no_dead_ends)
from fpplab.weights import Exponential, Uniform, WeightField, derive_seed

from oracle_graphs import (LL_ROOT, MATRIX_ROOT, bfs_layers,
                           dead_ends_to_depth, lamplighter_neighbors,
                           matrix_abc, matrix_neighbors)

TIMINGS = {}


def _timed_replicates(label, *args, **kwargs):
    t0 = time.monotonic()
    samples = run_replicates(*args, **kwargs)
    TIMINGS[label] = time.monotonic() - t0
    return samples


@pytest.fixture(scope="module")
def tree_samples():
    return _timed_replicates("tree", DAryTree(2), Uniform(0, 1),
                             [4, 8, 12, 16], 1000, 2024)


@pytest.fixture(scope="module")
def lamplighter_samples():
    return _timed_replicates("lamplighter", Lamplighter(), Uniform(0, 1),
                             [4, 8, 12, 16], 1000, 2025)


@pytest.fixture(scope="module")
def path_samples():
    return _timed_replicates("path", PathFamily(), Exponential(1.0),
                             [25, 50, 100, 200], 2000, 2026)


# -- criterion 1: engine vs brute force, bit identical ----------------------

def test_criterion_01_oracle_equivalence():
    families = [DAryTree(2), Lamplighter(), Heisenberg(), Grid2D()]
    laws = [Uniform(0, 1), Exponential(1.0)]
    t0 = time.monotonic()
    for fam in families:
        for law in laws:
            for s in range(50):
                field = WeightField(seed=derive_seed(901, s), law=law)
                fast = first_passage_levels(fam, field, 3,
                                            keep_path=False).t(3)
                slow = brute_force_level(fam, field, 3)
                assert fast == slow, (fam.label(), law.label(), s)
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0, f"oracle sweep took {elapsed:.1f}s"


# -- criterion 2: level hitting times nondecreasing on every run ------------

def test_criterion_02_pathwise_monotonicity(tree_samples, lamplighter_samples,
                                            path_samples):
    for samples in (tree_samples, lamplighter_samples, path_samples):
        assert np.all(np.diff(samples.times, axis=1) >= 0)
    spot_families = [DAryTree(2), Lamplighter(), Heisenberg(), Grid2D(),
                     HyperbolicTiling(3, 7), Product(DAryTree(2), PathFamily())]
    for fam in spot_families:
        for s in range(10):
            field = WeightField(seed=derive_seed(902, s), law=Exponential(1.0))
            run = first_passage_levels(fam, field, 6, keep_path=False)
            assert check_monotone(run), (fam.label(), s)


# -- criterion 3: bounded-extension inequality T_{n+i} <= T_n + K*i ---------

@pytest.mark.parametrize("family", [DAryTree(2), Lamplighter()],
                         ids=["tree", "lamplighter"])
def test_criterion_03_growth_bound(family):
    samples = run_replicates(family, Uniform(0, 1), [10], 200, 314)
    for n, i in [(4, 2), (6, 4)]:
        lhs = samples.times[:, n + i - 1]
        rhs = samples.times[:, n - 1] + 1.0 * i
        assert np.all(lhs <= rhs + 1e-9), (family.label(), n, i)
    # same statement through the run-level checker on a few replicates
    for s in range(5):
        field = WeightField(seed=samples.seeds[s], law=Uniform(0, 1))
        run = first_passage_levels(family, field, 10, keep_path=False)
        assert check_growth_bound(run, 4, 2, k_as=1.0)
        assert check_growth_bound(run, 6, 4, k_as=1.0)


# -- criterion 4: sub-copy embedding inequality on 100 seeds ----------------

@pytest.mark.parametrize("family,emb", [
    (DAryTree(2), tree_embedding(2)),
    (Lamplighter(), lamplighter_embedding()),
], ids=["tree", "lamplighter"])
def test_criterion_04_embedding_inequality(family, emb):
    failures = []
    for s in range(100):
        field = WeightField(seed=derive_seed(904, s), law=Uniform(0, 1))
        if not check_embedding_inequality(family, emb, field, 6):
            failures.append(s)
    assert failures == []


# -- criterion 5: coupling bound E|Z - Z'| <= 2*K_mean*C --------------------

def test_criterion_05_coupling_bound(tree_samples, lamplighter_samples):
    for n in [4, 8, 12, 16]:
        rep = estimate_mean_abs_diff(tree_samples, n, 1, 1)
        assert rep.pairs == 500
        assert rep.bound == 1.0
        assert rep.mean_abs_diff <= rep.bound + 3 * rep.se, n
    for n in [4, 8, 12, 16]:
        rep = estimate_mean_abs_diff(lamplighter_samples, n, 2, 2)
        assert rep.bound == 2.0
        assert rep.mean_abs_diff <= rep.bound + 3 * rep.se, n
    total = TIMINGS["tree"] + TIMINGS["lamplighter"]
    assert total < 600.0, f"coupling sampling took {total:.1f}s"


# -- criterion 6: tightness vs non-tightness contrast -----------------------

def test_criterion_06_tree_spread_is_flat(tree_samples):
    diag = tightness_diagnostic(tree_samples, 0.1)
    lo, hi = diag.slope_ci
    assert lo <= 0.0 <= hi, diag.to_dict()


def test_criterion_06_path_spread_grows(path_samples):
    diag = tightness_diagnostic(path_samples, 0.1)
    lo, _ = diag.slope_ci
    assert lo > 0.0, diag.to_dict()


def test_criterion_06_path_variance_linear(path_samples):
    stats = summary_stats(path_samples, 100)
    assert stats.count == 2000
    assert 0.8 <= stats.variance / 100.0 <= 1.2, stats.variance


# -- criterion 7: structure verification ------------------------------------

def test_criterion_07_tree_verification():
    report = verify_all(DAryTree(2), tree_embedding(2), 5)
    assert report.disjoint_ok and report.iso_ok
    assert (report.r_1, report.r_2) == (1, 1)


def test_criterion_07_lamplighter_verification():
    fam = Lamplighter()
    emb = lamplighter_embedding()
    report = verify_all(fam, emb, 5)
    assert report.disjoint_ok and report.iso_ok
    assert (report.r_1, report.r_2) == (2, 2)


def test_criterion_07_product_verification():
    fam = Product(DAryTree(2), PathFamily())
    report = verify_all(fam, shipped_embedding(fam), 4)
    assert report.disjoint_ok and report.iso_ok
    assert (report.r_1, report.r_2) == (1, 1)


def test_criterion_07_corrupted_spec_rejected_with_witness():
    fam = DAryTree(2)
    overlap = EmbeddingSpec(phi_1=lambda k: bytes([0]) + k,
                            phi_2=lambda k: bytes([0]) + k,
                            declared_root_images=(bytes([0]), bytes([0])))
    report = verify_disjoint(fam, overlap, 3)
    assert report.disjoint_ok is False
    assert report.counterexample is not None


@pytest.mark.parametrize("family", [DAryTree(2), HyperbolicTiling(3, 7)],
                         ids=["tree", "tiling37"])
def test_criterion_07_no_dead_ends_depth_8(family):
    ok, witness = verify_no_dead_ends(family, 8)
    assert ok, witness


@pytest.mark.xfail(strict=True, reason="the lamplighter over the positive "
                   "integers has dead ends (first at distance 4), so this "
                   "claim is unattainable; see the witness test below")
def test_criterion_07_no_dead_ends_lamplighter_depth_8():
    ok, witness = verify_no_dead_ends(Lamplighter(), 8)
    assert ok, witness


@pytest.mark.xfail(strict=True, reason="the nilpotent matrix group has dead "
                   "ends at its central elements (first at distance 4), so "
                   "this claim is unattainable; see the witness test below")
def test_criterion_07_no_dead_ends_heisenberg_depth_8():
    ok, witness = verify_no_dead_ends(Heisenberg(), 8)
    assert ok, witness


def test_criterion_07_lamplighter_dead_end_witness():
    # cross-checked against the independent explicit-state BFS oracle
    ok, witness = verify_no_dead_ends(Lamplighter(), 5)
    assert not ok
    assert witness == Lamplighter.encode(1, (1, 2))
    oracle = dead_ends_to_depth(LL_ROOT, lamplighter_neighbors, 5)
    assert (4, (1, frozenset({1, 2}))) in oracle


def test_criterion_07_heisenberg_dead_end_witness():
    ok, witness = verify_no_dead_ends(Heisenberg(), 5)
    assert not ok
    assert Heisenberg.decode(witness) in {(0, 0, 1), (0, 0, -1)}
    oracle = dead_ends_to_depth(MATRIX_ROOT, matrix_neighbors, 5)
    abc = {matrix_abc(m) for _, m in oracle}
    assert {(0, 0, 1), (0, 0, -1)} <= abc


# -- criterion 8: graph-core oracles ----------------------------------------

def test_criterion_08_ball_sizes_match_slow_oracles():
    ll_ball = build_ball(Lamplighter(), 6)
    ll_sizes = np.diff(ll_ball.layer_offsets).tolist()
    oracle = [len(l) for l in bfs_layers(LL_ROOT, lamplighter_neighbors, 6)]
    assert ll_sizes == oracle

    h_ball = build_ball(Heisenberg(), 6)
    h_sizes = np.diff(h_ball.layer_offsets).tolist()
    oracle = [len(l) for l in bfs_layers(MATRIX_ROOT, matrix_neighbors, 6)]
    assert h_sizes == oracle


def test_criterion_08_tiling_degrees_and_girth():
    fam = HyperbolicTiling(3, 7)
    ball = build_ball(fam, 8)
    for key in ball.keys:
        assert len(fam.edges_from(key)) == 7
    root_nbrs = fam.neighbors(fam.root())
    assert any(b in fam.neighbors(a)
               for a in root_nbrs for b in root_nbrs if a != b)
    # triangle tiling: no multiple edges, so the shortest cycle is 3
    assert len(set(root_nbrs)) == 7


# -- criterion 9: byte-identical outputs across reruns and thread counts ----

def test_criterion_09_determinism(tmp_path):
    doc = {
        "experiment": "simulate",
        "family": {"variant": "lamplighter"},
        "law": {"variant": "uniform", "a": 0, "b": 1},
        "n_grid": [3, 5, 7],
        "replicates": 8,
        "master_seed": 99,
    }
    outputs = []
    for name, threads in [("a", 1), ("b", 4), ("c", 1)]:
        d = tmp_path / name
        d.mkdir()
        cfg = d / "cfg.json"
        cfg.write_text(json.dumps(doc))
        code = main(["simulate", "--config", str(cfg),
                     "--out-dir", str(d / "out"), "--threads", str(threads)])
        assert code == 0
        outputs.append((d / "out" / "samples.csv").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    summaries = [json.loads((tmp_path / n / "out" / "summary.json")
                            .read_text()) for n in ("a", "b", "c")]
    assert summaries[0] == summaries[1] == summaries[2]
