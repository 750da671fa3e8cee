"""Experiment configuration: JSON parsing, validation, canonical hashing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from .families import (DAryTree, Family, Grid2D, Heisenberg, HyperbolicTiling,
                       Lamplighter, PathFamily, Product, RandomRegular)
from .weights import Constant, Exponential, ShiftedBernoulli, Uniform, WeightLaw

EXPERIMENTS = ("simulate", "verify", "p2p-variance", "random-regular",
               "oracle-check")

DEFAULT_VERTEX_BUDGET = 5_000_000
DEFAULT_SETTLED_BUDGET = 1_000_000


@dataclass
class Budgets:
    max_ball_vertices: int = DEFAULT_VERTEX_BUDGET
    max_settled: int = DEFAULT_SETTLED_BUDGET

    def to_dict(self):
        return {"max_ball_vertices": self.max_ball_vertices,
                "max_settled": self.max_settled}


@dataclass
class ExperimentConfig:
    experiment: str
    family: Family
    law: WeightLaw
    n_grid: list[int] = field(default_factory=list)
    distance_grid: list[int] = field(default_factory=list)
    replicates: int = 2
    master_seed: int = 0
    epsilon: float = 0.1
    budgets: Budgets = field(default_factory=Budgets)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "family": family_to_dict(self.family),
            "law": law_to_dict(self.law),
            "n_grid": list(self.n_grid),
            "distance_grid": list(self.distance_grid),
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "epsilon": self.epsilon,
            "budgets": self.budgets.to_dict(),
        }


def family_to_dict(family: Family) -> dict:
    if isinstance(family, DAryTree):
        return {"variant": "dary_tree", "d": family.d}
    if isinstance(family, Lamplighter):
        return {"variant": "lamplighter"}
    if isinstance(family, HyperbolicTiling):
        return {"variant": "hyperbolic_tiling", "p": family.p, "q": family.q}
    if isinstance(family, Product):
        return {"variant": "product",
                "inner_a": family_to_dict(family.inner_a),
                "inner_b": family_to_dict(family.inner_b)}
    if isinstance(family, Heisenberg):
        return {"variant": "heisenberg"}
    if isinstance(family, PathFamily):
        return {"variant": "path"}
    if isinstance(family, Grid2D):
        return {"variant": "grid2d"}
    if isinstance(family, RandomRegular):
        return {"variant": "random_regular", "d": family.d,
                "n_vertices": family.n_vertices, "graph_seed": family.graph_seed}
    raise ConfigError(f"unknown family {family!r}")


def law_to_dict(law: WeightLaw) -> dict:
    if isinstance(law, Constant):
        return {"variant": "constant", "c": law.c}
    if isinstance(law, Uniform):
        return {"variant": "uniform", "a": law.a, "b": law.b}
    if isinstance(law, Exponential):
        return {"variant": "exponential", "rate": law.rate}
    if isinstance(law, ShiftedBernoulli):
        return {"variant": "shifted_bernoulli", "delta": law.delta,
                "p_one": law.p_one}
    raise ConfigError(f"unknown law {law!r}")


def _require(doc: dict, key: str, types, errors: list, where: str, default=None,
             required=True):
    if key not in doc:
        if required:
            errors.append(f"{where}: missing field '{key}'")
        return default
    val = doc[key]
    if not isinstance(val, types) or isinstance(val, bool):
        errors.append(f"{where}: field '{key}' has wrong type")
        return default
    return val


def family_from_dict(doc, errors: list, where: str = "family") -> Optional[Family]:
    if not isinstance(doc, dict):
        errors.append(f"{where}: must be an object")
        return None
    variant = doc.get("variant")
    try:
        if variant == "dary_tree":
            d = _require(doc, "d", int, errors, where)
            return DAryTree(d=d) if d is not None else None
        if variant == "lamplighter":
            return Lamplighter()
        if variant == "hyperbolic_tiling":
            p = _require(doc, "p", int, errors, where)
            q = _require(doc, "q", int, errors, where)
            return HyperbolicTiling(p=p, q=q) if None not in (p, q) else None
        if variant == "product":
            a = family_from_dict(doc.get("inner_a"), errors, where + ".inner_a")
            b = family_from_dict(doc.get("inner_b"), errors, where + ".inner_b")
            return Product(inner_a=a, inner_b=b) if a and b else None
        if variant == "heisenberg":
            return Heisenberg()
        if variant == "path":
            return PathFamily()
        if variant == "grid2d":
            return Grid2D()
        if variant == "random_regular":
            d = _require(doc, "d", int, errors, where)
            nv = _require(doc, "n_vertices", int, errors, where)
            gs = _require(doc, "graph_seed", int, errors, where)
            if None in (d, nv, gs):
                return None
            return RandomRegular(d=d, n_vertices=nv, graph_seed=gs)
    except ConfigError as exc:
        errors.extend(f"{where}: {m}" for m in exc.messages)
        return None
    errors.append(f"{where}: unknown variant {variant!r}")
    return None


def law_from_dict(doc, errors: list, where: str = "law") -> Optional[WeightLaw]:
    if not isinstance(doc, dict):
        errors.append(f"{where}: must be an object")
        return None
    variant = doc.get("variant")
    num = (int, float)
    try:
        if variant == "constant":
            c = _require(doc, "c", num, errors, where)
            return Constant(c=float(c)) if c is not None else None
        if variant == "uniform":
            a = _require(doc, "a", num, errors, where)
            b = _require(doc, "b", num, errors, where)
            if None in (a, b):
                return None
            return Uniform(a=float(a), b=float(b))
        if variant == "exponential":
            rate = _require(doc, "rate", num, errors, where)
            return Exponential(rate=float(rate)) if rate is not None else None
        if variant == "shifted_bernoulli":
            delta = _require(doc, "delta", num, errors, where)
            p_one = _require(doc, "p_one", num, errors, where)
            if None in (delta, p_one):
                return None
            return ShiftedBernoulli(delta=float(delta), p_one=float(p_one))
    except ConfigError as exc:
        errors.extend(f"{where}: {m}" for m in exc.messages)
        return None
    errors.append(f"{where}: unknown variant {variant!r}")
    return None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a JSON config; raises ConfigError carrying
    every validation problem found, not just the first."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"invalid JSON: {exc}"])
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])
    errors: list[str] = []
    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        errors.append(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    family = family_from_dict(doc.get("family"), errors)
    law = law_from_dict(doc.get("law"), errors)
    n_grid = doc.get("n_grid", [])
    if not (isinstance(n_grid, list) and
            all(isinstance(x, int) and not isinstance(x, bool) and x >= 0
                for x in n_grid)):
        errors.append("n_grid must be a list of nonnegative integers")
        n_grid = []
    distance_grid = doc.get("distance_grid", [])
    if not (isinstance(distance_grid, list) and
            all(isinstance(x, int) and not isinstance(x, bool) and x >= 1
                for x in distance_grid)):
        errors.append("distance_grid must be a list of positive integers")
        distance_grid = []
    replicates = _require(doc, "replicates", int, errors, "config",
                          default=2, required=False)
    if replicates is not None and (replicates < 2 or replicates % 2 != 0):
        errors.append("replicates must be even and >= 2")
    master_seed = _require(doc, "master_seed", int, errors, "config",
                           default=0, required=False)
    epsilon = _require(doc, "epsilon", (int, float), errors, "config",
                       default=0.1, required=False)
    if epsilon is not None and not 0 < epsilon < 1:
        errors.append("epsilon must be in (0,1)")
    budgets_doc = doc.get("budgets", {})
    budgets = Budgets()
    if isinstance(budgets_doc, dict):
        budgets = Budgets(
            max_ball_vertices=budgets_doc.get("max_ball_vertices",
                                              DEFAULT_VERTEX_BUDGET),
            max_settled=budgets_doc.get("max_settled", DEFAULT_SETTLED_BUDGET))
    else:
        errors.append("budgets must be an object")
    if experiment == "simulate" and not n_grid:
        errors.append("simulate requires a nonempty n_grid")
    if experiment == "p2p-variance" and not distance_grid:
        errors.append("p2p-variance requires a nonempty distance_grid")
    if experiment == "random-regular" and not isinstance(family, RandomRegular) \
            and family is not None:
        errors.append("random-regular experiment requires a random_regular family")
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        experiment=experiment, family=family, law=law, n_grid=list(n_grid),
        distance_grid=list(distance_grid), replicates=replicates,
        master_seed=master_seed, epsilon=float(epsilon), budgets=budgets)


def serialize_config(config: ExperimentConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True)


def config_hash(config: ExperimentConfig) -> str:
    """Hash of the semantic fields only; execution knobs never enter."""
    canonical = json.dumps(config.to_dict(), sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
