"""Synthetic-benchmark machinery: generative discrete Bayesian networks,
forward sampling, confounder injection with admissibility screening,
mutual information, evaluation metrics, and the causal-model conversion.

The injection protocol mirrors the evaluation it feeds: a latent L with a
uniform marginal is wired to two eligible observed children, whose
conditional tables are redrawn from a Dirichlet/point-mass mixture until the
pair is at least as dependent (marginally and given their parents) as an
average common-parent pair of the original network. That screening keeps
"undetectable in principle" confounders out of the truth set.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset, VariableMeta, project
from .graphs import Dag, Pdag, cpdag_of

__all__ = [
    "DiscreteBayesNet",
    "CausalModel",
    "InjectionConfig",
    "InjectionError",
    "EvalReport",
    "sample",
    "inject_confounders",
    "mutual_information",
    "compare_confounders",
    "compare_cpdags",
    "causal_model_to_bn",
    "bn_to_json",
    "bn_from_json",
    "run_benchmark",
]

# elimination factors past this many cells take the sampled (plug-in)
# mutual-information path
EXACT_JOINT_CEILING = 10_000_000
PLUGIN_SAMPLE_ROWS = 100_000
_PLUGIN_SEED = 0xA5


class InjectionError(RuntimeError):
    """Raised when no admissible confounder placement can be drawn."""


@dataclass
class DiscreteBayesNet:
    """Generative model: DAG + per-node conditional probability tables.

    ``cpts[x]`` has shape ``(n_parent_configs, cardinality of x)``; rows are
    indexed lexicographically over the parents sorted by variable id (same
    convention as :func:`latentdag.data.count`) and each row sums to one.
    """

    variables: list[VariableMeta]
    dag: Dag
    cpts: dict[int, np.ndarray]

    def __post_init__(self) -> None:
        if self.dag.n_nodes != len(self.variables):
            raise ValueError("graph size does not match variable list")
        # the variable list owns the names; a dag built with placeholder
        # names would otherwise leak them into comparisons downstream
        names = [v.name for v in self.variables]
        if self.dag.names != names:
            self.dag = self.dag.copy()
            self.dag.names = names
        for x in range(self.dag.n_nodes):
            self.cpts[x] = np.asarray(self.cpts[x], dtype=float)
            card = self.variables[x].cardinality
            n_cfg = 1
            for p in sorted(self.dag.parents(x)):
                n_cfg *= self.variables[p].cardinality
            if self.cpts[x].shape != (n_cfg, card):
                raise ValueError(
                    f"CPT of {self.variables[x].name!r} has shape "
                    f"{self.cpts[x].shape}, expected {(n_cfg, card)}"
                )
            sums = self.cpts[x].sum(axis=1)
            if np.abs(sums - 1.0).max() > 1e-9:
                raise ValueError(
                    f"CPT rows of {self.variables[x].name!r} do not sum to 1"
                )

    @property
    def n_nodes(self) -> int:
        return self.dag.n_nodes

    def cardinality(self, x: int) -> int:
        return self.variables[x].cardinality

    def joint_size(self) -> int:
        size = 1
        for v in self.variables:
            size *= v.cardinality
        return size

    def id_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(f"unknown variable {name!r}")

    def copy(self) -> "DiscreteBayesNet":
        return DiscreteBayesNet(
            variables=list(self.variables),
            dag=self.dag.copy(),
            cpts={x: self.cpts[x].copy() for x in self.cpts},
        )


def bn_to_json(bn: DiscreteBayesNet) -> str:
    doc = {
        "variables": [
            {"name": v.name, "states": list(v.states)} for v in bn.variables
        ],
        "arcs": [
            [bn.variables[u].name, bn.variables[v].name] for u, v in bn.dag.arcs()
        ],
        "cpts": {
            bn.variables[x].name: [float(p) for p in bn.cpts[x].ravel()]
            for x in range(bn.n_nodes)
        },
    }
    return json.dumps(doc, indent=2)


def bn_from_json(text: str) -> DiscreteBayesNet:
    doc = json.loads(text)
    variables = [
        VariableMeta(v["name"], tuple(v["states"])) for v in doc["variables"]
    ]
    idx = {v.name: i for i, v in enumerate(variables)}
    dag = Dag(len(variables), [v.name for v in variables])
    for u, v in doc["arcs"]:
        dag.add_arc(idx[u], idx[v])
    cpts = {}
    for name, flat in doc["cpts"].items():
        x = idx[name]
        card = variables[x].cardinality
        flat = np.asarray(flat, dtype=float)
        if flat.size % card:
            raise ValueError(f"CPT of {name!r} has {flat.size} entries, not a multiple of {card}")
        cpts[x] = flat.reshape(-1, card)
    return DiscreteBayesNet(variables=variables, dag=dag, cpts=cpts)


# ---------------------------------------------------------------------------
# sampling

def sample(bn: DiscreteBayesNet, n: int, seed: int = 0) -> Dataset:
    """Draw ``n`` rows by ancestral sampling (deterministic given the seed)."""
    rng = np.random.default_rng(seed)
    values = np.zeros((n, bn.n_nodes), dtype=np.int32)
    for x in bn.dag.topological_order():
        ps = sorted(bn.dag.parents(x))
        card = bn.cardinality(x)
        if ps:
            cfg = np.ravel_multi_index(
                tuple(values[:, p] for p in ps),
                tuple(bn.cardinality(p) for p in ps),
            )
            rows = bn.cpts[x][cfg]
        else:
            rows = np.broadcast_to(bn.cpts[x][0], (n, card))
        u = rng.random(n)
        draws = (u[:, None] > np.cumsum(rows, axis=1)).sum(axis=1)
        values[:, x] = np.minimum(draws, card - 1)
    return Dataset(list(bn.variables), values)


# ---------------------------------------------------------------------------
# exact inference (variable elimination) and mutual information

def _multiply(factors: list[tuple[tuple[int, ...], np.ndarray]],
              cards: dict[int, int]) -> tuple[tuple[int, ...], np.ndarray]:
    all_vars = tuple(sorted({v for vars_, _ in factors for v in vars_}))
    shape = tuple(cards[v] for v in all_vars)
    out = np.ones(shape)
    for vars_, tab in factors:
        expand = [slice(None) if v in vars_ else np.newaxis for v in all_vars]
        # permute tab axes into all_vars order first
        perm = tuple(sorted(range(len(vars_)), key=lambda i: vars_[i]))
        out = out * np.transpose(tab, perm)[tuple(expand)]
    return all_vars, out


def joint_marginal(bn: DiscreteBayesNet, targets: tuple[int, ...]) -> np.ndarray:
    """Exact P(targets) with axes in the given order, by variable elimination
    (greedy smallest-intermediate-factor order)."""
    cards = {x: bn.cardinality(x) for x in range(bn.n_nodes)}
    factors: list[tuple[tuple[int, ...], np.ndarray]] = []
    for x in range(bn.n_nodes):
        ps = tuple(sorted(bn.dag.parents(x)))
        shape = tuple(cards[p] for p in ps) + (cards[x],)
        factors.append((ps + (x,), bn.cpts[x].reshape(shape)))

    to_eliminate = set(range(bn.n_nodes)) - set(targets)
    while to_eliminate:
        best_y, best_size = None, None
        for y in sorted(to_eliminate):
            union: set[int] = set()
            for vars_, _ in factors:
                if y in vars_:
                    union |= set(vars_)
            size = 1
            for v in union - {y}:
                size *= cards[v]
            if best_size is None or size < best_size:
                best_y, best_size = y, size
        rel = [f for f in factors if best_y in f[0]]
        rest = [f for f in factors if best_y not in f[0]]
        vars_, tab = _multiply(rel, cards)
        axis = vars_.index(best_y)
        tab = tab.sum(axis=axis)
        vars_ = tuple(v for v in vars_ if v != best_y)
        factors = rest + [(vars_, tab)]
        to_eliminate.discard(best_y)

    vars_, tab = _multiply(factors, cards)
    # reorder axes to the caller's target order
    perm = tuple(vars_.index(t) for t in targets)
    return np.transpose(tab, perm)


def _elimination_peak(bn: DiscreteBayesNet, targets: tuple[int, ...]) -> int:
    """Largest intermediate factor (in cells) that :func:`joint_marginal`
    would build for these targets — a symbolic dry run of the same greedy
    elimination, used to decide whether the exact route is affordable."""
    cards = {x: bn.cardinality(x) for x in range(bn.n_nodes)}

    def cells(vs) -> int:
        size = 1
        for v in vs:
            size *= cards[v]
        return size

    factors = [frozenset(bn.dag.parents(x)) | {x} for x in range(bn.n_nodes)]
    peak = max(cells(f) for f in factors)
    to_eliminate = set(range(bn.n_nodes)) - set(targets)
    while to_eliminate:
        best_y, best_size = None, None
        for y in sorted(to_eliminate):
            union: set[int] = set()
            for f in factors:
                if y in f:
                    union |= f
            size = cells(union - {y})
            if best_size is None or size < best_size:
                best_y, best_size = y, size
        merged = frozenset().union(*(f for f in factors if best_y in f))
        peak = max(peak, cells(merged))
        factors = [f for f in factors if best_y not in f]
        factors.append(merged - {best_y})
        to_eliminate.discard(best_y)
    peak = max(peak, cells(frozenset().union(*factors)))
    return peak


def _mi_from_joint(j: np.ndarray) -> float:
    """I(X;Y|Z) from a table with axes (x, y, *z); natural log."""
    if j.ndim < 2:
        raise ValueError("joint must have at least the two target axes")
    j = j.reshape(j.shape[0], j.shape[1], -1)
    total = j.sum()
    if total <= 0:
        return 0.0
    p = j / total
    pz = p.sum(axis=(0, 1), keepdims=True)
    pxz = p.sum(axis=1, keepdims=True)
    pyz = p.sum(axis=0, keepdims=True)
    pos = p > 0
    ratio = np.divide(p * pz, pxz * pyz, out=np.ones_like(p), where=pos)
    return float((p * np.log(ratio, where=pos, out=np.zeros_like(p)))[pos].sum())


def mutual_information(bn: DiscreteBayesNet, x: int, y: int, given=()) -> float:
    """I(x; y | given) under the network's distribution.

    Exact via variable elimination while the elimination's largest
    intermediate factor stays within ``EXACT_JOINT_CEILING`` cells (a sparse
    20-node network passes easily even though its full joint would not);
    beyond that, a plug-in estimate from a fixed-seed auxiliary sample of
    ``PLUGIN_SAMPLE_ROWS`` rows.
    """
    zs = tuple(sorted(set(int(v) for v in given)))
    if x == y or x in zs or y in zs:
        raise ValueError("x, y and the conditioning set must be disjoint")
    if _elimination_peak(bn, (x, y) + zs) <= EXACT_JOINT_CEILING:
        j = joint_marginal(bn, (x, y) + zs)
        return _mi_from_joint(j)
    d = sample(bn, PLUGIN_SAMPLE_ROWS, seed=_PLUGIN_SEED)
    cards = (bn.cardinality(x), bn.cardinality(y)) + tuple(bn.cardinality(z) for z in zs)
    cols = tuple(d.values[:, v] for v in (x, y) + zs)
    flat = np.ravel_multi_index(cols, cards)
    counts = np.bincount(flat, minlength=int(np.prod(cards))).reshape(cards).astype(float)
    return _mi_from_joint(counts)


# ---------------------------------------------------------------------------
# confounder injection

@dataclass(frozen=True)
class InjectionConfig:
    n_confounders: int = 2
    latent_cardinality: int = 2
    dirichlet: float = 4.0
    dirac_low: float = 2.0 / 3.0
    dirac_high: float = 5.0 / 6.0
    max_attempts: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_confounders < 0:
            raise ValueError("n_confounders must be >= 0")
        if self.latent_cardinality < 2:
            raise ValueError("latent domain needs at least two states")
        if not (0.0 < self.dirac_low <= self.dirac_high < 1.0):
            raise ValueError("point-mass weight range must sit inside (0, 1)")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


def _mixture_cpt(n_cfg: int, card: int, cfg: InjectionConfig,
                 rng: np.random.Generator) -> np.ndarray:
    """Per-row mixture of a point mass (weight ~ U[low, high], atom uniform)
    and a symmetric Dirichlet draw."""
    cpt = np.empty((n_cfg, card))
    for r in range(n_cfg):
        w = rng.uniform(cfg.dirac_low, cfg.dirac_high)
        atom = int(rng.integers(card))
        row = (1.0 - w) * rng.dirichlet([cfg.dirichlet] * card)
        row[atom] += w
        cpt[r] = row
    return cpt


def dependence_thresholds(bn: DiscreteBayesNet) -> tuple[float, float]:
    """Average MI and conditional MI over all pairs sharing a parent.

    For each unordered pair (x, y) with a common parent, the conditional MI
    is taken given (Pa(x) ∪ Pa(y)) \\ {x, y}. Returns (0, 0) when the net has
    no such pair.
    """
    mis, cmis = [], []
    for x in range(bn.n_nodes):
        for y in range(x + 1, bn.n_nodes):
            if not (bn.dag.parents(x) & bn.dag.parents(y)):
                continue
            given = tuple(sorted((bn.dag.parents(x) | bn.dag.parents(y)) - {x, y}))
            mis.append(mutual_information(bn, x, y))
            cmis.append(mutual_information(bn, x, y, given))
    if not mis:
        return 0.0, 0.0
    return float(np.mean(mis)), float(np.mean(cmis))


def inject_confounders(bn: DiscreteBayesNet, cfg: InjectionConfig
                       ) -> tuple[DiscreteBayesNet, list[tuple[str, tuple[str, str]]]]:
    """Add ``cfg.n_confounders`` latent common causes to a copy of ``bn``.

    Children are drawn uniformly among unordered pairs of observed nodes that
    each have one or two observed parents and are not already a child of an
    earlier latent. Each child's CPT is redrawn from the point-mass/Dirichlet
    mixture until the pair clears the original network's average dependence
    thresholds; a placement that cannot clear them within
    ``cfg.max_attempts`` draws raises :class:`InjectionError`.

    Returns the augmented network and the truth list
    ``[(latent name, (child name, child name)), ...]``.
    """
    if cfg.n_confounders == 0:
        return bn.copy(), []

    n_obs = bn.n_nodes
    thr_mi, thr_cmi = dependence_thresholds(bn)
    rng = np.random.default_rng(cfg.seed)

    out = bn.copy()
    truth: list[tuple[str, tuple[str, str]]] = []
    used: set[int] = set()
    eligible = [
        x for x in range(n_obs) if 1 <= len(bn.dag.parents(x)) <= 2
    ]
    for i in range(cfg.n_confounders):
        pool = [x for x in eligible if x not in used]
        pairs = [(a, b) for ai, a in enumerate(pool) for b in pool[ai + 1:]]
        if not pairs:
            raise InjectionError(
                f"no eligible child pair left for confounder {i + 1}"
            )
        a, b = pairs[int(rng.integers(len(pairs)))]
        name = f"L{i + 1}"
        lid = out.dag.add_node(name)
        out.variables.append(
            VariableMeta(name, tuple(f"s{j}" for j in range(cfg.latent_cardinality)))
        )
        out.cpts[lid] = np.full((1, cfg.latent_cardinality), 1.0 / cfg.latent_cardinality)
        out.dag.add_arc(lid, a)
        out.dag.add_arc(lid, b)

        observed_parents = (
            {p for p in out.dag.parents(a) if p < n_obs}
            | {p for p in out.dag.parents(b) if p < n_obs}
        ) - {a, b}
        given = tuple(sorted(observed_parents))

        for attempt in range(cfg.max_attempts):
            for child in (a, b):
                card = out.cardinality(child)
                n_cfg = 1
                for p in sorted(out.dag.parents(child)):
                    n_cfg *= out.cardinality(p)
                out.cpts[child] = _mixture_cpt(n_cfg, card, cfg, rng)
            if (
                mutual_information(out, a, b) > thr_mi
                and mutual_information(out, a, b, given) > thr_cmi
            ):
                break
        else:
            raise InjectionError(
                f"confounder {name} on ({out.variables[a].name}, "
                f"{out.variables[b].name}): no admissible tables in "
                f"{cfg.max_attempts} draws"
            )
        used.update((a, b))
        truth.append((name, (out.variables[a].name, out.variables[b].name)))
    # revalidate shapes/sums after the in-place CPT edits
    return DiscreteBayesNet(out.variables, out.dag, out.cpts), truth


# ---------------------------------------------------------------------------
# evaluation

@dataclass
class EvalReport:
    """Metric bundle; confounder-level and link-level parts may be filled
    independently. ``precision``/``recall``/``f1`` are None when undefined
    (zero denominator)."""

    ok: int | None = None
    not_ok: int | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    cpdag_ok: int | None = None
    miss: int | None = None
    rev: int | None = None
    type_err: int | None = None
    xs: int | None = None
    learn_seconds: float | None = None
    post_seconds: float | None = None


def compare_confounders(truth: list[tuple[str, tuple[str, str]]],
                        learned) -> EvalReport:
    """Match learned latents to true ones by unordered child pair.

    ``learned`` is either a discovery result (its latent list is read off the
    rewired graph, with ids translated to names) or an explicit list of
    ``(latent name, (child name, child name))``. Each true latent can be
    matched at most once; surplus learned latents (including duplicates of an
    already-matched pair) count against precision.
    """
    if hasattr(learned, "latents") and hasattr(learned, "dag"):
        names = learned.dag.names
        learned = [
            (name, (names[a], names[b])) for name, (a, b) in learned.latents
        ]
    remaining = [frozenset(pair) for _, pair in truth]
    ok = 0
    for _, pair in learned:
        key = frozenset(pair)
        if key in remaining:
            remaining.remove(key)
            ok += 1
    not_ok = len(learned) - ok
    precision = ok / (ok + not_ok) if (ok + not_ok) > 0 else None
    recall = ok / len(truth) if truth else None
    f1 = None
    if precision is not None and recall is not None and (precision + recall) > 0:
        f1 = 2 * precision * recall / (precision + recall)
    return EvalReport(ok=ok, not_ok=not_ok, precision=precision, recall=recall, f1=f1)


def _link_map(p: Pdag) -> dict[tuple[int, int], str]:
    links: dict[tuple[int, int], str] = {}
    for u, v in p.directed:
        links[(min(u, v), max(u, v))] = ">" if u < v else "<"
    for u, v in p.undirected:
        links[(u, v)] = "-"
    return links


def compare_cpdags(truth: Pdag, learned: Pdag) -> EvalReport:
    """Count link agreements between two equivalence-class graphs.

    Observed nodes are aligned by name; latent nodes (per the graphs' latent
    annotations) are aligned by their unordered child pair, each truth latent
    claimed at most once. Unmatched latents keep their links, which then
    surface as misses or excesses.
    """
    t_latent = {name for name, _ in truth.latents}
    l_latent = {name for name, _ in learned.latents}
    t_obs = {n for n in truth.names if n not in t_latent}
    l_obs = {n for n in learned.names if n not in l_latent}
    if t_obs != l_obs:
        raise ValueError("graphs disagree on the observed node set")

    # shared identifier space: observed names, then matched latent pairs,
    # then the unmatched latents of either side
    ident: dict[tuple[str, str], str] = {}

    def key_of(p: Pdag, node: int, latent_pairs: dict[str, frozenset[str]],
               matched: dict[str, str]) -> str:
        name = p.names[node]
        if name in latent_pairs:
            return matched[name]
        return f"obs:{name}"

    t_pairs = {name: frozenset({truth.names[a], truth.names[b]}) for name, (a, b) in truth.latents}
    l_pairs = {name: frozenset({learned.names[a], learned.names[b]}) for name, (a, b) in learned.latents}
    unclaimed = dict(t_pairs)
    t_matched = {name: f"lat:{sorted(pair)}" for name, pair in t_pairs.items()}
    l_matched = {}
    for name, pair in sorted(l_pairs.items()):
        hit = next((tn for tn, tp in sorted(unclaimed.items()) if tp == pair), None)
        if hit is not None:
            del unclaimed[hit]
            l_matched[name] = t_matched[hit]
        else:
            l_matched[name] = f"extra:{name}"

    def links_by_key(p: Pdag, latent_pairs, matched) -> dict[frozenset, str]:
        out: dict[frozenset, str] = {}
        for (u, v), mark in _link_map(p).items():
            ku = key_of(p, u, latent_pairs, matched)
            kv = key_of(p, v, latent_pairs, matched)
            if mark == "-":
                out[frozenset((ku, kv))] = "-"
            else:
                src, dst = (u, v) if mark == ">" else (v, u)
                ks = key_of(p, src, latent_pairs, matched)
                kd = key_of(p, dst, latent_pairs, matched)
                out[frozenset((ku, kv))] = f"{ks}->{kd}"
        return out

    t_links = links_by_key(truth, t_pairs, t_matched)
    l_links = links_by_key(learned, l_pairs, l_matched)

    ok = rev = type_err = 0
    miss = sum(1 for k in t_links if k not in l_links)
    xs = sum(1 for k in l_links if k not in t_links)
    for k, tmark in t_links.items():
        lmark = l_links.get(k)
        if lmark is None:
            continue
        if tmark == lmark:
            ok += 1
        elif tmark == "-" or lmark == "-":
            type_err += 1
        else:
            rev += 1
    return EvalReport(cpdag_ok=ok, miss=miss, rev=rev, type_err=type_err, xs=xs)


# ---------------------------------------------------------------------------
# deterministic-mechanism models

@dataclass
class CausalModel:
    """Structural model with explicit noise: each node is a deterministic
    function of its parents and a private disturbance.

    ``mechanism[x]`` is a 0/1 table of shape
    ``(n_parent_configs * |dom disturbance|, |dom x|)`` whose rows are indexed
    lexicographically over the sorted parents with the disturbance as the
    fastest-varying (last) digit; row ``(pa, xi)`` puts probability one on
    ``f_x(pa, xi)``. ``disturbance[x]`` is the distribution of that noise.
    """

    variables: list[VariableMeta]
    dag: Dag
    disturbance: dict[int, np.ndarray]
    mechanism: dict[int, np.ndarray]

    def __post_init__(self) -> None:
        for x in range(self.dag.n_nodes):
            pxi = np.asarray(self.disturbance[x], dtype=float)
            if abs(pxi.sum() - 1.0) > 1e-9:
                raise ValueError(f"disturbance of node {x} does not sum to 1")
            tab = np.asarray(self.mechanism[x], dtype=float)
            card = self.variables[x].cardinality
            n_cfg = 1
            for p in sorted(self.dag.parents(x)):
                n_cfg *= self.variables[p].cardinality
            want = (n_cfg * pxi.size, card)
            if tab.shape != want:
                raise ValueError(
                    f"mechanism of node {x} has shape {tab.shape}, expected {want}"
                )
            if not np.array_equal(tab, tab.astype(bool).astype(float)):
                raise ValueError(f"mechanism of node {x} is not a 0/1 table")
            if not np.array_equal(tab.sum(axis=1), np.ones(tab.shape[0])):
                raise ValueError(
                    f"mechanism of node {x} must have exactly one 1 per row"
                )
            self.disturbance[x] = pxi
            self.mechanism[x] = tab


def causal_model_to_bn(cm: CausalModel) -> DiscreteBayesNet:
    """Marginalise each node's disturbance out of its mechanism:
    P(x | pa) = sum_xi P(xi) * [f_x(pa, xi) = x]."""
    cpts = {}
    for x in range(cm.dag.n_nodes):
        pxi = cm.disturbance[x]
        card = cm.variables[x].cardinality
        tab = cm.mechanism[x].reshape(-1, pxi.size, card)
        cpts[x] = np.einsum("rjc,j->rc", tab, pxi)
    return DiscreteBayesNet(list(cm.variables), cm.dag.copy(), cpts)


# ---------------------------------------------------------------------------
# benchmark grid


def _truth_pdag(net: DiscreteBayesNet,
                truth: list[tuple[str, tuple[str, str]]]) -> Pdag:
    """CPDAG of the generative DAG with the injected latents annotated."""
    p = cpdag_of(net.dag)
    for name, (a, b) in truth:
        p.latents.append((name, (net.id_of(a), net.id_of(b))))
    return p


def _run_rep(packed):
    """One repetition: inject once, then sample/learn/evaluate every size.

    Top-level so process pools can pickle it. Returns (rep, rows) where each
    row is a flat metric dict, or (rep, message) on injection failure.
    """
    from .confounder import discover_confounders

    bn, rep, sizes, injection, learner, h, alpha = packed
    inj = replace(injection, seed=injection.seed + 1_000_003 * (rep + 1))
    try:
        injected, truth = inject_confounders(bn, inj)
    except InjectionError as exc:
        return rep, str(exc)

    observed = [v.name for v in bn.variables]
    tp = _truth_pdag(injected, truth)
    rows = []
    for s_idx, size in enumerate(sizes):
        full = sample(injected, size,
                      seed=injection.seed + 7_919 * (rep + 1) + s_idx)
        data = project(full, observed)
        result = discover_confounders(data, learner, h=h, alpha=alpha)
        conf = compare_confounders(truth, result)
        struct = compare_cpdags(tp, result.cpdag)
        rows.append({
            "size": size,
            "ok": conf.ok,
            "nok": conf.not_ok,
            "truth": len(truth),
            "cpdag_ok": struct.cpdag_ok,
            "miss": struct.miss,
            "rev": struct.rev,
            "type": struct.type_err,
            "xs": struct.xs,
            "learn_s": result.learn_seconds,
            "post_s": result.post_seconds,
        })
    return rep, rows


def run_benchmark(bn: DiscreteBayesNet, sizes: list[int], reps: int,
                  injection: InjectionConfig, learner,
                  h: int = 7, alpha: float = 0.05,
                  jobs: int = 1) -> tuple[str, list[str], list[str]]:
    """Grid over dataset sizes x repetitions.

    Each repetition injects confounders into a fresh copy of ``bn`` (seeded
    deterministically from ``injection.seed`` and the repetition index) and is
    evaluated at every size, so size columns are paired.  Returns
    ``(csv_text, failure_messages, timing_lines)``; counts in the table are
    per-repetition means, precision/recall/f1 are pooled over repetitions.
    Wall-clock timings stay out of the table so identical seeds give
    byte-identical files.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    packed = [(bn, r, sizes, injection, learner, h, alpha) for r in range(reps)]
    outcomes: dict[int, list[dict] | str] = {}
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            for rep, out in pool.map(_run_rep, packed):
                outcomes[rep] = out
    else:
        for item in packed:
            rep, out = _run_rep(item)
            outcomes[rep] = out

    failures = [f"repetition {r}: injection failed: {msg}"
                for r, msg in sorted(outcomes.items())
                if isinstance(msg, str)]
    per_size: dict[int, list[dict]] = {s: [] for s in sizes}
    for r in sorted(outcomes):
        out = outcomes[r]
        if isinstance(out, str):
            continue
        for row in out:
            per_size[row["size"]].append(row)

    def fmt(v) -> str:
        return "na" if v is None else f"{v:.4f}"

    lines = ["size,ok,nok,precision,recall,f1,cpdag_ok,miss,rev,type,xs"]
    times = []
    for size in sizes:
        rows = per_size[size]
        if not rows:
            continue
        n = len(rows)
        tot_ok = sum(r["ok"] for r in rows)
        tot_nok = sum(r["nok"] for r in rows)
        tot_truth = sum(r["truth"] for r in rows)
        precision = tot_ok / (tot_ok + tot_nok) if tot_ok + tot_nok else None
        recall = tot_ok / tot_truth if tot_truth else None
        if precision is None or recall is None or precision + recall == 0:
            f1 = None
        else:
            f1 = 2 * precision * recall / (precision + recall)
        cells = [str(size), fmt(tot_ok / n), fmt(tot_nok / n), fmt(precision),
                 fmt(recall), fmt(f1)]
        cells += [fmt(sum(r[k] for r in rows) / n)
                  for k in ("cpdag_ok", "miss", "rev", "type", "xs")]
        lines.append(",".join(cells))
        times.append(
            f"size {size}: mean learn {sum(r['learn_s'] for r in rows) / n:.2f}s,"
            f" mean post {sum(r['post_s'] for r in rows) / n:.2f}s"
            f" over {n} repetitions"
        )
    return "\n".join(lines), failures, times
