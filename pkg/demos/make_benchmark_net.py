"""Generate the 20-node binary benchmark network shipped as assets/net20.json.

Design notes
------------
The net is built to exercise the full benchmark pipeline:

* All variables are Boolean.  Conditional tables are "noisy gate" style:
  each node picks a monotone Boolean function of its parents (identity,
  NOT, OR, AND, NOR, NAND) and fires with probability ``hi`` when the gate
  is on and ``1 - hi`` otherwise.  Monotone gates keep every arc visible
  in the marginals -- there is no cancellation across parent configs, so
  structure learning at benchmark sample sizes recovers the skeleton
  reliably and genuinely-adjacent pairs stay inseparable.

* A handful of closed triangles (grandparent -> parent -> child plus the
  shortcut arc) give the confounder detector real shielded cliques that
  must be classified as genuine, and give the admissibility thresholds a
  nonzero conditional-dependence component.

* Leaf "stub" children hanging off shared parents create sibling pairs
  that are *not* adjacent.  Their conditional mutual information given
  the union of their parents is exactly zero, which keeps the dependence
  thresholds low enough that confounder injection (whose children are
  redrawn from a bounded mixture family) can meet them.

Run:  python3 demos/make_benchmark_net.py [seed]
Writes assets/net20.json and prints summary statistics.
"""

import itertools
import json
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from latentdag import (  # noqa: E402
    Dag,
    DiscreteBayesNet,
    VariableMeta,
    bn_to_json,
    dependence_thresholds,
)

N = 20
SEED = 20250817


def gate(kind, bits):
    if kind == "id":
        return bits[0]
    if kind == "not":
        return 1 - bits[0]
    if kind == "or":
        return 1 if (bits[0] or bits[1]) else 0
    if kind == "and":
        return 1 if (bits[0] and bits[1]) else 0
    if kind == "nor":
        return 0 if (bits[0] or bits[1]) else 1
    return 0 if (bits[0] and bits[1]) else 1  # nand


def build(seed):
    rng = np.random.default_rng(seed)
    parents = {i: [] for i in range(N)}

    # spine: every node after the first two hangs off a recent ancestor
    for i in range(1, 12):
        lo = max(0, i - 5)
        parents[i] = [int(rng.integers(lo, i))]

    # close three triangles: child takes its parent's parent as well
    closed = 0
    for i in range(2, 12):
        p = parents[i][0]
        if parents[p] and closed < 3 and rng.random() < 0.6:
            g = parents[p][0]
            if g not in parents[i]:
                parents[i] = sorted(parents[i] + [g])
                closed += 1

    # stubs: leaves 12..19 attach to internal hubs, making sibling pairs
    hubs = [int(rng.integers(0, 10)) for _ in range(4)]
    for j, i in enumerate(range(12, N)):
        parents[i] = [hubs[j % len(hubs)]]

    arcs = [(p, i) for i in range(N) for p in parents[i]]
    names = [f"V{i:02d}" for i in range(N)]
    dag = Dag.from_arcs(N, arcs, names=names)

    cpts = {}
    for i in range(N):
        ps = parents[i]
        if not ps:
            p1 = rng.uniform(0.35, 0.65)
            cpts[i] = np.array([[1 - p1, p1]])
            continue
        kinds = ["id", "not"] if len(ps) == 1 else ["or", "and", "nor", "nand"]
        kind = kinds[int(rng.integers(len(kinds)))]
        # stubs get a weaker channel to dilute the admissibility thresholds
        hi = rng.uniform(0.66, 0.74) if i >= 14 else rng.uniform(0.78, 0.86)
        table = np.empty((2 ** len(ps), 2))
        for cfg, bits in enumerate(itertools.product((0, 1), repeat=len(ps))):
            p1 = hi if gate(kind, bits) else 1 - hi
            table[cfg] = [1 - p1, p1]
        cpts[i] = table

    vs = [VariableMeta(nm, ("false", "true")) for nm in names]
    return DiscreteBayesNet(vs, dag, cpts)


def summarize(bn):
    adj = {(u, v) for u, v in bn.dag.arcs()} | {(v, u) for u, v in bn.dag.arcs()}
    tri = sum(
        1
        for a, b, c in itertools.combinations(range(N), 3)
        if (a, b) in adj and (b, c) in adj and (a, c) in adj
    )
    sibs = {
        tuple(sorted((x, y)))
        for p in range(N)
        for x, y in itertools.combinations(
            [c for q, c in bn.dag.arcs() if q == p], 2
        )
    }
    eligible = sum(1 for x in range(N) if 1 <= len(bn.dag.parents(x)) <= 2)
    thr_mi, thr_cmi = dependence_thresholds(bn)
    print(
        f"arcs={len(bn.dag.arcs())} triangles={tri} sibling_pairs={len(sibs)} "
        f"eligible={eligible}"
    )
    print(f"thr_mi={thr_mi:.4f} thr_cmi={thr_cmi:.4f}")


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else SEED
    bn = build(seed)
    summarize(bn)
    out = pathlib.Path(__file__).resolve().parent.parent / "assets" / "net20.json"
    out.write_text(json.dumps(json.loads(bn_to_json(bn)), indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
