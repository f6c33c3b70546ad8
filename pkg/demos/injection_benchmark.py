"""Small end-to-end run of the synthetic confounder benchmark.

Loads the shipped 20-node network, shows what one confounder injection
looks like (who the hidden parents latch onto, and the dependence
thresholds their channels had to clear), then runs a reduced benchmark
grid and prints the metric table.

The full-size grid used for acceptance runs 10 repetitions at 5000 and
50000 rows; this demo trims that to stay interactive.

Run:  python3 demos/injection_benchmark.py [assets/child.json]
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from latentdag import (  # noqa: E402
    InjectionConfig,
    LearnerConfig,
    bn_from_json,
    dependence_thresholds,
    inject_confounders,
    run_benchmark,
)

ASSET = pathlib.Path(__file__).resolve().parent.parent / "assets" / "net20.json"


def main() -> None:
    path = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else ASSET
    bn = bn_from_json(path.read_text())
    print(f"network: {path.name}, {bn.dag.n_nodes} nodes,"
          f" {len(bn.dag.arcs())} arcs")

    thr_mi, thr_cmi = dependence_thresholds(bn)
    print(f"dependence thresholds: marginal {thr_mi:.4f},"
          f" conditional {thr_cmi:.4f}")

    injected, truth = inject_confounders(
        bn, InjectionConfig(n_confounders=2, latent_cardinality=2, seed=3)
    )
    for name, (a, b) in truth:
        print(f"injected {name}: hidden parent of {a} and {b}")
    print()

    print("reduced grid: 3 repetitions, 2000 and 20000 rows")
    csv_text, failures, timings = run_benchmark(
        bn, [2000, 20000], reps=3,
        injection=InjectionConfig(n_confounders=2, latent_cardinality=2, seed=3),
        learner=LearnerConfig(),
    )
    print()
    print(csv_text)
    for line in failures:
        print(line)
    for line in timings:
        print(line)


if __name__ == "__main__":
    main()
