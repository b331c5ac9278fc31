"""Time the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]
"""

import argparse
import random
import statistics
import time

from abcpart import kernels
from abcpart.generators import cube, k33
from abcpart.model import ElectionInstance, normalize_profile
from abcpart.scoring import builtin_scoring, elect_scoring


def random_profile(rng, m, groups):
    raw = [(rng.sample(range(m), rng.randint(1, m // 2)), rng.randint(1, 20)) for _ in range(groups)]
    return normalize_profile(raw, m)


def timed(fn, repeat):
    samples = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def scoring_cases(rng):
    for m, k, groups in [(12, 4, 30), (16, 6, 40), (20, 8, 50)]:
        inst = ElectionInstance(random_profile(rng, m, groups), k)
        yield f"PAV m={m} k={k} groups={groups}", inst, builtin_scoring("pav", k)


def indset_cases(rng):
    for name, graph, t in [("K3,3", k33(), 3), ("Q3", cube(), 4)]:
        yield f"independent {t}-set in {name}", graph.n, graph.adjacency_masks(), t
    for n, p in [(40, 0.2), (56, 0.25)]:
        adj = [0] * n
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    adj[u] |= 1 << v
                    adj[v] |= 1 << u
        alpha = max(t for t in range(1, n + 1) if kernels.has_independent_set(n, adj, t))
        # one above the independence number forces a full search
        yield f"independent {alpha + 1}-set, random G({n}, {p})", n, adj, alpha + 1


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    if kernels.BACKEND != "cython":
        print("compiled kernels unavailable; only the fallback can be timed")
    print(f"{'case':45} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    rows = []
    for label, inst, s in scoring_cases(rng):
        py = timed(lambda: elect_scoring(inst, s, backend="python"), args.repeat)
        cy = timed(lambda: elect_scoring(inst, s), args.repeat)
        assert elect_scoring(inst, s, backend="python") == elect_scoring(inst, s)
        rows.append((label, py, cy))
    for label, n, adj, t in indset_cases(rng):
        py = timed(lambda: kernels.has_independent_set(n, adj, t, backend="python"), args.repeat)
        cy = timed(lambda: kernels.has_independent_set(n, adj, t), args.repeat)
        assert kernels.has_independent_set(n, adj, t, backend="python") == kernels.has_independent_set(n, adj, t)
        rows.append((label, py, cy))
    for label, py, cy in rows:
        print(f"{label:45} {py:10.4f} {cy:10.4f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
