"""Time the metrics stage on a random core-scale network.

    python scripts/scale_benchmark.py [--nodes 201] [--edges 4900] [--workers 1]
"""

import argparse
import random
import time

from topicnet.cooccurrence import TopicNetwork
from topicnet.louvain import louvain_partition
from topicnet.metrics import average_shortest_path_length, path_statistics, weighted_betweenness, weighted_gcc


def random_core(n, m, seed):
    rng = random.Random(seed)
    nodes = [f"C{i // 10 + 1:02d}.{i:03d}" for i in range(n)]
    pairs = [(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n)]
    return TopicNetwork(tuple(nodes), {p: rng.uniform(0.001, 1.0) for p in rng.sample(pairs, m)})


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=201)
    ap.add_argument("--edges", type=int, default=4900)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    net = random_core(args.nodes, args.edges, args.seed)
    timings = {}

    t = time.perf_counter()
    stats = path_statistics(net, args.workers)
    weighted_betweenness(net, stats=stats)
    average_shortest_path_length(net, stats=stats)
    timings["betweenness+aspl"] = time.perf_counter() - t
    t = time.perf_counter()
    louvain_partition(net, 42)
    timings["louvain"] = time.perf_counter() - t
    t = time.perf_counter()
    weighted_gcc(net)
    timings["gcc"] = time.perf_counter() - t

    print(f"{len(net.nodes)} nodes, {len(net.edges)} edges, workers={args.workers}")
    for name, secs in timings.items():
        print(f"  {name:18s} {secs:7.3f}s")
    print(f"  {'total':18s} {sum(timings.values()):7.3f}s")


if __name__ == "__main__":
    main()
