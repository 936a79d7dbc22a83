#!/usr/bin/env python3
"""Desk-scale evaluation on one random DAG.

Generates G(n, m), samples positive/negative/random query sets against an
exact oracle, times the selected algorithms over them, and prints the bench
table followed by the observation breakdown of each index run.

Example:
    python scripts/desk_eval.py --n 4096 --m 16384 --queries 2000
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from reachidx import (
    IndexParams,
    bench,
    build_oracle,
    gen_queries,
    gen_random_dag,
    standard_algorithms,
    stats_report,
)


@dataclass
class EvalConfig:
    n: int = 4096
    m: int = 16384
    graph_seed: int = 0
    query_seed: int = 1
    queries: int = 2000
    params: IndexParams = field(default_factory=IndexParams)
    algos: list[str] = field(default_factory=lambda: ["index+pbibfs", "matrix"])
    kinds: list[str] = field(default_factory=lambda: ["positive", "negative", "random"])
    reps: int = 3
    index_seeds: list[int] = field(default_factory=lambda: [0, 1, 2])


def run(cfg: EvalConfig) -> None:
    g = gen_random_dag(cfg.n, cfg.m, cfg.graph_seed)
    oracle = build_oracle(g)
    sets = [
        gen_queries(g, kind, cfg.queries, cfg.query_seed + i, oracle)
        for i, kind in enumerate(cfg.kinds)
    ]
    algos = standard_algorithms(cfg.algos, cfg.params)
    report = bench(g, algos, sets, cfg.reps, cfg.index_seeds)
    print(report.to_tsv(), end="")
    for (algo, label), stats in sorted(report.stats.items()):
        print()
        print(stats_report(stats, query_set=f"{algo}:{label}"), end="")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--m", type=int, default=16384)
    ap.add_argument("--graph-seed", type=int, default=0)
    ap.add_argument("--query-seed", type=int, default=1)
    ap.add_argument("--queries", type=int, default=2000)
    ap.add_argument("--t", type=int, default=4)
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--p", type=int, default=75)
    ap.add_argument("--h", type=int, default=8)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--index-seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument(
        "--algos",
        nargs="+",
        default=["index+pbibfs", "matrix"],
        help="any of: matrix bfs index+pbibfs index+bibfs index+bfs",
    )
    ap.add_argument(
        "--kinds", nargs="+", default=["positive", "negative", "random"]
    )
    a = ap.parse_args()
    run(
        EvalConfig(
            n=a.n,
            m=a.m,
            graph_seed=a.graph_seed,
            query_seed=a.query_seed,
            queries=a.queries,
            params=IndexParams(t=a.t, k=a.k, p=a.p, h=a.h),
            algos=a.algos,
            kinds=a.kinds,
            reps=a.reps,
            index_seeds=a.index_seeds,
        )
    )


if __name__ == "__main__":
    main()
