"""Experiment workbench: random DAGs, query sets, benchmarking, statistics.

Timing follows a fixed discipline: every repetition shuffles the query set
with its own permutation, a monotonic clock wraps the whole sequential query
loop, deterministic algorithms aggregate by median over repetitions, and
seeded algorithms by mean over seeds.  Answers are verified against expected
bits in a separate untimed pass; a mismatch is a hard error, not a statistic.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable, Sequence

import numpy as np

from .baselines import (
    DEFAULT_MATRIX_CAP,
    CapacityError,
    bfs_query,
    build_matrix,
)
from .graph import DiGraph, GraphFormatError
from .index import (
    IndexParams,
    ObservationStats,
    RESOLVERS,
    _substream,
    build_index,
    query,
    serialize_index,
)

QUERY_KINDS = ("positive", "negative", "random", "mixed")


class InfeasibleError(RuntimeError):
    """Rejection sampling exhausted its budget (no pair of the asked kind)."""


class AnswerMismatchError(RuntimeError):
    """A benchmarked algorithm disagreed with an expected query bit."""


def gen_random_dag(n: int, m: int, seed: int) -> DiGraph:
    """Uniform G(n, m) DAG: m distinct vertex pairs, each edge oriented from
    the smaller to the larger id."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    max_m = n * (n - 1) // 2
    if m > max_m:
        raise CapacityError(f"m={m} exceeds n(n-1)/2={max_m}")
    if m == 0:
        return DiGraph.from_edges(n, [])
    ranks = random.Random(seed).sample(range(max_m), m)
    r = np.array(ranks, dtype=np.int64)
    # unrank lexicographic pair index: S(u) = u*(2n-1-u)/2 pairs start below u
    nn = 2 * n - 1
    u = ((nn - np.sqrt((nn * nn - 8 * r).astype(np.float64))) / 2).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    for _ in range(3):  # undo float rounding; off by at most one
        s_u = u * (nn - u) // 2
        u = np.where(s_u > r, u - 1, u)
        s_u = u * (nn - u) // 2
        u = np.where((u + 1) * (nn - u - 1) // 2 <= r, u + 1, u)
    s_u = u * (nn - u) // 2
    v = r - s_u + u + 1
    if not ((u < v).all() and (v < n).all() and (u >= 0).all()):
        raise AssertionError("pair unranking out of range")
    return DiGraph.from_edges(n, zip(u.tolist(), v.tolist()))


@dataclass
class QuerySet:
    pairs: list[tuple[int, int]]
    kind: str
    seed: int
    expected: list[bool] | None = None
    name: str = ""

    @property
    def label(self) -> str:
        return self.name or self.kind


def gen_queries(
    g: DiGraph,
    kind: str,
    count: int,
    seed: int,
    oracle: Callable[[int, int], bool] | None = None,
) -> QuerySet:
    """Rejection-sample `count` non-trivial pairs of the requested kind.

    positive/negative filter through the oracle; random takes any s != t
    (expected bits filled when an oracle is supplied); mixed concatenates a
    fresh positive and a fresh negative set of `count` each, shuffled.
    The sampler gives up after n(n-1) consecutive rejections.
    """
    if kind not in QUERY_KINDS:
        raise ValueError(f"unknown query kind {kind!r}")
    if kind == "mixed":
        pos = gen_queries(g, "positive", count, _substream(seed, "mix-pos"), oracle)
        neg = gen_queries(g, "negative", count, _substream(seed, "mix-neg"), oracle)
        merged = list(zip(pos.pairs + neg.pairs, pos.expected + neg.expected))
        random.Random(_substream(seed, "mix-shuffle")).shuffle(merged)
        pairs = [pq for pq, _ in merged]
        expected = [e for _, e in merged]
        return QuerySet(pairs, "mixed", seed, expected)
    if kind in ("positive", "negative") and oracle is None:
        raise ValueError(f"{kind} query generation needs an oracle")
    n = g.n
    budget = n * (n - 1)
    rng = random.Random(seed)
    pairs: list[tuple[int, int]] = []
    expected: list[bool] | None = [] if kind != "random" or oracle else None
    misses = 0
    while len(pairs) < count:
        if misses >= budget:
            raise InfeasibleError(
                f"no acceptable {kind} pair after {misses} consecutive attempts"
            )
        s = rng.randrange(n) if n else 0
        t = rng.randrange(n) if n else 0
        if n < 2 or s == t:
            misses += 1
            continue
        if kind == "random":
            pairs.append((s, t))
            if expected is not None:
                expected.append(oracle(s, t))
            misses = 0
            continue
        ans = oracle(s, t)
        if ans != (kind == "positive"):
            misses += 1
            continue
        pairs.append((s, t))
        expected.append(ans)
        misses = 0
    return QuerySet(pairs, kind, seed, expected)


def build_oracle(
    g: DiGraph, cap_bytes: int = DEFAULT_MATRIX_CAP
) -> Callable[[int, int], bool]:
    """Exact oracle: full matrix when it fits the cap, else per-pair BFS."""
    try:
        mx = build_matrix(g, cap_bytes)
    except CapacityError:
        return lambda s, t: bfs_query(g, s, t)
    return mx.query


# ---------------------------------------------------------------------------
# query files


def load_query_file(path: str) -> list[tuple[int, int, bool | None]]:
    """Lines 's t' with an optional expected bit; '#' starts a comment."""
    out: list[tuple[int, int, bool | None]] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 's t [expected]', got {line!r}"
                )
            try:
                s, t = int(parts[0]), int(parts[1])
                exp = None
                if len(parts) == 3:
                    if parts[2] not in ("0", "1"):
                        raise ValueError
                    exp = parts[2] == "1"
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: bad token") from None
            out.append((s, t, exp))
    return out


def save_query_set(
    qs: QuerySet, f: IO[str], original_ids: Sequence[int] | None = None
) -> None:
    ids = original_ids or range(max((max(p) for p in qs.pairs), default=-1) + 1)
    expected = qs.expected or [None] * len(qs.pairs)
    for (s, t), exp in zip(qs.pairs, expected):
        if exp is None:
            f.write(f"{ids[s]} {ids[t]}\n")
        else:
            f.write(f"{ids[s]} {ids[t]} {int(exp)}\n")


# ---------------------------------------------------------------------------
# benchmarking


@dataclass
class BuiltAlgorithm:
    answer: Callable[[int, int], bool]
    build_ms: float
    index_bytes: int
    run_with_stats: Callable[[Iterable[tuple[int, int]]], ObservationStats] | None = None


@dataclass
class Algorithm:
    name: str
    seeded: bool
    build: Callable[[DiGraph, int], BuiltAlgorithm]


def standard_algorithms(
    names: Iterable[str],
    params: IndexParams | None = None,
    matrix_cap: int = DEFAULT_MATRIX_CAP,
) -> list[Algorithm]:
    """Known algorithm names: matrix, bfs, index+pbibfs, index+bibfs, index+bfs."""
    out = []
    for name in names:
        if name == "matrix":

            def build_mx(g: DiGraph, _seed: int) -> BuiltAlgorithm:
                t0 = time.perf_counter()
                mx = build_matrix(g, matrix_cap)
                ms = (time.perf_counter() - t0) * 1e3
                return BuiltAlgorithm(mx.query, ms, g.n * ((g.n + 7) // 8))

            out.append(Algorithm("matrix", False, build_mx))
        elif name == "bfs":

            def build_bfs(g: DiGraph, _seed: int) -> BuiltAlgorithm:
                return BuiltAlgorithm(lambda s, t: bfs_query(g, s, t), 0.0, 0)

            out.append(Algorithm("bfs", False, build_bfs))
        elif name.startswith("index+") and name.removeprefix("index+") in RESOLVERS:
            resolver = RESOLVERS[name.removeprefix("index+")]

            def build_ix(
                g: DiGraph, seed: int, _resolver=resolver
            ) -> BuiltAlgorithm:
                t0 = time.perf_counter()
                ix = build_index(g, params, seed)
                ms = (time.perf_counter() - t0) * 1e3
                nbytes = len(serialize_index(ix))

                def answer(s: int, t: int) -> bool:
                    return query(ix, s, t, _resolver).answer

                def run_with_stats(pairs: Iterable[tuple[int, int]]) -> ObservationStats:
                    st = ObservationStats(track_overlap=True)
                    for s, t in pairs:
                        query(ix, s, t, _resolver, st)
                    return st

                return BuiltAlgorithm(answer, ms, nbytes, run_with_stats)

            out.append(Algorithm(name, True, build_ix))
        else:
            raise ValueError(f"unknown algorithm {name!r}")
    return out


@dataclass
class BenchRow:
    algorithm: str
    query_set: str
    n_queries: int
    avg_us: float | None
    aggregation: str
    build_ms: float
    index_bytes: int
    fallback_rate: float | None


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    stats: dict[tuple[str, str], ObservationStats] = field(default_factory=dict)

    COLUMNS = (
        "algorithm",
        "query_set",
        "n_queries",
        "avg_us",
        "aggregation",
        "build_ms",
        "index_bytes",
        "fallback_rate",
    )

    def to_tsv(self) -> str:
        lines = ["\t".join(self.COLUMNS)]
        for r in self.rows:
            lines.append(
                "\t".join(
                    (
                        r.algorithm,
                        r.query_set,
                        str(r.n_queries),
                        f"{r.avg_us:.3f}" if r.avg_us is not None else "undefined",
                        r.aggregation,
                        f"{r.build_ms:.3f}",
                        str(r.index_bytes),
                        f"{r.fallback_rate:.6f}" if r.fallback_rate is not None else "-",
                    )
                )
            )
        return "\n".join(lines) + "\n"


def _timed_pass(
    built: BuiltAlgorithm, pairs: list[tuple[int, int]], shuffle_seed: int
) -> float:
    order = list(pairs)
    random.Random(shuffle_seed).shuffle(order)
    fn = built.answer
    t0 = time.perf_counter()
    for s, t in order:
        fn(s, t)
    return time.perf_counter() - t0


def _verify(built: BuiltAlgorithm, qs: QuerySet, algo: str) -> None:
    if qs.expected is None:
        return
    fn = built.answer
    for (s, t), exp in zip(qs.pairs, qs.expected):
        if exp is not None and fn(s, t) != exp:
            raise AnswerMismatchError(
                f"{algo} answered {not exp} for ({s}, {t}) on {qs.label!r}, "
                f"expected {exp}"
            )


def bench(
    g: DiGraph,
    algorithms: Sequence[Algorithm],
    query_sets: Sequence[QuerySet],
    repetitions: int = 5,
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
) -> BenchReport:
    report = BenchReport()
    for algo in algorithms:
        if algo.seeded:
            builds = [(seed, algo.build(g, seed)) for seed in seeds]
            aggregation = f"mean({len(seeds)} seeds)"
        else:
            builds = [(0, algo.build(g, 0))]
            aggregation = f"median({repetitions} reps)"
        for qs in query_sets:
            times: list[float] = []
            for seed, built in builds:
                _verify(built, qs, algo.name)
                if not qs.pairs:
                    continue
                if algo.seeded:
                    times.append(
                        _timed_pass(built, qs.pairs, _substream(qs.seed, "shuffle", seed))
                    )
                else:
                    for rep in range(repetitions):
                        times.append(
                            _timed_pass(
                                built, qs.pairs, _substream(qs.seed, "shuffle", rep)
                            )
                        )
            if qs.pairs and times:
                total = (
                    statistics.fmean(times) if algo.seeded else statistics.median(times)
                )
                avg_us = total / len(qs.pairs) * 1e6
            else:
                avg_us = None
            fallback_rate = None
            first = builds[0][1]
            if first.run_with_stats is not None and qs.pairs:
                st = first.run_with_stats(qs.pairs)
                report.stats[(algo.name, qs.label)] = st
                fallback_rate = st.fallback_rate
            report.rows.append(
                BenchRow(
                    algorithm=algo.name,
                    query_set=qs.label,
                    n_queries=len(qs.pairs),
                    avg_us=avg_us,
                    aggregation=aggregation,
                    build_ms=statistics.fmean(b.build_ms for _, b in builds),
                    index_bytes=builds[0][1].index_bytes,
                    fallback_rate=fallback_rate,
                )
            )
    return report


# ---------------------------------------------------------------------------
# statistics report


def _tag_sort_key(tag: str) -> tuple[int, str]:
    test, _, obs = tag.partition(":")
    return (int(test), obs)


def stats_report(stats: ObservationStats, query_set: str = "-") -> str:
    """TSV: first-hit rows per test:observation, overlap rows per observation,
    then summary totals.  Shares are fractions of all queries."""
    lines = ["query_set\tsection\ttest\tobservation\tcount\tshare"]
    total = stats.queries or 1
    for tag in sorted(stats.first_hit, key=_tag_sort_key):
        test, _, obs = tag.partition(":")
        count = stats.first_hit[tag]
        lines.append(
            f"{query_set}\tfirst_hit\t{test}\t{obs}\t{count}\t{count / total:.6f}"
        )
    for obs in sorted(stats.overlap):
        count = stats.overlap[obs]
        lines.append(f"{query_set}\toverlap\t-\t{obs}\t{count}\t{count / total:.6f}")
    lines.append(
        f"{query_set}\tsummary\t-\tqueries\t{stats.queries}\t1.000000"
    )
    rate = stats.fallback_rate
    lines.append(
        f"{query_set}\tsummary\t-\tfallbacks\t{stats.fallbacks}\t"
        + (f"{rate:.6f}" if rate is not None else "-")
    )
    for outcome in ("reachable", "unreachable"):
        count = stats.outcomes.get(outcome, 0)
        lines.append(
            f"{query_set}\tsummary\t-\t{outcome}\t{count}\t{count / total:.6f}"
        )
    return "\n".join(lines) + "\n"
