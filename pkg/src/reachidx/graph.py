"""Directed-graph core: adjacency storage, file ingestion, SCC condensation,
weakly connected components, and topological levels.

Vertices are dense integers 0..n-1.  All containers here are immutable by
convention after construction and safe for concurrent readers.
"""

from __future__ import annotations

import zlib
from collections import deque
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np


class GraphFormatError(ValueError):
    """Malformed graph, query, or remap file."""


class AcyclicityError(ValueError):
    """An operation that requires a DAG was handed a cyclic graph."""


class DiGraph:
    """Simple directed graph (no self-loops, no parallel edges).

    Neighbor lists are kept sorted so that equal graphs have identical
    representations regardless of edge input order.
    """

    __slots__ = ("out_adj", "in_adj", "n", "m")

    def __init__(self, out_adj: Iterable[Iterable[int]]):
        out: list[list[int]] = [sorted(nbrs) for nbrs in out_adj]
        n = len(out)
        inn: list[list[int]] = [[] for _ in range(n)]
        m = 0
        for u, nbrs in enumerate(out):
            prev = -1
            for v in nbrs:
                if not 0 <= v < n:
                    raise ValueError(f"edge target {v} out of range 0..{n - 1}")
                if v == u:
                    raise ValueError(f"self-loop at vertex {u}")
                if v == prev:
                    raise ValueError(f"parallel edge ({u}, {v})")
                prev = v
                inn[v].append(u)
            m += len(nbrs)
        # in_adj ends up sorted because u increases monotonically above
        self.out_adj = out
        self.in_adj = inn
        self.n = n
        self.m = m

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DiGraph":
        out: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not 0 <= u < n:
                raise ValueError(f"edge source {u} out of range 0..{n - 1}")
            out[u].append(v)
        return cls(out)

    def reverse(self) -> "DiGraph":
        return DiGraph(self.in_adj)

    def edges(self) -> Iterable[tuple[int, int]]:
        for u, nbrs in enumerate(self.out_adj):
            for v in nbrs:
                yield u, v

    def __repr__(self) -> str:  # pragma: no cover
        return f"DiGraph(n={self.n}, m={self.m})"


def graph_checksum(g: DiGraph) -> int:
    """CRC32 over a canonical little-endian encoding of (n, m, adjacency)."""
    h = zlib.crc32(np.array([g.n, g.m], dtype="<u8").tobytes())
    if g.n:
        degs = np.fromiter((len(x) for x in g.out_adj), dtype="<u4", count=g.n)
        h = zlib.crc32(degs.tobytes(), h)
    if g.m:
        flat = np.fromiter(
            (v for nbrs in g.out_adj for v in nbrs), dtype="<u4", count=g.m
        )
        h = zlib.crc32(flat.tobytes(), h)
    return h


# ---------------------------------------------------------------------------
# parsing


@dataclass
class ParseResult:
    graph: DiGraph
    original_ids: list[int]  # dense id -> original id
    id_map: dict[int, int]  # original id -> dense id
    dropped_self_loops: int = 0
    dropped_duplicates: int = 0

    @property
    def is_sparse(self) -> bool:
        return self.original_ids != list(range(len(self.original_ids)))


def _clean_lines(lines: Iterable[str]) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        yield lineno, line


def parse_edge_list(lines: Iterable[str]) -> ParseResult:
    """One edge per line as two whitespace-separated decimal ids."""
    raw_edges: list[tuple[int, int]] = []
    ids: set[int] = set()
    for lineno, line in _clean_lines(lines):
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id") from None
        raw_edges.append((u, v))
        ids.add(u)
        ids.add(v)
    original_ids = sorted(ids)
    id_map = {orig: i for i, orig in enumerate(original_ids)}
    return _finish_parse(len(original_ids), raw_edges, original_ids, id_map)


def parse_gra(lines: Iterable[str]) -> ParseResult:
    """Adjacency format: vertex count first, then one 'i: j1 j2 ... #' line per vertex.

    An optional literal header line before the count is tolerated and skipped.
    """
    it = iter(_clean_lines(lines))
    try:
        lineno, line = next(it)
    except StopIteration:
        raise GraphFormatError("empty gra file") from None
    if not line.lstrip("-").isdigit():
        # tolerated header line, e.g. a tool name
        try:
            lineno, line = next(it)
        except StopIteration:
            raise GraphFormatError("gra file ends before vertex count") from None
    try:
        n = int(line)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: bad vertex count {line!r}") from None
    if n < 0:
        raise GraphFormatError(f"line {lineno}: negative vertex count")

    raw_edges: list[tuple[int, int]] = []
    seen = bytearray(n)
    count = 0
    for lineno, line in it:
        head, sep, rest = line.partition(":")
        if not sep:
            raise GraphFormatError(f"line {lineno}: expected 'i: ... #'")
        try:
            u = int(head)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: bad vertex id {head!r}") from None
        if not 0 <= u < n:
            raise GraphFormatError(
                f"line {lineno}: vertex {u} inconsistent with declared count {n}"
            )
        if seen[u]:
            raise GraphFormatError(f"line {lineno}: duplicate adjacency line for {u}")
        seen[u] = 1
        count += 1
        parts = rest.split()
        if not parts or parts[-1] != "#":
            raise GraphFormatError(f"line {lineno}: adjacency not terminated by '#'")
        for tok in parts[:-1]:
            try:
                v = int(tok)
            except ValueError:
                raise GraphFormatError(
                    f"line {lineno}: bad neighbor id {tok!r}"
                ) from None
            if not 0 <= v < n:
                raise GraphFormatError(
                    f"line {lineno}: neighbor {v} inconsistent with declared count {n}"
                )
            raw_edges.append((u, v))
    if count != n:
        raise GraphFormatError(f"expected {n} adjacency lines, found {count}")
    original_ids = list(range(n))
    id_map = {i: i for i in range(n)}
    return _finish_parse(n, raw_edges, original_ids, id_map)


def _finish_parse(
    n: int,
    raw_edges: list[tuple[int, int]],
    original_ids: list[int],
    id_map: dict[int, int],
) -> ParseResult:
    self_loops = 0
    dups = 0
    kept: set[tuple[int, int]] = set()
    for u, v in raw_edges:
        du = id_map[u]
        dv = id_map[v]
        if du == dv:
            self_loops += 1
            continue
        if (du, dv) in kept:
            dups += 1
            continue
        kept.add((du, dv))
    g = DiGraph.from_edges(n, kept)
    return ParseResult(g, original_ids, id_map, self_loops, dups)


def parse_graph(lines: Iterable[str], fmt: str) -> ParseResult:
    if fmt == "edge-list":
        return parse_edge_list(lines)
    if fmt == "gra":
        return parse_gra(lines)
    raise ValueError(f"unknown graph format {fmt!r}")


def load_graph(path: str, fmt: str | None = None) -> ParseResult:
    """Parse a graph file; the format is sniffed from the suffix unless given."""
    if fmt is None:
        fmt = "gra" if str(path).endswith(".gra") else "edge-list"
    with open(path, "r", encoding="utf-8") as f:
        return parse_graph(f, fmt)


def write_edge_list(g: DiGraph, f: IO[str], original_ids: list[int] | None = None) -> None:
    ids = original_ids or range(g.n)
    for u, v in g.edges():
        f.write(f"{ids[u]} {ids[v]}\n")


def write_gra(g: DiGraph, f: IO[str]) -> None:
    f.write(f"{g.n}\n")
    for u in range(g.n):
        nbrs = " ".join(str(v) for v in g.out_adj[u])
        f.write(f"{u}: {nbrs} #\n" if nbrs else f"{u}: #\n")


def write_remap(res: ParseResult, f: IO[str]) -> None:
    """Two-column 'original dense' table for sparse-id inputs."""
    for dense, orig in enumerate(res.original_ids):
        f.write(f"{orig} {dense}\n")


# ---------------------------------------------------------------------------
# components and levels


@dataclass
class CondensationMap:
    scc_of: list[int]  # original vertex -> SCC id
    dag: DiGraph  # condensation
    rep_of: list[int]  # SCC id -> representative original vertex


def scc_condense(g: DiGraph) -> CondensationMap:
    """Tarjan condensation; non-recursive to avoid Python's recursion limit."""
    n = g.n
    UNVISITED = -1
    index = [UNVISITED] * n
    low = [0] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    scc_of = [-1] * n
    rep_of: list[int] = []
    next_index = 0
    out = g.out_adj

    for root in range(n):
        if index[root] != UNVISITED:
            continue
        work: list[list[int]] = [[root, 0]]
        while work:
            frame = work[-1]
            v, ci = frame
            if ci == 0:
                index[v] = low[v] = next_index
                next_index += 1
                stack.append(v)
                on_stack[v] = 1
            nbrs = out[v]
            pushed = False
            while ci < len(nbrs):
                w = nbrs[ci]
                ci += 1
                if index[w] == UNVISITED:
                    frame[1] = ci
                    work.append([w, 0])
                    pushed = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                if low[v] < low[pv]:
                    low[pv] = low[v]
            if low[v] == index[v]:
                cid = len(rep_of)
                rep_of.append(v)
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    scc_of[w] = cid
                    if w == v:
                        break

    dag_edges: set[tuple[int, int]] = set()
    for u in range(n):
        cu = scc_of[u]
        for v in out[u]:
            cv = scc_of[v]
            if cu != cv:
                dag_edges.add((cu, cv))
    dag = DiGraph.from_edges(len(rep_of), dag_edges)
    return CondensationMap(scc_of, dag, rep_of)


def weak_components(g: DiGraph) -> list[int]:
    """Component ids, dense in order of first discovery from vertex 0 upward."""
    comp = [-1] * g.n
    c = 0
    for start in range(g.n):
        if comp[start] != -1:
            continue
        comp[start] = c
        dq = deque((start,))
        while dq:
            u = dq.popleft()
            for v in g.out_adj[u]:
                if comp[v] == -1:
                    comp[v] = c
                    dq.append(v)
            for v in g.in_adj[u]:
                if comp[v] == -1:
                    comp[v] = c
                    dq.append(v)
        c += 1
    return comp


@dataclass
class LevelAssignment:
    fwd: list[int]  # longest-path distance from any source
    bwd: list[int]  # longest-path distance to any sink
    fwd_max: int
    bwd_max: int


def _kahn_levels(out_adj: list[list[int]], in_adj: list[list[int]]) -> list[int]:
    n = len(out_adj)
    indeg = [len(x) for x in in_adj]
    level = [0] * n
    dq = deque(v for v in range(n) if indeg[v] == 0)
    seen = 0
    while dq:
        u = dq.popleft()
        seen += 1
        nxt = level[u] + 1
        for v in out_adj[u]:
            if level[v] < nxt:
                level[v] = nxt
            indeg[v] -= 1
            if indeg[v] == 0:
                dq.append(v)
    if seen != n:
        raise AcyclicityError("graph contains a cycle; levels undefined")
    return level


def topological_levels(g: DiGraph) -> LevelAssignment:
    fwd = _kahn_levels(g.out_adj, g.in_adj)
    bwd = _kahn_levels(g.in_adj, g.out_adj)
    return LevelAssignment(fwd, bwd, max(fwd, default=0), max(bwd, default=0))
