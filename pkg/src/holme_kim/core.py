"""Multigraph state and the Holme-Kim growth process.

Vertices are labelled ``1..t``. Vertex 1 starts with ``m`` self-loops so
that the total degree equals ``2 m t`` at every time ``t``. A self-loop
adds 2 to the degree of its vertex and 2 to ``e(v, v)``; with this
convention ``sum_u e(v, u) == d(v)`` and the neighbour kernel used for
triad formation is a proper probability distribution.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from itertools import groupby
from typing import Callable, Iterable, Iterator, NamedTuple, TextIO

from .errors import InvariantError, ResourceError
from .rng import HkRng, coin_threshold

MAX_STEPS = 1 << 31


@dataclass(frozen=True)
class HkParams:
    m: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError(f"seed must fit in 64 bits, got {self.seed!r}")


class StepTrace(NamedTuple):
    """Choices made while adding vertex ``time``.

    ``endpoints[i]`` is the i-th chosen endpoint and ``coins[i-1]`` the coin
    flipped before choosing it (1 = triad formation), for ``i >= 1``.
    """

    time: int
    endpoints: tuple[int, ...]
    coins: tuple[int, ...]

    @property
    def tf_count(self) -> int:
        return sum(self.coins)


class Multigraph:
    """Growing undirected multigraph with self-loops.

    ``endpoints`` lists both ends of every edge (a self-loop contributes its
    vertex twice), so a uniform element of it is a degree-biased vertex.
    ``nbrs[v]`` is the neighbour multiset of ``v`` in insertion order and
    ``mult[v]`` maps each neighbour to ``e(v, u)``. Index 0 is unused.
    """

    __slots__ = ("endpoints", "nbrs", "mult")

    def __init__(self) -> None:
        self.endpoints: list[int] = []
        self.nbrs: list[list[int]] = [[]]
        self.mult: list[dict[int, int]] = [{}]

    @classmethod
    def initial(cls, m: int) -> "Multigraph":
        g = cls()
        g.nbrs.append([1] * (2 * m))
        g.mult.append({1: 2 * m})
        g.endpoints.extend([1] * (2 * m))
        return g

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: int | None = None) -> "Multigraph":
        """Build an arbitrary multigraph on ``1..n`` from ``(u, v)`` pairs."""
        edges = list(edges)
        if n is None:
            n = max((max(u, v) for u, v in edges), default=0)
        g = cls()
        for _ in range(n):
            g.nbrs.append([])
            g.mult.append({})
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range 1..{n}")
            g._add_edge(u, v)
        return g

    def _add_edge(self, u: int, v: int) -> None:
        self.endpoints.append(u)
        self.endpoints.append(v)
        if u == v:
            self.nbrs[u] += (u, u)
            self.mult[u][u] = self.mult[u].get(u, 0) + 2
        else:
            self.nbrs[u].append(v)
            self.nbrs[v].append(u)
            self.mult[u][v] = self.mult[u].get(v, 0) + 1
            self.mult[v][u] = self.mult[v].get(u, 0) + 1

    @property
    def vertex_count(self) -> int:
        return len(self.nbrs) - 1

    @property
    def total_degree(self) -> int:
        return len(self.endpoints)

    @property
    def edge_count(self) -> int:
        return len(self.endpoints) // 2

    def degree(self, v: int) -> int:
        return len(self.nbrs[v])

    def degrees(self) -> list[int]:
        return [len(nb) for nb in self.nbrs[1:]]

    def multiplicity(self, u: int, v: int) -> int:
        """``e(u, v)``; for ``u == v`` this is twice the number of self-loops."""
        return self.mult[u].get(v, 0)

    def neighbors(self, v: int) -> set[int]:
        return set(self.mult[v])

    def vertices(self) -> range:
        return range(1, len(self.nbrs))

    def edges(self) -> Iterator[tuple[int, int]]:
        """Each edge once as ``(u, v)`` with ``u <= v``, ordered by ``u``."""
        for u in self.vertices():
            for v, k in self.mult[u].items():
                if v > u:
                    for _ in range(k):
                        yield u, v
                elif v == u:
                    for _ in range(k // 2):
                        yield u, u

    def commit(self, targets: Iterable[int]) -> int:
        """Add vertex ``t + 1`` joined to each of ``targets`` (repeats allowed)."""
        new = len(self.nbrs)
        nl: list[int] = []
        md: dict[int, int] = {}
        endpoints, nbrs, mult = self.endpoints, self.nbrs, self.mult
        for y in targets:
            endpoints.append(new)
            endpoints.append(y)
            nbrs[y].append(new)
            my = mult[y]
            my[new] = my.get(new, 0) + 1
            nl.append(y)
            md[y] = md.get(y, 0) + 1
        nbrs.append(nl)
        mult.append(md)
        return new

    def copy(self) -> "Multigraph":
        g = Multigraph()
        g.endpoints = list(self.endpoints)
        g.nbrs = [list(nb) for nb in self.nbrs]
        g.mult = [dict(mu) for mu in self.mult]
        return g

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.edges()))

    def __repr__(self) -> str:
        return f"Multigraph(t={self.vertex_count}, edges={self.edge_count})"


def new_initial(params: HkParams) -> Multigraph:
    return Multigraph.initial(params.m)


def sample_pa(g: Multigraph, rng: HkRng) -> int:
    """Vertex ``u`` with probability ``d(u) / (2 m t)``."""
    ep = g.endpoints
    return ep[(rng.word() * len(ep)) >> 64]


def sample_tf(g: Multigraph, prev: int, rng: HkRng) -> int:
    """Neighbour ``u`` of ``prev`` with probability ``e(prev, u) / d(prev)``."""
    nb = g.nbrs[prev]
    if not nb:
        raise ValueError(f"vertex {prev} has no neighbours")
    return nb[(rng.word() * len(nb)) >> 64]


def sample_step(g: Multigraph, params: HkParams, rng: HkRng, *, _thr: int | None = None) -> StepTrace:
    """Draw the ``m`` endpoints for vertex ``t + 1`` from the frozen state ``g``.

    Nothing is written to ``g``; see :func:`grow_step`.
    """
    m = params.m
    thr = coin_threshold(params.p) if _thr is None else _thr
    w = rng.words(2 * m - 1)
    ep = g.endpoints
    n = len(ep)
    y = ep[(w[0] * n) >> 64]
    ys = [y]
    coins = []
    nbrs = g.nbrs
    for k in range(1, 2 * m - 1, 2):
        if w[k] < thr:
            nb = nbrs[y]
            y = nb[(w[k + 1] * len(nb)) >> 64]
            coins.append(1)
        else:
            y = ep[(w[k + 1] * n) >> 64]
            coins.append(0)
        ys.append(y)
    return StepTrace(len(nbrs), tuple(ys), tuple(coins))


def grow_step(g: Multigraph, params: HkParams, rng: HkRng) -> StepTrace:
    trace = sample_step(g, params, rng)
    g.commit(trace.endpoints)
    return trace


def generate(
    params: HkParams,
    T: int,
    trace_sink: Callable[[StepTrace], None] | None = None,
    rng: HkRng | None = None,
) -> Multigraph:
    """Run the process up to time ``T`` (``T = 1`` is the initial graph)."""
    if not isinstance(T, int) or T < 1:
        raise ValueError(f"T must be a positive integer, got {T!r}")
    if T > MAX_STEPS:
        raise ValueError(f"T={T} exceeds the supported maximum {MAX_STEPS}")
    if rng is None:
        rng = HkRng(params.seed)
    thr = coin_threshold(params.p)
    try:
        g = new_initial(params)
        for _ in range(T - 1):
            trace = sample_step(g, params, rng, _thr=thr)
            g.commit(trace.endpoints)
            if trace_sink is not None:
                trace_sink(trace)
    except MemoryError as exc:
        raise ResourceError(f"out of memory while growing to T={T}") from exc
    return g


def check_hk_invariants(g: Multigraph, m: int) -> None:
    """Raise :class:`InvariantError` unless ``g`` looks like a valid HK state."""
    t = g.vertex_count
    degs = g.degrees()
    problems = []
    if sum(degs) != 2 * m * t or g.total_degree != 2 * m * t:
        problems.append(f"total degree {sum(degs)} != 2mt = {2 * m * t}")
    if g.edge_count != m * t:
        problems.append(f"edge count {g.edge_count} != mt = {m * t}")
    if degs and min(degs) < m:
        problems.append(f"min degree {min(degs)} < m = {m}")
    for v in g.vertices():
        mv = g.mult[v]
        if sum(mv.values()) != degs[v - 1]:
            problems.append(f"vertex {v}: multiplicities do not sum to degree")
        for u, k in mv.items():
            if u != v and g.mult[u].get(v) != k:
                problems.append(f"asymmetric multiplicity between {u} and {v}")
        if len(problems) > 10:
            break
    if problems:
        raise InvariantError("; ".join(problems))


EDGE_HEADER = ("t", "u", "v")


def iter_edge_rows(g: Multigraph) -> Iterator[tuple[int, int, int]]:
    """Rows ``(step, new_vertex, endpoint)`` in step order, then choice order.

    The first ``m`` entries of ``nbrs[v]`` for ``v >= 2`` are exactly the
    endpoints chosen when ``v`` was added, in choice order.
    """
    if g.vertex_count == 0:
        return
    loops = g.mult[1].get(1, 0) // 2
    for _ in range(loops):
        yield 1, 1, 1
    m = loops
    for v in range(2, g.vertex_count + 1):
        for y in g.nbrs[v][:m]:
            yield v, v, y


def write_edge_csv(g: Multigraph, out: str | os.PathLike | TextIO) -> None:
    if isinstance(out, (str, os.PathLike)):
        try:
            with open(out, "w", newline="", encoding="utf-8") as fh:
                write_edge_csv(g, fh)
        except OSError as exc:
            raise OSError(f"cannot write edge list to {os.fspath(out)!r}: {exc}") from exc
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(EDGE_HEADER)
    w.writerows(iter_edge_rows(g))


def read_edge_csv(src: str | os.PathLike | TextIO) -> tuple[Multigraph, int]:
    """Rebuild a graph written by :func:`write_edge_csv`; returns ``(g, m)``."""
    if isinstance(src, (str, os.PathLike)):
        try:
            with open(src, newline="", encoding="utf-8") as fh:
                return read_edge_csv(fh)
        except OSError as exc:
            raise OSError(f"cannot read edge list {os.fspath(src)!r}: {exc}") from exc
    reader = csv.reader(src)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != EDGE_HEADER:
        raise ValueError(f"expected header {','.join(EDGE_HEADER)}, got {header!r}")
    rows = [(int(a), int(b), int(c)) for a, b, c in reader]
    m = sum(1 for r in rows if r[0] == 1)
    if m < 1 or any(r != (1, 1, 1) for r in rows[:m]):
        raise ValueError("edge list must start with the self-loops of vertex 1")
    g = Multigraph.initial(m)
    for t, group in groupby(rows[m:], key=lambda r: r[0]):
        targets = []
        for _, u, v in group:
            if u != t or not 1 <= v < t:
                raise ValueError(f"row ({t},{u},{v}) is not a growth edge")
            targets.append(v)
        if t != g.vertex_count + 1 or len(targets) != m:
            raise ValueError(f"step {t}: expected {m} edges from vertex {g.vertex_count + 1}")
        g.commit(targets)
    return g, m


def edge_csv_text(g: Multigraph) -> str:
    buf = io.StringIO()
    write_edge_csv(g, buf)
    return buf.getvalue()
