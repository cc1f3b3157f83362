"""Degree, triangle, cherry and clustering statistics.

Triangles are sets of three distinct, pairwise adjacent vertices; edge
multiplicities and self-loops do not matter for them. Cherries are counted
with multiplicities, ``C_G = sum_v C(d(v), 2)``. All counts are exact
integers; ratios are produced either as :class:`fractions.Fraction` (the
``*_exact`` helpers) or as correctly rounded floats.

Per-vertex sequences follow the :class:`~holme_kim.core.Multigraph`
convention: they are indexed by vertex label and entry 0 is unused.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import HkParams, Multigraph, StepTrace
from .errors import IntegrityError, UndefinedInputError

log = logging.getLogger(__name__)


def _pairs(d: int) -> int:
    return d * (d - 1) // 2


def count_triangles(g: Multigraph) -> tuple[int, list[int]]:
    """Return ``(total, per_vertex)``, each triangle counted once."""
    mult = g.mult
    per = [0] * (g.vertex_count + 1)
    total = 0
    for u in g.vertices():
        nu = [v for v in mult[u] if v > u]
        if len(nu) < 2:
            continue
        su = set(nu)
        for v in nu:
            for w in su.intersection(mult[v]):
                if w > v:
                    total += 1
                    per[u] += 1
                    per[v] += 1
                    per[w] += 1
    return total, per


def count_cherries(g: Multigraph) -> int:
    return sum(_pairs(len(nb)) for nb in g.nbrs[1:])


def sum_sq_degrees(g: Multigraph) -> int:
    return sum(len(nb) ** 2 for nb in g.nbrs[1:])


def local_clustering(g: Multigraph, v: int, per_vertex: Sequence[int] | None = None) -> Fraction:
    """``Delta(v) / C(d(v), 2)`` as an exact fraction."""
    d = g.degree(v)
    if d < 2:
        raise UndefinedInputError(f"local clustering undefined at vertex {v} of degree {d}")
    if per_vertex is None:
        per_vertex = count_triangles(g)[1]
    return Fraction(per_vertex[v], _pairs(d))


def clustering_coefficients_exact(g: Multigraph) -> tuple[Fraction, Fraction]:
    total, per = count_triangles(g)
    t = g.vertex_count
    if t == 0:
        raise UndefinedInputError("clustering of the empty graph is undefined")
    c_loc = sum((local_clustering(g, v, per) for v in g.vertices()), Fraction(0)) / t
    cherries = count_cherries(g)
    if cherries == 0:
        log.warning("graph has no cherries; global clustering set to 0")
        return c_loc, Fraction(0)
    return c_loc, Fraction(3 * total, cherries)


def _c_loc_float(per: Sequence[int], degs: Sequence[int], t: int) -> float:
    # degs and per are both indexed by vertex label
    return math.fsum(per[v] / _pairs(degs[v]) for v in range(1, t + 1) if per[v]) / t


def clustering_coefficients(g: Multigraph) -> tuple[float, float]:
    """``(c_loc, c_glo)`` as floats, computed from exact integer counts."""
    t = g.vertex_count
    if t == 0:
        raise UndefinedInputError("clustering of the empty graph is undefined")
    degs = [0] + g.degrees()
    low = next((v for v in g.vertices() if degs[v] < 2), None)
    if low is not None:
        raise UndefinedInputError(f"vertex {low} has degree {degs[low]} < 2")
    total, per = count_triangles(g)
    cherries = count_cherries(g)
    if cherries == 0:
        log.warning("graph has no cherries; global clustering set to 0")
        c_glo = 0.0
    else:
        c_glo = 3 * total / cherries
    return _c_loc_float(per, degs, t), c_glo


def edges_among_neighbors(g: Multigraph, v: int) -> int:
    """Edges (with multiplicity, self-loops once) inside ``Gamma(v) \\ {v}``."""
    mult = g.mult
    nb = set(mult[v])
    nb.discard(v)
    total = 0
    for a in nb:
        ma = mult[a]
        total += ma.get(a, 0) // 2
        for b, k in ma.items():
            if b > a and b in nb:
                total += k
    return total


@dataclass(frozen=True)
class StatsSnapshot:
    t: int
    degree_hist: dict[int, int]
    triangles: int
    cherries: int
    sum_sq_degrees: int
    c_loc: float
    c_glo: float
    max_degree: int
    tf_steps_total: int = 0
    m: int | None = None
    p: float | None = None
    seed: int | None = None
    per_vertex_triangles: tuple[int, ...] | None = field(default=None, repr=False)

    def counts(self) -> tuple:
        """Everything exact, for equality checks between computation routes."""
        return (
            self.t,
            tuple(sorted(self.degree_hist.items())),
            self.triangles,
            self.cherries,
            self.sum_sq_degrees,
            self.max_degree,
            self.per_vertex_triangles,
        )

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "m": self.m,
            "p": self.p,
            "seed": self.seed,
            "c_loc": self.c_loc,
            "c_glo": self.c_glo,
            "triangles": self.triangles,
            "cherries": self.cherries,
            "sum_sq_degrees": self.sum_sq_degrees,
            "max_degree": self.max_degree,
            "tf_steps": self.tf_steps_total,
            "degree_hist": {str(d): n for d, n in sorted(self.degree_hist.items())},
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, obj: dict) -> "StatsSnapshot":
        return cls(
            t=obj["t"],
            degree_hist={int(d): n for d, n in obj["degree_hist"].items()},
            triangles=obj["triangles"],
            cherries=obj["cherries"],
            sum_sq_degrees=obj["sum_sq_degrees"],
            c_loc=obj["c_loc"],
            c_glo=obj["c_glo"],
            max_degree=obj["max_degree"],
            tf_steps_total=obj["tf_steps"],
            m=obj["m"],
            p=obj["p"],
            seed=obj["seed"],
        )


SNAPSHOT_KEYS = tuple(StatsSnapshot(0, {}, 0, 0, 0, 0.0, 0.0, 0).to_dict())


def snapshot_from_graph(
    g: Multigraph,
    params: HkParams | None = None,
    tf_steps: int = 0,
    per_vertex: bool = True,
) -> StatsSnapshot:
    """Batch computation of every statistic from scratch."""
    t = g.vertex_count
    degs = [0] + g.degrees()
    hist: dict[int, int] = {}
    for d in degs[1:]:
        hist[d] = hist.get(d, 0) + 1
    total, per = count_triangles(g)
    cherries = count_cherries(g)
    c_glo = 3 * total / cherries if cherries else 0.0
    return StatsSnapshot(
        t=t,
        degree_hist=dict(sorted(hist.items())),
        triangles=total,
        cherries=cherries,
        sum_sq_degrees=sum_sq_degrees(g),
        c_loc=_c_loc_float(per, degs, t) if t else 0.0,
        c_glo=c_glo,
        max_degree=max(degs),
        tf_steps_total=tf_steps,
        m=params.m if params else None,
        p=params.p if params else None,
        seed=params.seed if params else None,
        per_vertex_triangles=tuple(per) if per_vertex else None,
    )


class IncrementalStats:
    """Running statistics of one growth sequence, updated once per step.

    :meth:`update` must be given each step's trace together with the graph
    *before* that step is committed.
    """

    def __init__(self, params: HkParams):
        m = params.m
        self.params = params
        self.m = m
        self.t = 1
        self.deg = [0, 2 * m]
        self.tri = [0, 0]
        self.hist = {2 * m: 1}
        self.triangles = 0
        self.cherries = _pairs(2 * m)
        self.sum_sq = 4 * m * m
        self.max_degree = 2 * m
        self.tf_steps = 0

    def update(self, step: StepTrace, g_before: Multigraph) -> "IncrementalStats":
        t = self.t
        if step.time != t + 1 or g_before.vertex_count != t or g_before.total_degree != 2 * self.m * t:
            raise IntegrityError(
                f"stats at t={t} cannot absorb step {step.time} on a graph with "
                f"{g_before.vertex_count} vertices"
            )
        ys = step.endpoints
        cnt: dict[int, int] = {}
        for y in ys:
            cnt[y] = cnt.get(y, 0) + 1
        tri = self.tri
        added = 0
        if len(cnt) > 1:
            distinct = list(cnt)
            mult = g_before.mult
            for i, a in enumerate(distinct):
                ma = mult[a]
                for b in distinct[i + 1:]:
                    if b in ma:
                        added += 1
                        tri[a] += 1
                        tri[b] += 1
        tri.append(added)
        self.triangles += added

        deg, hist = self.deg, self.hist
        for y, k in cnt.items():
            d = deg[y]
            n = hist[d] - 1
            if n:
                hist[d] = n
            else:
                del hist[d]
            nd = d + k
            hist[nd] = hist.get(nd, 0) + 1
            deg[y] = nd
            self.sum_sq += (2 * d + k) * k
            self.cherries += d * k + _pairs(k)
            if nd > self.max_degree:
                self.max_degree = nd
        m = self.m
        deg.append(m)
        hist[m] = hist.get(m, 0) + 1
        self.sum_sq += m * m
        self.cherries += _pairs(m)
        self.tf_steps += sum(step.coins)
        self.t = t + 1
        return self

    def c_loc(self) -> float:
        return _c_loc_float(self.tri, self.deg, self.t)

    def c_glo(self) -> float:
        return 3 * self.triangles / self.cherries if self.cherries else 0.0

    def local_clustering(self, v: int) -> Fraction:
        return Fraction(self.tri[v], _pairs(self.deg[v]))

    def snapshot(self, per_vertex: bool = True) -> StatsSnapshot:
        return StatsSnapshot(
            t=self.t,
            degree_hist=dict(sorted(self.hist.items())),
            triangles=self.triangles,
            cherries=self.cherries,
            sum_sq_degrees=self.sum_sq,
            c_loc=self.c_loc(),
            c_glo=self.c_glo(),
            max_degree=self.max_degree,
            tf_steps_total=self.tf_steps,
            m=self.m,
            p=self.params.p,
            seed=self.params.seed,
            per_vertex_triangles=tuple(self.tri) if per_vertex else None,
        )


def incremental_update(stats: IncrementalStats, step: StepTrace, g_before: Multigraph) -> IncrementalStats:
    return stats.update(step, g_before)
