"""Exact one-step distributions by enumeration, and sampler goodness-of-fit.

Every probability here is a :class:`fractions.Fraction`; distributions sum
to exactly one. The enumeration walks the full choice tree (coin pattern
and vertex at every level) of a single growth step from a fixed state.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable

import numpy as np
from scipy import stats as sps

from .core import HkParams, Multigraph
from .errors import CapacityError

DEFAULT_MAX_PATHS = 2_000_000


def as_fraction(p) -> Fraction:
    """Exact rational value of ``p`` (floats are taken at their binary value)."""
    return p if isinstance(p, Fraction) else Fraction(p)


@dataclass(frozen=True)
class RationalDist:
    mass: dict[Hashable, Fraction]

    def __post_init__(self):
        if any(q < 0 for q in self.mass.values()):
            raise ValueError("negative probability mass")
        total = sum(self.mass.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"masses sum to {total}, not 1")

    @property
    def support(self) -> list:
        return list(self.mass)

    def __getitem__(self, outcome) -> Fraction:
        return self.mass.get(outcome, Fraction(0))

    def map(self, f: Callable) -> "RationalDist":
        out: dict = {}
        for x, q in self.mass.items():
            y = f(x)
            out[y] = out.get(y, Fraction(0)) + q
        return RationalDist(out)


def _tree_bound(t: int, m: int) -> int:
    return t ** m * 2 ** (m - 1)


def exact_trace_distribution(
    g: Multigraph, params: HkParams, p=None, max_paths: int = DEFAULT_MAX_PATHS
) -> RationalDist:
    """Joint law of ``(endpoints, coins)`` for the next step from state ``g``."""
    m = params.m
    t = g.vertex_count
    bound = _tree_bound(t, m)
    if bound > max_paths:
        raise CapacityError(f"choice tree has up to {bound} leaves (> {max_paths})", bound)
    pf = as_fraction(params.p if p is None else p)
    total = 2 * m * t
    pa = [(u, Fraction(g.degree(u), total)) for u in g.vertices()]
    tf = {u: [(w, Fraction(k, g.degree(u))) for w, k in g.mult[u].items()] for u in g.vertices()}
    branches = [(0, 1 - pf), (1, pf)]
    out: dict = {}

    def walk(ys: tuple, coins: tuple, prob: Fraction) -> None:
        if len(ys) == m:
            key = (ys, coins)
            out[key] = out.get(key, Fraction(0)) + prob
            return
        for coin, pc in branches:
            if pc == 0:
                continue
            choices = tf[ys[-1]] if coin else pa
            for w, q in choices:
                walk(ys + (w,), coins + (coin,), prob * pc * q)

    for u, q in pa:
        walk((u,), (), q)
    return RationalDist(out)


def exact_step_distribution(
    g: Multigraph, params: HkParams, p=None, max_paths: int = DEFAULT_MAX_PATHS
) -> RationalDist:
    """Law of the endpoint tuple ``(Y1, ..., Ym)`` for the next step."""
    return exact_trace_distribution(g, params, p, max_paths).map(lambda k: k[0])


def marginal(dist: RationalDist, i: int) -> RationalDist:
    """Law of the ``i``-th endpoint (0-based) of a tuple distribution."""
    return dist.map(lambda ys: ys[i])


def exact_delta_degree_distribution(
    g: Multigraph, params: HkParams, v: int, p=None, max_paths: int = DEFAULT_MAX_PATHS
) -> RationalDist:
    """Law of the number of new edges vertex ``v`` receives in the next step."""
    step = exact_step_distribution(g, params, p, max_paths)
    out = {k: Fraction(0) for k in range(params.m + 1)}
    for ys, q in step.mass.items():
        out[ys.count(v)] += q
    return RationalDist(out)


def reachable_states(params: HkParams, depth: int, p=None) -> list[tuple[int, Multigraph]]:
    """Distinct graphs reachable with positive probability in ``<= depth`` steps.

    Returned as ``(steps_taken, graph)`` in breadth-first order, starting
    with the initial graph at 0.
    """
    g0 = Multigraph.initial(params.m)
    frontier = [g0]
    out = [(0, g0)]
    seen = {g0.canonical_key()}
    for level in range(1, depth + 1):
        nxt = []
        for g in frontier:
            for ys, q in exact_step_distribution(g, params, p).mass.items():
                if q == 0:
                    continue
                h = g.copy()
                h.commit(ys)
                key = h.canonical_key()
                if key not in seen:
                    seen.add(key)
                    nxt.append(h)
                    out.append((level, h))
        frontier = nxt
    return out


@dataclass
class OracleCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class OracleReport:
    m: int
    p: Fraction
    depth: int
    states: int = 0
    checks: list[OracleCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[OracleCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "p": str(self.p),
            "depth": self.depth,
            "states": self.states,
            "checks": len(self.checks),
            "failures": [{"name": c.name, "detail": c.detail} for c in self.failures()],
            "pass": self.passed,
        }


def verify_state(g: Multigraph, params: HkParams, p=None) -> list[OracleCheck]:
    """Exact identities for one state: marginals and consecutive repeats."""
    m = params.m
    t = g.vertex_count
    pf = as_fraction(params.p if p is None else p)
    step = exact_step_distribution(g, params, pf)
    label = f"t={t} edges={g.canonical_key()}"
    checks = []
    pa = {v: Fraction(g.degree(v), 2 * m * t) for v in g.vertices()}
    for i in range(m):
        got = marginal(step, i)
        bad = [(v, got[v], pa[v]) for v in g.vertices() if got[v] != pa[v]]
        checks.append(OracleCheck(
            f"marginal[{i}]", not bad,
            "" if not bad else f"{label}: (v, got, want) = {bad}",
        ))
    for i in range(1, m):
        two = step.map(lambda ys: (ys[i - 1], ys[i]))
        bad = []
        for v in g.vertices():
            stay = (1 - pf) * pa[v] + pf * Fraction(g.multiplicity(v, v), g.degree(v))
            want = pa[v] * stay
            if two[(v, v)] != want:
                bad.append((v, two[(v, v)], want))
        checks.append(OracleCheck(
            f"repeat[{i}]", not bad,
            "" if not bad else f"{label}: (v, got, want) = {bad}",
        ))
    return checks


def verify_marginals(m: int, p, depth: int) -> OracleReport:
    if depth < 0 or depth > 3:
        raise ValueError(f"depth must be in 0..3, got {depth}")
    pf = as_fraction(p)
    params = HkParams(m, float(pf))
    report = OracleReport(m=m, p=pf, depth=depth)
    for _, g in reachable_states(params, depth, pf):
        report.states += 1
        report.checks.extend(verify_state(g, params, pf))
    return report


@dataclass
class McTestReport:
    statistic: float
    dof: int
    p_value: float
    passed: bool
    n_samples: int = 0
    diagnostics: str = ""

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "dof": self.dof, "p_value": self.p_value, "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _pooled_cells(reference: RationalDist, n: int, min_expected: float) -> tuple[list[list], np.ndarray]:
    cells = sorted(((float(q) * n, x) for x, q in reference.mass.items() if q > 0),
                   key=lambda c: (-c[0], repr(c[1])))
    groups: list[list] = []
    expected: list[float] = []
    small: list = []
    small_e = 0.0
    for e, x in cells:
        if e >= min_expected:
            groups.append([x])
            expected.append(e)
        else:
            small.append(x)
            small_e += e
    if small:
        if small_e >= min_expected or not groups:
            groups.append(small)
            expected.append(small_e)
        else:
            groups[-1].extend(small)
            expected[-1] += small_e
    return groups, np.array(expected)


def mc_distribution_test(
    sampler: Callable[[], Hashable] | Iterable[Hashable],
    reference: RationalDist,
    n_samples: int,
    alpha: float = 0.01,
    min_expected: float = 5.0,
) -> McTestReport:
    """Chi-square goodness of fit of ``n_samples`` draws against ``reference``.

    ``sampler`` is either a zero-argument callable or an iterable of
    outcomes. Cells with expected count below ``min_expected`` are pooled.
    Any draw outside the support fails the test outright.
    """
    if n_samples < 10_000:
        raise ValueError(f"need at least 10^4 samples, got {n_samples}")
    if callable(sampler):
        counts = Counter(sampler() for _ in range(n_samples))
    else:
        counts = Counter(x for _, x in zip(range(n_samples), sampler))
    n = sum(counts.values())
    stray = {x: c for x, c in counts.items() if reference[x] == 0}
    if stray:
        shown = dict(list(stray.items())[:5])
        return McTestReport(float("inf"), 0, 0.0, False, n,
                            f"{sum(stray.values())} draws outside the reference support, e.g. {shown}")
    groups, expected = _pooled_cells(reference, n, min_expected)
    observed = np.array([sum(counts.get(x, 0) for x in grp) for grp in groups], dtype=float)
    dof = len(groups) - 1
    if dof < 1:
        return McTestReport(0.0, 0, 1.0, True, n, "single cell; nothing to test")
    expected = expected * (observed.sum() / expected.sum())
    stat, pval = sps.chisquare(observed, expected)
    return McTestReport(float(stat), dof, float(pval), bool(pval >= alpha), n)


def chi_square_power(reference: RationalDist, alternative: RationalDist, n: int, alpha: float) -> float:
    """Asymptotic power of the unpooled test against a fixed alternative."""
    support = [x for x, q in reference.mass.items() if q > 0]
    p = np.array([float(reference[x]) for x in support])
    q = np.array([float(alternative[x]) for x in support])
    lam = n * float(np.sum((q - p) ** 2 / p))
    dof = len(support) - 1
    crit = sps.chi2.ppf(1 - alpha, dof)
    return float(sps.ncx2.sf(crit, dof, lam))


def draws_from(dist: RationalDist, n: int, rng: np.random.Generator) -> list:
    """``n`` independent draws from ``dist`` (floating-point weights)."""
    support = dist.support
    w = np.array([float(dist[x]) for x in support])
    idx = rng.choice(len(support), size=n, p=w / w.sum())
    return [support[i] for i in idx.tolist()]
