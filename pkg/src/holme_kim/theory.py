"""Closed-form reference quantities and deterministic recurrences.

The normalising products are evaluated through log-gamma at extended
precision and rounded once, so they neither overflow nor lose accuracy at
``t ~ 1e9``:

    phi(t)    = prod_{s=1}^{t-1} (1 + 1/(2s)) = G(t + 1/2) / (G(3/2) G(t))
    psi_d(t)  = prod_{s=d}^{t-1} (1 - d/(2s)) = G(t - d/2) G(d) / (G(d/2) G(t))
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

_DPS = 40


def _check_time(t: int, name: str = "t", lo: int = 1) -> None:
    if not isinstance(t, (int, np.integer)) or t < lo:
        raise ValueError(f"{name} must be an integer >= {lo}, got {t!r}")


def log_phi(t: int) -> float:
    _check_time(t)
    with mpmath.workdps(_DPS):
        x = mpmath.loggamma(t + mpmath.mpf(0.5)) - mpmath.loggamma(t) - mpmath.loggamma(mpmath.mpf(1.5))
        return float(x)


def phi(t: int) -> float:
    """Degree normaliser: ``E[d_{t+1}(j) | G_t] = (phi(t+1)/phi(t)) d_t(j)``."""
    _check_time(t)
    with mpmath.workdps(_DPS):
        x = mpmath.loggamma(t + mpmath.mpf(0.5)) - mpmath.loggamma(t) - mpmath.loggamma(mpmath.mpf(1.5))
        return float(mpmath.exp(x))


def log_psi(d: int, t: int) -> float:
    _check_time(d, "d")
    _check_time(t)
    if t < d:
        raise ValueError(f"psi_d(t) needs t >= d, got d={d}, t={t}")
    half = mpmath.mpf(d) / 2
    with mpmath.workdps(_DPS):
        x = (mpmath.loggamma(t - half) - mpmath.loggamma(t)
             + mpmath.loggamma(d) - mpmath.loggamma(half))
        return float(x)


def psi(d: int, t: int) -> float:
    return math.exp(log_psi(d, t))


def expected_degree_factor(t: int) -> float:
    _check_time(t)
    return 1.0 + 1.0 / (2 * t)


def _check_degree(m: int, d: int) -> None:
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if d < m:
        raise ValueError(f"no vertex has degree {d} < m = {m}")


def power_law_limit_exact(m: int, d: int) -> Fraction:
    """Limit of ``E[N_t(d)] / t``: ``2 m (m+1) / (d (d+1) (d+2))``.

    This is the solution of ``D_m = 2/(m+2)``,
    ``D_d = D_{d-1} (d-1)/(d+2)``; it sums to 1 over ``d >= m``.
    """
    _check_degree(m, d)
    return Fraction(2 * m * (m + 1), d * (d + 1) * (d + 2))


def power_law_limit(m: int, d: int) -> float:
    _check_degree(m, d)
    return 2.0 * m * (m + 1) / (float(d) * (d + 1) * (d + 2))


def power_law_tail(m: int, d: int) -> Fraction:
    """``sum_{k > d} D_k``, which telescopes to ``m (m+1) / ((d+1)(d+2))``."""
    _check_degree(m, d)
    return Fraction(m * (m + 1), (d + 1) * (d + 2))


def cherry_law_constant(m: int) -> Fraction:
    """Limit in probability of ``C_t / (t ln t)``."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    return Fraction(m * (m + 1), 2)


@dataclass(frozen=True)
class RecurrenceSpec:
    """``a_{t+1} = (1 - b_t / t) a_t + c_t`` started from ``a_{t_init} = a_init``.

    Callers are expected to supply ``b_t -> b > 0`` and ``c_t -> c``; this is
    not checked.
    """

    b_seq: Callable[[int], float]
    c_seq: Callable[[int], float]
    a_init: float = 0.0
    t_init: int = 1


def solve_recurrence(spec: RecurrenceSpec, T: int) -> tuple[np.ndarray, float]:
    """Iterate to time ``T``; returns ``(a[t_init..T], a_T / T)``."""
    if T <= spec.t_init:
        raise ValueError(f"T={T} must exceed t_init={spec.t_init}")
    out = np.empty(T - spec.t_init + 1)
    a = float(spec.a_init)
    out[0] = a
    b, c = spec.b_seq, spec.c_seq
    for k, t in enumerate(range(spec.t_init, T), start=1):
        a = (1.0 - b(t) / t) * a + c(t)
        if not math.isfinite(a):
            raise ArithmeticError(f"recurrence diverged at t={t + 1}: a={a}")
        out[k] = a
    return out, a / T


def constant_recurrence_limit(b: float, c: float) -> float:
    return c / (1.0 + b)
