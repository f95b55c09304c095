"""Baseline solvers and oracles for the vanilla GW discrepancy.

Comparison references for the orthogonal bounds: a Frank-Wolfe local
solver on the transport polytope, eccentricity- and row-profile-based
lower bounds built from 1-D optimal transport, a dense linear-assignment
wrapper, and a brute-force permutation oracle for desk-scale instances.
All values use the tensorized normalization (uniform weights by default),
so they are directly comparable with the orthogonal-family values at
equal orders.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np
from scipy.optimize import linear_sum_assignment

from .result import DiscrepancyResult
from .spectral import _cost_array

from dataclasses import dataclass


class UnsupportedOrderError(ValueError):
    """Raised when a baseline does not support the given pair of orders."""


@dataclass(frozen=True)
class TransportPlan:
    """Nonnegative coupling with prescribed marginals."""

    T: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.T, dtype=np.float64)
        p = np.asarray(self.p, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        if T.shape != (len(p), len(q)):
            raise ValueError(f"plan shape {T.shape} does not match marginals")
        if T.size and T.min() < -1e-12:
            raise ValueError("transport plan has negative entries")
        if np.max(np.abs(T.sum(axis=1) - p)) > 1e-8 or np.max(np.abs(T.sum(axis=0) - q)) > 1e-8:
            raise ValueError("transport plan marginals do not match to 1e-8")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


def hungarian(costs):
    """Minimum-cost perfect matching on a dense square cost matrix.

    Returns ``(assignment, total)`` where ``assignment[i]`` is the column
    matched to row ``i``.
    """
    costs = np.asarray(costs, dtype=np.float64)
    if costs.ndim != 2 or costs.shape[0] != costs.shape[1]:
        raise ValueError(f"expected a square cost matrix, got {costs.shape}")
    if not np.all(np.isfinite(costs)):
        raise ValueError("cost matrix has non-finite entries")
    rows, cols = linear_sum_assignment(costs)
    total = float(costs[rows, cols].sum())
    return cols.copy(), total


def ot1d_squared(a, b) -> float:
    """Mean squared gap between two sorted equal-length samples.

    This is the squared 1-D transport cost between the two uniform
    empirical distributions when both vectors are sorted ascending.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.mean((a - b) ** 2))


def _ot1d_quantile_sq(a_sorted, b_sorted) -> float:
    # Uniform 1-D transport between samples of different sizes: expand both
    # to the lcm grid so each atom splits into equal-mass copies.
    m, n = len(a_sorted), len(b_sorted)
    lcm = math.lcm(m, n)
    a = np.repeat(a_sorted, lcm // m)
    b = np.repeat(b_sorted, lcm // n)
    return float(np.mean((a - b) ** 2))


def gw_flb(C, D) -> DiscrepancyResult:
    """Eccentricity lower bound: 1-D transport of row means.

    Eccentricity of node i is the mean of its cost row; the value is the
    squared 1-D transport cost between the two sorted eccentricity
    samples (quantile coupling when the orders differ).
    """
    t0 = time.perf_counter()
    A, B = _cost_array(C), _cost_array(D)
    ea = np.sort(A.mean(axis=1))
    eb = np.sort(B.mean(axis=1))
    if len(ea) == len(eb):
        value = ot1d_squared(ea, eb)
    else:
        value = _ot1d_quantile_sq(ea, eb)
    return DiscrepancyResult(
        value=value,
        method="gw-flb",
        bound_kind="lower",
        seconds=time.perf_counter() - t0,
    )


def gw_tlb(C, D) -> DiscrepancyResult:
    """Row-profile lower bound: 1-D transports plus an assignment.

    ``K[i, k]`` is the 1-D transport cost between sorted row i of the
    first matrix and sorted row k of the second; the value is the optimal
    assignment cost over ``K`` divided by the order.  Equal orders only.
    """
    t0 = time.perf_counter()
    A, B = _cost_array(C), _cost_array(D)
    n = A.shape[0]
    if B.shape[0] != n:
        raise UnsupportedOrderError("gw-tlb supports equal orders only")
    Asorted = np.sort(A, axis=1)
    Bsorted = np.sort(B, axis=1)
    K = ((Asorted[:, None, :] - Bsorted[None, :, :]) ** 2).mean(axis=2)
    _, total = hungarian(K)
    return DiscrepancyResult(
        value=total / n,
        method="gw-tlb",
        bound_kind="lower",
        seconds=time.perf_counter() - t0,
    )


def _uniform(k):
    return np.full(k, 1.0 / k)


def _check_marginal(v, k, name):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (k,) or v.min() < 0 or abs(v.sum() - 1.0) > 1e-8:
        raise ValueError(f"{name} is not a probability vector of length {k}")
    return v


def _fw_vertex(G, p, q, uniform_equal):
    # Linearized subproblem min <G, S> over the transport polytope.  Under
    # uniform equal marginals the minimizer is a scaled permutation (solved
    # exactly by assignment); otherwise a cost-greedy allocation over the
    # sorted linearization supplies the descent vertex.
    m, n = G.shape
    if uniform_equal:
        _, cols = linear_sum_assignment(G)
        S = np.zeros_like(G)
        S[np.arange(m), cols] = 1.0 / m
        return S
    row_rem = p.copy()
    col_rem = q.copy()
    S = np.zeros_like(G)
    for flat in np.argsort(G, axis=None, kind="stable"):
        i, k = divmod(int(flat), n)
        amount = min(row_rem[i], col_rem[k])
        if amount > 0.0:
            S[i, k] = amount
            row_rem[i] -= amount
            col_rem[k] -= amount
    return S


def gw_fw(C, D, p=None, q=None, max_iters=200, tol=1e-9, plan0=None) -> DiscrepancyResult:
    """Frank-Wolfe local solver for the GW objective on the coupling set.

    Minimizes ``sum_ijkl (C_ij - D_kl)^2 T_ik T_jl`` over couplings with
    marginals ``p`` and ``q`` (uniform by default).  Each step solves the
    linearized subproblem (gradient ``-4 C T D``), then takes the exact
    minimizer of the quadratic objective on the line segment, so the
    objective sequence is nonincreasing.  The initial plan defaults to the
    marginal outer product.
    """
    t0 = time.perf_counter()
    A, B = _cost_array(C), _cost_array(D)
    m, n = A.shape[0], B.shape[0]
    p = _uniform(m) if p is None else _check_marginal(p, m, "p")
    q = _uniform(n) if q is None else _check_marginal(q, n, "q")
    if plan0 is None:
        T = np.outer(p, q)
    else:
        T = TransportPlan(plan0, p, q).T
    uniform_equal = (
        m == n
        and np.allclose(p, 1.0 / m, atol=1e-12)
        and np.allclose(q, 1.0 / n, atol=1e-12)
    )

    const = float(p @ (A**2) @ p + q @ (B**2) @ q)

    def objective(T):
        return const - 2.0 * float(((A @ T @ B) * T).sum())

    history = [objective(T)]
    iterations = 0
    for iterations in range(1, max_iters + 1):
        G = -4.0 * (A @ T @ B)
        S = _fw_vertex(G, p, q, uniform_equal)
        Delta = S - T
        a = float((G * Delta).sum())
        b = -2.0 * float(((A @ Delta @ B) * Delta).sum())
        if a >= -1e-15:
            break
        if b > 0.0:
            gamma = min(1.0, max(0.0, -a / (2.0 * b)))
        else:
            # Concave restriction: the segment minimum sits at an endpoint.
            gamma = 1.0 if a + b < 0.0 else 0.0
        if gamma <= 0.0:
            break
        T = T + gamma * Delta
        history.append(objective(T))
        if abs(history[-2] - history[-1]) <= tol * max(1.0, abs(history[-2])):
            break

    return DiscrepancyResult(
        value=history[-1],
        method="gw-fw",
        bound_kind="upper",
        coupling=T,
        iterations=iterations,
        seconds=time.perf_counter() - t0,
        info={"plan": TransportPlan(T, p, q), "objective_trace": history},
    )


def brute_force_perm(C, D) -> DiscrepancyResult:
    """Exhaustive permutation oracle, ``min (1/n^2) ||P^T C P - D||_F^2``.

    Equal orders up to 8 only (factorial blow-up).  Returns the minimizing
    permutation both as ``info["perm"]`` (``sigma[k]`` is the row of the
    first matrix matched to node k of the second) and as a 0/1 coupling.
    """
    t0 = time.perf_counter()
    A, B = _cost_array(C), _cost_array(D)
    n = A.shape[0]
    if B.shape[0] != n:
        raise UnsupportedOrderError("brute_force_perm requires equal orders")
    if n > 8:
        raise ValueError("brute_force_perm refuses n > 8")
    best_val = np.inf
    best_perm = None
    chunk = []
    def flush(chunk, best_val, best_perm):
        P = np.asarray(chunk, dtype=np.intp)
        Ap = A[P[:, :, None], P[:, None, :]]
        vals = ((Ap - B) ** 2).sum(axis=(1, 2)) / n**2
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            return float(vals[k]), P[k]
        return best_val, best_perm
    for perm in itertools.permutations(range(n)):
        chunk.append(perm)
        if len(chunk) >= 5040:
            best_val, best_perm = flush(chunk, best_val, best_perm)
            chunk = []
    if chunk:
        best_val, best_perm = flush(chunk, best_val, best_perm)
    P = np.zeros((n, n))
    P[best_perm, np.arange(n)] = 1.0
    return DiscrepancyResult(
        value=best_val,
        method="perm-oracle",
        bound_kind="exact",
        coupling=P,
        seconds=time.perf_counter() - t0,
        info={"perm": np.asarray(best_perm, dtype=np.intp)},
    )
