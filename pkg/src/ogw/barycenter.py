"""Fréchet means of graph cost matrices under the orthogonal bounds.

Block-coordinate descent alternates per-sample coupling solves with the
closed-form cost-matrix update ``C <- m * sum_i (w_i / n_i) G_i`` where
``G_i`` plays the role of ``P_i D_i P_i^T`` (assembled from the decoupled
orthogonal variables for the lower-bound variant, or from the jointly
optimized coupling for the upper-bound variant).  After each update the
iterate is symmetrized and its diagonal zeroed by the rank-one correction
``Y = -1/2 (d 1^T + 1 d^T)``, which leaves the reduced matrix untouched.
Post-processing re-pairs the optimizer's reduced eigenvalues with the
samples' eigenvectors and lifts the result back with the same correction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .graphio import CostMatrix, Graph, shortest_path_cost
from .ogw import (
    PqnOptions,
    _coupling_from_square,
    _initial_q,
    _pqn_maximize,
    build_reduced,
    recover_coupling,
)
from .spectral import _cost_array, make_projection_basis, sym_eig_desc


@dataclass
class BarycenterSpec:
    """Inputs of one barycenter run.

    ``samples`` are the cost matrices to average, ``weights`` their
    normalized nonnegative weights, ``m`` the fixed barycenter order and
    ``variant`` the bound driving the coupling solves (``"lb"`` decoupled
    closed form, ``"ub"`` projected ascent).
    """

    samples: list
    weights: np.ndarray
    m: int
    variant: str = "lb"
    outer_iters: int = 50
    seed: int | None = None
    rel_tol: float = 1e-7
    pqn: PqnOptions = field(default_factory=PqnOptions)

    def __post_init__(self):
        if self.variant not in ("lb", "ub"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.m < 2:
            raise ValueError("barycenter order must be >= 2")
        if self.outer_iters < 1:
            raise ValueError("outer_iters must be >= 1")
        if not self.samples:
            raise ValueError("at least one sample is required")
        for s in self.samples:
            if _cost_array(s).shape[0] < 2:
                raise ValueError("every sample order must be >= 2")
        self.weights = _validate_weights(self.weights, len(self.samples))


@dataclass
class BarycenterResult:
    """Optimal cost matrix with the objective trace and final couplings."""

    C_star: np.ndarray
    objective_trace: list[float]
    couplings: list[np.ndarray]
    variant: str
    iterations: int
    seconds: float


def _validate_weights(weights, k):
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (k,):
        raise ValueError(f"expected {k} weights, got shape {w.shape}")
    if w.size and w.min() < 0.0:
        raise ValueError("weights must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1 (to 1e-12)")
    return w


def _zero_diagonal_correction(Cmat):
    # C + Y with Y = -1/2 (d 1^T + 1 d^T): kills the diagonal, keeps V^T C V.
    d = np.diag(Cmat).copy()
    out = Cmat - 0.5 * (d[:, None] + d[None, :])
    np.fill_diagonal(out, 0.0)
    return out


def _coupling_matrix(Q, m, n):
    if m >= n:
        return recover_coupling(Q, m, n).P
    return recover_coupling(Q.T, n, m).P.T


def _decoupled_alignment(Carr, Darr):
    # Closed-form solves of the two decoupled terms, plus the bound value.
    # Returned Q1, Q2 are (m-1) x (n-1), oriented first-argument -> second.
    rp = build_reduced(Carr, Darr)
    wc, Pc = sym_eig_desc(rp.Chat)
    wd, Pd = sym_eig_desc(rp.Dhat_padded)
    Ue, se, Vte = np.linalg.svd(rp.Ehat_padded)
    value = rp.norm_c + rp.norm_d - rp.scale_quad * (
        float(wc @ wd) + float(se.sum()) + rp.const_term
    )
    Q1 = (Pc @ Pd.T)[:, : rp.n - 1]
    Q2 = (Ue @ Vte)[:, : rp.n - 1]
    if rp.swapped:
        Q1, Q2 = Q1.T, Q2.T
    return value, Q1, Q2


def _assemble_decoupled(Darr, Q1, Q2, m):
    # The role of P D P^T when the quadratic and linear terms carry their
    # own orthogonal variables: expansion of
    #   (1/sqrt(mn) 1 1^T + U Q V^T) D (...)^T
    # with Q1 in the congruence term and Q2 in the cross terms.
    n = Darr.shape[0]
    U = make_projection_basis(m).V
    V = make_projection_basis(n).V
    b = V.T @ Darr.sum(axis=1)
    Dh = V.T @ Darr @ V
    w = U @ (Q2 @ b)
    G = (Darr.sum() / (m * n)) * np.ones((m, m))
    G += (1.0 / np.sqrt(m * n)) * (w[:, None] + w[None, :])
    G += U @ (Q1 @ Dh @ Q1.T) @ U.T
    return (G + G.T) / 2.0


def _ub_step(Carr, Darr, warm, opts):
    rp = build_reduced(Carr, Darr)
    Q0 = warm if warm is not None else _initial_q(rp, opts)
    Q, history, _, _ = _pqn_maximize(rp.Chat, rp.Dhat_padded, rp.Ehat_padded, Q0, opts)
    value = rp.norm_c + rp.norm_d - rp.scale_quad * (rp.const_term + history[-1])
    P = _coupling_from_square(Q, rp)
    return value, P, Q


def solve_barycenter(spec: BarycenterSpec) -> BarycenterResult:
    """Block-coordinate descent on the weighted-average bound.

    Starts from a seeded random symmetric zero-diagonal matrix, alternates
    coupling solves with the closed-form cost update (diagonal re-zeroed by
    the rank-one correction each round), and stops once the objective's
    relative change drops below ``rel_tol``, the iteration budget runs out,
    or an update stops improving (in which case the previous iterate is
    kept, so the recorded trace is nonincreasing).
    """
    t0 = time.perf_counter()
    samples = [_cost_array(s) for s in spec.samples]
    weights = spec.weights
    m = spec.m
    rng = np.random.default_rng(spec.seed)
    A0 = rng.uniform(size=(m, m))
    C = (A0 + A0.T) / 2.0
    np.fill_diagonal(C, 0.0)

    warm = [None] * len(samples)
    trace: list[float] = []
    couplings: list[np.ndarray] = []
    prev_C = C
    prev_couplings: list[np.ndarray] = []
    for outer in range(spec.outer_iters):
        vals = []
        grads = []
        cpls = []
        for i, Darr in enumerate(samples):
            n_i = Darr.shape[0]
            if spec.variant == "lb":
                value, Q1, Q2 = _decoupled_alignment(C, Darr)
                G = _assemble_decoupled(Darr, Q1, Q2, m)
                P = _coupling_matrix(Q1, m, n_i)
            else:
                value, P, Qsq = _ub_step(C, Darr, warm[i], spec.pqn)
                warm[i] = Qsq
                G = P @ Darr @ P.T
            vals.append(value)
            grads.append(G / n_i)
            cpls.append(P)
        objective = float(np.dot(weights, vals))
        if trace and objective > trace[-1] + 1e-12:
            C = prev_C
            couplings = prev_couplings
            break
        trace.append(objective)
        couplings = cpls
        prev_couplings = cpls
        converged = (
            len(trace) >= 2
            and abs(trace[-2] - trace[-1]) <= spec.rel_tol * max(1.0, abs(trace[-2]))
        )
        if converged or outer == spec.outer_iters - 1:
            break
        prev_C = C
        Cnew = m * sum(w * G for w, G in zip(weights, grads))
        Cnew = (Cnew + Cnew.T) / 2.0
        C = _zero_diagonal_correction(Cnew)

    return BarycenterResult(
        C_star=C,
        objective_trace=trace,
        couplings=couplings,
        variant=spec.variant,
        iterations=len(trace),
        seconds=time.perf_counter() - t0,
    )


def _paired_indices(sigma, big_len):
    # Descending-to-descending pairing of a short spectrum against a longer
    # one, as induced by zero-padding the short side: nonnegative entries
    # take the top slots, negative entries the bottom ones.
    k = len(sigma)
    pos = int((sigma > 0).sum())
    neg = k - pos
    return np.concatenate(
        [np.arange(pos), np.arange(big_len - neg, big_len)]
    ).astype(np.intp)


def _sample_hat_square(Darr, m, sigma, R):
    n = Darr.shape[0]
    Vn = make_projection_basis(n).V
    Dh = Vn.T @ Darr @ Vn
    Dh = (Dh + Dh.T) / 2.0
    if n == m:
        return Dh
    if n < m:
        out = np.zeros((m - 1, m - 1))
        out[: n - 1, : n - 1] = Dh
        return out
    # Sample larger than the barycenter: compress its reduced eigensystem to
    # the m-1 components the descending pairing selects.  Best effort; the
    # exactness guarantee only covers samples of order <= m.
    delta, _ = sym_eig_desc(Dh)
    sel = _paired_indices(sigma, len(delta))
    return R @ np.diag(delta[sel]) @ R.T


def spectral_reconstruct(C_star, samples, weights):
    """Re-pair the optimizer's reduced eigenvalues with sample eigenvectors.

    Eigendecomposes the reduced barycenter and every reduced sample
    (zero-padded to the barycenter's size), aligns eigenvalues descending
    on both sides, and returns the weighted sum of the samples' eigenvector
    frames carrying the barycenter's eigenvalues.
    """
    Carr = _cost_array(C_star)
    m = Carr.shape[0]
    weights = _validate_weights(weights, len(samples))
    V = make_projection_basis(m).V
    Chat = V.T @ Carr @ V
    sigma, R = sym_eig_desc(Chat)
    acc = np.zeros((m - 1, m - 1))
    for w, D in zip(weights, samples):
        Dsq = _sample_hat_square(_cost_array(D), m, sigma, R)
        _, S = sym_eig_desc(Dsq)
        acc += w * (S @ np.diag(sigma) @ S.T)
    return (acc + acc.T) / 2.0


def lift_to_full(Chat_recon) -> CostMatrix:
    """Lift a reduced matrix back to full size with an exactly zero diagonal.

    ``C = V X V^T + Y`` with ``Y = -1/2 (d 1^T + 1 d^T)``, ``d`` the diagonal
    of the plain lift; since ``V^T Y V = 0``, the reduced matrix of the
    result is exactly ``X``.  Returned in distance mode when entrywise
    nonnegative (up to round-off), similarity mode otherwise.
    """
    X = np.asarray(Chat_recon, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square reduced matrix, got {X.shape}")
    m = X.shape[0] + 1
    V = make_projection_basis(m).V
    C = V @ ((X + X.T) / 2.0) @ V.T
    C = _zero_diagonal_correction(C)
    C = (C + C.T) / 2.0
    np.fill_diagonal(C, 0.0)
    mode = "distance" if (C.size == 0 or C.min() >= -1e-12) else "similarity"
    return CostMatrix(C, mode=mode)


def threshold_adjacency(C):
    """Best adjacency matrix explaining a distance-mode cost matrix.

    Candidate thresholds are the midpoints between consecutive unique
    off-diagonal values (plus the largest value, so the complete graph is
    reachable); each induces edges where the cost is at or below the
    threshold.  The winner minimizes the Frobenius gap between the input
    and the shortest-path matrix of the candidate (unreachable pairs at
    the default substitute); ties go to the smallest threshold.
    """
    arr = _cost_array(C)
    m = arr.shape[0]
    if m < 2:
        return np.zeros((m, m), dtype=np.int64), 0.0
    iu = np.triu_indices(m, 1)
    uniq = np.unique(arr[iu])
    if len(uniq) == 1:
        candidates = [float(uniq[0])]
    else:
        candidates = list((uniq[:-1] + uniq[1:]) / 2.0) + [float(uniq[-1])]
    best_adj = None
    best_t = None
    best_err = np.inf
    for t in candidates:
        adj = (arr <= t)
        np.fill_diagonal(adj, False)
        edges = frozenset(zip(*np.nonzero(np.triu(adj, 1))))
        g = Graph(n=m, edges=frozenset((int(u), int(v)) for u, v in edges))
        sp = shortest_path_cost(g).entries
        err = float(np.linalg.norm(arr - sp))
        if err < best_err:
            best_err = err
            best_adj = adj.astype(np.int64)
            best_t = float(t)
    return best_adj, best_t


@dataclass
class CoordinateRecovery:
    """Planar points locally minimizing the stress to a target matrix."""

    points: np.ndarray
    stress: float
    converged: bool


def recover_coordinates_2d(C, seed=None, max_iters=2000) -> CoordinateRecovery:
    """Recover 2-D coordinates whose distances best match a cost matrix.

    Local minimization (BFGS with analytic gradient) of
    ``sum_{i<j} (||x_i - x_j|| - C_ij)^2`` from a seeded random start.
    Recovery is at best up to rigid motion; non-convergence returns the
    best iterate with ``converged=False``.
    """
    arr = _cost_array(C)
    m = arr.shape[0]
    rng = np.random.default_rng(seed)
    scale = float(arr.mean()) if arr.size else 1.0
    x0 = rng.standard_normal((m, 2)) * (0.5 * scale + 1e-3)

    def fun(x):
        X = x.reshape(m, 2)
        diff = X[:, None, :] - X[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=-1))
        np.fill_diagonal(dist, 1.0)
        R = dist - arr
        np.fill_diagonal(R, 0.0)
        stress = 0.5 * float((R**2).sum())
        W = 2.0 * R / dist
        grad = W.sum(axis=1)[:, None] * X - W @ X
        return stress, grad.ravel()

    res = minimize(
        fun,
        x0.ravel(),
        jac=True,
        method="BFGS",
        options={"maxiter": max_iters, "gtol": 1e-12},
    )
    return CoordinateRecovery(
        points=res.x.reshape(m, 2),
        stress=float(res.fun),
        converged=bool(res.success),
    )
