"""Controllability rank tests, stability certificates and LQR synthesis."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import Feedback, InputSignal, NetworkParams, Zero, decay_slack
from .errors import (
    DimensionMismatch,
    IllConditioned,
    NotStabilizable,
    NumericalFailure,
    TargetResidualWarning,
)
from .graph import SignedGraph

CARE_TOL = 1e-8


@dataclass
class ControllabilityReport:
    rank: int
    n: int
    singular_values: list[float]
    tolerance: float
    controllable: bool
    sample_fraction_full_rank: float | None = None

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "n": self.n,
            "singular_values": self.singular_values,
            "tolerance": self.tolerance,
            "controllable": self.controllable,
            "sample_fraction": self.sample_fraction_full_rank,
        }


@dataclass
class StabilityCertificate:
    diagonally_dominant: bool
    gershgorin_margin: float
    max_real_eigenvalue: float
    hurwitz: bool


@dataclass
class LqrSolution:
    P: np.ndarray
    K: np.ndarray
    care_residual: float
    q_weight: np.ndarray
    r_weight: np.ndarray
    closed_loop_spectrum: np.ndarray

    def to_dict(self) -> dict:
        spec = self.closed_loop_spectrum
        return {
            "K": self.K.tolist(),
            "P": self.P.tolist(),
            "care_residual": self.care_residual,
            "closed_loop_spectrum": [[float(z.real), float(z.imag)] for z in spec],
        }


# ---------------------------------------------------------------------------
# rank


def controllability_matrix(H, B, normalize: bool = False) -> np.ndarray:
    """``[B, HB, ..., H^{N-1} B]``.

    With ``normalize`` every column is rescaled to unit 2-norm as it is
    produced (the raw power is still propagated through ``H`` from the
    rescaled column).  Column scaling leaves the rank unchanged and keeps
    the entries from growing like ``||H||^{N-1}``.
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    n = H.shape[0]
    if H.shape != (n, n) or B.shape[0] != n:
        raise DimensionMismatch(f"H is {H.shape}, B is {B.shape}")
    blocks = [B]
    cur = B
    for _ in range(n - 1):
        cur = H @ cur
        if normalize:
            norms = np.linalg.norm(cur, axis=0)
            cur = np.divide(cur, norms, out=np.zeros_like(cur), where=norms > 0)
        blocks.append(cur)
    if normalize:
        norms = np.linalg.norm(blocks[0], axis=0)
        blocks[0] = np.divide(B, norms, out=np.zeros_like(B), where=norms > 0)
    return np.hstack(blocks)


def numerical_rank(M, tol: float | None = None) -> ControllabilityReport:
    """SVD rank; default tolerance ``sigma_1 * max(M.shape) * eps``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise DimensionMismatch("empty matrix")
    try:
        sv = np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    if tol is None:
        tol = float(sv[0]) * max(M.shape) * np.finfo(float).eps if len(sv) else 0.0
    rank = int(np.sum(sv > tol))
    n = M.shape[0]
    return ControllabilityReport(
        rank=rank,
        n=n,
        singular_values=[float(s) for s in sv],
        tolerance=float(tol),
        controllable=rank == n,
    )


def _sample_weights(g: SignedGraph, p: NetworkParams, rng) -> np.ndarray:
    w = np.empty(len(g.edges))
    for k, e in enumerate(g.edges):
        lo, hi = p.bounds.interval(e.sign)
        w[k] = rng.uniform(lo, hi)
    return w


def state_matrix(A, c_n: float) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return A - c_n * np.eye(A.shape[0])


def rank_report(A, B, c_n: float) -> ControllabilityReport:
    """Rank of the column-normalised controllability matrix of ``(A - c_n I, B)``."""
    return numerical_rank(controllability_matrix(state_matrix(A, c_n), B, normalize=True))


def structural_controllability_test(
    g: SignedGraph,
    p: NetworkParams,
    samples: int = 100,
    rng_seed: int = 0,
    workers: int | None = None,
) -> ControllabilityReport:
    """Monte-Carlo check of the zero pattern of ``g``.

    Sample ``k`` draws its weights from ``default_rng([rng_seed, k])``, so the
    result does not depend on ``workers``.  The pattern is declared
    controllable when any sample is full rank; the returned report carries
    the first full-rank sample (or the last sample) plus the full-rank
    fraction.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    B = g.input_matrix()

    def one(k):
        rng = np.random.default_rng([rng_seed, k])
        A = g.weight_matrix(_sample_weights(g, p, rng))
        return rank_report(A, B, p.c_n)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, range(samples)))
    else:
        reports = [one(k) for k in range(samples)]
    full = [r for r in reports if r.controllable]
    chosen = full[0] if full else reports[-1]
    chosen.sample_fraction_full_rank = len(full) / samples
    chosen.controllable = bool(full)
    return chosen


# ---------------------------------------------------------------------------
# stability


def stability_certificate(A, c_n: float) -> StabilityCertificate:
    A = np.asarray(A, dtype=float)
    off = np.abs(A - np.diag(np.diag(A))).sum(axis=1)
    margin = float(np.min(c_n - off)) if len(off) else float(c_n)
    H = state_matrix(A, c_n)
    if np.allclose(A, A.T, atol=1e-12, rtol=0):
        top = float(np.linalg.eigvalsh(H)[-1])
    else:
        top = float(np.max(np.linalg.eigvals(H).real))
    cert = StabilityCertificate(
        diagonally_dominant=margin > 0,
        gershgorin_margin=margin,
        max_real_eigenvalue=top,
        hurwitz=top < 0,
    )
    if cert.diagonally_dominant and not cert.hurwitz:
        raise NumericalFailure(f"Gershgorin dominance with margin {margin} but eigenvalue {top}")
    return cert


def boundedness_condition(g: SignedGraph, p: NetworkParams) -> tuple[bool, float]:
    """Whether the decay rate dominates every admissible row sum, and by how much."""
    slack = decay_slack(g, p)
    return slack > 0, float(slack)


# ---------------------------------------------------------------------------
# Riccati


def _as_matrix(M, rows: int) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim == 0:
        return M * np.eye(rows)
    return np.atleast_2d(M)


def care_residual(H, B, Q, R, P) -> np.ndarray:
    G = B @ np.linalg.solve(R, B.T)
    return H.T @ P + P @ H - P @ G @ P + Q


def _lyapunov(Ac: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Solve ``Ac^T X + X Ac + C = 0`` through its Kronecker form."""
    n = Ac.shape[0]
    I = np.eye(n)
    L = np.kron(I, Ac.T) + np.kron(Ac.T, I)
    x = np.linalg.solve(L, -C.reshape(-1, order="F"))
    X = x.reshape((n, n), order="F")
    return 0.5 * (X + X.T)


def solve_care(H, B, Q, R, max_newton: int = 50) -> LqrSolution:
    """Stabilising solution of ``H^T P + P H - P B R^-1 B^T P + Q = 0``.

    The stable invariant subspace of the Hamiltonian matrix (ordered real
    Schur form) gives the initial ``P``; Newton steps on the residual, each
    a Lyapunov solve with the current closed loop, polish it below
    ``CARE_TOL``.
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    n = H.shape[0]
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    B = B.reshape(n, -1)
    m = B.shape[1]
    Q = _as_matrix(Q, n)
    R = _as_matrix(R, m)
    if H.shape != (n, n) or Q.shape != (n, n) or R.shape != (m, m):
        raise DimensionMismatch(f"H {H.shape}, B {B.shape}, Q {Q.shape}, R {R.shape}")
    G = B @ np.linalg.solve(R, B.T)
    Z = np.block([[H, -G], [-Q, -H.T]])
    T, U, sdim = scipy.linalg.schur(Z, output="real", sort="lhp")
    if sdim != n:
        raise NotStabilizable(f"Hamiltonian has {sdim} stable eigenvalues, expected {n}")
    U11, U21 = U[:n, :n], U[n:, :n]
    try:
        P = np.linalg.solve(U11.T, U21.T).T
    except np.linalg.LinAlgError as exc:
        raise NotStabilizable("stable subspace is not a graph over the state space") from exc
    P = 0.5 * (P + P.T)

    scale = max(1.0, np.abs(Q).max(initial=0.0))
    res = care_residual(H, B, Q, R, P)
    for _ in range(max_newton):
        if np.abs(res).max() <= CARE_TOL * 1e-2 * scale:
            break
        K = np.linalg.solve(R, B.T @ P)
        trial = P + _lyapunov(H - B @ K, res)
        trial = 0.5 * (trial + trial.T)
        new = care_residual(H, B, Q, R, trial)
        if np.abs(new).max() >= np.abs(res).max():
            break
        P, res = trial, new
    residual = float(np.abs(res).max())
    if residual > CARE_TOL:
        raise IllConditioned(f"CARE residual {residual:.3e} above {CARE_TOL}")
    K = np.linalg.solve(R, B.T @ P)
    spectrum = np.linalg.eigvals(H - B @ K)
    if np.max(spectrum.real) >= 0:
        raise NotStabilizable(f"closed loop has eigenvalue {spectrum[np.argmax(spectrum.real)]}")
    return LqrSolution(P, K, residual, Q, R, spectrum)


def lqr_regulate(
    g: SignedGraph,
    p: NetworkParams,
    target,
    recompute_each_slot: bool = True,
    q=None,
    r=None,
    A=None,
) -> InputSignal:
    """Feedback input ``u = u_ff - K (x - target)`` built from the current weights.

    ``u_ff`` is the least-squares solution of ``B u_ff = (c_n I - A) target``;
    a :class:`TargetResidualWarning` is issued when that system is not
    solvable exactly.  ``q`` and ``r`` default to identities.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (g.n,):
        raise DimensionMismatch(f"target has shape {target.shape}, graph has {g.n} nodes")
    B = g.input_matrix()
    Q = np.eye(g.n) if q is None else _as_matrix(q, g.n)
    R = np.eye(B.shape[1]) if r is None else _as_matrix(r, B.shape[1])

    def synthesize(Acur):
        H = state_matrix(Acur, p.c_n)
        sol = solve_care(H, B, Q, R)
        uff, *_ = np.linalg.lstsq(B, -H @ target, rcond=None)
        return sol.K, uff

    A0 = g.weight_matrix() if A is None else np.asarray(A, dtype=float)
    K, uff = synthesize(A0)
    residual = float(np.abs(state_matrix(A0, p.c_n) @ target + B @ uff).max(initial=0.0))
    if residual > 1e-12:
        warnings.warn(TargetResidualWarning(residual), stacklevel=2)
    fb = Feedback(
        K=K,
        target=target,
        feedforward=uff,
        resynthesize=synthesize if recompute_each_slot else None,
        target_residual=residual,
    )
    return InputSignal(tuple(Zero() for _ in g.control_nodes), fb)
