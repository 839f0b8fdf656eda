"""Dominant eigenpairs: power iteration plus a dense oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock_core import ConvergenceError, FockOperator, FockSpace, FockVector

__all__ = ["EigenResult", "power_iteration", "dense_spectrum", "restricted_dominant", "DENSE_LIMIT"]

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class EigenResult:
    eigenvalue: float
    eigenvector: FockVector
    iterations: int
    residual: float
    converged: bool = True
    degenerate: bool = False


def _matrix_and_space(F):
    if isinstance(F, FockOperator):
        return F.matrix, F.space
    m = np.asarray(F)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return m, None


def _wrap(space, vec):
    if space is None:
        # bare matrices get a throwaway one-mode space
        space = FockSpace(1, len(vec) - 1) if len(vec) > 1 else None
    if space is None:
        raise ValueError("dimension-1 bare matrices are not supported")
    return FockVector(space, vec)


def _krylov_gap(m, v, w, lam):
    r = w - lam * v
    # re-orthogonalize: r is tiny, so cancellation leaves a component along v
    r = r - v * np.vdot(v, r)
    nr = np.linalg.norm(r)
    if nr == 0:
        return 0.0
    basis = np.column_stack([v, r / nr])
    h = basis.conj().T @ m @ basis
    theta = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    return float(theta[-1] - theta[0])


def power_iteration(F, start=None, tol: float = 1e-10, max_iter: int = 100_000, seed: int = 0) -> EigenResult:
    """Iterate ``v <- F v / ||F v||`` until ``||F v - lambda v|| <= tol``.

    ``F`` must be Hermitian PSD. The default start vector is the first basis
    state (``|00>`` on a two-mode space). If the iteration stalls at
    ``max_iter`` with a two-dimensional Krylov gap below 1e-8, the result is
    returned with ``degenerate=True``; otherwise :class:`ConvergenceError`
    is raised carrying the last iterate.
    """
    m, space = _matrix_and_space(F)
    n = m.shape[0]
    if start is None:
        v = np.zeros(n, dtype=m.dtype if np.iscomplexobj(m) else float)
        v[0] = 1.0
    else:
        v = np.array(start.amplitudes if isinstance(start, FockVector) else start)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("start vector is zero")
    v = v / nv
    w = m @ v
    if np.linalg.norm(w) < 1e-300:
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        w = m @ v
    lam = float(np.real(np.vdot(v, w)))
    res = float(np.linalg.norm(w - lam * v))
    it = 0
    while res > tol and it < max_iter:
        v = w / np.linalg.norm(w)
        w = m @ v
        lam = float(np.real(np.vdot(v, w)))
        res = float(np.linalg.norm(w - lam * v))
        it += 1
    result = EigenResult(lam, _wrap(space, v), it, res, converged=res <= tol)
    if result.converged:
        return result
    if _krylov_gap(m, v, w, lam) < 1e-8:
        return EigenResult(lam, result.eigenvector, it, res, converged=False, degenerate=True)
    raise ConvergenceError(f"power iteration stalled at residual {res:.3e} after {it} steps", result, res)


def dense_spectrum(F) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, descending."""
    m, _ = _matrix_and_space(F)
    if m.shape[0] > DENSE_LIMIT:
        raise ValueError(f"dimension {m.shape[0]} exceeds the dense limit {DENSE_LIMIT}")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))[::-1]


def restricted_dominant(F, basis) -> EigenResult:
    """Dominant eigenpair of ``P F P`` with ``P`` the projector onto ``span(basis)``.

    ``basis`` is a sequence of :class:`FockVector` (or a matrix whose columns
    are the basis vectors) and must be orthonormal within 1e-10.
    """
    m, space = _matrix_and_space(F)
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        b = basis
    else:
        b = np.column_stack([x.amplitudes if isinstance(x, FockVector) else np.asarray(x) for x in basis])
    if b.shape[0] != m.shape[0]:
        raise ValueError("basis vectors do not match the operator dimension")
    gram = b.conj().T @ b
    if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-10:
        raise ValueError("basis is not orthonormal")
    h = b.conj().T @ m @ b
    h = 0.5 * (h + h.conj().T)
    vals, vecs = np.linalg.eigh(h)
    y = vecs[:, -1]
    v = b @ y
    lam = float(np.real(np.vdot(v, m @ v)))
    # residual of the compressed operator P F P
    res = float(np.linalg.norm(b @ (h @ y) - lam * v))
    return EigenResult(lam, _wrap(space, v), 0, res)
