"""Truncated Fock-space linear algebra.

Conventions (used by every other module):

* hbar = 1, ``Q = (a + a^dag)/sqrt(2)``, ``P = (a - a^dag)/(i sqrt(2))``,
  so the vacuum has ``<Q^2> = <P^2> = 1/2``.
* Each mode keeps the photon numbers ``0..cutoff`` (inclusive).
* Multi-mode index ordering is big-endian: mode 0 is the slowest index,
  i.e. ``|n0, n1, ...>`` sits at ``numpy.ravel_multi_index((n0, n1, ...), shape)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.special import eval_genlaguerre, gammaln

__all__ = [
    "FockSpace",
    "FockOperator",
    "FockVector",
    "ConvergenceError",
    "CutoffError",
    "TruncationWarning",
    "identity",
    "make_annihilation",
    "make_creation",
    "make_number",
    "make_quadratures",
    "tensor",
    "basis_vector",
    "coherent_amplitudes",
    "coherent_state",
    "displacement",
    "expm_action",
    "expm_multiply",
    "tail_mass",
]

HERMITIAN_TOL = 1e-12
MAX_DIMENSION = 20_000


class TruncationWarning(UserWarning):
    """Raised (as a warning) when a state loses noticeable norm to the cutoff."""


class CutoffError(ValueError):
    """The truncated space is too small for the requested computation."""

    def __init__(self, message, tail_mass=None):
        super().__init__(message)
        self.tail_mass = tail_mass


class ConvergenceError(RuntimeError):
    """An iterative routine ran out of budget.

    ``result`` holds the best iterate available and ``residual`` its residual.
    """

    def __init__(self, message, result=None, residual=None):
        super().__init__(message)
        self.result = result
        self.residual = residual


@dataclass(frozen=True)
class FockSpace:
    """Description of a truncated ``mode_count``-mode Fock space."""

    mode_count: int
    cutoff: int

    def __post_init__(self):
        if int(self.mode_count) != self.mode_count or not 1 <= self.mode_count <= 3:
            raise ValueError(f"mode_count must be 1, 2 or 3, got {self.mode_count}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValueError(f"cutoff must be a positive integer, got {self.cutoff}")
        if self.dim > MAX_DIMENSION:
            raise ValueError(f"dimension {self.dim} exceeds the guard of {MAX_DIMENSION}")

    @property
    def levels(self) -> int:
        return self.cutoff + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.levels,) * self.mode_count

    @property
    def dim(self) -> int:
        return self.levels**self.mode_count

    def index(self, occupation: Sequence[int]) -> int:
        occupation = tuple(int(n) for n in occupation)
        if len(occupation) != self.mode_count:
            raise ValueError(f"expected {self.mode_count} occupation numbers")
        return int(np.ravel_multi_index(occupation, self.shape))

    def occupations(self) -> np.ndarray:
        """Array of shape ``(dim, mode_count)`` listing every basis state."""
        grids = np.indices(self.shape).reshape(self.mode_count, -1)
        return grids.T.copy()

    def total_photons(self) -> np.ndarray:
        return self.occupations().sum(axis=1)

    def check_mode(self, mode: int) -> int:
        if not 0 <= mode < self.mode_count:
            raise IndexError(f"mode {mode} out of range for {self.mode_count} mode(s)")
        return int(mode)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense matrix acting on a :class:`FockSpace`."""

    space: FockSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {m.shape} does not match dimension {self.space.dim}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            _check_same_space(self.space, other.space)
            return FockOperator(self.space, self.matrix @ other.matrix)
        if isinstance(other, FockVector):
            _check_same_space(self.space, other.space)
            return FockVector(self.space, self.matrix @ other.amplitudes)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        _check_same_space(self.space, other.space)
        return FockOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        _check_same_space(self.space, other.space)
        return FockOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return FockOperator(self.space, scalar * self.matrix)

    __rmul__ = __mul__

    @property
    def dag(self) -> "FockOperator":
        return FockOperator(self.space, self.matrix.conj().T)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() <= tol

    def expectation(self, state: "FockVector") -> complex:
        _check_same_space(self.space, state.space)
        v = state.amplitudes
        return complex(np.vdot(v, self.matrix @ v))

    def element(self, bra: Sequence[int], ket: Sequence[int]) -> complex:
        return complex(self.matrix[self.space.index(bra), self.space.index(ket)])

    def compress(self, indices) -> np.ndarray:
        """Sub-matrix on the listed basis indices."""
        idx = np.asarray(indices, dtype=int)
        return self.matrix[np.ix_(idx, idx)]

    def real_if_close(self) -> "FockOperator":
        return FockOperator(self.space, np.real_if_close(self.matrix, tol=1000))


@dataclass(frozen=True, eq=False)
class FockVector:
    """State vector on a :class:`FockSpace`."""

    space: FockSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.amplitudes)
        if v.shape != (self.space.dim,):
            raise ValueError(f"amplitude shape {v.shape} does not match dimension {self.space.dim}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockVector":
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return FockVector(self.space, self.amplitudes / n)

    def inner(self, other: "FockVector") -> complex:
        """``<self|other>``."""
        _check_same_space(self.space, other.space)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "FockVector") -> float:
        return abs(self.inner(other)) ** 2

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.space.shape)

    @classmethod
    def from_tensor(cls, space: FockSpace, tensor_amplitudes) -> "FockVector":
        return cls(space, np.asarray(tensor_amplitudes).reshape(space.dim))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _check_same_space(a: FockSpace, b: FockSpace):
    if a != b:
        raise ValueError(f"incompatible spaces {a} and {b}")


def _single_mode_annihilation(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels, dtype=float)), 1)


def _embed(single: np.ndarray, space: FockSpace, mode: int) -> np.ndarray:
    mode = space.check_mode(mode)
    eye = np.eye(space.levels)
    out = np.ones((1, 1))
    for k in range(space.mode_count):
        out = np.kron(out, single if k == mode else eye)
    return out


def identity(space: FockSpace) -> FockOperator:
    return FockOperator(space, np.eye(space.dim))


def make_annihilation(space: FockSpace, mode: int = 0) -> FockOperator:
    """Annihilation operator on ``mode``: ``<n-1|a|n> = sqrt(n)``."""
    return FockOperator(space, _embed(_single_mode_annihilation(space.levels), space, mode))


def make_creation(space: FockSpace, mode: int = 0) -> FockOperator:
    return make_annihilation(space, mode).dag


def make_number(space: FockSpace, mode: int = 0) -> FockOperator:
    return FockOperator(space, _embed(np.diag(np.arange(space.levels, dtype=float)), space, mode))


def make_quadratures(space: FockSpace, mode: int = 0) -> tuple[FockOperator, FockOperator]:
    """Return ``(Q, P)`` for ``mode`` with vacuum variance 1/2.

    ``[Q, P] = i`` holds exactly except in the last row/column (the top
    Fock level), where the truncation breaks the commutator.
    """
    a = _single_mode_annihilation(space.levels)
    q = (a + a.T) / math.sqrt(2)
    p = (a - a.T) / (1j * math.sqrt(2))
    return FockOperator(space, _embed(q, space, mode)), FockOperator(space, _embed(p, space, mode))


def tensor(A: FockOperator, B: FockOperator) -> FockOperator:
    """Kronecker product; modes of ``A`` come first (slower index)."""
    if A.space.cutoff != B.space.cutoff:
        raise ValueError("tensor requires equal per-mode cutoffs")
    space = FockSpace(A.space.mode_count + B.space.mode_count, A.space.cutoff)
    return FockOperator(space, np.kron(A.matrix, B.matrix))


def basis_vector(space: FockSpace, occupation: Sequence[int]) -> FockVector:
    v = np.zeros(space.dim, dtype=complex)
    v[space.index(occupation)] = 1.0
    return FockVector(space, v)


def coherent_amplitudes(alpha: complex, levels: int) -> np.ndarray:
    """Un-normalized truncated amplitudes ``exp(-|alpha|^2/2) alpha^n / sqrt(n!)``."""
    n = np.arange(levels)
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(levels, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha, space: FockSpace) -> FockVector:
    """Coherent state, renormalized over the truncated space.

    ``alpha`` is a scalar for one mode or a sequence (one amplitude per mode)
    giving the product state. Emits :class:`TruncationWarning` when more than
    1e-6 of the norm falls outside the cutoff.
    """
    alphas = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if alphas.size == 1 and space.mode_count > 1:
        alphas = np.repeat(alphas, space.mode_count)
    if alphas.size != space.mode_count:
        raise ValueError(f"need {space.mode_count} amplitudes, got {alphas.size}")
    amps = np.ones(1, dtype=complex)
    for a in alphas:
        c = coherent_amplitudes(a, space.levels)
        deficit = 1.0 - float(np.sum(np.abs(c) ** 2))
        if deficit > 1e-6:
            warnings.warn(
                f"coherent state |{a}> loses {deficit:.2e} of its norm at cutoff {space.cutoff}",
                TruncationWarning,
                stacklevel=2,
            )
        amps = np.kron(amps, c / np.linalg.norm(c))
    return FockVector(space, amps)


def _displacement_matrix(alpha: complex, levels: int) -> np.ndarray:
    # Exact elements <m|D(alpha)|n> (Cahill-Glauber, associated Laguerre form).
    alpha = complex(alpha)
    out = np.zeros((levels, levels), dtype=complex)
    if alpha == 0:
        return np.eye(levels, dtype=complex)
    x = abs(alpha) ** 2
    for m in range(levels):
        for n in range(levels):
            if m >= n:
                k, d = n, m - n
                base = alpha
            else:
                k, d = m, n - m
                base = -np.conj(alpha)
            pref = np.exp(0.5 * (gammaln(k + 1) - gammaln(k + d + 1)) - 0.5 * x)
            out[m, n] = pref * base**d * eval_genlaguerre(k, d, x)
    return out


def displacement(alpha: complex, space: FockSpace, mode: int = 0) -> FockOperator:
    """Displacement ``D(alpha) = exp(alpha a^dag - conj(alpha) a)``.

    Matrix elements are the exact infinite-dimensional ones restricted to the
    box, so ``D|0>`` reproduces the coherent amplitudes without renormalization.
    """
    cs = coherent_amplitudes(alpha, space.levels)
    deficit = 1.0 - float(np.sum(np.abs(cs) ** 2))
    if deficit > 1e-6:
        warnings.warn(
            f"displacement {alpha} is poorly resolved at cutoff {space.cutoff}",
            TruncationWarning,
            stacklevel=2,
        )
    return FockOperator(space, _embed(_displacement_matrix(alpha, space.levels), space, mode))


def _operator_norm_bound(matrix) -> float:
    if sparse.issparse(matrix):
        return float(abs(matrix).sum(axis=0).max()) if matrix.nnz else 0.0
    return float(np.abs(matrix).sum(axis=0).max(initial=0.0))


def expm_multiply(matrix, block: np.ndarray, tol: float = 1e-12, max_terms: int = 200) -> np.ndarray:
    """Compute ``exp(matrix) @ block`` by a scaled Taylor series.

    ``block`` may be a vector or a 2-D array of column vectors. The argument
    is split into ``s`` steps with ``||matrix||_1 / s <= 1``; each step sums
    Taylor terms until the next term's norm drops below ``tol / s`` relative
    to the running vector.
    """
    out = np.array(block, dtype=complex)
    norm = _operator_norm_bound(matrix)
    if norm == 0.0:
        return out
    steps = max(1, int(math.ceil(norm)))
    scaled = matrix / steps
    step_tol = tol / steps
    for _ in range(steps):
        term = out
        acc = out.copy()
        base = max(np.linalg.norm(acc), 1e-300)
        for k in range(1, max_terms + 1):
            term = scaled @ term / k
            acc += term
            if np.linalg.norm(term) <= step_tol * base:
                break
        else:
            raise ConvergenceError(
                f"Taylor series did not converge in {max_terms} terms",
                result=acc,
                residual=float(np.linalg.norm(term)),
            )
        out = acc
    return out


def expm_action(generator: FockOperator, v: FockVector, tolerance: float = 1e-12) -> FockVector:
    """Return ``exp(G) v`` for an anti-Hermitian generator ``G``."""
    _check_same_space(generator.space, v.space)
    skew = float(np.max(np.abs(generator.matrix + generator.matrix.conj().T), initial=0.0))
    if skew > 1e-10:
        raise ValueError(f"generator is not anti-Hermitian (deviation {skew:.2e})")
    return FockVector(v.space, expm_multiply(generator.matrix, v.amplitudes, tol=tolerance))


def tail_mass(state: FockVector | np.ndarray, space: FockSpace | None = None) -> float:
    """Probability carried by basis states with any mode at its top level."""
    if isinstance(state, FockVector):
        space = state.space
        amps = state.amplitudes
    else:
        amps = np.asarray(state)
    t = np.abs(amps.reshape(space.shape + amps.shape[1:])) ** 2
    top = np.zeros(space.shape, dtype=bool)
    for mode in range(space.mode_count):
        sl = [slice(None)] * space.mode_count
        sl[mode] = -1
        top[tuple(sl)] = True
    total = t.reshape((space.dim,) + amps.shape[1:]).sum(axis=0)
    mass = t[top].sum(axis=0) / np.where(total > 0, total, 1.0)
    # 2-D input: worst column
    return float(np.max(mass))
