"""Gaussian-exponential fidelity operators on truncated Fock space.

The central objects are ``exp(-Q^2/2)`` and ``exp(-P^2/2)`` on one mode.
Their matrix elements follow from the Hermite generating function::

    sum_{m,n} G_mn s^m t^n / sqrt(m! n!) = sqrt(b) exp((b - 1)(s^2 + t^2)/2 + b s t)

with ``b = 1/(1 + kappa)`` for ``exp(-kappa Q^2)``, which gives the exact
three-term recursion used in :func:`gauss_axis_matrix`. All operators here
are exact infinite-dimensional matrix elements restricted to the box, so a
larger cutoff always contains the smaller problem as a compression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .fock_core import (
    CutoffError,
    FockOperator,
    FockSpace,
    _embed,
    tail_mass,
)

__all__ = [
    "QuadraticExponentialSpec",
    "WeightPair",
    "gauss_axis_matrix",
    "gauss_axis_operator",
    "single_clone_terms",
    "weighted_single_clone_operator",
    "beam_splitter_rotation",
    "rotate_to_bmode",
    "bmode_observables",
    "joint_fidelity_operator",
    "truncation_stability",
]

AXES = ("Q", "P")
JOINT_ANCILLA_CUTOFF = 4


def gauss_axis_matrix(axis: str, levels: int, coefficient: float = 0.5) -> np.ndarray:
    """Single-mode matrix of ``exp(-coefficient * X^2)`` for ``X`` in {Q, P}.

    Real symmetric; elements with ``m - n`` odd vanish identically. The P
    version is the Q version conjugated by ``exp(i pi N / 2)``, i.e. the
    elements pick up ``i^(m-n)``, which is the sign ``(-1)^((m-n)/2)``.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be 'Q' or 'P', got {axis!r}")
    if coefficient <= 0:
        raise ValueError("coefficient must be positive")
    b = 1.0 / (1.0 + coefficient)
    g = np.zeros((levels, levels))
    g[0, 0] = math.sqrt(b)
    sq = np.sqrt(np.arange(levels + 1, dtype=float))
    # first row: sqrt(n+1) G_{0,n+1} = (b-1) sqrt(n) G_{0,n-1}
    for n in range(1, levels - 1):
        g[0, n + 1] = (b - 1.0) * sq[n] * g[0, n - 1] / sq[n + 1]
    g[:, 0] = g[0, :]
    # sqrt(m+1) G_{m+1,n} = (b-1) sqrt(m) G_{m-1,n} + b sqrt(n) G_{m,n-1}
    for m in range(levels - 1):
        prev = g[m - 1, 1:] if m > 0 else 0.0
        g[m + 1, 1:] = ((b - 1.0) * sq[m] * prev + b * sq[1:levels] * g[m, :-1]) / sq[m + 1]
    g = 0.5 * (g + g.T)
    if axis == "P":
        k = np.arange(levels)
        diff = k[:, None] - k[None, :]
        sign = np.where(diff % 4 == 0, 1.0, -1.0)
        g = np.where(diff % 2 == 0, g * sign, 0.0)
    return g


def gauss_axis_operator(axis: str, space: FockSpace, mode: int = 0, coefficient: float = 0.5) -> FockOperator:
    """``exp(-coefficient X^2)`` on one mode of ``space``, identity elsewhere."""
    return FockOperator(space, _embed(gauss_axis_matrix(axis, space.levels, coefficient), space, mode))


@dataclass(frozen=True)
class QuadraticExponentialSpec:
    """Symbolic ``exp(-sum_k c_k X_k^2)`` over mutually commuting quadratures.

    ``terms`` is a sequence of ``(axis, mode, coefficient)``. With
    ``rotated=True`` the quadratures refer to the beam-splitter modes
    ``(a_0 + a_1)/sqrt(2)`` and ``(a_0 - a_1)/sqrt(2)`` of a two-mode space;
    this is how the optical-picture observables are described.
    """

    terms: tuple
    rotated: bool = False

    def __post_init__(self):
        terms = tuple((str(ax), int(mode), float(c)) for ax, mode, c in self.terms)
        if not terms:
            raise ValueError("at least one term is required")
        seen = {}
        for ax, mode, c in terms:
            if ax not in AXES:
                raise ValueError(f"unknown axis {ax!r}")
            if c <= 0:
                raise ValueError("coefficients must be positive")
            if mode in seen:
                if seen[mode] != ax:
                    raise ValueError(f"Q and P of mode {mode} do not commute")
                raise ValueError(f"duplicate term for {ax} of mode {mode}")
            seen[mode] = ax
        object.__setattr__(self, "terms", terms)

    def materialize(self, space: FockSpace) -> FockOperator:
        if self.rotated and space.mode_count != 2:
            raise ValueError("rotated specs live on two-mode spaces")
        for _, mode, _ in self.terms:
            space.check_mode(mode)

        def product(sp):
            out = np.eye(sp.dim)
            for ax, mode, c in self.terms:
                out = out @ _embed(gauss_axis_matrix(ax, sp.levels, c), sp, mode)
            return out

        if not self.rotated:
            return FockOperator(space, product(space))
        big = FockSpace(2, 2 * space.cutoff)
        return rotate_to_bmode(product(big), space)


@dataclass(frozen=True)
class WeightPair:
    """Nonnegative clone weights, not both zero."""

    lam1: float
    lam2: float

    def __post_init__(self):
        lam1, lam2 = float(self.lam1), float(self.lam2)
        if not (np.isfinite(lam1) and np.isfinite(lam2)):
            raise ValueError("weights must be finite")
        if lam1 < 0 or lam2 < 0 or lam1 + lam2 == 0:
            raise ValueError(f"invalid weights ({lam1}, {lam2})")
        object.__setattr__(self, "lam1", lam1)
        object.__setattr__(self, "lam2", lam2)

    def normalized(self) -> "WeightPair":
        s = self.lam1 + self.lam2
        return WeightPair(self.lam1 / s, self.lam2 / s)

    def swapped(self) -> "WeightPair":
        return WeightPair(self.lam2, self.lam1)

    @property
    def ratio(self) -> float:
        return self.lam2 / self.lam1 if self.lam1 else math.inf


def _as_weights(w) -> WeightPair:
    if isinstance(w, WeightPair):
        return w
    lam1, lam2 = w
    return WeightPair(lam1, lam2)


def _require_two_modes(space: FockSpace):
    if space.mode_count != 2:
        raise ValueError(f"expected a two-mode space, got {space.mode_count} mode(s)")


def single_clone_terms(space: FockSpace) -> tuple[FockOperator, FockOperator]:
    """The two product observables ``exp(-(Q0^2+P1^2)/2)`` and ``exp(-(P0^2+Q1^2)/2)``."""
    _require_two_modes(space)
    gq = gauss_axis_matrix("Q", space.levels)
    gp = gauss_axis_matrix("P", space.levels)
    return FockOperator(space, np.kron(gq, gp)), FockOperator(space, np.kron(gp, gq))


def weighted_single_clone_operator(w, space: FockSpace) -> FockOperator:
    """``lam1 exp(-(Q0^2+P1^2)/2) + lam2 exp(-(Q1^2+P0^2)/2)``."""
    w = _as_weights(w)
    t1, t2 = single_clone_terms(space)
    return w.lam1 * t1 + w.lam2 * t2


def _bs_block(n_total: int, theta: float) -> np.ndarray:
    # exp(theta (a0^dag a1 - a0 a1^dag)) on the states |k, n-k>, k = 0..n
    k = np.arange(n_total + 1)
    gen = np.zeros((n_total + 1, n_total + 1))
    # a0^dag a1 |k, n-k> = sqrt((k+1)(n-k)) |k+1, n-k-1>
    up = np.sqrt((k[:-1] + 1.0) * (n_total - k[:-1]))
    gen[k[:-1] + 1, k[:-1]] = up
    gen[k[:-1], k[:-1] + 1] = -up
    return expm(theta * gen)


def beam_splitter_rotation(space: FockSpace, theta: float = math.pi / 4) -> np.ndarray:
    """Unitary ``V`` with ``V^dag a0 V = (a0 + a1)/sqrt(2)``, ``V^dag a1 V = (a0 - a1)/sqrt(2)``.

    Built as ``V = Pi_1 B`` with ``B = exp(theta(a0^dag a1 - a0 a1^dag))`` and
    ``Pi_1 = (-1)^{N_1}``. Only blocks of total photon number ``<= cutoff`` are
    exact on a per-mode box (the rest of the block leaves the box); columns
    outside that range are zeroed.
    """
    _require_two_modes(space)
    occ = space.occupations()
    total = occ.sum(axis=1)
    v = np.eye(space.dim)
    for n in range(space.cutoff + 1):
        ks = np.arange(n + 1)
        idx = np.array([space.index((k, n - k)) for k in ks])
        v[np.ix_(idx, idx)] = _bs_block(n, theta)
    parity = np.where(occ[:, 1] % 2 == 0, 1.0, -1.0)
    v = parity[:, None] * v
    v[:, total > space.cutoff] = 0.0
    return v


def rotate_to_bmode(big_matrix: np.ndarray, space: FockSpace) -> FockOperator:
    """Conjugate an operator given on the doubled box into the beam-splitter picture.

    ``big_matrix`` must hold exact elements on ``FockSpace(2, 2 * cutoff)``.
    Every state of the target box has total photon number ``<= 2 cutoff``, so
    its image under the (number-conserving) rotation stays inside the doubled
    box and the result is exact on ``space``.
    """
    _require_two_modes(space)
    big = FockSpace(2, 2 * space.cutoff)
    if big_matrix.shape != (big.dim, big.dim):
        raise ValueError("big_matrix must live on the doubled box")
    v = beam_splitter_rotation(big)
    idx = np.array([big.index(o) for o in space.occupations()])
    cols = v[:, idx]
    out = cols.T @ big_matrix @ cols
    out = 0.5 * (out + out.T)
    return FockOperator(space, out)


def bmode_observables(space: FockSpace) -> tuple[FockOperator, FockOperator]:
    """``F1 = exp(-(Q0+Q1)^2/4 - (P0-P1)^2/4)`` and ``F2 = exp(-(Q0-Q1)^2/4 - (P0+P1)^2/4)``.

    These are the clone-1 and clone-2 fidelity observables on the two
    ancilla modes ``(b1, b2)`` of the amplifier + beam-splitter circuit.
    """
    _require_two_modes(space)
    big = FockSpace(2, 2 * space.cutoff)
    t1, t2 = single_clone_terms(big)
    return rotate_to_bmode(t1.matrix, space), rotate_to_bmode(t2.matrix, space)


def joint_fidelity_operator(space: FockSpace | None = None, circuit_cutoff: int = 14, tail_tol: float = 1e-4) -> FockOperator:
    """Joint-fidelity operator on the ancilla space, by circuit contraction.

    ``F_joint = <0|_in U^dag (|00><00|_clones (x) 1_idler) U |0>_in`` where U is
    the gain-2 amplifier followed by the balanced beam splitter. Each ancilla
    basis state is propagated through the three-mode circuit at
    ``circuit_cutoff``. The cutoff diagnostic is the top-level tail mass of
    the propagated dominant eigenvector (the state that attains the reported
    optimum); :class:`CutoffError` is raised when it exceeds ``tail_tol``.
    Off-dominant matrix elements of highly excited ancilla states are less
    accurate than that, so keep the ancilla cutoff well below the circuit one.
    """
    from . import optical_sim

    space = space or FockSpace(2, JOINT_ANCILLA_CUTOFF)
    _require_two_modes(space)
    if space.cutoff > circuit_cutoff:
        raise CutoffError("ancilla cutoff cannot exceed the circuit cutoff")
    circ = FockSpace(3, circuit_cutoff)
    columns = np.zeros((circ.dim, space.dim), dtype=complex)
    for j, (n1, n2) in enumerate(space.occupations()):
        columns[circ.index((0, n1, n2)), j] = 1.0
    out, _ = optical_sim.propagate(columns, circ)
    t = out.reshape(circ.shape + (space.dim,))
    c1, c2 = optical_sim.CLONE_MODES
    t = np.moveaxis(t, (c1, c2, optical_sim.IDLER_MODE), (0, 1, 2))
    # both clones projected on vacuum; the idler index is summed over
    w = t[0, 0]
    mat = w.conj().T @ w
    mat = 0.5 * (mat + mat.conj().T)
    top = np.linalg.eigh(mat)[1][:, -1]
    tail = tail_mass(out @ top, circ)
    if tail > tail_tol:
        raise CutoffError(
            f"tail mass {tail:.2e} exceeds {tail_tol:.0e}; raise circuit_cutoff", tail_mass=tail
        )
    return FockOperator(space, np.real_if_close(mat, tol=1000))


def truncation_stability(value_at, cutoff: int, step: int = 4, threshold: float = 1e-4):
    """Compare ``value_at(cutoff)`` against ``value_at(cutoff + step)``.

    Returns ``(value, change, stable)``; ``stable`` is False when the value
    moves by ``threshold`` or more.
    """
    v0 = float(value_at(cutoff))
    v1 = float(value_at(cutoff + step))
    change = abs(v1 - v0)
    return v0, change, change < threshold
