"""Fock-space simulation of the amplifier + beam-splitter cloning circuit.

Mode layout of the three-mode workspace:

    0  signal / input ``a_in``
    1  amplifier idler ``b1``
    2  second beam-splitter port ``b2``

The amplifier ``exp(r (a_in^dag b1^dag - a_in b1))`` with ``cosh^2 r = 2``
gives ``a_in -> sqrt(2) a_in + b1^dag``. The balanced beam splitter then acts
on the ordered pair (2, 0), so that in the Heisenberg picture

    mode 2 -> a_in + (b1^dag + b2)/sqrt(2)   (clone 1)
    mode 0 -> a_in + (b1^dag - b2)/sqrt(2)   (clone 2)

and mode 1 is the discarded idler. Each gate is a dense two-mode unitary (the
exponential of the truncated two-mode generator) contracted against the
three-mode tensor; no three-mode matrix is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.linalg import expm

from .fock_core import (
    CutoffError,
    FockSpace,
    FockVector,
    _single_mode_annihilation,
    coherent_amplitudes,
    tail_mass,
)

__all__ = [
    "CircuitSpec",
    "ClonerRun",
    "CLONE_MODES",
    "IDLER_MODE",
    "squeeze_parameter",
    "two_mode_squeezer",
    "beam_splitter",
    "propagate",
    "embed_ancilla",
    "run_cloner",
    "covariance_check",
    "equivalence_check",
]

CLONE_MODES = (2, 0)
IDLER_MODE = 1
DEFAULT_CUTOFF = 14
TAIL_TOL = 1e-4


def squeeze_parameter(gain: float) -> float:
    if gain < 1:
        raise ValueError("amplifier gain must be >= 1")
    return math.acosh(math.sqrt(gain))


@dataclass(frozen=True)
class CircuitSpec:
    gain: float = 2.0
    theta: float = math.pi / 4
    alpha: complex = 0.0

    def __post_init__(self):
        if self.gain < 1:
            raise ValueError("amplifier gain must be >= 1")

    @property
    def r(self) -> float:
        return squeeze_parameter(self.gain)


@dataclass(frozen=True)
class ClonerRun:
    f1: float
    f2: float
    f_joint: float
    tail_mass: float


def _pair_generators(levels: int):
    a = _single_mode_annihilation(levels)
    eye = np.eye(levels)
    a0 = np.kron(a, eye)
    a1 = np.kron(eye, a)
    squeeze = a0.T @ a1.T - a0 @ a1
    split = a0.T @ a1 - a0 @ a1.T
    return squeeze, split


_GEN_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _generators(levels: int):
    if levels not in _GEN_CACHE:
        _GEN_CACHE[levels] = _pair_generators(levels)
    return _GEN_CACHE[levels]


@lru_cache(maxsize=32)
def _pair_unitary(kind: str, param: float, levels: int) -> np.ndarray:
    squeeze, split = _generators(levels)
    u = expm(param * (squeeze if kind == "squeeze" else split))
    u.setflags(write=False)
    return u


def _apply_pair(block: np.ndarray, space: FockSpace, modes: Sequence[int], unitary: np.ndarray) -> np.ndarray:
    m0, m1 = (space.check_mode(m) for m in modes)
    if m0 == m1:
        raise ValueError("a two-mode gate needs two distinct modes")
    extra = block.shape[1:]
    t = block.reshape(space.shape + extra)
    t = np.moveaxis(t, (m0, m1), (0, 1))
    moved_shape = t.shape
    flat = t.reshape(space.levels**2, -1)
    flat = unitary @ flat
    t = np.moveaxis(flat.reshape(moved_shape), (0, 1), (m0, m1))
    return t.reshape((space.dim,) + extra)


def _gate(state, space, modes, unitary, tail_tol):
    if isinstance(state, FockVector):
        out = _apply_pair(np.asarray(state.amplitudes, dtype=complex), state.space, modes, unitary)
        tail = tail_mass(out, state.space)
        if tail_tol is not None and tail > tail_tol:
            raise CutoffError(f"tail mass {tail:.2e} at cutoff {state.space.cutoff}", tail_mass=tail)
        return FockVector(state.space, out)
    return _apply_pair(np.asarray(state, dtype=complex), space, modes, unitary)


def two_mode_squeezer(r: float, state, modes=(0, 1), space: FockSpace | None = None, tail_tol: float | None = TAIL_TOL):
    """Apply ``exp(r (a^dag b^dag - a b))`` to ``modes``.

    Accepts a :class:`FockVector` (tail mass checked) or a raw array with an
    explicit ``space``.
    """
    if r < 0:
        raise ValueError("squeezing parameter must be nonnegative")
    space = state.space if isinstance(state, FockVector) else space
    return _gate(state, space, modes, _pair_unitary("squeeze", float(r), space.levels), tail_tol)


def beam_splitter(theta: float, state, modes=(0, 1), space: FockSpace | None = None, tail_tol: float | None = None):
    """Apply ``exp(theta (a^dag b - a b^dag))``: ``a -> a cos + b sin``, ``b -> b cos - a sin``."""
    space = state.space if isinstance(state, FockVector) else space
    return _gate(state, space, modes, _pair_unitary("split", float(theta), space.levels), tail_tol)


def propagate(block: np.ndarray, space: FockSpace, circuit: CircuitSpec | None = None):
    """Run columns of ``block`` through the circuit. Returns ``(out, worst tail mass)``."""
    circuit = circuit or CircuitSpec()
    if space.mode_count != 3:
        raise ValueError("the cloning circuit needs a three-mode space")
    out = two_mode_squeezer(circuit.r, block, (0, IDLER_MODE), space=space)
    tail = tail_mass(out, space)
    out = beam_splitter(circuit.theta, out, (2, 0), space=space)
    return out, max(tail, tail_mass(out, space))


def embed_ancilla(psi: FockVector, circuit_space: FockSpace, alpha: complex = 0.0, tail_tol: float = TAIL_TOL) -> FockVector:
    """``|alpha>_in (x) |psi>_{b1 b2}`` on the three-mode box.

    ``psi`` may use a different cutoff; amplitudes beyond the circuit cutoff
    are dropped (error if they carry more than ``tail_tol``) and the rest is
    renormalized.
    """
    psi = getattr(psi, "psi", psi)
    if psi.space.mode_count != 2:
        raise ValueError("ancilla must be a two-mode state")
    L = circuit_space.levels
    src = psi.as_tensor()
    k = min(L, psi.space.levels)
    anc = np.zeros((L, L), dtype=complex)
    anc[:k, :k] = src[:k, :k]
    lost = 1.0 - float(np.sum(np.abs(anc) ** 2)) / psi.norm**2
    if lost > tail_tol:
        raise CutoffError(f"ancilla loses {lost:.2e} at circuit cutoff {circuit_space.cutoff}", tail_mass=lost)
    anc /= np.linalg.norm(anc)
    c = coherent_amplitudes(alpha, L)
    c = c / np.linalg.norm(c)
    return FockVector(circuit_space, np.einsum("i,jk->ijk", c, anc).reshape(-1))


def _project(t: np.ndarray, mode: int, bra: np.ndarray) -> np.ndarray:
    return np.tensordot(bra.conj(), t, axes=([0], [mode]))


def run_cloner(
    ancilla,
    alpha: complex = 0.0,
    cutoff: int = DEFAULT_CUTOFF,
    circuit: CircuitSpec | None = None,
    tail_tol: float | None = TAIL_TOL,
) -> ClonerRun:
    """Clone ``|alpha>`` with the given ancilla state on ``(b1, b2)``.

    Returns single-clone fidelities against ``|alpha>`` and the joint
    fidelity against ``|alpha, alpha>``. ``tail_tol=None`` disables the
    cutoff guard (the tail mass is still reported).
    """
    circuit = circuit or CircuitSpec()
    space = FockSpace(3, cutoff)
    state = embed_ancilla(ancilla, space, alpha, tail_tol=TAIL_TOL if tail_tol is None else tail_tol)
    out, tail = propagate(state.amplitudes[:, None], space, circuit)
    if tail_tol is not None and tail > tail_tol:
        raise CutoffError(f"tail mass {tail:.2e} at cutoff {cutoff}; use a larger cutoff", tail_mass=tail)
    t = out[:, 0].reshape(space.shape)
    bra = coherent_amplitudes(alpha, space.levels)
    bra = bra / np.linalg.norm(bra)
    c1, c2 = CLONE_MODES
    f1 = float(np.sum(np.abs(_project(t, c1, bra)) ** 2))
    f2 = float(np.sum(np.abs(_project(t, c2, bra)) ** 2))
    # project clone 1 first; clone 2's axis index shifts if it came after
    rest = _project(t, c1, bra)
    joint = _project(rest, c2 - (c2 > c1), bra)
    f_joint = float(np.sum(np.abs(joint) ** 2))
    return ClonerRun(f1, f2, f_joint, tail)


def covariance_check(
    ancilla,
    alphas: Iterable[complex] = (0.0, 0.3, 0.5j),
    cutoff: int = DEFAULT_CUTOFF,
    circuit: CircuitSpec | None = None,
    tail_tol: float | None = TAIL_TOL,
) -> float:
    """Largest change of ``(f1, f2, f_joint)`` relative to ``alpha = 0``.

    ``ancilla`` may be a callable ``alpha -> ancilla``; that is how
    non-covariant (input-dependent) maps are probed.
    """
    pick: Callable = ancilla if callable(ancilla) else (lambda _a: ancilla)
    ref = run_cloner(pick(0.0), 0.0, cutoff, circuit, tail_tol)
    worst = 0.0
    for a in alphas:
        run = run_cloner(pick(a), a, cutoff, circuit, tail_tol)
        worst = max(worst, abs(run.f1 - ref.f1), abs(run.f2 - ref.f2), abs(run.f_joint - ref.f_joint))
    return worst


def equivalence_check(w, cutoff: int = 20, k: int = 10, interior: bool = True) -> float:
    """Top-``k`` spectral distance between the product form and the b-mode form.

    With ``interior=True`` both operators are compressed to the states with
    total photon number ``<= cutoff``; the beam splitter maps that subspace
    onto itself, so the two compressions are unitarily equivalent and the
    distance measures only numerical error. With ``interior=False`` the full
    per-mode boxes are compared, which additionally includes the (different)
    truncation errors of the two pictures.
    """
    from .gauss_ops import _as_weights, bmode_observables, weighted_single_clone_operator

    w = _as_weights(w)
    space = FockSpace(2, cutoff)
    product = weighted_single_clone_operator(w, space).matrix
    f1, f2 = bmode_observables(space)
    bmode = w.lam1 * f1.matrix + w.lam2 * f2.matrix
    if interior:
        idx = np.flatnonzero(space.total_photons() <= cutoff)
        product = product[np.ix_(idx, idx)]
        bmode = bmode[np.ix_(idx, idx)]
    top_a = np.linalg.eigvalsh(product)[::-1][:k]
    top_b = np.linalg.eigvalsh(bmode)[::-1][:k]
    return float(np.max(np.abs(top_a - top_b)))
