"""Cloner-level quantities: fidelity pairs, tradeoff curves and bounds.

All fidelities are evaluated for vacuum input. Covariant cloners have the
same fidelity for every coherent input, so this is also the worst case
(checked independently by :func:`cloning_lab.optical_sim.covariance_check`).

Two pictures of the same two-mode ancilla space are used:

* product picture -- ``lam1 exp(-(Q0^2+P1^2)/2) + lam2 exp(-(P0^2+Q1^2)/2)``,
  used for the tradeoff sweep;
* b-mode picture -- the ancilla modes ``(b1, b2)`` injected into the optical
  circuit, with observables from :func:`cloning_lab.gauss_ops.bmode_observables`.

They differ by a balanced beam splitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .fock_core import ConvergenceError, CutoffError, FockSpace, FockVector, basis_vector
from .gauss_ops import WeightPair, _as_weights, bmode_observables, single_clone_terms
from .spectral import power_iteration, restricted_dominant

__all__ = [
    "ClonerAncilla",
    "TradeoffPoint",
    "GaussianFamilyPoint",
    "vacuum_ancilla",
    "two_mode_squeezed_ancilla",
    "gaussian_ancilla",
    "optimal_ancilla",
    "truncated_ancilla",
    "fidelity_pair",
    "tradeoff_sweep",
    "endpoint_slope_probe",
    "gaussian_tradeoff",
    "gaussian_slope",
    "best_gaussian_objective",
    "classical_fidelity",
    "heterodyne_fidelity",
    "trivial_mixture_line",
    "DEFAULT_CUTOFF",
]

DEFAULT_CUTOFF = 24
TAGS = ("gaussian", "optimal", "truncated", "epr-approx", "custom")


@dataclass(frozen=True)
class ClonerAncilla:
    """Two-mode state injected on ``(b1, b2)``."""

    psi: FockVector
    tag: str = "custom"

    def __post_init__(self):
        if self.psi.space.mode_count != 2:
            raise ValueError("ancilla must live on a two-mode space")
        if abs(self.psi.norm - 1.0) > 1e-10:
            raise ValueError(f"ancilla is not normalized (norm {self.psi.norm})")
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.tag == "optimal" and _diagonal_leakage(self.psi) > 1e-6:
            raise ValueError("optimal ancilla must be supported on |2n>|2n>")

    @property
    def cutoff(self) -> int:
        return self.psi.space.cutoff


@dataclass(frozen=True)
class TradeoffPoint:
    lam1: float
    lam2: float
    f1: float
    f2: float
    objective: float
    eigenvalue: float
    cutoff: int
    iterations: int
    residual: float
    status: str = "ok"


@dataclass(frozen=True)
class GaussianFamilyPoint:
    n1: float
    n2: float
    f1: float
    f2: float


def _diagonal_leakage(psi: FockVector) -> float:
    t = psi.as_tensor()
    k = np.arange(0, psi.space.levels, 2)
    return float(1.0 - np.sum(np.abs(t[k, k]) ** 2) / psi.norm**2)


@lru_cache(maxsize=8)
def _bmode_pair(cutoff: int):
    return bmode_observables(FockSpace(2, cutoff))


@lru_cache(maxsize=8)
def _product_terms(cutoff: int):
    return single_clone_terms(FockSpace(2, cutoff))


def vacuum_ancilla(cutoff: int = DEFAULT_CUTOFF) -> ClonerAncilla:
    return ClonerAncilla(basis_vector(FockSpace(2, cutoff), (0, 0)), "gaussian")


def two_mode_squeezed_ancilla(r: float, cutoff: int = DEFAULT_CUTOFF, tail_tol: float = 1e-4) -> ClonerAncilla:
    """``sum_n (-tanh r)^n / cosh r |n, n>``.

    For ``r > 0`` clone 1 improves (``f1 -> 1`` as ``r -> inf``, the EPR
    limit); ``r < 0`` favours clone 2. Raises :class:`CutoffError` when the
    discarded tail exceeds ``tail_tol``.
    """
    space = FockSpace(2, cutoff)
    n = np.arange(space.levels)
    amps = (-math.tanh(r)) ** n / math.cosh(r)
    lost = 1.0 - float(np.sum(amps**2))
    if lost > tail_tol:
        raise CutoffError(f"squeezing r={r} loses {lost:.2e} at cutoff {cutoff}", tail_mass=lost)
    t = np.zeros(space.shape)
    t[n, n] = amps
    psi = FockVector.from_tensor(space, t).normalized()
    return ClonerAncilla(psi, "epr-approx" if r != 0 else "gaussian")


def gaussian_ancilla(n1: float, cutoff: int = DEFAULT_CUTOFF) -> ClonerAncilla:
    """Gaussian ancilla whose clone-1 added noise is ``n1`` (so ``n2 = 1/(4 n1)``)."""
    if n1 <= 0:
        raise ValueError("n1 must be positive")
    r = -0.5 * math.log(2.0 * n1)
    anc = two_mode_squeezed_ancilla(r, cutoff)
    return ClonerAncilla(anc.psi, "gaussian")


def optimal_ancilla(cutoff: int = DEFAULT_CUTOFF, weights=(0.5, 0.5), tol: float = 1e-10) -> ClonerAncilla:
    """Dominant eigenvector of ``lam1 F1 + lam2 F2`` in the b-mode picture."""
    w = _as_weights(weights)
    f1, f2 = _bmode_pair(cutoff)
    res = power_iteration(w.lam1 * f1 + w.lam2 * f2, tol=tol)
    v = res.eigenvector.amplitudes
    # fix the global sign so the vacuum amplitude is positive
    if v[0] < 0:
        v = -v
    psi = FockVector(res.eigenvector.space, v)
    tag = "optimal" if w.lam1 == w.lam2 else "custom"
    return ClonerAncilla(psi, tag)


def truncated_ancilla(max_photon: int, cutoff: int = DEFAULT_CUTOFF) -> tuple[ClonerAncilla, float]:
    """Best symmetric ancilla with at most ``max_photon`` photons per mode.

    The symmetric optimum lives on ``|2n>|2n>``, so the search space is
    ``{|2n, 2n> : 2n <= max_photon}``. Returns the ancilla and its fidelity.
    """
    if max_photon < 0 or max_photon > cutoff:
        raise ValueError("max_photon must lie in [0, cutoff]")
    space = FockSpace(2, cutoff)
    basis = [basis_vector(space, (k, k)) for k in range(0, max_photon + 1, 2)]
    f1, f2 = _bmode_pair(cutoff)
    res = restricted_dominant(0.5 * (f1 + f2), basis)
    v = res.eigenvector.amplitudes
    if np.real(v[0]) < 0:
        v = -v
    return ClonerAncilla(FockVector(space, v), "truncated"), res.eigenvalue


def fidelity_pair(ancilla) -> tuple[float, float]:
    """``(<psi|F1|psi>, <psi|F2|psi>)`` with the b-mode observables."""
    psi = getattr(ancilla, "psi", ancilla)
    if psi.space.mode_count != 2:
        raise ValueError("ancilla must live on a two-mode space")
    f1, f2 = _bmode_pair(psi.space.cutoff)
    return float(f1.expectation(psi).real), float(f2.expectation(psi).real)


def tradeoff_sweep(
    weights: Iterable,
    cutoff: int = DEFAULT_CUTOFF,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> list[TradeoffPoint]:
    """Optimal single-clone fidelity pairs, one per weight pair, sorted by ``f1``.

    Solver failures do not abort the sweep; they are reported through each
    point's ``status`` field.
    """
    t1, t2 = _product_terms(cutoff)
    points = []
    for w in weights:
        w = _as_weights(w)
        op = w.lam1 * t1 + w.lam2 * t2
        status = "ok"
        try:
            res = power_iteration(op, tol=tol, max_iter=max_iter)
            if res.degenerate:
                status = "degenerate"
        except ConvergenceError as exc:
            res = exc.result
            status = "failed"
        v = res.eigenvector
        f1 = float(t1.expectation(v).real)
        f2 = float(t2.expectation(v).real)
        points.append(
            TradeoffPoint(
                w.lam1, w.lam2, f1, f2, w.lam1 * f1 + w.lam2 * f2,
                res.eigenvalue, cutoff, res.iterations, res.residual, status,
            )
        )
    points.sort(key=lambda p: (p.f1, p.lam1))
    return points


def gaussian_tradeoff(n1: float) -> GaussianFamilyPoint:
    """Gaussian cloner with added noise ``n1`` on clone 1 and the minimal ``n2 = 1/(4 n1)``."""
    if not n1 > 0:
        raise ValueError("n1 must be positive")
    if math.isinf(n1):
        return GaussianFamilyPoint(n1, 0.0, 0.0, 1.0)
    n2 = 1.0 / (4.0 * n1)
    return GaussianFamilyPoint(n1, n2, 1.0 / (1.0 + n1), 1.0 / (1.0 + n2))


def gaussian_slope(f1: float) -> float:
    """``d f2 / d(1 - f1)`` along the Gaussian family at the given ``f1``."""
    if not 0 < f1 < 1:
        raise ValueError("f1 must lie in (0, 1)")
    n1 = 1.0 / f1 - 1.0
    return 4.0 * (1.0 + n1) ** 2 / (1.0 + 4.0 * n1) ** 2


def best_gaussian_objective(weights) -> tuple[float, GaussianFamilyPoint]:
    """Maximum of ``lam1 f1 + lam2 f2`` over the Gaussian family."""
    from scipy.optimize import minimize_scalar

    w = _as_weights(weights)

    def neg(log_n):
        p = gaussian_tradeoff(math.exp(log_n))
        return -(w.lam1 * p.f1 + w.lam2 * p.f2)

    best = minimize_scalar(neg, bounds=(-30.0, 30.0), method="bounded", options={"xatol": 1e-12})
    point = gaussian_tradeoff(math.exp(best.x))
    return w.lam1 * point.f1 + w.lam2 * point.f2, point


def endpoint_slope_probe(ratios: Sequence[float], cutoff: int = DEFAULT_CUTOFF, tol: float = 1e-10):
    """Secant slopes ``d f2 / d(1 - f1)`` of the optimal curve near ``f1 = 1``.

    ``ratios`` are ``lam2 / lam1`` values, strictly decreasing. Returns one
    ``(f1, f2, slope)`` tuple per ratio; the slope is the secant to the
    previous point and is ``nan`` for the first.
    """
    ratios = [float(r) for r in ratios]
    if len(ratios) < 2:
        raise ValueError("need at least two ratios")
    if any(b >= a for a, b in zip(ratios, ratios[1:])) or ratios[-1] < 0:
        raise ValueError("ratios must be nonnegative and strictly decreasing")
    t1, t2 = _product_terms(cutoff)
    pairs = []
    for r in ratios:
        res = power_iteration(t1 + r * t2, tol=tol)
        v = res.eigenvector
        pairs.append((float(t1.expectation(v).real), float(t2.expectation(v).real)))
    out = [(pairs[0][0], pairs[0][1], math.nan)]
    for (fa1, fa2), (fb1, fb2) in zip(pairs, pairs[1:]):
        # both 1 - f1 and f2 shrink toward the endpoint
        out.append((fb1, fb2, (fa2 - fb2) / (fb1 - fa1)))
    return out


def classical_fidelity(state) -> float:
    """Measure-and-prepare fidelity ``tr[rho_T |0><0|] / 2``.

    ``state`` is a :class:`FockVector` or a density matrix (array); the
    vacuum of every mode is used.
    """
    if isinstance(state, FockVector):
        if abs(state.norm - 1.0) > 1e-9:
            raise ValueError("state is not normalized")
        return 0.5 * abs(state.amplitudes[0]) ** 2
    rho = np.asarray(state)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValueError("density matrix does not have unit trace")
    return 0.5 * float(np.real(rho[0, 0]))


def heterodyne_fidelity(alpha: complex = 0.0, epsabs: float = 1e-12) -> float:
    """Heterodyne-and-reprepare fidelity for input ``|alpha>``, by 2-D quadrature.

    The outcome ``beta`` has density ``|<beta|alpha>|^2 / pi`` and the
    prepared state ``|beta>`` has fidelity ``|<alpha|beta>|^2`` with the input.
    """
    a = complex(alpha)

    def integrand(y, x):
        d2 = (x - a.real) ** 2 + (y - a.imag) ** 2
        return math.exp(-2.0 * d2) / math.pi

    span = 8.0
    val, _ = integrate.dblquad(
        integrand, a.real - span, a.real + span, a.imag - span, a.imag + span, epsabs=epsabs, epsrel=1e-12
    )
    return float(val)


def trivial_mixture_line(p: float) -> tuple[float, float]:
    """Mixture with probability ``p`` of the cloner that sends the input to clone 1.

    The two trivial cloners sit at ``(1, 0)`` and ``(0, 1)``: the clone that
    does not receive the input gets a fixed state, whose worst-case fidelity
    over all coherent states is zero.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return float(p), float(1.0 - p)
