"""Independent verification utilities: finite differences and planted instances.

These deliberately avoid the analytic code paths they are used to check.
Random draws go through a counter-based Philox generator keyed by the
seed, so fixtures are bit-reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curvature import evaluate
from .errors import DomainError
from .surface import Prescription, SurfaceComplex

DEFAULT_FD_STEP = 1e-5
# Relative-error denominators are floored here to avoid blowup near zeros.
REL_FLOOR = 1e-8


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by seed (bit-stable across platforms)."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def relative_error(approx, exact, floor: float = REL_FLOOR):
    """|approx - exact| / max(|exact|, floor), elementwise."""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    return np.abs(approx - exact) / np.maximum(np.abs(exact), floor)


def fd_gradient(f: Callable[[np.ndarray], float], K,
                h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference gradient of a scalar field over K."""
    if h <= 0.0:
        raise DomainError("finite-difference step must be positive")
    K = np.asarray(K, dtype=float)
    grad = np.empty_like(K)
    for i in range(len(K)):
        up = K.copy()
        dn = K.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (f(up) - f(dn)) / (2.0 * h)
    return grad


def fd_jacobian(complex: SurfaceComplex, K,
                h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of L(K), column by column."""
    if h <= 0.0:
        raise DomainError("finite-difference step must be positive")
    K = np.asarray(K, dtype=float)
    n = complex.n_vertices
    J = np.empty((n, n))
    for j in range(n):
        up = K.copy()
        dn = K.copy()
        up[j] += h
        dn[j] -= h
        J[:, j] = (evaluate(complex, up).L - evaluate(complex, dn).L) / (2.0 * h)
    return J


@dataclass(frozen=True)
class SyntheticInstance:
    """A prescription planted to have a known solution.

    ``lhat`` is the curvature of the planted coordinates ``kbar``, so the
    instance is feasible by construction and every solver should recover
    ``kbar`` exactly (the solution is unique).
    """

    complex: SurfaceComplex
    kbar: np.ndarray
    prescription: Prescription
    seed: int


def make_synthetic(complex: SurfaceComplex, seed: int,
                   k_range: tuple[float, float] = (-1.5, 1.5)) -> SyntheticInstance:
    """Sample planted coordinates uniformly per vertex and read off Lhat.

    A degenerate range (lo == hi) plants that exact coordinate everywhere.
    """
    lo, hi = k_range
    if not lo <= hi:
        raise DomainError("k_range must be an interval")
    kbar = rng_for(seed).uniform(lo, hi, size=complex.n_vertices)
    state = evaluate(complex, kbar)
    return SyntheticInstance(
        complex=complex,
        kbar=kbar,
        prescription=Prescription(state.L.copy()),
        seed=seed,
    )
