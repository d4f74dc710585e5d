"""Bloch analysis of the periodic gain/loss chain with alternating couplings.

The two-site unit cell carries +i*gamma and -i*gamma; the complex bands are
``omega0 +/- sqrt(t_a^2 + t_b^2 + 2*t_a*t_b*cos(k) - gamma^2)`` with the
lattice constant scaled to 1 (k below always means k*Lambda).  Wherever the
radicand vanishes the two bands meet at an exceptional point with a single
coalesced eigenvector.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ExceptionalPoint:
    k: float
    vector: np.ndarray
    coalescence: float
    eigenvalue_gap: float


@dataclass(frozen=True, eq=False)
class BlochScan:
    """Both band branches on a k grid plus the located exceptional points."""

    k_grid: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    eps: tuple[ExceptionalPoint, ...]


def bloch_hamiltonian(k: float, t_a: float, t_b: float, gamma: float,
                      onsite: float = 0.0) -> np.ndarray:
    """2x2 Bloch matrix [[onsite+i*gamma, t_b + t_a*e^{ik}], [c.c., onsite-i*gamma]]."""
    off = t_b + t_a * np.exp(1j * k)
    return np.array([[onsite + 1j * gamma, off],
                     [np.conj(off), onsite - 1j * gamma]], dtype=complex)


def band_energies(t_a: float, t_b: float, gamma: float, onsite: float = 0.0,
                  n_k: int = 1001) -> BlochScan:
    """Evaluate both branches over the Brillouin zone (-pi, pi].

    The principal square root keeps each branch continuous wherever the
    radicand does not change sign; both branches are always reported so a
    branch choice cannot hide a degeneracy.
    """
    k = np.linspace(-np.pi, np.pi, n_k + 1)[1:]
    radicand = (t_a ** 2 + t_b ** 2 + 2 * t_a * t_b * np.cos(k)
                - gamma ** 2).astype(complex)
    root = np.sqrt(radicand)
    eps = tuple(locate_exceptional_points(t_a, t_b, gamma, onsite))
    return BlochScan(k, onsite + root, onsite - root, eps)


def coalescence_measure(m: np.ndarray) -> float:
    """1 - |<v1|v2>| over the normalized eigenvectors of a 2x2 matrix.

    Approaches 0 at an exceptional point.  A degenerate-but-diagonalizable
    matrix (e.g. the identity) keeps orthogonal eigenvectors and scores
    near 1, distinguishing ordinary degeneracies from true coalescence.
    """
    _, vecs = np.linalg.eig(np.asarray(m, dtype=complex))
    v1 = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    v2 = vecs[:, 1] / np.linalg.norm(vecs[:, 1])
    return float(1.0 - abs(np.vdot(v1, v2)))


def eigenvalue_gap(m: np.ndarray) -> float:
    vals = np.linalg.eigvals(np.asarray(m, dtype=complex))
    return float(abs(vals[0] - vals[1]))


def locate_exceptional_points(t_a: float, t_b: float, gamma: float,
                              onsite: float = 0.0) -> list[ExceptionalPoint]:
    """Exceptional points of the Bloch matrix for the given modulation.

    Real solutions require |t_a - t_b| <= gamma <= t_a + t_b; outside that
    window the list is empty.  The wavenumbers solve
    ``cos(k) = (gamma^2 - t_a^2 - t_b^2)/(2*t_a*t_b)`` and the coalesced
    eigenvector is ``[i*(t_b + t_a*e^{ik})/gamma, 1]``; both are verified
    numerically against the matrix itself.
    """
    if gamma == 0.0:
        if t_a == t_b:
            warnings.warn("bands touch at the zone edge but stay "
                          "diagonalizable; not an exceptional point",
                          stacklevel=2)
        return []
    if not abs(t_a - t_b) <= gamma <= t_a + t_b:
        return []
    x = (gamma ** 2 - t_a ** 2 - t_b ** 2) / (2 * t_a * t_b)
    k_ep = float(np.arccos(np.clip(x, -1.0, 1.0)))
    # snap to the zone center/edge so rounding cannot split one point in two
    if k_ep < 1e-9:
        k_ep = 0.0
    elif np.pi - k_ep < 1e-9:
        k_ep = float(np.pi)
    ks = [k_ep] if k_ep in (0.0, np.pi) else [k_ep, -k_ep]
    points = []
    for k in ks:
        vec = np.array([1j * (t_b + t_a * np.exp(1j * k)) / gamma, 1.0])
        vec = vec / np.linalg.norm(vec)
        m = bloch_hamiltonian(k, t_a, t_b, gamma, onsite)
        points.append(ExceptionalPoint(
            k, vec, coalescence_measure(m), eigenvalue_gap(m)))
    return points
