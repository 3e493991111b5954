"""Brute-force verifier on a truncated Fock space.

Builds the full atom (x) photon-mode state, evolves each S_z column by an
explicit matrix exponential of the truncated (c^dag + c) generator, and
projects on photon-number outcomes.  Deliberately shares no evolution or
collapse code with the analytic modules; it exists so their coherent-branch
shortcuts can be checked against an independent computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import ConditioningError, DomainError, TruncationError
from .spin_basis import DickeState, SpinQuantum

__all__ = ["TruncatedJointState", "oracle_evolve", "oracle_project"]

MAX_ORACLE_S = 6.0
LEAKAGE_BOUND = 1e-8


@dataclass(frozen=True)
class TruncatedJointState:
    """amplitudes[M, n] over Dicke index M = -S..S and Fock index n."""

    spin: SpinQuantum
    fock_dim: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.spin.dim, self.fock_dim):
            raise DomainError(
                f"amplitude matrix has shape {amps.shape}, expected ({self.spin.dim}, {self.fock_dim})"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def photon_marginal(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)


def _quadrature_generator(fock_dim: int) -> np.ndarray:
    """Tridiagonal matrix of (c^dag + c) on the truncated Fock space.

    exp(-i C M (c^dag + c)) is the displacement D(-iCM), the per-branch
    evolution whose coherent amplitudes all downstream statistics use.
    """
    k = np.zeros((fock_dim, fock_dim))
    root = np.sqrt(np.arange(1, fock_dim))
    k[np.arange(1, fock_dim), np.arange(fock_dim - 1)] = root  # c^dag
    k[np.arange(fock_dim - 1), np.arange(1, fock_dim)] = root  # c
    return k


def min_fock_dim(c: float, s: float) -> int:
    return int(math.ceil((c * s) ** 2 + 10.0 * c * s + 20.0))


def oracle_evolve(state: DickeState, c: float, fock_dim: int | None = None) -> TruncatedJointState:
    """Apply exp[-iC M (c^dag + c)] per column by dense matrix exponentiation."""
    if c < 0:
        raise DomainError(f"pulse strength must be >= 0, got {c}")
    spin = state.spin
    if spin.s > MAX_ORACLE_S:
        raise DomainError(f"oracle is desk-scale only: S = {spin.s} > {MAX_ORACLE_S}")
    needed = min_fock_dim(c, spin.s)
    if fock_dim is None:
        fock_dim = needed
    elif fock_dim < needed:
        raise DomainError(f"fock_dim {fock_dim} below required {needed}")
    state.require_normalized()

    k = _quadrature_generator(fock_dim)
    e0 = np.zeros(fock_dim, dtype=complex)
    e0[0] = 1.0
    amps = np.zeros((spin.dim, fock_dim), dtype=complex)
    for idx, m in enumerate(spin.m_values()):
        if m == 0.0 or c == 0.0:
            column = e0
        else:
            column = expm(-1j * c * m * k) @ e0
        amps[idx] = state.amplitudes[idx] * column

    joint = TruncatedJointState(spin=spin, fock_dim=fock_dim, amplitudes=amps)
    leakage = abs(1.0 - joint.norm_sq())
    if leakage > LEAKAGE_BOUND:
        raise TruncationError(f"truncation leakage {leakage} exceeds {LEAKAGE_BOUND}")
    return joint


def oracle_project(joint: TruncatedJointState, n_m: int) -> DickeState:
    """Exact projective measurement of the photon number: keep Fock column n_m."""
    if not 0 <= n_m < joint.fock_dim:
        raise DomainError(f"n_m = {n_m} outside truncated Fock space 0..{joint.fock_dim - 1}")
    column = joint.amplitudes[:, n_m]
    weight = float(np.sum(np.abs(column) ** 2))
    if weight <= 1e-300:
        raise ConditioningError(f"outcome n_m={n_m} has probability below 1e-300")
    return DickeState(joint.spin, column / math.sqrt(weight))
