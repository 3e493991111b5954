"""Collective spin states in the Dicke basis.

States of N_a two-level atoms restricted to the fully symmetric subspace are
stored as complex amplitude vectors over the S_z eigenvalues M = -S..S with
S = N_a/2.  All spin quantum numbers are carried internally as doubled
integers (S_twice, M_twice) so half-integer values never touch floating
point; the public API accepts the atom count N_a.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ContractViolationError, DomainError, SingularStateError

NORM_TOL = 1e-9

__all__ = [
    "SpinQuantum",
    "DickeState",
    "SpinMoments",
    "log_binomial_amplitude",
    "initial_coherent_spin_state",
    "spin_moments",
    "squeezing_parameter",
    "mean_spin_with_decay",
]


@dataclass(frozen=True)
class SpinQuantum:
    """Total collective spin of N_a atoms, S = N_a/2."""

    n_atoms: int

    def __post_init__(self):
        if self.n_atoms < 1:
            raise DomainError(f"need at least one atom, got {self.n_atoms}")

    @property
    def s_twice(self) -> int:
        return self.n_atoms

    @property
    def s(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    def m_values(self) -> np.ndarray:
        """S_z eigenvalues -S..S as floats, index order matching amplitudes."""
        return (np.arange(self.dim) * 2 - self.s_twice) / 2.0


@dataclass(frozen=True)
class DickeState:
    """Pure symmetric state; amplitudes[k] belongs to M = -S + k."""

    spin: SpinQuantum
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.spin.dim,):
            raise DomainError(
                f"amplitude vector has shape {amps.shape}, expected ({self.spin.dim},)"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def normalized(self) -> "DickeState":
        n = np.sqrt(self.norm_sq)
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return DickeState(self.spin, self.amplitudes / n)

    def require_normalized(self, tol: float = NORM_TOL) -> None:
        if abs(self.norm_sq - 1.0) > tol:
            raise ContractViolationError(
                f"state norm^2 = {self.norm_sq} deviates from 1 by more than {tol}"
            )


@dataclass(frozen=True)
class SpinMoments:
    mean_sx: float
    mean_sy: float
    mean_sz: float
    var_sz: float
    var_sy: float
    mean_spin_length: float


def log_binomial_amplitude(s_twice: int, m_twice: int) -> float:
    """ln A(S,M) with A(S,M) = 2^-S sqrt((2S)! / ((S+M)!(S-M)!)).

    Evaluated through log-gamma so exp(result) stays finite up to N_a ~ 1e6.
    """
    if s_twice < 0:
        raise DomainError(f"negative total spin: s_twice={s_twice}")
    if abs(m_twice) > s_twice:
        raise DomainError(f"|M| > S: m_twice={m_twice}, s_twice={s_twice}")
    if (s_twice - m_twice) % 2 != 0:
        raise DomainError(f"M parity does not match S: m_twice={m_twice}, s_twice={s_twice}")
    s_plus_m = (s_twice + m_twice) // 2
    s_minus_m = (s_twice - m_twice) // 2
    return float(
        -0.5 * s_twice * np.log(2.0)
        + 0.5 * (gammaln(s_twice + 1) - gammaln(s_plus_m + 1) - gammaln(s_minus_m + 1))
    )


def binomial_amplitudes(spin: SpinQuantum) -> np.ndarray:
    """A(S,M) for M = -S..S as a real vector."""
    k = np.arange(spin.dim)
    log_a = (
        -0.5 * spin.s_twice * np.log(2.0)
        + 0.5
        * (
            gammaln(spin.s_twice + 1)
            - gammaln(k + 1)
            - gammaln(spin.s_twice - k + 1)
        )
    )
    return np.exp(log_a)


def initial_coherent_spin_state(n_atoms: int) -> DickeState:
    """The S_x = S eigenstate: real positive binomial amplitudes A(S,M)."""
    spin = SpinQuantum(n_atoms)
    return DickeState(spin, binomial_amplitudes(spin).astype(complex))


def _apply_sp(spin: SpinQuantum, amps: np.ndarray) -> np.ndarray:
    """S_+ |psi> in the amplitude representation."""
    m = spin.m_values()
    s = spin.s
    out = np.zeros_like(amps)
    # S_+|S,M> = sqrt(S(S+1) - M(M+1)) |S,M+1>
    c = np.sqrt(np.maximum(s * (s + 1) - m[:-1] * (m[:-1] + 1), 0.0))
    out[1:] = c * amps[:-1]
    return out


def _apply_sm(spin: SpinQuantum, amps: np.ndarray) -> np.ndarray:
    m = spin.m_values()
    s = spin.s
    out = np.zeros_like(amps)
    c = np.sqrt(np.maximum(s * (s + 1) - m[1:] * (m[1:] - 1), 0.0))
    out[:-1] = c * amps[1:]
    return out


def apply_sx(spin: SpinQuantum, amps: np.ndarray) -> np.ndarray:
    return 0.5 * (_apply_sp(spin, amps) + _apply_sm(spin, amps))


def apply_sy(spin: SpinQuantum, amps: np.ndarray) -> np.ndarray:
    return -0.5j * (_apply_sp(spin, amps) - _apply_sm(spin, amps))


def apply_sz(spin: SpinQuantum, amps: np.ndarray) -> np.ndarray:
    return spin.m_values() * amps


def spin_moments(state: DickeState) -> SpinMoments:
    """First and second moments of the collective spin components."""
    state.require_normalized()
    spin = state.spin
    a = state.amplitudes
    m = spin.m_values()
    pop = np.abs(a) ** 2

    mean_sz = float(np.sum(m * pop))
    var_sz = float(np.sum(m * m * pop) - mean_sz**2)

    sp_exp = complex(np.vdot(a, _apply_sp(spin, a)))
    mean_sx = sp_exp.real
    mean_sy = sp_exp.imag

    sy_a = apply_sy(spin, a)
    var_sy = float(np.real(np.vdot(sy_a, sy_a)) - mean_sy**2)

    length = float(np.sqrt(mean_sx**2 + mean_sy**2 + mean_sz**2))
    return SpinMoments(
        mean_sx=mean_sx,
        mean_sy=mean_sy,
        mean_sz=mean_sz,
        var_sz=max(var_sz, 0.0),
        var_sy=max(var_sy, 0.0),
        mean_spin_length=length,
    )


def _orthogonal_frame(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors orthogonal to `direction` and to each other."""
    seed = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(seed, direction)) > 0.9:
        seed = np.array([0.0, 1.0, 0.0])
    e1 = seed - np.dot(seed, direction) * direction
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(direction, e1)
    return e1, e2


def min_orthogonal_variance(state: DickeState) -> float:
    """Smallest principal variance of the spin components orthogonal to <S>.

    Built from the 2x2 covariance matrix of the two orthogonal components.
    For all the states produced in this package (mean spin along x) this
    coincides with the S_z variance.
    """
    state.require_normalized()
    spin = state.spin
    a = state.amplitudes
    mom = spin_moments(state)
    mean_vec = np.array([mom.mean_sx, mom.mean_sy, mom.mean_sz])
    length = np.linalg.norm(mean_vec)
    if length < 1e-9:
        raise SingularStateError("mean spin vanishes; orthogonal frame undefined")
    direction = mean_vec / length
    e1, e2 = _orthogonal_frame(direction)

    def project(e):
        return e[0] * apply_sx(spin, a) + e[1] * apply_sy(spin, a) + e[2] * apply_sz(spin, a)

    w1, w2 = project(e1), project(e2)
    m1 = float(np.real(np.vdot(a, w1)))
    m2 = float(np.real(np.vdot(a, w2)))
    v11 = float(np.real(np.vdot(w1, w1))) - m1 * m1
    v22 = float(np.real(np.vdot(w2, w2))) - m2 * m2
    v12 = float(np.real(np.vdot(w1, w2))) - m1 * m2
    cov = np.array([[v11, v12], [v12, v22]])
    return float(max(np.linalg.eigvalsh(cov)[0], 0.0))


def squeezing_parameter(state: DickeState) -> float:
    """xi = sqrt(2S) * dS_perp / |<S>|, subunitary for squeezed states.

    dS_perp is the smaller principal standard deviation orthogonal to the
    mean spin.  Undefined (raises) when the mean spin vanishes.
    """
    spin = state.spin
    mom = spin_moments(state)
    if mom.mean_spin_length < 1e-9:
        raise SingularStateError("squeezing parameter undefined for zero mean spin")
    var_perp = min_orthogonal_variance(state)
    return float(np.sqrt(2.0 * spin.s) * np.sqrt(var_perp) / mom.mean_spin_length)


def spin_matrices(spin: SpinQuantum) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense (S_x, S_y, S_z) matrices in the M = -S..S basis."""
    dim = spin.dim
    m = spin.m_values()
    s = spin.s
    sz = np.diag(m).astype(complex)
    sp = np.zeros((dim, dim), dtype=complex)
    c = np.sqrt(np.maximum(s * (s + 1) - m[:-1] * (m[:-1] + 1), 0.0))
    sp[np.arange(1, dim), np.arange(dim - 1)] = c
    sm = sp.conj().T
    sx = 0.5 * (sp + sm)
    sy = -0.5j * (sp - sm)
    return sx, sy, sz


def mean_spin_with_decay(bare_mean_sx: float, c_spon: float) -> float:
    """Mean spin reduced by spontaneous-emission decoherence, factor e^-C_spon^2."""
    if c_spon < 0:
        raise DomainError(f"c_spon must be non-negative, got {c_spon}")
    return bare_mean_sx * float(np.exp(-(c_spon**2)))
