"""Laboratory parameters -> dimensionless model (C, C_spon, d_res, eta).

The entanglement results are fully dimensionless in (C, mu, N_a, d_res);
this module owns the SI-unit bookkeeping that produces those numbers, the
photon-loss bound, and the decay-corrected squeezing optimum.  Dipole
constants enter only as one composite prefactor supplied by the caller.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, asdict
from pathlib import Path

from scipy.optimize import minimize_scalar

from .errors import ConfigError, ConsistencyError, DomainError

# C^2 N_a / d_res = SPON_COUPLING_CONSTANT * C_spon^2 when N_a = n_a A L;
# the O(1) constant is pinned here once and asserted in the tests.
SPON_COUPLING_CONSTANT = 3.0 / (16.0 * math.pi**2)

__all__ = [
    "PhysicalConfig",
    "DerivedStrengths",
    "SPON_COUPLING_CONSTANT",
    "c_spon",
    "measurement_strength",
    "measurement_strength_photon_form",
    "optical_depths",
    "derive_strengths",
    "faraday_prefactor",
    "faraday_angle",
    "squeezing_with_decay",
    "optimal_strength",
    "inefficiency_optimum",
]

_CONFIG_FIELDS = (
    "gamma",
    "delta",
    "wavelength",
    "area",
    "length",
    "density",
    "N_a",
    "chi_sq_integral",
    "N_ph",
)


@dataclass(frozen=True)
class PhysicalConfig:
    """Experimental parameters, SI units throughout.

    chi_sq_integral is the time integral of the squared Rabi frequency over
    the pulse, in 1/s.
    """

    gamma: float
    delta: float
    wavelength: float
    area: float
    length: float
    density: float
    N_a: int
    chi_sq_integral: float
    N_ph: float

    def __post_init__(self):
        for name in _CONFIG_FIELDS:
            value = getattr(self, name)
            if name in ("chi_sq_integral", "N_ph"):
                if value < 0:
                    raise ConfigError(f"{name} must be >= 0, got {value}")
            elif name == "delta":
                if value == 0:
                    raise ConfigError("delta must be nonzero")
            elif value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")

    @classmethod
    def from_json(cls, source: str | Path) -> "PhysicalConfig":
        """Load from a JSON document with exactly the dataclass field names."""
        text = Path(source).read_text() if isinstance(source, Path) else source
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(_CONFIG_FIELDS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = set(_CONFIG_FIELDS) - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**{k: (int(data[k]) if k == "N_a" else float(data[k])) for k in _CONFIG_FIELDS})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from exc

    def advisory_warnings(self) -> list[str]:
        """Soft sanity checks; violations warn but never fail."""
        notes = []
        if abs(self.delta) / self.gamma < 10:
            notes.append(
                f"|delta|/gamma = {abs(self.delta) / self.gamma:.3g} < 10; far-off-resonance assumption is strained"
            )
        fresnel = self.area / (self.wavelength * self.length)
        if not 0.1 <= fresnel <= 10:
            notes.append(f"Fresnel number {fresnel:.3g} outside [0.1, 10]")
        implied = self.density * self.area * self.length
        if abs(implied - self.N_a) > 0.01 * self.N_a:
            notes.append(
                f"N_a = {self.N_a} inconsistent with density*area*length = {implied:.4g} (>1%)"
            )
        return notes


@dataclass(frozen=True)
class DerivedStrengths:
    C: float
    C_spon: float
    d_res: float
    eta: float
    C_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def c_spon(config: PhysicalConfig) -> float:
    """sqrt(gamma * integral(|chi|^2 dt) / delta^2): single-atom emission amplitude."""
    return math.sqrt(config.gamma * config.chi_sq_integral) / abs(config.delta)


def measurement_strength(config: PhysicalConfig) -> float:
    """C = [3/(16 pi^2) (lambda^2/A) C_spon^2]^(1/2)."""
    cs = c_spon(config)
    return math.sqrt(
        SPON_COUPLING_CONSTANT * (config.wavelength**2 / config.area) * cs * cs
    )


def measurement_strength_photon_form(config: PhysicalConfig) -> float:
    """Cross-check form C ~ (gamma/delta) (d_res/N_a) sqrt(N_ph)."""
    d_res = config.density * config.wavelength**2 * config.length
    return (config.gamma / abs(config.delta)) * (d_res / config.N_a) * math.sqrt(config.N_ph)


def optical_depths(config: PhysicalConfig) -> tuple[float, float, float]:
    """(d_res, eta, C_bound): resonant depth, photon loss per atom, strength bound."""
    d_res = config.density * config.wavelength**2 * config.length
    eta = (d_res / config.N_a) * (config.gamma / config.delta) ** 2 * config.N_ph
    c_bound = math.sqrt(d_res / config.N_a)
    return d_res, eta, c_bound


def derive_strengths(config: PhysicalConfig) -> DerivedStrengths:
    d_res, eta, c_bound = optical_depths(config)
    return DerivedStrengths(
        C=measurement_strength(config),
        C_spon=c_spon(config),
        d_res=d_res,
        eta=eta,
        C_bound=c_bound,
    )


_SPEED_OF_LIGHT = 299_792_458.0  # m/s


def faraday_prefactor(config: PhysicalConfig, dipole_sq_over_hbar_eps0: float) -> float:
    """Composite constant 2 p^2 Omega / (hbar Delta c eps0 A).

    The dipole constants enter only through the single caller-supplied
    combination p^2/(hbar eps0); the carrier frequency comes from the
    configured wavelength.
    """
    if dipole_sq_over_hbar_eps0 < 0:
        raise DomainError("dipole_sq_over_hbar_eps0 must be >= 0")
    omega = 2.0 * math.pi * _SPEED_OF_LIGHT / config.wavelength
    return (
        2.0 * dipole_sq_over_hbar_eps0 * omega
        / (config.delta * _SPEED_OF_LIGHT * config.area)
    )


def faraday_angle(prefactor: float, mean_sz: float) -> float:
    """Mean polarization rotation: prefactor * <S_z>; linear and odd in <S_z>."""
    return prefactor * mean_sz


def squeezing_with_decay(c: float, n_atoms: int, d_res: float) -> float:
    """Decay-corrected squeezing, sqrt(2) / (sqrt(S) C e^{-C^2 N_a / d_res}).

    Valid in the regime C >> 1/sqrt(S); a warning is emitted outside it.
    """
    if c <= 0:
        raise DomainError(f"pulse strength must be > 0, got {c}")
    if n_atoms < 1 or d_res <= 0:
        raise DomainError("need n_atoms >= 1 and d_res > 0")
    s = n_atoms / 2.0
    if c < 1.0 / math.sqrt(s):
        warnings.warn(
            f"C = {c:.3g} below 1/sqrt(S) = {1 / math.sqrt(s):.3g}; formula regime strained",
            stacklevel=2,
        )
    return math.sqrt(2.0) / (math.sqrt(s) * c * math.exp(-c * c * n_atoms / d_res))


def optimal_strength(n_atoms: int, d_res: float) -> tuple[float, float]:
    """Closed-form optimum: C_opt = sqrt(d_res/(2 N_a)), xi_min = 2 sqrt(e)/sqrt(d_res).

    The closed-form C_opt is cross-checked against a 1-D numerical
    minimization of squeezing_with_decay over (0, 10 C_opt].
    """
    if d_res <= 0 or n_atoms < 1:
        raise DomainError("need d_res > 0 and n_atoms >= 1")
    c_opt = math.sqrt(d_res / (2.0 * n_atoms))
    xi_min = 2.0 * math.sqrt(math.e) / math.sqrt(d_res)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = minimize_scalar(
            lambda c: squeezing_with_decay(c, n_atoms, d_res),
            bounds=(1e-12, 10.0 * c_opt),
            method="bounded",
            options={"xatol": 1e-12},
        )
    if abs(result.x - c_opt) > 1e-6 * c_opt:
        raise ConsistencyError(
            f"numerical minimizer {result.x} disagrees with closed form {c_opt}"
        )
    return c_opt, xi_min


def inefficiency_optimum(n_atoms: int, mu: float) -> float:
    """Estimated best strength under inefficient detection: 1/sqrt(1-mu)."""
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"efficiency must lie in [0,1], got {mu}")
    if mu == 1.0:
        return math.inf
    return 1.0 / math.sqrt(1.0 - mu)
