import math

import pytest

from dickesim.physical_params import PhysicalConfig


def consistent_config(
    wavelength: float = 852e-9,
    area: float = 5e-8,
    length: float = 1e-2,
    n_atoms: int = 6_900_000,
    gamma: float = 2 * math.pi * 5.2e6,
    delta: float = 2 * math.pi * 1.0e9,
    n_ph: float = 1e8,
) -> PhysicalConfig:
    """A self-consistent laboratory config.

    The atomic density is fixed so that N_a = density * area * length exactly,
    and the pulse energy integral is fixed so that the spontaneous-emission
    and photon-number forms of the measurement strength coincide exactly.
    """
    density = n_atoms / (area * length)
    chi_sq_integral = (16.0 * math.pi**2 / 3.0) * gamma * n_ph * wavelength**2 / area
    return PhysicalConfig(
        gamma=gamma,
        delta=delta,
        wavelength=wavelength,
        area=area,
        length=length,
        density=density,
        N_a=n_atoms,
        chi_sq_integral=chi_sq_integral,
        N_ph=n_ph,
    )


@pytest.fixture
def lab_config() -> PhysicalConfig:
    return consistent_config()
