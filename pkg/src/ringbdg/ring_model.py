"""Two-ring model parameters and the analytic uniform stationary states.

Everything is dimensionless: angles parameterize position on each ring,
the kinetic term is -d^2/dphi^2, and the tunnel coupling enters the
coupled equations as kappa_sign * |kappa| times the other ring's field.
The physical coupling through a barrier is negative (kappa_sign = -1);
the positive sign is kept as a switch because it exchanges the roles of
the symmetric and antisymmetric superpositions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


class Parity(enum.Enum):
    """Relative sign of the two ring amplitudes in a uniform state."""

    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"

    @property
    def sign(self) -> int:
        return 1 if self is Parity.SYMMETRIC else -1

    @property
    def other(self) -> "Parity":
        return Parity.ANTISYMMETRIC if self is Parity.SYMMETRIC else Parity.SYMMETRIC


@dataclass(frozen=True)
class RingParams:
    """Dimensionless parameters of the coupled double-ring condensate.

    kappa_mag   magnitude of the tunnel coupling, >= 0
    kappa_sign  -1 (physical, barrier coupling) or +1 (hypothetical)
    gamma       interaction strength; negative for an attractive gas
    n0          atoms per ring, > 0
    """

    kappa_mag: float
    kappa_sign: int = -1
    gamma: float = 0.0
    n0: float = TWO_PI

    def __post_init__(self):
        if self.kappa_mag < 0:
            raise ValueError("kappa_mag must be non-negative")
        if self.kappa_sign not in (-1, 1):
            raise ValueError("kappa_sign must be -1 or +1")
        if not self.n0 > 0:
            raise ValueError("n0 must be positive")

    @classmethod
    def from_epsilon(cls, eps: float, kappa_mag: float, kappa_sign: int = -1) -> "RingParams":
        """Build params with a prescribed mean-field shift eps.

        Uses the canonical normalization n0 = 2*pi, so gamma = eps and the
        uniform background is |chi| = 1. The excitation spectra depend on
        (eps, kappa) only, so this is the natural entry point for stability
        work that does not care about the atom number.
        """
        return cls(kappa_mag=kappa_mag, kappa_sign=kappa_sign, gamma=eps, n0=TWO_PI)

    @property
    def kappa_signed(self) -> float:
        """Coupling coefficient as it appears in the field equations."""
        return self.kappa_sign * self.kappa_mag


@dataclass(frozen=True)
class UniformState:
    """Spatially uniform stationary state with equal population per ring.

    amplitude is the m=0 Fourier amplitude of the upper ring, fixed on the
    positive real axis (|amplitude|^2 = n0); the lower ring carries
    parity.sign times the same amplitude.
    """

    parity: Parity
    mu: float
    amplitude: complex

    @property
    def amplitude_down(self) -> complex:
        return self.parity.sign * self.amplitude


def epsilon(params: RingParams) -> float:
    """Mean-field interaction shift gamma * n0 / (2*pi) of a uniform ring."""
    return params.gamma * params.n0 / TWO_PI


def stationary_states(params: RingParams) -> tuple[UniformState, UniformState]:
    """Ground and excited uniform states with mu = eps -+ |kappa|.

    For the physical coupling sign the symmetric superposition is the
    ground state; flipping kappa_sign exchanges the parities while leaving
    the pair of chemical potentials unchanged.
    """
    eps = epsilon(params)
    amp = complex(math.sqrt(params.n0), 0.0)
    ground_parity = Parity.SYMMETRIC if params.kappa_sign == -1 else Parity.ANTISYMMETRIC
    ground = UniformState(parity=ground_parity, mu=eps - params.kappa_mag, amplitude=amp)
    excited = UniformState(parity=ground_parity.other, mu=eps + params.kappa_mag, amplitude=amp)
    return ground, excited
