"""Linear excitation spectrum around the uniform two-ring states.

Each angular mode m carries two branches. omega1 never feels the tunnel
coupling; omega2 is shifted by 2|kappa| with a sign fixed by the background
parity and the sign of the coupling. Both squares are real, so every
frequency is either purely real (oscillation) or purely imaginary
(exponential growth); the imaginary branch is reported with Im >= 0 and a
positive imaginary part above the roundoff threshold marks a dynamical
instability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ringbdg.ring_model import Parity, RingParams, epsilon

# Im(omega) above this counts as a genuine instability; exact marginal
# modes (thresholds, the m=0 global-phase zero) sit at 0 by construction.
INSTABILITY_THRESHOLD = 1e-9


class BdgSelfCheckError(RuntimeError):
    """A reported eigenvalue failed the determinant residual check."""


def _branch_root(square: float) -> complex:
    """Principal square root of a real number, Im >= 0 when negative."""
    if square >= 0.0:
        return complex(math.sqrt(square), 0.0)
    return complex(0.0, math.sqrt(-square))


def _role_sign(background: Parity, kappa_sign: int) -> int:
    # +1 when this parity is the ground state for the given coupling sign
    # (its tunnel branch is stiffened), -1 when it is the excited state.
    return -kappa_sign * background.sign


# The squared frequencies (m^2 + eps + shift)^2 - eps^2 are evaluated in the
# factored form (m^2 + shift) * (m^2 + 2 eps + shift): subtracting the large
# squares would leave a rounding remainder that the square root amplifies to
# ~1e-8 exactly on the marginal branches (every m=0 phase mode, every
# instability threshold), where the factored form gives exact zeros.

def _square1(m: int, eps: float) -> float:
    m2 = float(m * m)
    return m2 * (m2 + 2.0 * eps)


def _square2(m: int, eps: float, kappa_mag: float, background: Parity, kappa_sign: int) -> float:
    m2 = float(m * m)
    shift = 2.0 * _role_sign(background, kappa_sign) * kappa_mag
    return (m2 + shift) * (m2 + 2.0 * eps + shift)


def omega1(m: int, eps: float) -> complex:
    """Tunnel-independent branch sqrt((m^2 + eps)^2 - eps^2)."""
    return _branch_root(_square1(m, eps))


def omega2(
    m: int,
    eps: float,
    kappa_mag: float,
    background: Parity,
    kappa_sign: int = -1,
) -> complex:
    """Tunnel-coupled branch sqrt((m^2 + eps +- 2|kappa|)^2 - eps^2).

    The + shift belongs to the ground-state parity of the given coupling
    sign (symmetric for kappa_sign = -1) and keeps the branch real for all
    eps >= 0; the excited parity takes the - shift and turns imaginary for
    eps > |kappa| - m^2/2 > 0.
    """
    if kappa_mag < 0:
        raise ValueError("kappa_mag must be non-negative")
    return _branch_root(_square2(m, eps, kappa_mag, background, kappa_sign))


@dataclass(frozen=True)
class ModeFrequency:
    """Both branch frequencies of one angular mode."""

    m: int
    omega1: complex
    omega2: complex

    @property
    def growth_rate(self) -> float:
        return max(self.omega1.imag, self.omega2.imag)


def mode_frequency(
    m: int,
    eps: float,
    kappa_mag: float,
    background: Parity,
    kappa_sign: int = -1,
) -> ModeFrequency:
    return ModeFrequency(
        m=m,
        omega1=omega1(m, eps),
        omega2=omega2(m, eps, kappa_mag, background, kappa_sign),
    )


@dataclass(frozen=True)
class BdgBlock:
    """4x4 linearization of the coupled ring equations for one mode.

    The matrix acts on (u_up, u_down, v_up, v_down), the v's belonging to
    the -m Fourier component. Rows 1-2 carry the diagonal m^2 + eps -+
    |kappa| (sign set by the background role), the inter-ring coupling
    kappa_sign * |kappa| inherited from the field equations, and the
    anomalous +eps coupling to v; rows 3-4 are the negated mirror, so the
    eigenvalues come in +- pairs.
    """

    m: int
    eps: float
    kappa_mag: float
    background: Parity
    kappa_sign: int
    matrix: np.ndarray

    @property
    def diagonal(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def coupling(self) -> float:
        return float(self.matrix[0, 1])


def bdg_block(
    m: int,
    eps: float,
    kappa_mag: float,
    background: Parity,
    kappa_sign: int = -1,
) -> BdgBlock:
    """Build the per-mode linearization around the chosen uniform state."""
    if kappa_mag < 0:
        raise ValueError("kappa_mag must be non-negative")
    if kappa_sign not in (-1, 1):
        raise ValueError("kappa_sign must be -1 or +1")
    # mu = eps + kappa_sign * parity.sign * |kappa| is removed from the
    # diagonal, leaving d = m^2 + eps - kappa_sign * parity.sign * |kappa|.
    d = m * m + eps - kappa_sign * background.sign * kappa_mag
    c = kappa_sign * kappa_mag
    matrix = np.array(
        [
            [d, c, eps, 0.0],
            [c, d, 0.0, eps],
            [-eps, 0.0, -d, -c],
            [0.0, -eps, -c, -d],
        ]
    )
    return BdgBlock(
        m=m,
        eps=eps,
        kappa_mag=kappa_mag,
        background=background,
        kappa_sign=kappa_sign,
        matrix=matrix,
    )


def bdg_eigenvalues(block: BdgBlock) -> np.ndarray:
    """All four eigenvalues of the block, as (w1, -w1, w2, -w2).

    The block is block-diagonalized exactly by the in-phase/out-of-phase
    combinations of the two rings: each channel is a 2x2 of the form
    [[a, eps], [-eps, -a]] with eigenvalues +-sqrt(a^2 - eps^2). In the
    channel whose ring combination matches the background parity the
    tunnel terms cancel identically, leaving the coupling-free branch; the
    squares are evaluated in the same exact factored form as the branch
    functions. Every reported eigenvalue is verified against the stored
    matrix through its characteristic determinant; a violation raises
    BdgSelfCheckError.
    """
    w1 = _branch_root(_square1(block.m, block.eps))
    w2 = _branch_root(
        _square2(block.m, block.eps, block.kappa_mag, block.background, block.kappa_sign)
    )
    values = np.array([w1, -w1, w2, -w2])

    norm = np.linalg.norm(block.matrix)
    tol = 1e-9 * max(norm, 1e-30) ** 4
    eye = np.eye(4)
    for w in values:
        # an exactly singular shift trips numpy's divide-by-zero warning in
        # the LU sign computation; that is the expected success case here
        with np.errstate(divide="ignore", invalid="ignore"):
            residual = abs(np.linalg.det(block.matrix - w * eye))
        if residual > tol:
            raise BdgSelfCheckError(
                f"det(M - w I) = {residual:.3e} exceeds {tol:.3e} "
                f"for w = {w} (m={block.m}, eps={block.eps}, "
                f"kappa={block.kappa_mag}, {block.background.value})"
            )
    return values


@dataclass(frozen=True)
class StabilityReport:
    """Mode-by-mode stability classification of one uniform background."""

    params: RingParams
    background: Parity
    m_max: int
    modes: tuple[ModeFrequency, ...]
    unstable_modes: tuple[tuple[int, float], ...]
    max_growth: tuple[int, float]  # (m_star, rate); m_star = -1 when stable

    @property
    def is_stable(self) -> bool:
        return not self.unstable_modes


def stability_report(params: RingParams, background: Parity, m_max: int) -> StabilityReport:
    """Scan modes m = 0..m_max around the uniform state of given parity.

    A mode is unstable when either branch has Im(omega) above the roundoff
    threshold. The m=0 global-phase zero of omega1 is an exact marginal
    mode and never classifies as unstable; the m=0 tunnel branch can be
    genuinely unstable (inter-ring population transfer out of the excited
    state once eps exceeds |kappa|).
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    eps = epsilon(params)
    modes = tuple(
        mode_frequency(m, eps, params.kappa_mag, background, params.kappa_sign)
        for m in range(m_max + 1)
    )
    unstable = tuple(
        (mode.m, mode.growth_rate)
        for mode in modes
        if mode.growth_rate > INSTABILITY_THRESHOLD
    )
    if unstable:
        m_star, rate = max(unstable, key=lambda pair: pair[1])
    else:
        m_star, rate = -1, 0.0
    return StabilityReport(
        params=params,
        background=background,
        m_max=m_max,
        modes=modes,
        unstable_modes=unstable,
        max_growth=(m_star, rate),
    )
