"""Parity-resolved stationary states of the 1D double-well condensate.

The stationary problem mu*phi = (-d^2/dxi^2 + V + g|phi|^2) phi is solved
on a uniform grid with Dirichlet ends using the standard three-point
Laplacian. Relaxation is a normalized gradient flow discretized with
backward Euler: each step solves a tridiagonal system with the density
lagged one step, then projects onto the requested parity sector and
renormalizes. The fixed point of that map satisfies the discrete
eigenproblem exactly (no splitting bias), so the converged states agree
with the tridiagonal oracle to solver tolerance, and the step size only
controls how fast the flow contracts, never what it converges to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from ringbdg.ring_model import Parity


class ConvergenceError(RuntimeError):
    """Relaxation hit the iteration cap before meeting the tolerances."""


class DomainError(RuntimeError):
    """The wavefunction tail does not vanish at the box edge."""


@dataclass(frozen=True)
class DWellParams:
    """Double-well problem definition: h*(xi^2 - xi0^2)^2 plus interaction.

    half_length defaults to twice the well position; the solver extends it
    automatically (rescaling n_grid to keep the spacing) when the boundary
    tail check fails. n_grid must be odd so xi = 0 is a grid point.
    """

    xi0: float
    h: float
    g_tilde: float = 0.0
    half_length: float | None = None
    n_grid: int = 1201

    def __post_init__(self):
        if not self.xi0 > 0:
            raise ValueError("xi0 must be positive")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.half_length is None:
            object.__setattr__(self, "half_length", 2.0 * self.xi0)
        if not self.half_length > self.xi0:
            raise ValueError("half_length must exceed xi0")
        if self.n_grid < 201 or self.n_grid % 2 == 0:
            raise ValueError("n_grid must be odd and at least 201")

    @property
    def dxi(self) -> float:
        return 2.0 * self.half_length / (self.n_grid - 1)

    def grid(self) -> np.ndarray:
        """Symmetric grid: xi[n-1-i] == -xi[i] exactly, xi=0 included."""
        half = (self.n_grid - 1) // 2
        return (np.arange(self.n_grid) - half) * self.dxi


def potential(xi, params: DWellParams):
    """Quartic double well h*(xi^2 - xi0^2)^2, minima at +-xi0."""
    return params.h * (np.asarray(xi, dtype=float) ** 2 - params.xi0**2) ** 2


@dataclass(frozen=True)
class DWellSolution:
    """Converged stationary state of one parity sector."""

    parity: Parity
    params: DWellParams  # params actually solved (domain may have grown)
    xi: np.ndarray
    phi: np.ndarray
    mu: float
    energy: float
    residual: float
    iterations: int
    converged: bool

    def value_at_center(self) -> float:
        return float(self.phi[(len(self.phi) - 1) // 2])


def _apply_hamiltonian(phi, v_eff, dxi):
    out = np.zeros_like(phi)
    out[1:-1] = (
        -(phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / dxi**2 + v_eff[1:-1] * phi[1:-1]
    )
    return out


def _functionals(phi, v, g, dxi):
    """(energy, mu) from the grid-consistent quadratic forms."""
    kin_pot = float(np.sum(phi * _apply_hamiltonian(phi, v, dxi)) * dxi)
    quart = float(np.sum(phi**4) * dxi)
    return kin_pot + 0.5 * g * quart, kin_pot + g * quart


def _relax(v, g, dxi, phi0, parity, dtau, mu_tol, residual_tol, max_iterations):
    """Backward-Euler flow with parity projection and renormalization.

    dtau starts at the requested value, halves whenever a step raises the
    energy (the step is rejected), and doubles after a run of accepted
    steps; the converged state does not depend on it.
    """
    n = len(v)
    sgn = float(parity.sign)
    kin = 1.0 / dxi**2

    def project(p):
        q = 0.5 * (p + sgn * p[::-1])
        q[0] = q[-1] = 0.0
        return q

    def normalize(p):
        return p / math.sqrt(float(np.sum(p * p)) * dxi)

    phi = normalize(project(np.asarray(phi0, dtype=float).copy()))
    energy, _ = _functionals(phi, v, g, dxi)
    ab = np.zeros((3, n - 2))
    mu_prev = math.inf
    accepted_run = 0
    iterations = 0
    while iterations < max_iterations:
        iterations += 1
        v_eff = v[1:-1] + g * phi[1:-1] ** 2
        ab[0, 1:] = -dtau * kin
        ab[1, :] = 1.0 + dtau * (2.0 * kin + v_eff)
        ab[2, :-1] = -dtau * kin
        trial = np.zeros(n)
        trial[1:-1] = solve_banded((1, 1), ab, phi[1:-1])
        trial = normalize(project(trial))
        trial_energy, _ = _functionals(trial, v, g, dxi)
        if trial_energy > energy + 1e-13 * max(1.0, abs(energy)):
            dtau = max(0.5 * dtau, 1e-8)
            accepted_run = 0
            continue
        phi = trial
        energy = trial_energy
        accepted_run += 1
        if accepted_run >= 10 and dtau < 0.5:
            dtau *= 2.0
            accepted_run = 0
        if iterations % 20 == 0 or iterations == max_iterations:
            v_full = v + g * phi**2
            mu = float(np.sum(phi * _apply_hamiltonian(phi, v_full, dxi)) * dxi)
            residual = float(
                np.max(np.abs(_apply_hamiltonian(phi, v_full, dxi) - mu * phi))
            )
            if abs(mu - mu_prev) < mu_tol and residual < residual_tol:
                return phi, mu, residual, iterations
            mu_prev = mu
    v_full = v + g * phi**2
    mu = float(np.sum(phi * _apply_hamiltonian(phi, v_full, dxi)) * dxi)
    residual = float(np.max(np.abs(_apply_hamiltonian(phi, v_full, dxi) - mu * phi)))
    raise ConvergenceError(
        f"not converged after {iterations} iterations "
        f"(|dmu| target {mu_tol:g}, residual {residual:.3e} vs {residual_tol:g})"
    )


def _default_guess(xi, v, parity):
    """Gaussians in each well, combined with the requested parity."""
    n = len(xi)
    right = slice((n - 1) // 2, n)
    i_min = (n - 1) // 2 + int(np.argmin(v[right]))
    xi_min = xi[i_min]
    dxi = xi[1] - xi[0]
    curv = max((v[min(i_min + 1, n - 1)] - 2 * v[i_min] + v[i_min - 1]) / dxi**2, 1e-3)
    width = curv ** 0.25  # local harmonic frequency sets the well width
    g_right = np.exp(-0.5 * width * (xi - xi_min) ** 2)
    g_left = g_right[::-1]
    guess = g_right + parity.sign * g_left
    if np.max(np.abs(guess)) < 1e-6:  # odd sector of a single central well
        guess = xi * g_right
    return guess


def solve_stationary(
    params: DWellParams,
    parity: Parity,
    potential_fn=None,
    initial: np.ndarray | None = None,
    dtau: float = 1e-4,
    mu_tol: float = 1e-10,
    residual_tol: float = 1e-8,
    max_iterations: int = 500_000,
    boundary_tol: float = 1e-8,
    max_extensions: int = 8,
) -> DWellSolution:
    """Lowest normalized stationary state within the given parity sector.

    potential_fn overrides the quartic double well (used for validation
    against exactly solvable traps). If the converged tail at the box edge
    exceeds boundary_tol, the domain is grown by 25% (grid spacing kept)
    and the solve repeats; after max_extensions failures a DomainError is
    raised.
    """
    current = params
    for _ in range(max_extensions + 1):
        xi = current.grid()
        v = potential(xi, current) if potential_fn is None else np.asarray(
            potential_fn(xi), dtype=float
        )
        if initial is not None and len(initial) == len(xi):
            phi0 = np.asarray(initial, dtype=float)
        elif initial is not None:
            # domain changed under the caller: reuse the shape by interpolation
            old = np.linspace(xi[0], xi[-1], len(initial))
            phi0 = np.interp(xi, old, np.asarray(initial, dtype=float))
        else:
            phi0 = _default_guess(xi, v, parity)
        phi, mu, residual, iterations = _relax(
            v, current.g_tilde, current.dxi, phi0, parity,
            dtau, mu_tol, residual_tol, max_iterations,
        )
        tail = max(abs(phi[1]), abs(phi[-2]))
        if tail <= boundary_tol:
            # sign convention: positive in the right-hand well
            right = phi[(len(phi) - 1) // 2 :]
            if right[int(np.argmax(np.abs(right)))] < 0:
                phi = -phi
            energy, _ = _functionals(phi, v, current.g_tilde, current.dxi)
            return DWellSolution(
                parity=parity,
                params=current,
                xi=xi,
                phi=phi,
                mu=mu,
                energy=energy,
                residual=residual,
                iterations=iterations,
                converged=True,
            )
        new_half = 1.25 * current.half_length
        new_n = int(round((current.n_grid - 1) * new_half / current.half_length)) + 1
        if new_n % 2 == 0:
            new_n += 1
        current = replace(current, half_length=new_half, n_grid=new_n)
        initial = None  # the tail was wrong; restart from the default guess
    raise DomainError(
        f"domain too small: tail {tail:.3e} > {boundary_tol:g} at "
        f"half_length {current.half_length:g} after {max_extensions} extensions"
    )


def linear_oracle(
    params: DWellParams, potential_fn=None
) -> tuple[tuple[float, float], tuple[np.ndarray, np.ndarray]]:
    """Two lowest eigenpairs of the linear problem -d^2/dxi^2 + V.

    Independent verification route for the g = 0 limit: eigenvalues come
    from bisection on the Sturm sign-count of the shifted tridiagonal
    matrix, eigenvectors from inverse iteration (parity-projected, since
    the even potential makes the exact eigenvectors parity eigenstates and
    near-degenerate tunneling doublets would otherwise mix freely).
    """
    xi = params.grid()
    v = potential(xi, params) if potential_fn is None else np.asarray(
        potential_fn(xi), dtype=float
    )
    dxi = params.dxi
    diag = 2.0 / dxi**2 + v[1:-1]
    off = -1.0 / dxi**2
    n_i = len(diag)

    def count_below(lam: float) -> int:
        # Sturm sequence via the LDL^T pivots: negatives count eigenvalues < lam
        pivmin = 1e-300
        count = 0
        d = diag[0] - lam
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0:
            count += 1
        off2 = off * off
        for i in range(1, n_i):
            d = diag[i] - lam - off2 / d
            if abs(d) < pivmin:
                d = -pivmin
            if d < 0:
                count += 1
        return count

    lo0 = float(np.min(diag)) - 2.0 * abs(off)
    hi0 = float(np.max(diag)) + 2.0 * abs(off)
    values = []
    for k in (1, 2):
        lo, hi = lo0, hi0
        while hi - lo > 1e-14 * max(1.0, abs(hi)):
            mid = 0.5 * (lo + hi)
            if count_below(mid) >= k:
                hi = mid
            else:
                lo = mid
        values.append(0.5 * (lo + hi))

    vectors = []
    for lam, parity in zip(values, (Parity.SYMMETRIC, Parity.ANTISYMMETRIC)):
        shifted = diag - (lam - 1e-10 * max(1.0, abs(lam)))
        ab = np.zeros((3, n_i))
        ab[0, 1:] = off
        ab[1, :] = shifted
        ab[2, :-1] = off
        vec = _default_guess(xi, v, parity)[1:-1]
        for _ in range(4):
            vec = solve_banded((1, 1), ab, vec)
            half = 0.5 * (vec + parity.sign * vec[::-1])
            if np.linalg.norm(half) > 1e-8 * np.linalg.norm(vec):
                vec = half
            vec /= np.linalg.norm(vec)
        full = np.zeros(len(xi))
        full[1:-1] = vec / math.sqrt(dxi)
        if full[int(np.argmax(np.abs(full)))] < 0:
            full = -full
        vectors.append(full)
    return (values[0], values[1]), (vectors[0], vectors[1])


def delta_as(params: DWellParams, **solver_kwargs) -> tuple[float, float]:
    """Antisymmetric-minus-symmetric gap (energy functional, mu)."""
    sym = solve_stationary(params, Parity.SYMMETRIC, **solver_kwargs)
    anti = solve_stationary(params, Parity.ANTISYMMETRIC, **solver_kwargs)
    return anti.energy - sym.energy, anti.mu - sym.mu


@dataclass(frozen=True)
class SplittingRow:
    g_tilde: float
    e_sym: float
    e_anti: float
    delta_e: float
    mu_sym: float
    mu_anti: float
    delta_mu: float
    converged: bool
    error: str | None = None


@dataclass(frozen=True)
class SplittingCurve:
    xi0: float
    h: float
    rows: tuple[SplittingRow, ...]

    @property
    def all_converged(self) -> bool:
        return all(row.converged for row in self.rows)


def sweep_g(params: DWellParams, g_values, **solver_kwargs) -> SplittingCurve:
    """Splitting curve over interaction strengths, warm-starting each solve.

    g_values must be sorted ascending. A failed solve is recorded in its
    row (NaN observables) and the sweep continues from the last good state.
    """
    g_values = [float(g) for g in g_values]
    if any(b < a for a, b in zip(g_values, g_values[1:])):
        raise ValueError("g_values must be sorted ascending")
    rows = []
    warm: dict[Parity, DWellSolution] = {}
    for g in g_values:
        run_params = replace(params, g_tilde=g)
        solutions = {}
        failure = None
        for parity in (Parity.SYMMETRIC, Parity.ANTISYMMETRIC):
            try:
                prev = warm.get(parity)
                initial = None
                if prev is not None:
                    initial = prev.phi
                    run_params_p = replace(
                        run_params,
                        half_length=prev.params.half_length,
                        n_grid=prev.params.n_grid,
                    )
                else:
                    run_params_p = run_params
                solutions[parity] = solve_stationary(
                    run_params_p, parity, initial=initial, **solver_kwargs
                )
                warm[parity] = solutions[parity]
            except (ConvergenceError, DomainError) as exc:
                failure = f"{parity.value}: {exc}"
                break
        if failure is None:
            sym = solutions[Parity.SYMMETRIC]
            anti = solutions[Parity.ANTISYMMETRIC]
            rows.append(
                SplittingRow(
                    g_tilde=g,
                    e_sym=sym.energy,
                    e_anti=anti.energy,
                    delta_e=anti.energy - sym.energy,
                    mu_sym=sym.mu,
                    mu_anti=anti.mu,
                    delta_mu=anti.mu - sym.mu,
                    converged=True,
                )
            )
        else:
            nan = float("nan")
            rows.append(
                SplittingRow(
                    g_tilde=g, e_sym=nan, e_anti=nan, delta_e=nan,
                    mu_sym=nan, mu_anti=nan, delta_mu=nan,
                    converged=False, error=failure,
                )
            )
    return SplittingCurve(xi0=params.xi0, h=params.h, rows=tuple(rows))
