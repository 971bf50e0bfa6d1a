"""Polytropic equation-of-state algebra and potential-flow state relations.

Conventions: the Bernoulli function pi(rho) is normalized so that
pi(rho) = c(rho)^2 / (gamma - 1), which makes its inverse closed-form and its
argument positive for every admissible state.  The pseudo-potential chi then
satisfies rho = pi^{-1}(-chi - |grad chi|^2 / 2).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CavitationError, DomainError


@dataclass(frozen=True)
class GasConstants:
    """Polytropic gas parameters: ratio of heats and reference density/sound speed."""

    gamma: float = 1.4
    rho0: float = 1.0
    c0: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must be > 1, got {self.gamma}")
        if not self.rho0 > 0.0:
            raise DomainError(f"rho0 must be > 0, got {self.rho0}")
        if not self.c0 > 0.0:
            raise DomainError(f"c0 must be > 0, got {self.c0}")


@dataclass(frozen=True, eq=False)
class FluidState:
    """Constant fluid state of a sector: density, sound speed, velocity."""

    rho: float
    c: float
    v: np.ndarray

    def __post_init__(self):
        if not self.rho > 0.0:
            raise DomainError(f"rho must be > 0, got {self.rho}")
        if not self.c > 0.0:
            raise DomainError(f"c must be > 0, got {self.c}")
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    @property
    def speed(self):
        return float(np.hypot(self.v[0], self.v[1]))

    @property
    def mach(self):
        return self.speed / self.c


@dataclass(frozen=True, eq=False)
class PseudoState:
    """Self-similar observer state at a point xi: pseudo-velocity and pseudo-Mach."""

    xi: np.ndarray
    z: np.ndarray
    L: float


def make_state(rho, c, v):
    return FluidState(rho=float(rho), c=float(c), v=np.asarray(v, dtype=float))


def state_from_rho(rho, v, k):
    """FluidState with sound speed from the polytropic law."""
    return make_state(rho, sound_speed(rho, k), v)


def pressure(rho, k):
    """p(rho) = rho0 c0^2 / gamma * (rho/rho0)^gamma."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("pressure requires rho > 0")
    out = (k.rho0 * k.c0 ** 2 / k.gamma) * (rho / k.rho0) ** k.gamma
    return float(out) if out.ndim == 0 else out


def sound_speed(rho, k):
    """c(rho) from c^2 = c0^2 (rho/rho0)^(gamma-1)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("sound_speed requires rho > 0")
    out = k.c0 * (rho / k.rho0) ** (0.5 * (k.gamma - 1.0))
    return float(out) if out.ndim == 0 else out


def density_from_sound_speed(c, k):
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0.0):
        raise DomainError("density_from_sound_speed requires c > 0")
    out = k.rho0 * (c / k.c0) ** (2.0 / (k.gamma - 1.0))
    return float(out) if out.ndim == 0 else out


def pi_of_rho(rho, k):
    """pi(rho) = c(rho)^2 / (gamma - 1), the Bernoulli enthalpy term.

    Satisfies d(pi)/d(rho) = c^2 / rho.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise DomainError("pi_of_rho requires rho > 0")
    out = k.c0 ** 2 / (k.gamma - 1.0) * (rho / k.rho0) ** (k.gamma - 1.0)
    return float(out) if out.ndim == 0 else out


def rho_from_pi(q, k):
    """Closed-form inverse of pi_of_rho; q must be positive."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0):
        raise CavitationError("pi^{-1} argument must be positive")
    out = k.rho0 * ((k.gamma - 1.0) * q / k.c0 ** 2) ** (1.0 / (k.gamma - 1.0))
    return float(out) if out.ndim == 0 else out


def _bernoulli_argument(chi, grad_chi):
    grad_chi = np.asarray(grad_chi, dtype=float)
    return -chi - 0.5 * float(grad_chi @ grad_chi)


def rho_from_chi(chi, grad_chi, k):
    """Density from the pseudo-potential: rho = pi^{-1}(-chi - |grad chi|^2/2)."""
    q = _bernoulli_argument(chi, grad_chi)
    if q <= 0.0:
        raise CavitationError(
            f"cavitated state: -chi - |grad chi|^2/2 = {q} <= 0")
    return rho_from_pi(q, k)


def sound_speed_from_chi(chi, grad_chi, k):
    """Sound speed from the pseudo-potential: c^2 = (gamma-1)(-chi - |grad chi|^2/2)."""
    q = _bernoulli_argument(chi, grad_chi)
    c2 = (k.gamma - 1.0) * q
    if c2 <= 0.0:
        raise CavitationError(f"cavitated state: c^2 = {c2} <= 0")
    return float(np.sqrt(c2))


def pseudo_mach(v, xi, c):
    """L = |v - xi| / c; L < 1 marks the elliptic (pseudo-subsonic) region."""
    if not c > 0.0:
        raise DomainError(f"sound speed must be > 0, got {c}")
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float)
    z = v - xi
    return float(np.hypot(z[0], z[1])) / c


def pseudo_state(v, xi, c):
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float)
    z = v - xi
    return PseudoState(xi=xi, z=z, L=pseudo_mach(v, xi, c))
