"""Classical driving laser pulse with a sin^2 envelope, in atomic units.

The vector potential is

    A(t) = eps_z * (E0/omega) * sin^2(omega*t / (2*n_cyc)) * sin(omega*t + cep)

for 0 <= t <= T = 2*pi*n_cyc/omega and zero outside.  The electric field is
the analytic derivative E(t) = -dA/dt.  Internally the envelope product is
expanded into three carriers at omega and omega*(1 +/- 1/n_cyc), which is
what makes the closed-form displacement integrals in
:mod:`sfqo.displacement` possible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson


@dataclass(frozen=True)
class LaserPulse:
    """Linearly polarized sin^2 pulse (atomic units).

    omega: carrier angular frequency; e0: peak field amplitude;
    n_cyc: integer number of cycles; cep: carrier-envelope phase (rad).
    """

    omega: float
    e0: float
    n_cyc: int
    cep: float = 0.0
    polarization: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.e0 < 0:
            raise ValueError("e0 must be non-negative")
        if int(self.n_cyc) != self.n_cyc or self.n_cyc < 1:
            raise ValueError("n_cyc must be an integer >= 1")
        pol = np.asarray(self.polarization, dtype=float)
        if not np.isclose(np.linalg.norm(pol), 1.0, atol=1e-12):
            raise ValueError("polarization must be a unit vector")

    @property
    def duration(self) -> float:
        """Total pulse duration T = 2*pi*n_cyc/omega."""
        return 2.0 * np.pi * self.n_cyc / self.omega

    @property
    def a0(self) -> float:
        """Peak of the vector-potential envelope, E0/omega."""
        return self.e0 / self.omega

    @property
    def up(self) -> float:
        """Ponderomotive energy Up = E0^2/(4 omega^2)."""
        return self.e0**2 / (4.0 * self.omega**2)

    def carrier_decomposition(self):
        """Three-carrier expansion of A(t) inside the pulse support.

        Returns (freqs, amps) such that A(t) = sum_j amps[j]*sin(freqs[j]*t + cep).
        For n_cyc == 1 the lower sideband frequency is exactly zero and the
        corresponding term is the constant amps[2]*sin(cep).
        """
        w, n = self.omega, self.n_cyc
        freqs = np.array([w, w * (1.0 + 1.0 / n), w * (1.0 - 1.0 / n)])
        amps = np.array([self.a0 / 2.0, -self.a0 / 4.0, -self.a0 / 4.0])
        return freqs, amps

    def time_grid(self, dt: float = 1.0):
        """Uniform grid over [0, T] with step as close to dt as divides T."""
        n_steps = max(2, int(round(self.duration / dt)))
        return np.linspace(0.0, self.duration, n_steps + 1)


def _support_mask(pulse: LaserPulse, t):
    t = np.asarray(t, dtype=float)
    return (t >= 0.0) & (t <= pulse.duration)


def vector_potential_z(pulse: LaserPulse, t):
    """z-component of A(t); zero outside [0, T]."""
    t = np.asarray(t, dtype=float)
    w, n = pulse.omega, pulse.n_cyc
    env = np.sin(w * t / (2.0 * n)) ** 2
    a = pulse.a0 * env * np.sin(w * t + pulse.cep)
    return np.where(_support_mask(pulse, t), a, 0.0)


def electric_field_z(pulse: LaserPulse, t):
    """z-component of E(t) = -dA/dt, analytic product-rule form."""
    t = np.asarray(t, dtype=float)
    w, n = pulse.omega, pulse.n_cyc
    half = w * t / (2.0 * n)
    dadt = pulse.a0 * (
        (w / n) * np.sin(half) * np.cos(half) * np.sin(w * t + pulse.cep)
        + w * np.sin(half) ** 2 * np.cos(w * t + pulse.cep)
    )
    return np.where(_support_mask(pulse, t), -dadt, 0.0)


def vector_potential(pulse: LaserPulse, t):
    """A(t) as a 3-vector (last axis), zero outside the pulse support."""
    az = vector_potential_z(pulse, t)
    pol = np.asarray(pulse.polarization, dtype=float)
    return np.multiply.outer(az, pol)


def electric_field(pulse: LaserPulse, t):
    """E(t) = -dA/dt as a 3-vector (last axis)."""
    ez = electric_field_z(pulse, t)
    pol = np.asarray(pulse.polarization, dtype=float)
    return np.multiply.outer(ez, pol)


def integral_of_a(pulse: LaserPulse, t):
    """Closed form of int_0^t A_z(s) ds for the sin^2 pulse.

    Times beyond the support accumulate nothing further; negative times give 0.
    """
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 0.0, pulse.duration)
    freqs, amps = pulse.carrier_decomposition()
    cep = pulse.cep
    out = np.zeros_like(tc)
    for fj, aj in zip(freqs, amps):
        if fj == 0.0:
            # sin(0*t + cep) integrates to sin(cep)*t
            out = out + aj * np.sin(cep) * tc
        else:
            out = out + aj * (np.cos(cep) - np.cos(fj * tc + cep)) / fj
    return out


def spectral_amplitude(pulse: LaserPulse, omega_k, dt: float = 1.0, refine: int = 1):
    """Unnormalized spectral amplitude int_0^T eps.A(t) exp(-i omega_k t) dt.

    Composite Simpson quadrature on the native grid (step ~dt/refine).  The
    overall proportionality constant of the mode amplitude is left open, so
    callers should only rely on ratios and peak locations.
    """
    omega_k = np.asarray(omega_k, dtype=float)
    t = pulse.time_grid(dt / max(1, int(refine)))
    a = vector_potential_z(pulse, t)
    scalar = omega_k.ndim == 0
    wk = np.atleast_1d(omega_k)
    vals = np.empty(wk.shape, dtype=complex)
    for i, w in enumerate(wk):
        vals[i] = simpson(a * np.exp(-1j * w * t), x=t)
    return vals[0] if scalar else vals


@dataclass(frozen=True)
class FieldCoupling:
    """Effective field-mode coupling.

    gtilde is the coupling of the fundamental mode; other modes scale as
    sqrt(omega/omega_ref) times the form-factor ratio.  lambda_scale is the
    dimensionless reduction applied wherever the coupling multiplies a
    displacement amplitude (it keeps the shifted photon numbers within
    numerically tractable range).  gamma_cutoff, when given, enables the
    form factor g(k) = Gamma/sqrt(Gamma^2 + k^2) with k = omega/c.
    """

    gtilde: float = 2.0e-3
    lambda_scale: float = 0.2
    omega_ref: float = 0.057
    gamma_cutoff: float | None = None
    _c_au: float = field(default=137.035999, repr=False)

    def __post_init__(self):
        if not (0.0 < self.lambda_scale <= 1.0):
            raise ValueError("lambda_scale must lie in (0, 1]")
        if self.gtilde <= 0:
            raise ValueError("gtilde must be positive")

    def form_factor(self, omega):
        """g(k) = Gamma/sqrt(Gamma^2 + k^2), or 1 when no cutoff is set."""
        omega = np.asarray(omega, dtype=float)
        if self.gamma_cutoff is None:
            return np.ones_like(omega)
        k = omega / self._c_au
        g = self.gamma_cutoff / np.sqrt(self.gamma_cutoff**2 + k**2)
        return g

    def mode_coupling(self, omega):
        """Per-mode coupling g~(omega), without the lambda_scale factor."""
        omega = np.asarray(omega, dtype=float)
        base = self.gtilde * np.sqrt(omega / self.omega_ref)
        return base * self.form_factor(omega) / self.form_factor(self.omega_ref)

    def scaled_coupling(self, omega):
        """lambda_scale * g~(omega), the factor entering every displacement."""
        return self.lambda_scale * self.mode_coupling(omega)
