"""Strong-field-approximation electronic response.

Everything is reduced to one dimension along the pulse polarization: the
continuum is labeled by the canonical momentum p, the dipole operator by its
z-component.  The nested time integrals are evaluated with a phase-prefix
decomposition,

    exp(-i S(p, t, t')) = exp(-i Phi(p, t)) * exp(+i Phi(p, t')),
    Phi(p, t) = int_0^t [(p + A(tau))^2 / 2 + Ip] dtau,

which turns every double integral into two cumulative (prefix) integrals and
keeps the full dipole trace at O(N_p * N_t) cost.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .pulse import LaserPulse, electric_field_z, vector_potential_z


@dataclass(frozen=True)
class AtomModel:
    """Single-active-electron atom: ionization potential and 1s parameter."""

    ip: float = 0.5
    lam: float = 1.0

    def __post_init__(self):
        if self.ip <= 0 or self.lam <= 0:
            raise ValueError("ip and lam must be positive")


def hydrogen() -> AtomModel:
    """Hydrogen 1s: Ip = 0.5, lambda = 1."""
    return AtomModel(ip=0.5, lam=1.0)


@dataclass(frozen=True)
class DipoleTrace:
    """Real dipole expectation value on a uniform time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "d"])
            for t, d in zip(self.times, self.values):
                writer.writerow([f"{t:.12g}", f"{d:.12e}"])

    @classmethod
    def from_csv(cls, path) -> "DipoleTrace":
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        return cls(times=data[:, 0], values=data[:, 1])


def dipole_moment_weight(atom: AtomModel, v):
    """Real radial weight r(v) in d(v) = -i * r(v) along v.

    r(v) = sqrt(lam^3/pi) * v / (2 pi)^{3/2} * 32 pi lam / (lam^2 + v^2)^3
    """
    v = np.asarray(v, dtype=float)
    lam = atom.lam
    pref = np.sqrt(lam**3 / np.pi) / (2.0 * np.pi) ** 1.5 * 32.0 * np.pi * lam
    return pref * v / (lam**2 + v**2) ** 3


def transition_dipole(atom: AtomModel, v):
    """Bound-continuum dipole matrix element d(v), a complex 3-vector.

    Odd in v and purely imaginary: d(v) = -i * r(|v|) * v_hat * |v| ... the
    vectorial form is r evaluated on each component (d is parallel to v).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = np.array([0.0, 0.0, float(v)])
    v2 = np.sum(v**2, axis=-1, keepdims=True)
    lam = atom.lam
    pref = np.sqrt(lam**3 / np.pi) / (2.0 * np.pi) ** 1.5 * 32.0 * np.pi * lam
    return -1j * pref * v / (lam**2 + v2) ** 3


def _grid_to(pulse: LaserPulse, t: float, dt: float, refine: int = 1):
    n = max(2, int(round(abs(t) / (dt / max(1, refine)))))
    return np.linspace(0.0, t, n + 1)


def semiclassical_action(
    pulse: LaserPulse,
    atom: AtomModel,
    p: float,
    t1: float,
    t2: float,
    dt: float = 1.0,
    refine: int = 1,
) -> float:
    """S(p, t2, t1) = int_{t1}^{t2} [(p + A(tau))^2/2 + Ip] dtau."""
    if t1 == t2:
        return 0.0
    n = max(2, int(round(abs(t2 - t1) / (dt / max(1, refine)))))
    tau = np.linspace(t1, t2, n + 1)
    integrand = 0.5 * (p + vector_potential_z(pulse, tau)) ** 2 + atom.ip
    return float(trapezoid(integrand, tau))


def _action_prefix(pulse: LaserPulse, atom: AtomModel, p, t):
    """Phi(p, t) on grid t for each p (rows); cumulative trapezoid."""
    a = vector_potential_z(pulse, t)
    kin = 0.5 * (np.atleast_1d(p)[:, None] + a[None, :]) ** 2 + atom.ip
    return cumulative_trapezoid(kin, t, axis=1, initial=0.0)


def ionization_amplitude(
    pulse: LaserPulse,
    atom: AtomModel,
    p: float,
    t: float,
    dt: float = 1.0,
    refine: int = 1,
) -> complex:
    """Direct-ionization continuum amplitude b(p, t) (no depletion).

    b(p, t) = i int_0^t dt' E(t') d(p + A(t')) exp(-i S(p, t, t')), evaluated
    with the prefix decomposition.  d carries the -i factor, so the integrand
    reduces to E * r * exp(i Phi) with real E*r.
    """
    if t <= 0.0:
        return 0.0 + 0.0j
    tau = _grid_to(pulse, t, dt, refine)
    a = vector_potential_z(pulse, tau)
    e = electric_field_z(pulse, tau)
    r = dipole_moment_weight(atom, p + a)
    phi = cumulative_trapezoid(0.5 * (p + a) ** 2 + atom.ip, tau, initial=0.0)
    inner = trapezoid(e * r * np.exp(1j * phi), tau)
    # i * (-i) = 1 from the i prefactor and the -i inside d(v)
    return complex(np.exp(-1j * phi[-1]) * inner)


def ionization_spectrum(
    pulse: LaserPulse,
    atom: AtomModel,
    p_grid: np.ndarray,
    dt: float = 1.0,
    refine: int = 1,
):
    """|b(p, T)|^2 over a momentum grid (end-of-pulse ATI distribution)."""
    t = pulse.time_grid(dt / max(1, refine))
    a = vector_potential_z(pulse, t)
    e = electric_field_z(pulse, t)
    v = p_grid[:, None] + a[None, :]
    r = dipole_moment_weight(atom, v)
    phi = _action_prefix(pulse, atom, p_grid, t)
    inner = trapezoid(e[None, :] * r * np.exp(1j * phi), t, axis=1)
    b = np.exp(-1j * phi[:, -1]) * inner
    return np.abs(b) ** 2


def ground_survival(
    pulse: LaserPulse,
    atom: AtomModel,
    t: float,
    p_grid: np.ndarray | None = None,
    dt: float = 1.0,
    refine: int = 1,
) -> float:
    """Ground-state survival a_g(t) = exp(-Re int_0^t W), Markov rate form.

    W(t) = int_0^t gamma(t, t') dt' with
    gamma(t, t') = int dp E(t) r(p+A(t)) E(t') r(p+A(t')) exp(-i S(p,t,t'));
    the real part of the accumulated exponent is the decay (the imaginary
    part is a Stark-type phase irrelevant to the survival probability).
    """
    if t <= 0.0:
        return 1.0
    if p_grid is None:
        p_grid = default_momentum_grid(pulse)
    tau = _grid_to(pulse, t, dt, refine)
    a = vector_potential_z(pulse, tau)
    e = electric_field_z(pulse, tau)
    v = p_grid[:, None] + a[None, :]
    r = dipole_moment_weight(atom, v)
    phi = _action_prefix(pulse, atom, p_grid, tau)
    prefix = cumulative_trapezoid(e[None, :] * r * np.exp(1j * phi), tau, axis=1, initial=0.0)
    gamma_t = e[None, :] * r * np.exp(-1j * phi) * prefix
    w = trapezoid(gamma_t, p_grid, axis=0)
    exponent = trapezoid(w, tau)
    return float(np.exp(-np.real(exponent)))


def default_momentum_grid(pulse: LaserPulse, n: int = 512, span: float = 4.0):
    """Symmetric grid over [-span*sqrt(Up), span*sqrt(Up)]."""
    pmax = span * np.sqrt(pulse.up)
    return np.linspace(-pmax, pmax, n)


def dipole_expectation_paths(
    pulse: LaserPulse,
    atom: AtomModel,
    dt: float = 0.25,
    tau_max_cycles: float = 0.5,
    tau_edge_cycles: float = 0.15,
    eps: float = 1.0,
) -> DipoleTrace:
    """Recollision-only (quantum-path) dipole trace for spectral work.

    The momentum integral is carried out in closed form around the exact
    return momentum p*(t, tau) = -[intA(t) - intA(t-tau)]/tau (the action is
    exactly quadratic in p), which keeps only trajectories that revisit the
    ion and removes the bound-continuum beat comb that otherwise floods the
    plateau of the flat 1-D grid evaluation.  Excursions are restricted to
    the short-trajectory branch (tau <= tau_max_cycles optical cycles, with
    a cosine roll-off of width tau_edge_cycles), mirroring the macroscopic
    short-path selection of phase matching; the (2 pi / (eps + i tau))^{3/2}
    factor is the free-wavepacket spreading of the transverse+longitudinal
    Gaussian integral.  Use this trace for harmonic spectra; use
    :func:`dipole_expectation` for the spec'd grid evaluation of the raw
    time-domain response.
    """
    t_cyc = 2.0 * np.pi / pulse.omega
    t = pulse.time_grid(dt)
    nt = len(t)
    step = t[1] - t[0]
    a = vector_potential_z(pulse, t)
    e = electric_field_z(pulse, t)
    from .pulse import integral_of_a

    ia = integral_of_a(pulse, t)
    ia2 = cumulative_trapezoid(a * a, t, initial=0.0)
    tau_flat = tau_max_cycles * t_cyc
    tau_hi = (tau_max_cycles + tau_edge_cycles) * t_cyc
    n_tau = int(round(tau_hi / step))
    vals = np.zeros(nt, dtype=complex)
    idx = np.arange(nt)
    for j in range(1, n_tau + 1):
        tau = j * step
        if tau <= tau_flat:
            win = 1.0
        else:
            win = 0.5 * (1.0 + np.cos(np.pi * (tau - tau_flat) / (tau_edge_cycles * t_cyc)))
        ii = idx[j:]
        jj = ii - j
        dia = ia[ii] - ia[jj]
        dia2 = ia2[ii] - ia2[jj]
        p_ret = -dia / tau
        action = atom.ip * tau - dia**2 / (2.0 * tau) + dia2 / 2.0
        pref = (2.0 * np.pi / (eps + 1j * tau)) ** 1.5
        vals[ii] += (
            win
            * pref
            * dipole_moment_weight(atom, p_ret + a[ii])
            * e[jj]
            * dipole_moment_weight(atom, p_ret + a[jj])
            * np.exp(-1j * action)
            * step
        )
    out = 1j * vals + np.conj(1j * vals)
    return DipoleTrace(times=t, values=np.real(out))


def dipole_expectation(
    pulse: LaserPulse,
    atom: AtomModel,
    p_grid: np.ndarray | None = None,
    dt: float = 1.0,
    refine: int = 1,
) -> DipoleTrace:
    """SFA dipole-moment expectation value <d(t)> on the native time grid.

    <d(t)> = i int dp int_0^t dt' d*(p+A(t)) E(t') d(p+A(t')) e^{-iS} + c.c.
    with continuum-continuum transitions dropped.  The momentum integral is
    one-dimensional along the polarization; the result is real.
    """
    if p_grid is None:
        p_grid = default_momentum_grid(pulse)
    p_grid = np.asarray(p_grid, dtype=float)
    if p_grid.size < 8:
        raise ValueError("momentum grid too coarse (need >= 8 points)")
    span = 3.0 * np.sqrt(pulse.up)
    if p_grid.min() > -span or p_grid.max() < span:
        raise ValueError("momentum grid must cover at least [-3 sqrt(Up), 3 sqrt(Up)]")

    t = pulse.time_grid(dt / max(1, refine))
    a = vector_potential_z(pulse, t)
    e = electric_field_z(pulse, t)
    v = p_grid[:, None] + a[None, :]
    r = dipole_moment_weight(atom, v)
    phi = _action_prefix(pulse, atom, p_grid, t)
    # prefix integral over ionization time t'
    inner = cumulative_trapezoid(e[None, :] * r * np.exp(1j * phi), t, axis=1, initial=0.0)
    z = trapezoid(r * np.exp(-1j * phi) * inner, p_grid, axis=0)
    values = 1j * z + np.conj(1j * z)  # z + z* is real by construction
    return DipoleTrace(times=t, values=np.real(values))
