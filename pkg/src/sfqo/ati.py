"""ATI-conditioned state of the fundamental mode and its photon statistics.

Pipeline (per canonical momentum p): precompute the dipole trace and the
per-mode shifts chi_q(t'), delta_q(T, t') and BCH phases on a fine grid,
collapse the harmonic modes 2..n into the conditioning weight C_HH, build
cubic interpolants, and integrate the Fock projection amplitudes

    amp(n) = int_0^T dt' m(t') C_HH(t') e^{i theta(t')}
                 [ -i F1(t') - g_L (n/gamma - 1) ] A_n(gamma(t'))

with gamma(t') = alpha + chi_L(t') + delta_L(T, t'), A_n the coherent Fock
kernel gamma^n e^{-|gamma|^2/2}/sqrt(n!), F1 the sum of the chi-field part
and the harmonic-mode (chi_q + delta_q) bracket, and m the bound-continuum
matrix element carrying exp(i S).  The distribution P(n) = |amp(n)|^2 is
normalized over the truncation window.  Everything is evaluated at the end
of the pulse t = T, where the free-evolution phases of integer harmonics
are unity.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .displacement import bch_phase_series, chi_series, delta_series
from .pulse import FieldCoupling, LaserPulse, electric_field_z, vector_potential_z
from .sfa import AtomModel, DipoleTrace, dipole_expectation, dipole_moment_weight

DIRECT_REGIME_LIMIT = 0.46  # |p| in sqrt(Up) units beyond which rescattering matters


@dataclass(frozen=True)
class AtiConfig:
    """Parameters of the ATI conditioning experiment."""

    alpha: complex = 7j
    lambda_scale: float = 0.2
    gtilde: float = 2.0e-3
    p_over_sqrt_up: float = 0.1
    n_harmonics: int = 21
    fundamental_cut_order: float = 1.5
    n_max: int = 120
    grid_dt: float = 1.0
    series_dt: float = 0.25
    quad_dt: float = 0.05
    tail_tol: float = 1e-6

    def momentum(self, pulse: LaserPulse) -> float:
        p = self.p_over_sqrt_up * np.sqrt(pulse.up)
        if abs(self.p_over_sqrt_up) > DIRECT_REGIME_LIMIT:
            warnings.warn(
                f"|p| = {abs(self.p_over_sqrt_up):.2f} sqrt(Up) exceeds the direct regime "
                f"({DIRECT_REGIME_LIMIT} sqrt(Up)); rescattering is not modeled",
                stacklevel=2,
            )
        return float(p)

    def coupling(self, pulse: LaserPulse) -> FieldCoupling:
        return FieldCoupling(
            gtilde=self.gtilde, lambda_scale=self.lambda_scale, omega_ref=pulse.omega
        )


@dataclass(frozen=True)
class AtiAmplitudeTable:
    """Normalized Fock amplitudes of the conditioned fundamental mode."""

    amps: np.ndarray
    norm: float
    momentum: float

    @property
    def probs(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def mean(self) -> float:
        n = np.arange(len(self.amps))
        return float(np.sum(n * self.probs))

    def variance(self) -> float:
        n = np.arange(len(self.amps))
        m = self.mean()
        return float(np.sum((n - m) ** 2 * self.probs))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", "P"])
            for n, pr in enumerate(self.probs):
                writer.writerow([n, f"{pr:.12e}"])


@dataclass
class AtiInputs:
    """Momentum-independent precomputation shared by a momentum sweep."""

    pulse: LaserPulse
    atom: AtomModel
    coupling: FieldCoupling
    omegas: np.ndarray          # mode frequencies, order 1..n_harmonics
    trace: DipoleTrace
    t_fine: np.ndarray
    chi_fine: np.ndarray        # (n_modes, n_fine) chi_q on the fine grid


def prepare_ati(pulse: LaserPulse, atom: AtomModel, cfg: AtiConfig) -> AtiInputs:
    """Dipole trace and chi series (momentum independent)."""
    coupling = cfg.coupling(pulse)
    omegas = pulse.omega * np.arange(1, cfg.n_harmonics + 1)
    trace = dipole_expectation(pulse, atom, dt=cfg.grid_dt)
    t_fine = pulse.time_grid(cfg.series_dt)
    chi_fine = np.zeros((len(omegas), len(t_fine)), dtype=complex)
    for m, wk in enumerate(omegas):
        series = chi_series(trace, wk, coupling)
        spl_re = CubicSpline(trace.times, series.real)
        spl_im = CubicSpline(trace.times, series.imag)
        chi_fine[m] = spl_re(t_fine) + 1j * spl_im(t_fine)
    return AtiInputs(
        pulse=pulse,
        atom=atom,
        coupling=coupling,
        omegas=omegas,
        trace=trace,
        t_fine=t_fine,
        chi_fine=chi_fine,
    )


@dataclass
class AtiSeries:
    """Momentum-dependent series on the fine grid, ready for interpolation."""

    t: np.ndarray
    gamma: np.ndarray        # alpha + chi_L + delta_L
    c_hh: np.ndarray         # harmonic conditioning weight (complex)
    theta: np.ndarray        # fundamental-mode phase
    f1: np.ndarray           # chi field + harmonic bracket
    matel: np.ndarray        # bound-continuum matrix element with exp(iS)


def _harmonic_mask(cfg: AtiConfig, omegas: np.ndarray, omega_l: float) -> np.ndarray:
    return (omegas / omega_l) > cfg.fundamental_cut_order


def ati_series(inputs: AtiInputs, cfg: AtiConfig) -> AtiSeries:
    """Assemble all t'-dependent factors for one momentum."""
    pulse, atom = inputs.pulse, inputs.atom
    p = cfg.momentum(pulse)
    t = inputs.t_fine
    big_t = pulse.duration
    coupling = inputs.coupling
    omegas = inputs.omegas
    harm = _harmonic_mask(cfg, omegas, pulse.omega)
    g = coupling.scaled_coupling(omegas)

    delta_fine = np.stack(
        [delta_series(pulse, p, big_t, t, wk, coupling) for wk in omegas]
    )
    phi_fine = np.stack(
        [bch_phase_series(pulse, p, big_t, t, wk, coupling, dt=cfg.series_dt) for wk in omegas]
    )

    # conditioning weight over the harmonic modes; chi is negligible next to
    # delta there and is dropped inside the product
    log_mag = -0.5 * np.sum(np.abs(delta_fine[harm]) ** 2, axis=0)
    phase_hh = np.sum(phi_fine[harm], axis=0)
    c_hh = np.exp(log_mag + 1j * phase_hh)

    chi_l = inputs.chi_fine[0]
    delta_l = delta_fine[0]
    gamma = cfg.alpha + chi_l + delta_l
    theta = (
        phi_fine[0]
        + np.imag(delta_l * np.conj(chi_l))
        + np.imag(cfg.alpha * (np.conj(delta_l) + np.conj(chi_l)))
    )

    # chi-part of the field operator eigenvalue (all modes, real by i(z - z*))
    phases = np.exp(-1j * np.outer(omegas, t))
    e_chi = np.sum(
        1j * g[:, None] * (inputs.chi_fine * phases - np.conj(inputs.chi_fine * phases)),
        axis=0,
    )
    bracket_hh = np.sum(
        (g[harm])[:, None]
        * phases[harm]
        * (inputs.chi_fine[harm] + delta_fine[harm]),
        axis=0,
    )
    f1 = e_chi + bracket_hh

    a_t = vector_potential_z(pulse, t)
    action = cumulative_trapezoid(0.5 * (p + a_t) ** 2 + atom.ip, t, initial=0.0)
    matel = dipole_moment_weight(atom, p + a_t) * np.exp(1j * action)
    return AtiSeries(t=t, gamma=gamma, c_hh=c_hh, theta=theta, f1=f1, matel=matel)


def c_hh_weight(inputs: AtiInputs, cfg: AtiConfig, t_ion) -> np.ndarray:
    """Interpolated harmonic-vacuum weight C_HH(p, T, t_ion); |C_HH| <= 1."""
    series = ati_series(inputs, cfg)
    spl_re = CubicSpline(series.t, series.c_hh.real)
    spl_im = CubicSpline(series.t, series.c_hh.imag)
    t_ion = np.asarray(t_ion, dtype=float)
    return spl_re(t_ion) + 1j * spl_im(t_ion)


def c_hh_weight_direct(inputs: AtiInputs, cfg: AtiConfig, t_ion: float) -> complex:
    """C_HH evaluated from the defining series at a single time (oracle path)."""
    pulse = inputs.pulse
    p = cfg.momentum(pulse)
    big_t = pulse.duration
    harm = _harmonic_mask(cfg, inputs.omegas, pulse.omega)
    val = 0.0 + 0.0j
    log_mag = 0.0
    phase = 0.0
    for wk in inputs.omegas[harm]:
        d = delta_series(pulse, p, big_t, np.array([t_ion]), wk, inputs.coupling)[0]
        log_mag += -0.5 * abs(d) ** 2
        phase += bch_phase_series(
            pulse, p, big_t, np.array([t_ion]), wk, inputs.coupling, dt=cfg.series_dt
        )[0]
    val = np.exp(log_mag + 1j * phase)
    return complex(val)


def _fock_kernel_log(gamma: np.ndarray, n_values: np.ndarray) -> np.ndarray:
    """A_n(gamma) = gamma^n e^{-|gamma|^2/2} / sqrt(n!), shape (n, t)."""
    from math import lgamma

    log_g = np.log(gamma.astype(complex))
    lf = np.array([lgamma(k + 1.0) for k in n_values])
    expo = (
        np.outer(n_values, log_g)
        - 0.5 * lf[:, None]
        - 0.5 * (np.abs(gamma) ** 2)[None, :]
    )
    return np.exp(expo)


def ati_fock_amplitudes(inputs: AtiInputs, cfg: AtiConfig) -> AtiAmplitudeTable:
    """Fock amplitudes of the ATI-conditioned fundamental mode at t = T.

    The ionization-time integral runs on interpolants refined until every
    amplitude is stable to cfg-specified absolute tolerance (refinement by
    halving the step, starting from quad_dt*2).
    """
    series = ati_series(inputs, cfg)
    splines = {
        name: (CubicSpline(series.t, arr.real), CubicSpline(series.t, arr.imag))
        for name, arr in (
            ("gamma", series.gamma),
            ("c_hh", series.c_hh),
            ("f1", series.f1),
            ("matel", series.matel),
        )
    }
    theta_spl = CubicSpline(series.t, series.theta)
    g_l = inputs.coupling.scaled_coupling(inputs.pulse.omega)
    n_values = np.arange(cfg.n_max + 1)

    def evaluate(dt: float) -> np.ndarray:
        t = np.arange(0.0, inputs.pulse.duration + dt / 2, dt)

        def ev(name):
            re, im = splines[name]
            return re(t) + 1j * im(t)

        gamma = ev("gamma")
        weight = ev("matel") * ev("c_hh") * np.exp(1j * theta_spl(t))
        f1 = ev("f1")
        a_n = _fock_kernel_log(gamma, n_values)
        # bracket: -i F1 A_n - g_L (n/gamma - 1) A_n
        pref = -1j * f1[None, :] - g_l * (n_values[:, None] / gamma[None, :] - 1.0)
        integrand = weight[None, :] * pref * a_n
        return np.trapezoid(integrand, t, axis=1)

    dt = cfg.quad_dt * 2
    amps = evaluate(dt)
    for _ in range(5):
        dt /= 2
        amps_fine = evaluate(dt)
        stable = np.max(np.abs(amps_fine - amps)) < 1e-8 * max(1.0, float(np.abs(amps_fine).max()))
        amps = amps_fine
        if stable:
            break
    norm = float(np.sum(np.abs(amps) ** 2))
    if norm == 0.0:
        raise ValueError("all Fock amplitudes vanished; check the coupling scale")
    amps = amps / np.sqrt(norm)
    probs = np.abs(amps) ** 2
    tail = probs[-3:].sum()
    if tail > cfg.tail_tol:
        raise ValueError(
            f"truncation tail {tail:.2e} exceeds {cfg.tail_tol:.0e}; raise n_max"
        )
    return AtiAmplitudeTable(amps=amps, norm=norm, momentum=cfg.momentum(inputs.pulse))


def mean_photon(table: AtiAmplitudeTable) -> float:
    """<n> = sum n P(n) of a normalized amplitude table."""
    return table.mean()


def ati_mixed_ensemble(inputs: AtiInputs, cfg: AtiConfig, weighted_momenta) -> tuple[np.ndarray, float]:
    """Ensemble photon distribution sum_i w_i P_i(n) and its mean.

    weighted_momenta: iterable of (weight, p_over_sqrt_up); weights must be
    nonnegative and sum to 1.
    """
    items = list(weighted_momenta)
    if not items:
        raise ValueError("empty ensemble")
    weights = np.array([w for w, _ in items], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be nonnegative and sum to 1")
    probs = None
    for w, p in items:
        table = ati_fock_amplitudes(inputs, replace(cfg, p_over_sqrt_up=p))
        probs = w * table.probs if probs is None else probs + w * table.probs
    n = np.arange(len(probs))
    return probs, float(np.sum(n * probs))


def mean_photon_sweep(inputs: AtiInputs, cfg: AtiConfig, p_values) -> list[tuple[float, float]]:
    """(p, <n>) table over a momentum sweep (p in sqrt(Up) units)."""
    rows = []
    for p in p_values:
        table = ati_fock_amplitudes(inputs, replace(cfg, p_over_sqrt_up=float(p)))
        rows.append((float(p), table.mean()))
    return rows
