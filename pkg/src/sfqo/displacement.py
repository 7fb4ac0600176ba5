"""Quantum-optical displacement amplitudes induced by the driven electron.

Two backaction channels shift the field modes:

* ``chi`` — the bound-electron dipole oscillation, active while the electron
  stays in the ground state (HHG channel),
* ``delta`` — the continuum excursion of the ionized electron between the
  ionization time t1 and the observation time t (ATI channel).

Both are integrals of real classical sources against exp(i omega_k t), so
``delta`` has a closed form for the sin^2 pulse (the envelope expands into
three carriers); the closed form is the primary evaluation path and is
unit-tested against quadrature.  BCH phases from composing non-commuting
displacements are reduced to prefix integrals.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .pulse import FieldCoupling, LaserPulse, integral_of_a, vector_potential_z
from .sfa import DipoleTrace


@dataclass(frozen=True)
class ModeGrid:
    """Harmonic field modes n*omega_L for n = 1..n_max plus their coupling."""

    omegas: np.ndarray
    coupling: FieldCoupling

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float)
        if w.ndim != 1 or len(w) == 0:
            raise ValueError("omegas must be a non-empty 1-D array")
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise ValueError("omegas must be strictly ascending and positive")
        object.__setattr__(self, "omegas", w)

    @classmethod
    def harmonics(cls, omega_laser: float, n_max: int = 21, coupling: FieldCoupling | None = None):
        if coupling is None:
            coupling = FieldCoupling(omega_ref=omega_laser)
        return cls(omegas=omega_laser * np.arange(1, n_max + 1), coupling=coupling)

    @property
    def orders(self) -> np.ndarray:
        return self.omegas / self.omegas[0]


@dataclass
class DisplacementRecord:
    """Per-mode chi(t1) and delta(T, t1) series with their BCH phases."""

    t1: np.ndarray
    omegas: np.ndarray
    chi: np.ndarray          # (n_modes, n_t1)
    delta: np.ndarray        # (n_modes, n_t1)
    phi_bch: np.ndarray      # (n_modes, n_t1)
    momentum: float = 0.0

    def to_csv(self, path, mode_index: int) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t1", "re_chi", "im_chi", "abs_chi", "re_delta", "im_delta", "abs_delta"])
            for k, t in enumerate(self.t1):
                c = self.chi[mode_index, k]
                d = self.delta[mode_index, k]
                writer.writerow(
                    [f"{t:.12g}"]
                    + [f"{v:.12e}" for v in (c.real, c.imag, abs(c), d.real, d.imag, abs(d))]
                )


# ---------------------------------------------------------------------------
# chi: HHG displacement from the dipole expectation value
# ---------------------------------------------------------------------------

def chi_series(trace: DipoleTrace, omega_k: float, coupling: FieldCoupling) -> np.ndarray:
    """chi(omega_k, t) on every grid time of the trace, in one cumulative pass.

    chi(omega_k, t) = -g~(omega_k) * lambda_scale * int_0^t <d(tau)> e^{i omega_k tau} dtau
    for a single atom at the origin.
    """
    g = coupling.scaled_coupling(omega_k)
    integrand = trace.values * np.exp(1j * omega_k * trace.times)
    return -g * cumulative_trapezoid(integrand, trace.times, initial=0.0)


def chi(trace: DipoleTrace, omega_k: float, t: float, coupling: FieldCoupling) -> complex:
    """chi(omega_k, t) at a single time (interpolated on the trace grid)."""
    series = chi_series(trace, omega_k, coupling)
    if not (trace.times[0] <= t <= trace.times[-1]):
        raise ValueError("t outside the trace support")
    return complex(np.interp(t, trace.times, series.real) + 1j * np.interp(t, trace.times, series.imag))


def hhg_spectrum(
    trace: DipoleTrace,
    grid: ModeGrid,
    n_atoms: int = 1,
    orders: np.ndarray | None = None,
):
    """Coherent HHG spectrum S(omega) = N^2 |chi(omega, T)|^2 on a dense grid.

    Returns (orders, spectrum).  The absolute scale is arbitrary; the N^2
    factor is the collective coherent enhancement of n_atoms identical
    emitters.  Callers wanting a normalized plot divide by the fundamental.
    """
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    omega_l = grid.omegas[0]
    if orders is None:
        n_top = grid.orders[-1] + 6
        orders = np.arange(0.5, n_top + 1e-9, 0.02)
    omegas = orders * omega_l
    t, d = trace.times, trace.values
    phase = np.exp(1j * np.outer(omegas, t))
    dtilde = trapezoid(phase * d[None, :], t, axis=1)
    g = grid.coupling.scaled_coupling(omegas)
    s = (n_atoms * g) ** 2 * np.abs(dtilde) ** 2
    return orders, s


def spectrum_odd_even_contrast(orders: np.ndarray, s: np.ndarray, odd_orders) -> dict:
    """Odd-peak vs adjacent-even-harmonic contrast in dB, per odd order.

    The odd level is the peak within +/-0.35 orders; the even level is the
    spectrum at the even integer position (+/-0.06 orders), i.e. harmonic
    tooth against harmonic tooth.
    """
    def level(q, half):
        sel = (orders > q - half) & (orders < q + half)
        return s[sel].max()

    out = {}
    for q in odd_orders:
        even = max(level(q - 1, 0.06), level(q + 1, 0.06))
        out[q] = 10.0 * np.log10(level(q, 0.35) / even)
    return out


def spectrum_cutoff(orders: np.ndarray, s: np.ndarray, plateau=(9, 11, 13, 15, 17), drop_db: float = 12.0) -> int:
    """Detected cutoff: largest odd order within drop_db of the plateau median."""
    def level(q):
        sel = (orders > q - 0.35) & (orders < q + 0.35)
        return 10.0 * np.log10(s[sel].max())

    med = np.median([level(q) for q in plateau])
    qmax = int(orders[-1])
    cands = [q for q in range(plateau[0], qmax + 1, 2) if level(q) >= med - drop_db]
    return max(cands) if cands else 0


# ---------------------------------------------------------------------------
# Delta r and delta: continuum-electron displacement
# ---------------------------------------------------------------------------

def electron_displacement(pulse: LaserPulse, p: float, t) -> np.ndarray:
    """Total continuum displacement Delta r(t, p) = p*t + int_0^t A (closed form)."""
    t = np.asarray(t, dtype=float)
    return p * t + integral_of_a(pulse, t)


def electron_displacement_quadrature(pulse: LaserPulse, p: float, t: float, dt: float = 0.01) -> float:
    """Trapezoid fallback for Delta r, used as the oracle for the closed form."""
    n = max(2, int(round(t / dt)))
    tau = np.linspace(0.0, t, n + 1)
    return float(trapezoid(p + vector_potential_z(pulse, tau), tau))


def _exp_integral(omega: float, t0: float, t1: float) -> complex:
    """int_{t0}^{t1} e^{i omega t} dt."""
    if omega == 0.0:
        return complex(t1 - t0)
    return (np.exp(1j * omega * t1) - np.exp(1j * omega * t0)) / (1j * omega)


def _exp_t_integral(omega: float, t0: float, t1: float) -> complex:
    """int_{t0}^{t1} t e^{i omega t} dt."""
    if omega == 0.0:
        return complex(0.5 * (t1**2 - t0**2))
    def anti(t):
        return np.exp(1j * omega * t) * (t / (1j * omega) + 1.0 / omega**2)
    return anti(t1) - anti(t0)


def _exp_cos_integral(omega: float, fj: float, phase: float, t0: float, t1: float) -> complex:
    """int_{t0}^{t1} cos(fj t + phase) e^{i omega t} dt (resonance-safe)."""
    return 0.5 * (
        np.exp(1j * phase) * _exp_integral(omega + fj, t0, t1)
        + np.exp(-1j * phase) * _exp_integral(omega - fj, t0, t1)
    )


def displacement_fourier(pulse: LaserPulse, p: float, t1: float, t: float, omega_k: float) -> complex:
    """Closed form of int_{t1}^{t} e^{i omega_k s} Delta r(s, p) ds.

    Delta r for the sin^2 pulse is a drift term p*s plus a constant plus
    three cosines (from the carrier decomposition of int A), so the Fourier
    integral reduces to elementary exponential integrals; the omega_k == fj
    resonances are handled exactly by the zero-frequency branch.
    """
    freqs, amps = pulse.carrier_decomposition()
    cep = pulse.cep
    # int_0^s A = sum_j a_j (cos(cep) - cos(f_j s + cep))/f_j  (f_j > 0)
    #           + a_j sin(cep) * s                              (f_j == 0)
    const = 0.0
    drift = p
    cos_terms = []
    for fj, aj in zip(freqs, amps):
        if fj == 0.0:
            drift += aj * np.sin(cep)
        else:
            const += aj * np.cos(cep) / fj
            cos_terms.append((fj, -aj / fj))
    val = drift * _exp_t_integral(omega_k, t1, t)
    val += const * _exp_integral(omega_k, t1, t)
    for fj, cj in cos_terms:
        val += cj * _exp_cos_integral(omega_k, fj, cep, t1, t)
    return complex(val)


def delta(
    pulse: LaserPulse,
    p: float,
    t: float,
    t1: float,
    omega_k: float,
    coupling: FieldCoupling,
) -> complex:
    """ATI displacement of mode omega_k for ionization at t1, observed at t.

    delta = -g~(omega_k) * lambda_scale * int_{t1}^{t} e^{i omega_k s} Delta r(s, p) ds.
    The sign convention keeps Im(delta) of the fundamental aligned with the
    +i direction for positive canonical momentum, which is what makes
    positive-p conditioning enhance a driving state alpha = |alpha| i.
    """
    if t1 > t:
        raise ValueError("t1 must not exceed t")
    g = coupling.scaled_coupling(omega_k)
    return -g * displacement_fourier(pulse, p, t1, t, omega_k)


def delta_series(
    pulse: LaserPulse,
    p: float,
    t: float,
    t1_grid: np.ndarray,
    omega_k: float,
    coupling: FieldCoupling,
) -> np.ndarray:
    """delta(t, t1, omega_k) for every t1 in one vectorized pass.

    Uses int_{t1}^{t} = F(t) - F(t1) with the closed-form antiderivative.
    """
    freqs, amps = pulse.carrier_decomposition()
    cep = pulse.cep
    const = 0.0
    drift = p
    cos_terms = []
    for fj, aj in zip(freqs, amps):
        if fj == 0.0:
            drift += aj * np.sin(cep)
        else:
            const += aj * np.cos(cep) / fj
            cos_terms.append((fj, -aj / fj))

    def antider(s):
        s = np.asarray(s, dtype=float)
        if omega_k == 0.0:
            val = drift * 0.5 * s**2 + const * s
        else:
            val = drift * np.exp(1j * omega_k * s) * (s / (1j * omega_k) + 1.0 / omega_k**2)
            val = val + const * np.exp(1j * omega_k * s) / (1j * omega_k)
        for fj, cj in cos_terms:
            for sign in (+1.0, -1.0):
                w = omega_k + sign * fj
                ph = sign * cep
                if w == 0.0:
                    val = val + 0.5 * cj * np.exp(1j * ph) * s
                else:
                    val = val + 0.5 * cj * np.exp(1j * (w * s + ph)) / (1j * w)
        return val

    g = coupling.scaled_coupling(omega_k)
    return -g * (antider(t) - antider(np.asarray(t1_grid, dtype=float)))


# ---------------------------------------------------------------------------
# BCH phases
# ---------------------------------------------------------------------------

def bch_phase_series(
    pulse: LaserPulse,
    p: float,
    t: float,
    t1_grid: np.ndarray,
    omega_k: float,
    coupling: FieldCoupling,
    dt: float = 0.25,
) -> np.ndarray:
    """phi(t, t1, omega_k) for all t1 at once via prefix integrals.

    phi = (g~ lam)^2 int_{t1}^{t} dtau1 int_{t1}^{tau1} dtau2
              Dr(tau1) Dr(tau2) sin(omega_k (tau1 - tau2))
        = (g~ lam)^2 Im[ (K(t) - K(t1)) - H(t1) (L(t) - L(t1)) ],
    with F = Dr e^{i omega_k tau}, H = int F*, L = int F, K = int F H.
    """
    n = max(2, int(round(t / dt)))
    tau = np.linspace(0.0, t, n + 1)
    dr = electron_displacement(pulse, p, tau)
    f = dr * np.exp(1j * omega_k * tau)
    h = cumulative_trapezoid(np.conj(f), tau, initial=0.0)
    ell = cumulative_trapezoid(f, tau, initial=0.0)
    k = cumulative_trapezoid(f * h, tau, initial=0.0)
    g2 = coupling.scaled_coupling(omega_k) ** 2

    t1_grid = np.asarray(t1_grid, dtype=float)
    h1 = np.interp(t1_grid, tau, h.real) + 1j * np.interp(t1_grid, tau, h.imag)
    l1 = np.interp(t1_grid, tau, ell.real) + 1j * np.interp(t1_grid, tau, ell.imag)
    k1 = np.interp(t1_grid, tau, k.real) + 1j * np.interp(t1_grid, tau, k.imag)
    val = (k[-1] - k1) - h1 * (ell[-1] - l1)
    return g2 * np.imag(val)


def bch_phases(
    pulse: LaserPulse,
    p: float,
    t: float,
    t1: float,
    omega_k: float,
    coupling: FieldCoupling,
    chi_val: complex = 0.0,
    dt: float = 0.25,
) -> tuple[float, float]:
    """(phi, phi_chi_delta) for a single (t1, mode).

    phi is the ordered double integral of the continuum displacement against
    sin(omega_k (tau1 - tau2)); phi_chi_delta = Im[delta * conj(chi)].
    """
    if t1 > t:
        raise ValueError("t1 must not exceed t")
    phi = float(bch_phase_series(pulse, p, t, np.array([t1]), omega_k, coupling, dt=dt)[0])
    d = delta(pulse, p, t, t1, omega_k, coupling)
    phi_cd = float(np.imag(d * np.conj(chi_val)))
    return phi, phi_cd


def displacement_record(
    pulse: LaserPulse,
    trace: DipoleTrace,
    grid: ModeGrid,
    p: float,
    t: float | None = None,
    t1_grid: np.ndarray | None = None,
) -> DisplacementRecord:
    """Bundle chi(t1), delta(t, t1) and BCH phases for every mode."""
    if t is None:
        t = pulse.duration
    if t1_grid is None:
        t1_grid = trace.times
    n_modes, n_t1 = len(grid.omegas), len(t1_grid)
    chi_arr = np.zeros((n_modes, n_t1), dtype=complex)
    dlt_arr = np.zeros((n_modes, n_t1), dtype=complex)
    phi_arr = np.zeros((n_modes, n_t1))
    for m, wk in enumerate(grid.omegas):
        series = chi_series(trace, wk, grid.coupling)
        chi_arr[m] = np.interp(t1_grid, trace.times, series.real) + 1j * np.interp(
            t1_grid, trace.times, series.imag
        )
        dlt_arr[m] = delta_series(pulse, p, t, t1_grid, wk, grid.coupling)
        phi_arr[m] = bch_phase_series(pulse, p, t, t1_grid, wk, grid.coupling)
    return DisplacementRecord(
        t1=np.asarray(t1_grid, dtype=float),
        omegas=grid.omegas,
        chi=chi_arr,
        delta=dlt_arr,
        phi_bch=phi_arr,
        momentum=p,
    )
