"""Exact finite algebra over coherent-state superpositions.

A state is a finite sum  sum_i c_i |a_i1> x ... x |a_iM>  of products of
coherent states.  All inner products reduce to the pairwise coherent overlap
<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b), so norms, photon statistics,
purities and the action of passive linear optics stay closed-form.  States
are immutable; every operation returns a new state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import lgamma

import numpy as np

MERGE_TOL = 1e-12


def overlap(alpha: complex, beta: complex) -> complex:
    """Coherent-state overlap <alpha|beta> = e^{-|a|^2/2 - |b|^2/2 + a* b}."""
    alpha = complex(alpha)
    beta = complex(beta)
    return np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + np.conj(alpha) * beta)


@dataclass(frozen=True)
class CoherentSuperposition:
    """Finite superposition of multimode coherent states.

    coeffs: complex array (n_terms,); amps: complex array (n_terms, n_modes).
    """

    coeffs: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        a = np.asarray(self.amps, dtype=complex)
        if a.ndim == 1:
            a = a[:, None]
        if a.shape[0] != c.shape[0]:
            raise ValueError("coeffs and amps disagree on the number of terms")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "amps", a)

    # -- constructors -------------------------------------------------------

    @classmethod
    def coherent(cls, *alphas: complex) -> "CoherentSuperposition":
        """Product coherent state |alpha_1> x ... x |alpha_M>."""
        return cls(coeffs=np.array([1.0 + 0.0j]), amps=np.array([alphas], dtype=complex))

    @classmethod
    def superpose(cls, terms) -> "CoherentSuperposition":
        """From [(coeff, [amps...]), ...]."""
        coeffs = np.array([c for c, _ in terms], dtype=complex)
        amps = np.array([np.atleast_1d(a) for _, a in terms], dtype=complex)
        return cls(coeffs=coeffs, amps=amps)

    # -- bookkeeping --------------------------------------------------------

    @property
    def n_modes(self) -> int:
        return self.amps.shape[1]

    @property
    def n_terms(self) -> int:
        return self.amps.shape[0]

    def merged(self, tol: float = MERGE_TOL) -> "CoherentSuperposition":
        """Coalesce terms whose amplitude vectors coincide within tol.

        Keeps repeated beam-splitter chains from blowing up exponentially.
        """
        coeffs: list[complex] = []
        amps: list[np.ndarray] = []
        for c, a in zip(self.coeffs, self.amps):
            for k, ak in enumerate(amps):
                if np.all(np.abs(a - ak) <= tol):
                    coeffs[k] += c
                    break
            else:
                coeffs.append(c)
                amps.append(a.copy())
        keep = [k for k, c in enumerate(coeffs) if abs(c) > tol]
        if not keep:  # keep a single zero term rather than an empty state
            keep = [0]
        return CoherentSuperposition(
            coeffs=np.array([coeffs[k] for k in keep]),
            amps=np.array([amps[k] for k in keep]),
        )

    def gram(self) -> np.ndarray:
        """Gram matrix G_ij = <term_i|term_j> over all modes."""
        a = self.amps
        n2 = np.sum(np.abs(a) ** 2, axis=1)
        cross = np.einsum("im,jm->ij", np.conj(a), a)
        return np.exp(-0.5 * n2[:, None] - 0.5 * n2[None, :] + cross)

    def norm_squared(self) -> float:
        g = self.gram()
        val = np.einsum("i,ij,j->", np.conj(self.coeffs), g, self.coeffs)
        return float(np.real(val))

    def normalize(self, tol: float = 1e-15) -> "CoherentSuperposition":
        n2 = self.norm_squared()
        if n2 <= tol:
            raise ValueError("state has (numerically) zero norm")
        return CoherentSuperposition(self.coeffs / np.sqrt(n2), self.amps)

    def inner(self, other: "CoherentSuperposition") -> complex:
        """<self|other>."""
        if self.n_modes != other.n_modes:
            raise ValueError("mode-count mismatch")
        a, b = self.amps, other.amps
        n2a = np.sum(np.abs(a) ** 2, axis=1)
        n2b = np.sum(np.abs(b) ** 2, axis=1)
        cross = np.einsum("im,jm->ij", np.conj(a), b)
        g = np.exp(-0.5 * n2a[:, None] - 0.5 * n2b[None, :] + cross)
        return complex(np.einsum("i,ij,j->", np.conj(self.coeffs), g, other.coeffs))

    def fidelity(self, other: "CoherentSuperposition") -> float:
        """|<self|other>|^2 for normalized inputs."""
        return abs(self.inner(other)) ** 2

    # -- serialization ------------------------------------------------------

    def to_json(self, provenance: str | None = None) -> str:
        payload = {
            "n_modes": self.n_modes,
            "terms": [
                {
                    "coeff": [c.real, c.imag],
                    "amps": [[z.real, z.imag] for z in a],
                }
                for c, a in zip(self.coeffs, self.amps)
            ],
        }
        if provenance is not None:
            payload["provenance"] = provenance
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CoherentSuperposition":
        payload = json.loads(text)
        coeffs = [complex(t["coeff"][0], t["coeff"][1]) for t in payload["terms"]]
        amps = [[complex(re, im) for re, im in t["amps"]] for t in payload["terms"]]
        return cls(coeffs=np.array(coeffs), amps=np.array(amps))


@dataclass(frozen=True)
class FockDistribution:
    """Photon-number probabilities P(0..n_max) with the truncation tail."""

    probs: np.ndarray
    tail: float

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    def mean(self) -> float:
        n = np.arange(len(self.probs))
        return float(np.sum(n * self.probs))

    def variance(self) -> float:
        n = np.arange(len(self.probs))
        m = self.mean()
        return float(np.sum((n - m) ** 2 * self.probs))

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", "P"])
            for n, p in enumerate(self.probs):
                writer.writerow([n, f"{p:.12e}"])


def default_n_max(state: CoherentSuperposition) -> int:
    """ceil(max|alpha|^2 + 10 max|alpha|): a 10-sigma Poisson tail."""
    amax = float(np.max(np.abs(state.amps))) if state.n_terms else 0.0
    return int(np.ceil(amax**2 + 10.0 * amax)) + 1


def photon_distribution(state: CoherentSuperposition, n_max: int | None = None) -> FockDistribution:
    """P(n) = |sum_i c_i e^{-|a_i|^2/2} a_i^n / sqrt(n!)|^2 for one mode.

    Log-space amplitudes keep n ~ 200 (alpha ~ 9) finite.  The distribution
    is renormalized over the truncation window; the pre-normalization tail
    mass is reported so callers can check the window was wide enough.
    """
    if state.n_modes != 1:
        raise ValueError("photon_distribution expects a single-mode state")
    if n_max is None:
        n_max = default_n_max(state)
    n = np.arange(n_max + 1)
    log_fact = np.array([lgamma(k + 1.0) for k in n])
    amp = np.zeros(n_max + 1, dtype=complex)
    for c, a in zip(state.coeffs, state.amps[:, 0]):
        if a == 0:
            term = np.zeros(n_max + 1, dtype=complex)
            term[0] = c
        else:
            log_term = n * np.log(complex(a)) - 0.5 * log_fact - 0.5 * abs(a) ** 2
            term = c * np.exp(log_term)
        amp += term
    probs = np.abs(amp) ** 2
    total = probs.sum()
    norm2 = state.norm_squared()
    tail = max(0.0, 1.0 - total / norm2)
    return FockDistribution(probs=probs / total, tail=tail)


# ---------------------------------------------------------------------------
# Passive linear optics
# ---------------------------------------------------------------------------

def phase_shifter(state: CoherentSuperposition, varphi: float, mode: int = 0) -> CoherentSuperposition:
    """U(phi) |beta> = |beta e^{i phi}> applied to one mode; norm preserved."""
    amps = state.amps.copy()
    amps[:, mode] = amps[:, mode] * np.exp(1j * varphi)
    return CoherentSuperposition(state.coeffs.copy(), amps).merged()


def beam_splitter(state: CoherentSuperposition, theta: float = np.pi / 4) -> CoherentSuperposition:
    """Two-mode beam splitter, (b, g) -> (b cos + g sin, -g cos + b sin).

    The convention follows the transmitted/reflected assignment used for the
    cat-state interferometry expressions; term count is unchanged (then
    merged), coefficients untouched.
    """
    if state.n_modes != 2:
        raise ValueError("beam_splitter expects a two-mode state")
    b = state.amps[:, 0]
    g = state.amps[:, 1]
    ct, st = np.cos(theta), np.sin(theta)
    out = np.stack([b * ct + g * st, -g * ct + b * st], axis=1)
    return CoherentSuperposition(state.coeffs.copy(), out).merged()


def tensor(a: CoherentSuperposition, b: CoherentSuperposition) -> CoherentSuperposition:
    """Tensor product of two superpositions (all cross terms)."""
    coeffs = np.outer(a.coeffs, b.coeffs).ravel()
    amps = np.concatenate(
        [
            np.repeat(a.amps, b.n_terms, axis=0),
            np.tile(b.amps, (a.n_terms, 1)),
        ],
        axis=1,
    )
    return CoherentSuperposition(coeffs, amps)


def interferometer_psi_f(
    alpha0: complex,
    chi1: complex,
    chi2: complex,
    xi1: complex,
    xi2: complex,
    varphi: float,
) -> CoherentSuperposition:
    """Two-arm interferometer output for cat states on the recombining splitter.

    The input |alpha0> is split 50:50 into arms alpha1 = alpha0/sqrt(2); each
    arm carries a conditioned superposition |alpha1 + chi_i> + xi_i |alpha1>,
    arm 2 passes a phase shifter (varphi), and the arms recombine on a second
    50:50 splitter.  Built compositionally from tensor/phase_shifter/
    beam_splitter; equals the closed form assembled in
    :func:`interferometer_psi_f_closed_form`.
    """
    alpha1 = alpha0 / np.sqrt(2.0)
    arm1 = CoherentSuperposition.superpose([(1.0, [alpha1 + chi1]), (xi1, [alpha1])])
    arm2 = CoherentSuperposition.superpose([(1.0, [alpha1 + chi2]), (xi2, [alpha1])])
    both = tensor(arm2, arm1)  # mode 0 = arm 2 (the "b" input), mode 1 = arm 1
    both = phase_shifter(both, varphi, mode=0)
    out = beam_splitter(both, np.pi / 4.0)
    return out


def interferometer_psi_f_closed_form(
    alpha0: complex,
    chi1: complex,
    chi2: complex,
    xi1: complex,
    xi2: complex,
    varphi: float,
) -> CoherentSuperposition:
    """Explicit four-branch output state of the two-cat interferometer.

    Transmitted port: [alpha1 (1 + e^{i phi}) + chi1 + chi2 e^{i phi}]/sqrt(2);
    reflected port:  [-alpha1 (1 - e^{i phi}) - chi1 + chi2 e^{i phi}]/sqrt(2);
    with (chi1, chi2) -> (chi1, 0), (0, chi2), (0, 0) on the xi2, xi1 and
    xi1 xi2 branches.  At varphi = 0 the reflected amplitude of the xi1 xi2
    branch vanishes identically.
    """
    alpha1 = alpha0 / np.sqrt(2.0)
    ph = np.exp(1j * varphi)
    root2 = np.sqrt(2.0)

    def ports(c1, c2):
        tport = (alpha1 * (1.0 + ph) + c1 + c2 * ph) / root2
        rport = (-alpha1 * (1.0 - ph) - c1 + c2 * ph) / root2
        return tport, rport

    terms = []
    for coeff, c1, c2 in [
        (1.0, chi1, chi2),
        (xi2, chi1, 0.0),
        (xi1, 0.0, chi2),
        (xi1 * xi2, 0.0, 0.0),
    ]:
        tp, rp = ports(c1, c2)
        terms.append((coeff, [tp, rp]))
    return CoherentSuperposition.superpose(terms)


# ---------------------------------------------------------------------------
# Entanglement diagnostics
# ---------------------------------------------------------------------------

def reduced_purity(state: CoherentSuperposition, mode_index: int, norm_tol: float = 1e-9) -> float:
    """Tr[rho_mode^2] of a normalized two-mode superposition, closed form.

    With per-mode Gram matrices A (kept mode) and B (traced mode),
    Tr[rho_A^2] = sum_{ijkl} c_i c_j* c_k c_l* B_ji B_lk A_jk A_li.
    Returns 1 exactly for product states.
    """
    if state.n_modes != 2:
        raise ValueError("reduced_purity expects a two-mode state")
    if abs(state.norm_squared() - 1.0) > norm_tol:
        raise ValueError("state must be normalized")
    keep = state.amps[:, mode_index]
    rest = state.amps[:, 1 - mode_index]

    def gram1(v):
        return np.exp(
            -0.5 * np.abs(v[:, None]) ** 2
            - 0.5 * np.abs(v[None, :]) ** 2
            + np.conj(v[:, None]) * v[None, :]
        )

    a = gram1(keep)
    b = gram1(rest)
    c = state.coeffs
    val = np.einsum("i,j,k,l,ji,lk,jk,li->", c, np.conj(c), c, np.conj(c), b, b, a, a)
    return float(np.real(val))
