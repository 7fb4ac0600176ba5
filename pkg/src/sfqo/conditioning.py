"""Post-measurement field states built from the HHG displacement amplitudes.

Conditioning on "harmonics were generated" subtracts the projection onto the
pre-interaction field state, leaving two-branch coherent-state
superpositions: an entangled all-mode state, the infrared cat obtained by
projecting the harmonic modes on their shifted coherent states, its XUV
counterpart, and the two-color entangled state.  Free-evolution phases are
frozen at the reference time t = T (end of pulse), where every integer
harmonic has completed a whole number of cycles.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fock import CoherentSuperposition, overlap


class Provenance(str, Enum):
    HHG_FULL = "HHG_FULL"
    HHG_IR_CAT = "HHG_IR_CAT"
    HHG_XUV_CAT = "HHG_XUV_CAT"
    TWO_COLOR = "TWO_COLOR"


@dataclass(frozen=True)
class ConditionedState:
    state: CoherentSuperposition
    provenance: Provenance

    def to_json(self) -> str:
        return self.state.to_json(provenance=self.provenance.value)


def post_hhg_state(alpha_l: complex, chis: np.ndarray) -> ConditionedState:
    """Entangled multimode state heralded by harmonic emission.

    Modes are [fundamental, harmonic 2, ..., harmonic n].  chis[0] shifts the
    fundamental, chis[1:] the harmonics (initially in vacuum).  The state is

        e^{i phi} |alpha+chi_0> |chi_1> ... - xi_IR xi_HH e^{i phi} |alpha> |0> ...

    with xi_IR = <alpha|alpha+chi_0>, xi_HH = prod_q <0|chi_q>, and
    phi = Im[alpha chi_0*] the lab-frame displacement phase, normalized.
    """
    chis = np.atleast_1d(np.asarray(chis, dtype=complex))
    if np.all(chis == 0):
        raise ValueError("all mode shifts vanish: conditioning selects a zero-norm state")
    xi_ir = overlap(alpha_l, alpha_l + chis[0])
    xi_hh = np.prod([overlap(0.0, c) for c in chis[1:]]) if len(chis) > 1 else 1.0
    phase = np.exp(1j * np.imag(alpha_l * np.conj(chis[0])))
    branch_a = np.concatenate([[alpha_l + chis[0]], chis[1:]])
    branch_b = np.concatenate([[alpha_l], np.zeros(len(chis) - 1, dtype=complex)])
    state = CoherentSuperposition.superpose(
        [
            (phase, branch_a),
            (-phase * xi_ir * xi_hh, branch_b),
        ]
    ).normalize()
    return ConditionedState(state=state, provenance=Provenance.HHG_FULL)


def ir_cat(alpha: complex, chi: complex, xi_scale: float = 1.0) -> CoherentSuperposition:
    """Infrared cat |alpha+chi> - xi_scale <alpha|alpha+chi> |alpha>, normalized.

    With xi_scale = 1 and before normalization the squared norm is exactly
    1 - e^{-|chi|^2}; the kitten limit |chi| -> 0 approaches the displaced
    single photon D(alpha)|1>, the opposite limit a plain coherent state
    |alpha+chi>.  xi_scale carries the |xi_HH|^2 attenuation of the second
    branch when the cat is obtained by projecting detected harmonic modes.
    """
    if chi == 0:
        raise ValueError("chi must be nonzero")
    xi_ir = overlap(alpha, alpha + chi)
    return CoherentSuperposition.superpose(
        [(1.0, [alpha + chi]), (-xi_scale * xi_ir, [alpha])]
    ).normalize()


def xuv_cat(chi_q: complex, xi_rest: float = 1.0) -> CoherentSuperposition:
    """Harmonic-mode cat |chi_q> - xi_q * xi_rest * |0>, normalized.

    xi_q = <0|chi_q>; xi_rest is the squared-overlap product of all the other
    detected modes (1 when they are projected exactly, 0 turns conditioning
    off and returns the plain coherent state).
    """
    if chi_q == 0:
        raise ValueError("chi_q must be nonzero")
    if not (0.0 <= xi_rest <= 1.0):
        raise ValueError("xi_rest must lie in [0, 1]")
    xi_q = overlap(0.0, chi_q)
    return CoherentSuperposition.superpose(
        [(1.0, [chi_q]), (-xi_q * xi_rest, [0.0])]
    ).normalize()


def two_color_entangled(
    alpha1: complex, alpha2: complex, chi1: complex, chi2: complex
) -> CoherentSuperposition:
    """Two-color conditioned state, an entangled coherent superposition.

    |a1+c1>|a2+c2> - xi |a1>|a2> with xi the product of the single-mode
    overlaps; separable again whenever one of the shifts vanishes.
    """
    if chi1 == 0 and chi2 == 0:
        raise ValueError("at least one shift must be nonzero")
    xi = overlap(alpha1, alpha1 + chi1) * overlap(alpha2, alpha2 + chi2)
    return CoherentSuperposition.superpose(
        [(1.0, [alpha1 + chi1, alpha2 + chi2]), (-xi, [alpha1, alpha2])]
    ).normalize()


def project_harmonics_on_shifted(cond: ConditionedState) -> CoherentSuperposition:
    """Project every harmonic mode of a full post-HHG state on |chi_q>.

    Reproduces ir_cat exactly: the branch-A harmonic projections give 1, the
    branch-B ones give |<chi_q|0>|^2-type overlap factors that merge into the
    xi_IR |xi_HH|^2 coefficient of the fundamental-mode superposition.
    """
    state = cond.state
    if state.n_modes < 2:
        raise ValueError("state has no harmonic modes to project")
    shifted = state.amps[0, 1:]  # branch-A harmonic amplitudes chi_q
    coeffs = []
    amps = []
    for c, a in zip(state.coeffs, state.amps):
        proj = np.prod([overlap(sq, aq) for sq, aq in zip(shifted, a[1:])])
        coeffs.append(c * proj)
        amps.append([a[0]])
    return CoherentSuperposition.superpose(list(zip(coeffs, amps))).normalize()
