"""Quantum-optical backaction of intense laser-atom interactions.

The package simulates the quantum state of the electromagnetic field that
drives high-harmonic generation (HHG) and above-threshold ionization (ATI),
conditions it into coherent-state superpositions ("optical cat states"), and
verifies those states through photon statistics, analytic Wigner functions,
and simulated homodyne tomography.  All core quantities are in atomic units
(hbar = m = e = 1).
"""

__version__ = "0.1.0"
