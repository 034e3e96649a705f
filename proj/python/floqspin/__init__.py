"""Floquet spin-Hamiltonian engine: quasienergies, clock-field searches and effective Hamiltonians.

Units: energies in ueV, fields in mT, times in ns.
"""

from ._floqspin import *  # noqa: F401,F403
from ._floqspin import __version__  # noqa: F401
