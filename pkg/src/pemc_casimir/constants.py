r"""Numerical constants shared across the package."""

import math

#: Apery's constant zeta(3) to 20 significant digits.
ZETA3 = 1.2020569031595942854

#: hbar*c in J*m, used to convert SI inputs to dimensionless quantities.
HBAR_C = 3.1615e-26

#: Boltzmann constant in J/K.
K_BOLTZMANN = 1.380649e-23

PI = math.pi
