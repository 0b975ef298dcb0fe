r"""Exact scattering engine: plane-wave round-trip determinant over Matsubara
frequencies."""

from .geometry import Geometry, ThermalState
from .kernel import Discretization, RoundTripKernel, build_kernel, build_kernel_data, kernel_f_g, logdet_f_n, trace_f_n
from .polarization import polarization_coefficients, polarization_coefficients_vectors
from .reflection import reflection_planewave, reflection_planewave_zero_freq
from .thermal import EnergyReport, free_energy, free_energy_batch, force, force_batch

__all__ = [
    "Discretization",
    "EnergyReport",
    "Geometry",
    "RoundTripKernel",
    "ThermalState",
    "build_kernel",
    "build_kernel_data",
    "kernel_f_g",
    "free_energy",
    "free_energy_batch",
    "force",
    "force_batch",
    "logdet_f_n",
    "polarization_coefficients",
    "polarization_coefficients_vectors",
    "reflection_planewave",
    "reflection_planewave_zero_freq",
    "trace_f_n",
]
