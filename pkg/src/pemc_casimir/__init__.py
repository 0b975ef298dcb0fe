r"""Casimir interaction between PEMC spheres via the plane-wave scattering approach.

The package computes the Casimir free energy and force between two spheres
made of perfect electromagnetic conductors (PEMC), including the sphere-plane
limit, at arbitrary temperature.  The exact round-trip determinant is
cross-validated against closed-form short-distance (PFA), large-distance
(dipole) and high-temperature asymptotics.

Submodules are imported lazily; the numerical engine pulls in numba, which is
only compiled on first use.
"""

__version__ = "0.1.0"

_ENGINE_NAMES = {"EnergyReport", "Geometry", "ThermalState", "free_energy", "force"}

__all__ = sorted(_ENGINE_NAMES | {"PemcMaterial", "__version__"})


def __getattr__(name):
    if name in _ENGINE_NAMES:
        from . import engine

        return getattr(engine, name)
    if name == "PemcMaterial":
        from .mie import PemcMaterial

        return PemcMaterial
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
