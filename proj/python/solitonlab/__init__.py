"""solitonlab: gKdV/mKdV soliton and breather laboratory.

Thin python layer over the C++ core (`solitonlab._solitonlab`). The core
exposes closed-form profiles, the pseudo-spectral ETDRK4 evolver,
linearized-operator spectra, modulation fits, Backlund residuals, and the
collision machinery.
"""

try:
    from . import _solitonlab  # packaged layout
except ImportError:  # development layout: extension on PYTHONPATH
    import _solitonlab

import sys as _sys

_sys.modules.setdefault("solitonlab._solitonlab", _solitonlab)

from solitonlab._solitonlab import (  # noqa: F401,E402
    BreatherParams,
    GridSpec,
    SolitonParams,
    SolitonlabError,
    antiderivative,
    breather_directions,
    breather_identity_residuals,
    breather_profile,
    breather_spectrum,
    collision_corrections,
    complex_soliton,
    conserved_quantities,
    evolve,
    fit_breather,
    fit_multi,
    fit_single,
    inner_product,
    localized_mass,
    lyapunov_H,
    measure_defect,
    scaling_direction,
    sobolev_norm,
    soliton_profile,
    soliton_spectrum,
    spectral_derivative,
)

__all__ = [
    "BreatherParams",
    "GridSpec",
    "SolitonParams",
    "SolitonlabError",
    "antiderivative",
    "breather_directions",
    "breather_identity_residuals",
    "breather_profile",
    "breather_spectrum",
    "collision_corrections",
    "complex_soliton",
    "conserved_quantities",
    "evolve",
    "fit_breather",
    "fit_multi",
    "fit_single",
    "inner_product",
    "localized_mass",
    "lyapunov_H",
    "measure_defect",
    "scaling_direction",
    "sobolev_norm",
    "soliton_profile",
    "soliton_spectrum",
    "spectral_derivative",
]
