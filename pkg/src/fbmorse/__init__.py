"""Jacobi spectra, Morse indices and eigenvalue bounds for model free-boundary
CMC hypersurfaces of the upper hemisphere."""

__version__ = "0.1.0"

from .errors import (
    ConvergenceFailure,
    DegenerateCell,
    DegenerateInput,
    FbMorseError,
    GapTooSmall,
    InvalidDimension,
    InvalidModel,
    MassNotSPD,
    NotApplicable,
    NotTraceless,
    OutOfChart,
)
from .models import (
    GeometricData,
    Kind,
    ModelHypersurface,
    embed,
    free_boundary_check,
    geometric_data,
)
from .spectra import (
    IndexReport,
    SpectralLine,
    Spectrum,
    hemisphere_laplace_spectrum,
    jacobi_spectrum,
    jacobi_spectrum_degrees,
    product_spectrum,
    radius_window,
    sphere_laplace_spectrum,
    strong_index,
    weak_index,
)
