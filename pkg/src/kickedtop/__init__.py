"""Kicked-top quantum-classical correspondence: PR fields of coherent states versus smoothed FTLE fields."""

from .errors import (BinningMismatchError, ConfigError, DegenerateDataError, DegenerateSpectrumError,
                     DimensionMismatchError, DomainError, EigensolverError, EmptyHistogramError,
                     KickedTopError, NonUnitaryError, NumericalError, ProjectionSingularityError)
from .spin import (DickeBasis, FloquetSpectrum, ModelParams, SpectrumCache, build_floquet,
                   build_jx_jy_jz, diagonalize_floquet, floquet_spectrum)
from .coherent import CoherentState, PhasePoint, coherent_state, geodesic_distance, stereographic
from .classical import (FTLEResult, asymptotic_lyapunov, chaotic_fraction, classify_regular, ftle,
                        ftle_batch, jacobian, map_step, tangent_step)
from .fields import (GaussianSmoother, Grid, ScalarField, ftle_field, ftle_fields, gftle_field,
                     make_grid, participation_ratio, pr_field, read_field_csv, write_field_csv)
from .stats import histogram, js_distance, pearson, spacing_ratio
from .pipeline import ComparisonCurve, ExperimentConfig, run_correspondence, run_phase_diagram

__version__ = "0.1.0"
