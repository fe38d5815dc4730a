try:
    from importlib.metadata import PackageNotFoundError, version
    __version__ = version('conetorsion')
except (ImportError, PackageNotFoundError):
    __version__ = '0.0.0'

from .linkSpectrum import LinkSpectrum, ModeFamily, circle_quotient_spectrum,\
    circle_spectrum, sphere_spectrum, load_spectrum, write_spectrum,\
    validate_spectrum
from .coneCalculus import ConeIndices, ConePoint, cone_indices,\
    separated_laplacian
from .greenKernels import RadialKernel, coexact_green_eval, green_closed_form,\
    green_operator_m1
from .radialSolver import GalerkinSolver, RadialSolver
from .heatKernels import HeatGrid, cone_mode_sum_kernel, orbifold_image_kernel,\
    duhamel_compare, heat_trace
from .spindle import SpindleSpectrum, spindle_spectra, separated_model_spectrum
from .zetaTorsion import ZetaSeries, TorsionReport, spectral_zeta,\
    zeta_prime_at_zero, torsion, circle_torsion, residue_check,\
    torsion_compare, sobolev_check
from .cohomology import BettiVector, GluingData, cone_l2_cohomology,\
    quotient_invariant_cohomology, mayer_vietoris_betti, harmonic_dim_check
