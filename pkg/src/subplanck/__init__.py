"""Phase-space numerics: Wigner functions, displacement overlaps, shell averages."""

from .analysis import (ConvergenceRow, RingingReport, VarianceRow, find_zeros,
                       fit_powerlaw, gaussian_convergence, peak_envelope,
                       ringing_report, variance_scaling)
from .bessel import scaled_bessel
from .errors import (CoverageError, DomainError, NyquistError, RingingError,
                     SupportError)
from .microcanonical import (DiskBilliard, GasBox, McEstimate, McSweep,
                             ShellSamples, disk_overlap_analytic, disk_series,
                             gas_overlap_analytic, gas_overlap_gaussian,
                             gas_series, mc_overlap, mc_sweep,
                             sample_box_shell, sample_disk_shell)
from .overlap import (Displacement, OverlapSeries, displace, overlap_direct,
                      overlap_from_wigner, overlap_ray, overlap_sq_autocorr)
from .statekit import (Grid1D, RandomWaveState, WaveFunction1D, autocorrelation,
                       cat_state, compass_state, evaluate_random_wave,
                       gaussian_packet, random_wave_state, superpose)
from .wigner import (WignerGrid, fringe_wavelength, marginal_x, normalization,
                     purity, read_wigner_binary, read_wigner_csv,
                     wigner_transform, write_wigner_binary, write_wigner_csv)

__version__ = "0.1.0"
