"""Model-based channel-charting estimators."""
from .charting import (ALGORITHMS, MULTI_SUBCARRIER, Chart, ChartPoint, chart, estimate_thetas,
                       read_chart_csv, write_chart_csv)
from .joint import jm_estimate, jm_smooth, jm_spectrum
from .magnitude import LrModel, isq_rho, log_magnitude, lr_fit, lr_rho
from .music import (DEFAULT_THRESHOLD, PseudoSpectrum, SubspaceSplit, music_estimate_rho,
                    music_estimate_theta, music_spectrum, rho_spectrum, snapshot_covariance,
                    split_subspace, theta_spectrum)
from .rotate_sum import rs_estimate_rho, rs_estimate_theta, rs_spectrum_rho, rs_spectrum_theta
from .steering import RHO_GRID, RS_RHO_GRID, THETA_GRID, steering_rho, steering_theta
