"""Buckley-Leverett waterflooding with conservative finite-volume transport
and a bounded-interval multiwavelet representation of the state."""

from .config import RunConfig, parse_config
from .constitutive import (FluidRockParams, effective_saturation, flux_derivative,
                           fractional_flow, max_wave_speed, mobilities,
                           relative_permeabilities, transport_flux)
from .diagnostics import (detail_energies, error_metrics, front_location, fv_mw_rmse,
                          mass_balance_defect, total_variation)
from .fv_transport import (FluxLedger, Grid, SaturationState, advance_to, cfl_dt,
                           godunov_flux, residual, rusanov_flux, ssprk2_step)
from .mw_interval import (MWTree, compress, detail_norms, evaluate, post_filter,
                          project_cell_averages, reconstruct_cell_averages)
from .outputs import write_outputs
from .reference_bl import (ReferenceSolution, build_reference, reference_probe,
                           reference_profile)
from .runner import RunOutputs, convergence_study, run_simulation

__version__ = "0.1.0"
