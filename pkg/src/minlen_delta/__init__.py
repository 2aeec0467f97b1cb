"""Point interaction in quantum mechanics with a deformed position-momentum commutator."""

from .bound import (BoundState, PotentialSpec, bound_energy_series, bound_wavefunction,
                    kempf_bound_energy, norm_integral, sample_bound_state, solve_bound_state)
from .deformation import (DeformationSpec, Kind, consistency_check, make_custom_deformation,
                          make_deformation)
from .exceptions import (BudgetExceededError, DomainError, ExtrapolationError, NoSignChangeError,
                         PoleError, TruncationWarning)
from .flux import FluxReport, flux_conservation_check, plane_wave_flux, point_interaction_flux_correction
from .quasiposition import (KernelContext, SampledWavefunction, momentum_amplitude,
                            physical_state_check, position_eigenfunction, project_bandlimited,
                            tilde_delta)
from .scattering import (asymptotic_wave_check, find_resonance, g_principal, resonance_curve,
                         resonance_residual, scattering_amplitude, scattering_point,
                         scattering_wavefunction_far, transmission_reflection)

__version__ = "0.1.0"
