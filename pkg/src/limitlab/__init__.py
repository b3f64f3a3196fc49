"""Periodic-domain laboratory for nematic liquid-crystal hydrodynamics.

Implements the inertial Q-tensor model, the full inertial director
(Ericksen-Leslie) model, the exact coefficient bridge between them, and
the small-elastic-constant sweep that exhibits the uniaxial limit.
"""

from .bulk import (BulkParams, ElasticParams, bulk_energy, bulk_gradient,
                   critical_s, critical_tensor, hn_apply, hn_inverse,
                   linearized_gradient, project_in, project_out)
from .coefficients import (Certificate, LeslieParams, ViscosityParams,
                           check_el_dissipative, check_qs_dissipative,
                           check_quadratic_form, map_leslie)
from .el_solver import (ElConfig, ElState, el_energy, el_energy_residual,
                        el_rhs, el_step, run_el)
from .errors import LimitLabError
from .expansion import (build_well_prepared, expand_bulk_gradient,
                        first_corrector, o1_residual, remainder_energy)
from .frank import ericksen_stress, frank_energy, frank_molecular_field
from .grid import PeriodicGrid, SpectralContext, make_context
from .params import MaterialParams
from .presets import initial_fields, material_preset
from .qs_solver import (QsConfig, QsState, qs_dissipation_residual, qs_energy,
                        qs_rhs, qs_step, run_qs)
from .sweep import OrderFit, SweepConfig, fit_order, run_sweep
from .tensor_ops import (bform, biaxiality, cform, commutator, frobenius,
                         sym_traceless, uniaxial)

__version__ = "0.1.0"
