"""Quantum speed limit times of filtered qubit dephasing channels."""

__version__ = "0.1.0"

from .channels import (
    DephasingChannel,
    OhmicSpec,
    QuadratureError,
    RtnSpec,
    coherence_pd,
    coherence_rtn,
    coherence_rtn_dot,
    evolve,
    gamma_dot_ohmic,
    gamma_ohmic,
    kraus_pair,
    mu_rtn,
    phase_damping,
    rtn_dephasing,
)
from .engine import (
    QslResult,
    QuadConfig,
    SweepRow,
    qsl_closed_form,
    qsl_closed_form_pd,
    qsl_closed_form_rtn,
    qsl_general,
    sweep,
)
from .filtering import FilterOp, Trajectory, apply_filter, filtered_trajectory, success_probability
from .qubit import Matrix2, QubitDensity, hermitian_eigenvalues, purity, relative_purity, singular_values
