"""Rates, converse bounds and capacities of Abelian group codes over classical
and classical-quantum channels."""

from .asymptotic import (
    CapacityCertificate,
    cond_mutual_info,
    cond_mutual_info_classical,
    cond_mutual_info_cq,
    example4_reference,
    example5_simplified,
    example6_degeneration,
    group_capacity,
    maximin_alpha_lp,
)
from .channels import ClassicalChannel, CQChannel, InputEnsemble, channel_from_json, reduced_ensembles
from .ensemble import SimReport, lemma2_exhaustive, simulate_classical, simulate_cq_srm, wilson_interval
from .groups import (
    AbelianGroup,
    CapExceededError,
    HomomorphismTable,
    InputGroup,
    Subgroup,
    ValidationError,
    WeightVector,
    enumerate_theta_hats,
    omega_theta,
    partition_into_T_theta,
    t_theta_size,
    theta_map,
)
from .htest import HypothesisTest, dh_classical, dh_quantum, group_mutual_info
from .rates import (
    OneShotReport,
    oneshot_converse,
    oneshot_group_capacity,
    oneshot_report,
    prop1_check,
    thm1_error_bound,
    thm2_rate_bound,
    thm4_error_bound,
    thm5_rate_bound,
)

__version__ = "0.1.0"
