"""Noise-suppression protocol toolkit: channel algebra, average-fidelity
evaluation, and optimization of measure-before/correct-after control under
depolarizing noise."""

from .channels import (
    PauliTransferMatrix,
    RotationDecomposition,
    apply_choi,
    choi_from_kraus,
    choi_from_ptm,
    commute_through_depolarizing,
    compose,
    depolarizing,
    identity_choi,
    is_cp,
    is_tp,
    is_tpcp,
    kraus_from_choi,
    ptm_from_choi,
    ptm_rotation_decomposition,
    qubit_cptp_check_ruskai,
    qubit_extreme_closure_check,
    random_tpcp_choi,
    unitary_channel,
)
from .metrics import (
    McEstimate,
    average_fidelity_exact,
    average_fidelity_monte_carlo,
    fidelity,
    hs_trace_of_map,
    penalty,
    protocol_objective_choi,
)
from .linalg import (
    PAULI,
    haar_random_pure_state,
    hs_inner,
    partial_trace,
    partial_transpose,
    swap_operator,
    tensor_product,
)
from .optimize import (
    AnnealConfig,
    AnnealResult,
    CholeskyParams,
    SweepResult,
    SweepRow,
    anneal,
    brute_force_tpcp_expost,
    brute_force_unitary_expost,
    dn_fidelity,
    dr_fidelity,
    objective,
    optimal_expost_qubit,
    random_init,
    sweep,
)
from .protocols import (
    Branch,
    InvalidProtocolError,
    Protocol,
    average_operation,
    discriminate_reprepare_protocol,
    do_nothing_protocol,
    load_protocol,
    sample_branch,
    save_protocol,
    simple_instrument_from_povm,
    validate_protocol,
)

__version__ = "0.1.0"
