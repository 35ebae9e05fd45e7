"""Decoherence-free-subspace gate protocols on a dense state-vector engine."""
from .logic import (
    LeakageError,
    LogicalAmplitudes,
    LogicalQubit,
    decode_logical,
    decode_register,
    dfs_weight,
    encode_logical,
    encode_register,
    logical_bell,
)
from .noise import (
    AngleDistribution,
    CollectiveDephasingSpec,
    ErrorOperatorSpec,
    apply_collective_dephasing,
    apply_error_operator,
    classify_error,
    fidelity_under_dephasing,
)
from .oracle import (
    ChoiMatrix,
    choi_fidelity,
    density_oracle_choi,
    enumerate_branches,
    protocol_channel,
    unitary_choi,
)
from .protocols import (
    TABLE_1,
    PhaseParams,
    ProtocolSpec,
    cr_block,
    logical_cphase,
    logical_hadamard,
    logical_rz,
)
from .statevector import PureState, new_basis_state

__version__ = "0.1.0"
