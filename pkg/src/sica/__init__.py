"""Scale-invariant correspondence analysis of nonnegative tables."""
from .association import (
    AssociationMatrix,
    block_mf_index,
    ca_index,
    double_center,
    first_order_approx,
    log_odds_tetra,
    lra_index,
    mf_index,
    power_index_ratio,
)
from .ca import Decomposition, MfcaResult, ca_decompose, ca_decompose_sparse, lra_decompose, mfca, principal_map
from .fixtures import load_fixture
from .sinkhorn import BlockPartition, ScalingResult, detect_blocks, scale, unit_singular_count
from .sparsity import SparsityReport, min_support, sparsity_report
from .table import (
    CorrespondenceTable,
    CountTable,
    TableError,
    WeightPair,
    ingest_csv,
    merge_equivalent,
    power_transform,
    row_closure,
    sign_transform,
    sparse_sign,
    to_correspondence,
)
from .taxicab import tca_decompose, tca_oracle

__version__ = "0.1.0"
