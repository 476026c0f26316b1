"""Vector sublattices, minimal lattice-subspaces and positive bases of R^k."""

from .errors import LatticeKitError
from .lattice import (
    BasicFunctionTable,
    BetaRange,
    Classification,
    Kind,
    MinLatResult,
    PayoffCollection,
    PositiveBasis,
    SublatticeResult,
    basic_function,
    beta_range,
    canonical_rays,
    classify,
    coords_in_basis,
    generate_sublattice,
    inf_in,
    minimal_lattice_subspace,
    positive_basis,
    sup_in,
)
from .markets import (
    CompletionResult,
    InsuranceProblem,
    InsuranceSolution,
    MarketSpec,
    basic_set,
    call_option,
    complete_by_options,
    is_complete,
    min_cost_insurance,
    put_option,
)

__version__ = "0.1.0"
