"""Data-driven analysis of relative degree and zero dynamics of LTI systems.

From finite input/output trajectories of an unknown discrete-time linear
system, the library decides the (vector) relative degree and the stability of
the zero dynamics, either under persistency-of-excitation assumptions or via
excitation-free informativity tests, and reconstructs a continuous-time system
from three zero-order-hold discretizations at rationally independent sampling
rates.
"""

from .linalg import Stability, ToleranceConfig
from .hankel import DataSet, GeneratorSubspace, Trajectory
from .lti import (
    BifForm,
    ContinuousStateSpace,
    DiscreteStateSpace,
    build_from_bif,
    byrnes_isidori,
    impulse_response,
    lag,
    oracle_ct_zero_dynamics,
    oracle_relative_degree,
    oracle_vector_relative_degree,
    oracle_zero_dynamics_stable,
    random_system,
    simulate,
    system_from_json,
    system_to_json,
    zoh_discretize,
)
from .reldeg import (
    RelDegKind,
    RelDegVerdict,
    VecRelDegKind,
    VecRelDegVerdict,
    reldeg_informativity,
    reldeg_lower_bound,
    reldeg_pe,
    reldeg_sharp,
    vecreldeg_informativity,
    vecreldeg_pe,
)
from .zerodyn import ZdVerdict, algorithm2, qtilde, zd_stability_pe
from .ct import (
    DiscretizationTriple,
    EigenPairing,
    pair_eigenvalues,
    realize_from_data,
    reconstruct_ct,
    reconstruct_from_data,
)

__version__ = "0.1.0"
