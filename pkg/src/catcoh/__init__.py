"""Optical cat states in a truncated Fock basis: loss, coherence, Wigner negativity, tomography."""
from .channels import (
    LossSpec,
    cat_loss_analytic,
    conversion_probability,
    dual_loss_on_operator,
    loss_channel,
    trace_distance,
)
from .errors import CatcohError, DomainError, StateFileError, TruncationWarning
from .fock import (
    CatSpec,
    DensityMatrix,
    FockKet,
    Parity,
    SqueezeSpec,
    cat_density,
    cat_ket,
    coherent_ket,
    ket_to_density,
    photon_subtract,
    squeezed_vacuum_ket,
    tail_mass,
)
from .measures import (
    CoherenceReport,
    cat_l1_truncated,
    cat_rel_entropy_truncated,
    fidelity_loss_analytic,
    fidelity_to_cat,
    l1_coherence,
    lossy_cat_coherence,
    negativity_analytic,
    rel_entropy_coherence,
    von_neumann_entropy,
)
from .tomography import QuadratureRecord, TomoConfig, build_povm, maxlik_reconstruct, sample_homodyne
from .wigner import quadrature_marginal, wigner_grid, wigner_negativity_grid, wigner_point

__version__ = "0.1.0"
