//! Truncated multi-mode Fock spaces: layouts, operators, states and projective measurement.

pub mod layout;
pub mod measure;
pub mod operator;
pub mod state;

pub use layout::SpaceLayout;
pub use measure::{swap_test_probabilities, Projectable, NULL_OUTCOME_FLOOR};
pub use operator::{
    annihilation, antisymmetric_projector, creation, number, swap_operator, swap_permutation, symmetric_projector,
    Operator,
};
pub use state::{
    coherent_amplitudes, coherent_product, coherent_state, coherent_state_with_tol, default_coherent_dim, fock_state,
    DensityState, PureState, DEFAULT_LEAKAGE_TOL,
};
