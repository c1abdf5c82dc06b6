//! Closed-form witnesses and Fisher information.

pub mod closed;
pub mod fisher;
pub mod plan;
pub mod witness;

pub use closed::{cfi_cbs_alpha0, witness_cbs_alpha0};
pub use fisher::{cfi, cfi_from_probabilities, max_cfi, maximize_over_phase, qfi, FD_STEP};
pub use plan::{Branch, FlipProbs, GateKind, OverlapSet, ProbeKind, ProbePlan};
pub use witness::{first_test_probability, linspace, witness_general, witness_noon, witness_with_flips};
