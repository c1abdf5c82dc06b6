//! Kerr-cat ancilla coupled to two cavity modes: master-equation simulation of
//! the two-swap-test protocol.

mod basis;
mod engine;
mod params;

pub use basis::{CatBasis, CAT_TRUNCATION_TOL};
pub use engine::{
    build_hamiltonians, cqed_engine, integrate, lindblad_rhs, measure_cat_x, run_cqed_protocol, run_cqed_sweep,
    stabilized_ancilla, CatMeasurement, CqedSweep, CqedTrace, LEAKAGE_WARNING,
};
pub use params::{CqedParams, CqedParamsHz};
