//! Master-equation machinery: sparse Lindblad generators, an adaptive
//! Runge–Kutta stepper and the excitation-sector protocol engine shared by the
//! qubit toy model and the Kerr-cat engine.

pub mod integrate;
pub mod sector;
pub mod sparse;

pub use integrate::{Integrator, StepStats, DEFAULT_RTOL};
pub use sector::{
    open_field_dim, plan_input, reduce_ancilla, AncillaModel, BsSegment, CrossTerm, FirstTest, OpenSweep, SecondTest,
    Sector, SectorEngine, SectorState,
};
pub use sparse::{Generator, Liouvillian, MatrixRhs, SparseOp};

/// Which coupling is switched on during an integration window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    /// Controlled-phase beam splitter.
    Cpbs,
    /// Deterministic beam splitter.
    Bs,
}
