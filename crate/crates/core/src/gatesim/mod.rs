//! Gate-level simulation of the two-swap-test protocol on truncated Fock space.

mod gates;
mod protocol;

pub use gates::{
    controlled_bs_unitary, controlled_swap_unitary, modified_inputs_for_cbs, phase_shift, swap_test_unitary,
    BeamSplitter, GateSpec,
};
pub use protocol::{default_field_dim, run_protocol, run_protocol_with_flips, ProtocolRunner, ProtocolTrace};
