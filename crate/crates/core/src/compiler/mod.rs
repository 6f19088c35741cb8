//! Circuit IR, lowering, gadgets, encoding and movement scheduling.

pub mod encode;
pub mod faults;
pub mod gadgets;
pub mod ir;
pub mod lower;
pub mod schedule;

pub use encode::{encode_circuit, logical_final_state, simulate_logical, BlockPrep, EncodedBlock, EncodedCircuit, LogicalOp, LogicalProgram, LogicalReadout};
pub use faults::{fault_sweep, noiseless_check, FaultSweepReport};
pub use gadgets::{
    gadget_bare_parity, gadget_error_detect, gadget_ft_prep_00, gadget_ft_prep_832, gadget_logical_bell,
    gadget_prep_832, gadget_prep_plus1, ErrorDetectVariant, Gadget,
};
pub use ir::{CircuitIR, Instruction};
pub use lower::{lower, Lowered};
pub use schedule::{schedule, shape_preserving, AnnealConfig, CzSlot, MachineLayout, Move, Site, StepKind, TimedSchedule, TimedStep};
