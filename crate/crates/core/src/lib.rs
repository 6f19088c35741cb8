//! Loss-aware stabilizer simulation of fault-tolerant neutral-atom circuits.

mod error;
pub mod analysis;
pub mod codes;
pub mod compiler;
pub mod experiments;
pub mod gate;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod tableau;

pub use error::{Error, Result};
pub use gate::{CliffordGate, GateKind};
pub use pauli::{Pauli, PauliString, Phase};
pub use tableau::{Basis, Measurement, StabilizerTableau};
