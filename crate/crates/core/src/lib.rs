//! Multi-qubit cavity QED: Hamiltonians, spectra, virtual-transition
//! couplings, dressed-picture dynamics and a small circuit engine for
//! repetition codes built from spontaneous mixing gates.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod parallel;
pub mod perturbation;
pub mod qecc;
pub mod scenarios;
pub mod spectrum;

pub use algebra::{BareLabel, HilbertLayout, KetVector, Level, OperatorMatrix};
pub use error::{Error, Result};
pub use model::{HamiltonianKind, QubitParams, SystemConfig};
pub use parallel::Execution;
