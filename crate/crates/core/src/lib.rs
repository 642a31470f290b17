//! Side-by-side simulation of the Hadamard coined quantum walk and a
//! four-row birth-and-death chain whose populations, projected and rescaled,
//! reproduce the quantum coin probabilities.

pub mod analysis;
pub mod bench;
pub mod bridge;
pub mod cli;
pub mod coin;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod verify;
pub mod walk;

pub use analysis::{Distribution, Moments, RunReport};
pub use bridge::{canonical_embed, lift, quantum_distribution, quantum_distribution_from_rw, LiftedVector};
pub use coin::CoinAlgebra;
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, InitMode};
pub use walk::{LatticeConfig, QuantumState, RwState};
