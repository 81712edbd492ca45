//! Correlation dynamics of two-qubit states under Markovian and
//! non-Markovian noise.
//!
//! The crate evolves a two-qubit state through a single-qubit noise channel
//! in time-dependent Kraus form, tracks a ladder of correlation measures
//! (teleportation fidelity, Bell-CHSH strength, two flavors of steering,
//! concurrence) together with a quantum-speed-limit time, locates the points
//! where each measure dies or revives, and checks that those events respect
//! the strength ordering of the measures.

pub mod channels;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod output;
pub mod states;
pub mod table;
pub mod validate;

pub use channels::{
    apply, apply_one_sided, apply_two_sided, ChannelFamily, ChannelKind, ChannelParams,
    DpPrefactor, KernelValue, KrausSet, NoiseSides, Regime,
};
pub use error::{QcorrError, Result};
pub use linalg::ComplexMatrix;
pub use states::{
    make_pure, make_werner, pauli_decompose, pauli_reconstruct, BellState, DensityMatrix,
    PauliDecomposition, PureStateSpec, WernerSpec,
};
