//! Simulation of quantum information processing with coherent-state qubits.
//!
//! The crate has two state representations that check each other:
//!
//! - [`coherent`]: exact, truncation-free algebra on finite superpositions of
//!   multimode coherent states. All Gaussian-linear optics and the
//!   measurement conditionings used by the protocols are closed over this
//!   representation.
//! - [`fock`]: dense truncated number-basis tensors for the non-Gaussian
//!   operations (squeezing, Kerr evolution, photon subtraction) and as an
//!   independent oracle for everything the two backends share.
//!
//! On top of those sit the protocol layers: [`qubit`] (encoding, readout,
//! Bell-cat measurement, teleportation, and the H/R(θ)/CS gate set with
//! Pauli-frame bookkeeping), [`purification`] (photon-loss decoherence of
//! entangled coherent states and the purification-amplification protocol),
//! and [`production`] (cat-state production schemes: linear-optics
//! amplification, squeezed single photons, Kerr and cross-Kerr conditioning).
//!
//! [`acceptance`] bundles the end-to-end numerical checks that the library
//! reproduces the closed-form probabilities and fidelities the protocols are
//! built on; `catsim selftest` runs the same list from the command line.

pub mod acceptance;
pub mod coherent;
pub mod error;
pub mod fock;
mod linalg;
pub mod production;
pub mod purification;
pub mod qubit;

pub use coherent::{
    coherent_overlap, fidelity, make_cat, BsConvention, CoherentLabel, MeasurementKind,
    MeasurementRecord, SuperposedState,
};
pub use error::{Error, Result};
pub use fock::{choose_cutoff, to_fock, FockVector, TruncationBudget};
pub use production::{AmplifySetup, KerrSetup};
pub use purification::{ChannelParams, LabelDensity, PureMixture};
pub use qubit::{BellMeasurementKind, BellOutcome, LogicalQubit, PauliFrame};

pub(crate) type C64 = num_complex::Complex64;
