//! Error types shared across the simulation backends and protocols.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The requested cat state has zero norm (e.g. odd cat at α = 0).
    #[error("degenerate cat: |α⟩ + e^(iφ)|-α⟩ has vanishing norm (α = {alpha}, φ = {phase})")]
    DegenerateCat { alpha: String, phase: f64 },

    /// A state with no terms where a non-empty state is required.
    #[error("empty state: operation requires at least one superposition term")]
    EmptyState,

    /// The Gram matrix produced a squared norm that is not real non-negative.
    #[error("Gram matrix inconsistency: squared norm {value} outside tolerance")]
    GramInconsistency { value: String },

    /// Normalizing or dividing by a state of zero norm.
    #[error("zero-norm state")]
    ZeroNorm,

    /// Conditioning on a measurement outcome of zero probability.
    #[error("impossible outcome: {context} has probability {probability:.3e}")]
    ImpossibleOutcome { context: String, probability: f64 },

    /// Bell measurement saw photons in both output ports, which cannot happen
    /// for states in the Bell-cat span.
    #[error("non-Bell input: both output modes carry photons with probability {probability:.3e}")]
    NonBellInput { probability: f64 },

    /// Mode index out of range.
    #[error("invalid mode {mode} for a state with {mode_count} modes")]
    InvalidMode { mode: usize, mode_count: usize },

    /// Two states (or labels) with different mode counts were combined.
    #[error("mode count mismatch: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },

    /// A coherent label does not fit in the requested truncation budget.
    #[error("truncation budget exceeded: label amplitude {amplitude} leaves tail {tail:.3e} > ε = {epsilon:.3e}")]
    BudgetExceeded {
        amplitude: String,
        tail: f64,
        epsilon: f64,
    },

    /// A Fock-space operation pushed weight past the cutoff.
    #[error("cutoff overflow: {tail:.3e} of probability in the top band exceeds ε = {epsilon:.3e}")]
    CutoffOverflow { tail: f64, epsilon: f64 },

    /// Protocol inputs carry different qubit amplitudes.
    #[error("qubit amplitude mismatch: {left} vs {right}")]
    AlphaMismatch { left: f64, right: f64 },

    /// A state that must lie in span{|α⟩, |-α⟩} has weight outside it.
    #[error("state outside the ±α span: residual {residual:.3e}")]
    OutsideSpan { residual: f64 },

    /// The density operator is not of the decohered-channel family expected here.
    #[error("not a decohered Bell-cat channel: {reason}")]
    NotDecoheredChannel { reason: String },

    /// Degenerate production-scheme parameters.
    #[error("degenerate setup: {reason}")]
    DegenerateSetup { reason: String },

    /// A protocol exhausted its retry budget.
    #[error("retry budget exhausted after {attempts} attempts: {context}")]
    RetriesExhausted { attempts: usize, context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
