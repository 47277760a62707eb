//! Coherent-state qubit protocols. (under construction)
pub struct LogicalQubit;
pub struct PauliFrame;
pub struct BellOutcome;
pub enum BellMeasurementKind {}
