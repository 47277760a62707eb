//! Decoherence and purification. (under construction)
pub struct LabelDensity;
pub struct PureMixture;
pub struct ChannelParams;
