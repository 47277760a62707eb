//! Cat-state production schemes. (under construction)
pub struct AmplifySetup;
pub struct KerrSetup;
