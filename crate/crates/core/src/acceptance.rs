//! Acceptance criteria runners. (under construction)
