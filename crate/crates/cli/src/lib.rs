//! Library surface of the experiment runner. (under construction)
