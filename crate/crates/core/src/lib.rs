//! Exact and probabilistic machinery for the `1/(2d)` expansion of the
//! oriented-percolation critical point.

pub mod diagrams;
pub mod flow;
pub mod laceexp;
pub mod mc;
pub mod oracle;
pub mod qalg;
pub mod walks;
