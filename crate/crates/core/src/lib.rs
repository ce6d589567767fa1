pub mod circuit;
pub mod gate_model;
pub mod optics;
pub mod protocols;
pub mod quantum;
