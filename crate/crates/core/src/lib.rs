pub mod algebra;
pub mod approximation;
pub mod constructions;
pub mod error;
pub mod exactla;
pub mod gdim;
pub mod gmodule;
pub mod homology;
pub mod preset;
mod serde_pairs;
pub mod session;
