//! Analytical mode-I stress intensity factor of a suddenly loaded stationary
//! crack, and its extraction from simulated stress fields.

pub mod quadrature;
pub mod rayleigh;
pub mod sif;

pub use rayleigh::{rayleigh_estimate, rayleigh_speed, secular};
pub use sif::{extract_sif, sif_k0, sif_k1, CrackProblem, K1Oracle, SIFSeries, F_PLUS_0};
