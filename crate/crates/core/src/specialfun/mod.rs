//! Special functions and quadrature on the unit interval.

mod gamma;
mod quad;

pub use gamma::{beta, ln_beta, log_gamma};
pub(crate) use gamma::log_gamma_unchecked;
pub use quad::{integrate01, integrate01_pieces, integrate01_split, Quadrature, QuadratureSpec, ABSOLUTE_FLOOR};
