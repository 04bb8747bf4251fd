//! Integrable and superintegrable Hamiltonian systems on the nine
//! two-dimensional Cayley-Klein spaces.

pub mod cli;
pub mod coalgebra;
pub mod ddouble;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hamiltonians;
pub mod kernels;
pub mod phase;
pub mod scalar;
pub mod signature;
pub mod verify;

pub use ddouble::DoubleDouble;
pub use error::{Error, Result};
pub use scalar::{Jet, Scalar};
pub use signature::{CKSignature, Kappas, Space};
