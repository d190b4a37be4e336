//! Quantized coupled, perturbed cat maps on the torus.
//!
//! The crate builds the finite torus Hilbert space, the Floquet propagators of
//! hyperbolic and elliptic cat maps with a diagonal coupling, and computes the
//! complexity diagnostics used to compare them: out-of-time-ordered
//! correlators, 2- and 4-point correlators, linear / von Neumann / Renyi-2
//! entropies, operator-Schmidt spectra and the Wigner separability entropy.
//! A classical module iterates the companion maps, and [`harness`] drives
//! reproducible experiments from the command line.

pub mod catmap;
pub mod classical;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod linalg;
pub mod otoc;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use hilbert::{ComplexOperator, DensityMatrix, HilbertDim, StateVector, Subsystem};
