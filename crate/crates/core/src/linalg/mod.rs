//! Linear algebra used by the spectral solvers.

pub mod banded;
pub mod eigen;
pub mod sparse;
pub mod tridiag;

pub use banded::BandCholesky;
pub use eigen::{hermitian_eigen, self_adjoint_norm, symmetric_eigen, EigenSettings, Eigenpairs, HermitianPencil};
pub use sparse::{CsrMatrix, TripletBuilder};
pub use tridiag::{SymTridiag, TridiagFactor, TridiagPencil};
