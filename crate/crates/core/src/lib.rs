//! Finite-dimensional toolkit for tensor product structures: spin-chain
//! Hamiltonians and their Pauli algebra, spectral dualities, equivalence of
//! tensor product structures, Schmidt factorization and a single-outcome
//! measurement procedure built from a change of structure plus local alignment.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the double-precision versions used by the CLI and text formats.

pub mod duality;
pub mod dynamics;
pub mod error;
pub mod factorize;
pub mod hilbert;
pub mod pauli;
pub mod random;
pub mod scalar;
pub mod tps;

pub use error::{Error, Result};
pub use hilbert::{Bipartition, HilbertSpace};
pub use pauli::{Pauli, PauliString};
pub use scalar::Real;

pub type Matrix = hilbert::CMat<f64>;
pub type Vector = hilbert::CVec<f64>;
pub type State = hilbert::StateVector<f64>;
pub type Density = hilbert::DensityMatrix<f64>;
pub type Hamiltonian = pauli::HamiltonianSpec<f64>;
pub type Tps = tps::Tps<f64>;
pub type Schmidt = factorize::SchmidtDecomposition<f64>;
pub type Matrix32 = hilbert::CMat<f32>;
pub type State32 = hilbert::StateVector<f32>;
