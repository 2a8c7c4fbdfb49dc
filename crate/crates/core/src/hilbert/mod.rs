//! Dense complex linear algebra on finite-dimensional Hilbert spaces.
//!
//! Index convention: in a composite space the leftmost factor is the most
//! significant digit of the basis index, so site 1 of a chain selects the
//! top half of the state vector.

mod decomp;
pub mod io;
mod ops;

pub use decomp::{eig_hermitian, svd, unitary_exponential, HermitianEigen, Svd};
pub(crate) use decomp::exp_from_eigen;
pub use ops::{
    identity, kron_vectors, partial_trace, partial_transpose, permute_subsystems, tensor_compose,
};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, modulus, to_f64, Real};

pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

/// Largest supported total dimension (twelve qubits).
pub const MAX_DIM: usize = 1 << 12;

/// Ordered list of tensor factor dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    factor_dims: Vec<usize>,
}

impl HilbertSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::Empty("factor dimension list"));
        }
        if let Some(&d) = factor_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("factor dimension {d} < 2")));
        }
        let total = factor_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t <= MAX_DIM)
            .ok_or(Error::TooLarge(factor_dims.iter().product::<usize>()))?;
        debug_assert!(total >= 2);
        Ok(Self { factor_dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn n_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn is_qubits(&self) -> bool {
        self.factor_dims.iter().all(|&d| d == 2)
    }
}

/// A two-way split `d · D` of a Hilbert space, apparatus (left) first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    pub left: usize,
    pub right: usize,
}

impl Bipartition {
    pub fn new(left: usize, right: usize) -> Result<Self> {
        if left < 1 || right < 1 {
            return Err(Error::InvalidDims(format!("cut ({left}, {right}) has a zero side")));
        }
        Ok(Self { left, right })
    }

    pub fn total(&self) -> usize {
        self.left * self.right
    }

    pub fn reversed(&self) -> Self {
        Self { left: self.right, right: self.left }
    }

    pub(crate) fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::DimensionMismatch { expected: self.total(), found: dim });
        }
        Ok(())
    }
}

/// Max-abs entry of a complex matrix.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// `‖A − B‖_max`; panics on shape mismatch.
pub fn max_abs_diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc.max(modulus(*x - *y)))
}

pub fn ensure_square<T: Real>(m: &CMat<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// `‖M − M†‖_max`.
pub fn hermitian_deviation<T: Real>(m: &CMat<T>) -> T {
    let n = m.nrows();
    let mut dev = T::zero();
    for i in 0..n {
        for j in i..n {
            dev = dev.max(modulus(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    dev
}

/// `‖M†M − I‖_max`.
pub fn unitary_deviation<T: Real>(m: &CMat<T>) -> T {
    let prod = m.adjoint() * m;
    max_abs_diff(&prod, &CMat::identity(m.ncols(), m.ncols()))
}

pub fn is_hermitian<T: Real>(m: &CMat<T>, tol: T) -> bool {
    m.nrows() == m.ncols() && hermitian_deviation(m) <= tol
}

pub fn is_unitary<T: Real>(m: &CMat<T>, tol: T) -> bool {
    m.nrows() == m.ncols() && unitary_deviation(m) <= tol
}

pub(crate) fn ensure_hermitian<T: Real>(m: &CMat<T>) -> Result<usize> {
    let n = ensure_square(m)?;
    let dev = hermitian_deviation(m);
    // absolute floor plus a relative allowance for large-norm operators
    if dev > T::structural_tol() * max_abs(m).max(T::one()) {
        return Err(Error::NotHermitian { deviation: to_f64(dev) });
    }
    Ok(n)
}

pub(crate) fn ensure_unitary<T: Real>(m: &CMat<T>) -> Result<usize> {
    let n = ensure_square(m)?;
    let dev = unitary_deviation(m);
    if dev > T::structural_tol() {
        return Err(Error::NotUnitary { deviation: to_f64(dev) });
    }
    Ok(n)
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: CVec<T>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes whose norm is already 1 within the structural tolerance.
    pub fn new(amplitudes: CVec<T>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("state vector"));
        }
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > T::structural_tol() {
            return Err(Error::NotNormalized { norm: to_f64(norm) });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: CVec<T>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm <= T::default_epsilon() {
            return Err(Error::NotNormalized { norm: to_f64(norm) });
        }
        Ok(Self { amplitudes: amplitudes.unscale(norm) })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index });
        }
        let mut v = CVec::zeros(dim);
        v[index] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes: v })
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let a = Complex::new(lit::<T>(0.5).sqrt(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self { amplitudes: CVec::from_vec(vec![a, z, z, a]) }
    }

    pub fn product(factors: &[StateVector<T>]) -> Result<Self> {
        let vecs: Vec<CVec<T>> = factors.iter().map(|f| f.amplitudes.clone()).collect();
        Ok(Self { amplitudes: kron_vectors(&vecs)? })
    }

    pub fn amplitudes(&self) -> &CVec<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVec<T> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix { matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    /// Applies a square operator; the result is renormalized against roundoff only.
    pub fn apply(&self, op: &CMat<T>) -> Result<Self> {
        if op.ncols() != self.dim() || op.nrows() != op.ncols() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.ncols() });
        }
        Self::new(op * &self.amplitudes)
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, op: &CMat<T>) -> Complex<T> {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMat<T>) -> Result<Self> {
        ensure_square(&matrix)?;
        let tol = T::structural_tol();
        let dev = hermitian_deviation(&matrix);
        if dev > tol {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {})", to_f64(dev))));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {} + {}i", to_f64(tr.re), to_f64(tr.im))));
        }
        let eig = eig_hermitian(&matrix)?;
        if let Some(&lo) = eig.values.first() {
            if lo < -tol {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {}", to_f64(lo))));
            }
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMat<T>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        eig_hermitian(&self.matrix).map(|e| e.values).unwrap_or_default()
    }

    /// Convex mixture `Σ wᵢ ρᵢ`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(T, DensityMatrix<T>)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty("mixture"))?;
        let n = first.1.dim();
        let mut acc = CMat::zeros(n, n);
        for (w, rho) in parts {
            if rho.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: rho.dim() });
            }
            if *w < T::zero() {
                return Err(Error::InvalidParameter("negative mixture weight".into()));
            }
            acc += rho.matrix.scale(*w);
        }
        Self::new(acc)
    }
}
