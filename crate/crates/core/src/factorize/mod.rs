//! Schmidt decomposition, entanglement measures, product-inducing structures
//! and apparatus alignment.

mod search;

pub use search::{excess_locality, generator_basis, search_product_tps, SearchOptions, SearchOutcome};

use nalgebra::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{eig_hermitian, ensure_hermitian, partial_transpose, svd, Bipartition, CMat, CVec, StateVector};
use crate::random::rng;
use crate::scalar::{lit, modulus, Real};
use crate::tps::Tps;

/// Schmidt coefficients below this are discarded.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;
/// Overlaps closer than this are treated as tied in eigenvector selection.
pub const TIE_TOL: f64 = 1e-9;

/// `|ψ⟩ = Σₙ √pₙ |uₙ⟩ ⊗ |vₙ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition<T: Real> {
    pub cut: Bipartition,
    /// Descending, positive, summing to one.
    pub p: Vec<T>,
    pub u_basis: Vec<CVec<T>>,
    pub v_basis: Vec<CVec<T>>,
}

impl<T: Real> SchmidtDecomposition<T> {
    pub fn rank(&self) -> usize {
        self.p.len()
    }

    pub fn entropy(&self) -> T {
        shannon(&self.p)
    }

    pub fn reconstruct(&self) -> CVec<T> {
        let mut out = CVec::zeros(self.cut.total());
        for ((p, u), v) in self.p.iter().zip(&self.u_basis).zip(&self.v_basis) {
            out += u.kronecker(v).scale(p.sqrt());
        }
        out
    }
}

fn shannon<T: Real>(p: &[T]) -> T {
    p.iter().filter(|&&x| x > T::zero()).fold(T::zero(), |acc, &x| acc - x * x.ln())
}

fn amplitude_matrix<T: Real>(state: &StateVector<T>, cut: Bipartition) -> Result<CMat<T>> {
    cut.check(state.dim())?;
    let a = state.amplitudes();
    Ok(CMat::from_fn(cut.left, cut.right, |i, j| a[i * cut.right + j]))
}

pub fn schmidt<T: Real>(state: &StateVector<T>, cut: Bipartition) -> Result<SchmidtDecomposition<T>> {
    let dec = svd(&amplitude_matrix(state, cut)?);
    let cutoff = lit::<T>(SCHMIDT_CUTOFF);
    let keep: Vec<usize> = (0..dec.singular_values.len()).filter(|&k| dec.singular_values[k] >= cutoff).collect();
    let total = keep.iter().fold(T::zero(), |acc, &k| acc + dec.singular_values[k] * dec.singular_values[k]);
    Ok(SchmidtDecomposition {
        cut,
        p: keep.iter().map(|&k| dec.singular_values[k] * dec.singular_values[k] / total).collect(),
        u_basis: keep.iter().map(|&k| dec.u.column(k).into_owned()).collect(),
        v_basis: keep.iter().map(|&k| dec.v.column(k).map(|z| z.conj())).collect(),
    })
}

/// Von Neumann entropy (natural log) of either reduced state.
pub fn entanglement_entropy<T: Real>(state: &StateVector<T>, cut: Bipartition) -> Result<T> {
    let s = svd(&amplitude_matrix(state, cut)?).singular_values;
    let p: Vec<T> = s.iter().map(|&x| x * x).collect();
    Ok(shannon(&p))
}

/// `(‖ρ^{T_B}‖₁ − 1)/2`, evaluated as the magnitude of the negative spectrum.
pub fn negativity<T: Real>(rho: &CMat<T>, cut: Bipartition) -> Result<T> {
    let n = ensure_hermitian(rho)?;
    cut.check(n)?;
    let pt = partial_transpose(rho, &[cut.left, cut.right], &[1])?;
    let eig = eig_hermitian(&pt)?;
    Ok(eig.values.iter().filter(|&&l| l < T::zero()).fold(T::zero(), |acc, &l| acc - l))
}

/// Unitary whose first column is `v`, completed by Gram–Schmidt over the
/// standard basis in index order.
pub fn complete_basis<T: Real>(v: &CVec<T>) -> CMat<T> {
    let n = v.len();
    let skip = lit::<T>(1e-8);
    let mut cols: Vec<CVec<T>> = vec![v.unscale(v.norm())];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut w = CVec::zeros(n);
        w[k] = Complex::new(T::one(), T::zero());
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for c in &cols {
                let overlap = c.dotc(&w);
                w -= c * overlap;
            }
        }
        let norm_sq = w.norm_squared();
        if norm_sq < skip {
            continue;
        }
        cols.push(w.unscale(norm_sq.sqrt()));
    }
    CMat::from_columns(&cols)
}

/// `T = Σₖ |k⟩⟨bₖ|` with `b₀ = ψ`, so `T|ψ⟩ = |0⟩`.
pub fn construct_product_tps<T: Real>(state: &StateVector<T>, cut: Bipartition) -> Result<Tps<T>> {
    cut.check(state.dim())?;
    Tps::new(vec![cut.left, cut.right], complete_basis(state.amplitudes()).adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SelectionPolicy {
    /// Eigenvector with the largest overlap; ties go to the lowest index.
    MaxOverlap,
    /// Index drawn with probability `|⟨eₙ|φ⟩|²`.
    BornRandom { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment<T: Real> {
    pub unitary: CMat<T>,
    pub index: usize,
    pub eigenvalue: T,
    /// `|⟨eₙ|φ⟩|²` for every eigenvector, ascending-eigenvalue order.
    pub weights: Vec<T>,
    /// Several eigenvectors share the maximal overlap.
    pub tie: bool,
    /// The selected eigenvalue is degenerate.
    pub degenerate: bool,
}

/// Local unitary rotating `local_state` onto an eigenvector of `o_app`.
pub fn alignment_unitary<T: Real>(
    local_state: &StateVector<T>,
    o_app: &CMat<T>,
    policy: SelectionPolicy,
) -> Result<Alignment<T>> {
    let d = ensure_hermitian(o_app)?;
    if d != local_state.dim() {
        return Err(Error::DimensionMismatch { expected: d, found: local_state.dim() });
    }
    let eig = eig_hermitian(o_app)?;
    let phi = local_state.amplitudes();
    let overlaps: Vec<Complex<T>> = (0..d).map(|k| eig.vectors.column(k).dotc(phi)).collect();
    let weights: Vec<T> = overlaps.iter().map(|z| z.norm_sqr()).collect();
    let tie_tol = lit::<T>(TIE_TOL);
    let best = weights.iter().copied().fold(T::zero(), T::max);
    let tie = weights.iter().filter(|&&w| best - w <= tie_tol).count() > 1;
    let index = match policy {
        SelectionPolicy::MaxOverlap => weights.iter().position(|&w| best - w <= tie_tol).unwrap_or(0),
        SelectionPolicy::BornRandom { seed } => {
            let u: f64 = rng(seed).random();
            let total = weights.iter().fold(T::zero(), |a, &w| a + w);
            let target = lit::<T>(u) * total;
            let mut acc = T::zero();
            weights
                .iter()
                .position(|&w| {
                    acc += w;
                    acc > target
                })
                .unwrap_or_else(|| weights.iter().rposition(|&w| w > T::zero()).unwrap_or(0))
        }
    };
    let eigenvalue = eig.values[index];
    let degenerate = eig.values.iter().enumerate().any(|(k, &v)| k != index && (v - eigenvalue).abs() <= tie_tol);

    // phase the target so that ⟨e|φ⟩ is real and nonnegative
    let ov = overlaps[index];
    let phase = if modulus(ov) > T::zero() { ov.unscale(modulus(ov)) } else { Complex::new(T::one(), T::zero()) };
    let target = eig.vectors.column(index).map(|z| z * phase);
    let unitary = complete_basis(&target) * complete_basis(phi).adjoint();
    Ok(Alignment { unitary, index, eigenvalue, weights, tie, degenerate })
}

#[cfg(test)]
mod tests;
