use nalgebra::Complex;

use super::{ensure_hermitian, CMat};
use crate::error::Result;
use crate::scalar::{cis, lit, modulus, Real};

/// Spectral decomposition `M = V diag(λ) V†` with ascending `λ`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn reconstruct(&self) -> CMat<T> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        let out = scaled * self.vectors.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }
}

pub fn eig_hermitian<T: Real>(m: &CMat<T>) -> Result<HermitianEigen<T>> {
    let n = ensure_hermitian(m)?;
    // symmetrize so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()).unscale(T::one() + T::one());
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Singular value decomposition `M = U Σ V†`, singular values descending.
///
/// Thin form: for an `m × n` input `U` is `m × k`, `V` is `n × k` with `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: CMat<T>,
    pub singular_values: Vec<T>,
    pub v: CMat<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> CMat<T> {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.v.adjoint()
    }

    /// Number of singular values above `tol · σ_max`.
    pub fn relative_rank(&self, tol: T) -> usize {
        let top = self.singular_values.first().copied().unwrap_or_else(T::zero);
        if top <= T::zero() {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > tol * top).count()
    }
}

/// One-sided Jacobi SVD. nalgebra's complex bidiagonal SVD loses accuracy on
/// rank-deficient inputs, which is exactly where operator Schmidt ranks are decided.
pub fn svd<T: Real>(m: &CMat<T>) -> Svd<T> {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
    }
    let k = cols;
    if k == 0 {
        return Svd { u: CMat::zeros(rows, 0), singular_values: vec![], v: CMat::zeros(0, 0) };
    }
    let mut a = m.clone();
    let mut v = CMat::<T>::identity(k, k);
    let eps = T::default_epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = modulus(gamma);
                if g <= eps * (alpha * beta).sqrt() || g == T::zero() {
                    continue;
                }
                rotated = true;
                // rephase column q so the cross term is real, then apply a real rotation
                let e = gamma.unscale(g).conj();
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * e;
                        mat[(i, p)] = x.scale(cs) - y.scale(sn);
                        mat[(i, q)] = x.scale(sn) + y.scale(cs);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..k).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));
    let top = norms[order[0]];
    let mut u = CMat::<T>::zeros(rows, k);
    let mut filled = 0;
    for (j, &src) in order.iter().enumerate() {
        if norms[src] > top * eps * lit(rows as f64) && norms[src] > T::zero() {
            u.set_column(j, &a.column(src).unscale(norms[src]));
            filled = j + 1;
        }
    }
    complete_columns(&mut u, filled);
    Svd {
        u,
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: CMat::from_fn(k, k, |i, j| v[(i, order[j])]),
    }
}

const MAX_SWEEPS: usize = 80;

/// Fills columns `from..` with an orthonormal completion of the first `from` columns.
fn complete_columns<T: Real>(u: &mut CMat<T>, from: usize) {
    let (rows, k) = u.shape();
    let mut col = from;
    for e in 0..rows {
        if col == k {
            break;
        }
        let mut w = nalgebra::DVector::<Complex<T>>::zeros(rows);
        w[e] = Complex::new(T::one(), T::zero());
        for _ in 0..2 {
            for j in 0..col {
                let proj = u.column(j).dotc(&w);
                w -= u.column(j) * proj;
            }
        }
        let n = w.norm();
        if n > lit(0.5) {
            u.set_column(col, &w.unscale(n));
            col += 1;
        }
    }
}

/// `e^{iHτ}` through the eigendecomposition of `H`.
pub fn unitary_exponential<T: Real>(h: &CMat<T>, tau: T) -> Result<CMat<T>> {
    let eig = eig_hermitian(h)?;
    Ok(exp_from_eigen(&eig, tau))
}

pub(crate) fn exp_from_eigen<T: Real>(eig: &HermitianEigen<T>, tau: T) -> CMat<T> {
    let mut scaled = eig.vectors.clone();
    for (j, &l) in eig.values.iter().enumerate() {
        let phase: Complex<T> = cis(l * tau);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    scaled * eig.vectors.adjoint()
}
