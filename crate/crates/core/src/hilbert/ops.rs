use nalgebra::Complex;

use super::{ensure_square, CMat, CVec, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

/// Kronecker product `F₀ ⊗ F₁ ⊗ …`, leftmost factor most significant.
pub fn tensor_compose<T: Real>(factors: &[CMat<T>]) -> Result<CMat<T>> {
    let (first, rest) = factors.split_first().ok_or(Error::Empty("factor list"))?;
    ensure_square(first)?;
    let mut acc = first.clone();
    for f in rest {
        ensure_square(f)?;
        if acc.nrows() * f.nrows() > MAX_DIM {
            return Err(Error::TooLarge(acc.nrows() * f.nrows()));
        }
        acc = acc.kronecker(f);
    }
    Ok(acc)
}

pub fn kron_vectors<T: Real>(factors: &[CVec<T>]) -> Result<CVec<T>> {
    let (first, rest) = factors.split_first().ok_or(Error::Empty("factor list"))?;
    Ok(rest.iter().fold(first.clone(), |acc, v| acc.kronecker(v)))
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

fn check_dims<T: Real>(rho: &CMat<T>, dims: &[usize]) -> Result<usize> {
    let n = ensure_square(rho)?;
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != n {
        return Err(Error::DimensionMismatch { expected: total, found: n });
    }
    Ok(n)
}

/// Reduced operator on the subsystems listed in `keep` (kept in ascending order).
pub fn partial_trace<T: Real>(rho: &CMat<T>, dims: &[usize], keep: &[usize]) -> Result<CMat<T>> {
    let n = check_dims(rho, dims)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidDims(format!("subsystem index out of range for {} factors", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let m: usize = kept_dims.iter().product();
    let mut out = CMat::zeros(m, m);

    let mut dr = vec![0; dims.len()];
    let mut dc = vec![0; dims.len()];
    let mut kr = vec![0; keep.len()];
    let mut kc = vec![0; keep.len()];
    for r in 0..n {
        digits(r, dims, &mut dr);
        for c in 0..n {
            digits(c, dims, &mut dc);
            if traced.iter().any(|&t| dr[t] != dc[t]) {
                continue;
            }
            for (slot, &k) in keep.iter().enumerate() {
                kr[slot] = dr[k];
                kc[slot] = dc[k];
            }
            out[(compose(&kr, &kept_dims), compose(&kc, &kept_dims))] += rho[(r, c)];
        }
    }
    Ok(out)
}

/// Transposes the listed subsystems of an operator.
pub fn partial_transpose<T: Real>(rho: &CMat<T>, dims: &[usize], subsystems: &[usize]) -> Result<CMat<T>> {
    let n = check_dims(rho, dims)?;
    if subsystems.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidDims(format!("subsystem index out of range for {} factors", dims.len())));
    }
    let mut out = CMat::zeros(n, n);
    let mut dr = vec![0; dims.len()];
    let mut dc = vec![0; dims.len()];
    for r in 0..n {
        for c in 0..n {
            digits(r, dims, &mut dr);
            digits(c, dims, &mut dc);
            for &k in subsystems {
                std::mem::swap(&mut dr[k], &mut dc[k]);
            }
            out[(compose(&dr, dims), compose(&dc, dims))] = rho[(r, c)];
        }
    }
    Ok(out)
}

/// Permutation operator moving old factor `perm[p]` to position `p`.
///
/// The returned matrix maps `|i₀ … i_{N−1}⟩` to `|i_{perm[0]} … i_{perm[N−1]}⟩`.
pub fn permute_subsystems<T: Real>(dims: &[usize], perm: &[usize]) -> Result<CMat<T>> {
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidDims(format!("{perm:?} is not a permutation of {} factors", dims.len())));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n: usize = dims.iter().product();
    let mut out = CMat::zeros(n, n);
    let mut old = vec![0; dims.len()];
    let mut new = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut old);
        for (p, &src) in perm.iter().enumerate() {
            new[p] = old[src];
        }
        out[(compose(&new, &new_dims), i)] = Complex::new(T::one(), T::zero());
    }
    Ok(out)
}
