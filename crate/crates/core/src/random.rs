//! Seeded random ensembles for tests, presets and optimizer initialization.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{tensor_compose, CMat, CVec, StateVector};
use crate::scalar::{lit, modulus, Real};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<T: Real>(r: &mut (impl Rng + ?Sized)) -> Complex<T> {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    Complex::new(lit(re), lit(im))
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn random_matrix<T: Real>(rows: usize, cols: usize, r: &mut (impl Rng + ?Sized)) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| normal(r))
}

pub fn random_hermitian<T: Real>(dim: usize, r: &mut (impl Rng + ?Sized)) -> CMat<T> {
    let a = random_matrix::<T>(dim, dim, r);
    (&a + a.adjoint()).unscale(lit(2.0))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the diagonal phases of R removed).
pub fn random_unitary<T: Real>(dim: usize, r: &mut (impl Rng + ?Sized)) -> CMat<T> {
    let qr = random_matrix::<T>(dim, dim, r).qr();
    let (mut q, rr) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = rr[(j, j)];
        let m = modulus(d);
        if m > T::zero() {
            let phase = Complex::new(d.re / m, d.im / m);
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}

/// Tensor product of independent Haar unitaries, one per factor.
pub fn random_local_unitary<T: Real>(dims: &[usize], r: &mut (impl Rng + ?Sized)) -> CMat<T> {
    let factors: Vec<CMat<T>> = dims.iter().map(|&d| random_unitary(d, r)).collect();
    tensor_compose(&factors).expect("nonempty square factors")
}

pub fn random_state<T: Real>(dim: usize, r: &mut (impl Rng + ?Sized)) -> StateVector<T> {
    let v = CVec::from_fn(dim, |_, _| normal(r));
    StateVector::normalized(v).expect("Gaussian vector is nonzero")
}

/// Full-rank mixed state `A A† / tr(A A†)`.
pub fn random_density<T: Real>(dim: usize, r: &mut (impl Rng + ?Sized)) -> CMat<T> {
    let a = random_matrix::<T>(dim, dim, r);
    let rho = &a * a.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}
