//! Finite-difference descent for a product-inducing structure.

use nalgebra::Complex;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hilbert::{eig_hermitian, ensure_hermitian, Bipartition, CMat, CVec, StateVector};
use crate::pauli::{pauli_decompose, PauliString, Pauli, COEFF_THRESHOLD};
use crate::random::rng;
use crate::scalar::{cis, lit, Real};
use crate::tps::Tps;

use super::entanglement_entropy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions<T> {
    /// Weight of the locality penalty.
    pub lambda: T,
    /// Maximum number of objective evaluations.
    pub budget: usize,
    /// Entropy below which the state counts as factorized.
    pub tol: T,
    pub seed: u64,
    pub fd_step: T,
    pub initial_step: T,
    /// Standard deviation of the random kick applied on a cold start.
    pub perturbation: T,
}

impl<T: Real> Default for SearchOptions<T> {
    fn default() -> Self {
        Self {
            lambda: T::zero(),
            budget: 5000,
            tol: lit(1e-6),
            seed: 0,
            fd_step: lit::<T>(1e-6).max(T::default_epsilon().sqrt()),
            initial_step: lit(0.5),
            perturbation: lit(0.3),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T: Real> {
    pub tps: Tps<T>,
    /// Hermitian `A` with `T = e^{iA}`.
    pub generator: CMat<T>,
    /// Coefficients of `A` over [`generator_basis`].
    pub coefficients: Vec<T>,
    /// Best objective so far, one entry per iteration starting with the initial point.
    pub objective_trace: Vec<T>,
    pub objective: T,
    pub entropy: T,
    pub excess_locality: T,
    pub converged: bool,
    pub evaluations: usize,
    pub iterations: usize,
}

/// All Pauli strings of weight one and two on `n` qubits.
pub fn generator_basis(n: usize) -> Vec<PauliString> {
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut out = Vec::new();
    for i in 0..n {
        for &a in &letters {
            out.push(PauliString::single(n, i, a));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for &a in &letters {
                for &b in &letters {
                    out.push(PauliString::from_sites(n, &[(i, a), (j, b)]));
                }
            }
        }
    }
    out
}

/// Fraction of the traceless Pauli weight of `h` on strings heavier than `k_ref`.
pub fn excess_locality<T: Real>(h: &CMat<T>, n_sites: usize, k_ref: usize) -> Result<T> {
    Ok(pauli_decompose(h, n_sites, lit(COEFF_THRESHOLD))?.weight_fraction_above(k_ref))
}

struct Generators {
    masks: Vec<(usize, usize, u32)>,
}

impl Generators {
    fn build<T: Real>(&self, coeffs: &[T], dim: usize) -> CMat<T> {
        let mut a = CMat::zeros(dim, dim);
        for (&(x, z, ny), &c) in self.masks.iter().zip(coeffs) {
            let base = match ny % 4 {
                0 => Complex::new(c, T::zero()),
                1 => Complex::new(T::zero(), c),
                2 => Complex::new(-c, T::zero()),
                _ => Complex::new(T::zero(), -c),
            };
            for col in 0..dim {
                let v = if (col & z).count_ones() % 2 == 0 { base } else { -base };
                a[(col ^ x, col)] += v;
            }
        }
        a
    }
}

struct Problem<'a, T: Real> {
    psi: &'a CVec<T>,
    h: &'a CMat<T>,
    cut: Bipartition,
    n_qubits: usize,
    k_ref: usize,
    lambda: T,
    gens: Generators,
    evaluations: usize,
}

#[derive(Clone, Copy)]
struct Point<T: Real> {
    objective: T,
    entropy: T,
    excess: T,
}

impl<T: Real> Problem<'_, T> {
    fn unitary(&self, coeffs: &[T]) -> Result<CMat<T>> {
        let eig = eig_hermitian(&self.gens.build(coeffs, self.psi.len()))?;
        let phases = CMat::from_diagonal(&CVec::from_iterator(eig.values.len(), eig.values.iter().map(|&l| cis(l))));
        Ok(&eig.vectors * phases * eig.vectors.adjoint())
    }

    fn eval(&mut self, coeffs: &[T]) -> Result<Point<T>> {
        self.evaluations += 1;
        let u = self.unitary(coeffs)?;
        let entropy = entanglement_entropy(&StateVector::normalized(&u * self.psi)?, self.cut)?;
        let excess = if self.lambda > T::zero() {
            let rotated = &u * self.h * u.adjoint();
            let sym = (&rotated + rotated.adjoint()).unscale(lit(2.0));
            excess_locality(&sym, self.n_qubits, self.k_ref)?
        } else {
            T::zero()
        };
        Ok(Point { objective: entropy + self.lambda * excess, entropy, excess })
    }
}

/// Minimizes `entropy(e^{iA}ψ) + λ·excess_locality(e^{iA} H e^{−iA})` over
/// Hermitian `A` spanned by weight ≤ 2 Pauli strings.
///
/// `warm` supplies starting coefficients; without it the search starts at
/// `A = 0` and, unless that point already factorizes, applies a seeded random kick.
pub fn search_product_tps<T: Real>(
    state: &StateVector<T>,
    h: &CMat<T>,
    cut: Bipartition,
    opts: &SearchOptions<T>,
    warm: Option<&[T]>,
) -> Result<SearchOutcome<T>> {
    let dim = state.dim();
    cut.check(dim)?;
    if !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if opts.budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if ensure_hermitian(h)? != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: h.nrows() });
    }
    let n_qubits = dim.trailing_zeros() as usize;
    let basis = generator_basis(n_qubits);
    let k = basis.len();
    let k_ref = if opts.lambda > T::zero() { pauli_decompose(h, n_qubits, lit(COEFF_THRESHOLD))?.to_spec().locality(T::zero()) } else { 0 };
    let mut prob = Problem {
        psi: state.amplitudes(),
        h,
        cut,
        n_qubits,
        k_ref,
        lambda: opts.lambda,
        gens: Generators { masks: basis.iter().map(|p| p.masks()).collect() },
        evaluations: 0,
    };

    let mut x: Vec<T> = match warm {
        Some(w) if w.len() != k => return Err(Error::DimensionMismatch { expected: k, found: w.len() }),
        Some(w) => w.to_vec(),
        None => vec![T::zero(); k],
    };
    let mut cur = prob.eval(&x)?;
    let done = |p: &Point<T>| opts.lambda == T::zero() && p.entropy < opts.tol;

    let mut r = rng(opts.seed);
    let kick = |x: &mut Vec<T>, r: &mut crate::random::SeededRng| {
        for c in x.iter_mut() {
            let g: f64 = StandardNormal.sample(r);
            *c += opts.perturbation * lit(g);
        }
    };
    let start = x.clone();
    if warm.is_none() && !done(&cur) && prob.evaluations < opts.budget {
        kick(&mut x, &mut r);
        let kicked = prob.eval(&x)?;
        if kicked.objective < cur.objective {
            cur = kicked;
        } else {
            x = start.clone();
        }
    }
    let mut best_x = x.clone();
    let mut best = cur;
    let mut trace = vec![best.objective];

    let min_step = lit::<T>(1e-12);
    let mut step = opts.initial_step;
    let mut iterations = 0;
    let two = lit::<T>(2.0);
    while !done(&best) && prob.evaluations + 2 * k < opts.budget && step >= min_step {
        iterations += 1;
        let mut grad = vec![T::zero(); k];
        for i in 0..k {
            let orig = x[i];
            x[i] = orig + opts.fd_step;
            let up = prob.eval(&x)?.objective;
            x[i] = orig - opts.fd_step;
            let down = prob.eval(&x)?.objective;
            x[i] = orig;
            grad[i] = (up - down) / (two * opts.fd_step);
        }
        let gnorm = grad.iter().fold(T::zero(), |a, &g| a + g * g).sqrt();
        if gnorm <= T::default_epsilon() {
            // stationary point that is not a minimum of interest: kick away from it
            kick(&mut x, &mut r);
            cur = prob.eval(&x)?;
        } else {
            while prob.evaluations < opts.budget && step >= min_step {
                let trial: Vec<T> = x.iter().zip(&grad).map(|(&xi, &g)| xi - step * g / gnorm).collect();
                let p = prob.eval(&trial)?;
                if p.objective < cur.objective {
                    x = trial;
                    cur = p;
                    step = (step * two).min(lit(std::f64::consts::PI));
                    break;
                }
                step /= two;
            }
        }
        if cur.objective < best.objective {
            best_x = x.clone();
            best = cur;
        }
        trace.push(best.objective);
    }

    let generator = prob.gens.build(&best_x, dim);
    let u = prob.unitary(&best_x)?;
    Ok(SearchOutcome {
        tps: Tps::new(vec![cut.left, cut.right], u)?,
        generator,
        coefficients: best_x,
        objective_trace: trace,
        objective: best.objective,
        entropy: best.entropy,
        excess_locality: best.excess,
        converged: best.entropy < opts.tol,
        evaluations: prob.evaluations,
        iterations,
    })
}
