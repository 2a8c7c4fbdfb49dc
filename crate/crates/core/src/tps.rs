//! Tensor product structures: equivalence up to local unitaries and subsystem
//! permutations, operator Schmidt rank, commuting subalgebras, and the locality
//! of Hamiltonians seen through a given structure.

use itertools::Itertools;
use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    ensure_square, ensure_unitary, max_abs, permute_subsystems, svd, Bipartition, CMat, HilbertSpace, StateVector,
};
use crate::pauli::{locality_weight, pauli_decompose, Locality, COEFF_THRESHOLD, MAX_FULL_DECOMPOSITION_SITES};
use crate::scalar::{lit, modulus, Real};

/// Relative singular-value cutoff for operator Schmidt rank.
pub const RANK_TOL: f64 = 1e-8;
/// Largest factor count for which subsystem permutations are enumerated.
pub const MAX_PERMUTATION_FACTORS: usize = 8;

/// Representative `T: ℋ → ⊗ᵢ ℋᵢ` of a tensor product structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Tps<T: Real> {
    space: HilbertSpace,
    map: CMat<T>,
}

impl<T: Real> Tps<T> {
    pub fn new(factor_dims: Vec<usize>, map: CMat<T>) -> Result<Self> {
        let space = HilbertSpace::new(factor_dims)?;
        let n = ensure_unitary(&map)?;
        if n != space.total_dim() {
            return Err(Error::DimensionMismatch { expected: space.total_dim(), found: n });
        }
        Ok(Self { space, map })
    }

    pub fn identity(factor_dims: Vec<usize>) -> Result<Self> {
        let space = HilbertSpace::new(factor_dims)?;
        let n = space.total_dim();
        Ok(Self { space, map: CMat::identity(n, n) })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn factor_dims(&self) -> &[usize] {
        self.space.factor_dims()
    }

    pub fn map(&self) -> &CMat<T> {
        &self.map
    }

    /// `T|ψ⟩`.
    pub fn apply_state(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        psi.apply(&self.map)
    }

    /// `T O T†`.
    pub fn conjugate(&self, op: &CMat<T>) -> Result<CMat<T>> {
        let n = ensure_square(op)?;
        if n != self.map.nrows() {
            return Err(Error::DimensionMismatch { expected: self.map.nrows(), found: n });
        }
        Ok(&self.map * op * self.map.adjoint())
    }
}

/// Realignment `Ũ[(i,k),(j,l)] = U[(i,j),(k,l)]` across the cut `dA · dB`.
pub fn reshuffle<T: Real>(u: &CMat<T>, cut: Bipartition) -> Result<CMat<T>> {
    let n = ensure_square(u)?;
    cut.check(n)?;
    let (da, db) = (cut.left, cut.right);
    let mut out = CMat::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * da + k, j * db + l)] = u[(i * db + j, k * db + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Number of operator Schmidt coefficients above `tol` relative to the largest.
pub fn operator_schmidt_rank<T: Real>(u: &CMat<T>, cut: Bipartition, tol: T) -> Result<usize> {
    Ok(svd(&reshuffle(u, cut)?).relative_rank(tol))
}

/// Operator Schmidt rank across every bipartition of the factors.
///
/// Each bipartition is reported once, keyed by the side containing factor 0.
pub fn bipartition_ranks<T: Real>(u: &CMat<T>, dims: &[usize], tol: T) -> Result<Vec<(Vec<usize>, usize)>> {
    let space = HilbertSpace::new(dims.to_vec())?;
    let n = ensure_square(u)?;
    if n != space.total_dim() {
        return Err(Error::DimensionMismatch { expected: space.total_dim(), found: n });
    }
    let f = dims.len();
    let mut out = Vec::new();
    for mask in 1usize..(1 << (f - 1)) {
        // factor 0 always on the left; `mask` chooses which of the others join it
        let left: Vec<usize> = std::iter::once(0).chain((1..f).filter(|k| mask & (1 << (k - 1)) != 0)).collect();
        out.push((left.clone(), rank_for_subset(u, dims, &left, tol)?));
    }
    if f >= 2 {
        // the split {0} | rest corresponds to mask 0
        out.insert(0, (vec![0], rank_for_subset(u, dims, &[0], tol)?));
    }
    out.retain(|(left, _)| left.len() < f);
    Ok(out)
}

fn rank_for_subset<T: Real>(u: &CMat<T>, dims: &[usize], left: &[usize], tol: T) -> Result<usize> {
    let perm: Vec<usize> = left.iter().copied().chain((0..dims.len()).filter(|k| !left.contains(k))).collect();
    let p = permute_subsystems::<T>(dims, &perm)?;
    let moved = &p * u * p.adjoint();
    let dl: usize = left.iter().map(|&k| dims[k]).product();
    operator_schmidt_rank(&moved, Bipartition::new(dl, u.nrows() / dl)?, tol)
}

/// `U = phase · F₀ ⊗ F₁ ⊗ …` with each factor unitary and its largest-magnitude entry real positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalProduct<T: Real> {
    pub factors: Vec<CMat<T>>,
    pub phase: Complex<T>,
}

impl<T: Real> LocalProduct<T> {
    pub fn reconstruct(&self) -> CMat<T> {
        let m = crate::hilbert::tensor_compose(&self.factors).expect("nonempty square factors");
        m.map(|z| z * self.phase)
    }
}

/// Rotates `m` so its largest-magnitude entry is real positive; returns the removed phase.
fn fix_phase<T: Real>(m: &mut CMat<T>) -> Complex<T> {
    let pivot = m.iter().copied().max_by(|a, b| modulus(*a).partial_cmp(&modulus(*b)).unwrap_or(std::cmp::Ordering::Equal));
    match pivot {
        Some(p) if modulus(p) > T::zero() => {
            let phase = p.unscale(modulus(p));
            let inv = phase.conj();
            m.iter_mut().for_each(|z| *z *= inv);
            phase
        }
        _ => Complex::new(T::one(), T::zero()),
    }
}

/// Peels factors left to right; `None` as soon as a cut has operator Schmidt rank above one.
pub fn is_local_product<T: Real>(u: &CMat<T>, dims: &[usize], tol: T) -> Result<Option<LocalProduct<T>>> {
    let space = HilbertSpace::new(dims.to_vec())?;
    let n = ensure_square(u)?;
    if n != space.total_dim() {
        return Err(Error::DimensionMismatch { expected: space.total_dim(), found: n });
    }
    let mut factors = Vec::with_capacity(dims.len());
    let mut phase = Complex::new(T::one(), T::zero());
    let mut rest = u.clone();
    for (k, &da) in dims.iter().enumerate().take(dims.len() - 1) {
        let db = rest.nrows() / da;
        let dec = svd(&reshuffle(&rest, Bipartition::new(da, db)?)?);
        if dec.relative_rank(tol) != 1 {
            return Ok(None);
        }
        let s = dec.singular_values[0];
        let alpha = lit::<T>(da as f64).sqrt();
        let mut a = CMat::from_fn(da, da, |i, j| dec.u[(i * da + j, 0)].scale(alpha));
        let mut b = CMat::from_fn(db, db, |i, j| dec.v[(i * db + j, 0)].conj().scale(s / alpha));
        phase *= fix_phase(&mut a);
        factors.push(a);
        if k + 2 == dims.len() {
            phase *= fix_phase(&mut b);
            factors.push(b);
        } else {
            rest = b;
        }
    }
    if dims.len() == 1 {
        let mut a = u.clone();
        phase *= fix_phase(&mut a);
        factors.push(a);
    }
    Ok(Some(LocalProduct { factors, phase }))
}

/// Result of [`tps_equivalent`].
#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence<T: Real> {
    pub equivalent: bool,
    pub reason: String,
    /// Subsystem permutation `π` with `T₁T₂⁻¹ = P_π · (⊗ Uᵢ)`.
    pub permutation: Option<Vec<usize>>,
    pub local: Option<LocalProduct<T>>,
    pub permutations_tried: usize,
}

/// Decides whether `T₁T₂⁻¹` is a subsystem permutation times a product of local unitaries.
///
/// Only permutations that carry each factor of `t2` onto a factor of `t1` with the
/// same dimension are enumerated.
pub fn tps_equivalent<T: Real>(t1: &Tps<T>, t2: &Tps<T>, tol: T) -> Result<Equivalence<T>> {
    let (n1, n2) = (t1.space.total_dim(), t2.space.total_dim());
    if n1 != n2 {
        return Err(Error::DimensionMismatch { expected: n1, found: n2 });
    }
    let (d1, d2) = (t1.factor_dims(), t2.factor_dims());
    let mut s1 = d1.to_vec();
    let mut s2 = d2.to_vec();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Ok(Equivalence {
            equivalent: false,
            reason: format!("factor dimensions {d1:?} and {d2:?} differ as multisets"),
            permutation: None,
            local: None,
            permutations_tried: 0,
        });
    }
    if d1.len() > MAX_PERMUTATION_FACTORS {
        return Err(Error::InvalidDims(format!("permutation search is capped at {MAX_PERMUTATION_FACTORS} factors")));
    }
    let m = &t1.map * t2.map.adjoint();
    let mut tried = 0;
    for perm in (0..d1.len()).permutations(d1.len()) {
        if perm.iter().enumerate().any(|(p, &src)| d1[p] != d2[src]) {
            continue;
        }
        tried += 1;
        let p = permute_subsystems::<T>(d2, &perm)?;
        if let Some(local) = is_local_product(&(p.adjoint() * &m), d2, tol)? {
            return Ok(Equivalence {
                equivalent: true,
                reason: "T1 T2^-1 factorizes into local unitaries after a subsystem permutation".into(),
                permutation: Some(perm),
                local: Some(local),
                permutations_tried: tried,
            });
        }
    }
    Ok(Equivalence {
        equivalent: false,
        reason: format!("no local factorization under {tried} admissible permutations"),
        permutation: None,
        local: None,
        permutations_tried: tried,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Commutation<T> {
    pub commute: bool,
    pub max_commutator_norm: T,
}

/// Checks `[a, b] = 0` for every pair of generators.
pub fn commuting_subalgebras<T: Real>(gens_a: &[CMat<T>], gens_b: &[CMat<T>], tol: T) -> Result<Commutation<T>> {
    let dim = gens_a.iter().chain(gens_b).map(|g| g.nrows()).next().unwrap_or(0);
    let mut worst = T::zero();
    for a in gens_a {
        for b in gens_b {
            for n in [ensure_square(a)?, ensure_square(b)?] {
                if n != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: n });
                }
            }
            worst = worst.max(max_abs(&(a * b - b * a)));
        }
    }
    Ok(Commutation { commute: worst < tol, max_commutator_norm: worst })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conjugated<T: Real> {
    pub matrix: CMat<T>,
    /// Present when every factor is a qubit and the chain is small enough to decompose.
    pub locality: Option<Locality>,
}

/// `T H T†` and, for qubit structures, its k-locality.
pub fn conjugate_hamiltonian<T: Real>(t: &Tps<T>, h: &CMat<T>) -> Result<Conjugated<T>> {
    let matrix = t.conjugate(h)?;
    let n = t.space.n_factors();
    let locality = if t.space.is_qubits() && n <= MAX_FULL_DECOMPOSITION_SITES {
        Some(locality_weight(&pauli_decompose(&matrix, n, lit(COEFF_THRESHOLD))?))
    } else {
        None
    };
    Ok(Conjugated { matrix, locality })
}
