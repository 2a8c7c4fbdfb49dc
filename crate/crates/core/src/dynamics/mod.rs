//! Global unitary evolution, global invariants, the single-outcome
//! measurement procedure and TPS-entropy trajectories.

mod gie;

pub use gie::{
    gie_bipartite_state, gie_tripartite_state, mediator_states, phase_defect, GieBipartite, GieParams, GieTripartite,
    Mediator, G_NEWTON, HBAR,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::{
    alignment_unitary, entanglement_entropy, schmidt, search_product_tps, Alignment, SearchOptions, SelectionPolicy,
};
use crate::hilbert::{
    eig_hermitian, ensure_hermitian, identity, Bipartition, CMat, DensityMatrix, HermitianEigen, StateVector,
};
use crate::scalar::{lit, Real};
use crate::tps::Tps;

/// Entropy above which a structure is not accepted as product-inducing.
pub const FACTORIZATION_TOL: f64 = 1e-8;

/// Sign of the exponent in `U(τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// `U = e^{+iHτ}`.
    #[default]
    Positive,
    /// `U = e^{−iHτ}`.
    Schrodinger,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState<T: Real> {
    Pure(StateVector<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Real> QuantumState<T> {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(s) => s.dim(),
            Self::Mixed(r) => r.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix<T> {
        match self {
            Self::Pure(s) => s.density(),
            Self::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&StateVector<T>> {
        match self {
            Self::Pure(s) => Some(s),
            Self::Mixed(_) => None,
        }
    }
}

/// Hamiltonian, initial state and evaluation grid.
#[derive(Debug, Clone)]
pub struct EvolutionSpec<T: Real> {
    h: CMat<T>,
    eig: HermitianEigen<T>,
    initial: QuantumState<T>,
    tau_grid: Vec<T>,
    convention: SignConvention,
}

impl<T: Real> EvolutionSpec<T> {
    pub fn new(h: CMat<T>, initial: QuantumState<T>, tau_grid: Vec<T>, convention: SignConvention) -> Result<Self> {
        let n = ensure_hermitian(&h)?;
        if initial.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: initial.dim() });
        }
        if tau_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("tau grid must be ascending".into()));
        }
        let eig = eig_hermitian(&h)?;
        Ok(Self { h, eig, initial, tau_grid, convention })
    }

    pub fn hamiltonian(&self) -> &CMat<T> {
        &self.h
    }

    pub fn initial(&self) -> &QuantumState<T> {
        &self.initial
    }

    pub fn tau_grid(&self) -> &[T] {
        &self.tau_grid
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    /// `U(τ)` under the chosen sign convention.
    pub fn propagator(&self, tau: T) -> CMat<T> {
        let t = match self.convention {
            SignConvention::Positive => tau,
            SignConvention::Schrodinger => -tau,
        };
        crate::hilbert::exp_from_eigen(&self.eig, t)
    }
}

/// `ρ(τ) = U ρ₀ U†`; pure states stay pure.
pub fn evolve<T: Real>(spec: &EvolutionSpec<T>, tau: T) -> Result<QuantumState<T>> {
    let u = spec.propagator(tau);
    Ok(match &spec.initial {
        QuantumState::Pure(psi) => QuantumState::Pure(psi.apply(&u)?),
        QuantumState::Mixed(rho) => {
            let m = &u * rho.matrix() * u.adjoint();
            // restore exact Hermiticity lost to roundoff
            QuantumState::Mixed(DensityMatrix::new_unchecked((&m + m.adjoint()).unscale(lit(2.0))))
        }
    })
}

/// `v_O = tr(ρ O)`.
pub fn global_invariant<T: Real>(rho: &CMat<T>, o: &CMat<T>) -> Result<T> {
    let n = ensure_hermitian(o)?;
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rho.nrows() });
    }
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc += (rho[(i, j)] * o[(j, i)]).re;
        }
    }
    Ok(acc)
}

/// `v = Σₙ pₙ ṽₙ` with `ṽₙ = ⟨uₙ|O_app|uₙ⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexDecomposition<T> {
    pub value: T,
    /// `(pₙ, ṽₙ)` in descending Schmidt order.
    pub terms: Vec<(T, T)>,
}

impl<T: Real> ConvexDecomposition<T> {
    pub fn convex_sum(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, &(p, v)| acc + p * v)
    }
}

pub fn convex_decomposition<T: Real>(
    state: &StateVector<T>,
    o_app: &CMat<T>,
    cut: Bipartition,
) -> Result<ConvexDecomposition<T>> {
    let d = ensure_hermitian(o_app)?;
    if d != cut.left {
        return Err(Error::DimensionMismatch { expected: cut.left, found: d });
    }
    let s = schmidt(state, cut)?;
    let terms = s.p.iter().zip(&s.u_basis).map(|(&p, u)| (p, u.dotc(&(o_app * u)).re)).collect();
    let full = o_app.kronecker(&identity::<T>(cut.right));
    let value = global_invariant(state.density().matrix(), &full)?;
    Ok(ConvexDecomposition { value, terms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord<T: Real> {
    /// Eigenindex in ascending-eigenvalue order.
    pub index: usize,
    pub value: T,
    /// Entropy of `T_M|ψ⟩` across the cut.
    pub entropy: T,
    pub alignment: Alignment<T>,
    /// `|tr(ρ′ (O_app ⊗ 𝟙)) − oₙ|` in the aligned frame.
    pub residual: T,
    /// Fully transformed state `(U ⊗ 𝟙) T_M |ψ⟩`.
    pub final_state: StateVector<T>,
}

/// Change of structure to `t_m` followed by local alignment of the apparatus factor.
///
/// Refused with [`Error::NotFactorized`] when `t_m` does not factorize the state.
pub fn single_outcome_measure<T: Real>(
    state: &StateVector<T>,
    t_m: &Tps<T>,
    o_app: &CMat<T>,
    cut: Bipartition,
    policy: SelectionPolicy,
) -> Result<MeasurementRecord<T>> {
    cut.check(state.dim())?;
    let d = ensure_hermitian(o_app)?;
    if d != cut.left {
        return Err(Error::DimensionMismatch { expected: cut.left, found: d });
    }
    let moved = t_m.apply_state(state)?;
    let entropy = entanglement_entropy(&moved, cut)?;
    if entropy >= lit(FACTORIZATION_TOL) {
        return Err(Error::NotFactorized { entropy: crate::scalar::to_f64(entropy) });
    }
    let s = schmidt(&moved, cut)?;
    let local = StateVector::normalized(s.u_basis[0].clone())?;
    let alignment = alignment_unitary(&local, o_app, policy)?;
    let lift = alignment.unitary.kronecker(&identity::<T>(cut.right));
    let final_state = moved.apply(&lift)?;
    let full = o_app.kronecker(&identity::<T>(cut.right));
    let v = global_invariant(final_state.density().matrix(), &full)?;
    Ok(MeasurementRecord {
        index: alignment.index,
        value: alignment.eigenvalue,
        entropy,
        residual: (v - alignment.eigenvalue).abs(),
        alignment,
        final_state,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint<T> {
    pub tau: T,
    pub entropy_before: T,
    pub entropy_after: T,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Euclidean distance between this step's generator coefficients and the previous step's.
    pub generator_step: T,
}

/// Evolves along the grid and re-runs the product-structure search at every
/// point, warm-started from the previous generator.
pub fn tps_entropy_trajectory<T: Real>(
    spec: &EvolutionSpec<T>,
    cut: Bipartition,
    opts: &SearchOptions<T>,
) -> Result<Vec<TrajectoryPoint<T>>> {
    if spec.tau_grid.is_empty() {
        return Err(Error::Empty("tau grid"));
    }
    if spec.initial.as_pure().is_none() {
        return Err(Error::InvalidParameter("trajectory search needs a pure initial state".into()));
    }
    let mut out = Vec::with_capacity(spec.tau_grid.len());
    let mut warm: Option<Vec<T>> = None;
    for &tau in &spec.tau_grid {
        let evolved = evolve(spec, tau)?;
        let psi = evolved.as_pure().expect("pure initial state evolves to a pure state");
        let before = entanglement_entropy(psi, cut)?;
        let res = search_product_tps(psi, &spec.h, cut, opts, warm.as_deref())?;
        let generator_step = match &warm {
            Some(prev) => prev.iter().zip(&res.coefficients).fold(T::zero(), |a, (&x, &y)| a + (x - y) * (x - y)).sqrt(),
            None => res.coefficients.iter().fold(T::zero(), |a, &x| a + x * x).sqrt(),
        };
        out.push(TrajectoryPoint {
            tau,
            entropy_before: before,
            entropy_after: res.entropy,
            converged: res.converged,
            iterations: res.iterations,
            evaluations: res.evaluations,
            generator_step,
        });
        warm = Some(res.coefficients);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
