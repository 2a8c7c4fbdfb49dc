//! Gravitationally induced entanglement between two mass superpositions.

use std::str::FromStr;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::negativity;
use crate::hilbert::{eig_hermitian, partial_trace, Bipartition, CMat, CVec, DensityMatrix, StateVector};
use crate::scalar::{cis, lit, Real};

/// Newton's constant, m³ kg⁻¹ s⁻².
pub const G_NEWTON: f64 = 6.674e-11;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.0546e-34;

/// Branch phases in the order `LL, LR, RL, RR`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GieParams<T> {
    Phases { phases: [T; 4] },
    /// `φ_AB = G m₁ m₂ t_f / (ħ d_AB)`.
    Physical { m1: T, m2: T, tf: T, separations: [T; 4] },
}

impl<T: Real> GieParams<T> {
    pub fn phases(&self) -> Result<[T; 4]> {
        match *self {
            Self::Phases { phases } => Ok(phases),
            Self::Physical { m1, m2, tf, separations } => {
                if let Some(d) = separations.iter().find(|&&d| !(d > T::zero())) {
                    return Err(Error::InvalidParameter(format!("separation {d} must be positive")));
                }
                let scale = lit::<T>(G_NEWTON) * m1 * m2 * tf / lit::<T>(HBAR);
                Ok(separations.map(|d| scale / d))
            }
        }
    }
}

/// `|φ_LL + φ_RR − φ_LR − φ_RL|` reduced to `[0, π]`.
pub fn phase_defect<T: Real>(phases: &[T; 4]) -> T {
    let two_pi = T::two_pi();
    let mut d = (phases[0] + phases[3] - phases[1] - phases[2]) % two_pi;
    if d < T::zero() {
        d += two_pi;
    }
    d.min(two_pi - d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GieBipartite<T: Real> {
    pub phases: [T; 4],
    pub state: StateVector<T>,
    pub negativity: T,
}

/// `½ Σ e^{iφ_AB} |A⟩|B⟩` with `|L⟩ = |0⟩`, `|R⟩ = |1⟩`.
pub fn gie_bipartite_state<T: Real>(params: &GieParams<T>) -> Result<GieBipartite<T>> {
    let phases = params.phases()?;
    let half = lit::<T>(0.5);
    let state = StateVector::new(CVec::from_iterator(4, phases.iter().map(|&p| cis(p).scale(half))))?;
    let negativity = negativity(state.density().matrix(), Bipartition::new(2, 2)?)?;
    Ok(GieBipartite { phases, state, negativity })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mediator {
    Quantum,
    Classical,
}

impl FromStr for Mediator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Self::Quantum),
            "classical" => Ok(Self::Classical),
            other => Err(Error::InvalidParameter(format!("unknown mediator '{other}'"))),
        }
    }
}

/// Mediator states `|γ_AB⟩` with Gram matrix `(1 − s)𝟙 + s·J`, returned as columns.
///
/// `s = 0` gives orthonormal states, `s = 1` four copies of one state.
pub fn mediator_states<T: Real>(overlap: T) -> Result<CMat<T>> {
    if !(overlap >= T::zero() && overlap <= T::one()) {
        return Err(Error::InvalidParameter(format!("overlap {overlap} outside [0, 1]")));
    }
    let gram = CMat::from_fn(4, 4, |i, j| {
        let v = if i == j { T::one() } else { overlap };
        Complex::new(v, T::zero())
    });
    let eig = eig_hermitian(&gram)?;
    let root = CVec::from_iterator(4, eig.values.iter().map(|&l| Complex::new(l.max(T::zero()).sqrt(), T::zero())));
    Ok(&eig.vectors * CMat::from_diagonal(&root) * eig.vectors.adjoint())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GieTripartite<T: Real> {
    pub phases: [T; 4],
    pub mediator: Mediator,
    /// Coherent state for a quantum mediator, ordered mass₁ ⊗ mediator ⊗ mass₂.
    pub pure: Option<StateVector<T>>,
    /// Joint state of all three systems.
    pub state: DensityMatrix<T>,
    /// State of the two masses with the mediator traced out.
    pub masses: CMat<T>,
    pub mass_negativity: T,
}

/// Masses entangled through a mediator in one of four branch states.
///
/// A classical mediator keeps no coherence between branches.
pub fn gie_tripartite_state<T: Real>(params: &GieParams<T>, mediator: Mediator, overlap: T) -> Result<GieTripartite<T>> {
    let phases = params.phases()?;
    let gamma = mediator_states(overlap)?;
    let half = lit::<T>(0.5);
    let branch = |k: usize| -> CVec<T> {
        let (a, b) = (k / 2, k % 2);
        let mut v = CVec::zeros(16);
        for g in 0..4 {
            v[(a * 4 + g) * 2 + b] = gamma[(g, k)] * cis(phases[k]).scale(half);
        }
        v
    };
    let (pure, joint) = match mediator {
        Mediator::Quantum => {
            let psi = StateVector::normalized((0..4).map(branch).fold(CVec::zeros(16), |acc, v| acc + v))?;
            let rho = psi.density();
            (Some(psi), rho.into_matrix())
        }
        Mediator::Classical => {
            let rho = (0..4).map(branch).fold(CMat::zeros(16, 16), |acc, v| acc + &v * v.adjoint());
            (None, rho)
        }
    };
    let masses = partial_trace(&joint, &[2, 4, 2], &[0, 2])?;
    let mass_negativity = negativity(&masses, Bipartition::new(2, 2)?)?;
    Ok(GieTripartite { phases, mediator, pure, state: DensityMatrix::new(joint)?, masses, mass_negativity })
}
