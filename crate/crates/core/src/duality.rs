//! The four-site mysterious-box pair: an Ising chain in the σ frame, its dual
//! in the μ frame, the nonlocal map between their Pauli alphabets, and
//! spectral comparison tools.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{eig_hermitian, ensure_square, max_abs_diff, svd, CMat};
use crate::pauli::{build_hamiltonian, HamiltonianSpec, Pauli, PauliString};
use crate::scalar::{lit, to_f64, Real};
use crate::tps::{bipartition_ranks, tps_equivalent, Tps};

/// Number of sites in the μ-frame model.
pub const MU_SITES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldAxis {
    Z,
    X,
}

impl FieldAxis {
    pub fn letter(self) -> Pauli {
        match self {
            FieldAxis::Z => Pauli::Z,
            FieldAxis::X => Pauli::X,
        }
    }
}

fn push_nonzero<T: Real>(spec: &mut HamiltonianSpec<T>, c: T, p: PauliString) {
    if c != T::zero() {
        spec.push(c, p).expect("site count fixed by construction");
    }
}

/// Open Ising chain `J Σ σᶻσᶻ + h Σ σ^axis` on `n` sites.
///
/// `FieldAxis::Z` is the longitudinal chain, `FieldAxis::X` the transverse-field chain.
/// Terms with an exactly zero coefficient are omitted.
pub fn sigma_model<T: Real>(coupling: T, field: T, n: usize, axis: FieldAxis) -> Result<HamiltonianSpec<T>> {
    if n < 2 {
        return Err(Error::ChainTooShort(n));
    }
    let mut spec = HamiltonianSpec::new(n);
    for i in 0..n - 1 {
        push_nonzero(&mut spec, coupling, PauliString::from_sites(n, &[(i, Pauli::Z), (i + 1, Pauli::Z)]));
    }
    for i in 0..n {
        push_nonzero(&mut spec, field, PauliString::single(n, i, axis.letter()));
    }
    Ok(spec)
}

/// The μ-frame model `J Σ₁⁴ μˣ + h Σ₁³ μᶻμᶻ − J μ₄ˣ + h μ₁ᶻ`, term for term.
///
/// The `+J μ₄ˣ` and `−J μ₄ˣ` terms are kept separate; call
/// [`HamiltonianSpec::normalized`] to cancel them.
pub fn mu_model<T: Real>(coupling: T, field: T) -> HamiltonianSpec<T> {
    let n = MU_SITES;
    let mut spec = HamiltonianSpec::new(n);
    for i in 0..n {
        push_nonzero(&mut spec, coupling, PauliString::single(n, i, Pauli::X));
    }
    for i in 0..n - 1 {
        push_nonzero(&mut spec, field, PauliString::from_sites(n, &[(i, Pauli::Z), (i + 1, Pauli::Z)]));
    }
    push_nonzero(&mut spec, -coupling, PauliString::single(n, n - 1, Pauli::X));
    push_nonzero(&mut spec, field, PauliString::single(n, 0, Pauli::Z));
    spec
}

/// Pauli string with a real sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedPauli {
    pub sign: i8,
    pub string: PauliString,
}

/// Generator table `μᵢᶻ ↦ ∏_{j≤i} σⱼˣ`, `μᵢˣ ↦ σᵢᶻσᵢ₊₁ᶻ`, `μₙˣ ↦ σₙᶻ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualityMap {
    n_sites: usize,
}

impl Default for DualityMap {
    fn default() -> Self {
        Self { n_sites: MU_SITES }
    }
}

/// One algebraic relation between generator images, checked on matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraCheck {
    pub relation: String,
    pub deviation: f64,
    pub passed: bool,
}

impl DualityMap {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::ChainTooShort(n_sites));
        }
        Ok(Self { n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Image of `μᶻ` on a 0-based site.
    pub fn image_z(&self, site: usize) -> PauliString {
        let sites: Vec<(usize, Pauli)> = (0..=site).map(|j| (j, Pauli::X)).collect();
        PauliString::from_sites(self.n_sites, &sites)
    }

    /// Image of `μˣ` on a 0-based site.
    pub fn image_x(&self, site: usize) -> PauliString {
        if site + 1 < self.n_sites {
            PauliString::from_sites(self.n_sites, &[(site, Pauli::Z), (site + 1, Pauli::Z)])
        } else {
            PauliString::single(self.n_sites, site, Pauli::Z)
        }
    }

    /// Image of a μ-alphabet word, read as the product of its single-site generators.
    pub fn map_string(&self, word: &PauliString) -> Result<SignedPauli> {
        if word.n_sites() != self.n_sites {
            return Err(Error::SiteMismatch { expected: self.n_sites, found: word.n_sites() });
        }
        let mut phase = crate::pauli::Phase::ONE;
        let mut acc = PauliString::identity(self.n_sites);
        for (site, &letter) in word.letters().iter().enumerate() {
            let image = match letter {
                Pauli::I => continue,
                Pauli::X => self.image_x(site),
                Pauli::Z => self.image_z(site),
                Pauli::Y => return Err(Error::UndefinedImage { site }),
            };
            let (ph, next) = acc.mul(&image)?;
            phase = phase.mul(ph);
            acc = next;
        }
        let sign = phase.real_sign().expect("images of commuting Hermitian generators multiply to a Hermitian string");
        Ok(SignedPauli { sign, string: acc })
    }

    /// Rewrites a μ-frame Hamiltonian in the σ alphabet.
    pub fn map_spec<T: Real>(&self, spec: &HamiltonianSpec<T>) -> Result<HamiltonianSpec<T>> {
        let mut out = HamiltonianSpec::new(self.n_sites);
        for (c, w) in spec.terms() {
            let image = self.map_string(w)?;
            let c = if image.sign < 0 { -*c } else { *c };
            out.push(c, image.string)?;
        }
        Ok(out)
    }

    /// Involution, same-site anticommutation and distinct-site commutation of the images.
    pub fn algebra_checks<T: Real>(&self, tol: T) -> Vec<AlgebraCheck> {
        let n = self.n_sites;
        let zs: Vec<CMat<T>> = (0..n).map(|i| self.image_z(i).matrix()).collect();
        let xs: Vec<CMat<T>> = (0..n).map(|i| self.image_x(i).matrix()).collect();
        let id = CMat::<T>::identity(1 << n, 1 << n);
        let mut checks = Vec::new();
        let mut record = |relation: String, dev: T| {
            checks.push(AlgebraCheck { relation, deviation: to_f64(dev), passed: dev <= tol });
        };
        for i in 0..n {
            record(format!("(mu{}^z)^2 = 1", i + 1), max_abs_diff(&(&zs[i] * &zs[i]), &id));
            record(format!("(mu{}^x)^2 = 1", i + 1), max_abs_diff(&(&xs[i] * &xs[i]), &id));
        }
        for i in 0..n {
            for j in 0..n {
                let anti = &zs[i] * &xs[j] + &xs[j] * &zs[i];
                let comm = &zs[i] * &xs[j] - &xs[j] * &zs[i];
                if i == j {
                    record(format!("{{mu{0}^z, mu{0}^x}} = 0", i + 1), crate::hilbert::max_abs(&anti));
                } else {
                    record(format!("[mu{}^z, mu{}^x] = 0", i + 1, j + 1), crate::hilbert::max_abs(&comm));
                }
                if i < j {
                    let zz = &zs[i] * &zs[j] - &zs[j] * &zs[i];
                    let xx = &xs[i] * &xs[j] - &xs[j] * &xs[i];
                    record(format!("[mu{}^z, mu{}^z] = 0", i + 1, j + 1), crate::hilbert::max_abs(&zz));
                    record(format!("[mu{}^x, mu{}^x] = 0", i + 1, j + 1), crate::hilbert::max_abs(&xx));
                }
            }
        }
        checks
    }
}

/// Image of a μ-alphabet word under the map on `word.n_sites()` sites.
pub fn dual_map_string(word: &PauliString) -> Result<SignedPauli> {
    DualityMap::new(word.n_sites())?.map_string(word)
}

/// Ascending eigenvalues with multiplicity.
pub fn spectrum<T: Real>(h: &CMat<T>) -> Result<Vec<T>> {
    Ok(eig_hermitian(h)?.values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMatch<T> {
    pub matches: bool,
    pub max_deviation: T,
}

/// Elementwise comparison of the sorted spectra.
pub fn spectra_match<T: Real>(s1: &[T], s2: &[T], tol: T) -> Result<SpectralMatch<T>> {
    if s1.len() != s2.len() {
        return Err(Error::DimensionMismatch { expected: s1.len(), found: s2.len() });
    }
    let sorted = |s: &[T]| {
        let mut v = s.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        v
    };
    let max_deviation = sorted(s1)
        .into_iter()
        .zip(sorted(s2))
        .fold(T::zero(), |acc, (a, b)| acc.max((a - b).abs()));
    Ok(SpectralMatch { matches: max_deviation <= tol, max_deviation })
}

/// Outcome of [`conjugation_witness`].
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T: Real> {
    /// Unitary `W` with `W H₁ W† = H₂`.
    Found(CMat<T>),
    NoWitness { max_deviation: T },
}

impl<T: Real> Witness<T> {
    pub fn unitary(&self) -> Option<&CMat<T>> {
        match self {
            Witness::Found(w) => Some(w),
            Witness::NoWitness { .. } => None,
        }
    }
}

/// Spectral tolerance for witness synthesis and the degeneracy-cluster gap.
pub const WITNESS_SPECTRAL_TOL: f64 = 1e-9;

/// Synthesizes `W = V₂ R V₁†` conjugating `h1` onto `h2` when their spectra agree.
///
/// Eigenvectors are paired in ascending eigenvalue order. Inside each degenerate
/// cluster the free rotation `R` is fixed by the polar factor of the cross-Gram
/// matrix `V₁†V₂`, which makes `W` as close to the identity as the cluster allows.
pub fn conjugation_witness<T: Real>(h1: &CMat<T>, h2: &CMat<T>) -> Result<Witness<T>> {
    let n = ensure_square(h1)?;
    let m = ensure_square(h2)?;
    if n != m {
        return Err(Error::DimensionMismatch { expected: n, found: m });
    }
    let tol = lit::<T>(WITNESS_SPECTRAL_TOL).max(T::structural_tol());
    let e1 = eig_hermitian(h1)?;
    let e2 = eig_hermitian(h2)?;
    let check = spectra_match(&e1.values, &e2.values, tol)?;
    if !check.matches {
        return Ok(Witness::NoWitness { max_deviation: check.max_deviation });
    }

    let mut w = CMat::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (e1.values[end] - e1.values[end - 1] < tol || e2.values[end] - e2.values[end - 1] < tol) {
            end += 1;
        }
        let v1 = e1.vectors.columns(start, end - start).into_owned();
        let v2 = e2.vectors.columns(start, end - start).into_owned();
        let gram = v1.adjoint() * &v2;
        let polar = svd(&gram);
        let rotation = &polar.v * polar.u.adjoint();
        w += &v2 * rotation * v1.adjoint();
        start = end;
    }
    Ok(Witness::Found(w))
}

/// Relation of the transformed μ model to one σ-frame variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisComparison {
    pub axis: FieldAxis,
    /// `‖map(H_μ) − H_σ‖_max`.
    pub matrix_max_deviation: f64,
    pub matrices_equal: bool,
    pub spectral_max_deviation: f64,
    pub spectra_match: bool,
    pub sigma_locality: usize,
    /// `Some(false)` when a witness exists and the two frames are inequivalent.
    pub frames_equivalent: Option<bool>,
    /// Smallest operator Schmidt rank of the witness over all bipartitions.
    pub witness_min_schmidt_rank: Option<usize>,
    /// Same spectra, both k-local with equal k, inequivalent frames.
    pub dual: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub coupling: f64,
    pub field: f64,
    pub tol: f64,
    pub algebra_checks: Vec<AlgebraCheck>,
    pub algebra_all_pass: bool,
    pub mu_terms_verbatim: usize,
    pub mu_terms_normalized: usize,
    /// Normalized μ model rewritten in the σ alphabet, as `(coefficient, string)`.
    pub mapped_terms: Vec<(f64, String)>,
    pub mu_locality: usize,
    pub mapped_locality: usize,
    pub comparisons: Vec<AxisComparison>,
    /// Axes whose σ model shares the μ model's spectrum.
    pub matching_axes: Vec<FieldAxis>,
}

impl DualityReport {
    pub fn comparison(&self, axis: FieldAxis) -> &AxisComparison {
        self.comparisons.iter().find(|c| c.axis == axis).expect("both axes are compared")
    }
}

/// Checks the map algebra, transforms the μ model, and compares it with both σ variants.
pub fn verify_duality<T: Real>(coupling: T, field: T, tol: T) -> Result<DualityReport> {
    let threshold = lit::<T>(crate::pauli::COEFF_THRESHOLD);
    let map = DualityMap::default();
    let algebra_checks = map.algebra_checks::<T>(tol);
    let mu = mu_model(coupling, field);
    let mu_norm = mu.normalized(threshold);
    let mapped = map.map_spec(&mu_norm)?.normalized(threshold);
    let h_mu = build_hamiltonian(&mu_norm)?;
    let h_mapped = build_hamiltonian(&mapped)?;
    let mu_spectrum = spectrum(&h_mu)?;

    let mut comparisons = Vec::new();
    for axis in [FieldAxis::Z, FieldAxis::X] {
        let sigma = sigma_model(coupling, field, MU_SITES, axis)?;
        let h_sigma = build_hamiltonian(&sigma)?;
        let dev = max_abs_diff(&h_mapped, &h_sigma);
        let spec_match = spectra_match(&mu_spectrum, &spectrum(&h_sigma)?, tol)?;
        let sigma_locality = sigma.locality(threshold);

        let (frames_equivalent, witness_min_schmidt_rank) = match conjugation_witness(&h_mu, &h_sigma)? {
            Witness::Found(w) if spec_match.matches => {
                let dims = vec![2; MU_SITES];
                let t1 = Tps::identity(dims.clone())?;
                let t2 = Tps::new(dims.clone(), w.clone())?;
                let eq = tps_equivalent(&t1, &t2, lit(crate::tps::RANK_TOL))?;
                let min_rank = bipartition_ranks(&w, &dims, lit(crate::tps::RANK_TOL))?
                    .into_iter()
                    .map(|(_, r)| r)
                    .min();
                (Some(eq.equivalent), min_rank)
            }
            _ => (None, None),
        };
        let dual = spec_match.matches
            && sigma_locality == mu_norm.locality(threshold)
            && frames_equivalent == Some(false);
        comparisons.push(AxisComparison {
            axis,
            matrix_max_deviation: to_f64(dev),
            matrices_equal: dev <= tol,
            spectral_max_deviation: to_f64(spec_match.max_deviation),
            spectra_match: spec_match.matches,
            sigma_locality,
            frames_equivalent,
            witness_min_schmidt_rank,
            dual,
        });
    }

    Ok(DualityReport {
        coupling: to_f64(coupling),
        field: to_f64(field),
        tol: to_f64(tol),
        algebra_all_pass: algebra_checks.iter().all(|c| c.passed),
        algebra_checks,
        mu_terms_verbatim: mu.terms().len(),
        mu_terms_normalized: mu_norm.terms().len(),
        mapped_terms: mapped.terms().iter().map(|(c, p)| (to_f64(*c), p.to_string())).collect(),
        mu_locality: mu_norm.locality(threshold),
        mapped_locality: mapped.locality(threshold),
        matching_axes: comparisons.iter().filter(|c| c.spectra_match).map(|c| c.axis).collect(),
        comparisons,
    })
}

/// Spectral comparison of the μ model against both σ variants at one `(J, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub coupling: f64,
    pub field: f64,
    pub z_spectral_deviation: f64,
    pub z_match: bool,
    pub x_spectral_deviation: f64,
    pub x_match: bool,
}

pub fn scan_point<T: Real>(coupling: T, field: T, tol: T) -> Result<ScanPoint> {
    let mu = spectrum(&build_hamiltonian(&mu_model(coupling, field).normalized(lit(crate::pauli::COEFF_THRESHOLD)))?)?;
    let z = spectra_match(&mu, &spectrum(&build_hamiltonian(&sigma_model(coupling, field, MU_SITES, FieldAxis::Z)?)?)?, tol)?;
    let x = spectra_match(&mu, &spectrum(&build_hamiltonian(&sigma_model(coupling, field, MU_SITES, FieldAxis::X)?)?)?, tol)?;
    Ok(ScanPoint {
        coupling: to_f64(coupling),
        field: to_f64(field),
        z_spectral_deviation: to_f64(z.max_deviation),
        z_match: z.matches,
        x_spectral_deviation: to_f64(x.max_deviation),
        x_match: x.matches,
    })
}

/// `n` evenly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}
