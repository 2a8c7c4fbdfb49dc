//! Pauli strings, real-coefficient Hamiltonians over them, decomposition of
//! Hermitian operators into the Pauli basis, and k-locality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ensure_hermitian, CMat};
use crate::scalar::{lit, Real};

/// Largest chain realized as a dense matrix.
pub const MAX_SITES: usize = 12;
/// Largest chain for which the full `4^n` decomposition is attempted.
pub const MAX_FULL_DECOMPOSITION_SITES: usize = 6;
/// Default coefficient truncation threshold.
pub const COEFF_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidLetter(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Symplectic `(x, z)` bits: `X = (1,0)`, `Z = (0,1)`, `Y = (1,1)`.
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Single-site product `self · other = phase · result`.
    pub fn mul(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }

    pub fn matrix<T: Real>(self) -> CMat<T> {
        PauliString::new(vec![self]).matrix()
    }
}

/// A power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    /// `±1` when the phase is real.
    pub fn real_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex<T: Real>(self) -> Complex<T> {
        let (o, z) = (T::one(), T::zero());
        match self.0 {
            0 => Complex::new(o, z),
            1 => Complex::new(z, o),
            2 => Complex::new(-o, z),
            _ => Complex::new(z, -o),
        }
    }
}

/// Word over `{I, X, Y, Z}`; letter `k` acts on site `k` (site 0 is most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n_sites: usize) -> Self {
        Self { letters: vec![Pauli::I; n_sites] }
    }

    /// `p` on `site`, identity elsewhere.
    pub fn single(n_sites: usize, site: usize, p: Pauli) -> Self {
        Self::from_sites(n_sites, &[(site, p)])
    }

    /// Places the given letters; later entries overwrite earlier ones on the same site.
    pub fn from_sites(n_sites: usize, sites: &[(usize, Pauli)]) -> Self {
        let mut letters = vec![Pauli::I; n_sites];
        for &(s, p) in sites {
            letters[s] = p;
        }
        Self { letters }
    }

    /// Index `0..4^n` in base 4, first site most significant, digits ordered `I, X, Y, Z`.
    pub fn from_index(n_sites: usize, mut index: usize) -> Self {
        let mut letters = vec![Pauli::I; n_sites];
        for k in (0..n_sites).rev() {
            letters[k] = Pauli::ALL[index % 4];
            index /= 4;
        }
        Self { letters }
    }

    pub fn n_sites(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Sites with a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.letters.iter().enumerate().filter(|(_, &p)| p != Pauli::I).map(|(k, _)| k).collect()
    }

    /// `self · other = phase · result`.
    pub fn mul(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::SiteMismatch { expected: self.n_sites(), found: other.n_sites() });
        }
        let mut phase = Phase::ONE;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                phase = phase.mul(ph);
                p
            })
            .collect();
        Ok((phase, PauliString { letters }))
    }

    /// Pauli strings commute iff they anticommute on an even number of sites.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count()
            % 2
            == 0
    }

    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let n = self.n_sites();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (k, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - k);
            let (bx, bz) = p.bits();
            if bx {
                x |= bit;
            }
            if bz {
                z |= bit;
            }
            if p == Pauli::Y {
                ny += 1;
            }
        }
        (x, z, ny)
    }

    /// Dense realization `σ₀ ⊗ σ₁ ⊗ …`; sites beyond [`MAX_SITES`] are not supported.
    pub fn matrix<T: Real>(&self) -> CMat<T> {
        assert!(self.n_sites() <= MAX_SITES, "at most {MAX_SITES} sites");
        let dim = 1usize << self.n_sites();
        let (x, z, ny) = self.masks();
        let y_phase = Phase((ny % 4) as u8).to_complex::<T>();
        let mut m = CMat::zeros(dim, dim);
        // column c maps to row c ^ x with phase i^{#Y} (−1)^{|c ∧ z|}
        for col in 0..dim {
            let sign = if (col & z).count_ones() % 2 == 0 { T::one() } else { -T::one() };
            m[(col ^ x, col)] = y_phase * sign;
        }
        m
    }
}

/// Realizes a Pauli string as a dense matrix.
pub fn pauli_matrix<T: Real>(ps: &PauliString) -> Result<CMat<T>> {
    if ps.n_sites() == 0 || ps.n_sites() > MAX_SITES {
        return Err(Error::InvalidDims(format!("Pauli strings need 1..={MAX_SITES} sites, got {}", ps.n_sites())));
    }
    Ok(ps.matrix())
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|p| write!(f, "{}", p.to_char()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Empty("Pauli string"));
        }
        Ok(Self { letters: s.chars().map(Pauli::from_char).collect::<Result<_>>()? })
    }
}

impl TryFrom<String> for PauliString {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}

/// Real linear combination of Pauli strings on a fixed number of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec<T: Real> {
    n_sites: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(n_sites: usize) -> Self {
        Self { n_sites, terms: Vec::new() }
    }

    pub fn from_terms(n_sites: usize, terms: impl IntoIterator<Item = (T, PauliString)>) -> Result<Self> {
        let mut spec = Self::new(n_sites);
        for (c, p) in terms {
            spec.push(c, p)?;
        }
        Ok(spec)
    }

    pub fn push(&mut self, coefficient: T, term: PauliString) -> Result<()> {
        if term.n_sites() != self.n_sites {
            return Err(Error::SiteMismatch { expected: self.n_sites, found: term.n_sites() });
        }
        self.terms.push((coefficient, term));
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    /// Merges repeated strings (first occurrence fixes the order) and drops
    /// coefficients with magnitude at or below `threshold`.
    pub fn normalized(&self, threshold: T) -> Self {
        let mut order: Vec<PauliString> = Vec::new();
        let mut sums: BTreeMap<&PauliString, T> = BTreeMap::new();
        for (c, p) in &self.terms {
            let slot = sums.entry(p).or_insert_with(|| {
                order.push(p.clone());
                T::zero()
            });
            *slot += *c;
        }
        let terms = order
            .into_iter()
            .filter_map(|p| {
                let c = sums[&p];
                (c.abs() > threshold).then_some((c, p))
            })
            .collect();
        Self { n_sites: self.n_sites, terms }
    }

    /// Max weight over terms that survive normalization at `threshold`.
    pub fn locality(&self, threshold: T) -> usize {
        self.normalized(threshold).terms.iter().map(|(_, p)| p.weight()).max().unwrap_or(0)
    }

    /// Relabels sites: the letter on site `k` moves to site `perm[k]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_sites {
            return Err(Error::SiteMismatch { expected: self.n_sites, found: perm.len() });
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, p)| {
                let sites: Vec<(usize, Pauli)> = p.letters().iter().enumerate().map(|(k, &l)| (perm[k], l)).collect();
                (*c, PauliString::from_sites(self.n_sites, &sites))
            })
            .collect();
        Ok(Self { n_sites: self.n_sites, terms })
    }
}

/// `Σ cₖ Pₖ` as a dense matrix.
pub fn build_hamiltonian<T: Real>(spec: &HamiltonianSpec<T>) -> Result<CMat<T>> {
    let n = spec.n_sites();
    if n == 0 || n > MAX_SITES {
        return Err(Error::InvalidDims(format!("Hamiltonians need 1..={MAX_SITES} sites, got {n}")));
    }
    let dim = 1usize << n;
    let mut h = CMat::zeros(dim, dim);
    for (coeff, p) in spec.terms() {
        if p.n_sites() != n {
            return Err(Error::SiteMismatch { expected: n, found: p.n_sites() });
        }
        let (x, z, ny) = p.masks();
        let phase = Phase((ny % 4) as u8).to_complex::<T>() * *coeff;
        for col in 0..dim {
            let v = if (col & z).count_ones() % 2 == 0 { phase } else { -phase };
            h[(col ^ x, col)] += v;
        }
    }
    Ok(h)
}

/// Pauli-basis coefficients `a_P = tr(M·P) / 2ⁿ` of a Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition<T: Real> {
    pub n_sites: usize,
    pub coefficients: BTreeMap<PauliString, T>,
}

impl<T: Real> PauliDecomposition<T> {
    pub fn to_spec(&self) -> HamiltonianSpec<T> {
        HamiltonianSpec {
            n_sites: self.n_sites,
            terms: self.coefficients.iter().map(|(p, c)| (*c, p.clone())).collect(),
        }
    }

    pub fn get(&self, p: &PauliString) -> T {
        self.coefficients.get(p).copied().unwrap_or_else(T::zero)
    }

    /// Fraction of the traceless weight `Σ a_P²` carried by strings of weight above `k`.
    pub fn weight_fraction_above(&self, k: usize) -> T {
        let (mut above, mut total) = (T::zero(), T::zero());
        for (p, c) in &self.coefficients {
            let w = p.weight();
            if w == 0 {
                continue;
            }
            total += *c * *c;
            if w > k {
                above += *c * *c;
            }
        }
        if total > T::zero() {
            above / total
        } else {
            T::zero()
        }
    }
}

fn sites_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn trace_with<T: Real>(m: &CMat<T>, p: &PauliString) -> T {
    let (x, z, ny) = p.masks();
    let phase = Phase((ny % 4) as u8).to_complex::<T>();
    let mut acc = Complex::new(T::zero(), T::zero());
    // tr(M P) = Σ_c M[c, c^x] · P[c^x, c]
    for col in 0..m.nrows() {
        let v = m[(col, col ^ x)];
        if (col & z).count_ones() % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    (acc * phase).re
}

fn check_decomposable<T: Real>(m: &CMat<T>, n_sites: usize) -> Result<()> {
    let dim = ensure_hermitian(m)?;
    let n = sites_for_dim(dim)?;
    if n != n_sites {
        return Err(Error::SiteMismatch { expected: n_sites, found: n });
    }
    Ok(())
}

/// Full decomposition over all `4ⁿ` strings (`n ≤ 6`).
pub fn pauli_decompose<T: Real>(m: &CMat<T>, n_sites: usize, threshold: T) -> Result<PauliDecomposition<T>> {
    check_decomposable(m, n_sites)?;
    if n_sites > MAX_FULL_DECOMPOSITION_SITES {
        return Err(Error::TooManySites { n: n_sites, max: MAX_FULL_DECOMPOSITION_SITES });
    }
    let strings = (0..1usize << (2 * n_sites)).map(|q| PauliString::from_index(n_sites, q));
    Ok(decompose_over(m, n_sites, strings, threshold))
}

/// Decomposition restricted to the strings in `ansatz`; intended for chains
/// too long for [`pauli_decompose`]. Strings outside the ansatz are assumed absent.
pub fn pauli_decompose_ansatz<T: Real>(
    m: &CMat<T>,
    n_sites: usize,
    ansatz: &[PauliString],
    threshold: T,
) -> Result<PauliDecomposition<T>> {
    check_decomposable(m, n_sites)?;
    if let Some(bad) = ansatz.iter().find(|p| p.n_sites() != n_sites) {
        return Err(Error::SiteMismatch { expected: n_sites, found: bad.n_sites() });
    }
    Ok(decompose_over(m, n_sites, ansatz.iter().cloned(), threshold))
}

fn decompose_over<T: Real>(
    m: &CMat<T>,
    n_sites: usize,
    strings: impl Iterator<Item = PauliString>,
    threshold: T,
) -> PauliDecomposition<T> {
    let norm = lit::<T>((1u64 << n_sites) as f64);
    let coefficients = strings
        .filter_map(|p| {
            let c = trace_with(m, &p) / norm;
            (c.abs() > threshold).then_some((p, c))
        })
        .collect();
    PauliDecomposition { n_sites, coefficients }
}

/// Maximum Pauli weight and the site-interaction graph of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Locality {
    pub k: usize,
    /// Pairs `(i, j)` with `i < j` (0-based sites) sharing a term of weight ≥ 2.
    pub edges: BTreeSet<(usize, usize)>,
}

pub fn locality_weight<T: Real>(decomposition: &PauliDecomposition<T>) -> Locality {
    let mut k = 0;
    let mut edges = BTreeSet::new();
    for p in decomposition.coefficients.keys() {
        let support = p.support();
        k = k.max(support.len());
        for (a, &i) in support.iter().enumerate() {
            for &j in &support[a + 1..] {
                edges.insert((i, j));
            }
        }
    }
    Locality { k, edges }
}

/// Parses the term-list format: one `coefficient LETTERS` pair per line, `#` starts a comment.
pub fn parse_term_list(text: &str) -> Result<HamiltonianSpec<f64>> {
    let mut spec: Option<HamiltonianSpec<f64>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [coeff, word] = fields.as_slice() else {
            return Err(Error::Parse { line, message: format!("expected `coefficient LETTERS`, found {body:?}") });
        };
        let c: f64 = coeff.parse().map_err(|_| Error::Parse { line, message: format!("invalid coefficient {coeff:?}") })?;
        let p: PauliString = word.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
        let s = spec.get_or_insert_with(|| HamiltonianSpec::new(p.n_sites()));
        s.push(c, p).map_err(|e| Error::Parse { line, message: e.to_string() })?;
    }
    spec.ok_or(Error::Empty("term list"))
}

pub fn format_term_list(spec: &HamiltonianSpec<f64>) -> String {
    spec.terms().iter().map(|(c, p)| format!("{c:?} {p}\n")).collect()
}
