//! Scenario files: a strict TOML schema describing a system, an initial state,
//! a cut, named observables and run parameters.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use qtps::duality::{mu_model, sigma_model, FieldAxis, MU_SITES};
use qtps::dynamics::SignConvention;
use qtps::factorize::SelectionPolicy;
use qtps::hilbert::io::{read_matrix, read_state};
use qtps::hilbert::{ensure_square, Bipartition, StateVector};
use qtps::pauli::{build_hamiltonian, parse_term_list};
use qtps::random::{random_state, rng};
use qtps::{Matrix, State};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub format: u32,
    pub name: String,
    pub system: System,
    pub state: Option<StateSource>,
    /// Factor dimensions `[d, D]` of the apparatus / rest cut.
    pub cut: Option<[usize; 2]>,
    /// Named observables on the apparatus factor, as term lists.
    #[serde(default)]
    pub observables: BTreeMap<String, String>,
    #[serde(default)]
    pub run: RunParams,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct System {
    /// Inline term list, one `coefficient LETTERS` pair per line.
    pub terms: Option<String>,
    /// Matrix file in the text format.
    pub matrix: Option<PathBuf>,
    pub model: Option<ModelPreset>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum ModelKind {
    Sigma,
    Mu,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelPreset {
    pub kind: ModelKind,
    pub coupling: f64,
    pub field: f64,
    #[serde(default = "default_sites")]
    pub sites: usize,
    #[serde(default = "default_axis")]
    pub axis: FieldAxis,
}

fn default_sites() -> usize {
    MU_SITES
}

fn default_axis() -> FieldAxis {
    FieldAxis::X
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSource {
    /// `all-zeros`, `bell`, `plus` or `random` (needs a seed).
    pub preset: Option<String>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    #[default]
    MaxOverlap,
    BornRandom,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TpsMethod {
    #[default]
    Construct,
    Search,
    Identity,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunParams {
    pub tau: Option<TauRange>,
    pub tau_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub policy: Policy,
    #[serde(default)]
    pub convention: SignConvention,
    #[serde(default)]
    pub tps: TpsMethod,
    /// Key into `observables`; defaults to the only entry when there is one.
    pub observable: Option<String>,
}

fn default_budget() -> usize {
    5000
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            tau: None,
            tau_grid: None,
            lambda: 0.0,
            budget: default_budget(),
            seed: None,
            tol: None,
            policy: Policy::default(),
            convention: SignConvention::default(),
            tps: TpsMethod::default(),
            observable: None,
        }
    }
}

/// A scenario with every reference resolved and every dimension checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: Scenario,
    pub hamiltonian: Matrix,
    pub state: Option<State>,
    pub cut: Option<Bipartition>,
    pub observables: BTreeMap<String, Matrix>,
    pub seed: Option<u64>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let sc: Scenario = toml::from_str(text).map_err(|e| input(format!("scenario: {e}")))?;
        if sc.format != FORMAT_VERSION {
            return Err(input(format!("scenario: field `format`: unsupported version {}, expected {FORMAT_VERSION}", sc.format)));
        }
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(m) => input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Loads referenced files relative to `base` and validates dimensions.
    ///
    /// `seed_override` takes precedence over the scenario's own seed.
    pub fn resolve(self, base: &Path, seed_override: Option<u64>) -> Result<Resolved, CliError> {
        let seed = seed_override.or(self.run.seed);
        let hamiltonian = self.system_matrix(base)?;
        let dim = hamiltonian.nrows();
        let state = match &self.state {
            None => None,
            Some(src) => Some(self.load_state(src, base, dim, seed)?),
        };
        let cut = match self.cut {
            None => None,
            Some([d, dd]) => {
                let c = Bipartition::new(d, dd).map_err(|e| input(format!("field `cut`: {e}")))?;
                if c.total() != dim {
                    return Err(input(format!("field `cut`: {d}x{dd} does not match system dimension {dim}")));
                }
                Some(c)
            }
        };
        let mut observables = BTreeMap::new();
        for (name, text) in &self.observables {
            let spec = parse_term_list(text).map_err(|e| input(format!("field `observables.{name}`: {e}")))?;
            let m = build_hamiltonian(&spec).map_err(|e| input(format!("field `observables.{name}`: {e}")))?;
            if let Some(c) = cut {
                if m.nrows() != c.left {
                    return Err(input(format!(
                        "field `observables.{name}`: dimension {} does not match apparatus factor {}",
                        m.nrows(),
                        c.left
                    )));
                }
            }
            observables.insert(name.clone(), m);
        }
        if let Some(key) = &self.run.observable {
            if !observables.contains_key(key) {
                return Err(input(format!("field `run.observable`: no observable named `{key}`")));
            }
        }
        if self.run.policy == Policy::BornRandom && seed.is_none() {
            return Err(input("field `run.seed`: the born-random policy needs a seed"));
        }
        if self.run.budget == 0 {
            return Err(input("field `run.budget`: must be at least 1"));
        }
        if let Some(t) = &self.run.tau {
            if t.points == 0 || t.stop < t.start {
                return Err(input("field `run.tau`: need points >= 1 and stop >= start"));
            }
        }
        if let Some(g) = &self.run.tau_grid {
            if g.windows(2).any(|w| w[1] < w[0]) {
                return Err(input("field `run.tau_grid`: must be ascending"));
            }
        }
        Ok(Resolved { scenario: self, hamiltonian, state, cut, observables, seed })
    }

    fn system_matrix(&self, base: &Path) -> Result<Matrix, CliError> {
        let s = &self.system;
        let given = [s.terms.is_some(), s.matrix.is_some(), s.model.is_some()].iter().filter(|&&b| b).count();
        if given != 1 {
            return Err(input("field `system`: give exactly one of `terms`, `matrix`, `model`"));
        }
        let field = |e: qtps::Error| input(format!("field `system`: {e}"));
        if let Some(t) = &s.terms {
            return build_hamiltonian(&parse_term_list(t).map_err(field)?).map_err(field);
        }
        if let Some(p) = &s.matrix {
            let m = read_matrix(base.join(p)).map_err(|e| input(format!("field `system.matrix`: {}: {e}", p.display())))?;
            ensure_square(&m).map_err(field)?;
            return Ok(m);
        }
        let m = s.model.as_ref().expect("one source is present");
        let spec = match m.kind {
            ModelKind::Sigma => sigma_model(m.coupling, m.field, m.sites, m.axis).map_err(field)?,
            ModelKind::Mu => {
                if m.sites != MU_SITES {
                    return Err(input(format!("field `system.model.sites`: the mu model has {MU_SITES} sites")));
                }
                mu_model(m.coupling, m.field).normalized(qtps::pauli::COEFF_THRESHOLD)
            }
        };
        build_hamiltonian(&spec).map_err(field)
    }

    fn load_state(&self, src: &StateSource, base: &Path, dim: usize, seed: Option<u64>) -> Result<State, CliError> {
        let psi = match (&src.preset, &src.file) {
            (Some(p), None) => preset_state(p, dim, seed)?,
            (None, Some(f)) => read_state(base.join(f)).map_err(|e| input(format!("field `state.file`: {}: {e}", f.display())))?,
            _ => return Err(input("field `state`: give exactly one of `preset`, `file`")),
        };
        if psi.dim() != dim {
            return Err(input(format!("field `state`: dimension {} does not match system dimension {dim}", psi.dim())));
        }
        Ok(psi)
    }
}

pub fn preset_state(name: &str, dim: usize, seed: Option<u64>) -> Result<State, CliError> {
    let err = |e: qtps::Error| input(format!("field `state.preset`: {e}"));
    match name {
        "all-zeros" => StateVector::basis(dim, 0).map_err(err),
        "bell" => {
            if dim != 4 {
                return Err(input(format!("field `state.preset`: bell needs dimension 4, system has {dim}")));
            }
            Ok(StateVector::bell())
        }
        "plus" => StateVector::normalized(qtps::Vector::from_element(dim, qtps::scalar::c(1.0, 0.0))).map_err(err),
        "random" => {
            let seed = seed.ok_or_else(|| input("field `run.seed`: the random preset needs a seed"))?;
            Ok(random_state(dim, &mut rng(seed)))
        }
        other => Err(input(format!("field `state.preset`: unknown preset `{other}`"))),
    }
}

impl Resolved {
    pub fn tau_grid(&self) -> Result<Vec<f64>, CliError> {
        match (&self.scenario.run.tau, &self.scenario.run.tau_grid) {
            (Some(t), None) => Ok(qtps::duality::linspace(t.start, t.stop, t.points)),
            (None, Some(g)) => Ok(g.clone()),
            (None, None) => Err(input("field `run.tau`: a tau range or `tau_grid` is required")),
            _ => Err(input("field `run`: give only one of `tau`, `tau_grid`")),
        }
    }

    pub fn require_state(&self) -> Result<&State, CliError> {
        self.state.as_ref().ok_or_else(|| input("field `state`: required for this command"))
    }

    pub fn require_cut(&self) -> Result<Bipartition, CliError> {
        self.cut.ok_or_else(|| input("field `cut`: required for this command"))
    }

    pub fn observable(&self) -> Result<(&str, &Matrix), CliError> {
        match &self.scenario.run.observable {
            Some(k) => Ok((k.as_str(), &self.observables[k])),
            None if self.observables.len() == 1 => {
                let (k, v) = self.observables.iter().next().expect("one entry");
                Ok((k.as_str(), v))
            }
            None => Err(input("field `run.observable`: required when the scenario has several or no observables")),
        }
    }

    pub fn policy(&self) -> SelectionPolicy {
        match self.scenario.run.policy {
            Policy::MaxOverlap => SelectionPolicy::MaxOverlap,
            Policy::BornRandom => SelectionPolicy::BornRandom { seed: self.seed.expect("checked during resolve") },
        }
    }
}
