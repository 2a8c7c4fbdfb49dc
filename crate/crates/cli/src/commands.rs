//! One function per subcommand; each returns a [`Report`] without touching stdout.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args};
use rayon::prelude::*;
use serde_json::{json, Value};

use qtps::duality::{
    conjugation_witness, linspace, mu_model, scan_point, sigma_model, verify_duality, FieldAxis, Witness, MU_SITES,
};
use qtps::dynamics::{
    convex_decomposition, gie_bipartite_state, gie_tripartite_state, phase_defect, single_outcome_measure,
    tps_entropy_trajectory, EvolutionSpec, GieParams, Mediator, QuantumState, FACTORIZATION_TOL,
};
use qtps::factorize::{
    construct_product_tps, generator_basis, negativity, schmidt as schmidt_decompose, search_product_tps, SearchOptions,
};
use qtps::hilbert::io::{format_matrix, read_matrix, read_state};
use qtps::hilbert::{eig_hermitian, ensure_square, hermitian_deviation, Bipartition};
use qtps::pauli::{build_hamiltonian, locality_weight, parse_term_list, pauli_decompose, COEFF_THRESHOLD};
use qtps::tps::{bipartition_ranks, conjugate_hamiltonian, tps_equivalent, Tps, RANK_TOL};
use qtps::{Error, Matrix, State};

use crate::scenario::{Resolved, Scenario, TpsMethod};
use crate::{CliError, Global, Report, Table, Verdict};

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn read_terms(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let spec = parse_term_list(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok(build_hamiltonian(&spec)?)
}

fn read_matrix_file(path: &Path) -> Result<Matrix, CliError> {
    read_matrix(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_state_file(path: &Path) -> Result<State, CliError> {
    read_state(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Resolved, CliError> {
    let base = path.parent().unwrap_or(Path::new("."));
    Scenario::load(path)?.resolve(base, seed)
}

fn cut_from(v: &[usize]) -> Result<Bipartition, CliError> {
    match v {
        [d, dd] => Bipartition::new(*d, *dd).map_err(|e| input(format!("--cut: {e}"))),
        _ => Err(input("--cut: expected two dimensions d,D")),
    }
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["scenario", "ham", "matrix"])))]
pub struct HamSource {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Term-list file, one `coefficient LETTERS` pair per line.
    #[arg(long)]
    pub ham: Option<PathBuf>,
    /// Matrix file in the text format.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

impl HamSource {
    fn load(&self, seed: Option<u64>) -> Result<(String, Matrix), CliError> {
        if let Some(p) = &self.scenario {
            return Ok((p.display().to_string(), load_scenario(p, seed)?.hamiltonian));
        }
        if let Some(p) = &self.ham {
            return Ok((p.display().to_string(), read_terms(p)?));
        }
        let p = self.matrix.as_ref().expect("clap enforces one source");
        let m = read_matrix_file(p)?;
        ensure_square(&m)?;
        Ok((p.display().to_string(), m))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: HamSource,
}

/// CSV columns: `index,eigenvalue`.
pub fn spectrum(a: &SpectrumArgs, g: &Global) -> Result<Report, CliError> {
    let (source, h) = a.source.load(g.seed)?;
    let values = eig_hermitian(&h)?.values;
    let mut table = Table::new(vec!["index", "eigenvalue"]);
    for (i, v) in values.iter().enumerate() {
        table.push(vec![i.to_string(), num(*v)]);
    }
    Ok(Report {
        command: "spectrum",
        verdict: Verdict::Pass,
        json: json!({
            "command": "spectrum",
            "source": source,
            "dim": h.nrows(),
            "hermitian_deviation": hermitian_deviation(&h),
            "eigenvalues": values,
        }),
        table: Some(table),
        files: vec![],
    })
}

#[derive(Debug, Clone, Args)]
pub struct DualVerifyArgs {
    /// Nearest-neighbour coupling.
    #[arg(long = "J", allow_hyphen_values = true)]
    pub j: f64,
    /// Field strength.
    #[arg(long = "h", allow_hyphen_values = true)]
    pub h: f64,
    /// Field axis whose spectral match decides the verdict.
    #[arg(long, value_parser = parse_axis, default_value = "x")]
    pub axis: FieldAxis,
}

fn parse_axis(s: &str) -> Result<FieldAxis, String> {
    match s {
        "x" => Ok(FieldAxis::X),
        "z" => Ok(FieldAxis::Z),
        other => Err(format!("unknown axis `{other}`, expected x or z")),
    }
}

pub fn dual_verify(a: &DualVerifyArgs, g: &Global) -> Result<Report, CliError> {
    let tol = g.tol.unwrap_or(1e-10);
    let report = verify_duality(a.j, a.h, tol)?;
    let cmp = report.comparison(a.axis);
    let ok = report.algebra_all_pass && cmp.spectra_match;
    let mut table = Table::new(vec!["relation", "deviation", "passed"]);
    for c in &report.algebra_checks {
        table.push(vec![c.relation.clone(), num(c.deviation), c.passed.to_string()]);
    }
    Ok(Report {
        command: "dual-verify",
        verdict: Verdict::from_bool(ok),
        json: json!({
            "command": "dual-verify",
            "inputs": { "J": a.j, "h": a.h, "tol": tol, "axis": a.axis },
            "verdict": ok,
            "report": report,
        }),
        table: Some(table),
        files: vec![],
    })
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("maps").required(true).args(["t1", "dual"])))]
pub struct TpsEquivArgs {
    #[arg(long, requires = "t2")]
    pub t1: Option<PathBuf>,
    #[arg(long, requires = "t1")]
    pub t2: Option<PathBuf>,
    /// Factor dimensions of the first structure.
    #[arg(long, value_delimiter = ',', required_unless_present = "dual")]
    pub dims: Vec<usize>,
    /// Factor dimensions of the second structure; defaults to `--dims`.
    #[arg(long, value_delimiter = ',')]
    pub dims2: Vec<usize>,
    /// Compare the identity frame with the conjugation witness of the dual model at `J,h`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["t1", "t2", "dims", "dims2"])]
    pub dual: Vec<f64>,
}

pub fn tps_equiv(a: &TpsEquivArgs, g: &Global) -> Result<Report, CliError> {
    let tol = g.tol.unwrap_or(RANK_TOL);
    if !a.dual.is_empty() && a.dual.len() != 2 {
        return Err(input("--dual: expected J,h"));
    }
    let (t1, t2, inputs) = if a.dual.len() == 2 {
        let (j, h) = (a.dual[0], a.dual[1]);
        let h_mu = build_hamiltonian(&mu_model(j, h).normalized(COEFF_THRESHOLD))?;
        let h_sigma = build_hamiltonian(&sigma_model(j, h, MU_SITES, FieldAxis::X)?)?;
        let w = match conjugation_witness(&h_mu, &h_sigma)? {
            Witness::Found(w) => w,
            Witness::NoWitness { max_deviation } => {
                return Err(input(format!("--dual: spectra differ by {max_deviation:e}, no witness exists")))
            }
        };
        let dims = vec![2; MU_SITES];
        (Tps::identity(dims.clone())?, Tps::new(dims, w)?, json!({ "dual": { "J": j, "h": h }, "tol": tol }))
    } else {
        let (p1, p2) = (a.t1.as_ref().expect("clap"), a.t2.as_ref().expect("clap"));
        let dims2 = if a.dims2.is_empty() { a.dims.clone() } else { a.dims2.clone() };
        let t1 = Tps::new(a.dims.clone(), read_matrix_file(p1)?)?;
        let t2 = Tps::new(dims2.clone(), read_matrix_file(p2)?)?;
        let inputs = json!({
            "t1": p1.display().to_string(), "t2": p2.display().to_string(),
            "dims": a.dims, "dims2": dims2, "tol": tol,
        });
        (t1, t2, inputs)
    };
    let eq = tps_equivalent(&t1, &t2, tol)?;
    let ranks = if t1.factor_dims() == t2.factor_dims() && t1.factor_dims().len() >= 2 {
        let m = t1.map() * t2.map().adjoint();
        bipartition_ranks(&m, t1.factor_dims(), tol)?
            .into_iter()
            .map(|(left, rank)| json!({ "left": left, "rank": rank }))
            .collect()
    } else {
        vec![]
    };
    let mut table = Table::new(vec!["left", "rank"]);
    for r in &ranks {
        let left: Vec<String> = r["left"].as_array().into_iter().flatten().map(|v| v.to_string()).collect();
        table.push(vec![left.join(" "), r["rank"].to_string()]);
    }
    Ok(Report {
        command: "tps-equiv",
        verdict: Verdict::from_bool(eq.equivalent),
        json: json!({
            "command": "tps-equiv",
            "inputs": inputs,
            "equivalent": eq.equivalent,
            "reason": eq.reason,
            "permutation": eq.permutation,
            "permutations_tried": eq.permutations_tried,
            "bipartition_ranks": ranks,
        }),
        table: Some(table),
        files: vec![],
    })
}

#[derive(Debug, Clone, Args)]
pub struct KlocalArgs {
    #[command(flatten)]
    pub source: HamSource,
    /// Structure map; the Hamiltonian is conjugated by it before decomposition.
    #[arg(long)]
    pub tps: Option<PathBuf>,
    /// Fail unless the Hamiltonian is at most this local.
    #[arg(long)]
    pub max_k: Option<usize>,
}

/// CSV columns: `string,coefficient`.
pub fn klocal(a: &KlocalArgs, g: &Global) -> Result<Report, CliError> {
    let (source, h) = a.source.load(g.seed)?;
    let threshold = g.tol.unwrap_or(COEFF_THRESHOLD);
    let dim = h.nrows();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::NotPowerOfTwo(dim).into());
    }
    let n = dim.trailing_zeros() as usize;
    let h = match &a.tps {
        Some(p) => conjugate_hamiltonian(&Tps::new(vec![2; n], read_matrix_file(p)?)?, &h)?.matrix,
        None => h,
    };
    let dec = pauli_decompose(&h, n, threshold)?;
    let loc = locality_weight(&dec);
    let mut table = Table::new(vec!["string", "coefficient"]);
    for (p, c) in &dec.coefficients {
        table.push(vec![p.to_string(), num(*c)]);
    }
    let ok = a.max_k.is_none_or(|k| loc.k <= k);
    Ok(Report {
        command: "klocal",
        verdict: Verdict::from_bool(ok),
        json: json!({
            "command": "klocal",
            "inputs": { "source": source, "tps": a.tps.as_ref().map(|p| p.display().to_string()), "threshold": threshold, "max_k": a.max_k },
            "n_sites": n,
            "k": loc.k,
            "edges": loc.edges,
            "n_terms": dec.coefficients.len(),
            "weight_fraction_above_2": dec.weight_fraction_above(2),
            "terms": dec.coefficients.iter().map(|(p, c)| json!([p.to_string(), c])).collect::<Vec<_>>(),
        }),
        table: Some(table),
        files: vec![],
    })
}

#[derive(Debug, Clone, Args)]
pub struct SchmidtArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub cut: Vec<usize>,
}

/// CSV columns: `n,p`.
pub fn schmidt(a: &SchmidtArgs, _g: &Global) -> Result<Report, CliError> {
    let psi = read_state_file(&a.state)?;
    let cut = cut_from(&a.cut)?;
    let s = schmidt_decompose(&psi, cut)?;
    let neg = negativity(psi.density().matrix(), cut)?;
    let mut table = Table::new(vec!["n", "p"]);
    for (i, p) in s.p.iter().enumerate() {
        table.push(vec![i.to_string(), num(*p)]);
    }
    Ok(Report {
        command: "schmidt",
        verdict: Verdict::Pass,
        json: json!({
            "command": "schmidt",
            "inputs": { "state": a.state.display().to_string(), "cut": [cut.left, cut.right] },
            "rank": s.rank(),
            "p": s.p,
            "entropy": s.entropy(),
            "negativity": neg,
        }),
        table: Some(table),
        files: vec![],
    })
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("hsource").required(true).args(["ham", "matrix"])))]
pub struct FindTpsArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub ham: Option<PathBuf>,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Weight of the locality penalty.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 5000)]
    pub budget: usize,
    /// Cut `d,D`; defaults to the first qubit against the rest.
    #[arg(long, value_delimiter = ',')]
    pub cut: Vec<usize>,
}

/// CSV columns: `iteration,best_objective`.
pub fn find_tps(a: &FindTpsArgs, g: &Global) -> Result<Report, CliError> {
    let psi = read_state_file(&a.state)?;
    let h = match (&a.ham, &a.matrix) {
        (Some(p), _) => read_terms(p)?,
        (_, Some(p)) => read_matrix_file(p)?,
        _ => unreachable!("clap enforces one source"),
    };
    let cut = if a.cut.is_empty() { Bipartition::new(2, psi.dim() / 2)? } else { cut_from(&a.cut)? };
    let opts = SearchOptions {
        lambda: a.lambda,
        budget: a.budget,
        tol: g.tol.unwrap_or(1e-6),
        seed: g.seed.unwrap_or(0),
        ..SearchOptions::default()
    };
    let out = search_product_tps(&psi, &h, cut, &opts, None)?;
    let n = psi.dim().trailing_zeros() as usize;
    let basis = generator_basis(n);
    let mut table = Table::new(vec!["iteration", "best_objective"]);
    for (i, v) in out.objective_trace.iter().enumerate() {
        table.push(vec![i.to_string(), num(*v)]);
    }
    let coefficients: Vec<Value> = basis
        .iter()
        .zip(&out.coefficients)
        .filter(|(_, c)| **c != 0.0)
        .map(|(p, c)| json!([p.to_string(), c]))
        .collect();
    Ok(Report {
        command: "find-tps",
        verdict: if out.converged { Verdict::Pass } else { Verdict::NotConverged },
        json: json!({
            "command": "find-tps",
            "inputs": {
                "state": a.state.display().to_string(),
                "hamiltonian": a.ham.as_ref().or(a.matrix.as_ref()).map(|p| p.display().to_string()),
                "cut": [cut.left, cut.right], "lambda": a.lambda, "budget": a.budget, "tol": opts.tol, "seed": opts.seed,
            },
            "converged": out.converged,
            "entropy": out.entropy,
            "excess_locality": out.excess_locality,
            "objective": out.objective,
            "evaluations": out.evaluations,
            "iterations": out.iterations,
            "generator": coefficients,
            "objective_trace": out.objective_trace,
            "tps_file": "find-tps.tps.txt",
        }),
        table: Some(table),
        files: vec![("find-tps.tps.txt".into(), format_matrix(out.tps.map()))],
    })
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
}

pub fn measure(a: &ScenarioArgs, g: &Global) -> Result<Report, CliError> {
    let r = load_scenario(&a.scenario, g.seed)?;
    let psi = r.require_state()?;
    let cut = r.require_cut()?;
    let (obs_name, o_app) = r.observable()?;
    let run = &r.scenario.run;
    let mut search_info = Value::Null;
    let t_m = match run.tps {
        TpsMethod::Construct => construct_product_tps(psi, cut)?,
        TpsMethod::Identity => Tps::identity(vec![cut.left, cut.right])?,
        TpsMethod::Search => {
            let opts = SearchOptions {
                lambda: run.lambda,
                budget: run.budget,
                tol: g.tol.or(run.tol).unwrap_or(FACTORIZATION_TOL / 10.0),
                seed: r.seed.unwrap_or(0),
                ..SearchOptions::default()
            };
            let out = search_product_tps(psi, &r.hamiltonian, cut, &opts, None)?;
            search_info = json!({
                "converged": out.converged, "entropy": out.entropy, "evaluations": out.evaluations,
                "tol": opts.tol, "seed": opts.seed, "lambda": opts.lambda,
            });
            if !out.converged {
                return Ok(Report {
                    command: "measure",
                    verdict: Verdict::NotConverged,
                    json: json!({ "command": "measure", "scenario": r.scenario.name, "search": search_info, "refused": true }),
                    table: None,
                    files: vec![],
                });
            }
            out.tps
        }
    };
    let convex = convex_decomposition(psi, o_app, cut)?;
    let spectrum = eig_hermitian(o_app)?.values;
    let base = json!({
        "command": "measure",
        "scenario": r.scenario.name,
        "inputs": {
            "tps": format!("{:?}", run.tps).to_lowercase(),
            "cut": [cut.left, cut.right],
            "observable": obs_name,
            "policy": r.policy(),
            "seed": r.seed,
        },
        "search": search_info,
        "observable_spectrum": spectrum,
        "convex_decomposition": convex,
    });
    let mut json = base;
    let (verdict, extra) = match single_outcome_measure(psi, &t_m, o_app, cut, r.policy()) {
        Ok(rec) => (
            Verdict::from_bool(rec.residual < 1e-9),
            json!({
                "refused": false,
                "entropy": rec.entropy,
                "index": rec.index,
                "value": rec.value,
                "residual": rec.residual,
                "tie": rec.alignment.tie,
                "degenerate": rec.alignment.degenerate,
                "weights": rec.alignment.weights,
            }),
        ),
        Err(Error::NotFactorized { entropy }) => (Verdict::Fail, json!({ "refused": true, "entropy": entropy })),
        Err(e) => return Err(e.into()),
    };
    if let (Value::Object(m), Value::Object(x)) = (&mut json, extra) {
        m.extend(x);
    }
    Ok(Report { command: "measure", verdict, json, table: None, files: vec![] })
}

#[derive(Debug, Clone, Args)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Also write the CSV table here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// CSV columns: `tau,entropy_before,entropy_after,converged,iterations,evaluations,generator_step`.
pub fn trajectory(a: &TrajectoryArgs, g: &Global) -> Result<Report, CliError> {
    let r = load_scenario(&a.scenario, g.seed)?;
    let psi = r.require_state()?.clone();
    let cut = r.require_cut()?;
    let grid = r.tau_grid()?;
    let run = &r.scenario.run;
    let spec = EvolutionSpec::new(r.hamiltonian.clone(), QuantumState::Pure(psi), grid, run.convention)?;
    let opts = SearchOptions {
        lambda: run.lambda,
        budget: run.budget,
        tol: g.tol.or(run.tol).unwrap_or(1e-6),
        seed: r.seed.unwrap_or(0),
        ..SearchOptions::default()
    };
    let points = tps_entropy_trajectory(&spec, cut, &opts)?;
    let mut table =
        Table::new(vec!["tau", "entropy_before", "entropy_after", "converged", "iterations", "evaluations", "generator_step"]);
    for p in &points {
        table.push(vec![
            num(p.tau),
            num(p.entropy_before),
            num(p.entropy_after),
            p.converged.to_string(),
            p.iterations.to_string(),
            p.evaluations.to_string(),
            num(p.generator_step),
        ]);
    }
    let all = points.iter().all(|p| p.converged);
    Ok(Report {
        command: "trajectory",
        verdict: if all { Verdict::Pass } else { Verdict::NotConverged },
        json: json!({
            "command": "trajectory",
            "scenario": r.scenario.name,
            "inputs": {
                "cut": [cut.left, cut.right], "lambda": opts.lambda, "budget": opts.budget,
                "tol": opts.tol, "seed": opts.seed, "convention": run.convention,
            },
            "all_converged": all,
            "points": points,
        }),
        table: Some(table),
        files: vec![],
    })
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("params").required(true).args(["phases", "masses"])))]
pub struct GieArgs {
    /// Branch phases `LL,LR,RL,RR` in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phases: Vec<f64>,
    /// Masses `m1,m2` in kg.
    #[arg(long, value_delimiter = ',', requires_all = ["tf", "seps"])]
    pub masses: Vec<f64>,
    /// Interaction time in s.
    #[arg(long)]
    pub tf: Option<f64>,
    /// Branch separations `LL,LR,RL,RR` in m.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub seps: Vec<f64>,
    /// Restrict the tripartite run to one mediator kind.
    #[arg(long)]
    pub mediator: Option<String>,
    /// Overlap `s` between mediator branch states.
    #[arg(long, default_value_t = 0.0)]
    pub overlap: f64,
}

pub fn gie(a: &GieArgs, g: &Global) -> Result<Report, CliError> {
    if !a.phases.is_empty() && a.phases.len() != 4 {
        return Err(input("--phases: expected four values LL,LR,RL,RR"));
    }
    let params = if a.phases.len() == 4 {
        GieParams::Phases { phases: [a.phases[0], a.phases[1], a.phases[2], a.phases[3]] }
    } else {
        let s = &a.seps;
        if s.len() != 4 || a.masses.len() != 2 {
            return Err(input("--masses needs two values and --seps four"));
        }
        GieParams::Physical {
            m1: a.masses[0],
            m2: a.masses[1],
            tf: a.tf.ok_or_else(|| input("--tf is required with --masses"))?,
            separations: [s[0], s[1], s[2], s[3]],
        }
    };
    let tol = g.tol.unwrap_or(1e-9);
    let bi = gie_bipartite_state(&params).map_err(|e| input(e.to_string()))?;
    let mediators = match &a.mediator {
        Some(m) => vec![m.parse::<Mediator>().map_err(|e| input(format!("--mediator: {e}")))?],
        None => vec![Mediator::Quantum, Mediator::Classical],
    };
    let mut table = Table::new(vec!["mediator", "overlap", "mass_negativity"]);
    let mut tri = Vec::new();
    for m in mediators {
        let t = gie_tripartite_state(&params, m, a.overlap).map_err(|e| input(e.to_string()))?;
        table.push(vec![format!("{m:?}").to_lowercase(), num(a.overlap), num(t.mass_negativity)]);
        tri.push(json!({ "mediator": m, "overlap": a.overlap, "mass_negativity": t.mass_negativity }));
    }
    let defect = phase_defect(&bi.phases);
    Ok(Report {
        command: "gie",
        verdict: Verdict::Pass,
        json: json!({
            "command": "gie",
            "inputs": { "params": params, "overlap": a.overlap, "tol": tol },
            "phases": bi.phases,
            "phase_defect": defect,
            "phase_condition": defect <= tol,
            "amplitudes": bi.state.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "negativity": bi.negativity,
            "entangled": bi.negativity > tol,
            "tripartite": tri,
        }),
        table: Some(table),
        files: vec![],
    })
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Coupling grid `lo,hi,n`.
    #[arg(long = "j-range", value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, 2.0, 41.0])]
    pub j_range: Vec<f64>,
    /// Field grid `lo,hi,n`.
    #[arg(long = "h-range", value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, 2.0, 41.0])]
    pub h_range: Vec<f64>,
}

fn grid(v: &[f64], flag: &str) -> Result<Vec<f64>, CliError> {
    match v {
        [lo, hi, n] if *n >= 1.0 && n.fract() == 0.0 && hi >= lo => Ok(linspace(*lo, *hi, *n as usize)),
        _ => Err(input(format!("--{flag}: expected lo,hi,n with hi >= lo and integer n >= 1"))),
    }
}

/// CSV columns: `J,h,z_spectral_deviation,z_match,x_spectral_deviation,x_match`.
pub fn scan(a: &ScanArgs, g: &Global) -> Result<Report, CliError> {
    let tol = g.tol.unwrap_or(1e-10);
    let js = grid(&a.j_range, "j-range")?;
    let hs = grid(&a.h_range, "h-range")?;
    let pairs: Vec<(f64, f64)> = js.iter().flat_map(|&j| hs.iter().map(move |&h| (j, h))).collect();
    // collect preserves input order, so the merge is deterministic
    let points = pairs.par_iter().map(|&(j, h)| scan_point(j, h, tol)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(vec!["J", "h", "z_spectral_deviation", "z_match", "x_spectral_deviation", "x_match"]);
    for p in &points {
        table.push(vec![
            num(p.coupling),
            num(p.field),
            num(p.z_spectral_deviation),
            p.z_match.to_string(),
            num(p.x_spectral_deviation),
            p.x_match.to_string(),
        ]);
    }
    let x_all = points.iter().all(|p| p.x_match);
    let z_points: Vec<[f64; 2]> = points.iter().filter(|p| p.z_match).map(|p| [p.coupling, p.field]).collect();
    let z_on_axes = points.iter().all(|p| p.z_match == (p.coupling == 0.0 || p.field == 0.0));
    Ok(Report {
        command: "scan",
        verdict: Verdict::from_bool(x_all),
        json: json!({
            "command": "scan",
            "inputs": { "j_range": a.j_range, "h_range": a.h_range, "tol": tol },
            "points": points.len(),
            "x_all_match": x_all,
            "z_match_count": z_points.len(),
            "z_match_points": z_points,
            "z_matches_exactly_on_axes": z_on_axes,
        }),
        table: Some(table),
        files: vec![],
    })
}
