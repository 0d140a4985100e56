//! Batch front end: `asci run | prep | rotate | report`.
//!
//! A TOML file configures the model and the commands. Artifacts are written
//! only after a command has fully succeeded and start with a
//! `# config <sha256>` line identifying the configuration file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::analysis::{matrix_to_text, natural_orbital_rotation, one_rdm, rotate_integrals, OverlapReport};
use crate::determinants::{parse_determinant, Determinant};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    aufbau_shell, build_hubbard_planewave, build_hubbard_spatial, pattern_determinant, read_fcidump, write_fcidump,
    EriSymmetry, IntegralModel, LatticeSpec, Momentum, Pattern, SourceTag,
};
use crate::solver::{asci_run, exact_diagonalize, sector_size, AsciConfig, Pt2Mode, SectorConstraint, Wavefunction};
use crate::stateprep::{
    fidelity, gate_counts, random_instance, simulate, simulate_sparse, synthesize, PrepPlan, QuantumState,
    QubitMapping, DENSE_QUBIT_LIMIT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;
pub const EXIT_SIZE_GUARD: i32 = 5;

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
        Error::NotConverged { .. } | Error::Plan(_) => EXIT_SOLVER,
        Error::SizeGuard { .. } => EXIT_SIZE_GUARD,
    }
}

const AFTER_HELP: &str = "\
Exit codes: 0 ok, 2 configuration error, 3 IO or malformed input file,
4 solver failure, 5 size guard.

Configuration sections and defaults:
  [model]   kind = \"hubbard\": lx, ly, t, u, n_alpha, n_beta, basis = \"spatial\" | \"planewave\"
            kind = \"fcidump\": path (relative to the config file), optional n_alpha, n_beta
  [sector]  momentum = [kx, ky]              (plane-wave models only; default: none)
  [initial] kind = \"aufbau\" | \"aufbau_shell\" | \"afm\" | \"sdw\" | \"explicit\"   (default aufbau)
            determinants = [\"a:0,1|b:0,1\"]   (explicit only)
  [asci]    method = \"asci\" | \"exact\" (asci), tdets = 1000, cdets = min(tdets, max(1000, tdets/10)),
            energy_tol = 1e-6, max_iter = 20, davidson_tol = 1e-8,
            pt2 = \"final\" | \"never\" | \"every\" (final), ed_cap = 20000000
  [output]  top_k = 1000, overlap_points = 100
  [prep]    source = \"wavefunction\" | \"random\" (wavefunction), wavefunction = <out>/wavefunction.txt,
            l = 16 (capped at the stored count), reorder = true, simulator = \"auto\" | \"dense\" | \"sparse\" (auto),
            random_norb = 5, random_l = 32   (random uses --seed)
  [rotate]  wavefunction = <out>/wavefunction.txt, check_energy = true
  [report]  fillings = []  (electrons per spin; tabulates sector dimensions),
            wavefunction = none

Artifacts (all start with '# config <sha256>'):
  run     log.txt wavefunction.txt overlap.txt summary.txt
  prep    circuit.txt prep_report.txt
  rotate  rotated.fcidump natural_orbitals.txt rotate_report.txt
  report  report.txt";

#[derive(Parser, Debug)]
#[command(name = "asci", version, about = "Selected-CI ground states and state-preparation circuits", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Seed for randomized instance generators; the solvers are deterministic.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Ground state by selected CI or exact diagonalization.
    Run,
    /// Compile the top-L determinants of a wavefunction into a circuit and verify it.
    Prep,
    /// Rotate the model to the natural orbitals of a wavefunction.
    Rotate,
    /// Sector dimensions and wavefunction diagnostics.
    Report,
}

#[derive(Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Spatial,
    Planewave,
}

#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Fcidump { path: PathBuf, n_alpha: Option<usize>, n_beta: Option<usize> },
    Hubbard { lx: usize, ly: usize, t: f64, u: f64, n_alpha: usize, n_beta: usize, basis: Basis },
}

#[derive(Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SectorConfig {
    pub momentum: Option<[i64; 2]>,
}

#[derive(Deserialize, Debug, Clone, Copy, Default, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    #[default]
    Aufbau,
    AufbauShell,
    Afm,
    Sdw,
    Explicit,
}

#[derive(Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub kind: InitialKind,
    #[serde(default)]
    pub determinants: Vec<String>,
}

#[derive(Deserialize, Debug, Clone, Copy, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Asci,
    Exact,
}

#[derive(Deserialize, Debug, Clone, Copy, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Pt2Setting {
    Never,
    #[default]
    Final,
    Every,
}

#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AsciSection {
    pub method: Method,
    pub tdets: usize,
    pub cdets: Option<usize>,
    pub energy_tol: f64,
    pub max_iter: usize,
    pub davidson_tol: f64,
    pub pt2: Pt2Setting,
    pub ed_cap: u64,
}

impl Default for AsciSection {
    fn default() -> Self {
        AsciSection {
            method: Method::Asci,
            tdets: 1000,
            cdets: None,
            energy_tol: 1e-6,
            max_iter: 20,
            davidson_tol: 1e-8,
            pt2: Pt2Setting::Final,
            ed_cap: crate::solver::DEFAULT_ED_CAP as u64,
        }
    }
}

#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub top_k: usize,
    pub overlap_points: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { top_k: 1000, overlap_points: 100 }
    }
}

#[derive(Deserialize, Debug, Clone, Copy, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PrepSource {
    #[default]
    Wavefunction,
    Random,
}

#[derive(Deserialize, Debug, Clone, Copy, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SimulatorChoice {
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PrepConfig {
    pub source: PrepSource,
    pub wavefunction: Option<PathBuf>,
    pub l: usize,
    pub reorder: bool,
    pub simulator: SimulatorChoice,
    pub random_norb: usize,
    pub random_l: usize,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            source: PrepSource::Wavefunction,
            wavefunction: None,
            l: 16,
            reorder: true,
            simulator: SimulatorChoice::Auto,
            random_norb: 5,
            random_l: 32,
        }
    }
}

#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RotateConfig {
    pub wavefunction: Option<PathBuf>,
    pub check_energy: bool,
}

impl Default for RotateConfig {
    fn default() -> Self {
        RotateConfig { wavefunction: None, check_energy: true }
    }
}

#[derive(Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    pub fillings: Vec<usize>,
    pub wavefunction: Option<PathBuf>,
}

/// Parsed configuration file.
#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub sector: SectorConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub asci: AsciSection,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub prep: PrepConfig,
    #[serde(default)]
    pub rotate: RotateConfig,
    #[serde(default)]
    pub report: ReportConfig,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
    /// Hex SHA-256 of the configuration text.
    #[serde(skip)]
    pub hash: String,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

impl RunConfig {
    /// Parses and validates configuration text; relative paths resolve against `base_dir`.
    pub fn from_text(text: &str, base_dir: &Path) -> Result<RunConfig> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.hash = format!("{:x}", Sha256::digest(text.as_bytes()));
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads, parses, and validates a configuration file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        RunConfig::from_text(&text, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.model {
            ModelConfig::Fcidump { path, .. } => {
                let p = self.resolve(path);
                if !p.is_file() {
                    return Err(io_err(&p, std::io::Error::new(std::io::ErrorKind::NotFound, "no such file")));
                }
                if self.sector.momentum.is_some() {
                    return Err(config_err("[sector] momentum needs a plane-wave lattice model"));
                }
            }
            ModelConfig::Hubbard { lx, ly, basis, .. } => {
                if *lx == 0 || *ly == 0 {
                    return Err(config_err("lattice dimensions must be positive"));
                }
                if self.sector.momentum.is_some() && *basis != Basis::Planewave {
                    return Err(config_err("[sector] momentum needs basis = \"planewave\""));
                }
            }
        }
        let a = &self.asci;
        if a.tdets == 0 || a.max_iter == 0 || a.cdets == Some(0) || a.ed_cap == 0 {
            return Err(config_err("[asci] counts must be positive"));
        }
        if !(a.energy_tol > 0.0 && a.davidson_tol > 0.0) {
            return Err(config_err("[asci] tolerances must be positive"));
        }
        if self.output.top_k == 0 || self.output.overlap_points == 0 {
            return Err(config_err("[output] counts must be positive"));
        }
        if self.prep.l == 0 || self.prep.random_norb == 0 || self.prep.random_l == 0 {
            return Err(config_err("[prep] counts must be positive"));
        }
        if self.initial.kind == InitialKind::Explicit && self.initial.determinants.is_empty() {
            return Err(config_err("[initial] kind = \"explicit\" needs determinants"));
        }
        if self.initial.kind != InitialKind::Explicit && !self.initial.determinants.is_empty() {
            return Err(config_err("[initial] determinants are only used with kind = \"explicit\""));
        }
        for p in [&self.prep.wavefunction, &self.rotate.wavefunction, &self.report.wavefunction].into_iter().flatten() {
            if p.as_os_str().is_empty() {
                return Err(config_err("empty wavefunction path"));
            }
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<IntegralModel> {
        match &self.model {
            ModelConfig::Fcidump { path, n_alpha, n_beta } => {
                let m = read_fcidump(&self.resolve(path))?;
                match (n_alpha, n_beta) {
                    (None, None) => Ok(m),
                    (a, b) => {
                        let (na, nb) = (a.unwrap_or(m.n_alpha()), b.unwrap_or(m.n_beta()));
                        m.with_electrons(na, nb)
                    }
                }
            }
            ModelConfig::Hubbard { lx, ly, t, u, n_alpha, n_beta, basis } => {
                let spec = LatticeSpec::new(*lx, *ly, *t, *u, *n_alpha, *n_beta);
                match basis {
                    Basis::Spatial => build_hubbard_spatial(&spec),
                    Basis::Planewave => build_hubbard_planewave(&spec),
                }
            }
        }
    }

    pub fn sector(&self) -> Option<Momentum> {
        let k = self.sector.momentum?;
        match &self.model {
            ModelConfig::Hubbard { lx, ly, .. } => Some(Momentum::new(k[0], k[1], *lx, *ly)),
            ModelConfig::Fcidump { .. } => None,
        }
    }

    pub fn initial_determinants(&self, model: &IntegralModel) -> Result<Vec<Determinant>> {
        let single = |p: Pattern| pattern_determinant(&p, model).map(|d| vec![d]);
        match self.initial.kind {
            InitialKind::Aufbau => single(Pattern::Aufbau),
            InitialKind::AufbauShell => aufbau_shell(model, self.sector()),
            InitialKind::Afm => single(Pattern::Antiferromagnetic),
            InitialKind::Sdw => single(Pattern::SpinDensityWave),
            InitialKind::Explicit => self
                .initial
                .determinants
                .iter()
                .map(|t| {
                    let d = parse_determinant(t, model.norb()).map_err(|e| config_err(format!("[initial] {e}")))?;
                    if d.n_alpha() != model.n_alpha() || d.n_beta() != model.n_beta() {
                        return Err(config_err(format!(
                            "[initial] {d} does not hold ({}, {}) electrons",
                            model.n_alpha(),
                            model.n_beta()
                        )));
                    }
                    Ok(d)
                })
                .collect(),
        }
    }

    pub fn asci_config(&self) -> AsciConfig {
        let a = &self.asci;
        AsciConfig {
            tdets: a.tdets,
            cdets: a.cdets,
            energy_tol: a.energy_tol,
            max_iter: a.max_iter,
            davidson_tol: a.davidson_tol,
            sector: self.sector(),
            pt2: match a.pt2 {
                Pt2Setting::Never => Pt2Mode::Never,
                Pt2Setting::Final => Pt2Mode::Final,
                Pt2Setting::Every => Pt2Mode::EveryIteration,
            },
        }
    }

    fn wavefunction_path(&self, configured: &Option<PathBuf>, out: &Path) -> PathBuf {
        configured.as_ref().map_or_else(|| out.join("wavefunction.txt"), |p| self.resolve(p))
    }
}

/// Named artifact contents, written together once a command succeeds.
pub type Artifacts = Vec<(String, String)>;

fn stamp(cfg: &RunConfig, body: &str) -> String {
    format!("# config {}\n{body}", cfg.hash)
}

/// Writes every artifact to a temporary name first and renames them all only
/// when every write succeeded.
pub fn write_artifacts(out: &Path, files: &Artifacts) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = std::fs::remove_file(tmp);
        }
    };
    for (name, body) in files {
        let dest = out.join(name);
        let tmp = out.join(format!(".{name}.partial"));
        if let Err(e) = std::fs::write(&tmp, body) {
            cleanup(&staged);
            let _ = std::fs::remove_file(&tmp);
            return Err(io_err(&tmp, e));
        }
        staged.push((tmp, dest));
    }
    for (tmp, dest) in &staged {
        if let Err(e) = std::fs::rename(tmp, dest) {
            cleanup(&staged);
            return Err(io_err(dest, e));
        }
    }
    Ok(())
}

fn read_wavefunction(path: &Path) -> Result<Wavefunction> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Wavefunction::from_text(&text)
}

/// Runs the ground-state solver and returns the run artifacts.
pub fn cmd_run(cfg: &RunConfig) -> Result<Artifacts> {
    let model = cfg.build_model()?;
    let mut summary = String::new();
    let (wf, log, e_pt2, converged) = match cfg.asci.method {
        Method::Asci => {
            let init = cfg.initial_determinants(&model)?;
            let r = asci_run(&model, &init, &cfg.asci_config())?;
            let log = r.log_text();
            (r.wavefunction, log, r.e_pt2, r.converged)
        }
        Method::Exact => {
            let mut c = SectorConstraint::from_model(&model).with_cap(u128::from(cfg.asci.ed_cap));
            if let Some(k) = cfg.sector() {
                c = c.with_momentum(k);
            }
            let wf = exact_diagonalize(&model, &c, cfg.asci.davidson_tol)?;
            let log = format!(
                "iter space_size e_var e_pt2 top_weight\n0 {} {:.16e} nan {:.16e}\n",
                wf.len(),
                wf.energy(),
                wf.top_weight()
            );
            (wf, log, 0.0, true)
        }
    };
    let report = OverlapReport::new(&wf, cfg.output.overlap_points)?;
    let method = match cfg.asci.method {
        Method::Asci => "asci",
        Method::Exact => "exact",
    };
    let _ = writeln!(summary, "method {method}");
    let _ = writeln!(summary, "norb {}", model.norb());
    let _ = writeln!(summary, "n_alpha {}", model.n_alpha());
    let _ = writeln!(summary, "n_beta {}", model.n_beta());
    let _ = writeln!(summary, "space_size {}", wf.len());
    let _ = writeln!(summary, "e_var {:.16e}", wf.energy());
    let _ = writeln!(summary, "e_pt2 {e_pt2:.16e}");
    let _ = writeln!(summary, "e_total {:.16e}", wf.energy() + e_pt2);
    let _ = writeln!(summary, "top_weight {:.16e}", wf.top_weight());
    let _ = writeln!(summary, "top_determinant {}", wf.dets()[0]);
    let _ = writeln!(summary, "converged {converged}");
    Ok(vec![
        ("log.txt".into(), stamp(cfg, &log)),
        ("wavefunction.txt".into(), stamp(cfg, &wf.to_text_top(cfg.output.top_k))),
        ("overlap.txt".into(), stamp(cfg, &report.to_text())),
        ("summary.txt".into(), stamp(cfg, &summary)),
    ])
}

/// Builds, simulates, and reports a preparation circuit.
pub fn cmd_prep(cfg: &RunConfig, out: &Path, seed: u64) -> Result<Artifacts> {
    let p = &cfg.prep;
    let (target, truncation) = match p.source {
        PrepSource::Wavefunction => {
            let path = cfg.wavefunction_path(&p.wavefunction, out);
            let wf = read_wavefunction(&path)?;
            // a short wavefunction is used whole
            let l = p.l.min(wf.len());
            let weight = crate::analysis::cumulative_weights(&wf, l).last().map_or(0.0, |x| x.1);
            (wf.truncated(l)?, weight)
        }
        PrepSource::Random => {
            let (dets, amps) = random_instance(seed, p.random_norb, p.random_l)?;
            (Wavefunction::new(dets, amps, f64::NAN)?, 1.0)
        }
    };
    let plan = PrepPlan::from_wavefunction(&target, p.reorder)?;
    let circuit = synthesize(&plan);
    let counts = gate_counts(&circuit);
    let mapping = QubitMapping::for_circuit(&circuit);
    let aux = mapping.aux;
    let dense_ok = circuit.n_qubits() <= DENSE_QUBIT_LIMIT;
    let verdict: std::result::Result<(&str, f64, f64), String> = match (p.simulator, dense_ok) {
        (SimulatorChoice::Dense, false) => Err(format!(
            "dense simulation of {} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit limit",
            circuit.n_qubits()
        )),
        (SimulatorChoice::Dense, true) | (SimulatorChoice::Auto, true) => {
            let s = simulate(&circuit)?;
            let leak = aux.map_or(0.0, |q| s.max_amplitude_with(q));
            Ok(("dense", fidelity(&s, &target, &mapping)?, leak))
        }
        (SimulatorChoice::Sparse, _) | (SimulatorChoice::Auto, false) => {
            let s = simulate_sparse(&circuit)?;
            let leak = aux.map_or(0.0, |q| s.max_amplitude_with(q));
            Ok(("sparse", fidelity(&s, &target, &mapping)?, leak))
        }
    };
    let mut report = String::new();
    let _ = writeln!(report, "qubits {}", circuit.n_qubits());
    let _ = writeln!(report, "determinants {}", plan.len());
    if p.source == PrepSource::Wavefunction {
        let _ = writeln!(report, "requested_l {}", p.l);
    }
    let _ = writeln!(report, "reordered {}", p.reorder);
    let _ = writeln!(report, "truncation_weight {truncation:.16e}");
    match &verdict {
        Ok((sim, f, leak)) => {
            let _ = writeln!(report, "simulator {sim}");
            let _ = writeln!(report, "fidelity {f:.16e}");
            let _ = writeln!(report, "aux_max_amplitude {leak:.16e}");
        }
        Err(why) => {
            let _ = writeln!(report, "simulator none");
            let _ = writeln!(report, "fidelity unverified ({why})");
        }
    }
    report.push_str(&counts.to_text());
    Ok(vec![("circuit.txt".into(), stamp(cfg, &circuit.to_text())), ("prep_report.txt".into(), stamp(cfg, &report))])
}

/// Natural-orbital rotation of the configured model.
pub fn cmd_rotate(cfg: &RunConfig, out: &Path) -> Result<Artifacts> {
    let model = cfg.build_model()?;
    if model.source() == SourceTag::HubbardPlaneWave || model.two_electron().symmetry() != EriSymmetry::Eightfold {
        return Err(config_err("natural-orbital rotation is only offered for FCIDUMP and spatial-basis models"));
    }
    let wf = read_wavefunction(&cfg.wavefunction_path(&cfg.rotate.wavefunction, out))?;
    if wf.dets()[0].norb() != model.norb() {
        return Err(config_err(format!(
            "wavefunction has {} orbitals, model has {}",
            wf.dets()[0].norb(),
            model.norb()
        )));
    }
    let gamma = one_rdm(&wf);
    let (u, occ) = natural_orbital_rotation(&gamma);
    let rotated = rotate_integrals(&model, &u)?;
    let mut report = String::new();
    let _ = writeln!(report, "rdm_trace {:.16e}", gamma.trace());
    let occ_text: Vec<String> = occ.iter().map(|o| format!("{o:.16e}")).collect();
    let _ = writeln!(report, "occupations {}", occ_text.join(" "));
    if cfg.rotate.check_energy {
        let c = SectorConstraint::from_model(&model).with_cap(u128::from(cfg.asci.ed_cap));
        let before = exact_diagonalize(&model, &c, cfg.asci.davidson_tol)?.energy();
        let after = exact_diagonalize(&rotated, &c, cfg.asci.davidson_tol)?.energy();
        let _ = writeln!(report, "ed_energy_original {before:.16e}");
        let _ = writeln!(report, "ed_energy_rotated {after:.16e}");
        let _ = writeln!(report, "ed_energy_difference {:.3e}", (after - before).abs());
    }
    Ok(vec![
        ("rotated.fcidump".into(), stamp(cfg, &write_fcidump(&rotated)?)),
        ("natural_orbitals.txt".into(), stamp(cfg, &matrix_to_text(&u))),
        ("rotate_report.txt".into(), stamp(cfg, &report)),
    ])
}

/// Sector dimensions for the configured model and optional diagnostics.
pub fn cmd_report(cfg: &RunConfig) -> Result<Artifacts> {
    let model = cfg.build_model()?;
    let mut r = String::new();
    let _ = writeln!(r, "norb {}", model.norb());
    let _ = writeln!(r, "n_alpha {}", model.n_alpha());
    let _ = writeln!(r, "n_beta {}", model.n_beta());
    let full = SectorConstraint::from_model(&model);
    let _ = writeln!(r, "space_dimension {}", sector_size(&model, &full)?);
    if let Some(k) = cfg.sector() {
        let _ = writeln!(r, "sector_momentum {} {}", k.kx, k.ky);
        let _ = writeln!(r, "sector_dimension {}", sector_size(&model, &full.with_momentum(k))?);
    }
    let init = cfg.initial_determinants(&model)?;
    let _ = writeln!(r, "initial_determinants {}", init.len());
    let _ = writeln!(r, "initial_diagonal {:.16e}", model.diagonal(&init[0]));
    if !cfg.report.fillings.is_empty() {
        let ModelConfig::Hubbard { lx, ly, t, u, .. } = &cfg.model else {
            return Err(config_err("[report] fillings need a lattice model"));
        };
        let _ = writeln!(r, "filling n_alpha n_beta planewave_zero_momentum spatial_full");
        for &n in &cfg.report.fillings {
            let spec = LatticeSpec::new(*lx, *ly, *t, *u, n, n);
            let pw = build_hubbard_planewave(&spec)?;
            let sp = build_hubbard_spatial(&spec)?;
            let zero = SectorConstraint::from_model(&pw).with_momentum(Momentum::zero(*lx, *ly));
            let _ = writeln!(
                r,
                "{:.4} {n} {n} {} {}",
                n as f64 / (lx * ly) as f64,
                sector_size(&pw, &zero)?,
                sector_size(&sp, &SectorConstraint::from_model(&sp))?
            );
        }
    }
    if let Some(p) = &cfg.report.wavefunction {
        let wf = read_wavefunction(&cfg.resolve(p))?;
        let gamma = one_rdm(&wf);
        let occ = gamma.occupations();
        let _ = writeln!(r, "rdm_trace {:.16e}", gamma.trace());
        let _ = writeln!(r, "rdm_occupation_min {:.16e}", occ.first().copied().unwrap_or(0.0));
        let _ = writeln!(r, "rdm_occupation_max {:.16e}", occ.last().copied().unwrap_or(0.0));
        r.push_str(&OverlapReport::new(&wf, cfg.output.overlap_points)?.to_text());
    }
    Ok(vec![("report.txt".into(), stamp(cfg, &r))])
}

/// Runs one command end to end, writing artifacts on success.
pub fn execute(cli: &Cli) -> Result<()> {
    let path = cli.config.as_ref().ok_or_else(|| config_err("--config PATH is required"))?;
    let cfg = RunConfig::load(path)?;
    let files = match cli.command {
        Command::Run => cmd_run(&cfg)?,
        Command::Prep => cmd_prep(&cfg, &cli.out, cli.seed)?,
        Command::Rotate => cmd_rotate(&cfg, &cli.out)?,
        Command::Report => cmd_report(&cfg)?,
    };
    write_artifacts(&cli.out, &files)
}

/// Parses `args`, runs the command, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("asci: {e}");
            exit_code(&e)
        }
    }
}
