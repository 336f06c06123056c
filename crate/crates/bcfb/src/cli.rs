//! Command-line front end. Each subcommand reads an optional JSON config,
//! runs one computation and writes a report, CSV or JSON artifact.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channels::{dueck_condition_holds, dueck_correlated_noise, make_dueck, ChannelSpec, DueckParams};
use crate::info::JointPmf;
use crate::mcsim::{results_csv, run_experiment, ExperimentConfig, LemmaSuite, SimError};
use crate::polytope::{sig9, RateRegion3};
use crate::regions::{
    blackwell_bounds, dueck_capacity, dueck_theorem3_region, feedback_inner, fm_check, lgw_inner, marton_region,
    z_markov_chain_holds, AuxiliaryScheme, DueckWhich, FmTarget, GridParam, GridSpec, LgwVariant, RegionError,
    UpdateScheme, Variant,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {msg}")]
    Json { path: String, line: usize, column: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Resource(_) | CliError::Check(_) => 1,
            _ => 2,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Resource { .. } => CliError::Resource(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<crate::channels::ChannelError> for CliError {
    fn from(e: crate::channels::ChannelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<crate::polytope::PolyError> for CliError {
    fn from(e: crate::polytope::PolyError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "bcfb", version, about = "Broadcast channel rate regions with generalized feedback")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed, overriding the one in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Numeric tolerance for checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a rate region for a scheme; writes region JSON and a vertex CSV.
    Region(#[command(flatten)] Common),
    /// Compare Fourier-Motzkin elimination against the closed-form regions.
    FmCheck(#[command(flatten)] Common),
    /// Dueck channel capacities, condition and Markov-chain checks.
    Dueck(#[command(flatten)] Common),
    /// Blackwell channel sweep over p: p, fb_lower, nofb_upper, fb_cutset.
    Blackwell(#[command(flatten)] Common),
    /// Monte Carlo scheme experiment.
    Simulate(#[command(flatten)] Common),
    /// Covering, packing and multivariate packing suite.
    Lemmas(#[command(flatten)] Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Region(c)
            | Command::FmCheck(c)
            | Command::Dueck(c)
            | Command::Blackwell(c)
            | Command::Simulate(c)
            | Command::Lemmas(c) => c,
        }
    }
}

/// Parses arguments, runs, prints errors and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cmd: &Command) -> Result<()> {
    let c = cmd.common();
    if let Some(k) = c.workers {
        if k == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        // Fails only if a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    if !(c.tol >= 0.0) {
        return Err(CliError::Config(format!("--tol must be nonnegative, got {}", c.tol)));
    }
    match cmd {
        Command::Region(c) => region(c),
        Command::FmCheck(c) => fm(c),
        Command::Dueck(c) => dueck(c),
        Command::Blackwell(c) => blackwell(c),
        Command::Simulate(c) => simulate(c),
        Command::Lemmas(c) => lemmas(c),
    }
}

// ------------------------------------------------------------------ config

/// Config text parsed twice: as a raw value, and as `T`, both with positions.
struct Loaded<T> {
    cfg: T,
    raw: Value,
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<Loaded<T>> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: p.clone(), source })?;
    let json_err = |e: serde_json::Error| CliError::Json {
        path: p.clone(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    };
    let raw: Value = serde_json::from_str(&text).map_err(json_err)?;
    let cfg: T = serde_json::from_str(&text).map_err(json_err)?;
    Ok(Loaded { cfg, raw })
}

fn load_or<T: DeserializeOwned + Serialize>(c: &Common, default: impl FnOnce() -> Result<T>) -> Result<Loaded<T>> {
    match &c.config {
        Some(p) => load(p),
        None => {
            let cfg = default()?;
            let raw = serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(Loaded { cfg, raw })
        }
    }
}

/// Flag seed, else the config's `seed` key.
fn require_seed(c: &Common, raw: &Value) -> Result<u64> {
    if let Some(s) = c.seed {
        return Ok(s);
    }
    raw.get("seed")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::Config("a seed is required: pass --seed or set \"seed\" in the config".into()))
}

pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_string(cfg).unwrap_or_default();
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn csv_header<T: Serialize>(cfg: &T, seed: Option<u64>) -> String {
    let seed = seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    format!("# config_sha256={} seed={seed}\n", config_hash(cfg))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ------------------------------------------------------------------ region

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Marton,
    Feedback,
    FeedbackStar,
    Lgw,
    LgwStar,
}

/// Scheme file for `region`. LGW kinds read `source` (axes `X, Y1, Y2`) and
/// `update` given `X`; the others read `channel` and `aux`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub region: RegionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxiliaryScheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub update: Option<UpdateScheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<JointPmf>,
}

#[derive(Serialize)]
struct RegionOut<'a> {
    region: RegionKind,
    sum_rate: Option<f64>,
    polytope: &'a RateRegion3,
}

pub fn evaluate_region(cfg: &RegionConfig) -> Result<RateRegion3> {
    let missing = |what: &str| CliError::Config(format!("{:?} region needs \"{what}\"", cfg.region));
    match cfg.region {
        RegionKind::Lgw | RegionKind::LgwStar => {
            let src = cfg.source.as_ref().ok_or_else(|| missing("source"))?;
            let upd = cfg.update.as_ref().ok_or_else(|| missing("update"))?;
            let v = if cfg.region == RegionKind::Lgw { LgwVariant::Inner } else { LgwVariant::Star };
            Ok(lgw_inner(upd, src, v)?)
        }
        kind => {
            let ch = cfg.channel.as_ref().ok_or_else(|| missing("channel"))?.build()?;
            let aux = cfg.aux.as_ref().ok_or_else(|| missing("aux"))?;
            if kind == RegionKind::Marton {
                return Ok(marton_region(aux, &ch)?);
            }
            let variant = if kind == RegionKind::Feedback { Variant::Full } else { Variant::Star };
            let upd = match &cfg.update {
                Some(u) => u.clone(),
                None => UpdateScheme::constant(variant, aux, &ch)?,
            };
            Ok(feedback_inner(aux, &upd, &ch, variant)?)
        }
    }
}

fn region(c: &Common) -> Result<()> {
    let path = c.config.as_ref().ok_or_else(|| CliError::Config("region needs --config".into()))?;
    let cfg: RegionConfig = load(path)?.cfg;
    let r = evaluate_region(&cfg)?;
    let sum_rate = if r.orientation == crate::polytope::Orientation::Down {
        let s = r.sum_rate_max()?;
        s.feasible.then_some(s.value)
    } else {
        None
    };
    let json = serde_json::to_string_pretty(&RegionOut { region: cfg.region, sum_rate, polytope: &r })
        .map_err(|e| CliError::Config(e.to_string()))?;
    let csv = format!("{}{}", csv_header(&cfg, c.seed), r.vertices()?.to_csv());
    match &c.out {
        Some(p) => {
            emit(Some(p), &(json + "\n"))?;
            emit(Some(&p.with_extension("vertices.csv")), &csv)
        }
        None => emit(None, &format!("{json}\n{csv}")),
    }
}

// ---------------------------------------------------------------- fm-check

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FmConfig {
    #[serde(default = "default_targets")]
    pub targets: Vec<FmTarget>,
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_targets() -> Vec<FmTarget> {
    vec![FmTarget::Marton]
}

fn default_cases() -> usize {
    10
}

fn fm(c: &Common) -> Result<()> {
    let l = load_or(c, || Ok(FmConfig { targets: default_targets(), cases: default_cases(), seed: None }))?;
    let seed = require_seed(c, &l.raw)?;
    let mut report = String::new();
    let mut failed = Vec::new();
    for &t in &l.cfg.targets {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = fm_check(&mut rng, t, l.cfg.cases, c.tol)?;
        let name = serde_json::to_value(t).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let verdict = if r.pass() { "PASS" } else { "FAIL" };
        let _ = writeln!(report, "{verdict} region_equal tol={:e} target={name} passed={}/{}", c.tol, r.passed, r.cases);
        if !r.pass() {
            failed.push(format!("{name} cases {:?}", r.failures));
        }
    }
    emit(c.out.as_deref(), &report)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("elimination differs from closed form: {}", failed.join("; "))))
    }
}

// ------------------------------------------------------------------- dueck

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DueckTable {
    pub condition_holds: bool,
    pub fb_sum: Option<f64>,
    pub nofb_sum: f64,
    pub theorem3_sum: Option<f64>,
    pub markov_chain: bool,
    pub gain: Option<bool>,
}

pub fn dueck_table(params: &DueckParams, tol: f64) -> Result<DueckTable> {
    let law = &params.noise_law;
    let condition_holds = dueck_condition_holds(law)?;
    let nofb_sum = dueck_capacity(law, DueckWhich::Nofeedback)?.sum_rate_max()?.value;
    let markov_chain = z_markov_chain_holds(law)?;
    let (fb_sum, theorem3_sum) = if condition_holds {
        let fb = dueck_capacity(law, DueckWhich::Feedback)?.sum_rate_max()?.value;
        let th = dueck_theorem3_region(&make_dueck(params)?)?.sum_rate_max()?.value;
        (Some(fb), Some(th))
    } else {
        (None, None)
    };
    let gain = fb_sum.map(|f| f > nofb_sum + tol);
    Ok(DueckTable { condition_holds, fb_sum, nofb_sum, theorem3_sum, markov_chain, gain })
}

impl DueckTable {
    pub fn csv(&self, header: &str) -> String {
        let num = |x: Option<f64>| x.map(sig9).unwrap_or_else(|| "NA".into());
        let flag = |x: Option<bool>| x.map(|b| b.to_string()).unwrap_or_else(|| "NA".into());
        let mut s = String::from(header);
        s.push_str("quantity,value\n");
        let _ = writeln!(s, "condition_holds,{}", self.condition_holds);
        let _ = writeln!(s, "fb_sum,{}", num(self.fb_sum));
        let _ = writeln!(s, "nofb_sum,{}", sig9(self.nofb_sum));
        let _ = writeln!(s, "theorem3_sum,{}", num(self.theorem3_sum));
        let _ = writeln!(s, "markov_chain,{}", self.markov_chain);
        let _ = writeln!(s, "gain,{}", flag(self.gain));
        s
    }
}

fn dueck(c: &Common) -> Result<()> {
    let l = load_or(c, || {
        Ok(DueckParams { noise_law: dueck_correlated_noise(), feedback: crate::channels::FeedbackConfig::Noiseless })
    })?;
    let t = dueck_table(&l.cfg, c.tol)?;
    emit(c.out.as_deref(), &t.csv(&csv_header(&l.cfg, c.seed)))?;
    match t.gain {
        Some(g) if g == t.markov_chain => Err(CliError::Check(format!(
            "gain={g} but markov_chain={}; expected a gap exactly when the chain fails",
            t.markov_chain
        ))),
        _ => Ok(()),
    }
}

// --------------------------------------------------------------- blackwell

pub fn blackwell_grid_default() -> GridSpec {
    let mut g = GridSpec::alpha_beta(200);
    g.params.push(GridParam { name: "p".into(), lo: 0.0, hi: 0.45, steps: 10 });
    g
}

/// Figure data rows `p, fb_lower, nofb_upper, fb_cutset`.
pub fn blackwell_sweep(grid: &GridSpec) -> Result<Vec<crate::regions::BlackwellBounds>> {
    let ps = match grid.param("p") {
        Some(_) => grid.values("p", 10)?,
        None => blackwell_grid_default().values("p", 10)?,
    };
    ps.iter().map(|&p| Ok(blackwell_bounds(p, grid)?)).collect()
}

fn blackwell(c: &Common) -> Result<()> {
    let l = load_or(c, || Ok(blackwell_grid_default()))?;
    let rows = blackwell_sweep(&l.cfg)?;
    let mut s = csv_header(&l.cfg, c.seed);
    s.push_str("p,fb_lower,nofb_upper,fb_cutset\n");
    for r in &rows {
        let _ = writeln!(s, "{},{},{},{}", sig9(r.p), sig9(r.fb_lower), sig9(r.nofb_upper), sig9(r.fb_cutset));
    }
    emit(c.out.as_deref(), &s)?;
    let bad: Vec<String> = rows.iter().filter(|r| r.fb_lower > r.fb_cutset + c.tol).map(|r| sig9(r.p)).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("fb_lower exceeds fb_cutset at p = {}", bad.join(", "))))
    }
}

// ------------------------------------------------------------ simulations

fn simulate(c: &Common) -> Result<()> {
    let path = c.config.as_ref().ok_or_else(|| CliError::Config("simulate needs --config".into()))?;
    let l: Loaded<ExperimentConfig> = load(path)?;
    let mut cfg = l.cfg;
    cfg.seed = require_seed(c, &l.raw)?;
    let rows = run_experiment(&cfg, c.workers)?;
    emit(c.out.as_deref(), &results_csv(&cfg, &rows))
}

fn lemmas(c: &Common) -> Result<()> {
    let l = match &c.config {
        Some(p) => load::<LemmaSuite>(p)?,
        None => {
            let seed = c.seed.ok_or_else(|| CliError::Config("a seed is required: pass --seed".into()))?;
            let cfg = LemmaSuite::standard(seed)?;
            Loaded { raw: serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?, cfg }
        }
    };
    let mut suite = l.cfg;
    suite.seed = require_seed(c, &l.raw)?;
    let rows = suite.run(c.workers)?;
    emit(c.out.as_deref(), &suite.csv(&rows))
}
