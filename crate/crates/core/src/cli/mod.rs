//! Command-line front end.
//!
//! A run reads one [`RunConfig`] (a file or a named preset), executes a single
//! mode and writes its artifacts plus a `manifest.json` into the output
//! directory. Failures print `{"error": {"code", "message"}}` to stderr.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{
    preset, preset_names, CavityConfig, Mode, OracleConfig, RunConfig, ScanConfig, SigmaMapConfig,
    SignalConfig, Spacing, SweepAxis, SweepParameter, SCHEMA_VERSION,
};
pub use output::{write_atomic, Cell, Format, MatrixFile, Table};

use crate::cavity::{comb, sigma, CavityParams, CombParams};
use crate::error::Error;
use crate::filter::{
    conditional_output_with, design_superposition, entangled_target, two_mode_conditional_output,
    ConditionalResult, FilterInput, FilterMode,
};
use crate::fock::{
    coherent_fock_vector, fidelity_with_pure, partial_trace, photon_number_distribution, purity,
    DensityMatrix, FockVector,
};
use crate::oracle::{equivalence_campaign, CampaignConfig};
use crate::tomography::{sample_scan, scan_distribution};

/// Signal states whose truncated norm falls short of one by more than this get a warning.
const TRUNCATION_WARN: f64 = 1e-6;

pub const THREADS_ENV: &str = "PHOTON_FILTER_THREADS";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("oracle campaign failed: max rho deviation {max_rho_deviation:e}, max p_on deviation {max_p_on_deviation:e}")]
    OracleMismatch {
        max_rho_deviation: f64,
        max_p_on_deviation: f64,
    },
}

impl RunError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config_error",
            RunError::Engine(e) => e.code(),
            RunError::Io { .. } => "io_error",
            RunError::OracleMismatch { .. } => "oracle_mismatch",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Engine(_) => 3,
            RunError::Io { .. } => 4,
            RunError::OracleMismatch { .. } => 5,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": {
                "code": self.code(),
                "message": self.to_string(),
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub format: Format,
    pub filter_mode: FilterMode,
    pub preset: Option<String>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out_dir: PathBuf::from("out"),
            format: Format::Csv,
            filter_mode: FilterMode::Exact,
            preset: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub library_version: &'static str,
    pub mode: Mode,
    pub preset: Option<String>,
    pub filter_mode: FilterMode,
    pub seed: u64,
    pub config: RunConfig,
    pub cavity: Option<CavityParams>,
    pub comb: Option<CombParams>,
    pub results: serde_json::Value,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

/// Artifacts of one mode before they are written.
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    results: serde_json::Value,
    warnings: Vec<String>,
    failure: Option<RunError>,
}

impl Artifacts {
    fn new(results: serde_json::Value) -> Self {
        Artifacts {
            files: Vec::new(),
            results,
            warnings: Vec::new(),
            failure: None,
        }
    }

    fn table(&mut self, stem: &str, table: &Table, format: Format) {
        self.files.push((
            format!("{stem}.{}", format.extension()),
            table.render(format),
        ));
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        self.files
            .push((name.to_string(), output::to_json_bytes(value)));
    }
}

/// Signal density matrix and, when it is pure, its state vector.
fn signal_state(
    signal: &SignalConfig,
    n_trunc: Option<usize>,
    warnings: &mut Vec<String>,
) -> Result<(DensityMatrix, Option<FockVector>), RunError> {
    let need = || n_trunc.ok_or_else(|| RunError::Config("signal requires `n_trunc`".into()));
    let coherent = |beta, n, warnings: &mut Vec<String>| -> Result<_, RunError> {
        let psi = coherent_fock_vector(beta, n)?;
        let loss = 1.0 - psi.norm_sqr();
        if loss > TRUNCATION_WARN {
            warnings.push(format!(
                "signal truncation at {n} levels drops norm {loss:e}; raise n_trunc"
            ));
        }
        Ok((DensityMatrix::from_pure(&psi), Some(psi)))
    };
    match signal {
        SignalConfig::Coherent { beta } => coherent(*beta, need()?, warnings),
        SignalConfig::Superposition { .. } => {
            let spec = signal.superposition_spec().expect("superposition signal");
            coherent(design_superposition(&spec)?, need()?, warnings)
        }
        SignalConfig::Fock { n } => {
            let psi = FockVector::basis(*n, need()?)?;
            Ok((DensityMatrix::from_pure(&psi), Some(psi)))
        }
        SignalConfig::Custom { path } => {
            let rho = MatrixFile::read(path)?;
            if rho.n_modes() != 1 {
                return Err(Error::NotSingleMode(rho.n_modes()).into());
            }
            if let Some(n) = n_trunc {
                if n != rho.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: rho.dim(),
                    }
                    .into());
                }
            }
            Ok((rho, None))
        }
    }
}

/// Fidelity target: the designed superposition, else `|n*>` when the comb has an integer `n*`.
fn single_mode_target(
    signal: &SignalConfig,
    params: &CavityParams,
    n_trunc: usize,
) -> Result<Option<(FockVector, String)>, RunError> {
    if let Some(spec) = signal.superposition_spec() {
        let label = format!(
            "(|{}> + e^(i {})|{}>)/sqrt(2)",
            spec.n_star,
            spec.phase,
            spec.n_star + spec.l_star
        );
        return Ok(Some((spec.target_state(n_trunc)?, label)));
    }
    match comb(params).integer_n_star() {
        Some(n) if n < n_trunc => Ok(Some((FockVector::basis(n, n_trunc)?, format!("|{n}>")))),
        _ => Ok(None),
    }
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map_or(0, |(i, _)| i)
}

fn distribution_table(dist: &[f64]) -> Table {
    let mut t = Table::new(&["n", "probability"]);
    for (n, p) in dist.iter().enumerate() {
        t.push(vec![Cell::Int(n as u64), Cell::Real(*p)]);
    }
    t
}

fn warning_strings(result: &ConditionalResult) -> Vec<String> {
    result.warnings.iter().map(|w| w.to_string()).collect()
}

fn prepare(config: &RunConfig, opts: &RunOptions) -> Result<Artifacts, RunError> {
    let params = config.cavity()?;
    let signal = config.signal()?;
    if config.mode == Mode::PrepareSuperposition && signal.superposition_spec().is_none() {
        return Err(RunError::Config(
            "prepare-superposition requires a `superposition` signal".into(),
        ));
    }
    let mut warnings = Vec::new();
    let (nu, _) = signal_state(signal, config.n_trunc, &mut warnings)?;
    let n_trunc = nu.dim();
    let input = FilterInput::new(nu, config.alpha()?, params)?;
    let result = conditional_output_with(&input, opts.filter_mode)?;
    warnings.extend(warning_strings(&result));

    let dist = photon_number_distribution(&result.rho_out)?;
    let target = single_mode_target(signal, &params, n_trunc)?;
    let fidelity = match &target {
        Some((psi, _)) => Some(fidelity_with_pure(&result.rho_out, psi)?),
        None => None,
    };
    let threshold_met = match (fidelity, config.fidelity_threshold) {
        (Some(f), Some(t)) => Some(f >= t),
        _ => None,
    };
    let mean_n: f64 = dist.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let results = serde_json::json!({
        "p_on": result.p_on,
        "normalizer": result.normalizer,
        "purity": purity(&result.rho_out),
        "fidelity": fidelity,
        "fidelity_target": target.as_ref().map(|(_, label)| label.clone()),
        "fidelity_threshold": config.fidelity_threshold,
        "threshold_met": threshold_met,
        "argmax_n": argmax(&dist),
        "mean_n": mean_n,
        "n_trunc": n_trunc,
    });
    let mut art = Artifacts::new(results);
    art.warnings = warnings;
    art.table("distribution", &distribution_table(&dist), opts.format);
    art.json("density_matrix.json", &MatrixFile::from(&result.rho_out));
    Ok(art)
}

fn entangle(config: &RunConfig, opts: &RunOptions) -> Result<Artifacts, RunError> {
    let params = config.cavity()?;
    let signal2 = config
        .signal2
        .as_ref()
        .ok_or_else(|| config.missing("signal2"))?;
    let mut warnings = Vec::new();
    let (nu1, psi1) = signal_state(config.signal()?, config.n_trunc, &mut warnings)?;
    let (nu2, psi2) = signal_state(signal2, config.n_trunc, &mut warnings)?;
    let result =
        two_mode_conditional_output(&nu1, &nu2, config.alpha()?, &params, opts.filter_mode)?;
    warnings.extend(warning_strings(&result));

    let n_star = comb(&params).integer_n_star();
    let fidelity = match (&psi1, &psi2, n_star) {
        (Some(a), Some(b), Some(n)) => {
            let target = entangled_target(a, b, n)?.normalized()?;
            Some(fidelity_with_pure(&result.rho_out, &target)?)
        }
        _ => None,
    };
    let marginals = [
        partial_trace(&result.rho_out, 0)?,
        partial_trace(&result.rho_out, 1)?,
    ];
    let results = serde_json::json!({
        "p_on": result.p_on,
        "normalizer": result.normalizer,
        "purity": purity(&result.rho_out),
        "fidelity": fidelity,
        "fidelity_target": n_star.map(|n| format!("sum_k psi1_k psi2_(n-k) |k, n-k>, n = {n}")),
        "fidelity_threshold": config.fidelity_threshold,
        "threshold_met": fidelity.zip(config.fidelity_threshold).map(|(f, t)| f >= t),
        "marginal_purity": [purity(&marginals[0]), purity(&marginals[1])],
        "mode_dims": result.rho_out.mode_dims(),
    });
    let mut art = Artifacts::new(results);
    art.warnings = warnings;
    for (k, m) in marginals.iter().enumerate() {
        let dist = photon_number_distribution(m)?;
        art.table(
            &format!("distribution_mode{k}"),
            &distribution_table(&dist),
            opts.format,
        );
    }
    art.json("density_matrix.json", &MatrixFile::from(&result.rho_out));
    Ok(art)
}

fn scan(config: &RunConfig, opts: &RunOptions) -> Result<Artifacts, RunError> {
    let params = config.cavity()?;
    let scan_cfg = config.scan.ok_or_else(|| config.missing("scan"))?;
    let alpha = config.alpha()?;
    let mut warnings = Vec::new();
    let (nu, _) = signal_state(config.signal()?, config.n_trunc, &mut warnings)?;
    let exact = scan_distribution(&nu, alpha, &params, scan_cfg.n_max)?;
    let records = if scan_cfg.shots == 0 {
        exact.clone()
    } else {
        sample_scan(&exact, alpha, params.eta, scan_cfg.shots, config.seed)?
    };
    let truth = photon_number_distribution(&nu)?;
    let nu_true = |n: usize| truth.get(n).copied().unwrap_or(0.0);

    let mut table = Table::new(&[
        "n_star_target",
        "psi_used",
        "p_on_exact",
        "clicks",
        "shots",
        "nu_estimate",
        "nu_true",
    ]);
    let mut max_err_exact: f64 = 0.0;
    let mut max_err_sampled: f64 = 0.0;
    for (e, r) in exact.iter().zip(&records) {
        let t = nu_true(r.n_star_target);
        max_err_exact = max_err_exact.max((e.nu_estimate - t).abs());
        max_err_sampled = max_err_sampled.max((r.nu_estimate - t).abs());
        table.push(vec![
            Cell::Int(r.n_star_target as u64),
            Cell::Real(r.psi_used),
            Cell::Real(r.p_on_exact),
            Cell::Int(r.clicks),
            Cell::Int(r.shots),
            Cell::Real(r.nu_estimate),
            Cell::Real(t),
        ]);
    }
    let results = serde_json::json!({
        "n_max": scan_cfg.n_max,
        "shots": scan_cfg.shots,
        "max_abs_error_exact": max_err_exact,
        "max_abs_error_sampled": max_err_sampled,
    });
    let mut art = Artifacts::new(results);
    art.warnings = warnings;
    art.table("scan", &table, opts.format);
    Ok(art)
}

/// One row of a parameter sweep. Metrics are `None` when the detector never clicks
/// or no fidelity target exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub p_on: f64,
    pub fidelity: Option<f64>,
    pub purity: Option<f64>,
}

fn apply_axis(
    parameter: SweepParameter,
    value: f64,
    params: &CavityParams,
    alpha: crate::fock::ComplexAmplitude,
) -> (CavityParams, crate::fock::ComplexAmplitude) {
    let mut p = *params;
    let mut a = alpha;
    match parameter {
        SweepParameter::Tau => p.tau = value,
        SweepParameter::Eta => p.eta = value,
        SweepParameter::ChiT => p.chi_t = value,
        SweepParameter::Psi => p.psi = value,
        SweepParameter::AlphaAbs => a = num_complex::Complex64::from_polar(value, alpha.arg()),
    }
    (p, a)
}

/// Conditional output of the configured signal at each point of `axis`.
///
/// Points are evaluated in parallel; rows come back in axis order.
pub fn sweep(
    config: &RunConfig,
    axis: &SweepAxis,
    mode: FilterMode,
) -> Result<Vec<SweepRow>, RunError> {
    let params = config.cavity()?;
    let alpha = config.alpha()?;
    let signal = config.signal()?;
    let (nu, _) = signal_state(signal, config.n_trunc, &mut Vec::new())?;
    let n_trunc = nu.dim();
    axis.points()?
        .into_par_iter()
        .map(|value| {
            let (p, a) = apply_axis(axis.parameter, value, &params, alpha);
            let input = FilterInput::new(nu.clone(), a, p)?;
            let result = match conditional_output_with(&input, mode) {
                Ok(r) => r,
                Err(Error::NeverClicks { p_on }) => {
                    return Ok(SweepRow {
                        value,
                        p_on,
                        fidelity: None,
                        purity: None,
                    })
                }
                Err(e) => return Err(e.into()),
            };
            let fidelity = match single_mode_target(signal, &p, n_trunc)? {
                Some((psi, _)) => Some(fidelity_with_pure(&result.rho_out, &psi)?),
                None => None,
            };
            Ok(SweepRow {
                value,
                p_on: result.p_on,
                fidelity,
                purity: Some(purity(&result.rho_out)),
            })
        })
        .collect()
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&["value", "p_on", "fidelity", "purity"]);
    for r in rows {
        t.push(vec![
            Cell::Real(r.value),
            Cell::Real(r.p_on),
            r.fidelity.into(),
            r.purity.into(),
        ]);
    }
    t
}

fn sweep_mode(config: &RunConfig, opts: &RunOptions) -> Result<Artifacts, RunError> {
    let axis = config
        .sweep
        .as_ref()
        .ok_or_else(|| config.missing("sweep"))?;
    let rows = sweep(config, axis, opts.filter_mode)?;
    let results = serde_json::json!({
        "parameter": axis.parameter,
        "points": rows.len(),
        "never_clicks": rows.iter().filter(|r| r.purity.is_none()).count(),
    });
    let mut art = Artifacts::new(results);
    art.table("sweep", &sweep_table(&rows), opts.format);
    Ok(art)
}

fn validate_oracle(config: &RunConfig) -> Result<Artifacts, RunError> {
    let oc = config.oracle.unwrap_or_default();
    let report = equivalence_campaign(&CampaignConfig {
        cases: oc.cases,
        seed: config.seed,
        max_alpha: oc.max_alpha,
        max_dim: oc.max_dim,
    })?;
    let results = serde_json::json!({
        "cases": oc.cases,
        "passed": report.passed,
        "max_rho_deviation": report.max_rho_deviation,
        "max_p_on_deviation": report.max_p_on_deviation,
        "max_engine_overlap_deviation": report.max_engine_overlap_deviation,
    });
    let mut art = Artifacts::new(results);
    art.json("oracle_report.json", &report);
    if !report.passed {
        art.failure = Some(RunError::OracleMismatch {
            max_rho_deviation: report.max_rho_deviation,
            max_p_on_deviation: report.max_p_on_deviation,
        });
    }
    Ok(art)
}

fn sigma_map(config: &RunConfig, opts: &RunOptions) -> Result<Artifacts, RunError> {
    let params = config.cavity()?;
    let grid = config
        .sigma_map
        .ok_or_else(|| config.missing("sigma_map"))?;
    let axis = SweepAxis {
        parameter: SweepParameter::Psi,
        values: None,
        min: Some(grid.phi_min_over_pi),
        max: Some(grid.phi_max_over_pi),
        steps: Some(grid.steps),
        spacing: Spacing::Linear,
    };
    let phis = axis.points()?;
    let pi = std::f64::consts::PI;
    let s: Vec<f64> = phis
        .iter()
        .map(|x| sigma(x * pi, params.tau).norm())
        .collect();
    let mut table = Table::new(&["phi_over_pi", "phi_prime_over_pi", "abs_sigma_product"]);
    let mut peak: f64 = 0.0;
    for (i, x) in phis.iter().enumerate() {
        for (j, y) in phis.iter().enumerate() {
            let v = s[i] * s[j];
            peak = peak.max(v);
            table.push(vec![Cell::Real(*x), Cell::Real(*y), Cell::Real(v)]);
        }
    }
    let results = serde_json::json!({
        "tau": params.tau,
        "grid_points": phis.len(),
        "peak": peak,
    });
    let mut art = Artifacts::new(results);
    art.table("sigma_map", &table, opts.format);
    Ok(art)
}

/// Executes `config` and writes its artifacts and `manifest.json` under `opts.out_dir`.
///
/// Files are written atomically. For a failed oracle campaign the report and
/// manifest are still written before the error is returned.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<Manifest, RunError> {
    let art = match config.mode {
        Mode::PrepareFock | Mode::PrepareSuperposition => prepare(config, opts)?,
        Mode::Entangle => entangle(config, opts)?,
        Mode::ScanPon => scan(config, opts)?,
        Mode::Sweep => sweep_mode(config, opts)?,
        Mode::ValidateOracle => validate_oracle(config)?,
        Mode::SigmaMap => sigma_map(config, opts)?,
    };
    let cavity = match config.mode {
        Mode::ValidateOracle => None,
        _ => Some(config.cavity()?),
    };
    let mut manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        library_version: crate::VERSION,
        mode: config.mode,
        preset: opts.preset.clone(),
        filter_mode: opts.filter_mode,
        seed: config.seed,
        config: config.clone(),
        cavity,
        comb: cavity.as_ref().map(comb),
        results: art.results,
        warnings: art.warnings,
        files: art.files.iter().map(|(name, _)| name.clone()).collect(),
    };
    manifest.files.push("manifest.json".into());

    std::fs::create_dir_all(&opts.out_dir).map_err(|e| RunError::io(&opts.out_dir, e))?;
    for (name, bytes) in &art.files {
        write_atomic(&opts.out_dir.join(name), bytes)?;
    }
    write_atomic(
        &opts.out_dir.join("manifest.json"),
        &output::to_json_bytes(&manifest),
    )?;
    match art.failure {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "photon-filter",
    version,
    about = "Conditional Fock-state preparation by photon filtering"
)]
pub struct Args {
    /// Run configuration (JSON).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named preset; see --list-presets.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory [default: config `output_dir`, else `out`].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Format of tabular outputs.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Use the simplified detector factor that omits the relative Kerr phase.
    #[arg(long)]
    pub paper_literal: bool,
    /// Print preset names and exit.
    #[arg(long)]
    pub list_presets: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    pub show_config: bool,
}

fn thread_cap() -> Result<Option<usize>, RunError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(RunError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn execute(args: &Args) -> Result<(), RunError> {
    if args.list_presets {
        for name in preset_names() {
            println!("{name}");
        }
        return Ok(());
    }
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => RunConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        _ => {
            return Err(RunError::Config(
                "pass exactly one of --config or --preset".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.show_config {
        println!(
            "{}",
            serde_json::to_string_pretty(&config).expect("config serializes")
        );
        return Ok(());
    }
    let opts = RunOptions {
        out_dir: args
            .out
            .clone()
            .or_else(|| config.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        format: args.format,
        filter_mode: if args.paper_literal {
            FilterMode::PaperLiteral
        } else {
            FilterMode::Exact
        },
        preset: args.preset.clone(),
    };
    let job = || run(&config, &opts);
    let manifest = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Config(e.to_string()))?
            .install(job)?,
        None => job()?,
    };
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", opts.out_dir.join("manifest.json").display());
    Ok(())
}

/// Parses process arguments, runs, and maps failures to error JSON and an exit code.
pub fn main_entry() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = RunError::Config(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
