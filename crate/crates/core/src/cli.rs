//! Command-line front end. Every command prints one JSON document on stdout
//! that embeds the [`RunManifest`] it was produced from.
//!
//! Exit codes: 0 ok, 1 inequality violated beyond slack, 2 bad input,
//! 3 unknown backend or level, 4 requested region is empty.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::codec::{self, CodecError, CompressorBackend, QuantizedScalar, TupleDataset, DEFAULT_BACKEND_ID};
use crate::datasets::GeneratorSpec;
use crate::decomposition::{self, DecompositionConfig, DecompositionError};
use crate::estimator;
use crate::lightcone::{self, CausalRegion, CoordinateSubset, FilterMode, LightconeError, RegionTag};
use crate::manifest::RunManifest;
use crate::plot;

#[derive(Debug, Parser)]
#[command(
    name = "kdecomp",
    version,
    about = "Compression-based complexity estimates, projection decompositions and light-cone filters"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the complexity of a dataset file or generated dataset.
    Estimate(EstimateArgs),
    /// Compare a dataset's estimate with the sum over its column projections.
    Decompose(DecomposeArgs),
    /// Report residuals of the normalized projection sums for growing column counts.
    Probe(ProbeArgs),
    /// Estimate every coordinate projection of light-cone regions.
    Lightcone(LightconeArgs),
    /// Apply a low-pass or high-pass complexity filter to light-cone regions.
    Filter(FilterArgs),
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    /// Compressor backend id.
    #[arg(long, env = "KDECOMP_BACKEND", default_value = DEFAULT_BACKEND_ID)]
    pub backend: String,
    /// Compression level; defaults to the backend's strongest setting.
    #[arg(long)]
    pub level: Option<u32>,
}

impl BackendArgs {
    fn resolve(&self) -> Result<CompressorBackend, CliError> {
        let backend = match self.level {
            Some(level) => CompressorBackend::new(&self.backend, level),
            None => CompressorBackend::with_default_level(&self.backend)?,
        };
        codec::Registry::global().resolve(&backend)?;
        Ok(backend)
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV or JSON dataset file.
    #[arg(conflicts_with = "generate", required_unless_present = "generate")]
    pub input: Option<PathBuf>,
    /// Generate the dataset instead: constant:N, alternating:N, random:N,
    /// hypercube:n=N,m=M or curve:n=N (N may be written as 2^20).
    #[arg(long)]
    pub generate: Option<GeneratorSpec>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the first line of a CSV input.
    #[arg(long)]
    pub header: bool,
}

impl InputArgs {
    fn load(&self) -> Result<TupleDataset, CliError> {
        match (&self.generate, &self.input) {
            (Some(spec), _) => spec.generate(self.seed).map_err(CliError::Input),
            (None, Some(path)) => codec::read_dataset(path, self.header).map_err(CliError::Input),
            (None, None) => Err(CliError::Usage("an input file or --generate is required".into())),
        }
    }

    fn describe(&self, m: RunManifest) -> RunManifest {
        let m = match (&self.generate, &self.input) {
            (Some(spec), _) => m.param("generate", spec.to_string()),
            (None, Some(path)) => m
                .param("input", path.display().to_string())
                .param("header", self.header),
            (None, None) => m,
        };
        m.param("seed", self.seed)
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Comma-separated non-zero coefficients, one per column (default all 1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Slack constants c1,c2: slack = c1 * log2(m) + c2 bytes.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "8,64")]
    pub slack: Vec<f64>,
    /// Program upper bound M in bytes; enables the upper-bound check.
    #[arg(long)]
    pub program_bound: Option<f64>,
    /// Also write the per-projection rows to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Increasing column counts, each at least 2.
    #[arg(long, value_delimiter = ',', default_value = "10,30,100")]
    pub n_schedule: Vec<usize>,
    /// Rows per generated hypercube dataset.
    #[arg(long, default_value_t = 3000)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub backend: BackendArgs,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    /// Number of probe points.
    #[arg(long, default_value_t = lightcone::DEFAULT_POINTS)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Half-width of the "on the cone" band.
    #[arg(long, default_value = "0")]
    pub epsilon: QuantizedScalar,
    #[command(flatten)]
    pub backend: BackendArgs,
}

#[derive(Debug, Args)]
pub struct LightconeArgs {
    #[command(flatten)]
    pub cloud: CloudArgs,
    #[arg(long, value_delimiter = ',', default_value = "full,inside,outside")]
    pub regions: Vec<RegionTag>,
    /// Write one SVG scatter plot per region and coordinate pair into this directory.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Write the projected coordinates of every region as CSV into this directory.
    #[arg(long)]
    pub scatter_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub mode: FilterMode,
    /// Threshold in compressed bytes.
    #[arg(long)]
    pub threshold: u64,
    #[command(flatten)]
    pub cloud: CloudArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(CodecError),
    #[error("backend: {0}")]
    Backend(CodecError),
    #[error(transparent)]
    Decomposition(DecompositionError),
    #[error("{0}")]
    EmptyRegion(LightconeError),
    #[error("{0}")]
    Io(String),
    #[error("the decomposition inequality is violated beyond the slack")]
    Violated(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Violated(_) => 1,
            Self::Usage(_) | Self::Input(_) | Self::Decomposition(_) | Self::Io(_) => 2,
            Self::Backend(_) => 3,
            Self::EmptyRegion(_) => 4,
        }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::UnknownBackend(_) | CodecError::InvalidLevel { .. } | CodecError::Backend { .. } => {
                Self::Backend(e)
            }
            other => Self::Input(other),
        }
    }
}

impl From<DecompositionError> for CliError {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::Codec(c) => c.into(),
            other => Self::Decomposition(other),
        }
    }
}

impl From<LightconeError> for CliError {
    fn from(e: LightconeError) -> Self {
        match e {
            LightconeError::Codec(c) => c.into(),
            LightconeError::Decomposition(d) => d.into(),
            LightconeError::EmptyRegion(_) => Self::EmptyRegion(e),
            LightconeError::NoPoints | LightconeError::ZeroThreshold | LightconeError::UnknownSubset(_) => {
                Self::Usage(e.to_string())
            }
        }
    }
}

fn backend_params(m: RunManifest, backend: &CompressorBackend) -> RunManifest {
    m.param("backend", backend.id.as_str()).param("level", backend.level)
}

fn document(manifest: RunManifest, key: &str, body: impl Serialize) -> Result<Value, CliError> {
    let body = serde_json::to_value(body).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(json!({ "manifest": manifest, key: body }))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A failed run. A violated inequality still carries the document it refers to.
#[derive(Debug)]
pub struct RunFailure {
    pub error: CliError,
    pub document: Option<Value>,
}

fn bare(error: CliError) -> Box<RunFailure> {
    Box::new(RunFailure { error, document: None })
}

/// Executes a command and returns the document the binary prints.
pub fn run(cli: &Cli) -> Result<Value, Box<RunFailure>> {
    match &cli.command {
        Command::Estimate(a) => estimate_cmd(a).map_err(bare),
        Command::Decompose(a) => decompose_cmd(a),
        Command::Probe(a) => probe_cmd(a).map_err(bare),
        Command::Lightcone(a) => lightcone_cmd(a).map_err(bare),
        Command::Filter(a) => filter_cmd(a).map_err(bare),
    }
}

fn estimate_cmd(a: &EstimateArgs) -> Result<Value, CliError> {
    let backend = a.backend.resolve()?;
    let d = a.input.load()?;
    let blob = codec::encode(&d);
    let e = estimator::estimate_blob(&blob, &backend)?;
    let manifest = backend_params(a.input.describe(RunManifest::new("estimate")), &backend).hash_input(blob.payload());
    document(manifest, "estimate", e)
}

fn decompose_cmd(a: &DecomposeArgs) -> Result<Value, Box<RunFailure>> {
    let backend = a.backend.resolve().map_err(bare)?;
    if a.slack.len() != 2 {
        return Err(bare(CliError::Usage("--slack takes exactly two values c1,c2".into())));
    }
    if let Some(c) = &a.coeffs {
        decomposition::validate_coefficients(c).map_err(|e| bare(e.into()))?;
    }
    let d = a.input.load().map_err(bare)?;
    let cfg = DecompositionConfig {
        coefficients: a.coeffs.clone(),
        program_bound: a.program_bound,
        slack_log: a.slack[0],
        slack_const: a.slack[1],
    };
    let report = decomposition::verify_decomposition(&d, &cfg, &backend).map_err(|e| bare(e.into()))?;
    if let Some(path) = &a.csv {
        let coeffs = cfg.coefficients_for(d.n_cols()).map_err(|e| bare(e.into()))?;
        let mut out = String::from("dropped_col,coefficient,k_hat,raw_len\n");
        for (p, c) in report.per_projection.iter().zip(coeffs) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.spec.dropped_cols[0], c, p.estimate.k_hat, p.estimate.raw_len
            ));
        }
        write_file(path, out.as_bytes()).map_err(bare)?;
    }
    let mut manifest = a.input.describe(RunManifest::new("decompose"));
    manifest = backend_params(manifest, &backend)
        .param("coeffs", cfg.coefficients.clone().map_or(Value::Null, Value::from))
        .param("slack", vec![cfg.slack_log, cfg.slack_const])
        .param("program_bound", cfg.program_bound.map_or(Value::Null, Value::from))
        .hash_input(codec::encode(&d).payload());
    let lower_ok = report.lower_ok;
    let doc = document(manifest, "report", report).map_err(bare)?;
    if lower_ok {
        Ok(doc)
    } else {
        Err(Box::new(RunFailure {
            error: CliError::Violated("lower bound".into()),
            document: Some(doc),
        }))
    }
}

fn probe_cmd(a: &ProbeArgs) -> Result<Value, CliError> {
    let backend = a.backend.resolve()?;
    let (m, seed) = (a.m, a.seed);
    let points = decomposition::convergence_probe(
        |n| Ok(crate::datasets::hypercube(n, m, seed)?),
        &a.n_schedule,
        &DecompositionConfig::default(),
        &backend,
    )?;
    let manifest = backend_params(RunManifest::new("probe"), &backend)
        .param("n_schedule", a.n_schedule.clone())
        .param("m", m)
        .param("seed", seed);
    document(manifest, "residuals", points)
}

fn cloud_manifest(
    command: &str,
    c: &CloudArgs,
    backend: &CompressorBackend,
    cloud: &lightcone::ProbeCloud,
) -> RunManifest {
    backend_params(
        RunManifest::new(command)
            .param("m", c.m)
            .param("seed", c.seed)
            .param("epsilon", c.epsilon.to_f64()),
        backend,
    )
    .hash_input(codec::encode(&cloud.points).payload())
}

fn lightcone_cmd(a: &LightconeArgs) -> Result<Value, CliError> {
    let backend = a.cloud.backend.resolve()?;
    let cloud = lightcone::generate_cloud(a.cloud.m, a.cloud.seed)?;
    let mut reports = Vec::with_capacity(a.regions.len());
    for &tag in &a.regions {
        let region = CausalRegion::new(tag, a.cloud.epsilon);
        reports.push(lightcone::study(&cloud, &region, &backend)?);
    }
    if a.plot.is_some() || a.scatter_csv.is_some() {
        for &tag in &a.regions {
            let subset = lightcone::region_subset(&cloud, &CausalRegion::new(tag, a.cloud.epsilon));
            if let Some(dir) = &a.plot {
                create_dir(dir)?;
                for pair in CoordinateSubset::pairs() {
                    let projected = decomposition::project(&subset, &pair.projection())?;
                    let name = pair.name();
                    let svg = plot::scatter_svg(
                        &projected,
                        &format!("{tag}: {name} (m = {})", projected.m_rows()),
                        &name[..1],
                        &name[1..],
                    );
                    write_file(&dir.join(format!("{tag}_{name}.svg")), svg.as_bytes())?;
                }
            }
            if let Some(dir) = &a.scatter_csv {
                create_dir(dir)?;
                for s in CoordinateSubset::ALL.into_iter().filter(|s| s.dims() < 4) {
                    let projected = decomposition::project(&subset, &s.projection())?;
                    let mut out = s.name().chars().map(String::from).collect::<Vec<_>>().join(",");
                    out.push('\n');
                    for row in projected.rows() {
                        let line: Vec<String> = row.iter().map(ToString::to_string).collect();
                        out.push_str(&line.join(","));
                        out.push('\n');
                    }
                    write_file(&dir.join(format!("{tag}_{}.csv", s.name())), out.as_bytes())?;
                }
            }
        }
    }
    let regions: Vec<&str> = a.regions.iter().map(|r| r.as_str()).collect();
    let manifest = cloud_manifest("lightcone", &a.cloud, &backend, &cloud).param("regions", regions);
    document(manifest, "reports", reports)
}

fn filter_cmd(a: &FilterArgs) -> Result<Value, CliError> {
    if a.threshold == 0 {
        return Err(CliError::Usage("--threshold must be positive".into()));
    }
    let backend = a.cloud.backend.resolve()?;
    let cloud = lightcone::generate_cloud(a.cloud.m, a.cloud.seed)?;
    let outcome = lightcone::complexity_filter(a.mode, &cloud, a.cloud.epsilon, a.threshold, &backend)?;
    let manifest = cloud_manifest("filter", &a.cloud, &backend, &cloud)
        .param("mode", serde_json::to_value(a.mode).unwrap_or(Value::Null))
        .param("threshold", a.threshold);
    document(manifest, "filter", outcome)
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let print = |doc: &Value| {
        let mut stdout = std::io::stdout().lock();
        let _ = serde_json::to_writer_pretty(&mut stdout, doc);
        let _ = writeln!(stdout);
    };
    match run(&cli) {
        Ok(doc) => {
            print(&doc);
            0
        }
        Err(failure) => {
            if let Some(doc) = &failure.document {
                print(doc);
            }
            eprintln!("kdecomp: {}", failure.error);
            failure.error.exit_code()
        }
    }
}
