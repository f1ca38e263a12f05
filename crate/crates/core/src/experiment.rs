//! Parameter sweeps over dimension and noise strength, with CSV/JSON output
//! and the command-line front end.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Convention;
use crate::noise::{ChannelDescriptor, NoiseVariant, ProductMode};
use crate::protocol::{run_protocol, CorrectionScheme, NoiseSpec, NoiseTargets, ProtocolConfig};
use crate::states::{random_pure_state, read_state_file, uniform_state, PureState};

pub const CSV_HEADER: [&str; 11] = [
    "d",
    "p",
    "noise_variant",
    "noise_mode",
    "correction_scheme",
    "input_spec",
    "seed",
    "avg_fidelity",
    "min_outcome_fidelity",
    "runtime_ms",
    "expected_trigger_probability",
];

/// Dimensions at or above this trigger a runtime warning.
pub const LARGE_DIMENSION: usize = 16;
const GRID_STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSpec {
    Uniform,
    /// `count` instances seeded `base_seed`, `base_seed + 1`, ...
    Random {
        count: usize,
        base_seed: u64,
    },
    File(PathBuf),
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSpec::Uniform => f.write_str("uniform"),
            InputSpec::Random { count, base_seed } => write!(f, "random:{count}:{base_seed}"),
            InputSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

impl FromStr for InputSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(InputSpec::Uniform);
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let bad = || Error::Config(format!("invalid input spec {s:?}, expected random:N:SEED"));
            let (n, seed) = rest.split_once(':').ok_or_else(bad)?;
            let count: usize = n.parse().map_err(|_| bad())?;
            let base_seed: u64 = seed.parse().map_err(|_| bad())?;
            if count == 0 {
                return Err(Error::Config("random input count must be at least 1".into()));
            }
            return Ok(InputSpec::Random { count, base_seed });
        }
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(Error::Config("empty path in file input spec".into()));
            }
            return Ok(InputSpec::File(PathBuf::from(path)));
        }
        Err(Error::Config(format!(
            "invalid input spec {s:?}, expected uniform, random:N:SEED or file:PATH"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Inclusive grid `start:end:step`.
pub fn parse_p_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("invalid p-grid {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:end:step"));
    }
    let mut nums = [0.0; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| bad("not a number"))?;
    }
    let [start, end, step] = nums;
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) {
        return Err(bad("endpoints must lie in [0, 1]"));
    }
    if end < start {
        return Err(bad("end is below start"));
    }
    if start == end {
        return Ok(vec![start]);
    }
    if step.is_nan() || step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    let ratio = (end - start) / step;
    let n = ratio.round();
    if (ratio - n).abs() > GRID_STEP_TOL {
        return Err(bad("step does not divide the range"));
    }
    let n = n as usize;
    Ok((0..=n).map(|k| start + (end - start) * k as f64 / n as f64).collect())
}

/// Comma-separated dimension list, sorted and de-duplicated.
pub fn parse_dims(text: &str) -> Result<Vec<usize>> {
    let mut dims = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid dimension {s:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    dims.sort_unstable();
    dims.dedup();
    Ok(dims)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub input: InputSpec,
    pub noise_variant: NoiseVariant,
    pub noise_mode: ProductMode,
    pub noise_targets: NoiseTargets,
    pub correction: CorrectionScheme,
    /// Conversion efficiency; reported only, never applied to fidelities.
    pub eta: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Record wall-clock time per grid point. Off by default so that output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4, 5, 8],
            p_grid: parse_p_grid("0:1:0.1").expect("default grid parses"),
            input: InputSpec::Uniform,
            noise_variant: NoiseVariant::Weyl,
            noise_mode: ProductMode::Independent,
            noise_targets: NoiseTargets::Both,
            correction: CorrectionScheme::DerivedExact,
            eta: None,
            out: None,
            format: OutputFormat::Csv,
            timing: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Config("no dimensions given".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::Config(format!("dimension {d} is below 2")));
        }
        if self.p_grid.is_empty() {
            return Err(Error::Config("empty p-grid".into()));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("p = {p} is outside [0, 1]")));
        }
        if let Some(eta) = self.eta {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::Config(format!("eta = {eta} is outside [0, 1]")));
            }
        }
        if let CorrectionScheme::Custom(_) = self.correction {
            return Err(Error::Config(
                "custom correction tables are not supported in sweeps".into(),
            ));
        }
        Ok(())
    }

    /// Stderr warnings for slow configurations.
    pub fn warnings(&self) -> Vec<String> {
        self.dims
            .iter()
            .filter(|&&d| d >= LARGE_DIMENSION)
            .map(|d| format!("warning: d = {d} enumerates every noise branch exactly and may take a long time"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    pub p: f64,
    pub noise_variant: NoiseVariant,
    pub noise_mode: ProductMode,
    pub correction_scheme: String,
    pub input_spec: String,
    /// Seed of the random input instance; absent for uniform and file inputs.
    pub seed: Option<u64>,
    pub avg_fidelity: f64,
    pub min_outcome_fidelity: f64,
    pub runtime_ms: f64,
    pub expected_trigger_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn instances(config: &SweepConfig, d: usize) -> Result<Vec<(Option<u64>, PureState)>> {
    match &config.input {
        InputSpec::Uniform => Ok(vec![(None, uniform_state(d))]),
        InputSpec::Random { count, base_seed } => Ok((0..*count as u64)
            .map(|k| {
                let seed = base_seed.wrapping_add(k);
                (Some(seed), random_pure_state(d, seed))
            })
            .collect()),
        InputSpec::File(path) => {
            let state = read_state_file(path)?;
            if state.dim() != d {
                return Err(Error::Config(format!(
                    "input file {} holds a d = {} state but the sweep includes d = {d}",
                    path.display(),
                    state.dim()
                )));
            }
            Ok(vec![(None, state)])
        }
    }
}

/// Runs every (d, p, input instance) point. Rows come out ordered by d, p and
/// seed whatever the thread count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &d in &config.dims {
        let inputs = instances(config, d)?;
        for &p in &config.p_grid {
            for (seed, state) in &inputs {
                jobs.push((d, p, *seed, state.clone()));
            }
        }
    }

    let input_spec = config.input.to_string();
    let mut rows = jobs
        .into_par_iter()
        .map(|(d, p, seed, input)| {
            let protocol = ProtocolConfig::new(input)
                .with_convention(Convention::General)
                .with_correction(config.correction.clone())
                .with_noise(NoiseSpec {
                    channel: ChannelDescriptor {
                        variant: config.noise_variant,
                        p,
                        mode: config.noise_mode,
                    },
                    targets: config.noise_targets,
                });
            let started = Instant::now();
            let result = run_protocol(&protocol)?;
            let runtime_ms = if config.timing {
                started.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            Ok(SweepRow {
                d,
                p,
                noise_variant: config.noise_variant,
                noise_mode: config.noise_mode,
                correction_scheme: config.correction.name().into(),
                input_spec: input_spec.clone(),
                seed,
                avg_fidelity: result.average_fidelity,
                min_outcome_fidelity: result.min_outcome_fidelity,
                runtime_ms,
                expected_trigger_probability: config.eta.unwrap_or(1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.d.cmp(&b.d).then(a.p.total_cmp(&b.p)).then(a.seed.cmp(&b.seed)));
    Ok(SweepResult { rows })
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn emit(result: &SweepResult, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&result.rows).expect("rows serialize");
            out.push(b'\n');
            out
        }
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(CSV_HEADER).expect("in-memory write");
            for row in &result.rows {
                writer
                    .write_record([
                        row.d.to_string(),
                        format_float(row.p),
                        row.noise_variant.name().into(),
                        row.noise_mode.name().into(),
                        row.correction_scheme.clone(),
                        row.input_spec.clone(),
                        row.seed.map(|s| s.to_string()).unwrap_or_default(),
                        format_float(row.avg_fidelity),
                        format_float(row.min_outcome_fidelity),
                        format_float(row.runtime_ms),
                        format_float(row.expected_trigger_probability),
                    ])
                    .expect("in-memory write");
            }
            writer.into_inner().expect("in-memory flush")
        }
    }
}

/// Writes to `out`, or stdout when absent.
pub fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Process exit code for an error: 3 for I/O failures, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 3,
        _ => 2,
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum GridValue {
    Range(String),
    Points(Vec<f64>),
}

/// JSON config file; every field optional.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dims: Option<Vec<usize>>,
    p_grid: Option<GridValue>,
    input: Option<String>,
    noise_variant: Option<NoiseVariant>,
    noise_mode: Option<ProductMode>,
    noise_targets: Option<NoiseTargets>,
    correction_scheme: Option<String>,
    eta: Option<f64>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    timing: Option<bool>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    fn apply(self, config: &mut SweepConfig) -> Result<()> {
        if let Some(mut dims) = self.dims {
            dims.sort_unstable();
            dims.dedup();
            config.dims = dims;
        }
        match self.p_grid {
            Some(GridValue::Range(text)) => config.p_grid = parse_p_grid(&text)?,
            Some(GridValue::Points(mut points)) => {
                points.sort_by(f64::total_cmp);
                points.dedup();
                config.p_grid = points;
            }
            None => {}
        }
        if let Some(input) = self.input {
            config.input = input.parse()?;
        }
        if let Some(v) = self.noise_variant {
            config.noise_variant = v;
        }
        if let Some(m) = self.noise_mode {
            config.noise_mode = m;
        }
        if let Some(t) = self.noise_targets {
            config.noise_targets = t;
        }
        if let Some(c) = self.correction_scheme {
            config.correction = c.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        }
        if self.eta.is_some() {
            config.eta = self.eta;
        }
        if self.out.is_some() {
            config.out = self.out;
        }
        if let Some(f) = self.format {
            config.format = f;
        }
        if let Some(t) = self.timing {
            config.timing = t;
        }
        Ok(())
    }
}

/// Teleportation fidelity sweeps over dimension and crosstalk probability.
#[derive(Debug, Clone, Parser)]
#[command(name = "nlo-teleport", version)]
pub struct Cli {
    /// Comma-separated dimensions [default: 2,3,4,5,8]
    #[arg(long)]
    pub dims: Option<String>,
    /// Inclusive grid start:end:step [default: 0:1:0.1]
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
    /// uniform | random:N:SEED | file:PATH [default: uniform]
    #[arg(long)]
    pub input: Option<String>,
    /// shift | phase | weyl [default: weyl]
    #[arg(long)]
    pub noise: Option<String>,
    /// independent | correlated [default: independent]
    #[arg(long = "noise-mode")]
    pub noise_mode: Option<String>,
    /// a1,a2 | a2 | a1 [default: a1,a2]
    #[arg(long = "noise-targets")]
    pub noise_targets: Option<String>,
    /// paper-weyl | derived-exact [default: derived-exact]
    #[arg(long)]
    pub correction: Option<String>,
    /// Conversion efficiency, reported as expected_trigger_probability
    #[arg(long)]
    pub eta: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// JSON config file; flags given on the command line take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fill runtime_ms with measured wall-clock time instead of 0
    #[arg(long)]
    pub timing: bool,
}

impl Cli {
    pub fn into_config(self) -> Result<SweepConfig> {
        let mut config = SweepConfig::default();
        if let Some(path) = &self.config {
            FileConfig::load(path)?.apply(&mut config)?;
        }
        let cfg_err = |e: Error| Error::Config(e.to_string());
        if let Some(dims) = &self.dims {
            config.dims = parse_dims(dims)?;
        }
        if let Some(grid) = &self.p_grid {
            config.p_grid = parse_p_grid(grid)?;
        }
        if let Some(input) = &self.input {
            config.input = input.parse()?;
        }
        if let Some(noise) = &self.noise {
            config.noise_variant = noise.parse().map_err(cfg_err)?;
        }
        if let Some(mode) = &self.noise_mode {
            config.noise_mode = mode.parse().map_err(cfg_err)?;
        }
        if let Some(targets) = &self.noise_targets {
            config.noise_targets = targets.parse().map_err(cfg_err)?;
        }
        if let Some(correction) = &self.correction {
            config.correction = correction.parse().map_err(cfg_err)?;
        }
        if self.eta.is_some() {
            config.eta = self.eta;
        }
        if self.out.is_some() {
            config.out = self.out;
        }
        if let Some(format) = self.format {
            config.format = format;
        }
        if self.timing {
            config.timing = true;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Parses a full argument vector (program name first).
pub fn parse_cli<I, T>(argv: I) -> Result<SweepConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Config(e.to_string()))?;
    cli.into_config()
}
