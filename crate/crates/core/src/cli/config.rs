use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::Rng;
use serde::Deserialize;

use super::CliError;
use crate::protocol::Cooperation;
use crate::security::{ProbeState, SignPattern};

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_K_MAX: usize = 10;
pub const DEFAULT_TRIALS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Send,
    TestChannel,
    Attack,
    DetectionSweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Send => "send",
            Command::TestChannel => "test-channel",
            Command::Attack => "attack",
            Command::DetectionSweep => "detection-sweep",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    Honest,
    GhzIntercept,
    Probe {
        path: PathBuf,
        probe: ProbeState,
        signs: SignPattern,
    },
}

impl SourceSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "honest" => Ok(SourceSpec::Honest),
            "ghz-intercept" => Ok(SourceSpec::GhzIntercept),
            other => match other.strip_prefix("probe:") {
                Some("") => Err(CliError::Config(
                    "probe source needs a spec file: --source probe:<path>".into(),
                )),
                Some(path) => {
                    let (probe, signs) = load_probe_spec(Path::new(path))?;
                    Ok(SourceSpec::Probe {
                        path: PathBuf::from(path),
                        probe,
                        signs,
                    })
                }
                None => Err(CliError::Config(format!(
                    "unknown source `{other}`; expected honest, ghz-intercept or probe:<path>"
                ))),
            },
        }
    }

    /// The `--source` spelling of this spec.
    pub fn label(&self) -> String {
        match self {
            SourceSpec::Honest => "honest".into(),
            SourceSpec::GhzIntercept => "ghz-intercept".into(),
            SourceSpec::Probe { path, .. } => format!("probe:{}", path.display()),
        }
    }
}

/// On-disk probe description: `eve_dimension`, eight component vectors of
/// `[re, im]` pairs indexed by `ijk`, and optional per-component signs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeFile {
    eve_dimension: usize,
    components: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    signs: Option<[i8; 8]>,
}

pub fn load_probe_spec(path: &Path) -> Result<(ProbeState, SignPattern), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read probe spec {}: {e}", path.display())))?;
    parse_probe_spec(&text)
        .map_err(|e| CliError::Config(format!("probe spec {}: {e}", path.display())))
}

pub fn parse_probe_spec(text: &str) -> Result<(ProbeState, SignPattern), CliError> {
    let file: ProbeFile =
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let components = file
        .components
        .into_iter()
        .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let probe = ProbeState::new(file.eve_dimension, components)?;
    let signs = match file.signs {
        Some(s) => SignPattern::new(s)?,
        None => SignPattern::uniform(),
    };
    Ok((probe, signs))
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub message: Option<String>,
    pub source: SourceSpec,
    pub samples: usize,
    pub seed: u64,
    pub seed_generated: bool,
    pub k_max: usize,
    pub trials: usize,
    pub cooperation: Cooperation,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn message_bits(&self) -> Option<Vec<u8>> {
        self.message
            .as_ref()
            .map(|m| m.bytes().map(|b| b - b'0').collect())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cdsc",
    version,
    about = "Controlled secure direct communication over GHZ channels"
)]
struct Cli {
    /// JSON file with default values; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Teleport a message bit by bit.
    Send(SendArgs),
    /// Run the Z-correlation and parity tests on sampled triplets.
    TestChannel(StatArgs),
    /// Analyze an attack scenario and whether the channel tests catch it.
    Attack(AttackArgs),
    /// Estimate detection probability against the number of tested triplets.
    DetectionSweep(SweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// honest | ghz-intercept | probe:<path>
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SendArgs {
    #[arg(long)]
    message: Option<String>,
    /// Charlie withholds the X-basis measurement result.
    #[arg(long)]
    no_charlie: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct StatArgs {
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct AttackArgs {
    /// Optional message to send through the attacked channel.
    #[arg(long)]
    message: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    message: Option<String>,
    source: Option<String>,
    samples: Option<usize>,
    seed: Option<u64>,
    k_max: Option<usize>,
    trials: Option<usize>,
    cooperate: Option<bool>,
    out: Option<PathBuf>,
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

fn check_message(message: &str) -> Result<(), CliError> {
    if let Some(bad) = message.chars().find(|c| *c != '0' && *c != '1') {
        return Err(CliError::Config(format!(
            "message must contain only 0 and 1, found `{bad}`"
        )));
    }
    Ok(())
}

/// Parses command-line arguments (program name first), merging in the
/// optional `--config` file.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let file = match &cli.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };

    let (command, message, samples, k_max, trials, no_charlie, common) = match cli.command {
        Sub::Send(a) => (Command::Send, a.message, None, None, None, a.no_charlie, a.common),
        Sub::TestChannel(a) => (Command::TestChannel, None, a.samples, None, None, false, a.common),
        Sub::Attack(a) => (Command::Attack, a.message, a.samples, None, None, false, a.common),
        Sub::DetectionSweep(a) => (Command::DetectionSweep, None, None, a.k_max, a.trials, false, a.common),
    };

    let message = match command {
        Command::Send | Command::Attack => message.or(file.message),
        _ => None,
    };
    if let Some(m) = &message {
        check_message(m)?;
    }
    if command == Command::Send && message.is_none() {
        return Err(CliError::Config("send requires --message <bits>".into()));
    }

    let source = SourceSpec::parse(common.source.or(file.source).as_deref().unwrap_or("honest"))?;

    let samples = samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    if matches!(command, Command::TestChannel | Command::Attack) && samples < 4 {
        return Err(CliError::Config(format!(
            "--samples must be at least 4 so every parity operator is exercised, got {samples}"
        )));
    }
    let k_max = k_max.or(file.k_max).unwrap_or(DEFAULT_K_MAX);
    let trials = trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    if command == Command::DetectionSweep && (k_max == 0 || trials == 0) {
        return Err(CliError::Config("--k-max and --trials must both be at least 1".into()));
    }

    let cooperation = if no_charlie || file.cooperate == Some(false) {
        Cooperation::Refused
    } else {
        Cooperation::Cooperative
    };

    let (seed, seed_generated) = match common.seed.or(file.seed) {
        Some(s) => (s, false),
        None => (rand::rng().random(), true),
    };

    Ok(RunConfig {
        command,
        message,
        source,
        samples,
        seed,
        seed_generated,
        k_max,
        trials,
        cooperation,
        out: common.out.or(file.out),
    })
}
