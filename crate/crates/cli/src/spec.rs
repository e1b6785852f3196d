//! Command-line parsing and expansion into validated experiment configs.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Parser, ValueEnum};
use thiserror::Error;

use ncc_core::channel::Equalizer;
use ncc_core::harness::{default_snr_grid, HarnessError, DEFAULT_SEED};
use ncc_core::psk::Labeling;
use ncc_core::rs::RsError;
use ncc_core::topology::ConfigError;
use ncc_core::{ScenarioConfig, ScenarioKind, TopologyKind};

use crate::preset::{find_preset, presets, Cell};

/// Frames per SNR point unless `--iters` or `--full-profile` say otherwise.
pub const DESK_ITERATIONS: usize = 200;
/// Frames per SNR point of the full profile.
pub const FULL_ITERATIONS: usize = 1000;

#[derive(Debug, Error)]
pub enum UsageError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{flag}: {message}")]
    Invalid { flag: &'static str, message: String },
}

impl UsageError {
    fn invalid(flag: &'static str, message: impl Into<String>) -> Self {
        UsageError::Invalid { flag, message: message.into() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EqualizerArg {
    Zf,
    Conj,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LabelingArg {
    Natural,
    Gray,
}

#[derive(Debug, Parser)]
#[command(name = "ncc-sim", version, about = "SER vs SNR sweeps of RS-coded network coding over fading relay topologies")]
struct Args {
    /// Print the presets and per-topology metrics, then exit.
    #[arg(long)]
    list_presets: bool,
    /// Start from a named preset; explicit flags override its fields.
    #[arg(long)]
    preset: Option<String>,
    /// x, ext-x, butterfly or ext-butterfly.
    #[arg(long, value_parser = parse_topology)]
    topology: Option<TopologyKind>,
    /// Repeatable; defaults to all five scenarios.
    #[arg(long, action = ArgAction::Append, value_parser = parse_scenario)]
    scenario: Vec<ScenarioKind>,
    /// Shorthand for `--scenario scheme1` / `--scenario scheme2`.
    #[arg(long, action = ArgAction::Append, value_parser = clap::value_parser!(u8).range(1..=2))]
    scheme: Vec<u8>,
    /// Constellation order, 8, 16 or 32.
    #[arg(long, value_parser = parse_order)]
    m: Option<u32>,
    /// RS code as `n,k`; defaults to the standard code for `--m`.
    #[arg(long, value_parser = parse_rs)]
    rs: Option<(usize, usize)>,
    /// First SNR point in dB (default 0).
    #[arg(long, allow_negative_numbers = true)]
    snr_start: Option<f64>,
    /// Last SNR point in dB, inclusive (default 26).
    #[arg(long, allow_negative_numbers = true)]
    snr_stop: Option<f64>,
    /// SNR spacing in dB (default 2).
    #[arg(long)]
    snr_step: Option<f64>,
    /// Explicit comma-separated SNR list in dB.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with_all = ["snr_start", "snr_stop", "snr_step"]
    )]
    snr: Option<Vec<f64>>,
    /// Message symbols per source per frame.
    #[arg(long)]
    frame_len: Option<usize>,
    /// Frames per SNR point.
    #[arg(long)]
    iters: Option<usize>,
    /// 1000 frames per point unless `--iters` is given.
    #[arg(long)]
    full_profile: bool,
    /// Master seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Zero-forcing (default) or conjugate phase correction.
    #[arg(long, value_enum)]
    equalizer: Option<EqualizerArg>,
    /// Symbol-to-phase labeling (default natural).
    #[arg(long, value_enum)]
    labeling: Option<LabelingArg>,
    /// Output file; data goes to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default csv).
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// More log output (repeatable).
    #[arg(short, long, action = ArgAction::Count, conflicts_with = "quiet")]
    verbose: u8,
    /// Errors only.
    #[arg(short, long)]
    quiet: bool,
}

fn parse_topology(s: &str) -> Result<TopologyKind, String> {
    s.parse()
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse()
}

fn parse_order(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(m @ (8 | 16 | 32)) => Ok(m),
        _ => Err(format!("'{s}' is not one of 8, 16, 32")),
    }
}

fn parse_rs(s: &str) -> Result<(usize, usize), String> {
    let (n, k) = s.split_once(',').ok_or_else(|| format!("expected n,k, got '{s}'"))?;
    let n = n.trim().parse().map_err(|_| format!("bad n in '{s}'"))?;
    let k = k.trim().parse().map_err(|_| format!("bad k in '{s}'"))?;
    Ok((n, k))
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("bad seed '{s}': {e}"))
}

/// What the command line asked for.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    ListPresets,
    Run(ExperimentSpec),
}

/// A fully expanded experiment: one config per (cell, scenario), in output
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Option<String>,
    pub configs: Vec<ScenarioConfig>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// 0 quiet, 1 default, 2+ more.
    pub verbosity: u8,
}

impl ExperimentSpec {
    pub fn topology(&self) -> TopologyKind {
        self.configs[0].topology
    }

    pub fn seed(&self) -> u64 {
        self.configs[0].seed
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<Command, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    if args.list_presets {
        return Ok(Command::ListPresets);
    }
    expand(args).map(Command::Run)
}

fn snr_grid(args: &Args) -> Result<Vec<f64>, UsageError> {
    if let Some(list) = &args.snr {
        return Ok(list.clone());
    }
    if args.snr_start.is_none() && args.snr_stop.is_none() && args.snr_step.is_none() {
        return Ok(default_snr_grid());
    }
    let start = args.snr_start.unwrap_or(0.0);
    let stop = args.snr_stop.unwrap_or(26.0);
    let step = args.snr_step.unwrap_or(2.0);
    if !(step > 0.0) || !step.is_finite() {
        return Err(UsageError::invalid("--snr-step", format!("step must be positive, got {step}")));
    }
    if !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(UsageError::invalid("--snr-stop", format!("need finite start <= stop, got {start}..{stop}")));
    }
    // Computed by index rather than accumulation so 0.1-steps land exactly.
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn expand(args: Args) -> Result<ExperimentSpec, UsageError> {
    let preset = match &args.preset {
        Some(name) => Some(find_preset(name).ok_or_else(|| {
            let known: Vec<_> = presets().iter().map(|p| p.name).collect();
            UsageError::invalid("--preset", format!("unknown preset '{name}' (known: {})", known.join(", ")))
        })?),
        None => None,
    };

    let topology = match (args.topology, &preset) {
        (Some(t), _) => t,
        (None, Some(p)) => p.topology,
        (None, None) => return Err(UsageError::invalid("--topology", "required unless --preset is given")),
    };

    let mut scenarios = args.scenario.clone();
    scenarios.extend(args.scheme.iter().map(|&s| {
        if s == 1 {
            ScenarioKind::NccRsScheme1
        } else {
            ScenarioKind::NccRsScheme2
        }
    }));
    if scenarios.is_empty() {
        scenarios = match &preset {
            Some(p) => p.scenarios.clone(),
            None => ScenarioKind::ALL.to_vec(),
        };
    }
    let mut seen = Vec::with_capacity(scenarios.len());
    for s in scenarios {
        if !seen.contains(&s) {
            seen.push(s);
        }
    }
    let scenarios = seen;

    // (m, rs) pairs; rs is None only when no standard code exists.
    let cells: Vec<(u32, Option<(usize, usize)>)> = match (args.m, &preset) {
        (Some(m), _) => vec![(m, args.rs.or_else(|| Cell::standard(m).map(|c| c.rs)))],
        (None, Some(p)) => p.cells.iter().map(|c| (c.m, Some(args.rs.unwrap_or(c.rs)))).collect(),
        (None, None) => return Err(UsageError::invalid("--m", "required unless --preset is given")),
    };

    let iterations = match (args.iters, args.full_profile) {
        (Some(n), _) => n,
        (None, true) => FULL_ITERATIONS,
        (None, false) => DESK_ITERATIONS,
    };
    let snr_grid = snr_grid(&args)?;
    let equalizer = match args.equalizer {
        Some(EqualizerArg::Conj) => Equalizer::ConjugateOnly,
        Some(EqualizerArg::Zf) | None => Equalizer::ZeroForcing,
    };
    let labeling = match args.labeling {
        Some(LabelingArg::Gray) => Labeling::Gray,
        Some(LabelingArg::Natural) | None => Labeling::Natural,
    };

    let mut configs = Vec::with_capacity(cells.len() * scenarios.len());
    for &(m, rs) in &cells {
        for &scenario in &scenarios {
            let mut config = ScenarioConfig::new(topology, scenario, m);
            config.rs = rs;
            config.iterations = iterations;
            config.snr_grid = snr_grid.clone();
            config.seed = args.seed.unwrap_or(DEFAULT_SEED);
            config.equalizer = equalizer;
            config.labeling = labeling;
            if let Some(len) = args.frame_len {
                config.frame_len = len;
            }
            config.setup().map_err(|e| explain(&config, e))?;
            configs.push(config);
        }
    }

    Ok(ExperimentSpec {
        preset: args.preset,
        configs,
        out: args.out,
        format: args.format.unwrap_or_default(),
        verbosity: if args.quiet { 0 } else { 1 + args.verbose },
    })
}

// Attributes a validation failure to the flag most likely responsible.
fn explain(config: &ScenarioConfig, err: HarnessError) -> UsageError {
    let flag = match &err {
        HarnessError::EmptyGrid | HarnessError::UnorderedGrid(_) => "--snr",
        HarnessError::NoIterations => "--iters",
        HarnessError::MissingCode => "--rs",
        HarnessError::Config(c) => match c {
            ConfigError::Rs(RsError::FrameNotDivisible { .. }) => "--frame-len",
            ConfigError::MissingCode(_) | ConfigError::OrderMismatch { .. } | ConfigError::Rs(_) => "--rs",
            ConfigError::Psk(_) | ConfigError::Field(_) => "--m",
            _ => "configuration",
        },
    };
    UsageError::invalid(flag, format!("{} {} (M = {}): {err}", config.topology, config.scenario, config.m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_spec(args: &[&str]) -> ExperimentSpec {
        match parse_args(std::iter::once("ncc-sim").chain(args.iter().copied())).unwrap() {
            Command::Run(spec) => spec,
            Command::ListPresets => panic!("expected a run"),
        }
    }

    fn usage_err(args: &[&str]) -> UsageError {
        parse_args(std::iter::once("ncc-sim").chain(args.iter().copied())).unwrap_err()
    }

    #[test]
    fn fig2_preset_expands() {
        let spec = run_spec(&["--preset", "fig2"]);
        assert_eq!(spec.configs.len(), 5);
        for c in &spec.configs {
            assert_eq!((c.topology, c.m, c.rs), (TopologyKind::X, 16, Some((15, 5))));
            assert_eq!(c.snr_grid, default_snr_grid());
            assert_eq!(c.iterations, DESK_ITERATIONS);
            assert_eq!(c.seed, DEFAULT_SEED);
        }
        let kinds: Vec<_> = spec.configs.iter().map(|c| c.scenario).collect();
        assert_eq!(kinds, ScenarioKind::ALL);
    }

    #[test]
    fn explicit_flags_override_preset() {
        let spec = run_spec(&["--preset", "fig2", "--scenario", "ncc", "--iters", "7", "--snr", "10"]);
        assert_eq!(spec.configs.len(), 1);
        assert_eq!(spec.configs[0].scenario, ScenarioKind::NccUncoded);
        assert_eq!(spec.configs[0].iterations, 7);
        assert_eq!(spec.configs[0].snr_grid, vec![10.0]);

        let spec = run_spec(&["--preset", "fig3-x", "--m", "32"]);
        assert_eq!(spec.configs.len(), 2);
        assert!(spec.configs.iter().all(|c| c.m == 32 && c.rs == Some((31, 10))));
    }

    #[test]
    fn scheme_shorthand() {
        let spec = run_spec(&["--topology", "butterfly", "--scheme", "2", "--m", "32", "--rs", "31,10"]);
        assert_eq!(spec.configs.len(), 1);
        let c = &spec.configs[0];
        assert_eq!((c.topology, c.scenario, c.m, c.rs), (TopologyKind::Butterfly, ScenarioKind::NccRsScheme2, 32, Some((31, 10))));
    }

    #[test]
    fn order_mismatch_is_a_usage_error() {
        match usage_err(&["--topology", "x", "--m", "16", "--rs", "7,2"]) {
            UsageError::Invalid { flag, message } => {
                assert_eq!(flag, "--rs");
                assert!(message.contains("GF(8)"), "{message}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_values_name_their_flag() {
        assert!(matches!(usage_err(&["--topology", "ring", "--m", "8"]), UsageError::Clap(_)));
        assert!(matches!(usage_err(&["--topology", "x", "--m", "12"]), UsageError::Clap(_)));
        assert!(matches!(usage_err(&["--bogus"]), UsageError::Clap(_)));
        assert!(matches!(usage_err(&["--m", "8"]), UsageError::Invalid { flag: "--topology", .. }));
        assert!(matches!(usage_err(&["--preset", "nope"]), UsageError::Invalid { flag: "--preset", .. }));
        assert!(matches!(
            usage_err(&["--topology", "x", "--m", "8", "--frame-len", "999"]),
            UsageError::Invalid { flag: "--frame-len", .. }
        ));
        assert!(matches!(usage_err(&["--topology", "x", "--m", "8", "--iters", "0"]), UsageError::Invalid { flag: "--iters", .. }));
        assert!(matches!(usage_err(&["--topology", "x", "--m", "8", "--snr", "4,2"]), UsageError::Invalid { flag: "--snr", .. }));
        assert!(matches!(usage_err(&["--topology", "x", "--m", "8", "--snr", "4", "--snr-step", "1"]), UsageError::Clap(_)));
    }

    #[test]
    fn grid_flags() {
        let spec = run_spec(&["--topology", "x", "--m", "8", "--snr-start", "-2", "--snr-stop", "1", "--snr-step", "0.5"]);
        assert_eq!(spec.configs[0].snr_grid, vec![-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0]);
        let spec = run_spec(&["--topology", "x", "--m", "8", "--snr", "3,5.5"]);
        assert_eq!(spec.configs[0].snr_grid, vec![3.0, 5.5]);
    }

    #[test]
    fn misc_flags() {
        let spec = run_spec(&[
            "--topology", "ext-x", "--m", "8", "--seed", "0x10", "--equalizer", "conj", "--labeling", "gray",
            "--full-profile", "--format", "json", "-q", "--scenario", "ncc", "--scenario", "ncc",
        ]);
        let c = &spec.configs[0];
        assert_eq!(spec.configs.len(), 1);
        assert_eq!((c.seed, c.equalizer, c.labeling, c.iterations), (16, Equalizer::ConjugateOnly, Labeling::Gray, FULL_ITERATIONS));
        assert_eq!((spec.format, spec.verbosity), (OutputFormat::Json, 0));
        assert_eq!(parse_args(["ncc-sim", "--list-presets"]).unwrap(), Command::ListPresets);
    }
}
