//! Monte Carlo estimation of symbol error rate over SNR sweeps.
//!
//! Frame `f` of SNR point `p` draws only from the streams addressed by
//! `(seed, p, f, link)`, and per-frame counts are integers, so results do not
//! depend on how frames and points are scheduled across threads.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{self, equalize, is_degenerate, Equalizer, Fading, LinkBudget};
use crate::gf::GfSymbol;
use crate::psk::{Labeling, PskConstellation, PskError};
use crate::rng::{point_seed, FrameStreams};
use crate::rs::standard_params;
use crate::topology::{
    source_stream, ChannelHooks, ConfigError, DestinationFrame, Diagnostics, FrameResult, FrameSetup,
    HopTallies, LinkId, NodePowers, ScenarioKind, TopologyKind,
};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_2024_0001;
/// Normal quantile for 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;
/// Points with fewer errors than this are flagged as under-resolved.
pub const MIN_RESOLVED_ERRORS: u64 = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("SNR grid is empty")]
    EmptyGrid,
    #[error("SNR grid must be strictly increasing and finite (at index {0})")]
    UnorderedGrid(usize),
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("scheme comparison needs RS parameters")]
    MissingCode,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// 0, 2, ..., 26 dB.
pub fn default_snr_grid() -> Vec<f64> {
    (0..14).map(|i| 2.0 * i as f64).collect()
}

/// One simulated experiment cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub topology: TopologyKind,
    pub scenario: ScenarioKind,
    pub m: u32,
    /// (n, k); only read by the coded scenarios.
    pub rs: Option<(usize, usize)>,
    /// Message symbols per source per frame.
    pub frame_len: usize,
    /// Frames averaged per SNR point.
    pub iterations: usize,
    pub snr_grid: Vec<f64>,
    /// `None` means unit power at every node.
    pub powers: Option<NodePowers>,
    pub seed: u64,
    pub equalizer: Equalizer,
    pub labeling: Labeling,
    pub hooks: ChannelHooks,
}

impl ScenarioConfig {
    /// Defaults: the standard RS code for `m`, 1000-symbol frames, 1000
    /// iterations, the 0..26 dB grid, unit powers.
    pub fn new(topology: TopologyKind, scenario: ScenarioKind, m: u32) -> Self {
        ScenarioConfig {
            topology,
            scenario,
            m,
            rs: standard_params(m),
            frame_len: 1000,
            iterations: 1000,
            snr_grid: default_snr_grid(),
            powers: None,
            seed: DEFAULT_SEED,
            equalizer: Equalizer::default(),
            labeling: Labeling::default(),
            hooks: ChannelHooks::default(),
        }
    }

    pub fn setup(&self) -> Result<FrameSetup, HarnessError> {
        if self.snr_grid.is_empty() {
            return Err(HarnessError::EmptyGrid);
        }
        for (i, w) in self.snr_grid.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(HarnessError::UnorderedGrid(i + 1));
            }
        }
        if let Some(i) = self.snr_grid.iter().position(|s| s.is_nan()) {
            return Err(HarnessError::UnorderedGrid(i));
        }
        if self.iterations == 0 {
            return Err(HarnessError::NoIterations);
        }
        let mut setup = FrameSetup::new(self.topology, self.scenario, self.m, self.rs, self.frame_len)?
            .with_equalizer(self.equalizer)
            .with_labeling(self.labeling)
            .with_hooks(self.hooks.clone());
        if let Some(p) = &self.powers {
            setup = setup.with_powers(p.clone())?;
        }
        Ok(setup)
    }

    /// Message symbols compared per frame over all destinations.
    pub fn symbols_per_frame(&self) -> u64 {
        (self.frame_len * self.topology.pairs()) as u64
    }
}

/// Anything that can simulate one frame.
pub trait FrameRunner: Sync {
    fn run_frame(&self, snr_db: f64, streams: &FrameStreams) -> FrameResult;
}

impl FrameRunner for FrameSetup {
    fn run_frame(&self, snr_db: f64, streams: &FrameStreams) -> FrameResult {
        crate::topology::run_frame(self, snr_db, streams)
    }
}

/// A single source-to-destination fading link with no relay, for checking
/// the estimator against closed-form M-PSK error rates.
#[derive(Clone, Debug)]
pub struct SingleLink {
    constellation: PskConstellation,
    frame_len: usize,
    equalizer: Equalizer,
    noiseless: bool,
}

impl SingleLink {
    pub fn new(m: u32, labeling: Labeling, frame_len: usize) -> Result<Self, PskError> {
        Ok(SingleLink {
            constellation: PskConstellation::new(m, labeling)?,
            frame_len,
            equalizer: Equalizer::default(),
            noiseless: false,
        })
    }

    pub fn noiseless(mut self) -> Self {
        self.noiseless = true;
        self
    }
}

impl FrameRunner for SingleLink {
    fn run_frame(&self, snr_db: f64, streams: &FrameStreams) -> FrameResult {
        let order = self.constellation.order() as u16;
        let mut src = streams.stream(source_stream(0));
        let sent: Vec<GfSymbol> = (0..self.frame_len).map(|_| GfSymbol::new(src.random_range(0..order))).collect();
        let snr_db = if self.noiseless { f64::INFINITY } else { snr_db };
        let budget = LinkBudget { power: 1.0, snr_db };
        let mut rng = streams.stream(LinkId::direct(0, 0).stream_id());
        let mut diagnostics = Diagnostics::default();
        let recovered = sent
            .iter()
            .map(|&s| {
                let x: Complex64 = self.constellation.modulate_unchecked(s);
                let (y, real) = channel::transmit(x, &budget, Fading::default(), &mut rng);
                if is_degenerate(real.h) {
                    diagnostics.degenerate_fading += 1;
                }
                self.constellation.demodulate(equalize(y, real.h, self.equalizer))
            })
            .collect();
        FrameResult {
            destinations: vec![DestinationFrame { destination: 0, sent, recovered, pre_decode: None }],
            slots: 1,
            diagnostics,
            hops: HopTallies::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// On the current rayon pool.
    #[default]
    Parallel,
}

/// Half-width of the Wilson score interval for `errors` out of `trials`.
pub fn wilson_half_width(errors: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SerPoint {
    pub point: usize,
    pub snr_db: f64,
    pub iterations: usize,
    /// Message-symbol errors pooled over all destinations.
    pub errors: u64,
    pub symbols: u64,
    pub destination_errors: Vec<u64>,
    pub destination_symbols: Vec<u64>,
    pub ser: f64,
    /// Half-width of the 95% Wilson interval.
    pub ci95: f64,
    pub under_resolved: bool,
    pub slots_per_frame: u32,
    pub diagnostics: Diagnostics,
    pub hops: HopTallies,
}

impl SerPoint {
    pub fn destination_ser(&self, j: usize) -> f64 {
        self.destination_errors[j] as f64 / self.destination_symbols[j] as f64
    }
}

#[derive(Clone, Debug, Default)]
struct Accumulator {
    dest_errors: Vec<u64>,
    dest_symbols: Vec<u64>,
    slots: Option<u32>,
    diagnostics: Diagnostics,
    hops: HopTallies,
}

impl Accumulator {
    fn from_frame(frame: FrameResult) -> Self {
        Accumulator {
            dest_errors: frame.destinations.iter().map(|d| d.symbol_errors() as u64).collect(),
            dest_symbols: frame.destinations.iter().map(|d| d.sent.len() as u64).collect(),
            slots: Some(frame.slots),
            diagnostics: frame.diagnostics,
            hops: frame.hops,
        }
    }

    fn merge(mut self, other: Accumulator) -> Self {
        if self.dest_errors.len() < other.dest_errors.len() {
            self.dest_errors.resize(other.dest_errors.len(), 0);
            self.dest_symbols.resize(other.dest_symbols.len(), 0);
        }
        for (a, b) in self.dest_errors.iter_mut().zip(&other.dest_errors) {
            *a += b;
        }
        for (a, b) in self.dest_symbols.iter_mut().zip(&other.dest_symbols) {
            *a += b;
        }
        self.slots = self.slots.or(other.slots);
        self.diagnostics.merge(&other.diagnostics);
        self.hops.merge(&other.hops);
        self
    }
}

/// Runs `iterations` frames of `runner` at one SNR point and pools the
/// destination errors.
pub fn estimate_point<R: FrameRunner + ?Sized>(
    runner: &R,
    iterations: usize,
    seed: u64,
    point: usize,
    snr_db: f64,
    execution: Execution,
) -> SerPoint {
    let pseed = point_seed(seed, point);
    let one = |f: usize| Accumulator::from_frame(runner.run_frame(snr_db, &FrameStreams::new(pseed, f as u64)));
    let acc = match execution {
        Execution::Serial => (0..iterations).map(one).fold(Accumulator::default(), Accumulator::merge),
        Execution::Parallel => (0..iterations)
            .into_par_iter()
            .map(one)
            .reduce(Accumulator::default, Accumulator::merge),
    };
    let errors: u64 = acc.dest_errors.iter().sum();
    let symbols: u64 = acc.dest_symbols.iter().sum();
    let ser = if symbols == 0 { 0.0 } else { errors as f64 / symbols as f64 };
    SerPoint {
        point,
        snr_db,
        iterations,
        errors,
        symbols,
        destination_errors: acc.dest_errors,
        destination_symbols: acc.dest_symbols,
        ser,
        ci95: wilson_half_width(errors, symbols, Z95),
        under_resolved: errors < MIN_RESOLVED_ERRORS,
        slots_per_frame: acc.slots.unwrap_or(0),
        diagnostics: acc.diagnostics,
        hops: acc.hops,
    }
}

/// SER at grid point `point` (whose SNR is `snr_db`) of `config`.
pub fn estimate_ser(config: &ScenarioConfig, point: usize, snr_db: f64) -> Result<SerPoint, HarnessError> {
    let setup = config.setup()?;
    Ok(estimate_point(&setup, config.iterations, config.seed, point, snr_db, Execution::Parallel))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SerCurve {
    pub config: ScenarioConfig,
    pub points: Vec<SerPoint>,
    /// Indices whose SER rose above the previous point's by more than three
    /// interval half-widths.
    pub monotonicity_violations: Vec<usize>,
}

fn monotonicity_violations(points: &[SerPoint]) -> Vec<usize> {
    points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].ser - w[0].ser > 3.0 * w[0].ci95.max(w[1].ci95))
        .map(|(i, _)| i + 1)
        .collect()
}

pub fn snr_sweep(config: &ScenarioConfig) -> Result<SerCurve, HarnessError> {
    snr_sweep_with(config, Execution::Parallel)
}

pub fn snr_sweep_with(config: &ScenarioConfig, execution: Execution) -> Result<SerCurve, HarnessError> {
    let setup = config.setup()?;
    let run = |(i, &snr): (usize, &f64)| estimate_point(&setup, config.iterations, config.seed, i, snr, execution);
    let points: Vec<SerPoint> = match execution {
        Execution::Serial => config.snr_grid.iter().enumerate().map(run).collect(),
        Execution::Parallel => config.snr_grid.par_iter().enumerate().map(run).collect(),
    };
    let monotonicity_violations = monotonicity_violations(&points);
    Ok(SerCurve { config: config.clone(), points, monotonicity_violations })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeComparison {
    pub scheme1: SerCurve,
    pub scheme2: SerCurve,
    /// scheme-2 SER over scheme-1 SER per point; `None` where scheme 1 saw
    /// no errors.
    pub ratios: Vec<Option<f64>>,
}

/// Sweeps both relay schemes with the same seed, so both see the same
/// messages, fading and noise.
pub fn compare_schemes(base: &ScenarioConfig) -> Result<SchemeComparison, HarnessError> {
    if base.rs.is_none() {
        return Err(HarnessError::MissingCode);
    }
    let with = |scenario| ScenarioConfig { scenario, ..base.clone() };
    let scheme1 = snr_sweep(&with(ScenarioKind::NccRsScheme1))?;
    let scheme2 = snr_sweep(&with(ScenarioKind::NccRsScheme2))?;
    let ratios = scheme1
        .points
        .iter()
        .zip(&scheme2.points)
        .map(|(a, b)| (a.errors > 0).then(|| b.ser / a.ser))
        .collect();
    Ok(SchemeComparison { scheme1, scheme2, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(topology: TopologyKind, scenario: ScenarioKind, m: u32) -> ScenarioConfig {
        ScenarioConfig { frame_len: 40, iterations: 6, snr_grid: vec![4.0, 12.0], ..ScenarioConfig::new(topology, scenario, m) }
    }

    #[test]
    fn default_grid_has_fourteen_points() {
        let g = default_snr_grid();
        assert_eq!(g.len(), 14);
        assert_eq!((g[0], g[13]), (0.0, 26.0));
    }

    #[test]
    fn config_validation() {
        let base = small(TopologyKind::X, ScenarioKind::NccUncoded, 8);
        assert_eq!(ScenarioConfig { snr_grid: vec![], ..base.clone() }.setup().unwrap_err(), HarnessError::EmptyGrid);
        assert_eq!(
            ScenarioConfig { snr_grid: vec![2.0, 2.0], ..base.clone() }.setup().unwrap_err(),
            HarnessError::UnorderedGrid(1)
        );
        assert_eq!(ScenarioConfig { iterations: 0, ..base.clone() }.setup().unwrap_err(), HarnessError::NoIterations);
        assert!(base.setup().is_ok());
        let bad = ScenarioConfig { scenario: ScenarioKind::NccRsScheme2, frame_len: 41, ..base };
        assert!(matches!(bad.setup(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn wilson_interval() {
        assert_eq!(wilson_half_width(0, 0, Z95), 0.0);
        // Known value: 10 of 100, z = 1.96 -> [0.0552, 0.1744].
        let hw = wilson_half_width(10, 100, Z95);
        assert!((hw - (0.174_359 - 0.055_223) / 2.0).abs() < 1e-5, "{hw}");
        assert!(wilson_half_width(0, 1000, Z95) > 0.0);
    }

    #[test]
    fn noiseless_point_has_zero_ser() {
        let mut cfg = small(TopologyKind::Butterfly, ScenarioKind::NccRsScheme1, 8);
        cfg.hooks.noiseless = true;
        let p = estimate_ser(&cfg, 0, 0.0).unwrap();
        assert_eq!((p.errors, p.ser), (0, 0.0));
        assert_eq!(p.symbols, cfg.iterations as u64 * cfg.symbols_per_frame());
        assert!(p.under_resolved);
    }

    #[test]
    fn equal_seeds_give_identical_points() {
        let cfg = small(TopologyKind::ExtendedX, ScenarioKind::NccRsScheme2, 16);
        assert_eq!(estimate_ser(&cfg, 1, 6.0).unwrap(), estimate_ser(&cfg, 1, 6.0).unwrap());
        let other = ScenarioConfig { seed: 99, ..cfg.clone() };
        assert_ne!(estimate_ser(&cfg, 1, 6.0).unwrap().errors, estimate_ser(&other, 1, 6.0).unwrap().errors);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let cfg = small(TopologyKind::Butterfly, ScenarioKind::NccRsScheme1, 8);
        assert_eq!(snr_sweep_with(&cfg, Execution::Serial).unwrap(), snr_sweep_with(&cfg, Execution::Parallel).unwrap());
    }

    #[test]
    fn single_point_sweep_matches_estimate() {
        let cfg = ScenarioConfig { snr_grid: vec![10.0], ..small(TopologyKind::X, ScenarioKind::DirectAf, 8) };
        let curve = snr_sweep(&cfg).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0], estimate_ser(&cfg, 0, 10.0).unwrap());
    }

    #[test]
    fn scheme_comparison_is_paired() {
        let mut cfg = small(TopologyKind::X, ScenarioKind::NccUncoded, 8);
        let a = compare_schemes(&cfg).unwrap();
        cfg.scenario = ScenarioKind::NccRsScheme2;
        let b = compare_schemes(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.ratios.len(), 2);
        cfg.rs = None;
        assert_eq!(compare_schemes(&cfg).unwrap_err(), HarnessError::MissingCode);
    }

    #[test]
    fn monotonicity_flags_large_rises() {
        let mk = |ser: f64, ci95: f64| SerPoint {
            point: 0,
            snr_db: 0.0,
            iterations: 1,
            errors: 0,
            symbols: 0,
            destination_errors: vec![],
            destination_symbols: vec![],
            ser,
            ci95,
            under_resolved: false,
            slots_per_frame: 0,
            diagnostics: Diagnostics::default(),
            hops: HopTallies::default(),
        };
        let pts = vec![mk(0.5, 0.01), mk(0.52, 0.01), mk(0.2, 0.01), mk(0.4, 0.01)];
        assert_eq!(monotonicity_violations(&pts), vec![3]);
    }
}
