//! Network shapes, transmission scenarios and the per-frame pipelines that
//! simulate them.
//!
//! One-relay shapes (X, extended X) have N sources that each reach the relay
//! and every other pair's destination. Two-relay shapes (butterfly, extended
//! butterfly) put a pure amplify-and-forward relay R2 behind the coding relay
//! R1; destinations hear R2 and the other pairs' sources.

mod metrics;
mod pipeline;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::Equalizer;
use crate::gf::{GfError, GfField, GfSymbol};
use crate::psk::{Labeling, PskConstellation, PskError};
use crate::rng::{FrameStreams, StreamId};
use crate::rs::{RsCode, RsError};

pub use metrics::{
    outage_probability, slot_counts, theoretical_metrics, MetricsError, SlotCounts, TopologyMetrics,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("scenario {0} needs RS parameters")]
    MissingCode(ScenarioKind),
    #[error("RS code over GF({code_order}) cannot carry {m}-PSK symbols")]
    OrderMismatch { m: u32, code_order: u32 },
    #[error("expected {expected} {what} powers, got {actual}")]
    PowerCount { what: &'static str, expected: usize, actual: usize },
    #[error("transmit powers must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("fading variance must be positive, got {0}")]
    InvalidFadingVariance(f64),
    #[error("pipeline for {expected} called with a {actual} setup")]
    TopologyMismatch { expected: TopologyKind, actual: TopologyKind },
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error(transparent)]
    Psk(#[from] PskError),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopologyKind {
    X,
    ExtendedX,
    Butterfly,
    ExtendedButterfly,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 4] = [
        TopologyKind::X,
        TopologyKind::ExtendedX,
        TopologyKind::Butterfly,
        TopologyKind::ExtendedButterfly,
    ];

    /// Source-destination pairs in the simulated network.
    pub fn pairs(self) -> usize {
        match self {
            TopologyKind::X | TopologyKind::Butterfly => 2,
            TopologyKind::ExtendedX | TopologyKind::ExtendedButterfly => 4,
        }
    }

    pub fn relays(self) -> usize {
        match self {
            TopologyKind::X | TopologyKind::ExtendedX => 1,
            TopologyKind::Butterfly | TopologyKind::ExtendedButterfly => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::X => "x",
            TopologyKind::ExtendedX => "ext-x",
            TopologyKind::Butterfly => "butterfly",
            TopologyKind::ExtendedButterfly => "ext-butterfly",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopologyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TopologyKind::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown topology '{s}'"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    /// Each pair relayed by amplify-and-forward, no coding.
    DirectAf,
    /// As `DirectAf` with RS coding end to end; relays stay oblivious.
    DirectAfRs,
    /// XOR network coding at the relay, no channel coding.
    NccUncoded,
    /// Relay XORs the coded symbols; destinations XOR then RS-decode.
    NccRsScheme1,
    /// Relay RS-decodes each flow, XORs the messages and re-encodes;
    /// destinations RS-decode every observation then XOR.
    NccRsScheme2,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::DirectAf,
        ScenarioKind::DirectAfRs,
        ScenarioKind::NccUncoded,
        ScenarioKind::NccRsScheme1,
        ScenarioKind::NccRsScheme2,
    ];

    pub fn uses_rs(self) -> bool {
        matches!(
            self,
            ScenarioKind::DirectAfRs | ScenarioKind::NccRsScheme1 | ScenarioKind::NccRsScheme2
        )
    }

    pub fn uses_network_coding(self) -> bool {
        matches!(
            self,
            ScenarioKind::NccUncoded | ScenarioKind::NccRsScheme1 | ScenarioKind::NccRsScheme2
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::DirectAf => "direct",
            ScenarioKind::DirectAfRs => "direct-rs",
            ScenarioKind::NccUncoded => "ncc",
            ScenarioKind::NccRsScheme1 => "scheme1",
            ScenarioKind::NccRsScheme2 => "scheme2",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

/// Network node, indexed from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Source(u8),
    Relay(u8),
    Destination(u8),
}

impl Node {
    fn code(self) -> u64 {
        match self {
            Node::Source(i) => i as u64,
            Node::Relay(i) => 0x40 | i as u64,
            Node::Destination(i) => 0x80 | i as u64,
        }
    }
}

/// Which message a transmission carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flow {
    Pair(u8),
    Combined,
}

/// One directed transmission. Links that reuse the same hop in different
/// slots differ in their [`Flow`] and so draw independent fading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId {
    pub from: Node,
    pub to: Node,
    pub flow: Flow,
}

impl LinkId {
    pub fn uplink(source: usize, relay: usize) -> Self {
        LinkId { from: Node::Source(source as u8), to: Node::Relay(relay as u8), flow: Flow::Pair(source as u8) }
    }

    pub fn direct(source: usize, destination: usize) -> Self {
        LinkId {
            from: Node::Source(source as u8),
            to: Node::Destination(destination as u8),
            flow: Flow::Pair(source as u8),
        }
    }

    pub fn relay_to_relay(flow: Flow) -> Self {
        LinkId { from: Node::Relay(0), to: Node::Relay(1), flow }
    }

    pub fn relay_to_destination(relay: usize, destination: usize, flow: Flow) -> Self {
        LinkId { from: Node::Relay(relay as u8), to: Node::Destination(destination as u8), flow }
    }

    pub fn stream_id(self) -> StreamId {
        let flow = match self.flow {
            Flow::Pair(i) => i as u64,
            Flow::Combined => 0xFF,
        };
        StreamId(1 << 32 | self.from.code() << 16 | self.to.code() << 8 | flow)
    }
}

pub(crate) fn source_stream(source: usize) -> StreamId {
    StreamId(source as u64)
}

/// Rotates the sample at `position` on `link` by `steps` constellation
/// positions before it enters the channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolFault {
    pub link: LinkId,
    pub position: usize,
    pub steps: u32,
}

/// Deterministic overrides used for calibration and controlled experiments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChannelHooks {
    /// Zero noise on every link.
    pub noiseless: bool,
    /// Replace every fading draw with this coefficient.
    pub fixed_fading: Option<Complex64>,
    pub faults: Vec<SymbolFault>,
}

/// Transmit powers of sources and relays.
#[derive(Clone, Debug, PartialEq)]
pub struct NodePowers {
    pub sources: Vec<f64>,
    pub relays: Vec<f64>,
}

impl NodePowers {
    pub fn uniform(topology: TopologyKind, power: f64) -> Self {
        NodePowers { sources: vec![power; topology.pairs()], relays: vec![power; topology.relays()] }
    }
}

/// A validated simulation cell: everything a frame pipeline needs except
/// the SNR and the random streams.
#[derive(Clone, Debug)]
pub struct FrameSetup {
    topology: TopologyKind,
    scenario: ScenarioKind,
    constellation: PskConstellation,
    field: GfField,
    code: Option<RsCode>,
    frame_len: usize,
    powers: NodePowers,
    equalizer: Equalizer,
    sigma_h2: f64,
    hooks: ChannelHooks,
}

impl FrameSetup {
    /// `rs` is ignored by scenarios without channel coding.
    pub fn new(
        topology: TopologyKind,
        scenario: ScenarioKind,
        m: u32,
        rs: Option<(usize, usize)>,
        frame_len: usize,
    ) -> Result<Self, ConfigError> {
        let constellation = PskConstellation::new(m, Labeling::Natural)?;
        let field = GfField::with_order(m)?;
        let code = match (scenario.uses_rs(), rs) {
            (false, _) => None,
            (true, None) => return Err(ConfigError::MissingCode(scenario)),
            (true, Some((n, k))) => {
                // The smallest field holding a length-n code.
                let code_order = (n + 1).next_power_of_two() as u32;
                if code_order != m {
                    return Err(ConfigError::OrderMismatch { m, code_order });
                }
                Some(crate::rs::validate_params(field.bits(), n, k, frame_len)?)
            }
        };
        Ok(FrameSetup {
            topology,
            scenario,
            constellation,
            field,
            code,
            frame_len,
            powers: NodePowers::uniform(topology, 1.0),
            equalizer: Equalizer::default(),
            sigma_h2: 1.0,
            hooks: ChannelHooks::default(),
        })
    }

    pub fn with_powers(mut self, powers: NodePowers) -> Result<Self, ConfigError> {
        let checks = [
            ("source", self.topology.pairs(), powers.sources.len()),
            ("relay", self.topology.relays(), powers.relays.len()),
        ];
        for (what, expected, actual) in checks {
            if expected != actual {
                return Err(ConfigError::PowerCount { what, expected, actual });
            }
        }
        if let Some(&bad) = powers.sources.iter().chain(&powers.relays).find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(ConfigError::InvalidPower(bad));
        }
        self.powers = powers;
        Ok(self)
    }

    pub fn with_equalizer(mut self, equalizer: Equalizer) -> Self {
        self.equalizer = equalizer;
        self
    }

    pub fn with_labeling(mut self, labeling: Labeling) -> Self {
        self.constellation = PskConstellation::new(self.constellation.order(), labeling)
            .expect("order already validated");
        self
    }

    pub fn with_fading_variance(mut self, sigma_h2: f64) -> Result<Self, ConfigError> {
        if !(sigma_h2 > 0.0 && sigma_h2.is_finite()) {
            return Err(ConfigError::InvalidFadingVariance(sigma_h2));
        }
        self.sigma_h2 = sigma_h2;
        Ok(self)
    }

    pub fn with_hooks(mut self, hooks: ChannelHooks) -> Self {
        self.hooks = hooks;
        self
    }

    pub fn topology(&self) -> TopologyKind {
        self.topology
    }

    pub fn scenario(&self) -> ScenarioKind {
        self.scenario
    }

    pub fn constellation(&self) -> &PskConstellation {
        &self.constellation
    }

    pub fn field(&self) -> &GfField {
        &self.field
    }

    pub fn code(&self) -> Option<&RsCode> {
        self.code.as_ref()
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn powers(&self) -> &NodePowers {
        &self.powers
    }

    pub fn equalizer(&self) -> Equalizer {
        self.equalizer
    }

    pub fn hooks(&self) -> &ChannelHooks {
        &self.hooks
    }

    /// Symbols per source frame on the air.
    pub fn coded_len(&self) -> usize {
        match &self.code {
            Some(c) => self.frame_len / c.k() * c.n(),
            None => self.frame_len,
        }
    }
}

/// What one destination ended up with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestinationFrame {
    pub destination: usize,
    /// The message its paired source sent.
    pub sent: Vec<GfSymbol>,
    pub recovered: Vec<GfSymbol>,
    /// Under scheme 1, the XOR-combined word handed to the RS decoder.
    pub pre_decode: Option<Vec<GfSymbol>>,
}

impl DestinationFrame {
    pub fn symbol_errors(&self) -> usize {
        self.sent.iter().zip(&self.recovered).filter(|(a, b)| a != b).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub rs_blocks: u64,
    pub rs_failures: u64,
    pub degenerate_fading: u64,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        self.rs_blocks += other.rs_blocks;
        self.rs_failures += other.rs_failures;
        self.degenerate_fading += other.degenerate_fading;
    }
}

/// Hard-decision symbol errors observed on one class of hop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LinkTally {
    pub errors: u64,
    pub symbols: u64,
}

impl LinkTally {
    pub fn rate(&self) -> Option<f64> {
        (self.symbols > 0).then(|| self.errors as f64 / self.symbols as f64)
    }

    pub fn merge(&mut self, other: &LinkTally) {
        self.errors += other.errors;
        self.symbols += other.symbols;
    }

    fn count(&mut self, sent: &[GfSymbol], seen: &[GfSymbol]) {
        self.symbols += sent.len() as u64;
        self.errors += sent.iter().zip(seen).filter(|(a, b)| a != b).count() as u64;
    }
}

/// Per-hop error tallies of a network-coded frame. Empty for the direct
/// scenarios, whose relays never make symbol decisions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HopTallies {
    /// Source i to the coding relay.
    pub uplinks: Vec<LinkTally>,
    /// Coding relay's symbol as decided at the destinations.
    pub relay: LinkTally,
    /// Cooperative source-to-other-destination observations.
    pub direct: LinkTally,
}

impl HopTallies {
    pub fn merge(&mut self, other: &HopTallies) {
        if self.uplinks.len() < other.uplinks.len() {
            self.uplinks.resize(other.uplinks.len(), LinkTally::default());
        }
        for (a, b) in self.uplinks.iter_mut().zip(&other.uplinks) {
            a.merge(b);
        }
        self.relay.merge(&other.relay);
        self.direct.merge(&other.direct);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameResult {
    pub destinations: Vec<DestinationFrame>,
    /// Time slots the frame's transmissions occupied.
    pub slots: u32,
    pub diagnostics: Diagnostics,
    pub hops: HopTallies,
}

fn run_as(
    expected: TopologyKind,
    setup: &FrameSetup,
    snr_db: f64,
    streams: &FrameStreams,
) -> Result<FrameResult, ConfigError> {
    if setup.topology != expected {
        return Err(ConfigError::TopologyMismatch { expected, actual: setup.topology });
    }
    Ok(pipeline::run(setup, snr_db, streams))
}

/// Two pairs around one relay.
pub fn run_frame_x(setup: &FrameSetup, snr_db: f64, streams: &FrameStreams) -> Result<FrameResult, ConfigError> {
    run_as(TopologyKind::X, setup, snr_db, streams)
}

/// Four pairs around one relay.
pub fn run_frame_extended_x(
    setup: &FrameSetup,
    snr_db: f64,
    streams: &FrameStreams,
) -> Result<FrameResult, ConfigError> {
    run_as(TopologyKind::ExtendedX, setup, snr_db, streams)
}

/// Two pairs, coding relay R1 followed by forwarding relay R2.
pub fn run_frame_butterfly(
    setup: &FrameSetup,
    snr_db: f64,
    streams: &FrameStreams,
) -> Result<FrameResult, ConfigError> {
    run_as(TopologyKind::Butterfly, setup, snr_db, streams)
}

/// Four pairs through R1 and R2.
pub fn run_frame_extended_butterfly(
    setup: &FrameSetup,
    snr_db: f64,
    streams: &FrameStreams,
) -> Result<FrameResult, ConfigError> {
    run_as(TopologyKind::ExtendedButterfly, setup, snr_db, streams)
}

/// Runs whichever pipeline matches the setup's topology.
pub fn run_frame(setup: &FrameSetup, snr_db: f64, streams: &FrameStreams) -> FrameResult {
    pipeline::run(setup, snr_db, streams)
}
