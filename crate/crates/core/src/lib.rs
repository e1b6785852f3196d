//! Monte Carlo simulation of Reed-Solomon channel coding combined with XOR
//! network coding over M-PSK, on fading wireless relay topologies.
//!
//! The building blocks are layered bottom-up:
//!
//! - [`gf`]: GF(2^q) arithmetic.
//! - [`rs`]: systematic RS(n, k) encoding and bounded-distance decoding.
//! - [`psk`]: M-PSK mapping and hard decisions.
//! - [`channel`]: fast Rayleigh links, equalization, amplify-and-forward.
//! - [`netcode`]: XOR combining of symbol flows.
//! - [`topology`]: the X, extended-X, butterfly and extended-butterfly
//!   pipelines for each transmission scenario, plus closed-form metrics.
//! - [`harness`]: SER estimation, SNR sweeps and scheme comparison.

pub mod channel;
pub mod gf;
pub mod harness;
pub mod netcode;
pub mod psk;
pub mod rng;
pub mod rs;
pub mod topology;

pub use gf::{GfField, GfSymbol};
pub use harness::{ScenarioConfig, SerCurve, SerPoint};
pub use rs::{DecodeStatus, RsCode};
pub use topology::{ScenarioKind, TopologyKind};
