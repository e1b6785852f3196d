//! Statistical checks on the fading streams and on the SER estimator.

use num_complex::Complex64;
use rand::Rng;

use ncc_core::channel::{transmit, Fading, LinkBudget};
use ncc_core::harness::{estimate_point, Execution, FrameRunner};
use ncc_core::rng::{point_seed, FrameStreams, StreamId};
use ncc_core::topology::{DestinationFrame, Diagnostics, FrameResult, HopTallies, LinkId};
use ncc_core::GfSymbol;

const DRAWS: usize = 40_000;

fn fading_draws(streams: &FrameStreams, link: LinkId) -> Vec<Complex64> {
    let mut rng = streams.stream(link.stream_id());
    let budget = LinkBudget::noiseless(1.0).unwrap();
    (0..DRAWS).map(|_| transmit(Complex64::new(1.0, 0.0), &budget, Fading::default(), &mut rng).1.h).collect()
}

// Normalized correlation of the real parts.
fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn fading_magnitude_is_rayleigh() {
    let streams = FrameStreams::new(point_seed(3, 0), 0);
    let mut mags: Vec<f64> = fading_draws(&streams, LinkId::uplink(0, 0)).iter().map(|h| h.norm()).collect();
    mags.sort_by(f64::total_cmp);
    // Kolmogorov-Smirnov against F(r) = 1 - exp(-r^2) for unit variance.
    let n = mags.len() as f64;
    let d = mags
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let cdf = 1.0 - (-r * r).exp();
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value 1.63 / sqrt(n).
    assert!(d * n.sqrt() < 1.63, "KS statistic {}", d * n.sqrt());
    let power = mags.iter().map(|r| r * r).sum::<f64>() / n;
    assert!((power - 1.0).abs() < 0.02, "E|h|^2 = {power}");
}

#[test]
fn links_and_symbols_are_uncorrelated() {
    let streams = FrameStreams::new(point_seed(3, 1), 7);
    let a = fading_draws(&streams, LinkId::uplink(0, 0));
    let b = fading_draws(&streams, LinkId::direct(0, 1));
    let bound = 4.0 / (DRAWS as f64).sqrt();
    let re = |v: &[Complex64]| v.iter().map(|h| h.re).collect::<Vec<_>>();
    let im = |v: &[Complex64]| v.iter().map(|h| h.im).collect::<Vec<_>>();
    assert!(correlation(&re(&a), &re(&b)).abs() < bound);
    assert!(correlation(&re(&a), &im(&a)).abs() < bound);
    // Fast fading: lag-1 autocorrelation within one link.
    let ra = re(&a);
    assert!(correlation(&ra[..DRAWS - 1], &ra[1..]).abs() < bound);
    // Same link in another frame.
    let other = fading_draws(&FrameStreams::new(point_seed(3, 1), 8), LinkId::uplink(0, 0));
    assert!(correlation(&ra, &re(&other)).abs() < bound);
}

#[test]
fn noise_power_follows_snr() {
    let streams = FrameStreams::new(point_seed(11, 0), 0);
    let mut rng = streams.stream(StreamId(99));
    let budget = LinkBudget::new(2.0, 7.0).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    let mean = (0..DRAWS).map(|_| transmit(zero, &budget, Fading::default(), &mut rng).0.norm_sqr()).sum::<f64>()
        / DRAWS as f64;
    let sigma2 = 2.0 * 10f64.powf(-0.7);
    assert!((mean / sigma2 - 1.0).abs() < 0.03, "{mean} vs {sigma2}");
}

/// Replaces every symbol by a different one with probability `p`.
struct FlipChannel {
    p: f64,
    len: usize,
}

impl FrameRunner for FlipChannel {
    fn run_frame(&self, _snr_db: f64, streams: &FrameStreams) -> FrameResult {
        let mut rng = streams.stream(StreamId(5));
        let sent: Vec<GfSymbol> = (0..self.len).map(|_| GfSymbol::new(rng.random_range(0..16))).collect();
        let recovered = sent
            .iter()
            .map(|&s| if rng.random::<f64>() < self.p { GfSymbol::new((s.value() + 1) % 16) } else { s })
            .collect();
        FrameResult {
            destinations: vec![DestinationFrame { destination: 0, sent, recovered, pre_decode: None }],
            slots: 1,
            diagnostics: Diagnostics::default(),
            hops: HopTallies::default(),
        }
    }
}

#[test]
fn estimator_recovers_known_flip_rate() {
    for (i, p) in [0.5, 0.1, 0.01, 0.002].into_iter().enumerate() {
        let est = estimate_point(&FlipChannel { p, len: 500 }, 400, 77, i, 0.0, Execution::Parallel);
        assert_eq!(est.symbols, 200_000);
        assert!((est.ser - p).abs() <= 3.0 * est.ci95, "p = {p}: {} ± {}", est.ser, est.ci95);
        assert_eq!((est.ser * est.symbols as f64).round() as u64, est.errors);
        assert!(!est.under_resolved);
    }
    let none = estimate_point(&FlipChannel { p: 0.0, len: 100 }, 10, 77, 0, 0.0, Execution::Serial);
    assert_eq!((none.errors, none.ser), (0, 0.0));
    assert!(none.under_resolved && none.ci95 > 0.0);
}
