//! Closed-form topology metrics: slot counts, throughput gain, diversity
//! order, and system outage probability.

use num_rational::Ratio;
use thiserror::Error;

use super::TopologyKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("need at least two source-destination pairs, got {0}")]
    TooFewPairs(usize),
    #[error("error rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopologyMetrics {
    pub throughput_gain: Ratio<u32>,
    pub diversity_order: u32,
}

/// Time slots needed to deliver one symbol per pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotCounts {
    pub with_network_coding: u32,
    pub without_network_coding: u32,
}

impl SlotCounts {
    pub fn throughput_gain(&self) -> Ratio<u32> {
        Ratio::new(self.without_network_coding, self.with_network_coding)
    }
}

/// Without coding every pair walks its relay chain alone (relays + 1 slots
/// each); with coding the N sources take one slot each and every relay one
/// more.
pub fn slot_counts(topology: TopologyKind, pairs: usize) -> SlotCounts {
    let n = pairs as u32;
    let relays = topology.relays() as u32;
    SlotCounts { with_network_coding: n + relays, without_network_coding: n * (relays + 1) }
}

/// Throughput gain and diversity order of network coding with cooperation.
///
/// X and butterfly are two-pair shapes and ignore `pairs`; the extended
/// shapes use it.
pub fn theoretical_metrics(topology: TopologyKind, pairs: usize) -> Result<TopologyMetrics, MetricsError> {
    if pairs < 2 {
        return Err(MetricsError::TooFewPairs(pairs));
    }
    let n = pairs as u32;
    let (throughput_gain, diversity_order) = match topology {
        TopologyKind::X => (Ratio::new(4, 3), 2),
        TopologyKind::ExtendedX => (Ratio::new(2 * n, n + 1), n),
        TopologyKind::Butterfly => (Ratio::new(3, 2), 2),
        TopologyKind::ExtendedButterfly => (Ratio::new(3 * n, n + 2), n),
    };
    Ok(TopologyMetrics { throughput_gain, diversity_order })
}

/// Probability that at least two of the three uplink/relay channels fail:
/// p1 p2 + p1 pR + p2 pR - 2 p1 p2 pR.
pub fn outage_probability(p1: f64, p2: f64, p_relay: f64) -> Result<f64, MetricsError> {
    for p in [p1, p2, p_relay] {
        if !(0.0..=1.0).contains(&p) {
            return Err(MetricsError::RateOutOfRange(p));
        }
    }
    Ok(p1 * p2 + p1 * p_relay + p2 * p_relay - 2.0 * p1 * p2 * p_relay)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let m = |t, n| theoretical_metrics(t, n).unwrap();
        assert_eq!(m(TopologyKind::X, 2), TopologyMetrics { throughput_gain: Ratio::new(4, 3), diversity_order: 2 });
        assert_eq!(m(TopologyKind::ExtendedButterfly, 4).throughput_gain, Ratio::from_integer(2));
        assert_eq!(m(TopologyKind::ExtendedButterfly, 4).diversity_order, 4);
        assert_eq!(m(TopologyKind::ExtendedX, 2), m(TopologyKind::X, 2));
        assert_eq!(m(TopologyKind::Butterfly, 2).throughput_gain, Ratio::new(3, 2));
        assert_eq!(theoretical_metrics(TopologyKind::X, 1), Err(MetricsError::TooFewPairs(1)));
    }

    #[test]
    fn slot_counts_imply_gains() {
        for t in TopologyKind::ALL {
            for n in 2..10 {
                let expected = theoretical_metrics(t, n).unwrap().throughput_gain;
                if matches!(t, TopologyKind::ExtendedX | TopologyKind::ExtendedButterfly) || n == 2 {
                    assert_eq!(slot_counts(t, n).throughput_gain(), expected, "{t} N={n}");
                }
            }
        }
        assert_eq!(
            slot_counts(TopologyKind::Butterfly, 2),
            SlotCounts { with_network_coding: 4, without_network_coding: 6 }
        );
    }

    #[test]
    fn outage_examples() {
        assert!((outage_probability(0.1, 0.1, 0.1).unwrap() - 0.028).abs() < 1e-15);
        assert_eq!(outage_probability(0.0, 0.0, 0.3).unwrap(), 0.0);
        assert_eq!(outage_probability(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(outage_probability(1.5, 0.0, 0.0).is_err());
        assert!(outage_probability(0.0, f64::NAN, 0.0).is_err());
    }
}
