//! Plain-text run summary.

use std::fmt::Write;

use num_rational::Ratio;

use ncc_core::topology::{outage_probability, slot_counts, theoretical_metrics};
use ncc_core::SerCurve;

use crate::spec::ExperimentSpec;

fn fmt_rs(curve: &SerCurve) -> String {
    match (curve.config.scenario.uses_rs(), curve.config.rs) {
        (true, Some((n, k))) => format!("RS({n},{k})"),
        _ => "uncoded".to_owned(),
    }
}

/// Closed-form metrics, per-curve diagnostics, and for network-coded curves
/// the system outage probability at the measured per-link error rates.
pub fn summary(spec: &ExperimentSpec, curves: &[SerCurve]) -> String {
    let mut out = String::new();
    let topology = spec.topology();
    let pairs = topology.pairs();
    let first = &spec.configs[0];

    match &spec.preset {
        Some(p) => writeln!(out, "preset {p}: topology {topology}").unwrap(),
        None => writeln!(out, "topology {topology}").unwrap(),
    }
    writeln!(
        out,
        "seed {:#x}, {} frames x {} symbols per source, {} SNR points",
        spec.seed(),
        first.iterations,
        first.frame_len,
        first.snr_grid.len()
    )
    .unwrap();

    let slots = slot_counts(topology, pairs);
    let metrics = theoretical_metrics(topology, pairs).expect("every topology has at least two pairs");
    writeln!(
        out,
        "theory: {} slots with network coding, {} without; throughput gain {}, diversity order {}",
        slots.with_network_coding, slots.without_network_coding, metrics.throughput_gain, metrics.diversity_order
    )
    .unwrap();

    // Slot counts as the pipelines actually reported them.
    let measured = |nc: bool| {
        curves
            .iter()
            .find(|c| c.config.scenario.uses_network_coding() == nc)
            .and_then(|c| c.points.first())
            .map(|p| p.slots_per_frame)
    };
    if let (Some(with), Some(without)) = (measured(true), measured(false)) {
        writeln!(out, "simulated: {with} vs {without} slots; throughput gain {}", Ratio::new(without, with)).unwrap();
    }

    for curve in curves {
        let c = &curve.config;
        writeln!(out).unwrap();
        writeln!(out, "{} {}-PSK {}", c.scenario, c.m, fmt_rs(curve)).unwrap();
        writeln!(out, "  {:>7} {:>12} {:>10} {:>12}", "snr_db", "ser", "errors", "ci95").unwrap();
        for p in &curve.points {
            let flag = if p.under_resolved { "  (under-resolved)" } else { "" };
            writeln!(out, "  {:>7.2} {:>12.4e} {:>10} {:>12.3e}{flag}", p.snr_db, p.ser, p.errors, p.ci95).unwrap();
        }
        let blocks: u64 = curve.points.iter().map(|p| p.diagnostics.rs_blocks).sum();
        let failures: u64 = curve.points.iter().map(|p| p.diagnostics.rs_failures).sum();
        if blocks > 0 {
            writeln!(out, "  RS decoder failures: {failures} of {blocks} blocks").unwrap();
        }
        let degenerate: u64 = curve.points.iter().map(|p| p.diagnostics.degenerate_fading).sum();
        if degenerate > 0 {
            writeln!(out, "  degenerate fading samples: {degenerate}").unwrap();
        }
        if !curve.monotonicity_violations.is_empty() {
            let at: Vec<String> = curve.monotonicity_violations.iter().map(|&i| format!("{}", curve.points[i].snr_db)).collect();
            writeln!(out, "  SER rises beyond 3 intervals at {} dB", at.join(", ")).unwrap();
        }

        if c.scenario.uses_network_coding() {
            writeln!(out, "  outage from measured uplink (pairs 1, 2) and relay symbol error rates:").unwrap();
            writeln!(out, "  {:>7} {:>11} {:>11} {:>11} {:>11}", "snr_db", "p1", "p2", "pR", "P_out").unwrap();
            for p in &curve.points {
                let rate = |t: Option<&ncc_core::topology::LinkTally>| t.and_then(|t| t.rate()).unwrap_or(0.0);
                let p1 = rate(p.hops.uplinks.first());
                let p2 = rate(p.hops.uplinks.get(1));
                let pr = rate(Some(&p.hops.relay));
                let ps = outage_probability(p1, p2, pr).expect("measured rates lie in [0, 1]");
                writeln!(out, "  {:>7.2} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}", p.snr_db, p1, p2, pr, ps).unwrap();
            }
        }
    }
    out
}
