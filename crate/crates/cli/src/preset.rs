//! Named experiment configurations, one per published figure.

use std::fmt::Write;

use ncc_core::rs::standard_params;
use ncc_core::topology::{slot_counts, theoretical_metrics};
use ncc_core::{ScenarioKind, TopologyKind};

/// A constellation order with the RS code used alongside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub m: u32,
    pub rs: (usize, usize),
}

impl Cell {
    /// The standard code for `m`; `None` for orders without one.
    pub fn standard(m: u32) -> Option<Self> {
        standard_params(m).map(|rs| Cell { m, rs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub topology: TopologyKind,
    pub scenarios: Vec<ScenarioKind>,
    pub cells: Vec<Cell>,
}

const SCHEMES: [ScenarioKind; 2] = [ScenarioKind::NccRsScheme1, ScenarioKind::NccRsScheme2];

fn all_orders() -> Vec<Cell> {
    [8, 16, 32].into_iter().filter_map(Cell::standard).collect()
}

fn scheme_preset(name: &'static str, summary: &'static str, topology: TopologyKind) -> Preset {
    Preset { name, summary, topology, scenarios: SCHEMES.to_vec(), cells: all_orders() }
}

/// Every preset, in listing order.
pub fn presets() -> Vec<Preset> {
    vec![
        Preset {
            name: "fig2",
            summary: "X structure, all five scenarios, 16-PSK with RS(15,5)",
            topology: TopologyKind::X,
            scenarios: ScenarioKind::ALL.to_vec(),
            cells: vec![Cell { m: 16, rs: (15, 5) }],
        },
        scheme_preset("fig3-x", "X structure, scheme 1 vs scheme 2, 8/16/32-PSK", TopologyKind::X),
        scheme_preset("fig3-extx", "extended X, scheme 1 vs scheme 2, 8/16/32-PSK", TopologyKind::ExtendedX),
        scheme_preset("fig4-butterfly", "butterfly, scheme 1 vs scheme 2, 8/16/32-PSK", TopologyKind::Butterfly),
        scheme_preset(
            "fig4-extbutterfly",
            "extended butterfly, scheme 1 vs scheme 2, 8/16/32-PSK",
            TopologyKind::ExtendedButterfly,
        ),
    ]
}

pub fn find_preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

/// Human-readable table of the presets followed by the closed-form metrics
/// of every topology.
pub fn list_presets() -> String {
    let mut out = String::new();
    let grid = "SNR 0..26 dB step 2";
    for p in presets() {
        let scenarios: Vec<&str> = p.scenarios.iter().map(|s| s.name()).collect();
        let cells: Vec<String> = p.cells.iter().map(|c| format!("{}-PSK RS({},{})", c.m, c.rs.0, c.rs.1)).collect();
        writeln!(out, "{:<18} {}", p.name, p.summary).unwrap();
        writeln!(out, "{:<18} topology={} scenarios={}", "", p.topology, scenarios.join(",")).unwrap();
        writeln!(out, "{:<18} {}; {}", "", cells.join(", "), grid).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "{:<14} {:>5} {:>6} {:>9} {:>9} {:>10} {:>9}", "topology", "pairs", "relays", "slots-nc", "slots", "gain", "diversity")
        .unwrap();
    for t in TopologyKind::ALL {
        let n = t.pairs();
        let slots = slot_counts(t, n);
        let metrics = theoretical_metrics(t, n).expect("every topology has at least two pairs");
        writeln!(
            out,
            "{:<14} {:>5} {:>6} {:>9} {:>9} {:>10} {:>9}",
            t.name(),
            n,
            t.relays(),
            slots.with_network_coding,
            slots.without_network_coding,
            metrics.throughput_gain.to_string(),
            metrics.diversity_order
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_stable() {
        let names: Vec<_> = presets().iter().map(|p| p.name).collect();
        assert_eq!(names, ["fig2", "fig3-x", "fig3-extx", "fig4-butterfly", "fig4-extbutterfly"]);
    }

    #[test]
    fn fig2_expansion() {
        let p = find_preset("fig2").unwrap();
        assert_eq!(p.topology, TopologyKind::X);
        assert_eq!(p.scenarios.len(), 5);
        assert_eq!(p.cells, vec![Cell { m: 16, rs: (15, 5) }]);
    }

    #[test]
    fn figure_presets_cover_three_orders() {
        let p = find_preset("fig4-extbutterfly").unwrap();
        assert_eq!(p.cells.iter().map(|c| c.rs).collect::<Vec<_>>(), vec![(7, 2), (15, 5), (31, 10)]);
        assert!(find_preset("fig5").is_none());
    }

    #[test]
    fn listing_has_metrics() {
        let s = list_presets();
        assert!(s.contains("fig4-extbutterfly"));
        assert!(s.contains("4/3") && s.contains("3/2"));
    }
}
