use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    source_stream, DestinationFrame, Diagnostics, FrameResult, FrameSetup, Flow, HopTallies, LinkId,
    LinkTally, ScenarioKind,
};
use crate::channel::{self, af_forward, amp_factor, equalize, is_degenerate, Fading, LinkBudget};
use crate::gf::GfSymbol;
use crate::netcode::xor_into;
use crate::rng::FrameStreams;

/// Samples as they arrive at a receiver, with the CSI it holds for each.
struct Received {
    y: Vec<Complex64>,
    h: Vec<Complex64>,
    sigma2: f64,
}

struct Frame<'a> {
    setup: &'a FrameSetup,
    snr_db: f64,
    streams: &'a FrameStreams,
    diag: Diagnostics,
}

impl<'a> Frame<'a> {
    fn budget(&self, power: f64) -> LinkBudget {
        let snr_db = if self.setup.hooks.noiseless { f64::INFINITY } else { self.snr_db };
        LinkBudget { power, snr_db }
    }

    fn fading(&self) -> Fading {
        match self.setup.hooks.fixed_fading {
            Some(h) => Fading::Fixed(h),
            None => Fading::Rayleigh { sigma_h2: self.setup.sigma_h2 },
        }
    }

    fn link_rng(&self, link: LinkId) -> ChaCha8Rng {
        self.streams.stream(link.stream_id())
    }

    // Positions on `link` that get rotated, with their step counts.
    fn faults(&self, link: LinkId) -> Vec<(usize, u32)> {
        self.setup.hooks.faults.iter().filter(|f| f.link == link).map(|f| (f.position, f.steps)).collect()
    }

    fn source_frame(&self, source: usize) -> Vec<GfSymbol> {
        let mut rng = self.streams.stream(source_stream(source));
        let order = self.setup.field.order() as u16;
        (0..self.setup.frame_len).map(|_| GfSymbol(rng.random_range(0..order))).collect()
    }

    fn encode(&self, frame: &[GfSymbol]) -> Vec<GfSymbol> {
        match &self.setup.code {
            Some(code) => code.encode_frame(frame).expect("frame length validated at setup"),
            None => frame.to_vec(),
        }
    }

    fn decode(&mut self, coded: &[GfSymbol]) -> Vec<GfSymbol> {
        match &self.setup.code {
            Some(code) => {
                let (msg, statuses) = code.decode_frame(coded).expect("coded length is a block multiple");
                self.diag.rs_blocks += statuses.len() as u64;
                self.diag.rs_failures += statuses.iter().filter(|s| s.is_failed()).count() as u64;
                msg
            }
            None => coded.to_vec(),
        }
    }

    fn modulate(&self, symbols: &[GfSymbol]) -> Vec<Complex64> {
        symbols.iter().map(|&s| self.setup.constellation.modulate_unchecked(s)).collect()
    }

    fn apply_faults(&self, link: LinkId, samples: &[Complex64]) -> Vec<Complex64> {
        let mut out = samples.to_vec();
        for (pos, steps) in self.faults(link) {
            if let Some(x) = out.get_mut(pos) {
                *x = self.setup.constellation.rotate(*x, steps);
            }
        }
        out
    }

    fn send(&mut self, link: LinkId, power: f64, samples: &[Complex64]) -> Received {
        let samples = self.apply_faults(link, samples);
        let budget = self.budget(power);
        let fading = self.fading();
        let mut rng = self.link_rng(link);
        let mut y = Vec::with_capacity(samples.len());
        let mut h = Vec::with_capacity(samples.len());
        for &x in &samples {
            let (out, real) = channel::transmit(x, &budget, fading, &mut rng);
            y.push(out);
            h.push(real.h);
        }
        Received { y, h, sigma2: budget.sigma2() }
    }

    /// Equalize, scale by β and retransmit every sample of `input`.
    fn forward(&mut self, input: &Received, p_in: f64, p_relay: f64, link: LinkId) -> Received {
        let y_in = self.apply_faults(link, &input.y);
        let budget = self.budget(p_relay);
        let fading = self.fading();
        let mode = self.setup.equalizer;
        let mut rng = self.link_rng(link);
        let mut y = Vec::with_capacity(y_in.len());
        let mut h = Vec::with_capacity(y_in.len());
        for (&yi, &hi) in y_in.iter().zip(&input.h) {
            if is_degenerate(hi) {
                self.diag.degenerate_fading += 1;
            }
            let beta = match amp_factor(p_in, p_relay, hi, input.sigma2) {
                Ok(b) => b,
                // Only reachable with zero fading on a noiseless hop.
                Err(_) => (p_relay / p_in).sqrt(),
            };
            let (out, real) = af_forward(yi, hi, beta, &budget, fading, mode, &mut rng);
            y.push(out);
            h.push(real.h);
        }
        Received { y, h, sigma2: budget.sigma2() }
    }

    fn decide(&mut self, rx: &Received) -> Vec<GfSymbol> {
        let mode = self.setup.equalizer;
        rx.y.iter()
            .zip(&rx.h)
            .map(|(&y, &h)| {
                if is_degenerate(h) {
                    self.diag.degenerate_fading += 1;
                }
                self.setup.constellation.demodulate(equalize(y, h, mode))
            })
            .collect()
    }
}

pub(super) fn run(setup: &FrameSetup, snr_db: f64, streams: &FrameStreams) -> FrameResult {
    let mut frame = Frame { setup, snr_db, streams, diag: Diagnostics::default() };
    if setup.scenario.uses_network_coding() {
        run_network_coded(&mut frame)
    } else {
        run_direct(&mut frame)
    }
}

// Each pair separately: source, relay chain by amplify-and-forward,
// destination.
fn run_direct(frame: &mut Frame<'_>) -> FrameResult {
    let setup = frame.setup;
    let pairs = setup.topology.pairs();
    let relays = setup.topology.relays();
    let powers = &setup.powers;
    let mut destinations = Vec::with_capacity(pairs);

    for i in 0..pairs {
        let sent = frame.source_frame(i);
        let coded = frame.encode(&sent);
        let tx = frame.modulate(&coded);
        let flow = Flow::Pair(i as u8);
        let up = frame.send(LinkId::uplink(i, 0), powers.sources[i], &tx);
        let rx = if relays == 1 {
            frame.forward(&up, powers.sources[i], powers.relays[0], LinkId::relay_to_destination(0, i, flow))
        } else {
            let mid = frame.forward(&up, powers.sources[i], powers.relays[0], LinkId::relay_to_relay(flow));
            frame.forward(&mid, powers.relays[0], powers.relays[1], LinkId::relay_to_destination(1, i, flow))
        };
        let hard = frame.decide(&rx);
        let recovered = frame.decode(&hard);
        destinations.push(DestinationFrame { destination: i, sent, recovered, pre_decode: None });
    }

    FrameResult {
        destinations,
        slots: (pairs * (relays + 1)) as u32,
        diagnostics: frame.diag,
        hops: HopTallies::default(),
    }
}

fn run_network_coded(frame: &mut Frame<'_>) -> FrameResult {
    let setup = frame.setup;
    let scenario = setup.scenario;
    let pairs = setup.topology.pairs();
    let relays = setup.topology.relays();
    let powers = &setup.powers;
    let mut hops = HopTallies { uplinks: vec![LinkTally::default(); pairs], ..Default::default() };

    // MAC phase: slot i carries source i to the coding relay and to every
    // other pair's destination.
    let mut sent = Vec::with_capacity(pairs);
    let mut at_relay = Vec::with_capacity(pairs);
    // overheard[i][j]: destination j's decisions on source i
    let mut overheard: Vec<Vec<Option<Vec<GfSymbol>>>> = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let msg = frame.source_frame(i);
        let coded = frame.encode(&msg);
        let tx = frame.modulate(&coded);
        let up = frame.send(LinkId::uplink(i, 0), powers.sources[i], &tx);
        let decided = frame.decide(&up);
        hops.uplinks[i].count(&coded, &decided);
        at_relay.push(decided);

        let mut row = vec![None; pairs];
        for (j, slot) in row.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            let rx = frame.send(LinkId::direct(i, j), powers.sources[i], &tx);
            let decided = frame.decide(&rx);
            hops.direct.count(&coded, &decided);
            *slot = Some(decided);
        }
        overheard.push(row);
        sent.push(msg);
    }

    // Coding relay.
    let relay_word = match scenario {
        ScenarioKind::NccRsScheme2 => {
            let mut acc = frame.decode(&at_relay[0]);
            for word in &at_relay[1..] {
                let msg = frame.decode(word);
                xor_into(&mut acc, &msg);
            }
            frame.encode(&acc)
        }
        _ => {
            let mut acc = at_relay[0].clone();
            for word in &at_relay[1..] {
                xor_into(&mut acc, word);
            }
            acc
        }
    };
    let relay_tx = frame.modulate(&relay_word);

    // Broadcast phase, through R2 on the two-relay shapes.
    let mut from_relay = Vec::with_capacity(pairs);
    if relays == 1 {
        for j in 0..pairs {
            let rx = frame.send(LinkId::relay_to_destination(0, j, Flow::Combined), powers.relays[0], &relay_tx);
            from_relay.push(frame.decide(&rx));
        }
    } else {
        let mid = frame.send(LinkId::relay_to_relay(Flow::Combined), powers.relays[0], &relay_tx);
        for j in 0..pairs {
            let rx = frame.forward(
                &mid,
                powers.relays[0],
                powers.relays[1],
                LinkId::relay_to_destination(1, j, Flow::Combined),
            );
            from_relay.push(frame.decide(&rx));
        }
    }
    for decided in &from_relay {
        hops.relay.count(&relay_word, decided);
    }

    let mut destinations = Vec::with_capacity(pairs);
    for (j, relay_obs) in from_relay.into_iter().enumerate() {
        let others = overheard.iter().filter_map(|row| row[j].as_ref());
        let (recovered, pre_decode) = match scenario {
            ScenarioKind::NccUncoded => {
                let mut acc = relay_obs;
                for obs in others {
                    xor_into(&mut acc, obs);
                }
                (acc, None)
            }
            ScenarioKind::NccRsScheme1 => {
                let mut acc = relay_obs;
                for obs in others {
                    xor_into(&mut acc, obs);
                }
                (frame.decode(&acc), Some(acc))
            }
            ScenarioKind::NccRsScheme2 => {
                let mut acc = frame.decode(&relay_obs);
                let others: Vec<_> = others.collect();
                for obs in others {
                    let msg = frame.decode(obs);
                    xor_into(&mut acc, &msg);
                }
                (acc, None)
            }
            ScenarioKind::DirectAf | ScenarioKind::DirectAfRs => unreachable!("direct scenarios use run_direct"),
        };
        destinations.push(DestinationFrame { destination: j, sent: sent[j].clone(), recovered, pre_decode });
    }

    FrameResult {
        destinations,
        slots: (pairs + relays) as u32,
        diagnostics: frame.diag,
        hops,
    }
}
