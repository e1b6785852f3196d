//! M-PSK mapping between field symbols and unit-energy complex samples.

use std::f64::consts::TAU;
use std::sync::Once;

use num_complex::Complex64;
use thiserror::Error;

use crate::gf::GfSymbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PskError {
    #[error("constellation order {0} is not a power of two in 2..=65536")]
    InvalidOrder(u32),
    #[error("symbol {value} is out of range for {order}-PSK")]
    SymbolOutOfRange { value: u16, order: u32 },
}

/// How symbol values are assigned to constellation phases.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Labeling {
    /// Symbol i sits at phase 2πi/M.
    #[default]
    Natural,
    /// Phase position p carries symbol p ^ (p >> 1), so neighbours differ
    /// in one bit.
    Gray,
}

static ZERO_SAMPLE: Once = Once::new();

#[derive(Clone, Debug)]
pub struct PskConstellation {
    order: u32,
    labeling: Labeling,
    // Indexed by phase position.
    points: Vec<Complex64>,
    symbol_to_position: Vec<u16>,
    position_to_symbol: Vec<u16>,
}

impl PskConstellation {
    pub fn new(order: u32, labeling: Labeling) -> Result<Self, PskError> {
        if !order.is_power_of_two() || !(2..=65536).contains(&order) {
            return Err(PskError::InvalidOrder(order));
        }
        let points = (0..order)
            .map(|i| Complex64::from_polar(1.0, TAU * i as f64 / order as f64))
            .collect();
        let position_to_symbol: Vec<u16> = (0..order)
            .map(|p| match labeling {
                Labeling::Natural => p as u16,
                Labeling::Gray => (p ^ (p >> 1)) as u16,
            })
            .collect();
        let mut symbol_to_position = vec![0u16; order as usize];
        for (p, &s) in position_to_symbol.iter().enumerate() {
            symbol_to_position[s as usize] = p as u16;
        }
        Ok(PskConstellation { order, labeling, points, symbol_to_position, position_to_symbol })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn labeling(&self) -> Labeling {
        self.labeling
    }

    /// Constellation points in phase order.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn modulate(&self, s: GfSymbol) -> Result<Complex64, PskError> {
        if s.value() as u32 >= self.order {
            return Err(PskError::SymbolOutOfRange { value: s.value(), order: self.order });
        }
        Ok(self.modulate_unchecked(s))
    }

    #[inline]
    pub(crate) fn modulate_unchecked(&self, s: GfSymbol) -> Complex64 {
        self.points[self.symbol_to_position[s.value() as usize] as usize]
    }

    pub fn modulate_frame(&self, frame: &[GfSymbol]) -> Result<Vec<Complex64>, PskError> {
        frame.iter().map(|&s| self.modulate(s)).collect()
    }

    /// Nearest-point hard decision.
    ///
    /// A zero or non-finite sample decides to symbol 0. A sample exactly on a
    /// sector boundary goes to the lower of the two symbol values.
    pub fn demodulate(&self, z: Complex64) -> GfSymbol {
        if z == Complex64::new(0.0, 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            ZERO_SAMPLE.call_once(|| {
                log::warn!("PSK demodulator received a zero or non-finite sample; deciding 0")
            });
            return GfSymbol::ZERO;
        }
        let mut turns = z.im.atan2(z.re) / TAU * self.order as f64;
        if turns < 0.0 {
            turns += self.order as f64;
        }
        GfSymbol::new(self.decide_sector(turns))
    }

    // `turns` is the phase measured in units of 2π/M, in [0, M].
    fn decide_sector(&self, turns: f64) -> u16 {
        let m = self.order as usize;
        let base = turns.floor();
        let frac = turns - base;
        let lower = base as usize % m;
        let upper = (lower + 1) % m;
        let below = self.position_to_symbol[lower];
        let above = self.position_to_symbol[upper];
        if frac < 0.5 {
            below
        } else if frac > 0.5 {
            above
        } else {
            below.min(above)
        }
    }

    pub fn demodulate_frame(&self, samples: &[Complex64]) -> Vec<GfSymbol> {
        samples.iter().map(|&z| self.demodulate(z)).collect()
    }

    /// Multiplies `z` by e^(j2π·steps/M), moving a constellation point by
    /// `steps` phase positions.
    pub fn rotate(&self, z: Complex64, steps: u32) -> Complex64 {
        z * self.points[(steps % self.order) as usize]
    }
}
