//! Fast Rayleigh fading links with complex AWGN, receiver equalization and
//! amplify-and-forward relay gain.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Fading magnitudes below this are treated as a deep fade the receiver
/// cannot undo.
pub const DEGENERATE_FADING: f64 = f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("noise variance must be non-negative, got {0}")]
    NegativeVariance(f64),
    #[error("amplification denominator P|h|^2 + sigma^2 is zero")]
    ZeroDenominator,
}

/// Transmit power and nominal SNR of one link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    pub power: f64,
    pub snr_db: f64,
}

impl LinkBudget {
    pub fn new(power: f64, snr_db: f64) -> Result<Self, ChannelError> {
        if !(power > 0.0) {
            return Err(ChannelError::NonPositive { name: "transmit power", value: power });
        }
        Ok(LinkBudget { power, snr_db })
    }

    /// A link with no additive noise.
    pub fn noiseless(power: f64) -> Result<Self, ChannelError> {
        Self::new(power, f64::INFINITY)
    }

    pub fn sigma2(&self) -> f64 {
        snr_to_sigma2(self.snr_db, self.power)
    }
}

/// Noise variance for a nominal SNR, with unit fading variance and a
/// unit-energy constellation: σ² = P · 10^(-SNR/10).
pub fn snr_to_sigma2(snr_db: f64, power: f64) -> f64 {
    power * 10f64.powf(-snr_db / 10.0)
}

/// Fading coefficient model for a link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fading {
    /// h ~ CN(0, σ_h²), redrawn for every symbol.
    Rayleigh { sigma_h2: f64 },
    /// A fixed coefficient; the Rayleigh draw is still consumed so the random
    /// stream stays aligned with the fading case.
    Fixed(Complex64),
}

impl Default for Fading {
    fn default() -> Self {
        Fading::Rayleigh { sigma_h2: 1.0 }
    }
}

/// The coefficient and noise level experienced by one transmitted sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelRealization {
    pub h: Complex64,
    pub sigma2: f64,
    pub sigma_h2: f64,
}

#[inline]
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (variance / 2.0).sqrt()
}

/// y = √P · x · h + n for one sample. Always draws h then n so that streams
/// stay aligned across SNR values and fading overrides.
pub fn transmit<R: Rng + ?Sized>(
    x: Complex64,
    budget: &LinkBudget,
    fading: Fading,
    rng: &mut R,
) -> (Complex64, ChannelRealization) {
    let sigma2 = budget.sigma2();
    let (drawn, sigma_h2) = match fading {
        Fading::Rayleigh { sigma_h2 } => (complex_gaussian(rng, sigma_h2), sigma_h2),
        Fading::Fixed(_) => (complex_gaussian(rng, 1.0), 1.0),
    };
    let h = match fading {
        Fading::Fixed(h) => h,
        Fading::Rayleigh { .. } => drawn,
    };
    let unit_noise = complex_gaussian(rng, 1.0);
    let noise = unit_noise * sigma2.sqrt();
    let y = budget.power.sqrt() * x * h + noise;
    (y, ChannelRealization { h, sigma2, sigma_h2 })
}

/// Receiver equalization with perfect CSI.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Equalizer {
    /// y · conj(h) / |h|²
    #[default]
    ZeroForcing,
    /// y · conj(h)
    ConjugateOnly,
}

pub fn is_degenerate(h: Complex64) -> bool {
    !(h.norm() >= DEGENERATE_FADING)
}

/// Applies the equalizer. A degenerate coefficient returns `y` unchanged;
/// callers check [`is_degenerate`] to count those events.
#[inline]
pub fn equalize(y: Complex64, h: Complex64, mode: Equalizer) -> Complex64 {
    if is_degenerate(h) {
        return y;
    }
    match mode {
        Equalizer::ZeroForcing => y * h.conj() / h.norm_sqr(),
        Equalizer::ConjugateOnly => y * h.conj(),
    }
}

/// β = sqrt(P_relay / (P_src |h|² + σ²)).
pub fn amp_factor(p_src: f64, p_relay: f64, h: Complex64, sigma2: f64) -> Result<f64, ChannelError> {
    if !(p_src > 0.0) {
        return Err(ChannelError::NonPositive { name: "source power", value: p_src });
    }
    if !(p_relay > 0.0) {
        return Err(ChannelError::NonPositive { name: "relay power", value: p_relay });
    }
    if !(sigma2 >= 0.0) {
        return Err(ChannelError::NegativeVariance(sigma2));
    }
    let denom = p_src * h.norm_sqr() + sigma2;
    if !(denom > 0.0) {
        return Err(ChannelError::ZeroDenominator);
    }
    Ok((p_relay / denom).sqrt())
}

/// Amplify-and-forward: y_out = √P_out · β · ξ(y_in) · h_out + n_out.
///
/// `budget_out.power` multiplies the output even though β already carries
/// √P_relay; with unit relay power the two readings coincide.
pub fn af_forward<R: Rng + ?Sized>(
    y_in: Complex64,
    h_in: Complex64,
    beta: f64,
    budget_out: &LinkBudget,
    fading_out: Fading,
    mode: Equalizer,
    rng: &mut R,
) -> (Complex64, ChannelRealization) {
    transmit(beta * equalize(y_in, h_in, mode), budget_out, fading_out, rng)
}
