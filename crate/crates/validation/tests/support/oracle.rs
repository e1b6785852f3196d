//! Reference symbol error rates of uncoded M-PSK over fast Rayleigh fading
//! with coherent detection, written without reference to the simulator.
//!
//! `snr_db` is the average received Es/N0.

use std::f64::consts::PI;

// Composite Simpson on [a, b] with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Exact M-PSK SER on an AWGN channel at instantaneous SNR `gamma`, from
/// Craig's single finite-range integral.
pub fn awgn_ser(m: u32, gamma: f64) -> f64 {
    let s = (PI / m as f64).sin().powi(2);
    let upper = PI * (m - 1) as f64 / m as f64;
    simpson(|t| if t == 0.0 { 0.0 } else { (-gamma * s / t.sin().powi(2)).exp() }, 0.0, upper, 400) / PI
}

/// Average of [`awgn_ser`] over the exponential density of the
/// instantaneous SNR γ = γ̄ t, t ~ Exp(1). Integrating in w = ln t keeps
/// both the fast decay of the AWGN term and the density's tail smooth.
pub fn rayleigh_ser_double_quadrature(m: u32, snr_db: f64) -> f64 {
    let mean = 10f64.powf(snr_db / 10.0);
    let integrand = |w: f64| {
        let t = w.exp();
        awgn_ser(m, mean * t) * (-t).exp() * t
    };
    // Below w = -40 the integrand is under e^-40; above w = 4, e^-54.
    simpson(integrand, -40.0, 4.0, 4000)
}

/// The Rayleigh average in closed form.
pub fn rayleigh_ser_closed_form(m: u32, snr_db: f64) -> f64 {
    let mf = m as f64;
    let g = 10f64.powf(snr_db / 10.0) * (PI / mf).sin().powi(2);
    let r = (g / (1.0 + g)).sqrt();
    let cot = 1.0 / (PI / mf).tan();
    (mf - 1.0) / mf * (1.0 - r * mf / ((mf - 1.0) * PI) * (PI / 2.0 + (r * cot).atan()))
}
