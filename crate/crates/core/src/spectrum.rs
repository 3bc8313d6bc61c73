//! Power spectrum of received frames, the BPSK NPSDS law and its ML estimator.
//!
//! Two ways produce spectra. The frame path runs pilots through
//! [`apply_link`](crate::signalchain::apply_link) and takes `|DFT|^2`. The
//! statistical path draws the `N` spectral samples directly as i.i.d.
//! exponentials with mean `theta`, which is the model the estimator and KDR
//! theory assume.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::math;
use crate::signalchain::ComplexFrame;
use crate::{Error, Result};

/// Nonnegative spectral samples `S(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub samples: Vec<f64>,
    /// `1 / (N T)` for spectra computed from a frame; `None` for directly
    /// sampled spectra, which have no time base.
    pub bin_spacing: Option<f64>,
}

impl PowerSpectrum {
    pub fn new(samples: Vec<f64>, bin_spacing: Option<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("spectrum must hold at least one sample"));
        }
        if samples.iter().any(|&s| !(s >= 0.0)) {
            return Err(Error::Domain("spectral samples must be >= 0"));
        }
        Ok(PowerSpectrum { samples, bin_spacing })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Nominal power spectral density sample and its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpsdsValue {
    pub theta: f64,
    pub signal_part: f64,
    pub noise_part: f64,
}

impl NpsdsValue {
    fn new(signal_part: f64, noise_part: f64) -> Self {
        NpsdsValue { theta: signal_part + noise_part, signal_part, noise_part }
    }
}

/// Unnormalized forward DFT, `X(k) = sum_n x(n) exp(-j 2 pi n k / N)`.
pub fn dft(x: &ComplexFrame) -> ComplexFrame {
    let n = x.len();
    let twiddles: Vec<Complex64> = (0..n)
        .map(|k| {
            let ph = -2.0 * PI * k as f64 / n as f64;
            Complex64::new(libm::cos(ph), libm::sin(ph))
        })
        .collect();
    let samples = (0..n).map(|k| x.samples.iter().enumerate().map(|(i, &s)| s * twiddles[(i * k) % n]).sum()).collect();
    ComplexFrame { samples, symbol_period: x.symbol_period }
}

/// `S(i) = |X(i)|^2` with bin spacing `1 / (N T)`.
pub fn power_spectrum(x: &ComplexFrame) -> PowerSpectrum {
    let spectrum = dft(x);
    PowerSpectrum {
        samples: spectrum.samples.iter().map(|c| c.norm_sqr()).collect(),
        bin_spacing: Some(1.0 / (x.len() as f64 * x.symbol_period)),
    }
}

/// NPSDS of a BPSK link at cyclic Doppler `doppler_hz`.
///
/// Returns `(exact, quadratic)`: the exact form uses `(P T / 2) sinc^2(1 - f_D T)`,
/// the quadratic form its small-Doppler expansion `(P T^3 / 2) f_D^2`. Both
/// carry `noise_var` as the noise part.
///
/// The exact form is not even in `f_D`; the quadratic one is.
pub fn theoretical_npsds_bpsk(
    doppler_hz: f64,
    power: f64,
    symbol_period: f64,
    noise_var: f64,
) -> Result<(NpsdsValue, NpsdsValue)> {
    if !(power > 0.0) || !(symbol_period > 0.0) {
        return Err(Error::Domain("power and symbol period must be > 0"));
    }
    if !(noise_var >= 0.0) {
        return Err(Error::Domain("noise variance must be >= 0"));
    }
    let t = symbol_period;
    let s = math::sinc(1.0 - doppler_hz * t);
    let exact = 0.5 * power * t * s * s;
    let quadratic = quadratic_npsds(doppler_hz, power, t);
    Ok((NpsdsValue::new(exact, noise_var), NpsdsValue::new(quadratic, noise_var)))
}

/// Signal part of the quadratic NPSDS law, `(P T^3 / 2) f_D^2`.
pub fn quadratic_npsds(doppler_hz: f64, power: f64, symbol_period: f64) -> f64 {
    let t = symbol_period;
    0.5 * power * t * t * t * doppler_hz * doppler_hz
}

fn check_theta(theta: f64, n: usize) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain("theta must be finite and > 0"));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one spectral sample"));
    }
    Ok(())
}

/// `n` i.i.d. exponential spectral samples with mean `theta`.
pub fn sample_npsds_exponential<R: Rng + ?Sized>(theta: f64, n: usize, rng: &mut R) -> Result<PowerSpectrum> {
    check_theta(theta, n)?;
    let samples = (0..n)
        .map(|_| {
            let e: f64 = rng.sample(Exp1);
            theta * e
        })
        .collect();
    Ok(PowerSpectrum { samples, bin_spacing: None })
}

/// Same draws and result as `ml_estimate(&sample_npsds_exponential(..))`
/// without materializing the spectrum.
pub fn estimate_exponential<R: Rng + ?Sized>(theta: f64, n: usize, rng: &mut R) -> Result<f64> {
    check_theta(theta, n)?;
    let mut sum = 0.0;
    for _ in 0..n {
        let e: f64 = rng.sample(Exp1);
        sum += theta * e;
    }
    Ok(sum / n as f64)
}

/// ML estimate of the NPSDS: the sample mean of the spectrum.
pub fn ml_estimate(s: &PowerSpectrum) -> f64 {
    s.samples.iter().sum::<f64>() / s.len() as f64
}

/// Exponential log-likelihood `-N ln(theta) - sum S(i) / theta`.
pub fn log_likelihood(s: &PowerSpectrum, theta: f64) -> f64 {
    let n = s.len() as f64;
    -n * math::ln(theta) - s.samples.iter().sum::<f64>() / theta
}
