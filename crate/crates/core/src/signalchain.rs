//! BPSK pilots and the baseband link: path loss, Doppler rotation and AWGN.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::math;
use crate::{Error, Result};

/// A block of baseband samples spaced by `symbol_period` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFrame {
    pub samples: Vec<Complex64>,
    pub symbol_period: f64,
}

impl ComplexFrame {
    pub fn new(samples: Vec<Complex64>, symbol_period: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("frame must hold at least one sample"));
        }
        if !(symbol_period > 0.0) {
            return Err(Error::Domain("symbol period must be > 0"));
        }
        if samples.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("frame samples must be finite"));
        }
        Ok(ComplexFrame { samples, symbol_period })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    /// Amplitude attenuation `1 / d^PL`.
    pub zeta: f64,
    pub pl_exponent: f64,
    /// Link distance [m], if the attenuation was derived from one.
    pub distance: Option<f64>,
    /// Complex noise variance per sample.
    pub noise_var: f64,
    /// Cyclic Doppler [Hz].
    pub doppler_hz: f64,
}

impl LinkModel {
    /// Unit gain, the setting used for all key-generation runs.
    pub fn unit_gain(noise_var: f64, doppler_hz: f64) -> Result<Self> {
        if !(noise_var >= 0.0) {
            return Err(Error::Domain("noise variance must be >= 0"));
        }
        Ok(LinkModel { zeta: 1.0, pl_exponent: 0.0, distance: None, noise_var, doppler_hz })
    }

    pub fn with_path_loss(distance: f64, pl_exponent: f64, noise_var: f64, doppler_hz: f64) -> Result<Self> {
        if !(distance > 0.0) {
            return Err(Error::Domain("distance must be > 0"));
        }
        let mut link = Self::unit_gain(noise_var, doppler_hz)?;
        link.zeta = 1.0 / libm::pow(distance, pl_exponent);
        link.pl_exponent = pl_exponent;
        link.distance = Some(distance);
        Ok(link)
    }
}

fn bpsk_frame(
    n: usize,
    power: f64,
    symbol_period: f64,
    mut negative: impl FnMut(usize) -> bool,
) -> Result<ComplexFrame> {
    if n == 0 {
        return Err(Error::Domain("need at least one pilot"));
    }
    if !(power > 0.0) {
        return Err(Error::Domain("pilot power must be > 0"));
    }
    let amp = math::sqrt(power);
    let samples = (0..n).map(|i| Complex64::new(if negative(i) { -amp } else { amp }, 0.0)).collect();
    ComplexFrame::new(samples, symbol_period)
}

/// Antipodal BPSK pilots with alternating signs, starting at `+sqrt(power)`.
pub fn bpsk_pilots_fixed(n: usize, power: f64, symbol_period: f64) -> Result<ComplexFrame> {
    bpsk_frame(n, power, symbol_period, |i| i % 2 == 1)
}

/// Antipodal BPSK pilots with equiprobable random signs.
pub fn bpsk_pilots_random<R: Rng + ?Sized>(
    n: usize,
    power: f64,
    symbol_period: f64,
    rng: &mut R,
) -> Result<ComplexFrame> {
    bpsk_frame(n, power, symbol_period, |_| rng.random::<bool>())
}

/// `y(i) = zeta x(i) exp(j 2 pi f_D i T) + eps(i)`, `eps ~ CN(0, noise_var)`.
pub fn apply_link<R: Rng + ?Sized>(x: &ComplexFrame, link: &LinkModel, rng: &mut R) -> ComplexFrame {
    let cycles_per_symbol = link.doppler_hz * x.symbol_period;
    let noise_sd = math::sqrt(0.5 * link.noise_var);
    let samples = x
        .samples
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let cycles = cycles_per_symbol * i as f64;
            let phase = 2.0 * PI * (cycles - math::floor(cycles));
            let rotated = s * link.zeta * Complex64::new(libm::cos(phase), libm::sin(phase));
            if noise_sd > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                rotated + Complex64::new(re, im) * noise_sd
            } else {
                rotated
            }
        })
        .collect();
    ComplexFrame { samples, symbol_period: x.symbol_period }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Moments;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixed_pilots_are_unit_modulus_antipodal() {
        let f = bpsk_pilots_fixed(4, 1.0, 1e-6).unwrap();
        let re: Vec<f64> = f.samples.iter().map(|c| c.re).collect();
        assert_eq!(re, [1.0, -1.0, 1.0, -1.0]);
        assert!(f.samples.iter().all(|c| c.norm() == 1.0 && c.im == 0.0));
    }

    #[test]
    fn random_pilot_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = bpsk_pilots_random(100_000, 10.0, 1e-6, &mut rng).unwrap();
        let mean_power = f.energy() / f.len() as f64;
        assert!((mean_power - 10.0).abs() / 10.0 < 1e-3);
        let positives = f.samples.iter().filter(|c| c.re > 0.0).count();
        assert!((positives as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn symbol_energy_ten_db() {
        let power = libm::pow(10.0, 10.0 / 10.0);
        let f = bpsk_pilots_fixed(8, power, 1e-6).unwrap();
        for c in &f.samples {
            assert_relative_eq!(c.norm_sqr(), 10.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn invalid_pilot_requests() {
        assert!(bpsk_pilots_fixed(0, 1.0, 1e-6).is_err());
        assert!(bpsk_pilots_fixed(4, 0.0, 1e-6).is_err());
        assert!(bpsk_pilots_fixed(4, 1.0, 0.0).is_err());
    }

    #[test]
    fn identity_link() {
        let x = bpsk_pilots_fixed(16, 2.0, 1e-6).unwrap();
        let link = LinkModel::unit_gain(0.0, 0.0).unwrap();
        let y = apply_link(&x, &link, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(y, x);
    }

    #[test]
    fn noiseless_rotation_keeps_modulus_and_energy() {
        let x = bpsk_pilots_fixed(64, 3.0, 1e-6).unwrap();
        let link = LinkModel::with_path_loss(10.0, 1.0, 0.0, 12_345.0).unwrap();
        assert_relative_eq!(link.zeta, 0.1);
        let y = apply_link(&x, &link, &mut ChaCha8Rng::seed_from_u64(0));
        for (a, b) in x.samples.iter().zip(&y.samples) {
            assert_relative_eq!(b.norm(), link.zeta * a.norm(), max_relative = 1e-12);
        }
        assert_relative_eq!(y.energy(), link.zeta * link.zeta * x.energy(), max_relative = 1e-12);
    }

    #[test]
    fn empirical_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise_var = libm::pow(10.0, 0.1);
        let x = bpsk_pilots_random(100_000, 10.0, 1e-6, &mut rng).unwrap();
        let link = LinkModel::unit_gain(noise_var, 500.0).unwrap();
        let y = apply_link(&x, &link, &mut rng);
        let noise: Vec<Complex64> = y
            .samples
            .iter()
            .zip(&x.samples)
            .enumerate()
            .map(|(i, (y, x))| {
                let ph = 2.0 * PI * 500.0 * 1e-6 * i as f64;
                y - x * Complex64::new(libm::cos(ph), libm::sin(ph))
            })
            .collect();
        let noise_power = noise.iter().map(|c| c.norm_sqr()).sum::<f64>() / noise.len() as f64;
        let snr = (x.energy() / x.len() as f64) / noise_power;
        assert!((snr - 10.0 / noise_var).abs() / (10.0 / noise_var) < 0.02, "snr {snr}");

        let re: Moments = noise.iter().map(|c| c.re).collect();
        let im: Moments = noise.iter().map(|c| c.im).collect();
        assert!((re.variance() - noise_var / 2.0).abs() / (noise_var / 2.0) < 0.02);
        assert!((im.variance() - noise_var / 2.0).abs() / (noise_var / 2.0) < 0.02);
        let cross = noise.iter().map(|c| c.re * c.im).sum::<f64>() / noise.len() as f64;
        assert!(cross.abs() < 0.01);
    }
}
