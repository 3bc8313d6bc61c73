//! Closed-form performance theory.
//!
//! - Secret key rate from the Doppler entropy, and its Gaussian maximum.
//! - The NPSDS law: `theta / sigma_theta^2` is non-central chi-squared with one
//!   degree of freedom and non-centrality `lambda`.
//! - The estimator law: truncated normal `N(theta, theta^2 / N)` on `[0, inf)`.
//! - The key matching probability `P_c`, a double integral over the NPSDS and
//!   Alice's estimate, evaluated by adaptive quadrature.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use crate::math::{self, SPEED_OF_LIGHT};
use crate::quadrature::{integrate, integrate_with_breaks, QuadratureSpec};
use crate::{Error, Result};

/// Achievable key rate `ln(f_c / c) + h(f~)` in nats.
pub fn key_rate(entropy_nats: f64, f_c: f64) -> Result<f64> {
    if !(f_c > 0.0) {
        return Err(Error::Domain("carrier frequency must be > 0"));
    }
    Ok(math::ln(f_c / SPEED_OF_LIGHT) + entropy_nats)
}

/// Key rate for Gaussian stochastic Doppler with variance `sigma_d_sq` [m^2/s^2]:
/// `1/2 ln(2 pi e sigma_d^2) + ln(f_c / c)`.
pub fn max_key_rate(sigma_d_sq: f64, f_c: f64) -> Result<f64> {
    if !(sigma_d_sq > 0.0) {
        return Err(Error::Domain("Doppler variance must be > 0"));
    }
    key_rate(0.5 * math::ln(2.0 * PI * E * sigma_d_sq), f_c)
}

/// Law of the NPSDS under Gaussian Doppler.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NpsdsLaw {
    /// `P T^3 sigma^2 / 2`, with `sigma^2` the cyclic Doppler variance [Hz^2].
    pub sigma_theta_sq: f64,
    /// Non-centrality `mean^2 / sigma^2` of the Doppler.
    pub lambda: f64,
}

impl NpsdsLaw {
    pub fn new(sigma_theta_sq: f64, lambda: f64) -> Result<Self> {
        if !(sigma_theta_sq > 0.0) || !sigma_theta_sq.is_finite() {
            return Err(Error::Domain("sigma_theta_sq must be finite and > 0"));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain("lambda must be finite and >= 0"));
        }
        Ok(NpsdsLaw { sigma_theta_sq, lambda })
    }

    /// Law of `(P T^3 / 2) f_D^2` for `f_D ~ N(mean_hz, var_hz2)`.
    pub fn from_doppler(power: f64, symbol_period: f64, mean_hz: f64, var_hz2: f64) -> Result<Self> {
        if !(var_hz2 > 0.0) {
            return Err(Error::Domain("Doppler variance must be > 0"));
        }
        let t = symbol_period;
        Self::new(0.5 * power * t * t * t * var_hz2, mean_hz * mean_hz / var_hz2)
    }

    pub fn mean(&self) -> f64 {
        self.sigma_theta_sq * (1.0 + self.lambda)
    }

    /// `P(Theta <= theta)`: with `r = sqrt(theta / s)`,
    /// `Phi(r - sqrt(lambda)) - Phi(-r - sqrt(lambda))`.
    pub fn cdf(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        let r = math::sqrt(theta / self.sigma_theta_sq);
        let mu = math::sqrt(self.lambda);
        math::normal_interval(-r - mu, r - mu)
    }

    /// Upper-tail probability `P(Theta > theta)`.
    pub fn sf(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 1.0;
        }
        let r = math::sqrt(theta / self.sigma_theta_sq);
        let mu = math::sqrt(self.lambda);
        math::normal_sf(r - mu) + math::normal_sf(r + mu)
    }

    /// Smallest `theta` with `P(Theta > theta) <= tail`, by bisection.
    pub fn upper_quantile(&self, tail: f64) -> f64 {
        let mu = math::sqrt(self.lambda);
        let (mut lo, mut hi) = (0.0_f64, mu + 40.0);
        let tail_at = |r: f64| math::normal_sf(r - mu) + math::normal_sf(r + mu);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tail_at(mid) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.sigma_theta_sq * hi * hi
    }
}

/// `ln I_{-1/2}(z) = 1/2 ln(2 / (pi z)) + ln cosh z`, for `z > 0`.
pub fn ln_bessel_i_neg_half(z: f64) -> f64 {
    0.5 * math::ln(2.0 / (PI * z)) + math::ln_cosh(z)
}

/// Density of the NPSDS.
///
/// With `y = theta / s`, the density is
/// `(1 / 2s) exp(-(y + lambda) / 2) (y / lambda)^(-1/4) I_{-1/2}(sqrt(lambda y))`,
/// evaluated in the log domain. At `lambda = 0` it reduces to the scaled
/// central chi-squared `exp(-y / 2) / sqrt(2 pi s theta)`.
pub fn npsds_pdf(theta: f64, law: &NpsdsLaw) -> f64 {
    if !(theta > 0.0) {
        return 0.0;
    }
    let s = law.sigma_theta_sq;
    let y = theta / s;
    if law.lambda == 0.0 {
        return math::exp(-0.5 * y) / math::sqrt(2.0 * PI * s * theta);
    }
    let lam = law.lambda;
    let z = math::sqrt(lam * y);
    let ln_pdf = -math::ln(2.0 * s) - 0.5 * (y + lam) - 0.25 * math::ln(y / lam) + ln_bessel_i_neg_half(z);
    math::exp(ln_pdf)
}

/// CDF of the NPSDS (see [`NpsdsLaw::cdf`]).
pub fn npsds_cdf(theta: f64, law: &NpsdsLaw) -> f64 {
    law.cdf(theta)
}

fn estimator_scale(theta_t: f64, n: usize) -> Result<f64> {
    if !(theta_t > 0.0) || !theta_t.is_finite() {
        return Err(Error::Domain("theta_t must be finite and > 0"));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1"));
    }
    Ok(theta_t / math::sqrt(n as f64))
}

/// Density of the ML estimate: `N(theta_t, theta_t^2 / n)` truncated to `[0, inf)`.
pub fn estimator_pdf(theta_hat: f64, theta_t: f64, n: usize) -> Result<f64> {
    let sd = estimator_scale(theta_t, n)?;
    if theta_hat < 0.0 {
        return Ok(0.0);
    }
    let z = (theta_hat - theta_t) / sd;
    Ok(math::normal_pdf(z) / sd / math::normal_cdf(theta_t / sd))
}

/// CDF of the truncated-normal estimator law.
pub fn estimator_cdf(theta_hat: f64, theta_t: f64, n: usize) -> Result<f64> {
    let sd = estimator_scale(theta_t, n)?;
    if theta_hat <= 0.0 {
        return Ok(0.0);
    }
    let lower = -theta_t / sd;
    Ok(math::normal_interval(lower, (theta_hat - theta_t) / sd) / math::normal_cdf(theta_t / sd))
}

/// Probability that Bob's estimate lands in `[l delta, (l + 1) delta]` given
/// Alice's estimate, under the reciprocal-noise model
/// `theta_ba ~ N(theta_ab, 2 theta_t^2 / N)`.
///
/// This is the exact Gaussian interval mass,
/// `1/2 [erf((b - mu) / sqrt(4 theta_t^2 / N)) - erf((a - mu) / sqrt(4 theta_t^2 / N))]`.
pub fn bin_probability(l: i64, delta: f64, theta_hat_ab: f64, theta_t: f64, n: usize) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain("delta must be > 0"));
    }
    let sd = estimator_scale(theta_t, n)? * core::f64::consts::SQRT_2;
    let lo = l as f64 * delta;
    Ok(math::normal_interval((lo - theta_hat_ab) / sd, (lo + delta - theta_hat_ab) / sd))
}

/// How Bob's estimate relates to Alice's in the `P_c` integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ConditionalModel {
    /// Both estimates are independent `N(theta_t, theta_t^2 / N)` given
    /// `theta_t`, truncated to `[0, inf)`.
    #[default]
    Independent,
    /// Bob's estimate is `N(theta_ab, 2 theta_t^2 / N)` around Alice's
    /// ([`bin_probability`]).
    Reciprocal,
}

/// Which outcomes count as a key match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MatchRule {
    /// Same quantizer index.
    SameIndex,
    /// Same symbol, `index mod levels`.
    SameSymbol { levels: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KdrModel {
    pub conditional: ConditionalModel,
    pub rule: MatchRule,
}

impl Default for KdrModel {
    fn default() -> Self {
        KdrModel { conditional: ConditionalModel::Independent, rule: MatchRule::SameSymbol { levels: 2 } }
    }
}

/// Probability mass that Bob's estimate falls in any bin matching bin `l`.
fn match_mass(l: i64, delta: f64, theta_hat_ab: f64, theta_t: f64, n: usize, model: &KdrModel, span: f64) -> f64 {
    let sd_est = theta_t / math::sqrt(n as f64);
    let (center, sd, normalizer, lower_cut) = match model.conditional {
        ConditionalModel::Independent => (theta_t, sd_est, math::normal_cdf(theta_t / sd_est), 0.0),
        ConditionalModel::Reciprocal => (theta_hat_ab, sd_est * core::f64::consts::SQRT_2, 1.0, f64::NEG_INFINITY),
    };
    let mass = |bin: i64| {
        let a = (bin as f64 * delta).max(lower_cut);
        let b = (bin as f64 + 1.0) * delta;
        if b <= a {
            return 0.0;
        }
        math::normal_interval((a - center) / sd, (b - center) / sd) / normalizer
    };
    match model.rule {
        MatchRule::SameIndex => mass(l),
        MatchRule::SameSymbol { levels } => {
            let step = i64::from(levels.max(1));
            let lo_bin = math::floor((center - span * sd) / delta) as i64 - 1;
            let hi_bin = math::floor((center + span * sd) / delta) as i64 + 1;
            // first bin >= lo_bin congruent to l
            let first = lo_bin + (l - lo_bin).rem_euclid(step);
            let mut total = 0.0;
            let mut bin = first;
            while bin <= hi_bin {
                total += mass(bin);
                bin += step;
            }
            total
        }
    }
}

/// Conditional matching probability given `theta_t`: the inner integral over
/// Alice's estimate.
pub fn match_probability_given_theta(
    delta: f64,
    theta_t: f64,
    n: usize,
    model: &KdrModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let sd = estimator_scale(theta_t, n)?;
    let lo = (theta_t - quad.gaussian_span * sd).max(0.0);
    let hi = theta_t + quad.gaussian_span * sd;
    // split at quantizer edges, where the bin of Alice's estimate changes
    let first_edge = math::floor(lo / delta) as i64 + 1;
    let mut breaks = Vec::new();
    breaks.push(lo);
    let mut k = first_edge;
    while (k as f64) * delta < hi {
        breaks.push(k as f64 * delta);
        k += 1;
    }
    breaks.push(hi);
    let integrand = |x: f64| {
        let pdf = estimator_pdf(x, theta_t, n).unwrap_or(0.0);
        if pdf == 0.0 {
            return 0.0;
        }
        let l = math::floor(x / delta) as i64;
        pdf * match_mass(l, delta, x, theta_t, n, model, quad.gaussian_span)
    };
    Ok(integrate_with_breaks(integrand, &breaks, quad)?.value)
}

/// Key matching probability `P_c` for quantizer step `delta`.
///
/// Outer integral over the NPSDS law (in `u = sqrt(theta)`, which removes the
/// `theta^(-1/2)` singularity at zero), inner integral over Alice's estimate.
/// The theoretical KDR is `1 - P_c`.
pub fn key_match_probability(
    delta: f64,
    law: &NpsdsLaw,
    n: usize,
    model: &KdrModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    if !(delta > 0.0) {
        return Err(Error::Domain("delta must be > 0"));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1"));
    }
    let u_max = math::sqrt(law.upper_quantile(quad.tail_mass));
    let mut failure = None;
    let outer = |u: f64| {
        let theta = u * u;
        let weight = npsds_pdf(theta, law) * 2.0 * u;
        if weight == 0.0 || failure.is_some() {
            return 0.0;
        }
        match match_probability_given_theta(delta, theta, n, model, quad) {
            Ok(p) => weight * p,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let result = integrate(outer, 0.0, u_max, quad);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(result?.value.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdrPoint {
    pub gamma: f64,
    pub n: usize,
    pub delta: f64,
    pub p_c: f64,
    pub kdr: f64,
}

/// `1 - P_c` over a grid of normalized steps `gamma = delta / E[theta]` and
/// observation counts.
pub fn theoretical_kdr_curve(
    gamma_grid: &[f64],
    n_set: &[usize],
    law: &NpsdsLaw,
    model: &KdrModel,
    quad: &QuadratureSpec,
) -> Result<Vec<KdrPoint>> {
    if gamma_grid.is_empty() || n_set.is_empty() {
        return Err(Error::Usage("grids must be nonempty"));
    }
    let mean = law.mean();
    let mut out = Vec::with_capacity(gamma_grid.len() * n_set.len());
    for &n in n_set {
        for &gamma in gamma_grid {
            let delta = gamma * mean;
            let p_c = key_match_probability(delta, law, n, model, quad)?;
            out.push(KdrPoint { gamma, n, delta, p_c, kdr: 1.0 - p_c });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn key_rate_identities() {
        let c = SPEED_OF_LIGHT;
        assert_relative_eq!(key_rate(0.0, 1e9).unwrap(), math::ln(1e9 / c));
        assert_relative_eq!(key_rate(1.7, c).unwrap(), 1.7);
        assert!(key_rate(1.0, 0.0).is_err());
    }

    #[test]
    fn max_key_rate_identities() {
        let f_c = 1e9;
        let base = math::ln(f_c / SPEED_OF_LIGHT);
        assert_relative_eq!(max_key_rate(1.0 / (2.0 * PI * E), f_c).unwrap(), base, epsilon = 1e-14);
        let r1 = max_key_rate(100.0, f_c).unwrap();
        let r2 = max_key_rate(200.0, f_c).unwrap();
        assert_relative_eq!(r2 - r1, 0.5 * core::f64::consts::LN_2, epsilon = 1e-13);
        // independently evaluated: 0.5 ln(2 pi e 1340) + ln(1e9 / 299792458)
        assert_relative_eq!(max_key_rate(1340.0, f_c).unwrap(), 6.223815830078409, epsilon = 1e-12);
        assert!(max_key_rate(0.0, f_c).is_err());
        assert!(max_key_rate(-1.0, f_c).is_err());
    }

    #[test]
    fn npsds_central_limit_form() {
        let law = NpsdsLaw::new(2.0, 0.0).unwrap();
        for &th in &[0.01, 0.5, 3.0, 20.0] {
            let expected = math::exp(-th / 4.0) / math::sqrt(2.0 * PI * 2.0 * th);
            assert_relative_eq!(npsds_pdf(th, &law), expected, max_relative = 1e-14);
        }
        assert_eq!(npsds_pdf(0.0, &law), 0.0);
        assert_eq!(npsds_pdf(-1.0, &law), 0.0);
    }

    #[test]
    fn npsds_pdf_matches_folded_normal_form() {
        // theta = s x^2 with x ~ N(sqrt(lambda), 1): density of |x| mapped back
        let law = NpsdsLaw::new(0.7, 6.0).unwrap();
        for &th in &[0.05, 1.0, 4.2, 9.0, 30.0] {
            let r = math::sqrt(th / 0.7);
            let mu = math::sqrt(6.0);
            let folded = math::normal_pdf(r - mu) + math::normal_pdf(r + mu);
            let expected = folded / (2.0 * r * 0.7);
            assert_relative_eq!(npsds_pdf(th, &law), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn npsds_pdf_large_argument_is_finite() {
        let law = NpsdsLaw::new(1e-3, 5e4).unwrap();
        let p = npsds_pdf(law.mean(), &law);
        assert!(p.is_finite() && p > 0.0);
    }

    #[test]
    fn npsds_normalization_and_mean_by_quadrature() {
        let q = QuadratureSpec { rel_tol: 1e-10, ..quad() };
        for &lam in &[0.0, 1.0, 10.0] {
            let law = NpsdsLaw::new(1.5, lam).unwrap();
            let hi = law.upper_quantile(1e-14);
            // u = sqrt(theta) substitution for the integrable singularity at 0
            let mass = integrate(|u| npsds_pdf(u * u, &law) * 2.0 * u, 0.0, math::sqrt(hi), &q).unwrap();
            assert!((mass.value - 1.0).abs() < 1e-6, "lambda {lam}: {}", mass.value);
            let mean = integrate(|u| u * u * npsds_pdf(u * u, &law) * 2.0 * u, 0.0, math::sqrt(hi), &q).unwrap();
            assert_relative_eq!(mean.value, 1.5 * (1.0 + lam), max_relative = 1e-4);
        }
    }

    #[test]
    fn npsds_cdf_is_integral_of_pdf() {
        let law = NpsdsLaw::new(0.3, 4.0).unwrap();
        let q = QuadratureSpec { rel_tol: 1e-10, ..quad() };
        for &th in &[0.1, 1.0, 2.5, 6.0] {
            let i = integrate(|u| npsds_pdf(u * u, &law) * 2.0 * u, 0.0, math::sqrt(th), &q).unwrap();
            assert_relative_eq!(npsds_cdf(th, &law), i.value, epsilon = 1e-9);
            assert_relative_eq!(law.cdf(th) + law.sf(th), 1.0, epsilon = 1e-14);
        }
        assert!(law.sf(law.upper_quantile(1e-10)) <= 1e-10);
    }

    #[test]
    fn estimator_density_normalizes() {
        let q = QuadratureSpec { rel_tol: 1e-12, abs_tol: 1e-15, ..quad() };
        for &(th, n) in &[(5.0, 50), (2.0, 1), (0.3, 3)] {
            let sd = th / math::sqrt(n as f64);
            let hi = th + 12.0 * sd;
            let r = integrate(|x| estimator_pdf(x, th, n).unwrap(), 0.0, hi, &q).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "{th} {n}: {}", r.value);
            assert_relative_eq!(estimator_cdf(hi, th, n).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(estimator_pdf(-0.1, 1.0, 4).unwrap(), 0.0);
        assert!(estimator_pdf(1.0, 0.0, 4).is_err());
        assert!(estimator_pdf(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn estimator_mode_at_theta() {
        let at = estimator_pdf(5.0, 5.0, 50).unwrap();
        assert!(estimator_pdf(4.99, 5.0, 50).unwrap() < at);
        assert!(estimator_pdf(5.01, 5.0, 50).unwrap() < at);
    }

    #[test]
    fn bin_probability_examples() {
        // scale sqrt(2/50) = 0.2: Phi(5) - Phi(0)
        let p = bin_probability(1, 1.0, 1.0, 1.0, 50).unwrap();
        assert_relative_eq!(p, math::normal_cdf(5.0) - 0.5, epsilon = 1e-15);
        assert_relative_eq!(p, 0.4999997133484281, epsilon = 1e-12);
        // far interval
        assert!(bin_probability(20, 1.0, 1.0, 1.0, 50).unwrap() < 1e-20);
    }

    #[test]
    fn bin_probabilities_partition() {
        let (delta, th_hat, th, n) = (0.35, 1.2, 1.0, 10);
        let sd = math::sqrt(2.0 / n as f64) * th;
        let negative = math::normal_cdf((0.0 - th_hat) / sd);
        let total: f64 = (0..200).map(|l| bin_probability(l, delta, th_hat, th, n).unwrap()).sum();
        assert!((total + negative - 1.0).abs() < 1e-8);
    }

    fn closed_form_same_symbol(delta: f64, theta: f64, n: usize, levels: i64) -> f64 {
        // independent model: P(same) = sum_r q_r^2
        let sd = theta / math::sqrt(n as f64);
        let norm = math::normal_cdf(theta / sd);
        let mut q = alloc::vec![0.0; levels as usize];
        for l in 0..2000i64 {
            let a = l as f64 * delta;
            let m = math::normal_interval((a - theta) / sd, (a + delta - theta) / sd) / norm;
            q[(l % levels) as usize] += m;
        }
        q.iter().map(|x| x * x).sum()
    }

    #[test]
    fn inner_integral_matches_closed_form() {
        let model = KdrModel::default();
        for &(delta, theta, n) in &[(0.25, 1.0, 10usize), (1.0, 1.3, 20), (2.0, 0.8, 50), (0.1, 1.0, 10)] {
            let p = match_probability_given_theta(delta, theta, n, &model, &quad()).unwrap();
            let cf = closed_form_same_symbol(delta, theta, n, 2);
            assert_relative_eq!(p, cf, epsilon = 1e-8);
        }
    }

    #[test]
    fn match_probability_limits() {
        let law = NpsdsLaw::new(1.0, 40.8).unwrap();
        let model = KdrModel::default();
        // one bin covers everything
        let p = key_match_probability(1e3 * law.mean(), &law, 10, &model, &quad()).unwrap();
        assert!(p > 1.0 - 1e-3);
        // edge crossings still cost about 2% at N = 5000; scipy reference value
        let p = key_match_probability(law.mean(), &law, 5000, &model, &quad()).unwrap();
        assert!((p - 0.978838).abs() < 5e-4, "{p}");
        let central = NpsdsLaw::new(1.0, 0.0).unwrap();
        let p = key_match_probability(central.mean(), &central, 5000, &model, &quad()).unwrap();
        assert!((p - 0.985279).abs() < 5e-4, "{p}");
        let p = key_match_probability(law.mean(), &law, 50_000, &model, &quad()).unwrap();
        assert!(p > 0.99, "{p}");
        assert!(key_match_probability(0.0, &law, 10, &model, &quad()).is_err());
    }

    #[test]
    fn same_index_and_same_symbol_agree_for_wide_bins() {
        let law = NpsdsLaw::new(1.0, 40.8).unwrap();
        let idx = KdrModel { rule: MatchRule::SameIndex, ..Default::default() };
        let a = key_match_probability(3.0 * law.mean(), &law, 20, &idx, &quad()).unwrap();
        let b = key_match_probability(3.0 * law.mean(), &law, 20, &KdrModel::default(), &quad()).unwrap();
        assert!((a - b).abs() < 1e-6);
        // fine bins: folding recovers matches two bins apart
        let a = key_match_probability(0.25 * law.mean(), &law, 10, &idx, &quad()).unwrap();
        let b = key_match_probability(0.25 * law.mean(), &law, 10, &KdrModel::default(), &quad()).unwrap();
        assert!(b > a + 0.1);
    }

    #[test]
    fn kdr_curve_orderings() {
        let law = NpsdsLaw::new(1.0, 40.8).unwrap();
        let grid = [0.25, 0.5, 1.0, 2.0, 3.0];
        let pts = theoretical_kdr_curve(&grid, &[10, 50], &law, &KdrModel::default(), &quad()).unwrap();
        let (n10, n50) = pts.split_at(grid.len());
        for (a, b) in n10.iter().zip(n50) {
            assert_eq!(a.gamma, b.gamma);
            assert!(b.kdr <= a.kdr + 1e-9, "gamma {}: {} vs {}", a.gamma, a.kdr, b.kdr);
        }
        let far = theoretical_kdr_curve(&[50.0], &[10], &law, &KdrModel::default(), &quad()).unwrap();
        assert!(far[0].kdr < 1e-3);
        assert!(theoretical_kdr_curve(&[], &[10], &law, &KdrModel::default(), &quad()).is_err());
    }
}
