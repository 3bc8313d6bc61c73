//! Quantization of NPSDS estimates into key symbols, per-duration simulation
//! and the empirical KDR / MSE metrics.

use alloc::vec::Vec;

use rand::Rng;

use crate::geometry::{self, Node, Vec3};
use crate::math;
use crate::scenario::Scenario;
use crate::signalchain::{apply_link, bpsk_pilots_fixed, LinkModel};
use crate::spectrum::{estimate_exponential, ml_estimate, power_spectrum};
use crate::{Error, Result};

/// How the quantizer step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StepRule {
    /// `delta` itself.
    Absolute(f64),
    /// `gamma = delta / E[theta]`.
    Normalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantizerConfig {
    pub step: StepRule,
    pub levels: u32,
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        QuantizerConfig { step: StepRule::Normalized(1.0), levels: 2 }
    }
}

impl QuantizerConfig {
    /// Fix the step, using `mean_theta` for a normalized rule.
    pub fn resolve(&self, mean_theta: f64) -> Result<Quantizer> {
        let step = match self.step {
            StepRule::Absolute(d) => d,
            StepRule::Normalized(g) => {
                if !(g > 0.0) {
                    return Err(Error::Domain("normalized step must be > 0"));
                }
                g * mean_theta
            }
        };
        Quantizer::new(step, self.levels)
    }
}

/// Uniform quantizer: index `floor(theta / step)`, symbol `index mod levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    pub step: f64,
    pub levels: u32,
}

impl Quantizer {
    pub fn new(step: f64, levels: u32) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Domain("quantizer step must be finite and > 0"));
        }
        if levels < 2 {
            return Err(Error::Domain("quantizer needs at least two levels"));
        }
        Ok(Quantizer { step, levels })
    }

    pub fn quantize(&self, theta_hat: f64) -> Result<(i64, u32)> {
        if !(theta_hat >= 0.0) || !theta_hat.is_finite() {
            return Err(Error::Domain("estimate must be finite and >= 0"));
        }
        let index = math::floor(theta_hat / self.step) as i64;
        let symbol = index.rem_euclid(i64::from(self.levels)) as u32;
        Ok((index, symbol))
    }

    /// `ceil(log2 levels)`.
    pub fn bits_per_symbol(&self) -> u32 {
        u32::BITS - (self.levels - 1).leading_zeros()
    }
}

/// The four estimation links. `AB` is Alice's estimate of the Alice-Bob
/// NPSDS, `BA` Bob's; `AE` and `BE` are Eve's estimates from each sender.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Link {
    AB,
    BA,
    AE,
    BE,
}

impl Link {
    pub const ALL: [Link; 4] = [Link::AB, Link::BA, Link::AE, Link::BE];

    pub fn label(self) -> &'static str {
        match self {
            Link::AB => "ab",
            Link::BA => "ba",
            Link::AE => "ae",
            Link::BE => "be",
        }
    }

    /// The node holding the estimate.
    pub fn holder(self) -> Node {
        match self {
            Link::AB => Node::Alice,
            Link::BA => Node::Bob,
            Link::AE | Link::BE => Node::Eve,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkThetas {
    pub ab: f64,
    pub ba: f64,
    pub ae: f64,
    pub be: f64,
}

impl LinkThetas {
    pub fn get(&self, link: Link) -> f64 {
        match link {
            Link::AB => self.ab,
            Link::BA => self.ba,
            Link::AE => self.ae,
            Link::BE => self.be,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationRecord {
    pub t: u64,
    /// Shared Alice-Bob NPSDS.
    pub theta_true: f64,
    /// True NPSDS per link; `ab` and `ba` both equal `theta_true`.
    pub link_theta: LinkThetas,
    pub theta_hat: LinkThetas,
}

impl DurationRecord {
    /// Error of `link`'s estimate against the shared Alice-Bob NPSDS.
    pub fn error(&self, link: Link) -> f64 {
        self.theta_hat.get(link) - self.theta_true
    }
}

/// True NPSDS of each link for one draw of the stochastic velocities.
pub fn draw_link_thetas<R: Rng + ?Sized>(s: &Scenario, rng: &mut R) -> Result<LinkThetas> {
    let va = s.alice.v_det + geometry::draw_stochastic_velocity(s.alice.sigma_v, rng);
    let vb = s.bob.v_det + geometry::draw_stochastic_velocity(s.bob.sigma_v, rng);
    let ve = s.eve.v_det + geometry::draw_stochastic_velocity(s.eve.sigma_v, rng);
    let (pa, pb, pe) = (s.alice.position, s.bob.position, s.eve.position);
    let doppler = |p: Vec3, v: Vec3, q: Vec3, w: Vec3| -> Result<f64> {
        Ok(s.theta_of_nominal(geometry::nominal_doppler(p, v, q, w)?))
    };
    let ab = doppler(pa, va, pb, vb)?;
    Ok(LinkThetas { ab, ba: ab, ae: doppler(pa, va, pe, ve)?, be: doppler(pb, vb, pe, ve)? })
}

/// ML estimates from `n` exponential spectral samples per link, drawn in the
/// order `ab, ba, ae, be`.
pub fn estimate_links<R: Rng + ?Sized>(theta: &LinkThetas, n: usize, rng: &mut R) -> Result<LinkThetas> {
    Ok(LinkThetas {
        ab: estimate_exponential(theta.ab, n, rng)?,
        ba: estimate_exponential(theta.ba, n, rng)?,
        ae: estimate_exponential(theta.ae, n, rng)?,
        be: estimate_exponential(theta.be, n, rng)?,
    })
}

/// One key duration: draw the stochastic velocities, form the quadratic-law
/// NPSDS of every link and estimate each from `n_pilots` spectral samples.
pub fn run_key_duration<R: Rng + ?Sized>(s: &Scenario, t: u64, rng: &mut R) -> Result<DurationRecord> {
    let link_theta = draw_link_thetas(s, rng)?;
    let theta_hat = estimate_links(&link_theta, s.n_pilots, rng)?;
    Ok(DurationRecord { t, theta_true: link_theta.ab, link_theta, theta_hat })
}

/// True NPSDS per link when the Alice-Bob value is pinned to `theta_t`.
///
/// Eve's values keep their route-geometry ratio to the Alice-Bob link,
/// `theta_t (f_me / f_ab)^2`.
pub fn fixed_theta_links(s: &Scenario, theta_t: f64) -> Result<LinkThetas> {
    let ab = s.deterministic_doppler(Node::Alice, Node::Bob)?.f_nominal;
    if ab == 0.0 {
        return Err(Error::Domain("route geometry gives zero Alice-Bob Doppler"));
    }
    let ae = s.deterministic_doppler(Node::Alice, Node::Eve)?.f_nominal / ab;
    let be = s.deterministic_doppler(Node::Bob, Node::Eve)?.f_nominal / ab;
    Ok(LinkThetas { ab: theta_t, ba: theta_t, ae: theta_t * ae * ae, be: theta_t * be * be })
}

/// NPSDS estimate from an actual received frame: fixed BPSK pilots through a
/// unit-gain Doppler link, DFT, then the spectral sample mean.
pub fn frame_path_estimate<R: Rng + ?Sized>(s: &Scenario, doppler_hz: f64, rng: &mut R) -> Result<f64> {
    let x = bpsk_pilots_fixed(s.n_pilots, s.power, s.symbol_period)?;
    let link = LinkModel::unit_gain(s.noise_var, doppler_hz)?;
    let y = apply_link(&x, &link, rng);
    Ok(ml_estimate(&power_spectrum(&y)))
}

/// One node's key material over `D` durations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyStream {
    pub link: Link,
    pub indices: Vec<i64>,
    pub symbols: Vec<u32>,
    /// `ceil(log2 L)` bits per symbol, most significant first.
    pub bits: Vec<u8>,
}

impl KeyStream {
    pub fn from_estimates(link: Link, estimates: &[f64], q: &Quantizer) -> Result<Self> {
        let width = q.bits_per_symbol();
        let mut indices = Vec::with_capacity(estimates.len());
        let mut symbols = Vec::with_capacity(estimates.len());
        let mut bits = Vec::with_capacity(estimates.len() * width as usize);
        for &x in estimates {
            let (i, sym) = q.quantize(x)?;
            indices.push(i);
            symbols.push(sym);
            for b in (0..width).rev() {
                bits.push(((sym >> b) & 1) as u8);
            }
        }
        Ok(KeyStream { link, indices, symbols, bits })
    }

    pub fn from_records(link: Link, records: &[DurationRecord], q: &Quantizer) -> Result<Self> {
        let est: Vec<f64> = records.iter().map(|r| r.theta_hat.get(link)).collect();
        Self::from_estimates(link, &est, q)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

fn mismatch_rate<T: PartialEq>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Usage("key streams differ in length"));
    }
    if a.is_empty() {
        return Err(Error::Usage("key streams are empty"));
    }
    let wrong = a.iter().zip(b).filter(|(x, y)| x != y).count();
    Ok(wrong as f64 / a.len() as f64)
}

/// Fraction of durations whose symbols differ.
pub fn kdr(s1: &KeyStream, s2: &KeyStream) -> Result<f64> {
    mismatch_rate(&s1.symbols, &s2.symbols)
}

/// Fraction of differing key bits.
pub fn bit_kdr(s1: &KeyStream, s2: &KeyStream) -> Result<f64> {
    mismatch_rate(&s1.bits, &s2.bits)
}

/// Mean of `(theta_hat[link] - theta_true)^2`.
pub fn mse(records: &[DurationRecord], link: Link) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Usage("no records"));
    }
    let sum: f64 = records
        .iter()
        .map(|r| {
            let e = r.error(link);
            e * e
        })
        .sum();
    Ok(sum / records.len() as f64)
}
