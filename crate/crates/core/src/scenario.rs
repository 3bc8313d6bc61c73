//! Physical scenario: link parameters plus the three spacecraft.

use crate::analytic::NpsdsLaw;
use crate::geometry::{self, DopplerObservation, Node, SpacecraftState, Vec3};
use crate::math::{self, SPEED_OF_LIGHT};
use crate::spectrum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Carrier frequency [Hz].
    pub carrier_hz: f64,
    /// Symbol period [s].
    pub symbol_period: f64,
    /// Pilot symbols per key duration.
    pub n_pilots: usize,
    /// Linear pilot power.
    pub power: f64,
    /// Linear noise variance.
    pub noise_var: f64,
    pub alice: SpacecraftState,
    pub bob: SpacecraftState,
    pub eve: SpacecraftState,
}

pub const DEFAULT_KAPPA: f64 = 0.1;
const LEGIT_SPEED: f64 = 6700.0;
const EVE_SPEED: f64 = 2000.0;
const BASELINE: f64 = 1.0e6;
const TILT_DEG: f64 = 1.0;

impl Default for Scenario {
    /// 1 GHz carrier, 1 us symbols, 10 dB symbol energy, 1 dB noise, 50 pilots.
    ///
    /// Alice and Bob fly 1000 km apart on near-parallel tracks at 6700 m/s,
    /// each tilted 1 degree toward the other. Eve flies at 2000 m/s at 45
    /// degrees to their baseline, 1000 km above its midpoint, with no
    /// stochastic velocity.
    fn default() -> Self {
        let tilt = TILT_DEG.to_radians();
        let (s, c) = (libm::sin(tilt), libm::cos(tilt));
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let sigma = math::sqrt(DEFAULT_KAPPA * LEGIT_SPEED);
        let alice = SpacecraftState {
            id: Node::Alice,
            position: Vec3::new(-0.5 * BASELINE, 0.0, 0.0),
            v_det: Vec3::new(s, c, 0.0) * LEGIT_SPEED,
            sigma_v: sigma,
            a_max: 1.0,
        };
        let bob = SpacecraftState {
            id: Node::Bob,
            position: Vec3::new(0.5 * BASELINE, 0.0, 0.0),
            v_det: Vec3::new(-s, c, 0.0) * LEGIT_SPEED,
            sigma_v: sigma,
            a_max: 1.0,
        };
        let eve = SpacecraftState {
            id: Node::Eve,
            position: Vec3::new(0.0, 0.0, BASELINE),
            v_det: Vec3::new(h, h, 0.0) * EVE_SPEED,
            sigma_v: 0.0,
            a_max: 1.0,
        };
        Scenario {
            carrier_hz: 1.0e9,
            symbol_period: 1.0e-6,
            n_pilots: 50,
            power: 10.0,
            noise_var: libm::pow(10.0, 0.1),
            alice,
            bob,
            eve,
        }
    }
}

/// `sigma_v = sqrt(kappa |v_det|)`.
pub fn sigma_from_kappa(kappa: f64, s: &SpacecraftState) -> Result<f64> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain("mobility constant must be finite and >= 0"));
    }
    Ok(math::sqrt(kappa * s.v_det.norm()))
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        for (v, what) in [
            (self.carrier_hz, "carrier frequency must be > 0"),
            (self.symbol_period, "symbol period must be > 0"),
            (self.power, "power must be > 0"),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(what));
            }
        }
        if !(self.noise_var >= 0.0) || !self.noise_var.is_finite() {
            return Err(Error::Domain("noise variance must be finite and >= 0"));
        }
        if self.n_pilots == 0 {
            return Err(Error::Domain("n_pilots must be >= 1"));
        }
        self.alice.validate()?;
        self.bob.validate()?;
        self.eve.validate()?;
        if self.alice.position == self.bob.position
            || self.alice.position == self.eve.position
            || self.bob.position == self.eve.position
        {
            return Err(Error::Domain("spacecraft positions must be distinct"));
        }
        Ok(())
    }

    /// Replace Alice's and Bob's stochastic velocity spread by mobility constants.
    pub fn with_mobility_constants(mut self, kappa_a: f64, kappa_b: f64) -> Result<Self> {
        self.alice.sigma_v = sigma_from_kappa(kappa_a, &self.alice)?;
        self.bob.sigma_v = sigma_from_kappa(kappa_b, &self.bob)?;
        Ok(self)
    }

    /// `f_c / c`, the factor from range rate [m/s] to cyclic Doppler [Hz].
    pub fn doppler_scale(&self) -> f64 {
        self.carrier_hz / SPEED_OF_LIGHT
    }

    pub fn state(&self, node: Node) -> &SpacecraftState {
        match node {
            Node::Alice => &self.alice,
            Node::Bob => &self.bob,
            Node::Eve => &self.eve,
        }
    }

    /// Route-velocity Doppler of `m -> k`.
    pub fn deterministic_doppler(&self, m: Node, k: Node) -> Result<DopplerObservation> {
        geometry::relative_doppler(self.state(m), self.state(k), self.carrier_hz)
    }

    /// Quadratic-law NPSDS of a link with range rate `f_nominal` [m/s].
    pub fn theta_of_nominal(&self, f_nominal: f64) -> f64 {
        spectrum::quadratic_npsds(self.doppler_scale() * f_nominal, self.power, self.symbol_period)
    }

    /// Law of the Alice-Bob NPSDS over the stochastic velocities.
    pub fn npsds_law(&self) -> Result<NpsdsLaw> {
        let k = self.doppler_scale();
        let f_hat = self.deterministic_doppler(Node::Alice, Node::Bob)?.f_nominal;
        let var = geometry::sigma_d_squared(&self.alice, &self.bob);
        NpsdsLaw::from_doppler(self.power, self.symbol_period, k * f_hat, k * k * var)
    }

    pub fn mean_theta(&self) -> Result<f64> {
        Ok(self.npsds_law()?.mean())
    }
}
