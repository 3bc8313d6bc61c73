//! Spacecraft mobility and Doppler geometry.
//!
//! Velocity is the sum of a publicly known route component `v_det` and an
//! i.i.d. Gaussian component with per-axis standard deviation `sigma_v`. The
//! nominal Doppler of a link is the range rate of the two craft, in m/s; the
//! cyclic Doppler in Hz is that times `f_c / c`.

use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::math::{self, SPEED_OF_LIGHT};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.dot(self))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Vec3::new(s[0], s[1], s[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Node {
    Alice,
    Bob,
    Eve,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacecraftState {
    pub id: Node,
    /// Position [m].
    pub position: Vec3,
    /// Publicly known route velocity [m/s].
    pub v_det: Vec3,
    /// Per-axis standard deviation of the stochastic velocity [m/s].
    pub sigma_v: f64,
    /// Acceleration magnitude bound [m/s^2], used by the timing check only.
    pub a_max: f64,
}

impl SpacecraftState {
    pub fn new(id: Node, position: Vec3, v_det: Vec3, sigma_v: f64, a_max: f64) -> Result<Self> {
        let s = SpacecraftState { id, position, v_det, sigma_v, a_max };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() || !self.v_det.is_finite() {
            return Err(Error::Domain("position and velocity must be finite"));
        }
        if !(self.sigma_v >= 0.0) || !self.sigma_v.is_finite() {
            return Err(Error::Domain("sigma_v must be finite and >= 0"));
        }
        if !(self.a_max >= 0.0) {
            return Err(Error::Domain("a_max must be >= 0"));
        }
        Ok(())
    }
}

/// Doppler of the link `m -> k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerObservation {
    pub link: (Node, Node),
    /// Nominal Doppler (range rate) [m/s].
    pub f_nominal: f64,
    /// Cyclic Doppler `f_c / c * f_nominal` [Hz].
    pub doppler_hz: f64,
    /// Angular Doppler `2 pi * doppler_hz` [rad/s].
    pub omega: f64,
}

impl DopplerObservation {
    pub fn from_nominal(link: (Node, Node), f_nominal: f64, f_c: f64) -> Self {
        let doppler_hz = f_c / SPEED_OF_LIGHT * f_nominal;
        DopplerObservation { link, f_nominal, doppler_hz, omega: 2.0 * PI * doppler_hz }
    }
}

/// `(v_m - v_k) . (p_m - p_k) / |p_m - p_k|`.
pub fn nominal_doppler(p_m: Vec3, v_m: Vec3, p_k: Vec3, v_k: Vec3) -> Result<f64> {
    let los = p_m - p_k;
    let range = los.norm();
    if range == 0.0 {
        return Err(Error::Domain("coincident positions: Doppler undefined"));
    }
    Ok((v_m - v_k).dot(los) / range)
}

/// Doppler of the link `m -> k` using each craft's route velocity.
pub fn relative_doppler(m: &SpacecraftState, k: &SpacecraftState, f_c: f64) -> Result<DopplerObservation> {
    let f = nominal_doppler(m.position, m.v_det, k.position, k.v_det)?;
    Ok(DopplerObservation::from_nominal((m.id, k.id), f, f_c))
}

/// Draw one stochastic velocity `v~` with i.i.d. `N(0, sigma_v^2)` components.
pub fn draw_stochastic_velocity<R: Rng + ?Sized>(sigma_v: f64, rng: &mut R) -> Vec3 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    let z: f64 = rng.sample(StandardNormal);
    Vec3::new(x, y, z) * sigma_v
}

/// Advance one block of length `dt` with constant velocity `v_det + v~`.
///
/// Returns the moved state and the realized total velocity. `v_det` is left
/// untouched.
pub fn brownian_step<R: Rng + ?Sized>(s: &SpacecraftState, dt: f64, rng: &mut R) -> Result<(SpacecraftState, Vec3)> {
    if !(dt > 0.0) {
        return Err(Error::Domain("dt must be > 0"));
    }
    let velocity = s.v_det + draw_stochastic_velocity(s.sigma_v, rng);
    let mut next = *s;
    next.position += velocity * dt;
    Ok((next, velocity))
}

/// Mobility constant `kappa = sigma_v^2 / |v_det|`.
pub fn mobility_constant(s: &SpacecraftState) -> Result<f64> {
    let speed = s.v_det.norm();
    if speed == 0.0 {
        return Err(Error::Domain("mobility constant needs a nonzero route speed"));
    }
    Ok(s.sigma_v * s.sigma_v / speed)
}

/// Variance of the stochastic nominal Doppler between `a` and `b`.
///
/// The line-of-sight direction is a unit vector, so the projection of two
/// isotropic Gaussian velocities has variance `sigma_a^2 + sigma_b^2`
/// whatever the positions are.
pub fn sigma_d_squared(a: &SpacecraftState, b: &SpacecraftState) -> f64 {
    a.sigma_v * a.sigma_v + b.sigma_v * b.sigma_v
}

/// Eve's linear system for `[v_a, p_a, v_b, p_b]` built from her two Doppler
/// measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct EveSystem {
    pub matrix: [[f64; 12]; 2],
    pub rhs: [f64; 2],
    /// Singular values, largest first.
    pub singular_values: [f64; 2],
    pub rank: usize,
}

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Build Eve's system from the nominal Dopplers `f_ae` and `f_be` she measures.
///
/// Each row is `(p_m - p_e)^T v_m - v_e^T p_m = f_me |p_m - p_e| - v_e^T p_e`,
/// i.e. the Doppler equation with the unknown range folded into the right-hand
/// side, so the true state satisfies the system exactly.
pub fn eve_observability_system(
    a: &SpacecraftState,
    b: &SpacecraftState,
    e: &SpacecraftState,
    f_ae: f64,
    f_be: f64,
) -> Result<EveSystem> {
    let da = a.position - e.position;
    let db = b.position - e.position;
    if da.norm() == 0.0 || db.norm() == 0.0 {
        return Err(Error::Domain("Eve coincides with a legitimate node"));
    }
    let ve = e.v_det;
    let mut matrix = [[0.0; 12]; 2];
    matrix[0][0..3].copy_from_slice(&da.to_array());
    matrix[0][3..6].copy_from_slice(&(-ve).to_array());
    matrix[1][6..9].copy_from_slice(&db.to_array());
    matrix[1][9..12].copy_from_slice(&(-ve).to_array());
    let vp = ve.dot(e.position);
    let rhs = [f_ae * da.norm() - vp, f_be * db.norm() - vp];

    let (eig, _) = gram_eigen(&matrix);
    let singular_values = [math::sqrt(eig[0].max(0.0)), math::sqrt(eig[1].max(0.0))];
    let threshold = RANK_TOLERANCE * singular_values[0];
    let rank = singular_values.iter().filter(|&&s| s > threshold && s > 0.0).count();

    Ok(EveSystem { matrix, rhs, singular_values, rank })
}

/// Eigen-decomposition of the 2x2 Gram matrix `M M^T`, eigenvalues descending.
fn gram_eigen(m: &[[f64; 12]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let dot = |i: usize, j: usize| m[i].iter().zip(&m[j]).map(|(x, y)| x * y).sum::<f64>();
    let (g00, g01, g11) = (dot(0, 0), dot(0, 1), dot(1, 1));
    let mean = 0.5 * (g00 + g11);
    let half_diff = 0.5 * (g00 - g11);
    let radius = math::sqrt(half_diff * half_diff + g01 * g01);
    let eig = [mean + radius, mean - radius];
    let vecs = if g01 == 0.0 {
        if g00 >= g11 {
            [[1.0, 0.0], [0.0, 1.0]]
        } else {
            [[0.0, 1.0], [1.0, 0.0]]
        }
    } else {
        let v0 = [eig[0] - g11, g01];
        let n0 = math::sqrt(v0[0] * v0[0] + v0[1] * v0[1]);
        let u0 = [v0[0] / n0, v0[1] / n0];
        [u0, [-u0[1], u0[0]]]
    };
    (eig, vecs)
}

impl EveSystem {
    /// Minimum-norm least-squares solution `M^+ rhs`.
    pub fn min_norm_solution(&self) -> [f64; 12] {
        let (eig, vecs) = gram_eigen(&self.matrix);
        let smax = RANK_TOLERANCE * math::sqrt(eig[0].max(0.0));
        let cutoff = smax * smax;
        // y = (M M^T)^+ rhs
        let mut y = [0.0; 2];
        for (mu, u) in eig.iter().zip(&vecs) {
            if *mu > cutoff && *mu > 0.0 {
                let proj = (u[0] * self.rhs[0] + u[1] * self.rhs[1]) / mu;
                y[0] += proj * u[0];
                y[1] += proj * u[1];
            }
        }
        let mut x = [0.0; 12];
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = self.matrix[0][j] * y[0] + self.matrix[1][j] * y[1];
        }
        x
    }
}

/// Result of the propagation-delay feasibility check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingCheck {
    /// Round-trip timing distance `(1 + alpha) |p_a - p_b| / c` [s].
    pub delta_t: f64,
    /// Largest admissible `|a_A| + |a_B|`, `v_max / delta_t` [m/s^2].
    pub bound: f64,
    pub feasible: bool,
}

/// Check that velocity stays within `v_max` of itself during the pilot
/// exchange, given the two acceleration bounds.
pub fn timing_feasibility(a: &SpacecraftState, b: &SpacecraftState, alpha: f64, v_max: f64) -> Result<TimingCheck> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain("alpha must be >= 0"));
    }
    if !(v_max > 0.0) {
        return Err(Error::Domain("v_max must be > 0"));
    }
    let delta_t = (1.0 + alpha) * (a.position - b.position).norm() / SPEED_OF_LIGHT;
    let bound = if delta_t == 0.0 { f64::INFINITY } else { v_max / delta_t };
    Ok(TimingCheck { delta_t, bound, feasible: a.a_max + b.a_max <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(id: Node, p: Vec3, v: Vec3) -> SpacecraftState {
        SpacecraftState::new(id, p, v, 0.0, 0.0).unwrap()
    }

    #[test]
    fn zero_relative_velocity_gives_zero_doppler() {
        let v = Vec3::new(3.0, -2.0, 7.0);
        let m = state(Node::Alice, Vec3::new(1.0, 2.0, 3.0), v);
        let k = state(Node::Bob, Vec3::new(-5.0, 4.0, 9.0), v);
        assert_eq!(relative_doppler(&m, &k, 1e9).unwrap().f_nominal, 0.0);
    }

    #[test]
    fn one_dimensional_closing() {
        let m = state(Node::Alice, Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0));
        let k = state(Node::Bob, Vec3::new(100.0, 0.0, 0.0), Vec3::ZERO);
        assert_eq!(relative_doppler(&m, &k, 1e9).unwrap().f_nominal, -10.0);
    }

    #[test]
    fn two_ghz_thousand_mps_is_about_six_khz() {
        let m = state(Node::Alice, Vec3::ZERO, Vec3::new(1000.0, 0.0, 0.0));
        let k = state(Node::Bob, Vec3::new(1e6, 0.0, 0.0), Vec3::ZERO);
        let obs = relative_doppler(&m, &k, 2e9).unwrap();
        assert_relative_eq!(obs.doppler_hz.abs(), 6671.281903963041, max_relative = 1e-12);
        assert!((obs.doppler_hz.abs() - 6000.0).abs() / 6000.0 < 0.15);
        assert_relative_eq!(obs.omega, 2.0 * PI * obs.doppler_hz);
    }

    #[test]
    fn coincident_positions_rejected() {
        let m = state(Node::Alice, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let k = state(Node::Bob, Vec3::ZERO, Vec3::ZERO);
        assert!(matches!(relative_doppler(&m, &k, 1e9), Err(Error::Domain(_))));
    }

    #[test]
    fn reciprocal_links_see_the_same_range_rate() {
        let m = state(Node::Alice, Vec3::new(1.0, 2.0, 3.0), Vec3::new(10.0, -3.0, 2.0));
        let k = state(Node::Bob, Vec3::new(-4.0, 0.5, 8.0), Vec3::new(-1.0, 6.0, 0.0));
        let mk = relative_doppler(&m, &k, 1e9).unwrap();
        let km = relative_doppler(&k, &m, 1e9).unwrap();
        assert_eq!(mk.f_nominal, km.f_nominal);
        assert_eq!(km.link, (Node::Bob, Node::Alice));
    }

    #[test]
    fn brownian_without_noise_is_deterministic_drift() {
        let s = state(Node::Alice, Vec3::new(1.0, 1.0, 1.0), Vec3::new(2.0, 3.0, 4.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (next, v) = brownian_step(&s, 1.0, &mut rng).unwrap();
        assert_eq!(next.position, Vec3::new(3.0, 4.0, 5.0));
        assert_eq!(v, s.v_det);
        assert_eq!(next.v_det, s.v_det);
    }

    #[test]
    fn brownian_is_reproducible() {
        let mut s = state(Node::Bob, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        s.sigma_v = 5.0;
        let a = brownian_step(&s, 0.5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = brownian_step(&s, 0.5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(brownian_step(&s, 0.0, &mut ChaCha8Rng::seed_from_u64(9)).is_err());
    }

    #[test]
    fn brownian_velocity_variance() {
        let mut s = state(Node::Alice, Vec3::ZERO, Vec3::new(100.0, 0.0, 0.0));
        s.sigma_v = 5.0;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut sums = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        for _ in 0..n {
            let (_, v) = brownian_step(&s, 1.0, &mut rng).unwrap();
            let d = (v - s.v_det).to_array();
            for i in 0..3 {
                sums[i] += d[i];
                sq[i] += d[i] * d[i];
            }
        }
        for i in 0..3 {
            let mean = sums[i] / n as f64;
            let var = sq[i] / n as f64 - mean * mean;
            assert!((var - 25.0).abs() / 25.0 < 0.03, "axis {i}: {var}");
        }
    }

    #[test]
    fn mobility_constant_examples() {
        let mut s = state(Node::Alice, Vec3::ZERO, Vec3::new(6700.0, 0.0, 0.0));
        s.sigma_v = math::sqrt(670.0);
        assert_relative_eq!(mobility_constant(&s).unwrap(), 0.1, max_relative = 1e-14);
        s.sigma_v = 0.0;
        assert_eq!(mobility_constant(&s).unwrap(), 0.0);
        s.v_det = Vec3::new(0.0, 49.0, 0.0);
        s.sigma_v = 7.0;
        assert_relative_eq!(mobility_constant(&s).unwrap(), 1.0);
        s.v_det = Vec3::ZERO;
        assert!(mobility_constant(&s).is_err());
    }

    #[test]
    fn sigma_d_sums_variances() {
        let mut a = state(Node::Alice, Vec3::ZERO, Vec3::ZERO);
        let mut b = state(Node::Bob, Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO);
        a.sigma_v = math::sqrt(670.0);
        b.sigma_v = math::sqrt(670.0);
        assert_relative_eq!(sigma_d_squared(&a, &b), 1340.0, max_relative = 1e-14);
        b.sigma_v = 0.0;
        assert_relative_eq!(sigma_d_squared(&a, &b), 670.0, max_relative = 1e-14);
        b.position = Vec3::new(-1e7, 3e5, 2.0);
        assert_relative_eq!(sigma_d_squared(&a, &b), 670.0, max_relative = 1e-14);
    }

    #[test]
    fn static_eve_system_has_block_rows() {
        let a = state(Node::Alice, Vec3::new(1.0, 2.0, 3.0), Vec3::new(5.0, 0.0, 0.0));
        let b = state(Node::Bob, Vec3::new(-3.0, 1.0, 0.5), Vec3::new(0.0, 5.0, 0.0));
        let e = state(Node::Eve, Vec3::new(0.5, -1.0, 2.0), Vec3::ZERO);
        let sys = eve_observability_system(&a, &b, &e, 0.0, 0.0).unwrap();
        assert_eq!(&sys.matrix[0][0..3], &(a.position - e.position).to_array());
        assert!(sys.matrix[0][3..].iter().all(|&x| x == 0.0));
        assert_eq!(&sys.matrix[1][6..9], &(b.position - e.position).to_array());
        assert!(sys.matrix[1][..6].iter().chain(&sys.matrix[1][9..]).all(|&x| x == 0.0));
        assert_eq!(sys.rank, 2);
    }

    #[test]
    fn true_state_solves_eve_system() {
        let a = state(Node::Alice, Vec3::new(1e6, 2e5, -3e5), Vec3::new(6700.0, 10.0, 0.0));
        let b = state(Node::Bob, Vec3::new(-2e6, 1e6, 4e5), Vec3::new(-100.0, 6600.0, 5.0));
        let e = state(Node::Eve, Vec3::new(3e5, -1e6, 2e6), Vec3::new(1414.0, 1414.0, 0.0));
        let f_ae = relative_doppler(&a, &e, 1e9).unwrap().f_nominal;
        let f_be = relative_doppler(&b, &e, 1e9).unwrap().f_nominal;
        let sys = eve_observability_system(&a, &b, &e, f_ae, f_be).unwrap();
        let truth: [f64; 12] = {
            let mut t = [0.0; 12];
            t[0..3].copy_from_slice(&a.v_det.to_array());
            t[3..6].copy_from_slice(&a.position.to_array());
            t[6..9].copy_from_slice(&b.v_det.to_array());
            t[9..12].copy_from_slice(&b.position.to_array());
            t
        };
        for r in 0..2 {
            let lhs: f64 = sys.matrix[r].iter().zip(&truth).map(|(m, x)| m * x).sum();
            assert_relative_eq!(lhs, sys.rhs[r], max_relative = 1e-9);
        }
        // the min-norm solution also solves it, but is not the truth
        let x = sys.min_norm_solution();
        for r in 0..2 {
            let lhs: f64 = sys.matrix[r].iter().zip(&x).map(|(m, x)| m * x).sum();
            assert_relative_eq!(lhs, sys.rhs[r], max_relative = 1e-9);
        }
        assert!((x[3] - truth[3]).abs() > 1.0);
    }

    #[test]
    fn eve_on_top_of_alice_is_rejected() {
        let a = state(Node::Alice, Vec3::ZERO, Vec3::ZERO);
        let b = state(Node::Bob, Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO);
        let e = state(Node::Eve, Vec3::ZERO, Vec3::ZERO);
        assert!(eve_observability_system(&a, &b, &e, 0.0, 0.0).is_err());
    }

    #[test]
    fn collinear_static_geometry_keeps_rank_two() {
        let a = state(Node::Alice, Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO);
        let b = state(Node::Bob, Vec3::new(2.0, 0.0, 0.0), Vec3::ZERO);
        let e = state(Node::Eve, Vec3::ZERO, Vec3::ZERO);
        let sys = eve_observability_system(&a, &b, &e, 0.0, 0.0).unwrap();
        assert_eq!(sys.rank, 2);
        assert!(sys.singular_values[0] >= sys.singular_values[1]);
    }

    #[test]
    fn timing_examples() {
        let mut a = state(Node::Alice, Vec3::ZERO, Vec3::ZERO);
        let mut b = state(Node::Bob, Vec3::ZERO, Vec3::ZERO);
        a.a_max = 1e9;
        let t = timing_feasibility(&a, &b, 1.0, 1000.0).unwrap();
        assert_eq!(t.delta_t, 0.0);
        assert!(t.feasible);

        b.position = Vec3::new(3.8e7, 0.0, 0.0);
        a.a_max = 0.0;
        let t = timing_feasibility(&a, &b, 1.0, 1000.0).unwrap();
        // 2 * 3.8e7 / 299792458 and 1000 / that
        assert_relative_eq!(t.delta_t, 0.2535087123505956, max_relative = 1e-12);
        assert_relative_eq!(t.bound, 3944.6376052631576, max_relative = 1e-12);
        assert!(t.feasible);

        a.a_max = 3000.0;
        b.a_max = 1000.0;
        assert!(!timing_feasibility(&a, &b, 1.0, 1000.0).unwrap().feasible);
        assert!(timing_feasibility(&a, &b, -0.1, 1000.0).is_err());
        assert!(timing_feasibility(&a, &b, 1.0, 0.0).is_err());
    }
}
