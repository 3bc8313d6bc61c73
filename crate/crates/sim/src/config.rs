//! TOML scenario configuration. Every field is optional; missing ones take
//! the simulation-table defaults.

use std::path::Path;

use doppler_skg_core::geometry::{SpacecraftState, Vec3};
use doppler_skg_core::keygen::{QuantizerConfig, StepRule};
use doppler_skg_core::quadrature::QuadratureSpec;
use doppler_skg_core::Scenario;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{SimError, SimResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Carrier frequency [Hz].
    pub f_c: f64,
    /// Symbol period [s].
    pub symbol_period: f64,
    /// Pilots per key duration (N).
    pub n_pilots: usize,
    /// Key durations per KDR operating point (D).
    pub n_durations: u64,
    /// Linear pilot power.
    pub power: f64,
    /// Linear noise variance.
    pub noise_var: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_b: Option<f64>,
    pub master_seed: u64,
    /// Monte Carlo trials for the distribution experiments.
    pub trials: u64,
    pub quantizer: QuantizerSection,
    pub alice: CraftSection,
    pub bob: CraftSection,
    pub eve: CraftSection,
    pub experiments: ExperimentSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizerSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_step: Option<f64>,
    pub levels: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CraftSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
}

/// Grids and knobs of the individual experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    /// Key-rate surface uses `kappa = k / points`, `k = 1..=points`, on both axes.
    pub kappa_grid_points: usize,
    pub kappa_set: Vec<f64>,
    pub pdf_bins: usize,
    pub theta_t: f64,
    pub estimator_n_set: Vec<usize>,
    pub hist_bins: usize,
    pub mse_n_max: usize,
    pub gamma_grid: Vec<f64>,
    pub kdr_n_set: Vec<usize>,
    pub quad_rel_tol: f64,
    pub timing_alpha: f64,
    pub timing_v_max: f64,
    pub timing_distances: Vec<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let s = Scenario::default();
        ScenarioConfig {
            f_c: s.carrier_hz,
            symbol_period: s.symbol_period,
            n_pilots: s.n_pilots,
            n_durations: 100_000,
            power: s.power,
            noise_var: s.noise_var,
            kappa_a: None,
            kappa_b: None,
            master_seed: 20_240_607,
            trials: 100_000,
            quantizer: QuantizerSection::default(),
            alice: CraftSection::default(),
            bob: CraftSection::default(),
            eve: CraftSection::default(),
            experiments: ExperimentSection::default(),
        }
    }
}

impl Default for QuantizerSection {
    fn default() -> Self {
        QuantizerSection { step: None, normalized_step: None, levels: 2 }
    }
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            kappa_grid_points: 50,
            kappa_set: vec![0.1, 0.25, 0.5, 0.8],
            pdf_bins: 60,
            theta_t: 5.0,
            estimator_n_set: vec![10, 20, 50],
            hist_bins: 100,
            mse_n_max: 50,
            gamma_grid: vec![0.2, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0],
            kdr_n_set: vec![10, 20, 50],
            quad_rel_tol: 1e-6,
            timing_alpha: 1.0,
            timing_v_max: 1000.0,
            timing_distances: vec![1.0e5, 1.0e6, 5.0e6, 1.0e7, 3.8e7, 1.0e8],
        }
    }
}

fn config_err(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}

impl CraftSection {
    fn apply(&self, base: SpacecraftState) -> SpacecraftState {
        let mut s = base;
        if let Some(p) = self.position {
            s.position = Vec3::from_slice(&p);
        }
        if let Some(v) = self.velocity {
            s.v_det = Vec3::from_slice(&v);
        }
        if let Some(sv) = self.sigma_v {
            s.sigma_v = sv;
        }
        if let Some(a) = self.a_max {
            s.a_max = a;
        }
        s
    }
}

impl QuantizerSection {
    pub fn to_core(&self) -> SimResult<QuantizerConfig> {
        let step = match (self.step, self.normalized_step) {
            (Some(_), Some(_)) => return Err(config_err("quantizer: give step or normalized_step, not both")),
            (Some(d), None) => StepRule::Absolute(d),
            (None, Some(g)) => StepRule::Normalized(g),
            (None, None) => StepRule::Normalized(1.0),
        };
        Ok(QuantizerConfig { step, levels: self.levels })
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> SimResult<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// The physical scenario, with mobility constants applied last.
    pub fn scenario(&self) -> SimResult<Scenario> {
        let base = Scenario::default();
        let mut s = Scenario {
            carrier_hz: self.f_c,
            symbol_period: self.symbol_period,
            n_pilots: self.n_pilots,
            power: self.power,
            noise_var: self.noise_var,
            alice: self.alice.apply(base.alice),
            bob: self.bob.apply(base.bob),
            eve: self.eve.apply(base.eve),
        };
        if let Some(k) = self.kappa_a {
            s.alice.sigma_v = doppler_skg_core::scenario::sigma_from_kappa(k, &s.alice)
                .map_err(|e| config_err(format!("kappa_a: {e}")))?;
        }
        if let Some(k) = self.kappa_b {
            s.bob.sigma_v = doppler_skg_core::scenario::sigma_from_kappa(k, &s.bob)
                .map_err(|e| config_err(format!("kappa_b: {e}")))?;
        }
        s.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(s)
    }

    pub fn quad(&self) -> QuadratureSpec {
        QuadratureSpec { rel_tol: self.experiments.quad_rel_tol, ..QuadratureSpec::default() }
    }

    pub fn validate(&self) -> SimResult<()> {
        let s = self.scenario()?;
        if s.alice.sigma_v == 0.0 && s.bob.sigma_v == 0.0 {
            return Err(config_err("Alice and Bob both have zero stochastic velocity"));
        }
        let q = self.quantizer.to_core()?;
        q.resolve(s.mean_theta().map_err(|e| config_err(e.to_string()))?)
            .map_err(|e| config_err(format!("quantizer: {e}")))?;
        if self.trials == 0 || self.n_durations == 0 {
            return Err(config_err("trials and n_durations must be >= 1"));
        }
        let e = &self.experiments;
        if e.kappa_grid_points == 0 || e.pdf_bins == 0 || e.hist_bins == 0 || e.mse_n_max == 0 {
            return Err(config_err("experiment grid sizes must be >= 1"));
        }
        let positive = |v: &[f64]| !v.is_empty() && v.iter().all(|x| *x > 0.0 && x.is_finite());
        if !positive(&e.kappa_set) || !positive(&e.gamma_grid) || !positive(&e.timing_distances) {
            return Err(config_err("kappa_set, gamma_grid and timing_distances must be nonempty and > 0"));
        }
        let counts = |v: &[usize]| !v.is_empty() && v.iter().all(|&n| n >= 1);
        if !counts(&e.estimator_n_set) || !counts(&e.kdr_n_set) {
            return Err(config_err("observation-count sets must be nonempty and >= 1"));
        }
        if !(e.theta_t > 0.0) || !(e.quad_rel_tol > 0.0) || !(e.timing_alpha >= 0.0) || !(e.timing_v_max > 0.0) {
            return Err(config_err("theta_t, quad_rel_tol and timing_v_max must be > 0, timing_alpha >= 0"));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ScenarioConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.scenario().unwrap(), Scenario::default());
    }

    #[test]
    fn sections_override_fields() {
        let cfg = ScenarioConfig::from_toml_str(
            r#"
            f_c = 2e9
            kappa_a = 0.5
            master_seed = 42
            [quantizer]
            normalized_step = 0.5
            levels = 4
            [eve]
            velocity = [0.0, 2000.0, 0.0]
            [experiments]
            gamma_grid = [1.0]
            "#,
        )
        .unwrap();
        let s = cfg.scenario().unwrap();
        assert_eq!(s.carrier_hz, 2e9);
        assert_eq!(s.eve.v_det, Vec3::new(0.0, 2000.0, 0.0));
        assert_eq!(s.eve.position, Scenario::default().eve.position);
        assert!((s.alice.sigma_v - (0.5f64 * 6700.0).sqrt()).abs() < 1e-9);
        assert_eq!(s.bob.sigma_v, Scenario::default().bob.sigma_v);
        assert_eq!(cfg.quantizer.to_core().unwrap().levels, 4);
        assert_eq!(cfg.experiments.gamma_grid, [1.0]);
        assert_eq!(cfg.experiments.kdr_n_set, [10, 20, 50]);
    }

    #[test]
    fn bad_configs_are_config_errors() {
        for text in [
            "bogus = 1",
            "f_c = -1.0",
            "n_pilots = 0",
            "[quantizer]\nstep = 1.0\nnormalized_step = 1.0",
            "[quantizer]\nlevels = 1",
            "trials = 0",
            "[experiments]\ngamma_grid = []",
            "f_c = \"fast\"",
        ] {
            let e = ScenarioConfig::from_toml_str(text).unwrap_err();
            assert!(matches!(e, SimError::Config(_)), "{text}: {e}");
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = ScenarioConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.master_seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn missing_file_is_io_error() {
        let e = ScenarioConfig::load(Path::new("/nonexistent/scenario.toml")).unwrap_err();
        assert!(matches!(e, SimError::Io { .. }));
    }
}
