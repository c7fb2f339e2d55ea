//! Run configuration: one TOML document per run, optionally pointing at a
//! parking-table file.

use crate::channel::{db_to_linear, RadioConfig, SnrCdf};
use crate::error::{Error, Result};
use crate::parking::ParkingModel;
use crate::simulation::{DayEstimator, DayProfileOptions, DayScenario};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioSection {
    /// Source transmit power, W.
    pub p_s: f64,
    /// Relay transmit power, W.
    pub p_r: f64,
    /// Noise power, W.
    pub n0: f64,
    pub gamma_th_db: f64,
    /// Hz.
    pub bandwidth: f64,
    /// Communication window, hours.
    pub tau: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        let r = RadioConfig::default();
        Self {
            p_s: r.p_s,
            p_r: r.p_r,
            n0: r.n0,
            gamma_th_db: 10.0,
            bandwidth: r.bandwidth,
            tau: r.tau,
        }
    }
}

impl RadioSection {
    pub fn to_radio(&self) -> Result<RadioConfig> {
        RadioConfig::new(self.p_s, self.p_r, self.n0, db_to_linear(self.gamma_th_db), self.bandwidth, self.tau)
            .map_err(|e| Error::Config(format!("[radio]: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub lot_capacity: usize,
    pub daily_cars: usize,
    pub current_time: f64,
    pub replications: usize,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let s = DayScenario::default();
        Self {
            lot_capacity: s.lot_capacity,
            daily_cars: s.daily_cars,
            current_time: s.current_time,
            replications: s.replications,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig2Section {
    pub thresholds_db: Vec<f64>,
    pub k_values: Vec<usize>,
    /// Arrival hours of the relay set, observed at `scenario.current_time`.
    pub relay_arrival_hours: Vec<u8>,
    pub snr_cdf: SnrCdf,
}

impl Default for Fig2Section {
    fn default() -> Self {
        Self {
            thresholds_db: (0..=10).map(|i| i as f64 * 2.0).collect(),
            k_values: vec![1, 2, 3],
            relay_arrival_hours: vec![9, 8, 10],
            snr_cdf: SnrCdf::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig3Section {
    /// Simulated days averaged into the table.
    pub days: usize,
}

impl Default for Fig3Section {
    fn default() -> Self {
        Self { days: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DaySection {
    pub hours: Vec<u32>,
    pub k: usize,
    pub estimator: DayEstimator,
    pub snr_cdf: SnrCdf,
    pub trials_per_hour: u64,
}

impl Default for DaySection {
    fn default() -> Self {
        let d = DayProfileOptions::default();
        Self {
            hours: d.hours,
            k: d.k,
            estimator: d.estimator,
            snr_cdf: d.snr_cdf,
            trials_per_hour: d.trials_per_hour,
        }
    }
}

impl DaySection {
    pub fn options(&self) -> DayProfileOptions {
        DayProfileOptions {
            hours: self.hours.clone(),
            k: self.k,
            estimator: self.estimator,
            snr_cdf: self.snr_cdf,
            trials_per_hour: self.trials_per_hour,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig5Section {
    pub t_arr: u8,
    pub tdur_minutes: Vec<f64>,
    pub snr_cdf: SnrCdf,
}

impl Default for Fig5Section {
    fn default() -> Self {
        Self {
            t_arr: 9,
            tdur_minutes: (0..=24).map(|i| i as f64 * 5.0).collect(),
            snr_cdf: SnrCdf::Approx,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig6Section {
    /// Elapsed parking time, hours.
    pub t_dur: f64,
    pub tarr_hours: Vec<u8>,
    pub snr_cdf: SnrCdf,
}

impl Default for Fig6Section {
    fn default() -> Self {
        Self {
            t_dur: 1.0,
            tarr_hours: (0..24).collect(),
            snr_cdf: SnrCdf::Approx,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    pub trials: u64,
    pub ks_draws: usize,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            ks_draws: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Monte Carlo trials per point of the threshold sweep.
    pub trials: u64,
    /// Parking-table file, relative to the config file. The shipped synthetic
    /// table is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parking_table: Option<PathBuf>,
    pub radio: RadioSection,
    pub scenario: ScenarioSection,
    pub fig2: Fig2Section,
    pub fig3: Fig3Section,
    pub day: DaySection,
    pub fig5: Fig5Section,
    pub fig6: Fig6Section,
    pub validate: ValidateSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DayScenario::default().seed,
            trials: 100_000,
            parking_table: None,
            radio: RadioSection::default(),
            scenario: ScenarioSection::default(),
            fig2: Fig2Section::default(),
            fig3: Fig3Section::default(),
            day: DaySection::default(),
            fig5: Fig5Section::default(),
            fig6: Fig6Section::default(),
            validate: ValidateSection::default(),
        }
    }
}

fn sorted<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn check_grid<T: PartialOrd>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{name} is empty")));
    }
    if !sorted(v) {
        return Err(Error::Config(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. A relative `parking_table` is resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let Some(table) = &cfg.parking_table {
            if table.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.parking_table = Some(base.join(table));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.radio.to_radio()?;
        self.scenario().validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        check_grid("fig2.thresholds_db", &self.fig2.thresholds_db)?;
        check_grid("fig2.k_values", &self.fig2.k_values)?;
        if self.fig2.k_values[0] == 0 || *self.fig2.k_values.last().unwrap() > self.fig2.relay_arrival_hours.len() {
            return Err(Error::Config(format!(
                "fig2.k_values must lie in 1..={} (number of relay_arrival_hours)",
                self.fig2.relay_arrival_hours.len()
            )));
        }
        if let Some(&h) = self.fig2.relay_arrival_hours.iter().find(|&&h| h >= 24) {
            return Err(Error::Config(format!("fig2.relay_arrival_hours: {h} is not an hour of day")));
        }
        if self.fig3.days == 0 {
            return Err(Error::Config("fig3.days must be >= 1".into()));
        }
        check_grid("day.hours", &self.day.hours)?;
        if *self.day.hours.last().unwrap() >= 24 {
            return Err(Error::Config("day.hours must be hours of day".into()));
        }
        if self.day.k == 0 {
            return Err(Error::Config("day.k must be >= 1".into()));
        }
        if self.day.trials_per_hour == 0 {
            return Err(Error::Config("day.trials_per_hour must be >= 1".into()));
        }
        if self.fig5.t_arr >= 24 {
            return Err(Error::Config("fig5.t_arr must be an hour of day".into()));
        }
        check_grid("fig5.tdur_minutes", &self.fig5.tdur_minutes)?;
        if self.fig5.tdur_minutes[0] < 0.0 {
            return Err(Error::Config("fig5.tdur_minutes must be >= 0".into()));
        }
        if !(self.fig6.t_dur >= 0.0 && self.fig6.t_dur.is_finite()) {
            return Err(Error::Config("fig6.t_dur must be finite and >= 0".into()));
        }
        check_grid("fig6.tarr_hours", &self.fig6.tarr_hours)?;
        if *self.fig6.tarr_hours.last().unwrap() >= 24 {
            return Err(Error::Config("fig6.tarr_hours must be hours of day".into()));
        }
        if self.validate.trials == 0 || self.validate.ks_draws == 0 {
            return Err(Error::Config("validate.trials and validate.ks_draws must be >= 1".into()));
        }
        Ok(())
    }

    pub fn scenario(&self) -> DayScenario {
        DayScenario {
            lot_capacity: self.scenario.lot_capacity,
            daily_cars: self.scenario.daily_cars,
            current_time: self.scenario.current_time,
            replications: self.scenario.replications,
            seed: self.seed,
        }
    }

    pub fn parking_model(&self) -> Result<ParkingModel> {
        match &self.parking_table {
            Some(path) => ParkingModel::load(path),
            None => Ok(ParkingModel::synthetic_default()),
        }
    }

    /// SHA-256 over the resolved config and the parking table it uses, so
    /// the hash does not depend on file paths.
    pub fn hash(&self, model: &ParkingModel) -> String {
        let mut resolved = self.clone();
        resolved.parking_table = None;
        let mut h = Sha256::new();
        h.update(resolved.to_toml_string().as_bytes());
        h.update(model.to_toml_string().as_bytes());
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let back = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_document_fills_defaults() {
        let cfg = RunConfig::from_toml_str("seed = 7\n[radio]\ngamma_th_db = 5.0\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.radio.gamma_th_db, 5.0);
        assert_eq!(cfg.radio.n0, 0.02);
        assert_eq!(cfg.fig2.snr_cdf, SnrCdf::Exact);
        assert_eq!(cfg.day.snr_cdf, SnrCdf::Approx);
    }

    #[test]
    fn rejects_bad_documents() {
        for doc in [
            "sede = 1",
            "[radio]\ntau = 0.0",
            "[fig2]\nthresholds_db = [5.0, 1.0]",
            "[fig2]\nk_values = [1, 4]",
            "[day]\nhours = []",
            "[scenario]\ncurrent_time = 24.0",
            "[fig2]\nsnr_cdf = \"bogus\"",
        ] {
            assert!(matches!(RunConfig::from_toml_str(doc), Err(Error::Config(_))), "{doc}");
        }
    }

    #[test]
    fn error_mentions_line() {
        let err = RunConfig::from_toml_str("seed = 1\n\n[radio]\nn0 = \"x\"\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn hash_tracks_content() {
        let model = ParkingModel::synthetic_default();
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(&model), b.hash(&model));
        b.seed += 1;
        assert_ne!(a.hash(&model), b.hash(&model));
    }
}
