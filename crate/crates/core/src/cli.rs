//! Command implementations behind the `parkrelay` binary.
//!
//! Every command is a function of the config and seed: CSV output carries a
//! `# key=value` metadata block (seed, trials, config hash) and contains no
//! timings or paths, so reruns are byte-identical.

use crate::capacity::capacity_day_profile;
use crate::config::RunConfig;
use crate::engine::{map_indexed, tags, Execution, StreamSeed};
use crate::error::{Error, Result};
use crate::outage::outage_vs_threshold_sweep;
use crate::parking::{DualGammaHourParams, ParkingModel, Relay};
use crate::simulation::{estimate_outage, generate_day, outage_day_profile, tarr_sensitivity, tdur_sensitivity};
use crate::stats::spearman;
use crate::validation::{self, ValidationOptions};
use crate::channel::db_to_linear;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// A validation check failed or a computation errored.
pub const EXIT_FAILURE: u8 = 1;
/// The configuration (file, table or flags) was rejected.
pub const EXIT_CONFIG: u8 = 2;

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// A CSV document with a metadata header.
pub struct Table {
    meta: Vec<(String, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            meta: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Loaded config, model and the metadata every table starts with.
pub struct Run {
    pub cfg: RunConfig,
    pub model: ParkingModel,
    pub hash: String,
    pub exec: Execution,
}

impl Run {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let model = cfg.parking_model()?;
        let hash = cfg.hash(&model);
        Ok(Self {
            cfg,
            model,
            hash,
            exec: Execution::default(),
        })
    }

    fn table(&self, figure: &str, header: Vec<&'static str>) -> Table {
        let mut t = Table::new(header);
        let r = &self.cfg.radio;
        t.meta("figure", figure)
            .meta("version", env!("CARGO_PKG_VERSION"))
            .meta("seed", self.cfg.seed)
            .meta("config_hash", &self.hash)
            .meta("p_s", r.p_s)
            .meta("p_r", r.p_r)
            .meta("n0", r.n0)
            .meta("gamma_th_db", r.gamma_th_db)
            .meta("bandwidth", r.bandwidth)
            .meta("tau", r.tau);
        t
    }

    /// Outage against threshold: closed form next to Monte Carlo.
    pub fn fig2(&self) -> Result<Table> {
        let c = &self.cfg;
        let radio = c.radio.to_radio()?;
        let relays = c
            .fig2
            .relay_arrival_hours
            .iter()
            .map(|&h| Relay::observed_at(h, c.scenario.current_time))
            .collect::<Result<Vec<_>>>()?;
        let rows = outage_vs_threshold_sweep(
            &radio,
            &relays,
            &self.model,
            &c.fig2.thresholds_db,
            &c.fig2.k_values,
            c.fig2.snr_cdf,
            self.exec,
        )?;
        let seed = StreamSeed(c.seed);
        let mut t = self.table(
            "fig2",
            vec!["threshold_db", "k", "p_out_analytical", "p_out_simulated", "ci_halfwidth"],
        );
        t.meta("trials", c.trials)
            .meta("snr_cdf", c.fig2.snr_cdf.name())
            .meta("current_time", c.scenario.current_time)
            .meta(
                "relay_arrival_hours",
                c.fig2.relay_arrival_hours.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" "),
            );
        for (i, row) in rows.iter().enumerate() {
            let rc = radio.with_threshold(db_to_linear(row.threshold_db));
            let est = estimate_outage(&relays[..row.k], &self.model, &rc, c.trials, seed.child(i as u64), self.exec)?;
            t.row(vec![
                num(row.threshold_db),
                row.k.to_string(),
                num(row.p_out_analytical),
                num(est.point),
                num(est.half_width),
            ]);
        }
        Ok(t)
    }

    /// Hourly arrivals, departures and occupancy, averaged over `fig3.days`.
    pub fn fig3(&self) -> Result<Table> {
        let c = &self.cfg;
        let scenario = c.scenario();
        let seed = StreamSeed(c.seed);
        let days = map_indexed(c.fig3.days, self.exec, |d| {
            generate_day(&self.model, &scenario, &mut seed.stream(tags::DAY, d as u64))
        });
        let n = days.len() as f64;
        let mut sums = [[0.0f64; 5]; 24];
        for day in &days {
            for h in &day.series {
                let s = &mut sums[h.hour as usize];
                s[0] += h.arrivals as f64;
                s[1] += h.rejected as f64;
                s[2] += h.departures as f64;
                s[3] += h.departures_wrapped as f64;
                s[4] += h.occupancy as f64;
            }
        }
        let mut t = self.table(
            "fig3",
            vec!["hour", "arrivals", "rejected", "departures", "departures_wrapped", "occupancy"],
        );
        let admitted: usize = days.iter().map(|d| d.admitted()).sum();
        t.meta("days", c.fig3.days)
            .meta("lot_capacity", c.scenario.lot_capacity)
            .meta("daily_cars", c.scenario.daily_cars)
            .meta("mean_admitted", num(admitted as f64 / n));
        let mut totals = [0.0; 4];
        for (h, s) in sums.iter().enumerate() {
            for j in 0..4 {
                totals[j] += s[j] / n;
            }
            let mut cells = vec![h.to_string()];
            cells.extend(s.iter().map(|v| num(v / n)));
            t.row(cells);
        }
        let mut cells = vec!["total".to_string()];
        cells.extend(totals.iter().map(|v| num(*v)));
        cells.push(String::new());
        t.row(cells);
        Ok(t)
    }

    fn day_pair(&self, capacity_first: bool) -> Result<Table> {
        let c = &self.cfg;
        let radio = c.radio.to_radio()?;
        let scenario = c.scenario();
        let opts = c.day.options();
        let outage = outage_day_profile(&self.model, &radio, &scenario, &opts, self.exec)?;
        let capacity = capacity_day_profile(&self.model, &radio, &scenario, &opts.hours, self.exec)?;
        let paired: Vec<_> = capacity
            .iter()
            .filter_map(|cap| outage.iter().find(|o| o.hour == cap.hour).map(|o| (o, cap)))
            .collect();
        let rho = if paired.len() >= 2 {
            let a: Vec<f64> = paired.iter().map(|p| p.0.estimate.point).collect();
            let b: Vec<f64> = paired.iter().map(|p| p.1.estimate.point).collect();
            num(spearman(&a, &b))
        } else {
            "nan".to_string()
        };
        let header = if capacity_first {
            vec!["hour", "capacity_mean", "capacity_ci_halfwidth", "p_out_mean", "p_out_ci_halfwidth", "skipped"]
        } else {
            vec!["hour", "p_out_mean", "p_out_ci_halfwidth", "capacity_mean", "capacity_ci_halfwidth", "skipped"]
        };
        let mut t = self.table(if capacity_first { "fig7" } else { "fig4" }, header);
        t.meta("replications", scenario.replications)
            .meta("lot_capacity", scenario.lot_capacity)
            .meta("daily_cars", scenario.daily_cars)
            .meta("k", opts.k)
            .meta("estimator", format!("{:?}", opts.estimator).to_lowercase())
            .meta("snr_cdf", opts.snr_cdf.name())
            .meta("spearman_outage_capacity", rho);
        for (o, cap) in paired {
            let (first, second) = if capacity_first {
                ((cap.estimate.point, cap.estimate.half_width), (o.estimate.point, o.estimate.half_width))
            } else {
                ((o.estimate.point, o.estimate.half_width), (cap.estimate.point, cap.estimate.half_width))
            };
            t.row(vec![
                o.hour.to_string(),
                num(first.0),
                num(first.1),
                num(second.0),
                num(second.1),
                o.skipped.to_string(),
            ]);
        }
        Ok(t)
    }

    /// Daily outage profile, with the capacity profile alongside.
    pub fn fig4(&self) -> Result<Table> {
        self.day_pair(false)
    }

    /// Daily capacity profile, with the outage profile alongside.
    pub fn fig7(&self) -> Result<Table> {
        self.day_pair(true)
    }

    fn control_model(&self) -> Result<ParkingModel> {
        ParkingModel::uniform(self.model.arrival, DualGammaHourParams::exponential(4.0)?)
    }

    /// Outage against elapsed parking time.
    pub fn fig5(&self) -> Result<Table> {
        let c = &self.cfg;
        let radio = c.radio.to_radio()?;
        let s = tdur_sensitivity(&self.model, &radio, c.fig5.t_arr, &c.fig5.tdur_minutes, c.fig5.snr_cdf)?;
        let control = tdur_sensitivity(&self.control_model()?, &radio, c.fig5.t_arr, &c.fig5.tdur_minutes, c.fig5.snr_cdf)?;
        let mut t = self.table("fig5", vec!["t_dur_minutes", "p_leave", "p_out"]);
        t.meta("t_arr", c.fig5.t_arr)
            .meta("snr_cdf", c.fig5.snr_cdf.name())
            .meta("spread", num(s.spread()))
            .meta("relative_spread", num(s.relative_spread()))
            .meta("exponential_control_spread", num(control.spread()));
        for p in &s.points {
            t.row(vec![num(p.x), num(p.p_leave), num(p.p_out)]);
        }
        Ok(t)
    }

    /// Outage against arrival hour.
    pub fn fig6(&self) -> Result<Table> {
        let c = &self.cfg;
        let radio = c.radio.to_radio()?;
        let s = tarr_sensitivity(&self.model, &radio, c.fig6.t_dur, &c.fig6.tarr_hours, c.fig6.snr_cdf)?;
        let control = tarr_sensitivity(&self.control_model()?, &radio, c.fig6.t_dur, &c.fig6.tarr_hours, c.fig6.snr_cdf)?;
        let afternoon = s.points.iter().any(|p| (16.0..=18.0).contains(&p.x));
        let mut t = self.table("fig6", vec!["t_arr", "p_leave", "p_out"]);
        t.meta("t_dur_hours", c.fig6.t_dur)
            .meta("snr_cdf", c.fig6.snr_cdf.name())
            .meta("spread", num(s.spread()))
            .meta("relative_spread", num(s.relative_spread()))
            .meta("exponential_control_spread", num(control.spread()));
        if afternoon {
            let band = s.band_mean(16.0, 18.0);
            t.meta("afternoon_16_18_mean", num(band))
                .meta("afternoon_above_day_mean", band > s.mean());
        }
        for p in &s.points {
            t.row(vec![num(p.x), num(p.p_leave), num(p.p_out)]);
        }
        Ok(t)
    }

    pub fn validation_options(&self) -> ValidationOptions {
        ValidationOptions {
            seed: self.cfg.seed,
            trials: self.cfg.validate.trials,
            ks_draws: self.cfg.validate.ks_draws,
            scenario: self.cfg.scenario(),
            exec: self.exec,
        }
    }

    /// Runs the oracle suite. Returns the report and whether all passed.
    pub fn validate(&self) -> Result<(String, bool)> {
        let checks = validation::run_all(&self.model, &self.validation_options())?;
        let mut report = String::new();
        for c in &checks {
            report.push_str(&c.line());
            report.push('\n');
        }
        let failed = checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(report, "{} checks, {} failed", checks.len(), failed);
        Ok((report, failed == 0))
    }
}

/// Writes `table` to `dir/name.csv` and returns the path.
pub fn write_table(dir: &Path, name: &str, table: &Table) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(format!("{name}.csv"));
    std::fs::write(&path, table.render()).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Run {
        let mut cfg = RunConfig::default();
        cfg.trials = 2000;
        cfg.scenario.replications = 8;
        cfg.fig2.thresholds_db = vec![0.0, 10.0];
        Run::new(cfg).unwrap()
    }

    #[test]
    fn fig2_schema() {
        let text = quick().fig2().unwrap().render();
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], "threshold_db,k,p_out_analytical,p_out_simulated,ci_halfwidth");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(text.contains("# seed=20190101\n"));
        assert!(text.contains("# config_hash="));
    }

    #[test]
    fn fig3_totals_row() {
        let t = quick().fig3().unwrap().render();
        let rows: Vec<Vec<&str>> = t.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 25);
        let sum: f64 = rows[..24].iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
        assert_eq!(rows[24][0], "total");
        assert_eq!(rows[24][1].parse::<f64>().unwrap(), sum);
        let admitted = t.lines().find(|l| l.starts_with("# mean_admitted=")).unwrap();
        assert_eq!(admitted[16..].parse::<f64>().unwrap(), sum);
    }

    #[test]
    fn day_pair_and_sensitivity_run() {
        let r = quick();
        assert!(r.fig4().unwrap().render().contains("# spearman_outage_capacity="));
        assert!(r.fig7().unwrap().render().contains("hour,capacity_mean,capacity_ci_halfwidth"));
        let f5 = r.fig5().unwrap().render();
        assert!(f5.contains("# exponential_control_spread="));
        assert!(r.fig6().unwrap().render().contains("# afternoon_above_day_mean="));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::EmptyRelaySet), EXIT_FAILURE);
    }
}
