//! Monte Carlo engine: simulated parking-lot days, fading trials, and the
//! daily and sensitivity sweeps built on them.
//!
//! A simulated day draws every car's arrival time and planned stay, admits
//! cars while the lot has room, and tracks hourly arrivals, departures and
//! occupancy. Relays are then drawn from whoever is parked at a given hour.

use crate::channel::{link_snr, sample_channel_gain, RadioConfig, SnrCdf};
use crate::engine::{count_in_chunks, map_indexed, tags, Execution, StreamSeed};
use crate::error::{Error, Result};
use crate::outage::{link_outage, snr_outage, system_outage};
use crate::parking::{ParkingModel, Relay, DAY_HOURS};
use crate::stats::TrialEstimate;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Parking-lot population parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DayScenario {
    pub lot_capacity: usize,
    pub daily_cars: usize,
    /// Hour of day at which relays are observed.
    pub current_time: f64,
    pub replications: usize,
    pub seed: u64,
}

impl Default for DayScenario {
    fn default() -> Self {
        Self {
            lot_capacity: 500,
            daily_cars: 2000,
            current_time: 15.0,
            replications: 1000,
            seed: 20_190_101,
        }
    }
}

impl DayScenario {
    pub fn validate(&self) -> Result<()> {
        if self.lot_capacity == 0 {
            return Err(Error::Config("scenario.lot_capacity must be > 0".into()));
        }
        if !(0.0..DAY_HOURS).contains(&self.current_time) {
            return Err(Error::Config(format!(
                "scenario.current_time = {} outside [0, 24)",
                self.current_time
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("scenario.replications must be >= 1".into()));
        }
        Ok(())
    }
}

/// One admitted car.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParkedCar {
    pub arrival_time: f64,
    pub planned_duration: f64,
}

impl ParkedCar {
    pub fn departure_time(&self) -> f64 {
        self.arrival_time + self.planned_duration
    }

    pub fn is_parked_at(&self, t: f64) -> bool {
        self.arrival_time <= t && t < self.departure_time()
    }

    /// The car as a relay observed at time `t`.
    pub fn relay_at(&self, t: f64) -> Relay {
        Relay {
            arrival_hour: self.arrival_time.floor() as u8,
            elapsed_parked: (t - self.arrival_time).max(0.0),
            planned_duration: Some(self.planned_duration),
        }
    }
}

/// Counts for hour `[hour, hour + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct HourCounts {
    pub hour: u32,
    /// Admitted arrivals.
    pub arrivals: u32,
    /// Arrivals turned away at a full lot.
    pub rejected: u32,
    /// Departures during this hour of the same day.
    pub departures: u32,
    /// Departures attributed to `(arrival + stay) mod 24`, so stays that run
    /// past midnight land in the early hours.
    pub departures_wrapped: u32,
    /// Cars parked at the end of the hour.
    pub occupancy: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LotState {
    pub population: Vec<ParkedCar>,
    pub series: Vec<HourCounts>,
}

impl LotState {
    pub fn parked_at(&self, t: f64) -> Vec<&ParkedCar> {
        self.population.iter().filter(|c| c.is_parked_at(t)).collect()
    }

    pub fn admitted(&self) -> usize {
        self.population.len()
    }

    pub fn rejected(&self) -> u32 {
        self.series.iter().map(|h| h.rejected).sum()
    }
}

/// Simulates one day of the lot.
pub fn generate_day<R: Rng + ?Sized>(model: &ParkingModel, scenario: &DayScenario, rng: &mut R) -> LotState {
    let mut arrivals: Vec<f64> = (0..scenario.daily_cars).map(|_| model.arrival.sample(rng)).collect();
    arrivals.sort_by(|a, b| a.total_cmp(b));

    let mut series: Vec<HourCounts> = (0..24)
        .map(|h| HourCounts {
            hour: h,
            ..Default::default()
        })
        .collect();
    let mut population = Vec::with_capacity(scenario.lot_capacity.min(arrivals.len()));
    // Departure times of cars currently parked; positive floats order like their bits.
    let mut parked: BinaryHeap<Reverse<u64>> = BinaryHeap::new();

    for &t in &arrivals {
        let stay = model.hour(t.floor() as u8).sample(rng);
        while let Some(&Reverse(bits)) = parked.peek() {
            if f64::from_bits(bits) <= t {
                parked.pop();
            } else {
                break;
            }
        }
        let bucket = t.floor() as usize;
        if parked.len() >= scenario.lot_capacity {
            series[bucket].rejected += 1;
            continue;
        }
        let car = ParkedCar {
            arrival_time: t,
            planned_duration: stay,
        };
        parked.push(Reverse(car.departure_time().to_bits()));
        series[bucket].arrivals += 1;
        let dep = car.departure_time();
        if dep < DAY_HOURS {
            series[dep.floor() as usize].departures += 1;
        }
        series[(dep.rem_euclid(DAY_HOURS).floor() as usize).min(23)].departures_wrapped += 1;
        population.push(car);
    }

    let mut occupancy: i64 = 0;
    for h in series.iter_mut() {
        occupancy += h.arrivals as i64 - h.departures as i64;
        h.occupancy = occupancy as u32;
    }
    LotState { population, series }
}

/// Monte Carlo outage of a relay set whose departure probabilities are
/// `p_leave`. A trial is an outage when every relay fails, either by fading
/// below `cfg.gamma_th` or by leaving.
pub fn estimate_outage_with_leave(
    p_leave: &[f64],
    cfg: &RadioConfig,
    trials: u64,
    seed: StreamSeed,
    exec: Execution,
) -> Result<TrialEstimate> {
    if p_leave.is_empty() {
        return Err(Error::EmptyRelaySet);
    }
    if trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let hits = count_in_chunks(trials, seed, tags::OUTAGE_TRIALS, exec, |rng, len| {
        let mut hits = 0;
        for _ in 0..len {
            let mut all_failed = true;
            for &pl in p_leave {
                let g1 = sample_channel_gain(rng);
                let g2 = sample_channel_gain(rng);
                let departed = rng.random::<f64>() < pl;
                if !departed && link_snr(g1, g2, cfg) >= cfg.gamma_th {
                    all_failed = false;
                }
            }
            hits += all_failed as u64;
        }
        hits
    });
    Ok(TrialEstimate::proportion(hits, trials))
}

/// Monte Carlo outage of `relays`, departures drawn with the model's leave
/// probability over `cfg.tau`.
pub fn estimate_outage(
    relays: &[Relay],
    model: &ParkingModel,
    cfg: &RadioConfig,
    trials: u64,
    seed: StreamSeed,
    exec: Execution,
) -> Result<TrialEstimate> {
    let p_leave = relays
        .iter()
        .map(|r| model.leave_probability(r, cfg.tau))
        .collect::<Result<Vec<_>>>()?;
    estimate_outage_with_leave(&p_leave, cfg, trials, seed, exec)
}

/// How the daily outage profile turns sampled relays into a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayEstimator {
    /// Closed-form system outage of the sampled relays.
    #[default]
    Analytical,
    /// Fading trials plus each car's true planned departure.
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayProfileOptions {
    pub hours: Vec<u32>,
    /// Relays drawn per hour.
    pub k: usize,
    pub estimator: DayEstimator,
    pub snr_cdf: SnrCdf,
    /// Fading trials per replication-hour, empirical estimator only.
    pub trials_per_hour: u64,
}

impl Default for DayProfileOptions {
    fn default() -> Self {
        Self {
            hours: (7..=22).collect(),
            k: 3,
            estimator: DayEstimator::Analytical,
            snr_cdf: SnrCdf::Approx,
            trials_per_hour: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourlyEstimate {
    pub hour: u32,
    pub estimate: TrialEstimate,
    /// Replications where fewer than `k` cars were parked.
    pub skipped: usize,
}

enum HourOutcome {
    Value(f64),
    Counts(u64, u64),
    Skipped,
}

/// Outage over the day. For each replication a lot is simulated; at every
/// requested hour `k` parked cars are drawn uniformly as relays with
/// `t_dur = hour − arrival`.
pub fn outage_day_profile(
    model: &ParkingModel,
    cfg: &RadioConfig,
    scenario: &DayScenario,
    opts: &DayProfileOptions,
    exec: Execution,
) -> Result<Vec<HourlyEstimate>> {
    scenario.validate()?;
    if opts.k == 0 {
        return Err(Error::EmptyRelaySet);
    }
    let seed = StreamSeed(scenario.seed);
    let p_gamma = snr_outage(cfg, &cfg.rates(), opts.snr_cdf);

    let per_rep: Vec<Result<Vec<HourOutcome>>> = map_indexed(scenario.replications, exec, |r| {
        let lot = generate_day(model, scenario, &mut seed.stream(tags::DAY, r as u64));
        let mut pick = seed.stream(tags::OUTAGE_PICK, r as u64);
        let mut trial_rng = seed.stream(tags::EMPIRICAL_TRIALS, r as u64);
        opts.hours
            .iter()
            .map(|&h| {
                let t = h as f64;
                let parked = lot.parked_at(t);
                if parked.len() < opts.k {
                    return Ok(HourOutcome::Skipped);
                }
                let chosen: Vec<&ParkedCar> = sample_indices(&mut pick, parked.len(), opts.k)
                    .into_iter()
                    .map(|i| parked[i])
                    .collect();
                match opts.estimator {
                    DayEstimator::Analytical => {
                        let links = chosen
                            .iter()
                            .map(|c| link_outage(p_gamma, model.leave_probability(&c.relay_at(t), cfg.tau)?))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(HourOutcome::Value(system_outage(&links)?))
                    }
                    DayEstimator::Empirical => {
                        let window_end = t + cfg.tau;
                        let mut hits = 0;
                        for _ in 0..opts.trials_per_hour {
                            let all_failed = chosen.iter().all(|c| {
                                let g1 = sample_channel_gain(&mut trial_rng);
                                let g2 = sample_channel_gain(&mut trial_rng);
                                c.departure_time() <= window_end || link_snr(g1, g2, cfg) < cfg.gamma_th
                            });
                            hits += all_failed as u64;
                        }
                        Ok(HourOutcome::Counts(hits, opts.trials_per_hour))
                    }
                }
            })
            .collect()
    });
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(opts.hours.len());
    for (j, &hour) in opts.hours.iter().enumerate() {
        let mut values = Vec::new();
        let (mut hits, mut n) = (0u64, 0u64);
        let mut skipped = 0;
        for rep in &per_rep {
            match rep[j] {
                HourOutcome::Value(v) => values.push(v),
                HourOutcome::Counts(h, t) => {
                    hits += h;
                    n += t;
                }
                HourOutcome::Skipped => skipped += 1,
            }
        }
        let estimate = match opts.estimator {
            DayEstimator::Analytical if !values.is_empty() => TrialEstimate::from_samples(&values),
            DayEstimator::Empirical if n > 0 => TrialEstimate::proportion(hits, n),
            _ => continue,
        };
        out.push(HourlyEstimate { hour, estimate, skipped });
    }
    Ok(out)
}

/// One point of a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityPoint {
    pub x: f64,
    pub p_leave: f64,
    pub p_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityTable {
    pub points: Vec<SensitivityPoint>,
}

impl SensitivityTable {
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.p_out), hi.max(p.p_out)));
        hi - lo
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().map(|p| p.p_out).sum::<f64>() / self.points.len() as f64
    }

    /// `(max − min) / mean` of the outage values.
    pub fn relative_spread(&self) -> f64 {
        self.spread() / self.mean()
    }

    /// Mean outage over points with `lo <= x <= hi`.
    pub fn band_mean(&self, lo: f64, hi: f64) -> f64 {
        let band: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.x >= lo && p.x <= hi)
            .map(|p| p.p_out)
            .collect();
        band.iter().sum::<f64>() / band.len() as f64
    }
}

fn single_relay_outage(model: &ParkingModel, cfg: &RadioConfig, relay: Relay, cdf: SnrCdf) -> Result<(f64, f64)> {
    let p_leave = model.leave_probability(&relay, cfg.tau)?;
    let p_gamma = snr_outage(cfg, &cfg.rates(), cdf);
    Ok((p_leave, link_outage(p_gamma, p_leave)?))
}

/// Single-relay outage against elapsed parking time (grid in minutes) for a
/// fixed arrival hour.
pub fn tdur_sensitivity(
    model: &ParkingModel,
    cfg: &RadioConfig,
    t_arr: u8,
    tdur_minutes: &[f64],
    cdf: SnrCdf,
) -> Result<SensitivityTable> {
    let points = tdur_minutes
        .iter()
        .map(|&m| {
            let relay = Relay::new(t_arr, m / 60.0)?;
            let (p_leave, p_out) = single_relay_outage(model, cfg, relay, cdf)?;
            Ok(SensitivityPoint { x: m, p_leave, p_out })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SensitivityTable { points })
}

/// Single-relay outage against arrival hour for a fixed elapsed time.
pub fn tarr_sensitivity(
    model: &ParkingModel,
    cfg: &RadioConfig,
    t_dur: f64,
    tarr_grid: &[u8],
    cdf: SnrCdf,
) -> Result<SensitivityTable> {
    let points = tarr_grid
        .iter()
        .map(|&h| {
            let relay = Relay::new(h, t_dur)?;
            let (p_leave, p_out) = single_relay_outage(model, cfg, relay, cdf)?;
            Ok(SensitivityPoint {
                x: h as f64,
                p_leave,
                p_out,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SensitivityTable { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::analyze;
    use crate::parking::{DualGammaHourParams, WeibullArrival};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_scenario() -> DayScenario {
        DayScenario {
            replications: 40,
            ..Default::default()
        }
    }

    #[test]
    fn empty_day() {
        let model = ParkingModel::synthetic_default();
        let s = DayScenario {
            daily_cars: 0,
            ..Default::default()
        };
        let lot = generate_day(&model, &s, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(lot.population.is_empty());
        assert!(lot.series.iter().all(|h| h.arrivals == 0 && h.departures == 0 && h.occupancy == 0));
    }

    #[test]
    fn occupancy_is_conserved_and_capped() {
        let model = ParkingModel::synthetic_default();
        let s = DayScenario::default();
        for seed in 0..5 {
            let lot = generate_day(&model, &s, &mut ChaCha8Rng::seed_from_u64(seed));
            let (mut arr, mut dep) = (0i64, 0i64);
            for h in &lot.series {
                arr += h.arrivals as i64;
                dep += h.departures as i64;
                assert_eq!(arr - dep - h.occupancy as i64, 0);
                assert!(h.occupancy as usize <= s.lot_capacity);
                // occupancy at the end of the hour equals the cars actually parked then
                let t = h.hour as f64 + 1.0;
                let parked = lot.population.iter().filter(|c| c.arrival_time < t && c.departure_time() >= t).count();
                assert_eq!(parked, h.occupancy as usize);
            }
            let total_in: u32 = lot.series.iter().map(|h| h.arrivals).sum();
            let wrapped: u32 = lot.series.iter().map(|h| h.departures_wrapped).sum();
            assert_eq!(total_in as usize, lot.admitted());
            assert_eq!(wrapped as usize, lot.admitted());
            assert_eq!(lot.admitted() + lot.rejected() as usize, s.daily_cars);
        }
    }

    #[test]
    fn admission_never_exceeds_capacity_at_any_instant() {
        let model = ParkingModel::synthetic_default();
        let s = DayScenario {
            lot_capacity: 50,
            ..Default::default()
        };
        let lot = generate_day(&model, &s, &mut ChaCha8Rng::seed_from_u64(3));
        for c in &lot.population {
            let t = c.arrival_time;
            assert!(lot.parked_at(t).len() <= 50);
        }
        assert!(lot.rejected() > 0);
    }

    #[test]
    fn estimate_outage_trivial_cases() {
        let cfg = RadioConfig::default().with_threshold(1e-300);
        let e = estimate_outage_with_leave(&[0.0, 0.0], &cfg, 10_000, StreamSeed(1), Execution::Sequential).unwrap();
        assert_eq!(e.point, 0.0);
        let e = estimate_outage_with_leave(&[1.0], &cfg, 10_000, StreamSeed(1), Execution::Sequential).unwrap();
        assert_eq!(e.point, 1.0);
        assert!(estimate_outage_with_leave(&[], &cfg, 10, StreamSeed(1), Execution::Sequential).is_err());
    }

    #[test]
    fn estimate_outage_deterministic_across_execution() {
        let cfg = RadioConfig::default();
        let a = estimate_outage_with_leave(&[0.1, 0.2], &cfg, 200_000, StreamSeed(5), Execution::Sequential).unwrap();
        let b = estimate_outage_with_leave(&[0.1, 0.2], &cfg, 200_000, StreamSeed(5), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    /// Without departures the estimate is the classical SC outage; at high
    /// mean SNR (μ = 0.001) the exponential CDF describes the link well.
    #[test]
    fn no_departures_matches_classical_sc() {
        let cfg = RadioConfig {
            n0: 0.002,
            ..RadioConfig::default()
        }
        .with_threshold(1.0);
        let mu = cfg.rates().mu;
        for k in 1..=3usize {
            let closed = (1.0 - (-mu * cfg.gamma_th).exp()).powi(k as i32);
            let n = 1_000_000;
            let e = estimate_outage_with_leave(&vec![0.0; k], &cfg, n, StreamSeed(77 + k as u64), Execution::Parallel).unwrap();
            let sigma = (closed * (1.0 - closed) / n as f64).sqrt();
            assert!((e.point - closed).abs() <= 3.0 * sigma, "k={k}: {} vs {closed}", e.point);
        }
    }

    #[test]
    fn estimate_outage_matches_closed_form_with_departures() {
        let model = ParkingModel::synthetic_default();
        let cfg = RadioConfig::default();
        let relays: Vec<Relay> = [9u8, 16].iter().map(|&h| Relay::observed_at(h, 17.0).unwrap()).collect();
        let closed = analyze(&cfg, &model, &relays, SnrCdf::Af).unwrap().system;
        let n = 1_000_000;
        let e = estimate_outage(&relays, &model, &cfg, n, StreamSeed(3), Execution::Parallel).unwrap();
        let sigma = (closed * (1.0 - closed) / n as f64).sqrt();
        assert!((e.point - closed).abs() <= 3.0 * sigma, "{} vs {closed}", e.point);
    }

    #[test]
    fn half_width_scales_with_root_n() {
        let cfg = RadioConfig::default();
        let a = estimate_outage_with_leave(&[0.05], &cfg, 100_000, StreamSeed(2), Execution::Parallel).unwrap();
        let b = estimate_outage_with_leave(&[0.05], &cfg, 400_000, StreamSeed(2), Execution::Parallel).unwrap();
        let ratio = a.half_width / b.half_width;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn mean_stay_by_arrival_hour_matches_mixture_mean() {
        let model = ParkingModel::synthetic_default();
        let s = DayScenario {
            lot_capacity: 1_000_000,
            daily_cars: 200_000,
            ..Default::default()
        };
        let lot = generate_day(&model, &s, &mut ChaCha8Rng::seed_from_u64(4));
        for h in [0u8, 8, 12, 17, 21] {
            let stays: Vec<f64> = lot
                .population
                .iter()
                .filter(|c| c.arrival_time.floor() as u8 == h)
                .map(|c| c.planned_duration)
                .collect();
            let p = model.hour(h);
            let mean = stays.iter().sum::<f64>() / stays.len() as f64;
            let se = (p.variance() / stays.len() as f64).sqrt();
            assert!((mean - p.mean()).abs() < 3.0 * se, "hour {h}: {mean} vs {}", p.mean());
        }
    }

    #[test]
    fn day_profile_skips_thin_hours() {
        let model = ParkingModel::synthetic_default();
        let s = DayScenario {
            daily_cars: 3,
            replications: 5,
            ..Default::default()
        };
        let opts = DayProfileOptions {
            k: 5,
            ..Default::default()
        };
        let prof = outage_day_profile(&model, &RadioConfig::default(), &s, &opts, Execution::Sequential).unwrap();
        assert!(prof.is_empty());
    }

    #[test]
    fn day_profile_flat_without_departures() {
        let model = ParkingModel::synthetic_default();
        let cfg = RadioConfig::default().with_tau(1e-12);
        let opts = DayProfileOptions::default();
        let prof = outage_day_profile(&model, &cfg, &small_scenario(), &opts, Execution::Parallel).unwrap();
        let pure = snr_outage(&cfg, &cfg.rates(), SnrCdf::Approx).powi(3);
        for h in prof {
            assert!((h.estimate.point - pure).abs() < 1e-9, "hour {}", h.hour);
        }
    }

    #[test]
    fn empirical_estimator_runs() {
        let model = ParkingModel::synthetic_default();
        let opts = DayProfileOptions {
            estimator: DayEstimator::Empirical,
            k: 1,
            trials_per_hour: 50,
            ..Default::default()
        };
        let prof = outage_day_profile(&model, &RadioConfig::default(), &small_scenario(), &opts, Execution::Parallel).unwrap();
        assert_eq!(prof.len(), 16);
        assert!(prof.iter().all(|h| h.estimate.n == 40 * 50));
    }

    #[test]
    fn sensitivity_controls() {
        let expo = ParkingModel::uniform(WeibullArrival::default(), DualGammaHourParams::exponential(4.0).unwrap()).unwrap();
        let cfg = RadioConfig::default();
        let minutes: Vec<f64> = (0..=24).map(|i| i as f64 * 5.0).collect();
        let t = tdur_sensitivity(&expo, &cfg, 9, &minutes, SnrCdf::Approx).unwrap();
        assert!(t.spread() <= 1e-10);
        let hours: Vec<u8> = (0..24).collect();
        let t = tarr_sensitivity(&expo, &cfg, 1.0, &hours, SnrCdf::Approx).unwrap();
        assert!(t.spread() <= 1e-15);
    }

    #[test]
    fn tarr_values_are_recomposition() {
        let model = ParkingModel::synthetic_default();
        let cfg = RadioConfig::default();
        let t = tarr_sensitivity(&model, &cfg, 1.0, &[3, 17], SnrCdf::Approx).unwrap();
        for p in &t.points {
            let pl = model.hour(p.x as u8).leave_probability(1.0, cfg.tau).unwrap();
            let pg = snr_outage(&cfg, &cfg.rates(), SnrCdf::Approx);
            assert_eq!(p.p_out, link_outage(pg, pl).unwrap());
        }
    }
}
