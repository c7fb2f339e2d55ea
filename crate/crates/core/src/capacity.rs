//! Ergodic capacity under select combining, with relays that may leave.
//!
//! With `K` iid links whose SNR CDF is `1 − e^{−μ̄γ}`, the combined SNR is the
//! maximum and its capacity has a closed form in the scaled exponential
//! integral. Departures make the number of surviving relays Poisson-binomial;
//! the adjusted capacity averages the closed form over that law.

use crate::channel::RadioConfig;
use crate::engine::{map_indexed, tags, Execution, StreamSeed};
use crate::error::{domain, Error, Result};
use crate::simulation::{generate_day, DayScenario};
use crate::specfun::exp_integral_e1_scaled;
use crate::stats::TrialEstimate;
use crate::parking::ParkingModel;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::LN_2;

/// Largest branch count accepted by [`sc_capacity`]. The alternating series
/// loses all precision beyond this.
pub const MAX_SC_BRANCHES: usize = 32;

/// Density of the maximum of `k` iid exponential SNRs with rate `mu_bar`.
pub fn sc_snr_pdf(gamma: f64, mu_bar: f64, k: usize) -> f64 {
    if gamma < 0.0 {
        return 0.0;
    }
    let e = (-mu_bar * gamma).exp();
    k as f64 * mu_bar * e * (-(-mu_bar * gamma).exp_m1()).powi(k as i32 - 1)
}

pub fn sc_snr_cdf(gamma: f64, mu_bar: f64, k: usize) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    (-(-mu_bar * gamma).exp_m1()).powi(k as i32)
}

/// Shared `μ̄ = N0 / P_s`. Requires equal source and relay powers.
pub fn uniform_mu_bar(cfg: &RadioConfig) -> Result<f64> {
    if cfg.p_s != cfg.p_r {
        return Err(Error::HeterogeneousPowers {
            p_s: cfg.p_s,
            p_r: cfg.p_r,
        });
    }
    Ok(cfg.n0 / cfg.p_s)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Closed-form series with its summation index starting at `first_index`.
/// Index 0 is correct; index 1 reproduces the misprinted form and exists only
/// so the validation suite can show that it fails.
pub fn sc_capacity_series(bandwidth: f64, mu_bar: f64, k: usize, first_index: usize) -> Result<f64> {
    if !(mu_bar > 0.0 && mu_bar.is_finite()) {
        return Err(domain("sc_capacity", "mu_bar", mu_bar, "0 < mu_bar < inf"));
    }
    if k == 0 {
        return Err(Error::EmptyRelaySet);
    }
    if k > MAX_SC_BRANCHES {
        return Err(Error::TooManyBranches { k, max: MAX_SC_BRANCHES });
    }
    let mut sum = 0.0;
    for j in first_index..k {
        let a = (j + 1) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(k - 1, j) * exp_integral_e1_scaled(a * mu_bar)? / a;
    }
    Ok(bandwidth * k as f64 / (2.0 * LN_2) * sum)
}

/// Ergodic capacity `(B/2) E[log2(1 + γ_sc)]` of `k` select-combined links.
pub fn sc_capacity(cfg: &RadioConfig, mu_bar: f64, k: usize) -> Result<f64> {
    sc_capacity_series(cfg.bandwidth, mu_bar, k, 0)
}

/// Per-relay probabilities of staying through the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalVector {
    p: Vec<f64>,
}

impl SurvivalVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptyRelaySet);
        }
        if let Some(&bad) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(domain("SurvivalVector", "p", bad, "0 <= p <= 1"));
        }
        Ok(Self { p })
    }

    /// From leave probabilities.
    pub fn from_leave(p_leave: &[f64]) -> Result<Self> {
        Self::new(p_leave.iter().map(|pl| 1.0 - pl).collect())
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Law of the surviving-relay count over `0..=K`, by the usual O(K²)
/// recurrence.
pub fn surviving_relay_distribution(sv: &SurvivalVector) -> Vec<f64> {
    let mut dist = vec![0.0; sv.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in sv.p.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
        }
        dist[0] *= 1.0 - p;
    }
    dist
}

/// `Σ_{k≥1} P{K′ = k} C_k`.
pub fn adjusted_capacity(cfg: &RadioConfig, mu_bar: f64, sv: &SurvivalVector) -> Result<f64> {
    let dist = surviving_relay_distribution(sv);
    let mut c = 0.0;
    for (k, &pk) in dist.iter().enumerate().skip(1) {
        if pk > 0.0 {
            c += pk * sc_capacity(cfg, mu_bar, k)?;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub c_full: f64,
    pub k_dist: Vec<f64>,
    pub c_adjusted: f64,
}

pub fn analyze_capacity(cfg: &RadioConfig, sv: &SurvivalVector) -> Result<CapacityReport> {
    let mu_bar = uniform_mu_bar(cfg)?;
    Ok(CapacityReport {
        c_full: sc_capacity(cfg, mu_bar, sv.len())?,
        k_dist: surviving_relay_distribution(sv),
        c_adjusted: adjusted_capacity(cfg, mu_bar, sv)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourlyCapacity {
    pub hour: u32,
    pub estimate: TrialEstimate,
}

/// Capacity over the day: each replication simulates a lot (the same days as
/// the outage profile for a given seed), and at each hour one parked car is
/// picked uniformly as the only relay.
pub fn capacity_day_profile(
    model: &ParkingModel,
    cfg: &RadioConfig,
    scenario: &DayScenario,
    hours: &[u32],
    exec: Execution,
) -> Result<Vec<HourlyCapacity>> {
    scenario.validate()?;
    let mu_bar = uniform_mu_bar(cfg)?;
    let c1 = sc_capacity(cfg, mu_bar, 1)?;
    let seed = StreamSeed(scenario.seed);

    let per_rep: Vec<Result<Vec<f64>>> = map_indexed(scenario.replications, exec, |r| {
        let lot = generate_day(model, scenario, &mut seed.stream(tags::DAY, r as u64));
        let mut pick = seed.stream(tags::CAPACITY_PICK, r as u64);
        hours
            .iter()
            .map(|&h| {
                let t = h as f64;
                let parked = lot.parked_at(t);
                if parked.is_empty() {
                    return Err(Error::EmptyLot { hour: h });
                }
                let car = parked[pick.random_range(0..parked.len())];
                let p_leave = model.leave_probability(&car.relay_at(t), cfg.tau)?;
                // K = 1: the adjusted capacity is (1 − P_L) C_1
                Ok((1.0 - p_leave) * c1)
            })
            .collect()
    });
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;

    Ok(hours
        .iter()
        .enumerate()
        .map(|(j, &hour)| {
            let values: Vec<f64> = per_rep.iter().map(|rep| rep[j]).collect();
            HourlyCapacity {
                hour,
                estimate: TrialEstimate::from_samples(&values),
            }
        })
        .collect())
}
