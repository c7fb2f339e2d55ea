//! Closed-form outage probability.
//!
//! A relay link is down when its SNR falls below the threshold or its car
//! leaves during the window; the two causes are independent, so
//! `P_out,i = 1 − (1 − P_γ)(1 − P_L)`. Under select combining the links fail
//! independently and the system outage is the product over the relay set.

use crate::channel::{db_to_linear, LinkRates, RadioConfig, SnrCdf};
use crate::engine::{map_indexed, Execution};
use crate::error::{domain, Error, Result};
use crate::parking::{ParkingModel, Relay};
use crate::stats::TrialEstimate;
use serde::Serialize;

/// Probability the link SNR falls below `cfg.gamma_th`.
pub fn snr_outage(cfg: &RadioConfig, rates: &LinkRates, cdf: SnrCdf) -> f64 {
    cdf.eval(cfg.gamma_th, rates)
}

fn check_probability(func: &'static str, arg: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(func, arg, p, "0 <= p <= 1"))
    }
}

/// `1 − (1 − p_gamma)(1 − p_leave)`.
pub fn link_outage(p_gamma: f64, p_leave: f64) -> Result<f64> {
    check_probability("link_outage", "p_gamma", p_gamma)?;
    check_probability("link_outage", "p_leave", p_leave)?;
    Ok(1.0 - (1.0 - p_gamma) * (1.0 - p_leave))
}

/// Product of per-link outages over the cooperative set.
pub fn system_outage(links: &[f64]) -> Result<f64> {
    if links.is_empty() {
        return Err(Error::EmptyRelaySet);
    }
    for &p in links {
        check_probability("system_outage", "link", p)?;
    }
    Ok(links.iter().product())
}

/// Both outage causes for one relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayLinkProfile {
    pub rates: LinkRates,
    pub relay: Relay,
    pub p_gamma: f64,
    pub p_leave: f64,
}

impl RelayLinkProfile {
    pub fn new(cfg: &RadioConfig, model: &ParkingModel, relay: Relay, cdf: SnrCdf) -> Result<Self> {
        let rates = cfg.rates();
        Ok(Self {
            rates,
            relay,
            p_gamma: snr_outage(cfg, &rates, cdf),
            p_leave: model.leave_probability(&relay, cfg.tau)?,
        })
    }

    pub fn outage(&self) -> f64 {
        1.0 - (1.0 - self.p_gamma) * (1.0 - self.p_leave)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageReport {
    pub per_link: Vec<f64>,
    pub system: f64,
    /// Monte Carlo estimate of the same quantity, when one was run.
    pub simulated: Option<TrialEstimate>,
}

/// Analytical outage of the relay set.
pub fn analyze(cfg: &RadioConfig, model: &ParkingModel, relays: &[Relay], cdf: SnrCdf) -> Result<OutageReport> {
    let per_link = relays
        .iter()
        .map(|r| RelayLinkProfile::new(cfg, model, *r, cdf).map(|p| p.outage()))
        .collect::<Result<Vec<_>>>()?;
    let system = system_outage(&per_link)?;
    Ok(OutageReport {
        per_link,
        system,
        simulated: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold_db: f64,
    pub k: usize,
    pub p_out_analytical: f64,
}

/// System outage for every threshold and every K in `k_values`, using the
/// first K relays of `relays`. Rows come out threshold-major, K-minor.
pub fn outage_vs_threshold_sweep(
    cfg: &RadioConfig,
    relays: &[Relay],
    model: &ParkingModel,
    thresholds_db: &[f64],
    k_values: &[usize],
    cdf: SnrCdf,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if relays.is_empty() {
        return Err(Error::EmptyRelaySet);
    }
    if let Some(&k) = k_values.iter().find(|&&k| k == 0 || k > relays.len()) {
        return Err(Error::Config(format!(
            "relay count {k} outside 1..={} (relays provided)",
            relays.len()
        )));
    }
    let grid: Vec<(f64, usize)> = thresholds_db
        .iter()
        .flat_map(|&t| k_values.iter().map(move |&k| (t, k)))
        .collect();
    map_indexed(grid.len(), exec, |i| {
        let (threshold_db, k) = grid[i];
        let c = cfg.with_threshold(db_to_linear(threshold_db));
        let report = analyze(&c, model, &relays[..k], cdf)?;
        Ok(SweepRow {
            threshold_db,
            k,
            p_out_analytical: report.system,
        })
    })
    .into_iter()
    .collect()
}
