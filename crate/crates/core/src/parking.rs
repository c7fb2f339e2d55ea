//! Parked-car behavior: when cars arrive, how long they stay, and how likely
//! a parked relay is to leave during a communication window.
//!
//! Arrival hour follows a Weibull law truncated to one day. Parking duration
//! follows a two-component gamma mixture (short stays and long stays) whose
//! parameters depend on the integer arrival hour.

use crate::error::{Error, Result};
use crate::specfun::{self, ARG_MAX};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Hours in the simulated day; arrival times live in `[0, DAY_HOURS)`.
pub const DAY_HOURS: f64 = 24.0;

/// Default parameter table. Synthetic: shaped like a weekday lot, not fitted
/// to any dataset.
pub const SYNTHETIC_TABLE_TOML: &str = include_str!("../data/synthetic_parking_table.toml");

/// Weibull arrival-time law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeibullArrival {
    /// Shape.
    pub alpha: f64,
    /// Scale, hours.
    pub beta: f64,
}

impl WeibullArrival {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    /// Density `(α/β)(t/β)^(α-1) exp(-(t/β)^α)`.
    ///
    /// At `t = 0` this is the raw formula: infinite for `α < 1`.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(crate::error::domain("arrival_pdf", "t", t, "t >= 0"));
        }
        let z = t / self.beta;
        Ok(self.alpha / self.beta * z.powf(self.alpha - 1.0) * (-z.powf(self.alpha)).exp())
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        -(-(t / self.beta).powf(self.alpha)).exp_m1()
    }

    /// Probability mass the untruncated law puts inside one day.
    pub fn day_mass(&self) -> f64 {
        self.cdf(DAY_HOURS)
    }

    pub fn truncated_pdf(&self, t: f64) -> Result<f64> {
        if t >= DAY_HOURS {
            return Ok(0.0);
        }
        Ok(self.pdf(t)? / self.day_mass())
    }

    pub fn truncated_cdf(&self, t: f64) -> f64 {
        (self.cdf(t.min(DAY_HOURS)) / self.day_mass()).clamp(0.0, 1.0)
    }

    /// Inverse of the day-truncated CDF. Maps `[0, 1)` onto `[0, 24)`.
    pub fn truncated_quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let t = self.beta * (-(-u * self.day_mass()).ln_1p()).powf(1.0 / self.alpha);
        t.min(DAY_HOURS.next_down())
    }

    /// Arrival hour-of-day by inverse-CDF sampling of the truncated law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.truncated_quantile(rng.random::<f64>())
    }

    /// Mean of the day-truncated law,
    /// `β Γ(1 + 1/α) P(1 + 1/α, (24/β)^α) / F(24)`.
    pub fn truncated_mean(&self) -> Result<f64> {
        let s = 1.0 + 1.0 / self.alpha;
        let z = (DAY_HOURS / self.beta).powf(self.alpha);
        Ok(self.beta * specfun::gamma(s)? * specfun::regularized_lower_gamma(s, z)? / self.day_mass())
    }
}

impl Default for WeibullArrival {
    /// Weekday arrival law with shape 0.9831 and scale 16.8 h.
    fn default() -> Self {
        Self {
            alpha: 0.9831,
            beta: 16.8,
        }
    }
}

/// Dual-gamma parking-duration parameters for one arrival hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualGammaHourParams {
    pub kappa_s: f64,
    pub theta_s: f64,
    pub kappa_l: f64,
    pub theta_l: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Mixture weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Survival mass below which a conditioning event counts as extinct.
pub const EXTINCT_MASS: f64 = 1e-300;

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.to_string(),
            value,
            reason: "must be finite and > 0",
        })
    }
}

// Q(k, z) with the far tail flushed to zero instead of rejected.
fn upper_tail(shape: f64, z: f64) -> Result<f64> {
    if z > ARG_MAX {
        return Ok(0.0);
    }
    specfun::regularized_upper_gamma(shape, z)
}

fn gamma_log_density(shape: f64, scale: f64, x: f64) -> f64 {
    // ln Γ is evaluated on a validated shape, so unwrap cannot fail.
    let ln_g = specfun::ln_gamma(shape).expect("validated shape");
    (shape - 1.0) * x.ln() - x / scale - ln_g - shape * scale.ln()
}

impl DualGammaHourParams {
    pub fn new(kappa_s: f64, theta_s: f64, kappa_l: f64, theta_l: f64, d1: f64, d2: f64) -> Result<Self> {
        let p = Self {
            kappa_s,
            theta_s,
            kappa_l,
            theta_l,
            d1,
            d2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Single exponential law with mean `theta`, expressed as a degenerate
    /// mixture. Memoryless, so its leave probability ignores elapsed time.
    pub fn exponential(theta: f64) -> Result<Self> {
        Self::new(1.0, theta, 1.0, theta, 0.5, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        positive("kappa_s", self.kappa_s)?;
        positive("theta_s", self.theta_s)?;
        positive("kappa_l", self.kappa_l)?;
        positive("theta_l", self.theta_l)?;
        for (name, w) in [("d1", self.d1), ("d2", self.d2)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    value: w,
                    reason: "mixture weight must lie in [0, 1]",
                });
            }
        }
        if (self.d1 + self.d2 - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter {
                name: "d1 + d2".to_string(),
                value: self.d1 + self.d2,
                reason: "mixture weights must sum to 1",
            });
        }
        for (name, k) in [("kappa_s", self.kappa_s), ("kappa_l", self.kappa_l)] {
            if k > specfun::SHAPE_MAX {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    value: k,
                    reason: "shape above supported range (50)",
                });
            }
        }
        Ok(())
    }

    /// Mixture density of the parking duration at `x` hours.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(crate::error::domain("duration_pdf", "x", x, "x > 0"));
        }
        let short = self.d1 * gamma_log_density(self.kappa_s, self.theta_s, x).exp();
        let long = self.d2 * gamma_log_density(self.kappa_l, self.theta_l, x).exp();
        Ok(short + long)
    }

    /// Unconditional tail `P[X > x]`.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(crate::error::domain("duration_tail", "x", x, "x >= 0"));
        }
        Ok(self.d1 * upper_tail(self.kappa_s, x / self.theta_s)?
            + self.d2 * upper_tail(self.kappa_l, x / self.theta_l)?)
    }

    pub fn mean(&self) -> f64 {
        self.d1 * self.kappa_s * self.theta_s + self.d2 * self.kappa_l * self.theta_l
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let second = |k: f64, th: f64| k * (k + 1.0) * th * th;
        self.d1 * second(self.kappa_s, self.theta_s) + self.d2 * second(self.kappa_l, self.theta_l) - m * m
    }

    /// `P[X > t_a + n | X > t_a]`: the chance a car parked for `t_a` hours
    /// stays at least `n` more.
    ///
    /// The incomplete-gamma ratio
    ///
    /// ```text
    ///   d1 γ(κs, u/θs) Γ(κl) + d2 γ(κl, u/θl) Γ(κs) − Γ(κl) Γ(κs)
    ///   ─────────────────────────────────────────────────────────   u = t_a + n (top), t_a (bottom)
    ///   d1 γ(κs, v/θs) Γ(κl) + d2 γ(κl, v/θl) Γ(κs) − Γ(κl) Γ(κs)
    /// ```
    ///
    /// equals `-Γ(κs)Γ(κl)·S(u)` over `-Γ(κs)Γ(κl)·S(v)` once `d1 + d2 = 1`,
    /// where `S` is the mixture tail. This evaluates the tail form, which
    /// keeps full precision when both tails are small; the literal ratio is
    /// [`survival_probability_printed_form`](Self::survival_probability_printed_form).
    pub fn survival_probability(&self, t_a: f64, n: f64) -> Result<f64> {
        if !(t_a >= 0.0) {
            return Err(crate::error::domain("survival_probability", "t_a", t_a, "t_a >= 0"));
        }
        if !(n >= 0.0) {
            return Err(crate::error::domain("survival_probability", "n", n, "n >= 0"));
        }
        let denom = self.tail(t_a)?;
        if denom < EXTINCT_MASS {
            return Err(Error::DegenerateCondition { t_a, mass: denom });
        }
        if n == 0.0 {
            return Ok(1.0);
        }
        Ok((self.tail(t_a + n)? / denom).clamp(0.0, 1.0))
    }

    /// The incomplete-gamma ratio evaluated term by term, exactly as
    /// written in the doc of [`survival_probability`](Self::survival_probability).
    /// Loses precision once both tails fall below ~1e-8; kept to check the
    /// orientation of the closed form.
    pub fn survival_probability_printed_form(&self, t_a: f64, n: f64) -> Result<f64> {
        let gs = specfun::gamma(self.kappa_s)?;
        let gl = specfun::gamma(self.kappa_l)?;
        let term = |x: f64| -> Result<f64> {
            Ok(self.d1 * specfun::lower_incomplete_gamma(self.kappa_s, (x / self.theta_s).min(ARG_MAX))? * gl
                + self.d2 * specfun::lower_incomplete_gamma(self.kappa_l, (x / self.theta_l).min(ARG_MAX))? * gs
                - gl * gs)
        };
        let denom = term(t_a)?;
        if denom.abs() < EXTINCT_MASS {
            return Err(Error::DegenerateCondition { t_a, mass: denom.abs() });
        }
        Ok(term(t_a + n)? / denom)
    }

    /// Probability the car leaves within the next `tau` hours after having
    /// been parked `t_dur` hours.
    pub fn leave_probability(&self, t_dur: f64, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(crate::error::domain("leave_probability", "tau", tau, "tau > 0"));
        }
        Ok((1.0 - self.survival_probability(t_dur, tau)?).clamp(0.0, 1.0))
    }

    /// Draws a parking duration: pick the short component with probability
    /// `d1`, then a gamma variate from it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (shape, scale) = if rng.random::<f64>() < self.d1 {
            (self.kappa_s, self.theta_s)
        } else {
            (self.kappa_l, self.theta_l)
        };
        // Shape and scale were validated positive.
        Gamma::new(shape, scale).expect("validated gamma parameters").sample(rng)
    }
}

/// A parked car acting as a relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Relay {
    /// Integer arrival hour, keys the duration table.
    pub arrival_hour: u8,
    /// Hours parked so far (`t_cur − t_arr`).
    pub elapsed_parked: f64,
    /// Total planned stay. Known only to the simulator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planned_duration: Option<f64>,
}

impl Relay {
    pub fn new(arrival_hour: u8, elapsed_parked: f64) -> Result<Self> {
        if arrival_hour >= 24 {
            return Err(Error::InvalidParameter {
                name: "arrival_hour".to_string(),
                value: arrival_hour as f64,
                reason: "must be an hour in 0..=23",
            });
        }
        if !(elapsed_parked >= 0.0 && elapsed_parked.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "elapsed_parked".to_string(),
                value: elapsed_parked,
                reason: "must be finite and >= 0",
            });
        }
        Ok(Self {
            arrival_hour,
            elapsed_parked,
            planned_duration: None,
        })
    }

    /// Relay that arrived at `arrival_hour:00` observed at `current_time`.
    pub fn observed_at(arrival_hour: u8, current_time: f64) -> Result<Self> {
        Self::new(arrival_hour, current_time - arrival_hour as f64)
    }
}

/// Arrival law plus the 24-entry duration table.
#[derive(Debug, Clone, PartialEq)]
pub struct ParkingModel {
    pub arrival: WeibullArrival,
    table: [DualGammaHourParams; 24],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    weibull: WeibullArrival,
    hour: Vec<HourRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HourRecord {
    t: u8,
    kappa_s: f64,
    theta_s: f64,
    kappa_l: f64,
    theta_l: f64,
    d1: f64,
    d2: f64,
}

impl HourRecord {
    fn params(&self) -> DualGammaHourParams {
        DualGammaHourParams {
            kappa_s: self.kappa_s,
            theta_s: self.theta_s,
            kappa_l: self.kappa_l,
            theta_l: self.theta_l,
            d1: self.d1,
            d2: self.d2,
        }
    }
}

impl ParkingModel {
    pub fn new(arrival: WeibullArrival, table: [DualGammaHourParams; 24]) -> Result<Self> {
        WeibullArrival::new(arrival.alpha, arrival.beta)?;
        for p in &table {
            p.validate()?;
        }
        Ok(Self { arrival, table })
    }

    /// Every hour shares the same duration law.
    pub fn uniform(arrival: WeibullArrival, params: DualGammaHourParams) -> Result<Self> {
        Self::new(arrival, [params; 24])
    }

    /// The shipped synthetic table.
    pub fn synthetic_default() -> Self {
        Self::from_toml_str(SYNTHETIC_TABLE_TOML).expect("shipped table is valid")
    }

    pub fn hour(&self, t: u8) -> &DualGammaHourParams {
        &self.table[t as usize % 24]
    }

    pub fn table(&self) -> &[DualGammaHourParams; 24] {
        &self.table
    }

    /// Leave probability of `relay` over a window of `tau` hours.
    pub fn leave_probability(&self, relay: &Relay, tau: f64) -> Result<f64> {
        self.hour(relay.arrival_hour).leave_probability(relay.elapsed_parked, tau)
    }

    /// Integer hour containing the mean of the truncated arrival law.
    pub fn expected_arrival_hour(&self) -> Result<u8> {
        Ok(self.arrival.truncated_mean()?.floor() as u8)
    }

    /// Parses and validates a parameter-table document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: TableFile = toml::from_str(text).map_err(|e| Error::Config(format!("parking table: {e}")))?;
        let arrival = WeibullArrival::new(file.weibull.alpha, file.weibull.beta)
            .map_err(|e| Error::Config(format!("parking table: weibull: {e}")))?;
        let mut slots: [Option<DualGammaHourParams>; 24] = [None; 24];
        for rec in &file.hour {
            if rec.t >= 24 {
                return Err(Error::Config(format!("parking table: hour t = {} outside 0..=23", rec.t)));
            }
            let params = rec.params();
            params
                .validate()
                .map_err(|e| Error::Config(format!("parking table: hour {}: {e}", rec.t)))?;
            if slots[rec.t as usize].replace(params).is_some() {
                return Err(Error::Config(format!("parking table: hour {} listed twice", rec.t)));
            }
        }
        let missing: Vec<String> = (0..24).filter(|&t| slots[t].is_none()).map(|t| t.to_string()).collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!("parking table: missing hours {}", missing.join(", "))));
        }
        let table = slots.map(|p| p.expect("checked above"));
        Ok(Self { arrival, table })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read parking table {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        let file = TableFile {
            weibull: self.arrival,
            hour: self
                .table
                .iter()
                .enumerate()
                .map(|(t, p)| HourRecord {
                    t: t as u8,
                    kappa_s: p.kappa_s,
                    theta_s: p.theta_s,
                    kappa_l: p.kappa_l,
                    theta_l: p.theta_l,
                    d1: p.d1,
                    d2: p.d2,
                })
                .collect(),
        };
        toml::to_string(&file).expect("table serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn general() -> DualGammaHourParams {
        DualGammaHourParams::new(1.5, 1.0, 6.0, 1.5, 0.3, 0.7).unwrap()
    }

    #[test]
    fn weibull_exponential_case() {
        let w = WeibullArrival::new(1.0, 1.0).unwrap();
        assert!((w.pdf(1.0).unwrap() - (-1.0_f64).exp()).abs() < 1e-15);
        assert!(w.pdf(-0.1).is_err());
    }

    #[test]
    fn weibull_density_at_zero_follows_formula() {
        let w = WeibullArrival::default();
        assert!(w.pdf(0.0).unwrap().is_infinite());
        assert!(w.pdf(1e-6).unwrap() > w.pdf(1.0).unwrap());
    }

    #[test]
    fn weibull_density_integrates_to_one() {
        let w = WeibullArrival::default();
        // Density has an integrable t^(α−1) spike at 0; split it off.
        let head = w.cdf(1e-3);
        let body = oracle::integrate(|t| w.pdf(t).unwrap(), 1e-3, 500.0, 1e-12);
        let tail = 1.0 - w.cdf(500.0);
        assert!((head + body + tail - 1.0).abs() < 1e-6);
        assert!((body + head - 1.0).abs() < 1e-6);
    }

    #[test]
    fn truncated_quantile_endpoints() {
        let w = WeibullArrival::default();
        assert_eq!(w.truncated_quantile(0.0), 0.0);
        let top = w.truncated_quantile(1.0 - 1e-12);
        assert!(top < DAY_HOURS && top > 23.99);
        assert!(w.truncated_quantile(1.0) < DAY_HOURS);
        // Substantial mass beyond one day is renormalized away.
        assert!(w.day_mass() < 0.8);
    }

    #[test]
    fn truncated_mean_matches_quadrature() {
        let w = WeibullArrival::default();
        let num = oracle::integrate(|t| t * w.pdf(t).unwrap(), 1e-12, 24.0, 1e-12);
        let m = num / w.day_mass();
        assert!((w.truncated_mean().unwrap() - m).abs() < 1e-8);
        assert_eq!(ParkingModel::synthetic_default().expected_arrival_hour().unwrap(), 9);
    }

    #[test]
    fn duration_pdf_exponential_component() {
        let p = DualGammaHourParams::new(1.0, 2.0, 3.0, 4.0, 1.0, 0.0).unwrap();
        assert!((p.pdf(2.0).unwrap() - 0.5 * (-1.0_f64).exp()).abs() < 1e-15);
        assert!(p.pdf(0.0).is_err());
    }

    #[test]
    fn duration_pdf_degenerate_mixture() {
        let mix = DualGammaHourParams::new(2.5, 1.3, 2.5, 1.3, 0.5, 0.5).unwrap();
        let single = DualGammaHourParams::new(2.5, 1.3, 9.0, 9.0, 1.0, 0.0).unwrap();
        for &x in &[0.1, 1.0, 4.0, 12.0] {
            assert!((mix.pdf(x).unwrap() - single.pdf(x).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn duration_pdf_integrates_to_weight_sum() {
        let p = general();
        let v = oracle::integrate(|x| if x > 0.0 { p.pdf(x).unwrap() } else { 0.0 }, 0.0, 1e4, 1e-12);
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(DualGammaHourParams::new(1.5, 1.0, 6.0, 1.5, 0.3, 0.6).is_err());
        assert!(DualGammaHourParams::new(-1.0, 1.0, 6.0, 1.5, 0.3, 0.7).is_err());
        assert!(DualGammaHourParams::new(1.0, 1.0, 6.0, 1.5, 1.2, -0.2).is_err());
    }

    #[test]
    fn survival_identity_at_zero_window() {
        let p = general();
        assert_eq!(p.survival_probability(5.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn survival_memoryless_for_exponential() {
        let p = DualGammaHourParams::exponential(2.5).unwrap();
        for &ta in &[0.0, 1.0, 7.3, 30.0] {
            let s = p.survival_probability(ta, 1.7).unwrap();
            assert!((s - (-1.7_f64 / 2.5).exp()).abs() < 1e-12, "t_a = {ta}");
        }
    }

    #[test]
    fn survival_matches_quadrature_ratio() {
        let p = general();
        let f = |x: f64| p.pdf(x).unwrap();
        let ratio = oracle::tail_integral(f, 5.0, 3.0) / oracle::tail_integral(f, 2.0, 3.0);
        assert!((p.survival_probability(2.0, 3.0).unwrap() - ratio).abs() < 1e-8);
    }

    #[test]
    fn printed_form_agrees_where_well_conditioned() {
        let p = general();
        for &(ta, n) in &[(0.0, 1.0), (2.0, 3.0), (6.0, 0.5), (10.0, 2.0)] {
            let a = p.survival_probability(ta, n).unwrap();
            let b = p.survival_probability_printed_form(ta, n).unwrap();
            assert!((a - b).abs() < 1e-9, "({ta}, {n}): {a} vs {b}");
        }
    }

    #[test]
    fn extinct_condition_is_an_error() {
        let p = DualGammaHourParams::new(1.0, 0.01, 1.0, 0.01, 0.5, 0.5).unwrap();
        assert!(matches!(
            p.survival_probability(50.0, 1.0),
            Err(Error::DegenerateCondition { .. })
        ));
    }

    #[test]
    fn leave_probability_limits() {
        let p = general();
        assert!(p.leave_probability(4.0, 1e-12).unwrap() < 1e-10);
        assert!(p.leave_probability(4.0, 0.0).is_err());
        let e = DualGammaHourParams::exponential(3.0).unwrap();
        let want = 1.0 - (-0.5_f64 / 3.0).exp();
        assert!((e.leave_probability(11.0, 0.5).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn leave_probability_matches_quadrature() {
        let p = general();
        let f = |x: f64| p.pdf(x).unwrap();
        let ratio = oracle::tail_integral(f, 4.5, 3.0) / oracle::tail_integral(f, 4.0, 3.0);
        assert!((p.leave_probability(4.0, 0.5).unwrap() - (1.0 - ratio)).abs() < 1e-8);
    }

    #[test]
    fn sample_duration_degenerate_uses_short_component() {
        // Long component is far away, so any long draw would be obvious.
        let p = DualGammaHourParams::new(2.0, 0.1, 40.0, 10.0, 1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..10_000).all(|_| p.sample(&mut rng) < 5.0));
    }

    #[test]
    fn sample_duration_mean() {
        let p = general();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mean = (0..n).map(|_| p.sample(&mut rng)).sum::<f64>() / n as f64;
        let se = (p.variance() / n as f64).sqrt();
        assert!((mean - p.mean()).abs() < 3.0 * se, "mean {mean} vs {}", p.mean());
    }

    #[test]
    fn table_round_trips() {
        let m = ParkingModel::synthetic_default();
        let back = ParkingModel::from_toml_str(&m.to_toml_string()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn table_validation_messages() {
        let bad = SYNTHETIC_TABLE_TOML.replacen("d2 = 0.25", "d2 = 0.35", 1);
        let err = ParkingModel::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("hour 0") && err.contains("d1 + d2"), "{err}");

        let missing = {
            let m = ParkingModel::synthetic_default();
            let text = m.to_toml_string();
            let cut = text.rfind("[[hour]]").unwrap();
            text[..cut].to_string()
        };
        let err = ParkingModel::from_toml_str(&missing).unwrap_err().to_string();
        assert!(err.contains("missing hours 23"), "{err}");

        let unknown = SYNTHETIC_TABLE_TOML.replacen("kappa_s", "kapa_s", 1);
        assert!(ParkingModel::from_toml_str(&unknown).is_err());
    }
}
