//! Two-hop amplify-and-forward link model.
//!
//! Source S transmits with power `p_s`; relay i amplifies with gain
//! `β_i = sqrt(P_r / (P_s |h_sr|² + N0))` and forwards to D. Substituting
//! that gain into the received signal gives the end-to-end SNR
//! `f(x, y) = xy / (1 + x + y)` with per-hop SNRs `x = P_s |h_sr|² / N0` and
//! `y = P_r |h_rd|² / N0`, so β never has to be evaluated on its own.
//!
//! Channel power gains are exponential with mean 2 (`|h|² ~ E(1/2)`), which
//! makes the reciprocal mean per-hop SNRs `w_sr = N0 / (2 P_s)` and
//! `w_rd = N0 / (2 P_r)`.
//!
//! Three CDFs of the link SNR are available:
//!
//! * [`snr_cdf_exact`]: the Bessel form
//!   `1 − 2x√(w_sr w_rd) e^{−x(w_sr+w_rd)} K1(2x√(w_sr w_rd))`. It is the
//!   exact law of the harmonic-mean SNR `xy / (x + y)` and a tight
//!   approximation of `f(x, y)` once both hops are strong.
//! * [`snr_cdf_approx`]: `1 − e^{−μx}` with `μ = w_sr + w_rd`, from the
//!   small-argument limit `z K1(z) → 1`.
//! * [`snr_cdf_af`]: the exact law of `f(x, y)`,
//!   `1 − 2√(w_sr w_rd x(x+1)) e^{−x(w_sr+w_rd)} K1(2√(w_sr w_rd x(x+1)))`.

use crate::error::{Error, Result};
use crate::specfun;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Radio parameters of the two-hop link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    /// Source transmit power, W.
    pub p_s: f64,
    /// Relay transmit power, W.
    pub p_r: f64,
    /// Noise power, W.
    pub n0: f64,
    /// SNR threshold, linear.
    pub gamma_th: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Communication window, hours.
    pub tau: f64,
}

impl RadioConfig {
    pub fn new(p_s: f64, p_r: f64, n0: f64, gamma_th: f64, bandwidth: f64, tau: f64) -> Result<Self> {
        let cfg = Self {
            p_s,
            p_r,
            n0,
            gamma_th,
            bandwidth,
            tau,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_s", self.p_s),
            ("p_r", self.p_r),
            ("n0", self.n0),
            ("gamma_th", self.gamma_th),
            ("bandwidth", self.bandwidth),
            ("tau", self.tau),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    value: v,
                    reason: "must be finite and > 0",
                });
            }
        }
        Ok(())
    }

    pub fn with_threshold(mut self, gamma_th: f64) -> Self {
        self.gamma_th = gamma_th;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn rates(&self) -> LinkRates {
        LinkRates::from_config(self)
    }
}

impl Default for RadioConfig {
    /// 2 W at source and relays, N0 = 0.02 W (μ = 0.01), 10 dB threshold,
    /// 1 Hz, 6-minute window.
    fn default() -> Self {
        Self {
            p_s: 2.0,
            p_r: 2.0,
            n0: 0.02,
            gamma_th: db_to_linear(10.0),
            bandwidth: 1.0,
            tau: 0.1,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Reciprocal mean per-hop SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRates {
    pub w_sr: f64,
    pub w_rd: f64,
    pub mu: f64,
}

impl LinkRates {
    pub fn new(w_sr: f64, w_rd: f64) -> Self {
        Self {
            w_sr,
            w_rd,
            mu: w_sr + w_rd,
        }
    }

    pub fn from_config(cfg: &RadioConfig) -> Self {
        Self::new(cfg.n0 / (2.0 * cfg.p_s), cfg.n0 / (2.0 * cfg.p_r))
    }
}

/// End-to-end SNR `xy / (1 + x + y)` from the two channel power gains.
pub fn link_snr(gain_sr: f64, gain_rd: f64, cfg: &RadioConfig) -> f64 {
    let x = cfg.p_s * gain_sr / cfg.n0;
    let y = cfg.p_r * gain_rd / cfg.n0;
    af_snr(x, y)
}

/// `f(x, y) = xy / (1 + x + y)` on per-hop SNRs.
#[inline]
pub fn af_snr(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    x * y / (1.0 + x + y)
}

/// Mean of `|h|²`.
pub const CHANNEL_GAIN_MEAN: f64 = 2.0;

/// Inverse CDF of the channel power gain, `−2 ln(1 − u)`.
#[inline]
pub fn channel_gain_quantile(u: f64) -> f64 {
    -CHANNEL_GAIN_MEAN * (-u).ln_1p()
}

pub fn sample_channel_gain<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    channel_gain_quantile(rng.random::<f64>())
}

/// One draw of the end-to-end SNR under independent fading on both hops.
pub fn sample_link_snr<R: Rng + ?Sized>(rng: &mut R, cfg: &RadioConfig) -> f64 {
    let g1 = sample_channel_gain(rng);
    let g2 = sample_channel_gain(rng);
    link_snr(g1, g2, cfg)
}

// 1 − z e^{−x(w1+w2)} K1(z), written so large z underflows cleanly.
fn bessel_cdf(z: f64, decay: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if decay > 745.0 {
        return 1.0;
    }
    // K1(z) = e^{−z} K1s(z)
    let k1s = specfun::bessel_k1_scaled(z).expect("z > 0");
    (1.0 - z * k1s * (-(decay + z)).exp()).clamp(0.0, 1.0)
}

/// Bessel-form CDF of the link SNR.
pub fn snr_cdf_exact(x: f64, rates: &LinkRates) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let z = 2.0 * x * (rates.w_sr * rates.w_rd).sqrt();
    bessel_cdf(z, x * (rates.w_sr + rates.w_rd))
}

/// Exponential approximation `1 − e^{−μx}`.
pub fn snr_cdf_approx(x: f64, mu: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    -(-mu * x).exp_m1()
}

/// Exact CDF of `xy / (1 + x + y)` with exponential per-hop SNRs.
pub fn snr_cdf_af(x: f64, rates: &LinkRates) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let z = 2.0 * (rates.w_sr * rates.w_rd * x * (x + 1.0)).sqrt();
    bessel_cdf(z, x * (rates.w_sr + rates.w_rd))
}

/// Which link-SNR CDF feeds the SNR-outage term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrCdf {
    /// `1 − e^{−μx}`.
    #[default]
    Approx,
    /// Bessel form on `x²`.
    Exact,
    /// Bessel form on `x(x+1)`, exact for `xy / (1 + x + y)`.
    Af,
}

impl SnrCdf {
    pub fn eval(self, x: f64, rates: &LinkRates) -> f64 {
        match self {
            SnrCdf::Approx => snr_cdf_approx(x, rates.mu),
            SnrCdf::Exact => snr_cdf_exact(x, rates),
            SnrCdf::Af => snr_cdf_af(x, rates),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SnrCdf::Approx => "approx",
            SnrCdf::Exact => "exact",
            SnrCdf::Af => "af",
        }
    }
}
