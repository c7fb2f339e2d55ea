//! Estimators and confidence intervals for simulation output.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Below this many expected successes (or failures) the Wald interval is
/// replaced by Wilson's.
pub const WALD_MIN_COUNT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialEstimate {
    pub point: f64,
    /// 95% confidence half-width.
    pub half_width: f64,
    pub n: u64,
    /// Standard error of `point`.
    pub std_error: f64,
}

impl TrialEstimate {
    /// Frequency estimate of a probability from `hits` out of `n` trials.
    ///
    /// Wald interval, switching to Wilson when `n p̂` or `n (1 − p̂)` is below
    /// [`WALD_MIN_COUNT`]; in that case `half_width` is half the Wilson width.
    pub fn proportion(hits: u64, n: u64) -> Self {
        assert!(n > 0, "proportion over zero trials");
        let nf = n as f64;
        let p = hits as f64 / nf;
        let se = (p * (1.0 - p) / nf).sqrt();
        let half_width = if nf * p < WALD_MIN_COUNT || nf * (1.0 - p) < WALD_MIN_COUNT {
            let (lo, hi) = wilson_interval(hits, n, Z95);
            0.5 * (hi - lo)
        } else {
            Z95 * se
        };
        Self {
            point: p,
            half_width,
            n,
            std_error: se,
        }
    }

    /// Sample mean with a normal-theory 95% interval.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n > 0, "mean of no samples");
        let nf = n as f64;
        let mean = samples.iter().sum::<f64>() / nf;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        let se = (var / nf).sqrt();
        Self {
            point: mean,
            half_width: Z95 * se,
            n: n as u64,
            std_error: se,
        }
    }
}

/// Wilson score interval for `hits` of `n`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let spread = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - spread).max(0.0) };
    let hi = if hits == n { 1.0 } else { (center + spread).min(1.0) };
    (lo, hi)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}
