//! Independent reference computations used to check the closed forms.
//!
//! Nothing here calls into the analytical modules: the quadrature routines
//! integrate the defining integrals directly and the enumeration routine
//! walks every survival pattern. The `validate` command and the test suites
//! compare the closed forms against these.

/// 15-point Kronrod nodes on [0, 1] (symmetric half), with 7-point Gauss
/// weights for the embedded rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Most subintervals a single integral may use.
const MAX_INTERVALS: usize = 4000;

/// Adaptive Gauss–Kronrod quadrature of `f` over the finite interval `[a, b]`
/// to relative tolerance `rel_tol`.
///
/// Globally adaptive: the interval with the largest error estimate is split
/// until the summed estimate meets the target, roundoff dominates, or the
/// interval budget runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Start from 8 panels so one lucky panel cannot set the scale.
    let panels = 8;
    let width = (b - a) / panels as f64;
    let mut parts: Vec<(f64, f64, f64, f64)> = (0..panels)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == panels { b } else { lo + width };
            let (v, e) = gauss_kronrod_15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    while parts.len() < MAX_INTERVALS {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let scale: f64 = parts.iter().map(|p| p.2.abs()).sum();
        if err <= rel_tol * total.abs() || err <= 50.0 * f64::EPSILON * scale {
            break;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, _) = parts[i];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (lv, le) = gauss_kronrod_15(&f, lo, mid);
        let (rv, re) = gauss_kronrod_15(&f, mid, hi);
        parts[i] = (lo, mid, lv, le);
        parts.push((mid, hi, rv, re));
    }
    // Sum small to large for a little less rounding.
    let mut values: Vec<f64> = parts.iter().map(|p| p.2).collect();
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    values.iter().sum()
}

/// Integral of `f` over `[a, ∞)` via `x = a + scale · u / (1 - u)`.
///
/// `scale` should be of the order of the distance over which `f` decays.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, rel_tol: f64) -> f64 {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - u;
        let x = a + scale * u / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, rel_tol)
}

/// Poisson-binomial law by brute-force enumeration of all `2^K` survival
/// patterns. Exponential cost; intended for `K <= 20`.
pub fn poisson_binomial_enumerated(p: &[f64]) -> Vec<f64> {
    let k = p.len();
    assert!(k <= 24, "enumeration oracle limited to 24 relays");
    let mut dist = vec![0.0; k + 1];
    for mask in 0u32..(1u32 << k) {
        let mut prob = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            prob *= if mask & (1 << i) != 0 { pi } else { 1.0 - pi };
        }
        dist[mask.count_ones() as usize] += prob;
    }
    dist
}

/// Every survival pattern of `p` as `(pattern probability, survivor count)`.
pub fn survival_patterns(p: &[f64]) -> Vec<(f64, usize)> {
    let k = p.len();
    assert!(k <= 24, "enumeration oracle limited to 24 relays");
    (0u32..(1u32 << k))
        .map(|mask| {
            let prob = p
                .iter()
                .enumerate()
                .map(|(i, &pi)| if mask & (1 << i) != 0 { pi } else { 1.0 - pi })
                .product();
            (prob, mask.count_ones() as usize)
        })
        .collect()
}

/// `Γ(s)` by quadrature of `∫₀^∞ t^(s-1) e^(-t) dt`, evaluated in log space
/// around the integrand's mode so large `s` does not overflow.
pub fn gamma_by_quadrature(s: f64) -> f64 {
    if s < 1.0 {
        // t = u^(1/s) removes the endpoint singularity: Γ(s) = (1/s)∫ e^(-u^(1/s)) du
        let inv = 1.0 / s;
        return inv * integrate_to_infinity(|u: f64| (-u.powf(inv)).exp(), 0.0, 1.0, 1e-14);
    }
    let mode = s - 1.0;
    let log_peak = if mode > 0.0 { mode * mode.ln() - mode } else { 0.0 };
    let log_integrand = |t: f64| {
        if t <= 0.0 {
            return if mode == 0.0 { 1.0 } else { 0.0 };
        }
        ((s - 1.0) * t.ln() - t - log_peak).exp()
    };
    let spread = s.sqrt().max(1.0);
    let lower = integrate(log_integrand, 0.0, mode, 1e-14);
    let upper = integrate_to_infinity(log_integrand, mode, spread, 1e-14);
    (lower + upper) * log_peak.exp()
}

/// `γ(s, x)` by quadrature of the defining integral.
pub fn lower_gamma_by_quadrature(s: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // Same u = t^s substitution: γ(s, x) = (1/s)∫₀^(x^s) e^(-u^(1/s)) du
    let inv = 1.0 / s;
    if s < 1.0 {
        return inv * integrate(|u: f64| (-u.powf(inv)).exp(), 0.0, x.powf(s), 1e-14);
    }
    // Scale by the integrand's largest value on [0, x].
    let t_peak = (s - 1.0).min(x);
    let log_peak = if t_peak > 0.0 { (s - 1.0) * t_peak.ln() - t_peak } else { 0.0 };
    let f = |t: f64| {
        if t <= 0.0 {
            return if s == 1.0 { (-log_peak).exp() } else { 0.0 };
        }
        ((s - 1.0) * t.ln() - t - log_peak).exp()
    };
    if t_peak > 0.0 && t_peak < x {
        (integrate(f, 0.0, t_peak, 1e-14) + integrate(f, t_peak, x, 1e-14)) * log_peak.exp()
    } else {
        integrate(f, 0.0, x, 1e-14) * log_peak.exp()
    }
}

/// `Γ(s, x)` by quadrature of `∫ₓ^∞ t^(s-1) e^(-t) dt`.
pub fn upper_gamma_by_quadrature(s: f64, x: f64) -> f64 {
    // t = x + v; factor e^(-x) x^(s-1) out of the integrand.
    let f = |v: f64| ((s - 1.0) * (1.0 + v / x).ln() - v).exp();
    let scale = 1.0_f64.max(s - 1.0 - x);
    integrate_to_infinity(f, 0.0, scale, 1e-14) * ((s - 1.0) * x.ln() - x).exp()
}

/// `K1(x) = ∫₀^∞ e^(-x cosh t) cosh t dt`.
pub fn bessel_k1_by_quadrature(x: f64) -> f64 {
    // Shift out e^(-x) so large arguments keep full relative precision.
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * t.cosh();
    // Beyond t_max the integrand is below e^(-700) relative to its peak.
    let t_max = (1.0 + 700.0 / x).acosh();
    integrate(f, 0.0, t_max, 1e-14) * (-x).exp()
}

/// `E1(x) = ∫₁^∞ e^(-tx) / t dt`, via `t = 1 + v / x`.
pub fn e1_by_quadrature(x: f64) -> f64 {
    let f = |v: f64| (-v).exp() / (x + v);
    integrate_to_infinity(f, 0.0, 1.0, 1e-14) * (-x).exp()
}

/// Survival tail `∫ₐ^∞ f` of a density by quadrature. `scale` is the decay
/// length used by the infinite-range map.
pub fn tail_integral<F: Fn(f64) -> f64>(density: F, a: f64, scale: f64) -> f64 {
    integrate_to_infinity(density, a, scale, 1e-13)
}

/// Kolmogorov–Smirnov statistic of `samples` (sorted in place) against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = f - i as f64 / n;
            let hi = (i + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the one-sample KS statistic `d` at sample size `n`
/// (Stephens' small-sample correction).
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
