//! Closed-form approximations under the simplified (shared-covariance) model:
//! the normalized sensing statistic `Ȳ = M Y / tr(Φ²)`, availability
//! probabilities, the conditional RA interference and the deterministic
//! equivalents of the assigned-UE SINR.

use crate::error::{Error, Result};
use crate::numerics::{
    db_to_linear, factorial, lower_incomplete_gamma_int, upper_incomplete_gamma_int,
};

/// Below this availability the conditional interference is reported as degenerate.
pub const MIN_AVAILABILITY: f64 = 1e-12;

/// Search interval for threshold calibration, in dB.
pub const CALIBRATION_RANGE_DB: (f64, f64) = (-60.0, 60.0);

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticParams {
    pub m: usize,
    pub q: usize,
    pub n_a: usize,
    pub lambda_db: f64,
    pub n_c: usize,
    /// Uplink SNR, linear.
    pub rho_u: f64,
    pub n_r: usize,
}

impl AnalyticParams {
    /// `Q = M/2`, eight assigned UEs, `Λ = 0 dB`, one channel, `ρ = -10 dB`, no RA UEs.
    pub fn table1(m: usize) -> Self {
        AnalyticParams {
            m,
            q: m / 2,
            n_a: 8,
            lambda_db: 0.0,
            n_c: 1,
            rho_u: 0.1,
            n_r: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::Domain(format!(
                "closed forms need Q >= 2, got Q={}",
                self.q
            )));
        }
        if self.n_a < 1 {
            return Err(Error::Domain(
                "closed forms need at least one assigned UE".into(),
            ));
        }
        if self.q > self.m {
            return Err(Error::Domain(format!("Q={} exceeds M={}", self.q, self.m)));
        }
        if self.lambda_db.is_nan() {
            return Err(Error::Domain("threshold is NaN".into()));
        }
        if !(self.rho_u >= 0.0 && self.rho_u.is_finite()) {
            return Err(Error::Domain(format!(
                "uplink SNR {} must be finite and >= 0",
                self.rho_u
            )));
        }
        Ok(())
    }

    fn sqrt_q(&self) -> f64 {
        (self.q as f64).sqrt()
    }

    /// `β = √Q / (√Q + N_A - 1)`.
    pub fn beta(&self) -> f64 {
        self.sqrt_q() / (self.sqrt_q() + self.n_a as f64 - 1.0)
    }

    /// `η = N_A / (√Q + N_A - 1)`.
    pub fn eta(&self) -> f64 {
        self.n_a as f64 / (self.sqrt_q() + self.n_a as f64 - 1.0)
    }

    /// `√Q / (√Q - 1)`.
    pub fn c(&self) -> f64 {
        self.sqrt_q() / (self.sqrt_q() - 1.0)
    }

    pub fn tr_phi(&self) -> f64 {
        self.m as f64
    }

    pub fn tr_phi2(&self) -> f64 {
        let m = self.m as f64;
        m * m / self.q as f64
    }

    /// `Λ̄ = M Λ / tr(Φ²) = Q Λ / M`.
    pub fn lambda_bar(&self) -> f64 {
        if self.lambda_db == f64::INFINITY {
            return f64::INFINITY;
        }
        self.m as f64 * db_to_linear(self.lambda_db) / self.tr_phi2()
    }
}

/// Approximate density of `Ȳ`.
pub fn pdf_ybar(y: f64, params: &AnalyticParams) -> Result<f64> {
    params.validate()?;
    if !(y >= 0.0) {
        return Err(Error::Domain(format!("density argument {y} must be >= 0")));
    }
    if y == f64::INFINITY {
        return Ok(0.0);
    }
    let (beta, eta, c) = (params.beta(), params.eta(), params.c());
    let n_a = params.n_a as i32;
    let mut series = 0.0;
    let mut term = 1.0;
    for n in 0..(n_a - 1) {
        if n > 0 {
            term *= c * eta * y / n as f64;
        }
        series += term;
    }
    let v = beta * eta.powi(-n_a + 1) * ((-beta * y).exp() - (-c * y).exp() * series);
    Ok(v.max(0.0))
}

/// Single-channel availability `P(Ȳ ≤ Λ̄)`, clamped to `[0, 1]`.
pub fn p_av_single(params: &AnalyticParams) -> Result<f64> {
    params.validate()?;
    let lb = params.lambda_bar();
    if lb == f64::INFINITY {
        return Ok(1.0);
    }
    let p = closed_form_availability(params, lb)?;
    if p < SERIES_SWITCH {
        return Ok(small_threshold_moments(params, lb).0);
    }
    Ok(p.clamp(0.0, 1.0))
}

// Below this the closed forms lose digits to cancellation.
const SERIES_SWITCH: f64 = 1e-4;

fn closed_form_availability(params: &AnalyticParams, lb: f64) -> Result<f64> {
    let (beta, eta, c) = (params.beta(), params.eta(), params.c());
    let n_a = params.n_a as i32;
    let mut sum = 0.0;
    for n in 0..(n_a - 1) {
        sum += eta.powi(n - n_a + 1) / factorial(n as u32)
            * upper_incomplete_gamma_int(n as u32 + 1, c * lb)?;
    }
    Ok(1.0 - eta.powi(-n_a + 1) * (-beta * lb).exp() + (1.0 - eta) * sum)
}

/// `(P(Ȳ ≤ Λ̄), ∫_0^Λ̄ y f(y) dy)` without cancellation.
///
/// Since `β = c(1 - η)`, the density equals a mixture of Gamma(n+1, c) laws,
/// `n ≥ N_A - 1`, with weights `(1 - η) η^{n - N_A + 1}`.
fn small_threshold_moments(params: &AnalyticParams, lb: f64) -> (f64, f64) {
    let (eta, c) = (params.eta(), params.c());
    let x = c * lb;
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    // x^s e^{-x} / s!, starting at s = N_A
    let s0 = params.n_a;
    let log_fact: f64 = (1..=s0).map(|k| (k as f64).ln()).sum();
    let mut pref = (s0 as f64 * x.ln() - x - log_fact).exp();
    // regularized lower gamma P(s, x) = pref(s) Σ_k x^k / ((s+1)...(s+k))
    let tail = |s: usize| {
        let (mut sum, mut t, mut k) = (1.0, 1.0, 1);
        loop {
            t *= x / (s + k) as f64;
            sum += t;
            if t < 1e-17 * sum {
                return sum;
            }
            k += 1;
        }
    };
    let (mut cdf, mut mean) = (0.0, 0.0);
    let mut w = 1.0 - eta;
    let mut s = s0;
    let mut p_s = pref * tail(s);
    loop {
        let next_pref = pref * x / (s + 1) as f64;
        let p_next = next_pref * tail(s + 1);
        cdf += w * p_s;
        mean += w * s as f64 / c * p_next;
        if w * p_s <= 1e-17 * cdf || w == 0.0 {
            break;
        }
        w *= eta;
        pref = next_pref;
        p_s = p_next;
        s += 1;
    }
    (cdf, mean)
}

/// `1 - (1 - p_sc)^{N_C}`.
pub fn p_av_multi(p_sc: f64, n_c: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_sc) {
        return Err(Error::Domain(format!("probability {p_sc} outside [0, 1]")));
    }
    if n_c < 1 {
        return Err(Error::Domain("need at least one channel".into()));
    }
    Ok(-(n_c as f64 * (-p_sc).ln_1p()).exp_m1())
}

/// `∫_0^Λ̄ y f(y) dy`, the unnormalized conditional mean of `Ȳ`.
pub fn ybar_partial_mean(params: &AnalyticParams) -> Result<f64> {
    params.validate()?;
    let lb = params.lambda_bar();
    if lb.is_finite() && closed_form_availability(params, lb)? < SERIES_SWITCH {
        return Ok(small_threshold_moments(params, lb).1);
    }
    let (beta, eta, c) = (params.beta(), params.eta(), params.c());
    let n_a = params.n_a as i32;
    let scale = eta.powi(-n_a + 1);
    let head = if lb == f64::INFINITY {
        scale / beta
    } else {
        let e = (-beta * lb).exp();
        scale * (1.0 / beta - e * (lb + 1.0 / beta))
    };
    let mut sum = 0.0;
    for n in 0..(n_a - 1) {
        let g = if lb == f64::INFINITY {
            factorial(n as u32 + 1)
        } else {
            lower_incomplete_gamma_int(n as u32 + 2, c * lb)?
        };
        sum += eta.powi(n - n_a + 1) / factorial(n as u32) * g;
    }
    Ok((head - (1.0 - eta) / c * sum).max(0.0))
}

/// Expected RA interference seen by one assigned UE, given every RA UE passed sensing.
pub fn ra_interference_expectation(params: &AnalyticParams) -> Result<f64> {
    params.validate()?;
    if params.n_r == 0 {
        return Ok(0.0);
    }
    let p = p_av_single(params)?;
    if p < MIN_AVAILABILITY {
        return Err(Error::DegenerateThreshold { p_av: p });
    }
    let prefactor = params.tr_phi2() * params.n_r as f64 * params.rho_u
        / (params.n_a as f64 * params.m as f64 * p);
    Ok(prefactor * ybar_partial_mean(params)?)
}

/// Deterministic equivalent of the CB assigned-UE SINR.
pub fn asymptotic_sinr_cb(params: &AnalyticParams) -> Result<f64> {
    let interference = ra_interference_expectation(params)?;
    let (m, rho) = (params.m as f64, params.rho_u);
    let tr = params.tr_phi();
    let num = rho / m * tr * tr;
    let den = 1.0 + (params.n_a as f64 - 1.0) * rho * params.tr_phi2() / m + interference;
    Ok(num / den)
}

/// `E[||a_i||^{-2}] = M - (M/Q)(N_A - 1)`, the mean of an Erlang(Q - N_A + 1, Q/M) law.
pub fn zf_gain_mean(params: &AnalyticParams) -> Result<f64> {
    if params.q < params.n_a {
        return Err(Error::Domain(format!(
            "ZF needs Q > N_A - 1, got Q={} and N_A={}",
            params.q, params.n_a
        )));
    }
    let m = params.m as f64;
    Ok(m - m / params.q as f64 * (params.n_a as f64 - 1.0))
}

/// Deterministic equivalent of the ZF assigned-UE SINR.
pub fn asymptotic_sinr_zf(params: &AnalyticParams) -> Result<f64> {
    params.validate()?;
    let gain = zf_gain_mean(params)?;
    let interference = ra_interference_expectation(params)?;
    Ok(params.rho_u * gain / (1.0 + interference))
}

pub fn asymptotic_rate(gamma_bar: f64) -> f64 {
    (1.0 + gamma_bar).log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationTarget {
    /// Largest tolerable expected RA interference per assigned UE (linear).
    InterferenceBudget(f64),
    /// Multi-channel availability `p` over `n_c` channels.
    Availability { p: f64, n_c: usize },
}

/// Threshold (dB) meeting `target` under the closed forms.
///
/// Both objectives increase with `Λ`, so the root is bracketed on
/// [`CALIBRATION_RANGE_DB`] and bisected to well below 0.01 dB.
pub fn calibrate_lambda(target: CalibrationTarget, params: &AnalyticParams) -> Result<f64> {
    params.validate()?;
    match target {
        CalibrationTarget::Availability { p, n_c } => {
            check_availability_target(p, n_c)?;
            let eval = |db: f64| -> Result<f64> {
                let pr = AnalyticParams {
                    lambda_db: db,
                    ..params.clone()
                };
                p_av_multi(p_av_single(&pr)?, n_c)
            };
            bisect(p, eval)
        }
        CalibrationTarget::InterferenceBudget(budget) => {
            if params.n_r == 0 {
                return Err(Error::InfeasibleTarget(
                    "interference budget needs at least one RA UE".into(),
                ));
            }
            let limit = params.n_r as f64 * params.rho_u * params.tr_phi2() / params.m as f64;
            if !(budget > 0.0 && budget < limit) {
                return Err(Error::InfeasibleTarget(format!(
                    "interference budget {budget} must lie in (0, {limit})"
                )));
            }
            let eval = |db: f64| -> Result<f64> {
                let pr = AnalyticParams {
                    lambda_db: db,
                    ..params.clone()
                };
                match ra_interference_expectation(&pr) {
                    Err(Error::DegenerateThreshold { .. }) => Ok(0.0),
                    other => other,
                }
            };
            bisect(budget, eval)
        }
    }
}

fn check_availability_target(p: f64, n_c: usize) -> Result<()> {
    if n_c < 1 {
        return Err(Error::InfeasibleTarget("need at least one channel".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InfeasibleTarget(format!(
            "availability target {p} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Smallest `Λ` (dB) at which a nondecreasing `f` reaches `target`.
fn bisect(target: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (mut lo, mut hi) = CALIBRATION_RANGE_DB;
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo >= target {
        return Err(Error::InfeasibleTarget(format!(
            "target {target} is already met at the lower bracket {lo} dB"
        )));
    }
    if fhi < target {
        return Err(Error::InfeasibleTarget(format!(
            "target {target} is not reached at the upper bracket {hi} dB"
        )));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Empirical single-channel availability curve built from sampled sensing strengths.
#[derive(Debug, Clone)]
pub struct EmpiricalAvailability {
    sorted: Vec<f64>,
}

impl EmpiricalAvailability {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InfeasibleTarget(
                "empirical availability needs samples".into(),
            ));
        }
        if samples.iter().any(|y| y.is_nan()) {
            return Err(Error::Domain("NaN sensing strength".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalAvailability { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples with `Y ≤ Λ`.
    pub fn p_sc(&self, lambda_db: f64) -> f64 {
        if lambda_db == f64::INFINITY {
            return 1.0;
        }
        let t = db_to_linear(lambda_db);
        self.sorted.partition_point(|&y| y <= t) as f64 / self.sorted.len() as f64
    }

    /// Threshold where the empirical multi-channel availability first reaches `p`.
    pub fn calibrate(&self, p: f64, n_c: usize) -> Result<f64> {
        check_availability_target(p, n_c)?;
        bisect(p, |db| p_av_multi(self.p_sc(db), n_c))
    }
}
