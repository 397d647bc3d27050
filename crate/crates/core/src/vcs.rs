//! Virtual carrier sensing: the BS superimposes one code-spread, beamformed
//! carrier per assigned UE; an RA UE despreads what it hears and compares the
//! normalized energy against a threshold before transmitting.

use num_complex::Complex64;
use rand::Rng;

use crate::beamforming::BeamformerSet;
use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::numerics::{
    complex_gaussian, db_to_linear, linear_to_db, ComplexMatrix, OrthogonalCode,
};

/// Default cap on rejection attempts per admitted RA UE.
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

/// `V = sqrt(p_v) Σ_i s_i b_i^T`, an `N_L × M` block of virtual-carrier symbols.
#[derive(Debug, Clone)]
pub struct VcsSignal {
    v: ComplexMatrix,
    p_v: f64,
    code: OrthogonalCode,
}

impl VcsSignal {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn power(&self) -> f64 {
        self.p_v
    }

    pub fn code(&self) -> &OrthogonalCode {
        &self.code
    }

    pub fn code_len(&self) -> usize {
        self.code.order()
    }

    pub fn antennas(&self) -> usize {
        self.v.cols()
    }
}

pub fn build_virtual_carrier(
    b: &BeamformerSet,
    code: &OrthogonalCode,
    p_v: f64,
) -> Result<VcsSignal> {
    let (n_a, n_l, m) = (b.len(), code.order(), b.antennas());
    if n_a > n_l {
        return Err(Error::CodeTooShort {
            carriers: n_a,
            code_len: n_l,
        });
    }
    if !(p_v > 0.0 && p_v.is_finite()) {
        return Err(Error::Domain(format!(
            "virtual-carrier power must be positive, got {p_v}"
        )));
    }
    let amp = p_v.sqrt();
    let bm = b.matrix();
    let mut v = ComplexMatrix::zeros(n_l, m);
    for col in 0..m {
        let bcol = bm.column(col);
        for (l, out) in v.column_mut(col).iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, bi) in bcol.iter().enumerate() {
                acc += bi * code.entry(l, i) as f64;
            }
            *out = acc * amp;
        }
    }
    Ok(VcsSignal {
        v,
        p_v,
        code: code.clone(),
    })
}

/// Receiver-side noise switch for [`ra_receive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    On,
    Off,
}

/// `w = V h_R + n` with `n ~ CN(0, σ² I)` and `σ² = p_v / ρ_V`.
///
/// An infinite `rho_v_db` is the noiseless sentinel.
pub fn ra_receive<R: Rng + ?Sized>(
    v: &VcsSignal,
    h_r: &[Complex64],
    rho_v_db: f64,
    noise: NoiseMode,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if h_r.len() != v.antennas() {
        return Err(Error::Dimension(format!(
            "RA channel has {} entries, virtual carrier expects {}",
            h_r.len(),
            v.antennas()
        )));
    }
    let mut w = v.v.mul_vec(h_r)?;
    if noise == NoiseMode::On && rho_v_db != f64::INFINITY {
        if rho_v_db.is_nan() || rho_v_db == f64::NEG_INFINITY {
            return Err(Error::Domain(format!("virtual-carrier SNR {rho_v_db} dB")));
        }
        let sigma = (v.p_v / db_to_linear(rho_v_db)).sqrt();
        for z in &mut w {
            *z += complex_gaussian(rng) * sigma;
        }
    }
    Ok(w)
}

/// `Y = ||S^T w||^2 / (M p_v N_L^2)`.
pub fn sensing_strength(w: &[Complex64], code: &OrthogonalCode, m: usize, p_v: f64) -> Result<f64> {
    if !(p_v > 0.0) {
        return Err(Error::Domain(format!(
            "received virtual-carrier power must be positive, got {p_v}"
        )));
    }
    let n = code.order();
    if w.len() != n {
        return Err(Error::Dimension(format!(
            "received {} symbols for a code of length {n}",
            w.len()
        )));
    }
    let mut energy = 0.0;
    for c in 0..n {
        let mut t = Complex64::new(0.0, 0.0);
        for (r, wr) in w.iter().enumerate() {
            t += wr * code.entry(r, c) as f64;
        }
        energy += t.norm_sqr();
    }
    Ok(energy / (m as f64 * p_v * (n * n) as f64))
}

/// Noiseless shortcut, `Σ_i |b_i^T h|^2 / M`.
pub fn noiseless_strength(b: &BeamformerSet, h: &[Complex64]) -> f64 {
    b.response_energy(h) / b.antennas() as f64
}

/// `Y ≤ Λ` compared in dB, boundary inclusive; `Y = 0` is always available.
pub fn decide(y_linear: f64, lambda_db: f64) -> bool {
    if y_linear <= 0.0 {
        return !lambda_db.is_nan();
    }
    match linear_to_db(y_linear) {
        Ok(y_db) => y_db <= lambda_db,
        Err(_) => false,
    }
}

/// Uniform pick among the available channels.
pub fn multi_channel_select<R: Rng + ?Sized>(decisions: &[bool], rng: &mut R) -> Option<usize> {
    let count = decisions.iter().filter(|&&d| d).count();
    if count == 0 {
        return None;
    }
    let pick = rng.random_range(0..count);
    decisions
        .iter()
        .enumerate()
        .filter(|(_, &d)| d)
        .nth(pick)
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingOutcome {
    pub y_linear: f64,
    pub y_db: f64,
    pub available: bool,
    pub channel_index: Option<usize>,
}

impl SensingOutcome {
    pub fn new(y_linear: f64, lambda_db: f64) -> Self {
        let y_db = if y_linear > 0.0 {
            10.0 * y_linear.log10()
        } else {
            f64::NEG_INFINITY
        };
        SensingOutcome {
            y_linear,
            y_db,
            available: decide(y_linear, lambda_db),
            channel_index: None,
        }
    }
}

/// Full sensing pass on every channel followed by the random pick.
pub fn sense_channels<R: Rng + ?Sized>(
    signals: &[VcsSignal],
    h_r: &[&[Complex64]],
    lambda_db: f64,
    rho_v_db: f64,
    noise: NoiseMode,
    rng: &mut R,
) -> Result<(Vec<SensingOutcome>, Option<usize>)> {
    if signals.len() != h_r.len() || signals.is_empty() {
        return Err(Error::Dimension(format!(
            "{} virtual carriers for {} RA channel realizations",
            signals.len(),
            h_r.len()
        )));
    }
    let mut outcomes = Vec::with_capacity(signals.len());
    for (v, h) in signals.iter().zip(h_r) {
        let w = ra_receive(v, h, rho_v_db, noise, rng)?;
        let y = sensing_strength(&w, v.code(), v.antennas(), v.power())?;
        outcomes.push(SensingOutcome::new(y, lambda_db));
    }
    let decisions: Vec<bool> = outcomes.iter().map(|o| o.available).collect();
    let pick = multi_channel_select(&decisions, rng);
    if let Some(k) = pick {
        outcomes[k].channel_index = Some(k);
    }
    Ok((outcomes, pick))
}

/// RA channels that passed the noiseless sensing test.
#[derive(Debug, Clone)]
pub struct AdmittedRa {
    pub h_r: ComplexMatrix,
    pub strengths: Vec<f64>,
    pub attempts: usize,
}

impl AdmittedRa {
    /// Accepted over attempted draws, an estimate of the single-channel availability.
    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            1.0
        } else {
            self.h_r.cols() as f64 / self.attempts as f64
        }
    }
}

/// Rejection-samples `n_r` RA channels from `model` conditioned on `Y ≤ Λ`.
pub fn sample_admitted_ra_ues<R: Rng + ?Sized>(
    b: &BeamformerSet,
    n_r: usize,
    lambda_db: f64,
    model: &ChannelModel,
    rng: &mut R,
    max_attempts_per_ue: usize,
) -> Result<AdmittedRa> {
    let m = model.antennas();
    if b.antennas() != m {
        return Err(Error::Dimension(format!(
            "beamformers span {} antennas, channel model has {m}",
            b.antennas()
        )));
    }
    let mut h_r = ComplexMatrix::zeros(m, 0);
    let mut strengths = Vec::with_capacity(n_r);
    let mut column = vec![Complex64::new(0.0, 0.0); m];
    let mut attempts = 0;
    for _ in 0..n_r {
        let mut tries = 0;
        loop {
            if tries == max_attempts_per_ue {
                return Err(Error::AdmissionExhausted {
                    lambda_db,
                    attempts: tries,
                });
            }
            tries += 1;
            model.draw_into(rng, &mut column);
            let y = noiseless_strength(b, &column);
            if lambda_db == f64::INFINITY || decide(y, lambda_db) {
                h_r.push_column(&column)?;
                strengths.push(y);
                break;
            }
        }
        attempts += tries;
    }
    Ok(AdmittedRa {
        h_r,
        strengths,
        attempts,
    })
}
