//! Small-scale channel generation for assigned and RA UEs.
//!
//! Two correlated Rayleigh models are provided. In the *practical* model every
//! UE has its own mixing matrix made of uniform-linear-array steering vectors
//! around a random azimuth. In the *simplified* model all UEs share a single
//! mixing matrix `sqrt(M/Q) * Abar` where `Abar` has orthonormal real columns,
//! which is the setting the closed-form analysis assumes.
//!
//! Large-scale fading is normalized to one for every UE (perfect power
//! control); all power scaling happens through the SNR parameters downstream.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    complex_gaussian, fill_complex_gaussian, orthonormal_real_basis, ComplexMatrix, RealMatrix,
    RngStream,
};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Practical,
    Simplified,
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelTag::Practical => "practical",
            ModelTag::Simplified => "simplified",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PracticalChannelParams {
    pub m: usize,
    pub q: usize,
    /// Antenna spacing in wavelengths.
    pub omega: f64,
    /// Azimuth interval `(min, max)` in degrees.
    pub phi_a_range: (f64, f64),
    /// Angle spread in degrees.
    pub phi_s: f64,
}

impl PracticalChannelParams {
    /// Reference geometry: `Q = M/2`, half-wavelength spacing, azimuth in
    /// `[-60, 60]` and a 20 degree spread.
    pub fn table1(m: usize) -> Self {
        PracticalChannelParams {
            m,
            q: (m / 2).max(1),
            omega: 0.5,
            phi_a_range: (-60.0, 60.0),
            phi_s: 20.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Validation("practical channel needs M >= 1".into()));
        }
        if self.q < 1 || self.q > self.m {
            return Err(Error::Validation(format!(
                "path count Q={} must satisfy 1 <= Q <= M={}",
                self.q, self.m
            )));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Validation(format!(
                "antenna spacing {} must be > 0",
                self.omega
            )));
        }
        if !(self.phi_s >= 0.0 && self.phi_s.is_finite()) {
            return Err(Error::Validation(format!(
                "angle spread {} must be >= 0",
                self.phi_s
            )));
        }
        let (lo, hi) = self.phi_a_range;
        if !(lo <= hi) {
            return Err(Error::Validation(format!(
                "azimuth interval [{lo}, {hi}] is empty"
            )));
        }
        // AOAs are never wrapped, so the spread-widened interval must stay inside [-180, 180].
        let (alo, ahi) = (lo - self.phi_s / 2.0, hi + self.phi_s / 2.0);
        if alo < -180.0 || ahi > 180.0 {
            return Err(Error::Validation(format!(
                "AOA interval [{alo}, {ahi}] leaves [-180, 180] degrees"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplifiedChannelParams {
    pub m: usize,
    pub q: usize,
    pub basis_seed: u64,
}

impl SimplifiedChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.q < 1 || self.q > self.m {
            return Err(Error::Validation(format!(
                "simplified channel needs 1 <= Q={} <= M={}",
                self.q, self.m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelParams {
    Practical(PracticalChannelParams),
    Simplified(SimplifiedChannelParams),
}

impl ChannelParams {
    pub fn antennas(&self) -> usize {
        match self {
            ChannelParams::Practical(p) => p.m,
            ChannelParams::Simplified(p) => p.m,
        }
    }

    pub fn tag(&self) -> ModelTag {
        match self {
            ChannelParams::Practical(_) => ModelTag::Practical,
            ChannelParams::Simplified(_) => ModelTag::Simplified,
        }
    }
}

/// `tr(Φ)` and `tr(Φ²)` of the shared simplified-model covariance.
///
/// The practical model has a different covariance per UE, so no single pair
/// exists and the call is rejected.
pub fn covariance_traces(params: &ChannelParams) -> Result<(f64, f64)> {
    match params {
        ChannelParams::Simplified(p) => {
            let m = p.m as f64;
            Ok((m, m * m / p.q as f64))
        }
        ChannelParams::Practical(_) => Err(Error::ModelMismatch(
            "covariance traces are only defined for the simplified model".into(),
        )),
    }
}

/// ULA steering vector: entry `m` is `exp(-j 2π ω m cos φ) / sqrt(Q)`.
pub fn steering_vector(m: usize, omega: f64, phi_deg: f64, q: usize) -> Vec<Complex64> {
    let scale = 1.0 / (q as f64).sqrt();
    let k = -2.0 * PI * omega * phi_deg.to_radians().cos();
    (0..m)
        .map(|i| Complex64::from_polar(scale, k * i as f64))
        .collect()
}

/// Geometry of one practical-model UE.
#[derive(Debug, Clone, PartialEq)]
pub struct PracticalUe {
    pub azimuth_deg: f64,
    pub aoas_deg: Vec<f64>,
    pub fading: Vec<Complex64>,
}

impl PracticalUe {
    /// Mixing matrix `A_u = [a(φ_1), ..., a(φ_Q)]`.
    pub fn mixing_matrix(&self, params: &PracticalChannelParams) -> ComplexMatrix {
        let cols: Vec<_> = self
            .aoas_deg
            .iter()
            .map(|&phi| steering_vector(params.m, params.omega, phi, params.q))
            .collect();
        ComplexMatrix::from_columns(params.m, &cols).expect("steering vectors share length M")
    }

    /// `tr(A_u A_u^H)`, which is `M` for any set of AOAs.
    pub fn tr_phi(&self, params: &PracticalChannelParams) -> f64 {
        params.m as f64 * self.aoas_deg.len() as f64 / params.q as f64
    }

    /// `tr((A_u A_u^H)^2) = Σ_{p,q} |a_p^H a_q|^2`, via the Dirichlet kernel.
    pub fn tr_phi2(&self, params: &PracticalChannelParams) -> f64 {
        let cos: Vec<f64> = self.aoas_deg.iter().map(|a| a.to_radians().cos()).collect();
        let m = params.m as f64;
        let inv_q = 1.0 / params.q as f64;
        let mut total = 0.0;
        for &cp in &cos {
            for &cq in &cos {
                let half = PI * params.omega * (cp - cq);
                let s = half.sin();
                let mag = if s.abs() < 1e-12 {
                    m
                } else {
                    ((m * half).sin() / s).abs()
                };
                total += (mag * inv_q).powi(2);
            }
        }
        total
    }
}

/// Channel generator for one scenario. The simplified model's shared basis is
/// built once here so every draw (and the analysis) sees the same covariance.
#[derive(Debug, Clone)]
pub enum ChannelModel {
    Practical(PracticalChannelParams),
    Simplified {
        params: SimplifiedChannelParams,
        basis: RealMatrix,
        scale: f64,
    },
}

impl ChannelModel {
    pub fn new(params: &ChannelParams) -> Result<Self> {
        match params {
            ChannelParams::Practical(p) => {
                p.validate()?;
                Ok(ChannelModel::Practical(p.clone()))
            }
            ChannelParams::Simplified(p) => {
                p.validate()?;
                let basis = orthonormal_real_basis(p.m, p.q, &RngStream::new(p.basis_seed, 0))?;
                Ok(ChannelModel::Simplified {
                    params: p.clone(),
                    basis,
                    scale: (p.m as f64 / p.q as f64).sqrt(),
                })
            }
        }
    }

    pub fn antennas(&self) -> usize {
        match self {
            ChannelModel::Practical(p) => p.m,
            ChannelModel::Simplified { params, .. } => params.m,
        }
    }

    pub fn paths(&self) -> usize {
        match self {
            ChannelModel::Practical(p) => p.q,
            ChannelModel::Simplified { params, .. } => params.q,
        }
    }

    pub fn tag(&self) -> ModelTag {
        match self {
            ChannelModel::Practical(_) => ModelTag::Practical,
            ChannelModel::Simplified { .. } => ModelTag::Simplified,
        }
    }

    /// Draw one UE channel into `out` (length `M`).
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [Complex64]) {
        match self {
            ChannelModel::Practical(p) => {
                let ue = draw_practical_ue(p, rng);
                synthesize_practical(p, &ue, out);
            }
            ChannelModel::Simplified {
                params,
                basis,
                scale,
            } => {
                let mut v = vec![Complex64::new(0.0, 0.0); params.q];
                fill_complex_gaussian(rng, &mut v);
                for z in v.iter_mut() {
                    *z *= *scale;
                }
                basis.mul_complex_into(&v, out);
            }
        }
    }

    pub fn draw_column<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let mut h = vec![Complex64::new(0.0, 0.0); self.antennas()];
        self.draw_into(rng, &mut h);
        h
    }

    /// `n` independent UE channels as the columns of an `M x n` matrix.
    pub fn draw_columns<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> ComplexMatrix {
        let m = self.antennas();
        let mut h = ComplexMatrix::zeros(m, n);
        for j in 0..n {
            self.draw_into(rng, h.column_mut(j));
        }
        h
    }
}

fn draw_practical_ue<R: Rng + ?Sized>(p: &PracticalChannelParams, rng: &mut R) -> PracticalUe {
    let (lo, hi) = p.phi_a_range;
    let azimuth_deg = lo + rng.random::<f64>() * (hi - lo);
    let start = azimuth_deg - p.phi_s / 2.0;
    let aoas_deg = (0..p.q)
        .map(|_| start + rng.random::<f64>() * p.phi_s)
        .collect();
    let fading = (0..p.q).map(|_| complex_gaussian(rng)).collect();
    PracticalUe {
        azimuth_deg,
        aoas_deg,
        fading,
    }
}

/// `A_u v_u` without materializing `A_u`: entry `m` is
/// `Σ_q v_q z_q^m / sqrt(Q)` with `z_q = exp(-j 2π ω cos φ_q)`, walked by
/// repeated multiplication.
fn synthesize_practical(p: &PracticalChannelParams, ue: &PracticalUe, out: &mut [Complex64]) {
    let scale = 1.0 / (p.q as f64).sqrt();
    let k = -2.0 * PI * p.omega;
    // split real/imaginary lanes so the per-path update vectorizes
    let (mut zr, mut zi): (Vec<f64>, Vec<f64>) = ue
        .aoas_deg
        .iter()
        .map(|a| (k * a.to_radians().cos()).sin_cos())
        .map(|(s, c)| (c, s))
        .unzip();
    let (mut ar, mut ai): (Vec<f64>, Vec<f64>) = ue
        .fading
        .iter()
        .map(|v| (v.re * scale, v.im * scale))
        .unzip();
    for (i, o) in out.iter_mut().enumerate() {
        let (mut sr, mut si) = (0.0, 0.0);
        for (((xr, xi), &cr), &ci) in ar.iter_mut().zip(ai.iter_mut()).zip(&zr).zip(&zi) {
            let (r, im) = (*xr, *xi);
            sr += r;
            si += im;
            *xr = r * cr - im * ci;
            *xi = r * ci + im * cr;
        }
        *o = Complex64::new(sr, si);
        // Renormalize the phasors periodically so rounding drift stays below 1e-15.
        if i % 64 == 63 {
            for (r, im) in zr.iter_mut().zip(zi.iter_mut()) {
                let n = r.hypot(*im);
                *r /= n;
                *im /= n;
            }
        }
    }
}

/// Channel columns for one UE population, with covariance-trace metadata.
#[derive(Debug, Clone)]
pub struct ChannelColumns {
    pub h: ComplexMatrix,
    pub tr_phi: f64,
    pub tr_phi2: f64,
    pub model: ModelTag,
    /// Per-UE geometry; empty for the simplified model.
    pub ues: Vec<PracticalUe>,
}

/// Draw `n_ues` practical-model channels. `tr_phi`/`tr_phi2` are averages of the
/// per-UE traces and are informational only.
pub fn draw_practical_channel(
    params: &PracticalChannelParams,
    n_ues: usize,
    stream: &RngStream,
) -> Result<ChannelColumns> {
    params.validate()?;
    let mut rng = stream.rng();
    let mut h = ComplexMatrix::zeros(params.m, n_ues);
    let mut ues = Vec::with_capacity(n_ues);
    for j in 0..n_ues {
        let ue = draw_practical_ue(params, &mut rng);
        synthesize_practical(params, &ue, h.column_mut(j));
        ues.push(ue);
    }
    let n = n_ues.max(1) as f64;
    let tr_phi = ues.iter().map(|u| u.tr_phi(params)).sum::<f64>() / n;
    let tr_phi2 = ues.iter().map(|u| u.tr_phi2(params)).sum::<f64>() / n;
    Ok(ChannelColumns {
        h,
        tr_phi,
        tr_phi2,
        model: ModelTag::Practical,
        ues,
    })
}

/// Draw `n_ues` simplified-model channels `sqrt(M/Q) * Abar * v_u`.
pub fn draw_simplified_channel(
    params: &SimplifiedChannelParams,
    n_ues: usize,
    stream: &RngStream,
) -> Result<ChannelColumns> {
    let cp = ChannelParams::Simplified(params.clone());
    let model = ChannelModel::new(&cp)?;
    let (tr_phi, tr_phi2) = covariance_traces(&cp)?;
    let h = model.draw_columns(n_ues, &mut stream.rng());
    Ok(ChannelColumns {
        h,
        tr_phi,
        tr_phi2,
        model: ModelTag::Simplified,
        ues: Vec::new(),
    })
}

/// Assigned-UE and RA-UE channels of one realization.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// `H_A`, `M x N_A`.
    pub assigned: ComplexMatrix,
    /// `H_R`, `M x N_R`.
    pub random_access: ComplexMatrix,
    pub tr_phi: f64,
    pub tr_phi2: f64,
    pub model: ModelTag,
}

impl ChannelSet {
    pub fn draw(
        params: &ChannelParams,
        n_a: usize,
        n_r: usize,
        stream: &RngStream,
    ) -> Result<Self> {
        let cols = match params {
            ChannelParams::Practical(p) => draw_practical_channel(p, n_a + n_r, stream)?,
            ChannelParams::Simplified(p) => draw_simplified_channel(p, n_a + n_r, stream)?,
        };
        let m = cols.h.rows();
        let assigned = cols.h.leading_columns(n_a);
        let tail = cols.h.as_slice()[n_a * m..].to_vec();
        let random_access = ComplexMatrix::from_column_major(m, n_r, tail)?;
        Ok(Self {
            assigned,
            random_access,
            tr_phi: cols.tr_phi,
            tr_phi2: cols.tr_phi2,
            model: cols.model,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{inner, norm_sqr};

    fn table1(m: usize) -> PracticalChannelParams {
        PracticalChannelParams {
            m,
            q: m / 2,
            omega: 0.5,
            phi_a_range: (-60.0, 60.0),
            phi_s: 20.0,
        }
    }

    #[test]
    fn steering_vector_broadside_and_endfire() {
        let a = steering_vector(5, 0.37, 90.0, 4);
        for z in &a {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        }
        let b = steering_vector(2, 0.5, 0.0, 1);
        assert!((b[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((b[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn steering_vector_norm() {
        for &(m, q, phi) in &[(100, 50, 13.0), (7, 3, -120.0), (300, 150, 61.5)] {
            let a = steering_vector(m, 0.5, phi, q);
            assert!((norm_sqr(&a) - m as f64 / q as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn practical_columns_are_mixing_times_fading() {
        let p = table1(64);
        let cols = draw_practical_channel(&p, 3, &RngStream::new(5, 5)).unwrap();
        for (j, ue) in cols.ues.iter().enumerate() {
            let a = ue.mixing_matrix(&p);
            for z in a.as_slice() {
                assert!((z.norm() - 1.0 / (p.q as f64).sqrt()).abs() < 1e-12);
            }
            let want = a.mul_vec(&ue.fading).unwrap();
            for (x, y) in want.iter().zip(cols.h.column(j)) {
                assert!((x - y).norm() < 1e-10);
            }
            assert!(ue
                .aoas_deg
                .iter()
                .all(|&phi| (phi - ue.azimuth_deg).abs() <= 10.0));
            assert!((-60.0..=60.0).contains(&ue.azimuth_deg));
        }
    }

    #[test]
    fn practical_tr_phi2_matches_explicit_gram() {
        let p = table1(40);
        let cols = draw_practical_channel(&p, 2, &RngStream::new(8, 1)).unwrap();
        for ue in &cols.ues {
            let a = ue.mixing_matrix(&p);
            let g = a.gram();
            let explicit: f64 = g.as_slice().iter().map(|z| z.norm_sqr()).sum();
            assert!((ue.tr_phi2(&p) - explicit).abs() < 1e-9 * explicit);
            let tr = g.trace().re;
            assert!((ue.tr_phi(&p) - tr).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_spread_gives_rank_one_direction() {
        let mut p = table1(16);
        p.phi_s = 0.0;
        let cols = draw_practical_channel(&p, 1, &RngStream::new(1, 1)).unwrap();
        let ue = &cols.ues[0];
        assert!(ue.aoas_deg.iter().all(|&a| a == ue.azimuth_deg));
        let a = steering_vector(p.m, p.omega, ue.azimuth_deg, p.q);
        // h = (Σ v_q) a: check proportionality h_i / a_i is constant
        let h = cols.h.column(0);
        let ratio = h[0] / a[0];
        for (x, y) in h.iter().zip(&a) {
            assert!((x - ratio * y).norm() < 1e-10);
        }
    }

    #[test]
    fn practical_draws_are_deterministic() {
        let p = table1(20);
        let a = draw_practical_channel(&p, 2, &RngStream::new(3, 9)).unwrap();
        let b = draw_practical_channel(&p, 2, &RngStream::new(3, 9)).unwrap();
        assert_eq!(a.h, b.h);
        assert_eq!(a.ues, b.ues);
    }

    #[test]
    fn covariance_traces_closed_form() {
        let s = |m, q| {
            ChannelParams::Simplified(SimplifiedChannelParams {
                m,
                q,
                basis_seed: 0,
            })
        };
        assert_eq!(covariance_traces(&s(100, 50)).unwrap(), (100.0, 200.0));
        assert_eq!(covariance_traces(&s(100, 100)).unwrap(), (100.0, 100.0));
        assert_eq!(covariance_traces(&s(300, 150)).unwrap(), (300.0, 600.0));
        assert!(matches!(
            covariance_traces(&ChannelParams::Practical(table1(100))),
            Err(Error::ModelMismatch(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_geometry() {
        let mut p = table1(10);
        p.q = 11;
        assert!(p.validate().is_err());
        let mut p = table1(10);
        p.phi_a_range = (-175.0, 0.0);
        assert!(p.validate().is_err());
        let mut p = table1(10);
        p.omega = 0.0;
        assert!(p.validate().is_err());
        let mut p = table1(10);
        p.phi_a_range = (5.0, -5.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn simplified_isotropic_limit() {
        // Q = M: the shared basis is a full rotation and h ~ CN(0, I).
        let p = SimplifiedChannelParams {
            m: 4,
            q: 4,
            basis_seed: 2,
        };
        let cols = draw_simplified_channel(&p, 20_000, &RngStream::new(4, 4)).unwrap();
        let n = cols.h.cols() as f64;
        for i in 0..4 {
            for j in 0..4 {
                let c: Complex64 = cols
                    .h
                    .columns()
                    .map(|h| h[i] * h[j].conj())
                    .sum::<Complex64>()
                    / n;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c - want).norm() < 0.04, "cov[{i},{j}] = {c}");
            }
        }
    }

    #[test]
    fn channel_set_splits_columns() {
        let params = ChannelParams::Simplified(SimplifiedChannelParams {
            m: 10,
            q: 5,
            basis_seed: 1,
        });
        let set = ChannelSet::draw(&params, 3, 2, &RngStream::new(0, 0)).unwrap();
        assert_eq!((set.assigned.rows(), set.assigned.cols()), (10, 3));
        assert_eq!(
            (set.random_access.rows(), set.random_access.cols()),
            (10, 2)
        );
        assert_eq!((set.tr_phi, set.tr_phi2), (10.0, 20.0));
        assert!(inner(set.assigned.column(0), set.random_access.column(0)).norm() > 0.0);
    }
}
