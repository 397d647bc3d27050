//! Per-realization uplink SINRs for assigned and RA UEs.
//!
//! Every receiver here is a row `b^T` applied to the array output, and every
//! power term has the form `(ρ/M)|b^T h|^2` against a unit noise floor. With
//! CB rows `h^H` this is the assigned-UE CB SINR; with ZF rows
//! `sqrt(M) a^T/||a||` it is the ZF SINR with signal `ρ/||a||^2`.

use num_complex::Complex64;

use crate::beamforming::{orthogonal_complement, BeamformerKind, BeamformerSet};
use crate::error::{Error, Result};
use crate::numerics::{db_to_linear, ComplexMatrix};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum RaReceiverMode {
    /// RA channels are first projected onto the orthogonal complement of the
    /// assigned-UE subspace.
    Projected,
    /// RA beamformers are built on the raw RA channels.
    #[default]
    Direct,
}

impl std::fmt::Display for RaReceiverMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RaReceiverMode::Projected => "projected",
            RaReceiverMode::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkConfig {
    /// Common uplink SNR in dB (perfect power control).
    pub rho_u_db: f64,
    pub ra_receiver_mode: RaReceiverMode,
}

impl UplinkConfig {
    pub fn rho_u(&self) -> f64 {
        db_to_linear(self.rho_u_db)
    }
}

/// SINR terms for one UE.
///
/// `intra` is interference from UEs of the same group (assigned for an
/// assigned UE, RA for an RA UE); `cross` is interference from the other group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBreakdown {
    pub signal: f64,
    pub intra: f64,
    pub cross: f64,
    pub noise: f64,
    pub sinr: f64,
}

impl SinrBreakdown {
    pub fn new(signal: f64, intra: f64, cross: f64) -> Self {
        let noise = 1.0;
        SinrBreakdown {
            signal,
            intra,
            cross,
            noise,
            sinr: signal / (noise + intra + cross),
        }
    }

    pub fn rate(&self) -> f64 {
        instantaneous_rate(self.sinr)
    }
}

/// SINRs from precomputed receiver responses.
///
/// `own` is `B H_own` (square, diagonal = desired links); `other` is `B H_other`
/// of which only the first `other_used` columns are counted.
pub fn sinr_from_responses(
    own: &ComplexMatrix,
    other: &ComplexMatrix,
    other_used: usize,
    rho: f64,
    m: usize,
) -> Vec<SinrBreakdown> {
    let n = own.rows();
    debug_assert_eq!(own.cols(), n);
    debug_assert!(other_used <= other.cols());
    let s = rho / m as f64;
    let mut signal = vec![0.0; n];
    let mut intra = vec![0.0; n];
    let mut cross = vec![0.0; n];
    for j in 0..n {
        for (i, z) in own.column(j).iter().enumerate() {
            if i == j {
                signal[i] = z.norm_sqr() * s;
            } else {
                intra[i] += z.norm_sqr() * s;
            }
        }
    }
    for k in 0..other_used {
        for (i, z) in other.column(k).iter().enumerate() {
            cross[i] += z.norm_sqr() * s;
        }
    }
    (0..n)
        .map(|i| SinrBreakdown::new(signal[i], intra[i], cross[i]))
        .collect()
}

/// Assigned-UE SINRs for an existing beamformer set.
pub fn assigned_sinr(
    b: &BeamformerSet,
    h_a: &ComplexMatrix,
    h_r: &ComplexMatrix,
    rho: f64,
) -> Vec<SinrBreakdown> {
    let own = b.response(h_a);
    let other = b.response(h_r);
    sinr_from_responses(&own, &other, h_r.cols(), rho, b.antennas())
}

pub fn assigned_sinr_cb(h_a: &ComplexMatrix, h_r: &ComplexMatrix, rho: f64) -> Vec<SinrBreakdown> {
    assigned_sinr(&crate::beamforming::cb_beamformers(h_a), h_a, h_r, rho)
}

pub fn assigned_sinr_zf(
    h_a: &ComplexMatrix,
    h_r: &ComplexMatrix,
    rho: f64,
) -> Result<Vec<SinrBreakdown>> {
    Ok(assigned_sinr(
        &crate::beamforming::zf_beamformers(h_a)?,
        h_a,
        h_r,
        rho,
    ))
}

/// RA-UE SINRs under perfect RA CSI at the BS.
pub fn ra_sinr(
    kind: BeamformerKind,
    h_a: &ComplexMatrix,
    h_r: &ComplexMatrix,
    rho: f64,
    mode: RaReceiverMode,
) -> Result<Vec<SinrBreakdown>> {
    if h_r.cols() == 0 {
        return Ok(Vec::new());
    }
    if h_a.rows() != h_r.rows() {
        return Err(Error::Dimension(format!(
            "assigned channels have {} antennas, RA channels {}",
            h_a.rows(),
            h_r.rows()
        )));
    }
    match mode {
        RaReceiverMode::Direct => ra_sinr_on(kind, h_r, h_a, rho),
        RaReceiverMode::Projected => ra_sinr_on(
            kind,
            &orthogonal_complement(h_a)?.apply_columns(h_r),
            h_a,
            rho,
        ),
    }
}

/// RA-UE SINRs with receivers built on `effective` (raw or projected RA
/// channels); the desired links are the columns of `effective`.
pub fn ra_sinr_on(
    kind: BeamformerKind,
    effective: &ComplexMatrix,
    h_a: &ComplexMatrix,
    rho: f64,
) -> Result<Vec<SinrBreakdown>> {
    if effective.cols() == 0 {
        return Ok(Vec::new());
    }
    let b = BeamformerSet::build(kind, effective)?;
    let own = b.response(effective);
    let cross = b.response(h_a);
    Ok(sinr_from_responses(
        &own,
        &cross,
        h_a.cols(),
        rho,
        effective.rows(),
    ))
}

/// `log2(1 + sinr)`.
pub fn instantaneous_rate(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// `Σ log2(1 + sinr)` over a group of UEs.
pub fn sum_rate(sinrs: &[SinrBreakdown]) -> f64 {
    sinrs.iter().map(SinrBreakdown::rate).sum()
}

/// `(ρ/M) Σ_{i,k} |h_{A_i}^H h_{R_k}|^2`.
pub fn mutual_cb_interference(h_a: &ComplexMatrix, h_r: &ComplexMatrix, rho: f64) -> f64 {
    let mut acc = 0.0;
    for a in h_a.columns() {
        for r in h_r.columns() {
            let z: Complex64 = crate::numerics::inner(a, r);
            acc += z.norm_sqr();
        }
    }
    acc * rho / h_a.rows() as f64
}
