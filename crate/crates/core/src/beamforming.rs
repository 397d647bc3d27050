//! Conjugate (CB) and zero-forcing (ZF) beamformers built from the assigned-UE
//! channels, plus the projector onto the orthogonal complement of their span.
//!
//! One `BeamformerSet` serves as both the downlink virtual-carrier precoder and
//! the uplink receive filter (TDD reciprocity).

use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{inner, norm_sqr, pseudo_inverse_left, ComplexMatrix, HermitianCholesky};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum BeamformerKind {
    Cb,
    Zf,
}

impl std::fmt::Display for BeamformerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BeamformerKind::Cb => "cb",
            BeamformerKind::Zf => "zf",
        })
    }
}

/// Rows `b_i^T`, one per assigned UE.
///
/// CB rows are the raw conjugate channels `h_i^H` (not normalized). ZF rows are
/// `sqrt(M) a_i^T / ||a_i||` with `a_i^T` the rows of the left pseudo-inverse.
#[derive(Debug, Clone)]
pub struct BeamformerSet {
    // N_A x M
    matrix: ComplexMatrix,
    kind: BeamformerKind,
    source_fingerprint: u64,
    // ||a_i|| for ZF
    pinv_row_norms: Option<Vec<f64>>,
}

impl BeamformerSet {
    pub fn build(kind: BeamformerKind, h_a: &ComplexMatrix) -> Result<Self> {
        match kind {
            BeamformerKind::Cb => Ok(cb_beamformers(h_a)),
            BeamformerKind::Zf => zf_beamformers(h_a),
        }
    }

    pub fn kind(&self) -> BeamformerKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn antennas(&self) -> usize {
        self.matrix.cols()
    }

    pub fn source_fingerprint(&self) -> u64 {
        self.source_fingerprint
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        self.matrix.row(i)
    }

    /// `||a_i||` of the pseudo-inverse row behind ZF row `i`.
    pub fn pinv_row_norm(&self, i: usize) -> Option<f64> {
        self.pinv_row_norms.as_ref().map(|n| n[i])
    }

    /// `B h`, i.e. every `b_i^T h`.
    pub fn apply_into(&self, h: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(h.len(), self.antennas());
        out.fill(Complex64::new(0.0, 0.0));
        for (m, hm) in h.iter().enumerate() {
            for (o, b) in out.iter_mut().zip(self.matrix.column(m)) {
                *o += b * hm;
            }
        }
    }

    pub fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.apply_into(h, &mut out);
        out
    }

    /// `B H`: entry `(i, k)` is `b_i^T h_k`.
    pub fn response(&self, h: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.len(), h.cols());
        for k in 0..h.cols() {
            self.apply_into(h.column(k), out.column_mut(k));
        }
        out
    }

    /// `Σ_i |b_i^T h|^2`.
    pub fn response_energy(&self, h: &[Complex64]) -> f64 {
        norm_sqr(&self.apply(h))
    }
}

pub fn cb_beamformers(h_a: &ComplexMatrix) -> BeamformerSet {
    BeamformerSet {
        matrix: h_a.adjoint(),
        kind: BeamformerKind::Cb,
        source_fingerprint: fingerprint(h_a),
        pinv_row_norms: None,
    }
}

pub fn zf_beamformers(h_a: &ComplexMatrix) -> Result<BeamformerSet> {
    let mut pinv = pseudo_inverse_left(h_a)?;
    let scale = (h_a.rows() as f64).sqrt();
    let n = pinv.rows();
    let mut norms = vec![0.0; n];
    for (i, slot) in norms.iter_mut().enumerate() {
        *slot = (0..pinv.cols())
            .map(|m| pinv[(i, m)].norm_sqr())
            .sum::<f64>()
            .sqrt();
    }
    for m in 0..pinv.cols() {
        for (i, z) in pinv.column_mut(m).iter_mut().enumerate() {
            *z *= scale / norms[i];
        }
    }
    Ok(BeamformerSet {
        matrix: pinv,
        kind: BeamformerKind::Zf,
        source_fingerprint: fingerprint(h_a),
        pinv_row_norms: Some(norms),
    })
}

/// `I - H (H^H H)^{-1} H^H`, kept in factored form.
#[derive(Debug, Clone)]
pub struct OrthogonalComplementProjector {
    basis: ComplexMatrix,
    factor: Option<HermitianCholesky>,
}

impl OrthogonalComplementProjector {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// `P x = x - H G^{-1} H^H x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = x.to_vec();
        if let Some(f) = &self.factor {
            let mut c = self.basis.adjoint_mul_vec(x);
            f.solve_in_place(&mut c);
            for (k, ck) in c.iter().enumerate() {
                for (o, h) in out.iter_mut().zip(self.basis.column(k)) {
                    *o -= h * ck;
                }
            }
        }
        out
    }

    pub fn apply_columns(&self, h: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(h.rows(), h.cols());
        for k in 0..h.cols() {
            let p = self.apply(h.column(k));
            out.column_mut(k).copy_from_slice(&p);
        }
        out
    }

    /// The dense `M × M` projector, Hermitian by construction.
    pub fn matrix(&self) -> ComplexMatrix {
        let m = self.dim();
        let mut e = vec![Complex64::new(0.0, 0.0); m];
        let mut matrix = ComplexMatrix::zeros(m, m);
        for j in 0..m {
            e[j] = Complex64::new(1.0, 0.0);
            matrix.column_mut(j).copy_from_slice(&self.apply(&e));
            e[j] = Complex64::new(0.0, 0.0);
        }
        for j in 0..m {
            for i in 0..j {
                let v = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
                matrix[(i, j)] = v;
                matrix[(j, i)] = v.conj();
            }
            matrix[(j, j)].im = 0.0;
        }
        matrix
    }
}

pub fn orthogonal_complement(h_a: &ComplexMatrix) -> Result<OrthogonalComplementProjector> {
    let factor = if h_a.cols() == 0 {
        None
    } else {
        Some(HermitianCholesky::factor(&h_a.gram())?)
    };
    Ok(OrthogonalComplementProjector {
        basis: h_a.clone(),
        factor,
    })
}

/// FNV-1a over the raw bits of the channel entries.
fn fingerprint(h: &ComplexMatrix) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(h.rows() as u64);
    eat(h.cols() as u64);
    for z in h.as_slice() {
        eat(z.re.to_bits());
        eat(z.im.to_bits());
    }
    hash
}

/// `|x^H y|^2`, the CB cross-correlation power.
#[inline]
pub fn correlation_power(x: &[Complex64], y: &[Complex64]) -> f64 {
    inner(x, y).norm_sqr()
}
