use crate::error::{Error, Result};

/// Real `±1` orthogonal code matrix `S` with `S^T S = n I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalCode {
    n: usize,
    // row-major, entries ±1
    entries: Vec<i8>,
}

impl OrthogonalCode {
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.n + col]
    }

    /// Column `i` as floats (the code word `s_i`).
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|r| self.entry(r, i) as f64).collect()
    }

    /// `S^T S` in integer arithmetic.
    pub fn gram(&self) -> Vec<i64> {
        let n = self.n;
        let mut g = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = (0..n)
                    .map(|r| self.entry(r, i) as i64 * self.entry(r, j) as i64)
                    .sum();
            }
        }
        g
    }
}

/// Sylvester-construction Hadamard matrix of order `n` (a power of two).
pub fn hadamard(n: usize) -> Result<OrthogonalCode> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NonPowerOfTwo(n));
    }
    let mut entries = vec![1i8];
    let mut size = 1;
    while size < n {
        let next = size * 2;
        let mut grown = vec![0i8; next * next];
        for r in 0..size {
            for c in 0..size {
                let v = entries[r * size + c];
                grown[r * next + c] = v;
                grown[r * next + c + size] = v;
                grown[(r + size) * next + c] = v;
                grown[(r + size) * next + c + size] = -v;
            }
        }
        entries = grown;
        size = next;
    }
    Ok(OrthogonalCode { n, entries })
}
