use crate::error::{Error, Result};

/// `n!` as a float. Exact for `n <= 22`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Upper incomplete Gamma function for integer order,
/// `Γ(s, x) = (s-1)! e^{-x} Σ_{k<s} x^k / k!`.
///
/// The exponential is folded into the log of the partial sum so that large
/// `x` underflows gracefully to zero instead of producing `0 * inf`.
pub fn upper_incomplete_gamma_int(s: u32, x: f64) -> Result<f64> {
    check_args(s, x)?;
    if x == 0.0 {
        return Ok(factorial(s - 1));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..s {
        term *= x / k as f64;
        sum += term;
    }
    Ok(factorial(s - 1) * (sum.ln() - x).exp())
}

/// Lower incomplete Gamma function for integer order,
/// `γ(s, x) = (s-1)! - Γ(s, x) = (s-1)! e^{-x} Σ_{k>=s} x^k / k!`.
///
/// Evaluated from the tail series for moderate `x`, which avoids the
/// cancellation of `(s-1)! - Γ(s, x)` near zero.
pub fn lower_incomplete_gamma_int(s: u32, x: f64) -> Result<f64> {
    check_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x > s as f64 + 1.0 {
        return Ok(factorial(s - 1) - upper_incomplete_gamma_int(s, x)?);
    }
    // x^s / s! * Σ_{j>=0} x^j s! / (s+j)!
    let mut lead = -x;
    for k in 1..=s {
        lead += (x / k as f64).ln();
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    while term > sum * 1e-17 {
        term *= x / (s as f64 + j);
        sum += term;
        j += 1.0;
    }
    Ok(factorial(s - 1) * (lead + sum.ln()).exp())
}

fn check_args(s: u32, x: f64) -> Result<()> {
    if s < 1 {
        return Err(Error::Domain(format!(
            "incomplete gamma order must be >= 1, got {s}"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "incomplete gamma argument must be >= 0, got {x}"
        )));
    }
    Ok(())
}

pub fn db_to_linear(v_db: f64) -> f64 {
    10f64.powf(v_db / 10.0)
}

pub fn linear_to_db(v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("cannot express {v} in dB")));
    }
    Ok(10.0 * v.log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_base_cases() {
        assert_eq!(upper_incomplete_gamma_int(1, 0.0).unwrap(), 1.0);
        assert!((upper_incomplete_gamma_int(1, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
        assert_eq!(upper_incomplete_gamma_int(5, 0.0).unwrap(), 24.0);
        // Γ(3,1) = 2 e^{-1} (1 + 1 + 1/2) = 5/e
        assert!(
            (upper_incomplete_gamma_int(3, 1.0).unwrap() - 5.0 / std::f64::consts::E).abs() < 1e-15
        );
    }

    #[test]
    fn gamma_domain_errors() {
        assert!(matches!(
            upper_incomplete_gamma_int(0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            upper_incomplete_gamma_int(2, -0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            lower_incomplete_gamma_int(2, f64::NAN),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gamma_large_argument_underflows_to_zero() {
        let v = upper_incomplete_gamma_int(9, 2000.0).unwrap();
        assert!(v == 0.0 || v.is_normal());
        assert!(!v.is_nan());
    }

    #[test]
    fn lower_plus_upper_is_factorial() {
        for s in 1..=12 {
            for &x in &[1e-6, 0.01, 0.3, 1.0, 4.0, 12.5, 40.0] {
                let lo = lower_incomplete_gamma_int(s, x).unwrap();
                let up = upper_incomplete_gamma_int(s, x).unwrap();
                let f = factorial(s - 1);
                assert!(((lo + up) - f).abs() <= 1e-12 * f, "s={s} x={x}");
            }
        }
    }

    #[test]
    fn lower_gamma_small_x_is_accurate() {
        // γ(3, x) ≈ x^3/3 for tiny x; the naive subtraction would return 0.
        let x = 1e-6;
        let v = lower_incomplete_gamma_int(3, x).unwrap();
        assert!((v / (x.powi(3) / 3.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-14);
        assert!((db_to_linear(4.0) - 2.511_886_431_509_58).abs() < 1e-12);
        assert!(matches!(linear_to_db(0.0), Err(Error::Domain(_))));
        assert!(matches!(linear_to_db(-1.0), Err(Error::Domain(_))));
        assert!((linear_to_db(100.0).unwrap() - 20.0).abs() < 1e-14);
    }
}
