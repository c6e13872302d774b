use crate::error::{Error, Result};

/// Largest Laguerre degree accepted; matches the largest usable Fock cutoff.
pub const MAX_LAGUERRE_DEGREE: usize = 400;

/// Associated Laguerre polynomial L_m^(k)(x) by the three-term recurrence in the degree.
///
/// The recurrence is stable for the nonpositive arguments used throughout this
/// crate, where every term has the same sign. Negative superscripts down to
/// k = -m are handled through the reflection
/// L_m^(-j)(x) = (-x)^j ((m-j)!/m!) L_{m-j}^(j)(x).
pub fn laguerre(m: usize, k: i64, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { context: "laguerre argument" });
    }
    if m > MAX_LAGUERRE_DEGREE {
        return Err(Error::DomainError(format!(
            "laguerre degree {m} exceeds supported maximum {MAX_LAGUERRE_DEGREE}"
        )));
    }
    if k < -(m as i64) {
        return Err(Error::DomainError(format!(
            "laguerre superscript {k} below -m = {}",
            -(m as i64)
        )));
    }
    if k < 0 {
        let j = (-k) as usize;
        let mut ratio = 1.0;
        for i in (m - j + 1)..=m {
            ratio /= i as f64;
        }
        return Ok((-x).powi(j as i32) * ratio * laguerre(m - j, j as i64, x)?);
    }
    let kf = k as f64;
    if m == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + kf - x;
    for j in 1..m {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_one() {
        for x in [-30.0, -1.0, 0.0, 4.5] {
            assert_eq!(laguerre(0, 0, x).unwrap(), 1.0);
        }
    }

    #[test]
    fn degree_one_closed_form() {
        assert_eq!(laguerre(1, 0, -1.0).unwrap(), 2.0);
        assert_eq!(laguerre(1, 0, -10.0).unwrap(), 11.0);
        assert_eq!(laguerre(1, 3, 0.5).unwrap(), 3.5);
    }

    #[test]
    fn degree_two_closed_form() {
        // L_2(x) = (x^2 - 4x + 2)/2
        assert!((laguerre(2, 0, -2.0).unwrap() - 7.0).abs() < 1e-14);
    }

    #[test]
    fn negative_superscript_reflection() {
        // L_2^(-1)(x) = -x (1/2) L_1^(1)(x) = -x (2 - x)/2
        let x = -3.0;
        let expect = -x * (2.0 - x) / 2.0;
        assert!((laguerre(2, -1, x).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn superscript_below_negative_m_rejected() {
        assert!(matches!(laguerre(2, -3, 1.0), Err(Error::DomainError(_))));
    }
}
