//! Rational reconstruction of floating point values.

use num_rational::Ratio;

/// Smallest-denominator convergent `p/q` of `x` with `q <= max_den` and `|x - p/q| < tol`.
pub fn reconstruct(x: f64, max_den: i64, tol: f64) -> Option<Ratio<i64>> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() < tol {
            return Some(Ratio::new(h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = y - a as f64;
        if f.abs() < 1e-300 {
            return None;
        }
        y = 1.0 / f;
    }
    None
}

pub fn to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_values() {
        assert_eq!(reconstruct(6.0000000001, 64, 1e-6), Some(Ratio::from_integer(6)));
        assert_eq!(reconstruct(-32.0 / 3.0, 64, 1e-9), Some(Ratio::new(-32, 3)));
        assert_eq!(reconstruct(std::f64::consts::PI, 64, 1e-6), None);
        assert_eq!(reconstruct(0.0, 64, 1e-6), Some(Ratio::from_integer(0)));
    }
}
