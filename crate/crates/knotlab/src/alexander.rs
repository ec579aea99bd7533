//! Alexander polynomials: computation from braids, unit-circle analysis and the
//! obstructions built from them.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::braid::{Braid, BraidError};
use crate::laurent::{cyclotomic_factor_split, IntLaurentPoly, PolyError};

type Matrix = Vec<Vec<IntLaurentPoly>>;

fn burau_generator(n: usize, letter: i32) -> Matrix {
    let d = n - 1;
    let t = IntLaurentPoly::t();
    let ti = IntLaurentPoly::monomial(1, -1);
    let one = IntLaurentPoly::one();
    let zero = IntLaurentPoly::zero();
    let mut m: Matrix = (0..d).map(|i| (0..d).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
    let i = letter.unsigned_abs() as usize;
    let inv = letter < 0;
    if d == 1 {
        m[0][0] = if inv { -ti } else { -t };
        return m;
    }
    // row i - 1 (0-based) carries the nontrivial entries
    let r = i - 1;
    if inv {
        if r > 0 {
            m[r][r - 1] = one.clone();
        }
        m[r][r] = -ti.clone();
        if r + 1 < d {
            m[r][r + 1] = ti.clone();
        }
    } else {
        if r > 0 {
            m[r][r - 1] = t.clone();
        }
        m[r][r] = -t.clone();
        if r + 1 < d {
            m[r][r + 1] = one;
        }
    }
    m
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![IntLaurentPoly::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

/// Fraction-free (Bareiss) determinant over `Z[t, 1/t]`.
pub fn bareiss_det(mut m: Matrix) -> IntLaurentPoly {
    let n = m.len();
    if n == 0 {
        return IntLaurentPoly::one();
    }
    let mut sign = false;
    let mut prev = IntLaurentPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return IntLaurentPoly::zero();
            };
            m.swap(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = IntLaurentPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign { -d } else { d }
}

/// Alexander polynomial of a braid closure from the reduced Burau representation:
/// `det(I - B) / (1 + t + ... + t^(n-1))`, normalized.
pub fn alexander_from_braid(braid: &Braid) -> Result<IntLaurentPoly, BraidError> {
    braid.check_knot()?;
    let n = braid.strands;
    if n <= 1 {
        return Ok(IntLaurentPoly::one());
    }
    let mut b: Matrix = burau_generator(n, 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            b[i][j] = if i == j { IntLaurentPoly::one() } else { IntLaurentPoly::zero() };
        }
    }
    for &l in &braid.word {
        b = mat_mul(&b, &burau_generator(n, l));
    }
    let d = n - 1;
    let a: Matrix = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let id = if i == j { IntLaurentPoly::one() } else { IntLaurentPoly::zero() };
                    &id - &b[i][j]
                })
                .collect()
        })
        .collect();
    let det = bareiss_det(a);
    let geom = IntLaurentPoly::new(0, vec![BigInt::one(); n]);
    let q = det.div_exact(&geom).expect("Burau determinant is divisible by 1 + t + ... + t^(n-1)");
    Ok(q.normalize().expect("Alexander polynomial of a knot normalizes"))
}

/// `Delta(e^{i theta})` for a symmetric polynomial, computed as `a_0 + sum 2 a_j cos(j theta)`.
pub fn eval_unit_circle(poly: &IntLaurentPoly, theta: f64) -> Result<f64, PolyError> {
    if !poly.is_symmetric() {
        return Err(PolyError::NotSymmetric);
    }
    Ok(eval_symmetric(poly, theta))
}

fn eval_symmetric(poly: &IntLaurentPoly, theta: f64) -> f64 {
    let mut v = poly.coeff(0).to_f64().unwrap_or(f64::NAN);
    for j in 1..=poly.high().max(0) {
        let a = poly.coeff(j).to_f64().unwrap_or(f64::NAN);
        if a != 0.0 {
            v += 2.0 * a * (j as f64 * theta).cos();
        }
    }
    v
}

/// A cyclotomic factor `Phi_n` of multiplicity `multiplicity`; its roots lie at
/// `theta = 2 pi k / n` with `gcd(k, n) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclotomicRoot {
    pub index: u64,
    pub multiplicity: usize,
    pub odd: bool,
}

/// Unit-circle roots of a symmetric polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleRootReport {
    pub cyclotomic: Vec<CyclotomicRoot>,
    /// Intervals in `(0, pi]` of width below `1e-9` bracketing sign changes of the
    /// cyclotomic-free remainder, that is, odd-order roots which are not roots of unity.
    pub sign_changes: Vec<(f64, f64)>,
    pub remainder: IntLaurentPoly,
}

pub fn circle_root_report(poly: &IntLaurentPoly) -> Result<CircleRootReport, PolyError> {
    if poly.is_zero() {
        return Err(PolyError::Zero);
    }
    if !poly.is_symmetric() {
        return Err(PolyError::NotSymmetric);
    }
    let (idx, rem) = cyclotomic_factor_split(poly);
    let mut cyclotomic: Vec<CyclotomicRoot> = Vec::new();
    for n in idx {
        match cyclotomic.last_mut() {
            Some(c) if c.index == n => c.multiplicity += 1,
            _ => cyclotomic.push(CyclotomicRoot { index: n, multiplicity: 1, odd: true }),
        }
    }
    for c in &mut cyclotomic {
        c.odd = c.multiplicity % 2 == 1;
    }
    // the remainder stays symmetric up to sign: Phi_1 = t - 1 is antisymmetric
    let rem_sym = if rem.is_symmetric() { rem.clone() } else { IntLaurentPoly::zero() };
    let mut sign_changes = Vec::new();
    if !rem_sym.is_zero() && rem_sym.span() > 0 {
        const SAMPLES: usize = 10_000;
        let f = |x: f64| eval_symmetric(&rem_sym, x);
        let mut a = 0.0;
        let mut fa = f(a);
        for i in 1..=SAMPLES {
            let b = PI * i as f64 / SAMPLES as f64;
            let fb = f(b);
            if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                while hi - lo >= 1e-9 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid);
                    if fm == 0.0 {
                        lo = mid - 2.5e-10;
                        hi = mid + 2.5e-10;
                        break;
                    }
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                sign_changes.push((lo, hi));
            }
            if fb != 0.0 {
                a = b;
                fa = fb;
            }
        }
    }
    Ok(CircleRootReport { cyclotomic, sign_changes, remainder: rem })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OddRootObstruction {
    pub obstructed: bool,
    /// Interval bracketing an odd-order unit-circle root that is not a root of unity.
    pub witness: Option<(f64, f64)>,
    pub report: CircleRootReport,
}

/// Detects a root of odd order on the unit circle which is not a root of unity,
/// which rules out SU(2)-averseness.
pub fn odd_circle_root_obstruction(poly: &IntLaurentPoly) -> Result<OddRootObstruction, PolyError> {
    let report = circle_root_report(poly)?;
    let witness = report.sign_changes.first().copied();
    Ok(OddRootObstruction { obstructed: witness.is_some(), witness, report })
}

/// `|Delta(-1)|`.
pub fn determinant(poly: &IntLaurentPoly) -> BigInt {
    poly.eval_int(-1).expect("evaluation at -1 is defined").abs()
}

pub fn coeff_abs_sum(poly: &IntLaurentPoly) -> BigInt {
    poly.coeffs().iter().map(|c| c.abs()).sum()
}

/// The square-determinant consequence of `Delta = f(t) f(1/t)` for slice knots.
pub fn fox_milnor_necessary(poly: &IntLaurentPoly) -> bool {
    let d = determinant(poly);
    let s = d.sqrt();
    &s * &s == d
}

/// For a small averse knot, every odd-order root of `Delta` at a primitive `q`-th root
/// of unity forces `q | r`. Returns whether `r` passes for all such roots.
pub fn small_knot_multiple_rule(poly: &IntLaurentPoly, r: Ratio<i64>) -> Result<bool, PolyError> {
    if !r.is_integer() {
        return Err(PolyError::NotInteger(r.to_string()));
    }
    let r = r.to_integer();
    let report = circle_root_report(poly)?;
    Ok(report.cyclotomic.iter().filter(|c| c.odd).all(|c| r % c.index as i64 == 0))
}

pub fn is_trivial(poly: &IntLaurentPoly) -> bool {
    poly.span() == 0 && poly.coeff(0).is_one()
}
