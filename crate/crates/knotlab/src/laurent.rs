//! Exact integer Laurent polynomials in one variable and cyclotomic polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("cannot parse polynomial {text:?} at byte {pos}")]
    Parse { text: String, pos: usize },
    #[error("polynomial is not symmetric under t -> 1/t")]
    NotSymmetric,
    #[error("polynomial cannot be normalized to a symmetric one with value 1 at t = 1")]
    NotNormalizable,
    #[error("limit slope {0} is not an integer")]
    NotInteger(String),
    #[error("zero polynomial")]
    Zero,
    #[error("invalid coefficient JSON: {0}")]
    Json(String),
}

/// `sum_j coeffs[j] t^(low + j)`, kept trimmed: no zero at either end, and the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntLaurentPoly {
    low: i64,
    coeffs: Vec<BigInt>,
}

impl IntLaurentPoly {
    pub fn new(low: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = IntLaurentPoly { low, coeffs };
        p.trim();
        p
    }

    pub fn from_i64(low: i64, coeffs: &[i64]) -> Self {
        Self::new(low, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(0, vec![c])
    }

    /// `c t^k`.
    pub fn monomial(c: impl Into<BigInt>, k: i64) -> Self {
        Self::new(k, vec![c.into()])
    }

    /// `t`.
    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// `high - low`, the breadth; 0 for constants and for the zero polynomial.
    pub fn span(&self) -> i64 {
        if self.is_zero() { 0 } else { self.high() - self.low }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> BigInt {
        let j = k - self.low;
        if j < 0 || j >= self.coeffs.len() as i64 {
            BigInt::zero()
        } else {
            self.coeffs[j as usize].clone()
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        IntLaurentPoly { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `p(1/t)`.
    pub fn reflect(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self::new(-self.high(), self.coeffs.iter().rev().cloned().collect())
    }

    pub fn is_symmetric(&self) -> bool {
        self.reflect() == *self
    }

    pub fn eval_int(&self, x: i64) -> Option<BigInt> {
        if x == 0 && self.low < 0 {
            return None;
        }
        if (x == 1) || (x == -1) {
            let mut acc = BigInt::zero();
            for (j, c) in self.coeffs.iter().enumerate() {
                let e = self.low + j as i64;
                if x == -1 && e.rem_euclid(2) == 1 {
                    acc -= c;
                } else {
                    acc += c;
                }
            }
            return Some(acc);
        }
        let xb = BigInt::from(x);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &xb + c;
        }
        if self.low >= 0 {
            Some(acc * xb.pow(self.low as u32))
        } else {
            let d = xb.pow((-self.low) as u32);
            let (q, r) = acc.div_rem(&d);
            r.is_zero().then_some(q)
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
        }
        acc * z.powi(self.low as i32)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self` in `Z[t, 1/t]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dl = d.coeffs.last().unwrap();
        let mut rem: Vec<BigInt> = self.coeffs.clone();
        let dn = d.coeffs.len();
        if rem.len() < dn {
            return None;
        }
        let qn = rem.len() - dn + 1;
        let mut q = vec![BigInt::zero(); qn];
        for i in (0..qn).rev() {
            let top = &rem[i + dn - 1];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            q[i] = c;
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(Self::new(self.low - d.low, q))
    }

    /// The Laurent polynomial shifted so that its lowest exponent is 0.
    pub fn to_polynomial(&self) -> Self {
        self.shift(-self.low)
    }

    /// Multiplies by a unit `+-t^k` so that the result is symmetric with value 1 at `t = 1`.
    pub fn normalize(&self) -> Result<Self, PolyError> {
        if self.is_zero() || self.span() % 2 != 0 {
            return Err(PolyError::NotNormalizable);
        }
        let mut p = self.shift(-self.low - self.span() / 2);
        let v = p.eval_int(1).unwrap();
        if v.is_negative() {
            p = -p;
        }
        if p.eval_int(1).unwrap() != BigInt::one() || !p.is_symmetric() {
            return Err(PolyError::NotNormalizable);
        }
        Ok(p)
    }

    /// Parses text such as `3t^2-6t+7-6t^-1+3t^-2`, `t^{-1}`, `-2*t^3 + 1`. Any single
    /// ASCII letter serves as the variable; coefficients may be arbitrarily large.
    pub fn parse(text: &str) -> Result<Self, PolyError> {
        let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |pos: usize| PolyError::Parse { text: text.to_string(), pos };
        if s.is_empty() {
            return Err(err(0));
        }
        let mut terms: Vec<(i64, BigInt)> = Vec::new();
        let mut i = 0;
        while i < s.len() {
            let mut sign = BigInt::one();
            if s[i] == '+' || s[i] == '-' {
                if s[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            } else if !terms.is_empty() {
                return Err(err(i));
            }
            let start = i;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
            let coeff: Option<BigInt> = (i > start).then(|| s[start..i].iter().collect::<String>().parse().unwrap());
            if i < s.len() && s[i] == '*' {
                i += 1;
            }
            let mut exp = 0i64;
            if i < s.len() && s[i].is_ascii_alphabetic() {
                i += 1;
                exp = 1;
                if i < s.len() && s[i] == '^' {
                    i += 1;
                    let braced = i < s.len() && (s[i] == '{' || s[i] == '(');
                    if braced {
                        i += 1;
                    }
                    let es = i;
                    if i < s.len() && (s[i] == '-' || s[i] == '+') {
                        i += 1;
                    }
                    while i < s.len() && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    exp = s[es..i].iter().collect::<String>().parse().map_err(|_| err(es))?;
                    if braced {
                        if i < s.len() && (s[i] == '}' || s[i] == ')') {
                            i += 1;
                        } else {
                            return Err(err(i));
                        }
                    }
                }
            } else if coeff.is_none() {
                return Err(err(i));
            }
            terms.push((exp, sign * coeff.unwrap_or_else(BigInt::one)));
        }
        let low = terms.iter().map(|t| t.0).min().unwrap();
        let high = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (high - low + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - low) as usize] += c;
        }
        Ok(Self::new(low, coeffs))
    }

    /// Formats with variable `var`, highest power first.
    pub fn format_var(&self, var: char) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let e = self.low + j as i64;
            let neg = c.is_negative();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let a = c.abs();
            if e == 0 || !a.is_one() {
                out.push_str(&a.to_string());
            }
            match e {
                0 => {}
                1 => out.push(var),
                _ => out.push_str(&format!("{var}^{e}")),
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(c.to_string()),
            })
            .collect();
        serde_json::json!({ "min_degree": self.low, "coefficients": coeffs })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, PolyError> {
        let bad = |m: &str| PolyError::Json(m.to_string());
        let low = v.get("min_degree").and_then(|x| x.as_i64()).ok_or_else(|| bad("missing min_degree"))?;
        let arr = v.get("coefficients").and_then(|x| x.as_array()).ok_or_else(|| bad("missing coefficients"))?;
        let coeffs = arr
            .iter()
            .map(|c| match c {
                serde_json::Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad("non-integer coefficient")),
                serde_json::Value::String(s) => s.parse::<BigInt>().map_err(|_| bad("bad coefficient string")),
                _ => Err(bad("coefficient must be a number or string")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(low, coeffs))
    }
}

impl fmt::Display for IntLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_var('t'))
    }
}

impl FromStr for IntLaurentPoly {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        Self::parse(s)
    }
}

impl Serialize for IntLaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntLaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) => Self::parse(s).map_err(serde::de::Error::custom),
            _ => Self::from_json(&v).map_err(serde::de::Error::custom),
        }
    }
}

impl Add for &IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn add(self, o: &IntLaurentPoly) -> IntLaurentPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let coeffs = (low..=high).map(|k| self.coeff(k) + o.coeff(k)).collect();
        IntLaurentPoly::new(low, coeffs)
    }
}

impl Sub for &IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn sub(self, o: &IntLaurentPoly) -> IntLaurentPoly {
        self + &(-o.clone())
    }
}

impl Neg for IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn neg(self) -> IntLaurentPoly {
        IntLaurentPoly { low: self.low, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Mul for &IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn mul(self, o: &IntLaurentPoly) -> IntLaurentPoly {
        if self.is_zero() || o.is_zero() {
            return IntLaurentPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntLaurentPoly::new(self.low + o.low, c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntLaurentPoly {
            type Output = IntLaurentPoly;
            fn $m(self, o: IntLaurentPoly) -> IntLaurentPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut r = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

fn mobius(n: u64) -> i32 {
    let mut m = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if m > 1 {
        k += 1;
    }
    if k % 2 == 0 { 1 } else { -1 }
}

/// The cyclotomic polynomial `Phi_n(t)` as an ordinary polynomial.
pub fn cyclotomic(n: u64) -> IntLaurentPoly {
    assert!(n >= 1);
    let mut num = IntLaurentPoly::one();
    let mut den = IntLaurentPoly::one();
    for d in (1..=n).filter(|d| n % d == 0) {
        let f = &IntLaurentPoly::monomial(1, d as i64) - &IntLaurentPoly::one();
        match mobius(n / d) {
            1 => num = &num * &f,
            -1 => den = &den * &f,
            _ => {}
        }
    }
    num.div_exact(&den).expect("cyclotomic quotient is exact")
}

/// `Phi_n` multiplied by `t^(-floor(phi(n)/2))`, symmetric for `n >= 3`.
pub fn cyclotomic_centered(n: u64) -> IntLaurentPoly {
    let c = cyclotomic(n);
    let s = c.span() / 2;
    c.shift(-s)
}

/// All `n` with `phi(n) <= d`, ascending.
pub fn cyclotomic_indices_up_to(d: u64) -> Vec<u64> {
    let bound = 2 * d * d + 2;
    (1..=bound.max(2)).filter(|&n| euler_phi(n) <= d).collect()
}

/// Splits off every cyclotomic factor: returns the indices (with multiplicity,
/// ascending) and the cyclotomic-free remainder, so that
/// `p = remainder * prod cyclotomic_centered(n)` exactly.
pub fn cyclotomic_factor_split(p: &IntLaurentPoly) -> (Vec<u64>, IntLaurentPoly) {
    if p.is_zero() {
        return (vec![], p.clone());
    }
    let mut rem = p.clone();
    let mut found = Vec::new();
    for n in cyclotomic_indices_up_to(p.span() as u64) {
        let phi = euler_phi(n) as i64;
        let mut c: Option<IntLaurentPoly> = None;
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU / n as f64);
        loop {
            if rem.span() < phi {
                break;
            }
            let scale: f64 = rem.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs()).sum();
            if rem.eval_complex(z).norm() > 1e-6 * scale.max(1.0) {
                break;
            }
            match rem.div_exact(c.get_or_insert_with(|| cyclotomic_centered(n))) {
                Some(q) => {
                    found.push(n);
                    rem = q;
                }
                None => break,
            }
        }
    }
    (found, rem)
}

/// True iff `theta`, after removing a monomial unit, is `+-1` times a product of cyclotomic polynomials.
pub fn cyclotomic_product_test(theta: &IntLaurentPoly) -> bool {
    if theta.is_zero() {
        return false;
    }
    let (_, rem) = cyclotomic_factor_split(theta);
    rem.span() == 0 && rem.coeffs[0].abs().is_one()
}
