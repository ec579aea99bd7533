//! Bivariate Laurent polynomials in `(M, L)`: Newton polygons, boundary slopes from
//! their sides, edge polynomials and exact divisibility by `M^p L^q - omega`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{cyclotomic, IntLaurentPoly};
use crate::slopes::Slope;

#[derive(Debug, Error, PartialEq)]
pub enum ApolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polygon is a single point")]
    DegeneratePoint,
    #[error("side {0:?} -> {1:?} is not a side of the Newton polygon")]
    SideNotOnPolygon((i64, i64), (i64, i64)),
    #[error("({0}, {1}) are not coprime")]
    NotCoprime(i64, i64),
    #[error("invalid root of unity: order {0}")]
    BadOrder(i64),
    #[error("invalid A-polynomial JSON: {0}")]
    Json(String),
}

/// `sum b_{ml} M^m L^l` with exact integer coefficients and no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivLaurentPoly {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl BivLaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64), BigInt)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in it {
            p.add_term(k, c);
        }
        p
    }

    pub fn from_i64(terms: &[(i64, i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(m, l, c)| ((m, l), BigInt::from(c))))
    }

    /// `M^p L^q - omega_int`, for an integer constant.
    pub fn binomial(p: i64, q: i64, c: i64) -> Self {
        Self::from_i64(&[(p, q, 1), (0, 0, -c)])
    }

    pub fn add_term(&mut self, k: (i64, i64), c: BigInt) {
        let e = self.terms.entry(k).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), BigInt> {
        &self.terms
    }

    pub fn coeff(&self, m: i64, l: i64) -> BigInt {
        self.terms.get(&(m, l)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn support(&self) -> Vec<(i64, i64)> {
        self.terms.keys().copied().collect()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &o.terms {
                out.add_term((a + x, b + y), c * d);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.add_term(k, c.clone());
        }
        out
    }

    /// Divides out the gcd of the coefficients (sign chosen to make the largest monomial positive).
    pub fn content_stripped(&self) -> Self {
        let g = self.terms.values().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return self.clone();
        }
        let sign = if self.terms.values().next_back().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
        Self::from_terms(self.terms.iter().map(|(&k, c)| (k, c / &g * &sign)))
    }

    /// Parses a JSON array of `[m_exp, l_exp, coeff]` triples; `coeff` may be a string.
    pub fn from_json(text: &str) -> Result<Self, ApolyError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| ApolyError::Json(e.to_string()))?;
        let arr = v.as_array().ok_or_else(|| ApolyError::Json("expected an array".into()))?;
        let mut p = Self::zero();
        for t in arr {
            let t = t.as_array().filter(|t| t.len() == 3).ok_or_else(|| ApolyError::Json("expected [m, l, c]".into()))?;
            let m = t[0].as_i64().ok_or_else(|| ApolyError::Json("bad M exponent".into()))?;
            let l = t[1].as_i64().ok_or_else(|| ApolyError::Json("bad L exponent".into()))?;
            let c: BigInt = match &t[2] {
                serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
                serde_json::Value::String(s) => s.parse().ok(),
                _ => None,
            }
            .ok_or_else(|| ApolyError::Json("bad coefficient".into()))?;
            p.add_term((m, l), c);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(&(m, l), c)| serde_json::json!([m, l, c.to_string().parse::<i64>().map(serde_json::Value::from).unwrap_or_else(|_| c.to_string().into())]))
                .collect(),
        )
    }
}

impl fmt::Display for BivLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(m, l), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if neg {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let a = c.abs();
            let mono = (m, l) != (0, 0);
            if !mono || !a.is_one() {
                write!(f, "{a}")?;
            }
            for (v, e) in [('M', m), ('L', l)] {
                match e {
                    0 => {}
                    1 => write!(f, "{v}")?,
                    _ => write!(f, "{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Convex hull of a support set, vertices counterclockwise from the lexicographically
/// smallest one. May be a single point or a segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, i64)>,
}

/// A side from `start` to `end` (counterclockwise) with primitive direction `dir`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub start: (i64, i64),
    pub end: (i64, i64),
    pub dir: (i64, i64),
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

pub fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut p: Vec<(i64, i64)> = points.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &x in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], x) <= 0 {
            lower.pop();
        }
        lower.push(x);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &x in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], x) <= 0 {
            upper.pop();
        }
        upper.push(x);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl NewtonPolygon {
    pub fn from_points(points: &[(i64, i64)]) -> Self {
        NewtonPolygon { vertices: convex_hull(points) }
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    pub fn sides(&self) -> Vec<Side> {
        let v = &self.vertices;
        let mk = |a: (i64, i64), b: (i64, i64)| {
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let g = dx.gcd(&dy);
            Side { start: a, end: b, dir: (dx / g, dy / g) }
        };
        match v.len() {
            0 | 1 => vec![],
            2 => vec![mk(v[0], v[1])],
            n => (0..n).map(|i| mk(v[i], v[(i + 1) % n])).collect(),
        }
    }

    /// True if `p` lies on the closed segment of `side`.
    pub fn on_side(side: &Side, p: (i64, i64)) -> bool {
        if cross(side.start, side.end, p) != 0 {
            return false;
        }
        let within = |a: i64, b: i64, x: i64| a.min(b) <= x && x <= a.max(b);
        within(side.start.0, side.end.0, p.0) && within(side.start.1, side.end.1, p.1)
    }

    fn has_side(&self, side: &Side) -> bool {
        self.sides().iter().any(|s| {
            (s.start == side.start && s.end == side.end) || (s.start == side.end && s.end == side.start)
        })
    }
}

pub fn newton_polygon(f: &BivLaurentPoly) -> Result<NewtonPolygon, ApolyError> {
    if f.is_zero() {
        return Err(ApolyError::ZeroPolynomial);
    }
    Ok(NewtonPolygon::from_points(&f.support()))
}

pub fn minkowski_sum(p: &NewtonPolygon, q: &NewtonPolygon) -> NewtonPolygon {
    let mut pts = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            pts.push((a.0 + b.0, a.1 + b.1));
        }
    }
    NewtonPolygon::from_points(&pts)
}

/// `M^p L^q - k` is irreducible exactly when the segment to `(p, q)` has no interior lattice points.
pub fn binomial_irreducibility(p: i64, q: i64) -> bool {
    p.gcd(&q) == 1
}

/// Boundary slopes read off the sides: a side with direction `(dm, dl)` gives `dm/dl`
/// (horizontal sides give infinity, vertical sides 0). Sorted and deduplicated.
pub fn boundary_slopes_from_sides(p: &NewtonPolygon) -> Result<Vec<Slope>, ApolyError> {
    if p.vertices.len() < 2 {
        return Err(ApolyError::DegeneratePoint);
    }
    let mut out: Vec<Slope> = p.sides().iter().map(|s| Slope::new(s.dir.0, s.dir.1).expect("nonzero direction")).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// `Theta_E(z) = sum_{(m,l) in E} b_{ml} z^m`; on a vertical side the `L` exponent is used.
pub fn edge_polynomial(f: &BivLaurentPoly, side: &Side) -> Result<IntLaurentPoly, ApolyError> {
    let poly = newton_polygon(f)?;
    if !poly.has_side(side) {
        return Err(ApolyError::SideNotOnPolygon(side.start, side.end));
    }
    let vertical = side.dir.0 == 0;
    let mut out = IntLaurentPoly::zero();
    for (&(m, l), c) in f.terms() {
        if NewtonPolygon::on_side(side, (m, l)) {
            let e = if vertical { l } else { m };
            out = &out + &IntLaurentPoly::monomial(c.clone(), e);
        }
    }
    Ok(out)
}

/// `exp(2 pi i power / order)`, stored with `gcd(power, order) = 1` and `0 <= power < order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order: i64,
    pub power: i64,
}

impl RootOfUnity {
    pub fn new(order: i64, power: i64) -> Result<Self, ApolyError> {
        if order < 1 {
            return Err(ApolyError::BadOrder(order));
        }
        let k = power.rem_euclid(order);
        let g = k.gcd(&order).max(1);
        let (order, power) = if k == 0 { (1, 0) } else { (order / g, k / g) };
        Ok(RootOfUnity { order, power })
    }

    pub fn one() -> Self {
        RootOfUnity { order: 1, power: 0 }
    }

    pub fn minus_one() -> Self {
        RootOfUnity { order: 2, power: 1 }
    }

    pub fn inverse(&self) -> Self {
        RootOfUnity::new(self.order, -self.power).unwrap()
    }

    pub fn pow(&self, e: i64) -> Self {
        RootOfUnity::new(self.order, self.power * e).unwrap()
    }
}

/// Elements of `Z[x]/Phi_n(x)` as coefficient vectors of length `phi(n)`.
struct CyclotomicRing {
    n: i64,
    modulus: Vec<BigInt>,
}

impl CyclotomicRing {
    fn new(n: i64) -> Self {
        let c = cyclotomic(n as u64);
        CyclotomicRing { n, modulus: c.coeffs().to_vec() }
    }

    /// Reduces `sum c_e x^e` (exponents taken mod `n`) modulo `Phi_n`.
    fn reduce(&self, terms: &[(i64, BigInt)]) -> Vec<BigInt> {
        let n = self.n as usize;
        let mut v = vec![BigInt::zero(); n.max(1)];
        for (e, c) in terms {
            v[e.rem_euclid(self.n) as usize] += c;
        }
        let d = self.modulus.len() - 1;
        for i in (d..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let c = v[i].clone();
            for (j, m) in self.modulus.iter().enumerate() {
                v[i - d + j] -= &c * m;
            }
        }
        v.truncate(d);
        v
    }
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Exact test of whether `M^p L^q - omega` divides `a` over `Q(omega)[M^{+-1}, L^{+-1}]`.
/// Tables differ in the integer content they keep, so the test runs on the primitive part.
pub fn divides_binomial(a: &BivLaurentPoly, p: i64, q: i64, omega: RootOfUnity) -> Result<bool, ApolyError> {
    if p.gcd(&q) != 1 {
        return Err(ApolyError::NotCoprime(p, q));
    }
    let a = &a.content_stripped();
    // unimodular change of exponents sending (p, q) to (1, 0)
    let eg = p.extended_gcd(&q);
    let (d, c) = (eg.x * eg.gcd, -eg.y * eg.gcd);
    debug_assert_eq!(p * d - q * c, 1);
    let ring = CyclotomicRing::new(omega.order);
    let mut groups: BTreeMap<i64, Vec<(i64, BigInt)>> = BTreeMap::new();
    for (&(m, l), coef) in a.terms() {
        let s = m * d - l * c;
        let j = l * p - m * q;
        groups.entry(j).or_default().push((s * omega.power, coef.clone()));
    }
    Ok(groups.values().all(|terms| is_zero_vec(&ring.reduce(terms))))
}

/// Exact test of whether `z^p - omega` divides a univariate Laurent polynomial.
pub fn edge_divisible_by(theta: &IntLaurentPoly, p: i64, omega: RootOfUnity) -> bool {
    if p == 0 {
        return false;
    }
    let w = if p < 0 { omega.inverse() } else { omega };
    let ap = p.abs();
    let ring = CyclotomicRing::new(w.order);
    let mut groups: BTreeMap<i64, Vec<(i64, BigInt)>> = BTreeMap::new();
    for (j, c) in theta.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = theta.low() + j as i64;
        let r = e.rem_euclid(ap);
        let t = (e - r) / ap;
        groups.entry(r).or_default().push((t * w.power, c.clone()));
    }
    groups.values().all(|terms| is_zero_vec(&ring.reduce(terms)))
}

/// `Phi_n(M^p L^q)`, an integer polynomial divisible by `M^p L^q - omega` for every
/// primitive `n`-th root of unity `omega`.
pub fn cyclotomic_of_binomial(n: i64, p: i64, q: i64) -> BivLaurentPoly {
    let c = cyclotomic(n as u64);
    BivLaurentPoly::from_terms(c.coeffs().iter().enumerate().map(|(k, b)| ((k as i64 * p, k as i64 * q), b.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_a_polynomial() {
        let a = BivLaurentPoly::from_i64(&[(6, 1, 1), (0, 0, 1)]);
        let np = newton_polygon(&a).unwrap();
        assert_eq!(np.vertices, vec![(0, 0), (6, 1)]);
        assert_eq!(boundary_slopes_from_sides(&np).unwrap(), vec![Slope::integer(6)]);
        let e = edge_polynomial(&a, &np.sides()[0]).unwrap();
        assert_eq!(e.format_var('z'), "z^6+1");
        assert!(divides_binomial(&a, 6, 1, RootOfUnity::minus_one()).unwrap());
        assert!(!divides_binomial(&a, 6, 1, RootOfUnity::one()).unwrap());
    }

    #[test]
    fn root_of_unity_reduction() {
        assert_eq!(RootOfUnity::new(12, 8).unwrap(), RootOfUnity { order: 3, power: 2 });
        assert_eq!(RootOfUnity::new(5, 10).unwrap(), RootOfUnity::one());
    }
}
