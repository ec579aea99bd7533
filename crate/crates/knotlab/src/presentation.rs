//! Knot group presentations with peripheral words.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{Braid, BraidError};
use crate::su2::Su2;

#[derive(Debug, Error, PartialEq)]
pub enum PresentationError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("bad exponent in {0:?}")]
    BadExponent(String),
    #[error("abelianization is not infinite cyclic generated by the meridian: {0}")]
    BadAbelianization(String),
    #[error("longitude is not nullhomologous (abelianizes to {0})")]
    LongitudeNotNullhomologous(i64),
    #[error("invalid torus parameters ({0}, {1})")]
    InvalidTorusParams(i64, i64),
    #[error("invalid two-bridge parameters {0}/{1}")]
    InvalidTwoBridge(i64, i64),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error("invalid presentation JSON: {0}")]
    Json(String),
}

/// A word in the generators: letter `g + 1` is generator `g`, `-(g + 1)` its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn gen(g: usize) -> Word {
        Word(vec![g as i32 + 1])
    }

    pub fn pow_gen(g: usize, e: i64) -> Word {
        let l = if e < 0 { -(g as i32 + 1) } else { g as i32 + 1 };
        Word(vec![l; e.unsigned_abs() as usize])
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v).reduced()
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::new();
        for _ in 0..e.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v).reduced()
    }

    /// Free reduction.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut v = vec![0; generators];
        for &l in &self.0 {
            let g = l.unsigned_abs() as usize - 1;
            if g < generators {
                v[g] += l.signum() as i64;
            }
        }
        v
    }

    pub fn total_exponent(&self) -> i64 {
        self.0.iter().map(|l| l.signum() as i64).sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.unsigned_abs() as usize - 1).max()
    }

    /// Evaluates the word under an assignment of the generators.
    pub fn eval(&self, images: &[Su2]) -> Su2 {
        let mut acc = Su2::IDENTITY;
        for &l in &self.0 {
            let g = images[l.unsigned_abs() as usize - 1];
            acc = acc * if l > 0 { g } else { g.inv() };
        }
        acc
    }

    /// Parses space-separated tokens; a token is a generator name, the name with the
    /// case of its first character swapped (inverse), optionally followed by `^k`.
    pub fn parse(text: &str, names: &[String]) -> Result<Word, PresentationError> {
        let mut v = Vec::new();
        for tok in text.split_whitespace() {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<i64>().map_err(|_| PresentationError::BadExponent(tok.into()))?),
                None => (tok, 1),
            };
            let (g, sign) = if let Some(g) = names.iter().position(|n| n == base) {
                (g, 1)
            } else if let Some(g) = names.iter().position(|n| *n == swap_case(base)) {
                (g, -1)
            } else {
                return Err(PresentationError::UnknownGenerator(base.into()));
            };
            let e = exp * sign;
            v.extend(Word::pow_gen(g, e).0);
        }
        Ok(Word(v))
    }

    pub fn format(&self, names: &[String]) -> String {
        self.0
            .iter()
            .map(|&l| {
                let n = &names[l.unsigned_abs() as usize - 1];
                if l > 0 { n.clone() } else { swap_case(n) }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn swap_case(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) if f.is_lowercase() => f.to_uppercase().chain(c).collect(),
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

/// A knot group presentation together with meridian and longitude words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotPresentation {
    pub names: Vec<String>,
    pub relators: Vec<Word>,
    pub meridian: Word,
    pub longitude: Word,
    /// Every generator is conjugate to the meridian (Wirtinger-type presentations).
    pub meridional_generators: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GeneratorSpec {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Deserialize)]
struct PresentationFile {
    generators: GeneratorSpec,
    relators: Vec<String>,
    meridian: String,
    longitude: String,
    #[serde(default)]
    meridional_generators: bool,
}

fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl KnotPresentation {
    pub fn generators(&self) -> usize {
        self.names.len()
    }

    /// The trivial knot, presented as `<u | >` with meridian `u` and longitude `1`.
    pub fn unknot() -> Self {
        KnotPresentation {
            names: vec!["u".into()],
            relators: vec![],
            meridian: Word::gen(0),
            longitude: Word::default(),
            meridional_generators: true,
        }
    }

    /// Parses the JSON file format:
    /// `{"generators": ["u","v"], "relators": ["u v u V U V"], "meridian": "u", "longitude": "..."}`.
    /// `generators` may also be a count, in which case the names are `x0, x1, ...`.
    pub fn from_json(text: &str) -> Result<Self, PresentationError> {
        let f: PresentationFile = serde_json::from_str(text).map_err(|e| PresentationError::Json(e.to_string()))?;
        let names = match f.generators {
            GeneratorSpec::Count(n) => default_names(n),
            GeneratorSpec::Names(v) => v,
        };
        let relators = f.relators.iter().map(|r| Word::parse(r, &names)).collect::<Result<Vec<_>, _>>()?;
        let p = KnotPresentation {
            meridian: Word::parse(&f.meridian, &names)?,
            longitude: Word::parse(&f.longitude, &names)?,
            names,
            relators,
            meridional_generators: f.meridional_generators,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "generators": self.names,
            "relators": self.relators.iter().map(|r| r.format(&self.names)).collect::<Vec<_>>(),
            "meridian": self.meridian.format(&self.names),
            "longitude": self.longitude.format(&self.names),
            "meridional_generators": self.meridional_generators,
        })
    }

    /// Checks that the abelianization is `Z` generated by the meridian and that the
    /// longitude is nullhomologous. Returns the abelianization map on generators.
    pub fn validate(&self) -> Result<Vec<i64>, PresentationError> {
        let g = self.generators();
        for w in self.relators.iter().chain([&self.meridian, &self.longitude]) {
            if let Some(m) = w.max_generator() {
                if m >= g {
                    return Err(PresentationError::UnknownGenerator(format!("#{m}")));
                }
            }
        }
        let rel: Vec<Vec<i64>> = self.relators.iter().map(|r| r.exponent_sums(g)).collect();
        let m = self.meridian.exponent_sums(g);
        let rank_r = integer_rank(&rel);
        if rank_r + 1 != g {
            return Err(PresentationError::BadAbelianization(format!(
                "relator lattice has rank {rank_r}, expected {}",
                g.saturating_sub(1)
            )));
        }
        let mut stacked = rel.clone();
        stacked.push(m.clone());
        let hnf = hermite_rows(&stacked);
        let diag_prod: i128 = hnf.iter().take(g).enumerate().map(|(i, r)| r[i] as i128).product();
        if hnf.len() < g || diag_prod.abs() != 1 {
            return Err(PresentationError::BadAbelianization(
                "meridian does not generate the abelianization".into(),
            ));
        }
        // phi: integer kernel vector of the relator rows scaled so that phi(meridian) = 1.
        let phi = kernel_vector(&rel, g);
        let mphi: i64 = m.iter().zip(&phi).map(|(a, b)| a * b).sum();
        if mphi == 0 {
            return Err(PresentationError::BadAbelianization("meridian is torsion".into()));
        }
        let phi: Vec<i64> = phi.iter().map(|x| x * mphi.signum()).collect();
        let mphi = mphi.abs();
        if phi.iter().any(|x| x % mphi != 0) {
            return Err(PresentationError::BadAbelianization("meridian is not primitive".into()));
        }
        let phi: Vec<i64> = phi.iter().map(|x| x / mphi).collect();
        let l: i64 = self.longitude.exponent_sums(g).iter().zip(&phi).map(|(a, b)| a * b).sum();
        if l != 0 {
            return Err(PresentationError::LongitudeNotNullhomologous(l));
        }
        Ok(phi)
    }

    /// The two-bridge knot `b(p, q)` with `p` odd, presented as `<a, b | a w = w b>`
    /// where `w = b^{e_1} a^{e_2} ...` and `e_i = (-1)^{floor(iq/p)}`. The sign formula
    /// needs `q` odd, so an even `q` is replaced by `q - p`, which gives the same knot.
    pub fn two_bridge(p: i64, q: i64) -> Result<Self, PresentationError> {
        if p < 3 || p % 2 == 0 || q.gcd(&p) != 1 {
            return Err(PresentationError::InvalidTwoBridge(p, q));
        }
        let q = if q % 2 == 0 { q - p } else { q };
        let mut w = Vec::new();
        for i in 1..p {
            let e = if (i * q).div_euclid(p).rem_euclid(2) == 0 { 1 } else { -1 };
            let g = if i % 2 == 1 { 2 } else { 1 };
            w.push(e * g);
        }
        let w = Word(w);
        let a = Word::gen(0);
        let b = Word::gen(1);
        let rel = a.concat(&w).concat(&b.inverse()).concat(&w.inverse());
        let sigma = w.total_exponent();
        let longitude = w.concat(&w.reversed()).concat(&Word::pow_gen(0, -2 * sigma));
        let p = KnotPresentation {
            names: vec!["a".into(), "b".into()],
            relators: vec![rel],
            meridian: a,
            longitude,
            meridional_generators: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// `<x, y | x^p = y^q>` with meridian `x^r y^s` (`rq + sp = 1`) and longitude `x^p mu^{-pq}`.
    pub fn torus(p: i64, q: i64) -> Result<Self, PresentationError> {
        if p.abs() < 2 || q.abs() < 2 || p.gcd(&q) != 1 {
            return Err(PresentationError::InvalidTorusParams(p, q));
        }
        let eg = q.extended_gcd(&p);
        let (mut r, mut s) = (eg.x, eg.y);
        if eg.gcd < 0 {
            r = -r;
            s = -s;
        }
        debug_assert_eq!(r * q + s * p, 1);
        let x = Word::pow_gen(0, p);
        let y = Word::pow_gen(1, q);
        let mu = Word::pow_gen(0, r).concat(&Word::pow_gen(1, s));
        let longitude = x.concat(&mu.pow(-p * q));
        let pres = KnotPresentation {
            names: vec!["x".into(), "y".into()],
            relators: vec![x.concat(&y.inverse())],
            meridian: mu,
            longitude,
            meridional_generators: false,
        };
        pres.validate()?;
        Ok(pres)
    }

    /// Wirtinger-type presentation of a braid closure via the Artin action on the free
    /// group of the strands. Words grow quickly with the crossing number, so this is
    /// meant for short braids.
    pub fn from_braid(braid: &Braid) -> Result<Self, PresentationError> {
        braid.check_knot()?;
        let n = braid.strands;
        if braid.word.is_empty() {
            return Ok(Self::unknot());
        }
        let mut words: Vec<Word> = (0..n).map(Word::gen).collect();
        // conj[k] = (position of the under-strand before crossing k, conjugator c)
        let mut crossings: Vec<(usize, usize, Word)> = Vec::new();
        for &l in &braid.word {
            let i = l.unsigned_abs() as usize;
            let eps = l.signum() * ARTIN_CONVENTION;
            let (left, right) = (words[i - 1].clone(), words[i].clone());
            if eps > 0 {
                // strand at position i passes under and moves to i - 1
                let c = left.inverse();
                words[i - 1] = c.inverse().concat(&right).concat(&c);
                words[i] = left;
                crossings.push((i, i - 1, c));
            } else {
                // strand at position i - 1 passes under and moves to i
                let c = right.clone();
                words[i] = c.inverse().concat(&left).concat(&c);
                words[i - 1] = right;
                crossings.push((i - 1, i, c));
            }
        }
        let relators: Vec<Word> = (0..n).map(|p| words[p].concat(&Word::gen(p).inverse())).collect();

        // Follow the knot from top position 0 and multiply the conjugators picked up at
        // undercrossings.
        let perm = braid.permutation();
        let mut big_p = Word::default();
        let mut start = 0usize;
        for _ in 0..n {
            let mut pos = start;
            for (k, &l) in braid.word.iter().enumerate() {
                let i = l.unsigned_abs() as usize;
                let (from, to, ref c) = crossings[k];
                if pos == from {
                    big_p = big_p.concat(c);
                    pos = to;
                } else if pos == i - 1 {
                    pos = i;
                } else if pos == i {
                    pos = i - 1;
                }
            }
            debug_assert_eq!(pos, perm[start]);
            start = pos;
        }
        let e = big_p.total_exponent();
        let longitude = big_p.concat(&Word::pow_gen(0, -e));
        let pres = KnotPresentation {
            names: (0..n).map(|i| format!("x{i}")).collect(),
            relators,
            meridian: Word::gen(0),
            longitude,
            meridional_generators: true,
        };
        pres.validate()?;
        Ok(pres)
    }

    /// Mirror: same group, meridian inverted.
    pub fn mirror(&self) -> Self {
        KnotPresentation { meridian: self.meridian.inverse(), ..self.clone() }
    }

    /// Largest relator residual `max |rho(r) - 1|` under an assignment.
    pub fn relator_residual(&self, images: &[Su2]) -> f64 {
        self.relators.iter().map(|r| r.eval(images).dist(&Su2::IDENTITY)).fold(0.0, f64::max)
    }
}

/// Sign convention of the Artin action, fixed so that the closure of the positive braid
/// `s_1^3` has longitude slope `-6` in the pillowcase.
const ARTIN_CONVENTION: i32 = -1;

/// Row-style Hermite normal form over the integers (zero rows dropped).
pub(crate) fn hermite_rows(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out_rows = 0;
    for c in 0..cols {
        // Euclid on column c among rows out_rows..
        loop {
            let mut piv: Option<usize> = None;
            for r in out_rows..m.len() {
                if m[r][c] != 0 && piv.is_none_or(|p| m[r][c].abs() < m[p][c].abs()) {
                    piv = Some(r);
                }
            }
            let Some(p) = piv else { break };
            m.swap(out_rows, p);
            let mut done = true;
            for r in out_rows + 1..m.len() {
                if m[r][c] != 0 {
                    let f = m[r][c] / m[out_rows][c];
                    for k in 0..cols {
                        m[r][k] -= f * m[out_rows][k];
                    }
                    if m[r][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                if m[out_rows][c] < 0 {
                    for k in 0..cols {
                        m[out_rows][k] = -m[out_rows][k];
                    }
                }
                out_rows += 1;
                break;
            }
        }
        if out_rows == m.len() {
            break;
        }
    }
    m.truncate(out_rows);
    m.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect()
}

pub(crate) fn integer_rank(rows: &[Vec<i64>]) -> usize {
    hermite_rows(rows).len()
}

/// A primitive integer vector in the kernel of `rows` (assumed of corank 1).
fn kernel_vector(rows: &[Vec<i64>], n: usize) -> Vec<i64> {
    use num_rational::Ratio;
    type Q = Ratio<i128>;
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x as i128)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(p) = (row..m.len()).find(|&r| m[r][c] != Q::from_integer(0)) else { continue };
        m.swap(row, p);
        let inv = Q::from_integer(1) / m[row][c];
        for k in 0..n {
            m[row][k] *= inv;
        }
        for r in 0..m.len() {
            if r != row && m[r][c] != Q::from_integer(0) {
                let f = m[r][c];
                for k in 0..n {
                    let t = m[row][k] * f;
                    m[r][k] -= t;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c)).unwrap_or(0);
    let mut v = vec![Q::from_integer(0); n];
    v[free] = Q::from_integer(1);
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = -m[r][free];
    }
    let den = v.iter().fold(1i128, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i128> = v.iter().map(|x| (x * Q::from_integer(den)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |acc, x| acc.gcd(x));
    ints.iter().map(|x| (x / g.max(1)) as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_two_bridge_is_braid_relation() {
        let p = KnotPresentation::two_bridge(3, 1).unwrap();
        assert_eq!(p.relators[0].format(&p.names), "a b a B A B");
    }

    #[test]
    fn parse_round_trip() {
        let names: Vec<String> = vec!["u".into(), "v".into()];
        let w = Word::parse("u v^2 U V^-1", &names).unwrap();
        assert_eq!(w.0, vec![1, 2, 2, -1, 2]);
        assert_eq!(Word::parse(&w.format(&names), &names).unwrap(), w);
    }

    #[test]
    fn torus_validates() {
        for (p, q) in [(2, 3), (2, 5), (3, 4), (3, 5), (2, -3)] {
            KnotPresentation::torus(p, q).unwrap();
        }
        assert!(KnotPresentation::torus(2, 4).is_err());
    }

    #[test]
    fn bad_meridian_rejected() {
        let p = KnotPresentation::two_bridge(3, 1).unwrap();
        let bad = KnotPresentation { meridian: Word::pow_gen(0, 2), ..p };
        assert!(matches!(bad.validate(), Err(PresentationError::BadAbelianization(_))));
    }
}
