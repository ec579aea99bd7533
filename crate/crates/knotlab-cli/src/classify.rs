//! Obstruction classifier: decides from table data alone whether a knot can be
//! SU(2)-averse.

use std::collections::{BTreeSet, HashMap};

use knotlab::alexander::{coeff_abs_sum, circle_root_report, odd_circle_root_obstruction};
use knotlab::apoly::{boundary_slopes_from_sides, newton_polygon};
use knotlab::laurent::IntLaurentPoly;
use knotlab::slopes::Slope;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::table::KnotRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
}

pub const RULES: [Rule; 9] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5, Rule::R6, Rule::R7, Rule::R8, Rule::R9];

impl Rule {
    pub fn statement(self) -> &'static str {
        match self {
            Rule::R1 => "A nontrivial smoothly slice knot has no nontrivial instanton L-space surgeries, so it is not SU(2)-averse.",
            Rule::R2 => "An SU(2)-averse knot of smooth slice genus 1 has Seifert genus 1 and Alexander polynomial t-1+t^-1 or -t+3-t^-1.",
            Rule::R3 => "If the Alexander polynomial has a root of odd order on the unit circle which is not a root of unity, the knot is not SU(2)-averse.",
            Rule::R4 => "An amphichiral SU(2)-averse knot would have limit slope r = -r = 0, which is impossible.",
            Rule::R5 => "The limit slope r of a small SU(2)-averse knot is a boundary slope with det(K) <= |r| - 1.",
            Rule::R6 => "The limit slope r of a small SU(2)-averse knot is an integer with |r| >= 6, |r| >= 1 + sum |a_j|, and q | r whenever the Alexander polynomial has an odd-order root at a primitive q-th root of unity.",
            Rule::R7 => "A connected sum of two nontrivial knots is not SU(2)-averse.",
            Rule::R8 => "The (p,q) cable of K is SU(2)-averse if and only if K is SU(2)-averse with limit slope p/q.",
            Rule::R9 => "A surjection of knot groups sending meridian to meridian and longitude to the d-th power of the longitude multiplies SU(2)-cyclic slopes by d, so r(K) = d r(target).",
        }
    }
}

pub const TORUS_STATEMENT: &str =
    "T(p,q) is SU(2)-averse with limit slope pq: (pq + 1/n)-surgery on it is a lens space for every n != 0.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    NotAverse,
    TorusAverse { limit_slope: i64 },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "snake_case")]
pub enum Outcome {
    Fires(String),
    Passes(String),
    NotApplicable,
    MissingData(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleEvaluation {
    pub rule: Rule,
    pub statement: &'static str,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    #[serde(flatten)]
    pub status: Status,
    /// Rules that rule out averseness.
    pub fired: Vec<Rule>,
    /// Every evaluated rule in order; in the default mode evaluation stops at the first firing rule.
    pub evaluated: Vec<RuleEvaluation>,
    /// Limit slopes still possible. `None` means unconstrained by the available data.
    pub candidates: Option<Vec<Slope>>,
    pub data_gaps: Vec<String>,
    pub annotations: Vec<String>,
}

impl Verdict {
    pub fn status_label(&self) -> String {
        match &self.status {
            Status::NotAverse => "not_averse".into(),
            Status::TorusAverse { limit_slope } => format!("torus_averse({limit_slope})"),
            Status::Unknown => "unknown".into(),
        }
    }

    pub fn outcome(&self, rule: Rule) -> Option<&Outcome> {
        self.evaluated.iter().find(|e| e.rule == rule).map(|e| &e.outcome)
    }
}

/// Classifier over a table, which supplies companions and surjection targets by name.
#[derive(Clone, Debug, Default)]
pub struct Classifier<'a> {
    index: HashMap<&'a str, &'a KnotRecord>,
    pub audit: bool,
}

const MAX_DEPTH: usize = 8;

fn trefoil_poly() -> IntLaurentPoly {
    IntLaurentPoly::from_i64(-1, &[1, -1, 1])
}

fn figure_eight_poly() -> IntLaurentPoly {
    IntLaurentPoly::from_i64(-1, &[-1, 3, -1])
}

/// What rules R5, R6 and R9 leave as possible limit slopes.
struct CandidateSets {
    /// From boundary slope data of a small knot, after the small-knot filters.
    small: Option<Vec<Slope>>,
    /// From a surjection datum, after signature narrowing.
    surjection: Option<Vec<Slope>>,
}

impl<'a> Classifier<'a> {
    pub fn new(table: &'a [KnotRecord]) -> Self {
        Classifier { index: table.iter().map(|r| (r.name.as_str(), r)).collect(), audit: false }
    }

    pub fn audit(mut self, on: bool) -> Self {
        self.audit = on;
        self
    }

    pub fn classify(&self, rec: &KnotRecord) -> Verdict {
        self.classify_at(rec, 0)
    }

    /// Per-record classification runs in parallel; output order follows the input.
    pub fn classify_all(&self, records: &[KnotRecord]) -> Vec<Verdict> {
        records.par_iter().map(|r| self.classify(r)).collect()
    }

    fn classify_at(&self, rec: &KnotRecord, depth: usize) -> Verdict {
        let mut evaluated = Vec::new();
        let mut gaps = Vec::new();
        let mut sets = CandidateSets { small: None, surjection: None };
        for rule in RULES {
            let outcome = self.evaluate(rule, rec, depth, &mut sets);
            if let Outcome::MissingData(m) = &outcome {
                gaps.push(format!("{rule:?}: {m}"));
            }
            let fires = matches!(outcome, Outcome::Fires(_));
            evaluated.push(RuleEvaluation { rule, statement: rule.statement(), outcome });
            if fires && !self.audit {
                break;
            }
        }
        let fired: Vec<Rule> =
            evaluated.iter().filter(|e| matches!(e.outcome, Outcome::Fires(_))).map(|e| e.rule).collect();
        let mut annotations = Vec::new();
        let (status, candidates) = if !fired.is_empty() {
            (Status::NotAverse, Some(vec![]))
        } else if let Some(r) = torus_limit_slope(rec) {
            annotations.push(TORUS_STATEMENT.to_string());
            (Status::TorusAverse { limit_slope: r }, Some(vec![Slope::integer(r)]))
        } else {
            let c = intersect(sets.small, sets.surjection);
            (Status::Unknown, c)
        };
        if status != Status::NotAverse {
            for s in candidates.iter().flatten() {
                annotations.push(l_space_annotation(*s));
            }
            if candidates.is_none() {
                gaps.push("no data constrains the limit slope".into());
            }
        }
        Verdict { name: rec.name.clone(), status, fired, evaluated, candidates, data_gaps: gaps, annotations }
    }

    fn evaluate(&self, rule: Rule, rec: &KnotRecord, depth: usize, sets: &mut CandidateSets) -> Outcome {
        match rule {
            Rule::R1 => match rec.is_slice() {
                Some(true) => Outcome::Fires("smoothly slice".into()),
                Some(false) => Outcome::Passes("not slice".into()),
                None => Outcome::MissingData("slice genus".into()),
            },
            Rule::R2 => r2(rec),
            Rule::R3 => r3(rec),
            Rule::R4 => match rec.amphichiral {
                Some(true) => Outcome::Fires("amphichiral".into()),
                Some(false) => Outcome::Passes("chiral".into()),
                None => Outcome::MissingData("amphichirality".into()),
            },
            Rule::R5 => r5(rec),
            Rule::R6 => {
                let (out, set) = r6(rec);
                sets.small = set;
                out
            }
            Rule::R7 => match rec.composite {
                Some(true) => Outcome::Fires("connected sum".into()),
                Some(false) => Outcome::Passes("prime".into()),
                None => Outcome::NotApplicable,
            },
            Rule::R8 => self.r8(rec, depth),
            Rule::R9 => {
                let (out, set) = self.r9(rec, depth, sets.small.as_deref());
                sets.surjection = set;
                out
            }
        }
    }

    /// Possible limit slopes of a named knot: `Some(empty)` when it is not averse.
    fn limit_slopes_of(&self, name: &str, depth: usize) -> Option<Vec<Slope>> {
        if depth >= MAX_DEPTH {
            return None;
        }
        let rec = self.index.get(name)?;
        let v = self.classify_at(rec, depth + 1);
        match v.status {
            Status::NotAverse => Some(vec![]),
            Status::TorusAverse { limit_slope } => Some(vec![Slope::integer(limit_slope)]),
            Status::Unknown => v.candidates,
        }
    }

    fn r8(&self, rec: &KnotRecord, depth: usize) -> Outcome {
        let Some(c) = &rec.cable else { return Outcome::NotApplicable };
        let Some(slopes) = self.limit_slopes_of(&c.companion, depth) else {
            return Outcome::MissingData(format!("limit slope data for companion {}", c.companion));
        };
        let pq = Slope::new(c.p, c.q).expect("q >= 2");
        if slopes.contains(&pq) {
            Outcome::Passes(format!("companion {} may have limit slope {pq}", c.companion))
        } else if slopes.is_empty() {
            Outcome::Fires(format!("companion {} is not SU(2)-averse", c.companion))
        } else {
            Outcome::Fires(format!("companion {} has no possible limit slope equal to {pq}", c.companion))
        }
    }

    fn r9(&self, rec: &KnotRecord, depth: usize, small: Option<&[Slope]>) -> (Outcome, Option<Vec<Slope>>) {
        let Some(s) = &rec.surjection else { return (Outcome::NotApplicable, None) };
        let Some(target) = self.limit_slopes_of(&s.target, depth) else {
            return (Outcome::MissingData(format!("limit slope data for surjection target {}", s.target)), None);
        };
        // the target's chirality in the surjection is not pinned down, so both signs stay
        let mut c = BTreeSet::new();
        for t in &target {
            if let Some(r) = t.to_ratio() {
                let r = r * s.degree;
                c.insert(Slope::from_ratio(r));
                c.insert(Slope::from_ratio(-r));
            }
        }
        let mut note = format!("{} times the limit slopes of {}", s.degree, s.target);
        match rec.signature {
            Some(sig) if sig != 0 => {
                c.retain(|x| (x.m > 0) == (sig < 0));
                note.push_str(&format!(", sign fixed by signature {sig}"));
            }
            _ => note.push_str(", both orientations kept (no nonzero signature)"),
        }
        let mut c: Vec<Slope> = c.into_iter().collect();
        if rec.small == Some(true) {
            c.retain(|x| small_admissible(rec, *x));
        }
        if let Some(sm) = small {
            c.retain(|x| sm.contains(x));
        }
        let listed: Vec<String> = c.iter().map(Slope::to_string).collect();
        if c.is_empty() {
            (Outcome::Fires(format!("{note}: no candidate survives")), Some(c))
        } else {
            (Outcome::Passes(format!("{note}: candidates {}", listed.join(", "))), Some(c))
        }
    }
}

pub fn classify(rec: &KnotRecord) -> Verdict {
    Classifier::default().classify(rec)
}

fn r2(rec: &KnotRecord) -> Outcome {
    match rec.slice_genus {
        None => Outcome::MissingData("slice genus".into()),
        Some(g4) if g4 != 1 => Outcome::NotApplicable,
        Some(_) => {
            if let Some(g) = rec.seifert_genus.filter(|&g| g > 1) {
                return Outcome::Fires(format!("slice genus 1 but Seifert genus {g}"));
            }
            match rec.normalized_alexander() {
                Some(a) if a == trefoil_poly() || a == figure_eight_poly() => {
                    Outcome::Passes(format!("slice genus 1 with Alexander polynomial {a}"))
                }
                Some(a) => Outcome::Fires(format!("slice genus 1 with Alexander polynomial {a}")),
                None => Outcome::MissingData("Seifert genus or Alexander polynomial".into()),
            }
        }
    }
}

fn r3(rec: &KnotRecord) -> Outcome {
    let Some(a) = rec.normalized_alexander() else { return Outcome::MissingData("Alexander polynomial".into()) };
    match odd_circle_root_obstruction(&a) {
        Ok(o) => match o.witness {
            Some((lo, hi)) => Outcome::Fires(format!("odd-order non-cyclotomic root at angle in [{lo:.9}, {hi:.9}]")),
            None => Outcome::Passes("no odd-order unit-circle root outside the roots of unity".into()),
        },
        Err(e) => Outcome::MissingData(format!("Alexander polynomial unusable: {e}")),
    }
}

fn is_small(rec: &KnotRecord) -> Option<bool> {
    // Montesinos knots with at most three rational tangles are small
    match rec.montesinos_tangles {
        Some(t) if t <= 3 => Some(true),
        _ => rec.small,
    }
}

/// Upper bounds on `|r|` for a finite boundary slope `r`, with their sources.
fn slope_bounds(rec: &KnotRecord) -> Vec<(num_rational::Ratio<i64>, String)> {
    let mut out = Vec::new();
    if let Some(list) = &rec.boundary_slopes {
        let m = list.iter().filter_map(|s| s.to_ratio()).map(|r| if r < 0.into() { -r } else { r }).max();
        if let Some(m) = m {
            out.push((m, "boundary slope list".to_string()));
        }
    }
    if let Some(b) = rec.boundary_slope_bound.and_then(|b| b.to_ratio()) {
        out.push((b.abs(), "boundary slope bound".to_string()));
    }
    if rec.alternating == Some(true) && rec.montesinos_tangles.is_some_and(|t| t <= 3) {
        // finite boundary slopes of such knots span an interval of length 2c containing 0
        out.push(((2 * rec.crossing_number as i64).into(), "alternating Montesinos diameter 2c".to_string()));
    }
    out
}

fn r5(rec: &KnotRecord) -> Outcome {
    match is_small(rec) {
        Some(false) => return Outcome::NotApplicable,
        None => return Outcome::MissingData("smallness".into()),
        Some(true) => {}
    }
    let Some(det) = rec.determinant.or_else(|| rec.alexander.as_ref().and_then(|a| knotlab::alexander::determinant(a).to_u64()))
    else {
        return Outcome::MissingData("determinant".into());
    };
    let bounds = slope_bounds(rec);
    let Some((b, src)) = bounds.iter().min_by_key(|(b, _)| *b) else {
        return Outcome::MissingData("boundary slopes".into());
    };
    let det = num_rational::Ratio::from_integer(det as i64);
    if det >= *b {
        Outcome::Fires(format!("det {det} >= {b} bounding every |boundary slope| ({src})"))
    } else {
        Outcome::Passes(format!("det {det} < {b} ({src})"))
    }
}

/// `|r| >= 6`, `|r| >= 1 + sum |a_j|`, integer, and divisible by every odd cyclotomic root index.
pub fn small_admissible(rec: &KnotRecord, r: Slope) -> bool {
    if r.n != 1 {
        return false;
    }
    let m = r.m.abs();
    if m < 6 {
        return false;
    }
    if let Some(a) = rec.normalized_alexander() {
        if BigInt::from(m) < coeff_abs_sum(&a) + 1 {
            return false;
        }
        if let Ok(rep) = circle_root_report(&a) {
            if rep.cyclotomic.iter().filter(|c| c.odd).any(|c| m % c.index as i64 != 0) {
                return false;
            }
        }
    }
    true
}

fn r6(rec: &KnotRecord) -> (Outcome, Option<Vec<Slope>>) {
    match is_small(rec) {
        Some(false) => return (Outcome::NotApplicable, None),
        None => return (Outcome::MissingData("smallness".into()), None),
        Some(true) => {}
    }
    let mut pool: Option<BTreeSet<Slope>> = rec.boundary_slopes.as_ref().map(|l| l.iter().copied().filter(|s| !s.is_infinite()).collect());
    let mut src = "boundary slopes";
    if pool.is_none() {
        if let Some(b) = rec.boundary_slope_bound.and_then(|b| b.to_ratio()) {
            let b = b.abs().floor().to_integer();
            pool = Some((-b..=b).map(Slope::integer).collect());
            src = "integers within the boundary slope bound";
        }
    }
    if let Some(ap) = &rec.a_polynomial {
        // the limit slope is the slope of a side of the A-polynomial's Newton polygon
        if let Ok(sides) = newton_polygon(ap).and_then(|n| boundary_slopes_from_sides(&n)) {
            let sides: BTreeSet<Slope> = sides.into_iter().collect();
            pool = Some(match pool {
                Some(p) => p.intersection(&sides).copied().collect(),
                None => sides,
            });
            src = "A-polynomial side slopes";
        }
    }
    let Some(pool) = pool else {
        return (Outcome::MissingData("boundary slopes".into()), None);
    };
    let kept: Vec<Slope> = pool.into_iter().filter(|s| small_admissible(rec, *s)).collect();
    if kept.is_empty() {
        (Outcome::Fires(format!("no admissible limit slope among the {src}")), Some(kept))
    } else {
        let listed: Vec<String> = kept.iter().map(Slope::to_string).collect();
        (Outcome::Passes(format!("admissible {src}: {}", listed.join(", "))), Some(kept))
    }
}

fn intersect(a: Option<Vec<Slope>>, b: Option<Vec<Slope>>) -> Option<Vec<Slope>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.into_iter().filter(|x| b.contains(x)).collect()),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Signed limit slope `pq` of a torus knot. Negative entries in the torus column fix the
/// handedness; otherwise it follows the signature (negative for positive torus knots).
pub fn torus_limit_slope(rec: &KnotRecord) -> Option<i64> {
    let (p, q) = rec.torus?;
    let pq = p * q;
    if p < 0 || q < 0 {
        return Some(pq);
    }
    match rec.signature {
        Some(s) if s > 0 => Some(-pq),
        _ => Some(pq),
    }
}

/// The range of surgery slopes that would be instanton L-spaces if the limit slope is `r`.
pub fn l_space_annotation(r: Slope) -> String {
    match r.to_ratio() {
        None => "limit slope at infinity: no instanton L-space range".into(),
        Some(x) if x > 0.into() => format!(
            "if r = {r}: S^3_s(K) is an instanton L-space for every rational s >= {}",
            x.ceil().to_integer() - 1
        ),
        Some(x) => format!(
            "if r = {r}: S^3_s(K) is an instanton L-space for every rational s <= {}",
            x.floor().to_integer() + 1
        ),
    }
}
