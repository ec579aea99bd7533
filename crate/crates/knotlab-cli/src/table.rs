//! Knot table records and their CSV/JSON ingestion.
//!
//! Columns (all but `name` and `crossing_number` may be empty or absent):
//!
//! | column | format |
//! |---|---|
//! | `name` | e.g. `10_98` |
//! | `crossing_number` | integer |
//! | `braid` | comma separated Artin generators, e.g. `1,-2,1,-2` |
//! | `two_bridge` | fraction `p/q` |
//! | `pd` | `[[a,b,c,d],...]` or `PD[X[a,b,c,d],...]` |
//! | `alexander` | Laurent polynomial in `t`, e.g. `t-1+t^-1` |
//! | `determinant`, `signature`, `seifert_genus`, `slice_genus`, `max_tb` | integers |
//! | `alternating`, `amphichiral`, `small`, `twist`, `slice`, `composite` | `true`/`false` |
//! | `montesinos_tangles` | number of rational tangles |
//! | `torus` | `p:q` |
//! | `cable` | `p:q@companion` |
//! | `boundary_slopes` | `;` separated slopes, e.g. `-4;0;6;8;32/3` |
//! | `boundary_slope_bound` | bound on the absolute value of every finite boundary slope |
//! | `surjection` | `target:degree`, a surjection onto the group of `target` sending the longitude to its `degree`-th power |
//! | `a_polynomial` | JSON array of `[m, l, c]` terms |
//! | `chirality` | free-form convention tag |

use std::collections::HashMap;
use std::path::Path;

use knotlab::alexander::determinant;
use knotlab::apoly::BivLaurentPoly;
use knotlab::braid::Braid;
use knotlab::diagram::DiagramRecord;
use knotlab::laurent::IntLaurentPoly;
use knotlab::slopes::Slope;
use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TableError {
    #[error("schema error at row {row}, column {column}: {msg}")]
    Schema { row: usize, column: String, msg: String },
    #[error("row {row} ({name}): inconsistent {fields}: {msg}")]
    Consistency { row: usize, name: String, fields: String, msg: String },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

pub const COLUMNS: &[&str] = &[
    "name",
    "crossing_number",
    "braid",
    "two_bridge",
    "pd",
    "alexander",
    "determinant",
    "signature",
    "seifert_genus",
    "slice_genus",
    "alternating",
    "amphichiral",
    "small",
    "montesinos_tangles",
    "torus",
    "twist",
    "slice",
    "composite",
    "cable",
    "boundary_slopes",
    "boundary_slope_bound",
    "surjection",
    "max_tb",
    "a_polynomial",
    "chirality",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CableDatum {
    pub p: i64,
    pub q: i64,
    pub companion: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectionDatum {
    pub target: String,
    pub degree: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct KnotRecord {
    pub name: String,
    pub crossing_number: u32,
    pub braid: Option<Braid>,
    pub two_bridge: Option<(i64, i64)>,
    pub pd: Option<Vec<[i64; 4]>>,
    pub alexander: Option<IntLaurentPoly>,
    pub determinant: Option<u64>,
    pub signature: Option<i64>,
    pub seifert_genus: Option<u32>,
    pub slice_genus: Option<u32>,
    pub alternating: Option<bool>,
    pub amphichiral: Option<bool>,
    pub small: Option<bool>,
    pub montesinos_tangles: Option<u32>,
    pub torus: Option<(i64, i64)>,
    pub twist: Option<bool>,
    pub slice: Option<bool>,
    pub composite: Option<bool>,
    pub cable: Option<CableDatum>,
    pub boundary_slopes: Option<Vec<Slope>>,
    pub boundary_slope_bound: Option<Slope>,
    pub surjection: Option<SurjectionDatum>,
    pub max_tb: Option<i64>,
    #[serde(serialize_with = "ser_apoly")]
    pub a_polynomial: Option<BivLaurentPoly>,
    pub chirality: Option<String>,
}

fn ser_apoly<S: serde::Serializer>(a: &Option<BivLaurentPoly>, s: S) -> Result<S::Ok, S::Error> {
    match a {
        Some(a) => a.to_json().serialize(s),
        None => s.serialize_none(),
    }
}

impl KnotRecord {
    /// Smoothly slice, from the explicit flag or from slice genus 0.
    pub fn is_slice(&self) -> Option<bool> {
        self.slice.or(self.slice_genus.map(|g| g == 0))
    }

    /// Normalized Alexander polynomial, if present and normalizable.
    pub fn normalized_alexander(&self) -> Option<IntLaurentPoly> {
        self.alexander.as_ref().and_then(|a| a.normalize().ok())
    }

    /// Field values in `COLUMNS` order, as written by [`write_csv`].
    pub fn to_row(&self) -> Vec<String> {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(|v| v.to_string()).unwrap_or_default()
        }
        let pd = self.pd.as_ref().map(|pd| {
            let xs: Vec<String> = pd.iter().map(|x| format!("[{},{},{},{}]", x[0], x[1], x[2], x[3])).collect();
            format!("[{}]", xs.join(","))
        });
        let join_slopes = |v: &Vec<Slope>| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";");
        vec![
            self.name.clone(),
            self.crossing_number.to_string(),
            opt(&self.braid),
            self.two_bridge.map(|(p, q)| format!("{p}/{q}")).unwrap_or_default(),
            pd.unwrap_or_default(),
            opt(&self.alexander),
            opt(&self.determinant),
            opt(&self.signature),
            opt(&self.seifert_genus),
            opt(&self.slice_genus),
            opt(&self.alternating),
            opt(&self.amphichiral),
            opt(&self.small),
            opt(&self.montesinos_tangles),
            self.torus.map(|(p, q)| format!("{p}:{q}")).unwrap_or_default(),
            opt(&self.twist),
            opt(&self.slice),
            opt(&self.composite),
            self.cable.as_ref().map(|c| format!("{}:{}@{}", c.p, c.q, c.companion)).unwrap_or_default(),
            self.boundary_slopes.as_ref().map(join_slopes).unwrap_or_default(),
            opt(&self.boundary_slope_bound),
            self.surjection.as_ref().map(|s| format!("{}:{}", s.target, s.degree)).unwrap_or_default(),
            opt(&self.max_tb),
            self.a_polynomial.as_ref().map(|a| a.to_json().to_string()).unwrap_or_default(),
            opt(&self.chirality),
        ]
    }
}

type Fields = HashMap<String, String>;

struct RowParser<'a> {
    row: usize,
    fields: &'a Fields,
}

impl RowParser<'_> {
    fn raw(&self, col: &str) -> Option<&str> {
        self.fields.get(col).map(|s| s.trim()).filter(|s| !s.is_empty())
    }

    fn err(&self, col: &str, msg: impl Into<String>) -> TableError {
        TableError::Schema { row: self.row, column: col.to_string(), msg: msg.into() }
    }

    fn get<T>(&self, col: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>, TableError> {
        match self.raw(col) {
            None => Ok(None),
            Some(s) => parse(s).map(Some).map_err(|m| self.err(col, m)),
        }
    }

    fn int<T: std::str::FromStr>(&self, col: &str) -> Result<Option<T>, TableError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(col, |s| s.parse::<T>().map_err(|e| format!("{e}: {s:?}")))
    }

    fn flag(&self, col: &str) -> Result<Option<bool>, TableError> {
        self.get(col, |s| match s.to_ascii_lowercase().as_str() {
            "true" | "yes" | "y" | "1" => Ok(true),
            "false" | "no" | "n" | "0" => Ok(false),
            _ => Err(format!("expected true or false, got {s:?}")),
        })
    }
}

fn pair(s: &str, sep: char) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(sep).ok_or_else(|| format!("expected a{sep}b, got {s:?}"))?;
    let p = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let q = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    Ok((p, q))
}

/// Closed form of the normalized Alexander polynomial of `T(p, q)`.
pub fn torus_alexander(p: i64, q: i64) -> IntLaurentPoly {
    let (p, q) = (p.abs(), q.abs());
    let one = IntLaurentPoly::one();
    let tk = |k: i64| IntLaurentPoly::monomial(1, k) - one.clone();
    let num = tk(p * q) * tk(1);
    let den = tk(p) * tk(q);
    let f = num.div_exact(&den).expect("torus knot Alexander polynomial divides exactly");
    f.normalize().expect("torus knot Alexander polynomial is normalizable")
}

/// Parses one row given as column name -> text. `row` is 1-based and used in errors.
pub fn parse_record(row: usize, fields: &Fields) -> Result<KnotRecord, TableError> {
    let r = RowParser { row, fields };
    let name = r.raw("name").ok_or_else(|| r.err("name", "missing"))?.to_string();
    let crossing_number = r.int::<u32>("crossing_number")?.ok_or_else(|| r.err("crossing_number", "missing"))?;
    let rec = KnotRecord {
        name,
        crossing_number,
        braid: r.get("braid", |s| s.parse::<Braid>().map_err(|e| e.to_string()))?,
        two_bridge: r.get("two_bridge", |s| pair(s, '/'))?,
        pd: r.get("pd", |s| DiagramRecord::parse_pd(s).map(|d| d.pd).map_err(|e| e.to_string()))?,
        alexander: r.get("alexander", |s| IntLaurentPoly::parse(s).map_err(|e| e.to_string()))?,
        determinant: r.int("determinant")?,
        signature: r.int("signature")?,
        seifert_genus: r.int("seifert_genus")?,
        slice_genus: r.int("slice_genus")?,
        alternating: r.flag("alternating")?,
        amphichiral: r.flag("amphichiral")?,
        small: r.flag("small")?,
        montesinos_tangles: r.int("montesinos_tangles")?,
        torus: r.get("torus", |s| pair(s, ':'))?,
        twist: r.flag("twist")?,
        slice: r.flag("slice")?,
        composite: r.flag("composite")?,
        cable: r.get("cable", |s| {
            let (pq, companion) = s.split_once('@').ok_or_else(|| format!("expected p:q@companion, got {s:?}"))?;
            let (p, q) = pair(pq, ':')?;
            Ok(CableDatum { p, q, companion: companion.trim().to_string() })
        })?,
        boundary_slopes: r.get("boundary_slopes", |s| {
            s.split(';').map(|x| x.parse::<Slope>().map_err(|e| e.to_string())).collect()
        })?,
        boundary_slope_bound: r.get("boundary_slope_bound", |s| s.parse::<Slope>().map_err(|e| e.to_string()))?,
        surjection: r.get("surjection", |s| {
            let (target, d) = s.rsplit_once(':').ok_or_else(|| format!("expected target:degree, got {s:?}"))?;
            let degree = d.trim().parse::<i64>().map_err(|e| e.to_string())?;
            Ok(SurjectionDatum { target: target.trim().to_string(), degree })
        })?,
        max_tb: r.int("max_tb")?,
        a_polynomial: r.get("a_polynomial", |s| BivLaurentPoly::from_json(s).map_err(|e| e.to_string()))?,
        chirality: r.raw("chirality").map(str::to_string),
    };
    check_consistency(row, &rec)?;
    Ok(rec)
}

fn check_consistency(row: usize, rec: &KnotRecord) -> Result<(), TableError> {
    let fail = |fields: &str, msg: String| TableError::Consistency {
        row,
        name: rec.name.clone(),
        fields: fields.to_string(),
        msg,
    };
    if let Some(a) = &rec.alexander {
        if a.normalize().is_err() {
            return Err(fail("alexander", format!("{a} is not a normalizable Alexander polynomial")));
        }
        if let Some(d) = rec.determinant {
            let from_poly = determinant(a);
            if from_poly != BigInt::from(d) {
                return Err(fail("determinant, alexander", format!("determinant {d} but |alexander(-1)| = {from_poly}")));
            }
        }
    }
    if let Some((p, q)) = rec.torus {
        if p.abs() < 2 || q.abs() < 2 || num_integer::gcd(p, q) != 1 {
            return Err(fail("torus", format!("{p}:{q} is not a nontrivial torus knot")));
        }
        if let Some(a) = rec.normalized_alexander() {
            let expected = torus_alexander(p, q);
            if a != expected {
                return Err(fail("torus, alexander", format!("T({p},{q}) has alexander {expected}, table has {a}")));
            }
        }
    }
    if let (Some(g4), Some(g)) = (rec.slice_genus, rec.seifert_genus) {
        if g4 > g {
            return Err(fail("slice_genus, seifert_genus", format!("slice genus {g4} exceeds Seifert genus {g}")));
        }
    }
    if let (Some(s), Some(g4)) = (rec.slice, rec.slice_genus) {
        if s != (g4 == 0) {
            return Err(fail("slice, slice_genus", format!("slice flag {s} with slice genus {g4}")));
        }
    }
    if let Some(c) = &rec.cable {
        if c.q < 2 || num_integer::gcd(c.p, c.q) != 1 {
            return Err(fail("cable", format!("cable parameters {}:{} need q >= 2 and gcd 1", c.p, c.q)));
        }
    }
    Ok(())
}

/// Reads CSV text with a header row. Unknown columns are rejected.
pub fn parse_csv(text: &str) -> Result<Vec<KnotRecord>, TableError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(text.as_bytes());
    let headers: Vec<String> = match rdr.headers() {
        Ok(h) => h.iter().map(|s| s.trim().to_string()).collect(),
        Err(e) => return Err(TableError::Schema { row: 0, column: String::new(), msg: e.to_string() }),
    };
    if headers.iter().all(|h| h.is_empty()) {
        return Ok(vec![]);
    }
    for h in &headers {
        if !COLUMNS.contains(&h.as_str()) {
            return Err(TableError::Schema { row: 0, column: h.clone(), msg: "unknown column".into() });
        }
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| TableError::Schema { row, column: String::new(), msg: e.to_string() })?;
        let fields: Fields = headers.iter().cloned().zip(rec.iter().map(str::to_string)).collect();
        out.push(parse_record(row, &fields)?);
    }
    Ok(out)
}

fn json_text(col: &str, v: &serde_json::Value) -> String {
    use serde_json::Value;
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::Array(xs) if col == "boundary_slopes" => xs.iter().map(|x| json_text("", x)).collect::<Vec<_>>().join(";"),
        Value::Array(xs) if col == "braid" => xs.iter().map(|x| json_text("", x)).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Reads a JSON array of objects keyed by the CSV column names.
pub fn parse_json(text: &str) -> Result<Vec<KnotRecord>, TableError> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| TableError::Schema { row: 0, column: String::new(), msg: e.to_string() })?;
    let rows = v
        .as_array()
        .ok_or_else(|| TableError::Schema { row: 0, column: String::new(), msg: "expected an array of objects".into() })?;
    let mut out = Vec::new();
    for (i, obj) in rows.iter().enumerate() {
        let row = i + 1;
        let obj = obj
            .as_object()
            .ok_or_else(|| TableError::Schema { row, column: String::new(), msg: "expected an object".into() })?;
        let mut fields = Fields::new();
        for (k, val) in obj {
            if !COLUMNS.contains(&k.as_str()) {
                return Err(TableError::Schema { row, column: k.clone(), msg: "unknown column".into() });
            }
            fields.insert(k.clone(), json_text(k, val));
        }
        out.push(parse_record(row, &fields)?);
    }
    Ok(out)
}

/// Reads a `.json` file as JSON and anything else as CSV.
pub fn ingest_table(path: &Path) -> Result<Vec<KnotRecord>, TableError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| TableError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
}

pub fn write_csv(records: &[KnotRecord]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record(r.to_row()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

/// Path of the bundled table of prime knots with 3 to 10 crossings.
pub fn bundled_table_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/knots_le10.csv")
}

pub fn bundled_table() -> Result<Vec<KnotRecord>, TableError> {
    ingest_table(&bundled_table_path())
}
