//! JSON and CSV serialisation. Reals are written with 17 significant
//! digits so that every `f64` round-trips exactly; non-finite values
//! become `null`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use awlab_core::report::CheckReport;
use awlab_core::suite::{Suite, SuiteConfig};
use awlab_core::tables::Table;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `f64` serialised with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(serde::Serialize)]
pub struct Dims {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N1")]
    pub n1: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
}

#[derive(serde::Serialize)]
pub struct Meta {
    pub suite: String,
    pub q: Num,
    pub dims: Dims,
    pub alpha: [Num; 3],
    pub precision: String,
}

impl Meta {
    pub fn new(suite: &str, cfg: &SuiteConfig, precision: &str) -> Self {
        Meta {
            suite: suite.to_string(),
            q: Num(cfg.q),
            dims: Dims { n: cfg.n, n1: cfg.n1, n2: cfg.n2 },
            alpha: cfg.alpha.map(Num),
            precision: precision.to_string(),
        }
    }
}

#[derive(serde::Serialize)]
pub struct CheckDoc<'a> {
    pub check_id: &'a str,
    pub params: &'a BTreeMap<String, String>,
    pub residual: Num,
    pub tolerance: Num,
    pub pass: bool,
    pub warning: bool,
    pub notes: &'a str,
}

impl<'a> From<&'a CheckReport> for CheckDoc<'a> {
    fn from(c: &'a CheckReport) -> Self {
        CheckDoc {
            check_id: &c.check_id,
            params: &c.params,
            residual: Num(c.residual),
            tolerance: Num(c.tolerance),
            pass: c.pass,
            warning: c.warning,
            notes: &c.notes,
        }
    }
}

#[derive(serde::Serialize)]
pub struct ReportDoc<'a> {
    pub meta: Meta,
    pub checks: Vec<CheckDoc<'a>>,
}

pub fn report_doc<'a>(suite: Suite, cfg: &SuiteConfig, precision: &str, checks: &'a [CheckReport]) -> ReportDoc<'a> {
    ReportDoc { meta: Meta::new(suite.as_str(), cfg, precision), checks: checks.iter().map(CheckDoc::from).collect() }
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

enum Cell {
    Int(i64),
    Real(Num),
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Real(x) => x.serialize(s),
        }
    }
}

#[derive(serde::Serialize)]
struct TableMeta {
    kind: String,
    q: Num,
    dims: Dims,
    alpha: [Num; 3],
    precision: String,
    description: String,
}

#[derive(serde::Serialize)]
struct TableDoc {
    meta: TableMeta,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

pub fn table_json(t: &Table, cfg: &SuiteConfig) -> Result<String> {
    let doc = TableDoc {
        meta: TableMeta {
            kind: t.kind.as_str().to_string(),
            q: Num(cfg.q),
            dims: Dims { n: cfg.n, n1: cfg.n1, n2: cfg.n2 },
            alpha: cfg.alpha.map(Num),
            precision: t.precision.clone(),
            description: t.description.clone(),
        },
        columns: t.columns(),
        rows: t
            .labels
            .iter()
            .zip(&t.values)
            .map(|(l, v)| l.iter().map(|i| Cell::Int(*i)).chain(v.iter().map(|x| Cell::Real(Num(*x)))).collect())
            .collect(),
    };
    to_json(&doc)
}

/// CSV with one `#` comment line naming the columns and the parameters.
pub fn table_csv(t: &Table, cfg: &SuiteConfig) -> Result<String> {
    let mut buf = format!(
        "# {}; columns: {}; q = {}, N = {}, N1 = {}, N2 = {}, alpha = ({}, {}, {}), precision = {}\n",
        t.description,
        t.columns().join(","),
        cfg.q,
        cfg.n,
        cfg.n1,
        cfg.n2,
        cfg.alpha[0],
        cfg.alpha[1],
        cfg.alpha[2],
        t.precision
    )
    .into_bytes();
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        for (l, v) in t.labels.iter().zip(&t.values) {
            let record: Vec<String> = l.iter().map(|i| i.to_string()).chain(v.iter().map(|x| fmt17(*x))).collect();
            w.write_record(&record)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        let s = serde_json::to_string(&[Num(0.1), Num(f64::NAN), Num(-1.0 / 3.0)]).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,null,-3.3333333333333331e-1]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0].unwrap().to_bits(), 0.1_f64.to_bits());
        assert_eq!(back[2].unwrap().to_bits(), (-1.0_f64 / 3.0).to_bits());
    }
}
