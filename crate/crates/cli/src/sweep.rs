//! Cartesian parameter sweeps with a deterministic aggregate.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use awlab_core::qcore::Precision;
use awlab_core::report::CheckReport;
use awlab_core::suite::{run_suite, Suite, SuiteConfig};
use rayon::prelude::*;

use crate::config::{parse_entries, parse_value, Entry};
use crate::output::{report_doc, Num};

pub const GRID_KEYS: [&str; 10] = ["suite", "q", "N", "N1", "N2", "alpha0", "alpha1", "alpha2", "tol", "precision"];

/// Parameter grid: every listed value of every axis is combined.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub suite: Suite,
    pub q: Vec<f64>,
    pub n: Vec<usize>,
    pub n1: Vec<usize>,
    pub n2: Vec<usize>,
    pub alpha: [Vec<f64>; 3],
    pub tol: Option<f64>,
    pub precision: Option<Precision>,
}

fn list<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = e.value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        bail!("line {}: empty item in the list for `{}`", e.line, e.key);
    }
    items
        .into_iter()
        .map(|s| s.parse().map_err(|_| anyhow!("line {}: `{}` items must be {what}, got `{s}`", e.line, e.key)))
        .collect()
}

impl Grid {
    /// Parses a grid file: `key = v1, v2, ...` per axis; `suite`, `tol` and
    /// `precision` take single values. Missing axes use the defaults.
    pub fn parse(text: &str) -> Result<Grid> {
        let d = SuiteConfig::default();
        let mut g = Grid {
            suite: Suite::All,
            q: vec![d.q],
            n: vec![d.n],
            n1: vec![d.n1],
            n2: vec![d.n2],
            alpha: d.alpha.map(|a| vec![a]),
            tol: None,
            precision: None,
        };
        for e in parse_entries(text, &GRID_KEYS)? {
            let real = "real numbers";
            let int = "non-negative integers";
            match e.key.as_str() {
                "suite" => g.suite = e.value.parse().map_err(|err| anyhow!("line {}: {err}", e.line))?,
                "q" => g.q = list(&e, real)?,
                "N" => g.n = list(&e, int)?,
                "N1" => g.n1 = list(&e, int)?,
                "N2" => g.n2 = list(&e, int)?,
                "alpha0" => g.alpha[0] = list(&e, real)?,
                "alpha1" => g.alpha[1] = list(&e, real)?,
                "alpha2" => g.alpha[2] = list(&e, real)?,
                "tol" => g.tol = Some(parse_value(&e, "a positive real number")?),
                "precision" => g.precision = Some(e.value.parse().map_err(|err| anyhow!("line {}: {err}", e.line))?),
                _ => unreachable!("key list checked by parse_entries"),
            }
        }
        Ok(g)
    }

    /// Points in row-major order over (q, N, N1, N2, alpha0, alpha1, alpha2).
    pub fn points(&self) -> Vec<SuiteConfig> {
        let mut out = Vec::new();
        for &q in &self.q {
            for &n in &self.n {
                for &n1 in &self.n1 {
                    for &n2 in &self.n2 {
                        for &a0 in &self.alpha[0] {
                            for &a1 in &self.alpha[1] {
                                for &a2 in &self.alpha[2] {
                                    out.push(SuiteConfig {
                                        q,
                                        n,
                                        n1,
                                        n2,
                                        alpha: [a0, a1, a2],
                                        tol: self.tol,
                                        corrupt: None,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Result at one grid point; `Err` holds the reason the point was rejected.
pub type PointResult = std::result::Result<Vec<CheckReport>, String>;

pub fn run_points(suite: Suite, points: &[SuiteConfig], precision: Precision, jobs: Option<usize>) -> Result<Vec<PointResult>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().context("starting the worker pool")?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|cfg| run_suite(suite, cfg, precision).map_err(|e| e.to_string()))
            .collect()
    }))
}

#[derive(serde::Serialize)]
struct PointDoc {
    index: usize,
    q: Num,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "N1")]
    n1: usize,
    #[serde(rename = "N2")]
    n2: usize,
    alpha: [Num; 3],
    status: &'static str,
    error: Option<String>,
    failed_checks: Vec<String>,
}

#[derive(serde::Serialize)]
struct AggregateCheck {
    check_id: String,
    residual: Num,
    tolerance: Num,
    pass: bool,
    warning: bool,
    points: usize,
    failures: usize,
    worst_point: usize,
    notes: String,
}

#[derive(serde::Serialize)]
struct GridMeta {
    suite: String,
    precision: String,
    points: usize,
    invalid_points: usize,
    q: Vec<Num>,
    #[serde(rename = "N")]
    n: Vec<usize>,
    #[serde(rename = "N1")]
    n1: Vec<usize>,
    #[serde(rename = "N2")]
    n2: Vec<usize>,
    alpha0: Vec<Num>,
    alpha1: Vec<Num>,
    alpha2: Vec<Num>,
}

#[derive(serde::Serialize)]
struct AggregateDoc {
    meta: GridMeta,
    points: Vec<PointDoc>,
    checks: Vec<AggregateCheck>,
}

fn worse(a: f64, b: f64) -> bool {
    // NaN ranks above every number so that it surfaces in the aggregate.
    match (a.is_nan(), b.is_nan()) {
        (true, false) => true,
        (_, true) => false,
        _ => a > b,
    }
}

/// Max residual per check id over all valid points. Ties keep the
/// earliest point, so the result does not depend on scheduling.
fn aggregate(results: &[PointResult]) -> Vec<AggregateCheck> {
    let mut by_id: BTreeMap<String, AggregateCheck> = BTreeMap::new();
    for (i, r) in results.iter().enumerate() {
        let Ok(checks) = r else { continue };
        for c in checks {
            let e = by_id.entry(c.check_id.clone()).or_insert_with(|| AggregateCheck {
                check_id: c.check_id.clone(),
                residual: Num(c.residual),
                tolerance: Num(c.tolerance),
                pass: true,
                warning: c.warning,
                points: 0,
                failures: 0,
                worst_point: i,
                notes: String::new(),
            });
            if e.points > 0 && worse(c.residual, e.residual.0) {
                e.residual = Num(c.residual);
                e.tolerance = Num(c.tolerance);
                e.worst_point = i;
            }
            e.points += 1;
            e.warning &= c.warning;
            if !c.pass {
                e.pass = false;
                e.failures += 1;
            }
        }
    }
    by_id
        .into_values()
        .map(|mut a| {
            a.notes = format!("max over {} points, attained at point {}", a.points, a.worst_point);
            a
        })
        .collect()
}

pub struct SweepOutcome {
    pub aggregate_json: String,
    pub point_json: Vec<Option<String>>,
    pub all_pass: bool,
}

pub fn render(grid: &Grid, precision: Precision, points: &[SuiteConfig], results: &[PointResult]) -> Result<SweepOutcome> {
    let mut docs = Vec::new();
    let mut point_json = Vec::new();
    let mut all_pass = true;
    for (i, (cfg, r)) in points.iter().zip(results).enumerate() {
        let (status, error, failed) = match r {
            Ok(checks) => {
                let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.check_id.clone()).collect();
                point_json.push(Some(crate::output::to_json(&report_doc(grid.suite, cfg, precision.as_str(), checks))?));
                (if failed.is_empty() { "pass" } else { "fail" }, None, failed)
            }
            Err(e) => {
                point_json.push(None);
                ("invalid", Some(e.clone()), Vec::new())
            }
        };
        all_pass &= status == "pass";
        docs.push(PointDoc {
            index: i,
            q: Num(cfg.q),
            n: cfg.n,
            n1: cfg.n1,
            n2: cfg.n2,
            alpha: cfg.alpha.map(Num),
            status,
            error,
            failed_checks: failed,
        });
    }
    let nums = |v: &[f64]| v.iter().map(|x| Num(*x)).collect::<Vec<_>>();
    let doc = AggregateDoc {
        meta: GridMeta {
            suite: grid.suite.as_str().to_string(),
            precision: precision.as_str().to_string(),
            points: points.len(),
            invalid_points: results.iter().filter(|r| r.is_err()).count(),
            q: nums(&grid.q),
            n: grid.n.clone(),
            n1: grid.n1.clone(),
            n2: grid.n2.clone(),
            alpha0: nums(&grid.alpha[0]),
            alpha1: nums(&grid.alpha[1]),
            alpha2: nums(&grid.alpha[2]),
        },
        points: docs,
        checks: aggregate(results),
    };
    Ok(SweepOutcome { aggregate_json: crate::output::to_json(&doc)?, point_json, all_pass })
}

/// Writes `point-NNNN.json` for every valid point and `aggregate.json`.
pub fn write_dir(dir: &Path, outcome: &SweepOutcome) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, doc) in outcome.point_json.iter().enumerate() {
        if let Some(text) = doc {
            let p = dir.join(format!("point-{i:04}.json"));
            std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    let p = dir.join("aggregate.json");
    std::fs::write(&p, &outcome.aggregate_json).with_context(|| format!("writing {}", p.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expansion_and_order() {
        let g = Grid::parse("suite = aw3\nq = 0.5, 0.8\nN = 2, 3\n").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 4);
        assert_eq!((p[0].q, p[0].n), (0.5, 2));
        assert_eq!((p[1].q, p[1].n), (0.5, 3));
        assert_eq!((p[3].q, p[3].n), (0.8, 3));
        assert!(Grid::parse("q = 0.5,,0.6").is_err());
        assert!(Grid::parse("N = -1").is_err());
        assert!(Grid::parse("zeta = 1").is_err());
    }

    #[test]
    fn aggregate_is_order_independent() {
        let mk = |r: f64, pass: bool| CheckReport {
            check_id: "x".into(),
            params: Default::default(),
            residual: r,
            tolerance: 1.0,
            pass,
            notes: String::new(),
            warning: false,
        };
        let a = vec![Ok(vec![mk(0.5, true)]), Err("bad".into()), Ok(vec![mk(2.0, false)]), Ok(vec![mk(2.0, false)])];
        let agg = aggregate(&a);
        assert_eq!(agg.len(), 1);
        assert_eq!((agg[0].residual.0, agg[0].worst_point, agg[0].failures, agg[0].pass), (2.0, 2, 2, false));
    }
}
