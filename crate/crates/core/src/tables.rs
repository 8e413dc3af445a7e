//! Tabulated values for export: q-Racah polynomials, orthogonality weights,
//! bivariate polynomials and the nine-term stencil of `L2`.

use std::str::FromStr;

use crate::aw3::AlphaParams;
use crate::error::{AwError, Result};
use crate::qcore::{Precision, QContext, Quad, Real};
use crate::qracah::{qracah_table, series_condition, weights, NormConstant, QRacahParams};
use crate::rank2::{bivariate_product_formula, build_aw2, check_dims, product_condition, stencil_rows, Aw2Options};
use crate::suite::{SuiteConfig, PROMOTION_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    QRacah,
    Bivariate,
    Weights,
    Stencil,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::QRacah => "qracah",
            TableKind::Bivariate => "bivariate",
            TableKind::Weights => "weights",
            TableKind::Stencil => "stencil",
        }
    }
}

impl FromStr for TableKind {
    type Err = AwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qracah" => Ok(TableKind::QRacah),
            "bivariate" => Ok(TableKind::Bivariate),
            "weights" => Ok(TableKind::Weights),
            "stencil" => Ok(TableKind::Stencil),
            other => Err(AwError::InvalidContext(format!(
                "table kind must be one of qracah, bivariate, weights, stencil; got `{other}`"
            ))),
        }
    }
}

/// Row-major table: each row is a run of integer labels followed by values.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub kind: TableKind,
    /// One-line description of the layout.
    pub description: String,
    pub label_columns: Vec<String>,
    pub value_columns: Vec<String>,
    pub labels: Vec<Vec<i64>>,
    pub values: Vec<Vec<f64>>,
    /// Arithmetic the values were computed in.
    pub precision: String,
}

impl Table {
    pub fn columns(&self) -> Vec<String> {
        self.label_columns.iter().chain(&self.value_columns).cloned().collect()
    }
}

struct Body {
    labels: Vec<Vec<i64>>,
    values: Vec<Vec<f64>>,
}

/// Builds a table at `cfg`. In double precision, series-based tables whose
/// error amplification exceeds [`PROMOTION_THRESHOLD`] are evaluated in
/// extended arithmetic and marked `extended (auto)`.
pub fn build_table(kind: TableKind, cfg: &SuiteConfig, precision: Precision) -> Result<Table> {
    cfg.validate()?;
    if matches!(kind, TableKind::Bivariate | TableKind::Stencil) {
        check_dims(cfg.n1, cfg.n2)?;
    }
    let (body, used) = match precision {
        Precision::Extended => (body::<Quad>(kind, cfg)?, Precision::Extended.as_str().to_string()),
        Precision::Double => {
            if condition(kind, cfg)? * f64::EPSILON > PROMOTION_THRESHOLD {
                (body::<Quad>(kind, cfg)?, "extended (auto)".to_string())
            } else {
                (body::<f64>(kind, cfg)?, Precision::Double.as_str().to_string())
            }
        }
    };
    let (n, n1, n2) = (cfg.n, cfg.n1, cfg.n2);
    let numbered = |prefix: &str, m: usize| (0..=m).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>();
    let (description, label_columns, value_columns) = match kind {
        TableKind::QRacah => (
            format!("q-Racah polynomials P(j, k): row j = grid point 0..{n}, column k = degree 0..{n}"),
            vec![],
            numbered("k", n),
        ),
        TableKind::Weights => (
            format!("orthogonality weights w(j, k) = rho(j) / h(k): row j = grid point 0..{n}, column k = degree 0..{n}"),
            vec![],
            numbered("k", n),
        ),
        TableKind::Bivariate => (
            format!("bivariate polynomials from the product formula, rows ordered by (j1, j2, k1, k2) with N1 = {n1}, N2 = {n2}"),
            vec!["j1".into(), "j2".into(), "k1".into(), "k2".into()],
            vec!["value".into()],
        ),
        TableKind::Stencil => (
            "L2 coefficients per grid state (2n1, 2n2) towards the nine stencil offsets in doubled labels".to_string(),
            vec!["2n1".into(), "2n2".into()],
            crate::rank2::STENCIL_OFFSETS.iter().map(|(a, b)| format!("c({a},{b})")).collect(),
        ),
    };
    Ok(Table { kind, description, label_columns, value_columns, labels: body.labels, values: body.values, precision: used })
}

fn condition(kind: TableKind, cfg: &SuiteConfig) -> Result<f64> {
    let ctx = QContext::<f64>::new(cfg.q)?;
    let [a0, a1, a2] = cfg.alpha;
    match kind {
        TableKind::QRacah => {
            let p = AlphaParams::finite(&ctx, a0, a1, a2, cfg.n);
            series_condition(&QRacahParams::from_alpha(&ctx, &p), cfg.n)
        }
        TableKind::Bivariate => product_condition(&ctx, &cfg.alpha, cfg.n1, cfg.n2),
        TableKind::Weights | TableKind::Stencil => Ok(1.0),
    }
}

fn body<T: Real>(kind: TableKind, cfg: &SuiteConfig) -> Result<Body> {
    let ctx = QContext::<T>::new(cfg.q)?;
    let alpha = cfg.alpha.map(T::from_f64);
    let [a0, a1, a2] = alpha;
    let matrix_rows = |m: &crate::linalg::Matrix<T>| Body {
        labels: vec![Vec::new(); m.rows()],
        values: (0..m.rows()).map(|j| (0..m.cols()).map(|k| m[(j, k)].to_f64()).collect()).collect(),
    };
    Ok(match kind {
        TableKind::QRacah => {
            let p = AlphaParams::finite(&ctx, a0, a1, a2, cfg.n);
            matrix_rows(&qracah_table(&QRacahParams::from_alpha(&ctx, &p), cfg.n)?.p)
        }
        TableKind::Weights => {
            let p = AlphaParams::finite(&ctx, a0, a1, a2, cfg.n);
            matrix_rows(&weights(&ctx, &p, cfg.n, NormConstant::Rescaled)?.w)
        }
        TableKind::Bivariate => {
            let (n1, n2) = (cfg.n1, cfg.n2);
            let mut labels = Vec::new();
            let mut values = Vec::new();
            for j1 in 0..=n1 {
                for j2 in 0..=n2 {
                    for k1 in 0..=n1 {
                        for k2 in 0..=n2 {
                            labels.push(vec![j1 as i64, j2 as i64, k1 as i64, k2 as i64]);
                            let v = bivariate_product_formula(&ctx, &alpha, n1, n2, (j1, j2, k1, k2))?;
                            values.push(vec![v.to_f64()]);
                        }
                    }
                }
            }
            Body { labels, values }
        }
        TableKind::Stencil => {
            let rep = build_aw2(&ctx, cfg.n1, cfg.n2, alpha, &Aw2Options::default())?;
            let rows = stencil_rows(&rep);
            Body {
                labels: rows.iter().map(|((t1, t2), _)| vec![*t1, *t2]).collect(),
                values: rows.iter().map(|(_, r)| r.iter().map(|x| x.to_f64()).collect()).collect(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qracah_table_is_normalised() {
        let cfg = SuiteConfig { n: 3, ..Default::default() };
        let t = build_table(TableKind::QRacah, &cfg, Precision::Double).unwrap();
        assert_eq!(t.values.len(), 4);
        assert!(t.values.iter().all(|r| r.len() == 4));
        for i in 0..4 {
            assert!((t.values[0][i] - 1.0).abs() < 1e-14);
            assert!((t.values[i][0] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn stencil_has_one_row_per_state() {
        let cfg = SuiteConfig { n1: 3, n2: 2, ..Default::default() };
        let t = build_table(TableKind::Stencil, &cfg, Precision::Double).unwrap();
        assert_eq!(t.values.len(), 12);
        assert!(t.values.iter().all(|r| r.len() == 9));
        assert_eq!(t.labels[0], vec![-5, -2]);
    }

    #[test]
    fn bivariate_ordering_is_row_major() {
        let cfg = SuiteConfig { n1: 2, n2: 1, ..Default::default() };
        let t = build_table(TableKind::Bivariate, &cfg, Precision::Extended).unwrap();
        assert_eq!(t.values.len(), 36);
        assert_eq!(t.labels[1], vec![0, 0, 0, 1]);
        assert_eq!(t.labels[35], vec![2, 1, 2, 1]);
        // Degree zero is the constant polynomial.
        for (l, v) in t.labels.iter().zip(&t.values) {
            if l[2] == 0 && l[3] == 0 {
                assert!((v[0] - 1.0).abs() < 1e-14);
            }
        }
    }
}
