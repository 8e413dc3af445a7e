//! Verification suites: each runs the module checks for one parameter
//! point and returns a flat list of [`CheckReport`]s.

use std::str::FromStr;

use crate::aw3::{
    aw_residual, aw_residual_bcd, build_rep, build_rep_with, casimir_q, casimir_value_canonical, char_poly,
    dual_roots, rep_from_roots, root_forms, spectrum_identities, structure_from_consts, AlphaParams, BnForm, DualVariant, Param,
    PolyVariable, TildeForm,
};
use crate::error::{AwError, Result};
use crate::linalg::{comm_residual, Matrix};
use crate::qcore::{Precision, QContext, Quad, Real};
use crate::qracah::{
    identity_defect, orthogonality, overlap_from_rep, qracah_table, recurrence_eval, rel_diff, rep_overlaps,
    orthogonality_amplification, series_condition, series_magnitudes, weights, weights_from_overlaps, NormConstant, QRacahParams,
};
use crate::rank2::{
    aw2_commutators, bivariate_orthogonality, check_dims, bivariate_overlaps, build_aw2, gasper_rahman_balance,
    gasper_rahman_bridge, product_condition, product_formula_defect, stencil_checks, verify_aw2_relations, Aw2Options,
    CouplingReading, MixedSign,
};
use crate::report::{params, Adjudication, CheckReport, Params};
use crate::uqsl2::{
    four_fold_check, build_irrep, build_tensor, build_twisted, commuting_pairs, embedding_residual,
    solve_embedding, special_aw_check, verify_tensor_relations, SpecialRoles, RelationSign,
    ThetaForm, TwistCoeffs,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Aw3,
    Uq,
    Rank2,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Aw3 => "aw3",
            Suite::Uq => "uq",
            Suite::Rank2 => "rank2",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = AwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aw3" => Ok(Suite::Aw3),
            "uq" => Ok(Suite::Uq),
            "rank2" => Ok(Suite::Rank2),
            "all" => Ok(Suite::All),
            other => Err(AwError::InvalidContext(format!(
                "suite must be one of aw3, uq, rank2, all; got `{other}`"
            ))),
        }
    }
}

/// One parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub q: f64,
    /// Dimension parameter of the rank-1 suite.
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub alpha: [f64; 3],
    /// Replaces every default gate tolerance.
    pub tol: Option<f64>,
    /// Relative perturbation applied to one diagonal coefficient of the
    /// rank-1 and rank-2 representations (negative control).
    pub corrupt: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            q: 0.7,
            n: 4,
            n1: 2,
            n2: 2,
            alpha: [0.3, 0.8, 0.2],
            tol: None,
            corrupt: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(AwError::InvalidContext(format!("q must satisfy 0 < q < 1, got {}", self.q)));
        }
        if self.alpha.iter().any(|a| !a.is_finite()) {
            return Err(AwError::InvalidContext("alpha0..alpha2 must be finite".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(AwError::InvalidContext(format!("tol must be positive and finite, got {t}")));
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the dimension constraints of the
    /// suites that `suite` runs.
    pub fn validate_for(&self, suite: Suite) -> Result<()> {
        self.validate()?;
        if matches!(suite, Suite::Rank2 | Suite::All) {
            check_dims(self.n1, self.n2)?;
        }
        Ok(())
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn alpha_t<T: Real>(&self) -> [T; 3] {
        self.alpha.map(T::from_f64)
    }

    /// Dimensions where competing readings can be told apart.
    fn probe_dims(&self) -> (usize, usize) {
        let a = self.n1.max(1);
        let b = self.n2.max(1);
        if a == b {
            (a, b + 1)
        } else {
            (a, b)
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn alpha_str(a: &[f64; 3]) -> String {
    format!("{},{},{}", a[0], a[1], a[2])
}

fn collect(out: &mut Vec<CheckReport>, id: &str, base: &Params, f: impl FnOnce() -> Result<Vec<CheckReport>>) {
    match f() {
        Ok(v) => out.extend(v),
        Err(e) => out.push(CheckReport::error(format!("{id}.error"), base.clone(), e)),
    }
}

fn or_inf(r: Result<f64>) -> f64 {
    match r {
        Ok(x) if x.is_finite() => x,
        _ => f64::INFINITY,
    }
}

fn rel_gap<T: Real>(a: T, b: T) -> f64 {
    ((a - b).abs() / a.abs().max(b.abs()).max(T::one())).to_f64()
}

/// Runs a suite at the requested precision.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig, precision: Precision) -> Result<Vec<CheckReport>> {
    cfg.validate_for(suite)?;
    Ok(match precision {
        Precision::Double => run_typed::<f64>(suite, cfg),
        Precision::Extended => run_typed::<Quad>(suite, cfg),
    })
}

fn run_typed<T: Real>(suite: Suite, cfg: &SuiteConfig) -> Vec<CheckReport> {
    Group::ALL
        .iter()
        .filter(|g| suite == Suite::All || g.suite() == suite)
        .flat_map(|g| run_group::<T>(*g, cfg))
        .collect()
}

/// Independently runnable slice of a suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Aw3,
    QRacah,
    UqSingle,
    UqTensor,
    UqSolver,
    UqSpecial,
    UqFourFold,
    Rank2Algebra,
    Rank2Adjudicate,
    Bivariate,
    GasperRahman,
}

impl Group {
    pub const ALL: [Group; 11] = [
        Group::Aw3,
        Group::QRacah,
        Group::UqSingle,
        Group::UqTensor,
        Group::UqSolver,
        Group::UqSpecial,
        Group::UqFourFold,
        Group::Rank2Algebra,
        Group::Rank2Adjudicate,
        Group::Bivariate,
        Group::GasperRahman,
    ];

    pub fn suite(self) -> Suite {
        match self {
            Group::Aw3 | Group::QRacah => Suite::Aw3,
            Group::UqSingle | Group::UqTensor | Group::UqSolver | Group::UqSpecial | Group::UqFourFold => Suite::Uq,
            _ => Suite::Rank2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Aw3 => "aw3",
            Group::QRacah => "qracah",
            Group::UqSingle => "uq.single",
            Group::UqTensor => "uq.tensor",
            Group::UqSolver => "uq.solver",
            Group::UqSpecial => "uq.special",
            Group::UqFourFold => "uq.four_fold",
            Group::Rank2Algebra => "rank2.algebra",
            Group::Rank2Adjudicate => "rank2.adjudicate",
            Group::Bivariate => "rank2.bivariate",
            Group::GasperRahman => "rank2.gasper_rahman",
        }
    }
}

fn base_params<T: Real>(suite: Suite, cfg: &SuiteConfig) -> Params {
    let mut p = params([("q", fmt(cfg.q)), ("alpha", alpha_str(&cfg.alpha)), ("precision", T::NAME.to_string())]);
    if suite == Suite::Aw3 {
        p.insert("N".into(), cfg.n.to_string());
    } else {
        p.insert("N1".into(), cfg.n1.to_string());
        p.insert("N2".into(), cfg.n2.to_string());
    }
    p
}

/// Runs one group; failures to compute become failing checks named
/// `<group>.error`.
pub fn run_group<T: Real>(group: Group, cfg: &SuiteConfig) -> Vec<CheckReport> {
    let base = base_params::<T>(group.suite(), cfg);
    let ctx = match QContext::<T>::new(cfg.q) {
        Ok(c) => c,
        Err(e) => return vec![CheckReport::error(format!("{}.context", group.name()), base, e)],
    };
    let mut out = Vec::new();
    let b = &base;
    collect(&mut out, group.name(), b, || match group {
        Group::Aw3 => aw3_checks(&ctx, cfg, b),
        Group::QRacah => with_promotion::<T>(cfg, b, |c, b| qracah_checks(c, cfg, b), |c, b| qracah_checks(c, cfg, b)),
        Group::UqSingle => uq_single(&ctx, cfg, b),
        Group::UqTensor => uq_tensor(&ctx, cfg, b),
        Group::UqSolver => uq_solver(cfg, b),
        Group::UqSpecial => uq_special(&ctx, cfg, b),
        Group::UqFourFold => uq_four_fold(&ctx, cfg, b),
        Group::Rank2Algebra => rank2_algebra(&ctx, cfg, b),
        Group::Rank2Adjudicate => rank2_adjudicate(&ctx, cfg, b),
        Group::Bivariate => with_promotion::<T>(cfg, b, |c, b| rank2_bivariate(c, cfg, b), |c, b| rank2_bivariate(c, cfg, b)),
        Group::GasperRahman => {
            with_promotion::<T>(cfg, b, |c, b| rank2_gasper_rahman(c, cfg, b), |c, b| rank2_gasper_rahman(c, cfg, b))
        }
    });
    out
}

fn perturb<T: Real>(m: &mut Matrix<T>, delta: f64) {
    let i = m.rows() / 2;
    let v = m[(i, i)];
    m[(i, i)] = v + T::from_f64(delta) * v.abs().max(T::one());
}

/// Error amplification above which series-based checks are rerun in
/// extended arithmetic: with an amplification factor `κ`, double rounding
/// contributes about `κ·2⁻⁵²`, which must stay far below the tightest gate.
pub const PROMOTION_THRESHOLD: f64 = 1e-11;

type Checks = Result<(Vec<CheckReport>, f64)>;

/// Runs `native`, which also returns its a-priori error amplification; in
/// double precision an amplification above [`PROMOTION_THRESHOLD`] reruns
/// the group through `extended`.
fn with_promotion<T: Real>(
    cfg: &SuiteConfig,
    base: &Params,
    native: impl FnOnce(&QContext<T>, &Params) -> Checks,
    extended: impl FnOnce(&QContext<Quad>, &Params) -> Checks,
) -> Result<Vec<CheckReport>> {
    let (reports, cond) = native(&QContext::new(cfg.q)?, base)?;
    if T::DIGITS >= 30 || cond * f64::EPSILON <= PROMOTION_THRESHOLD {
        return Ok(reports);
    }
    let mut b = base.clone();
    b.insert("precision".into(), "extended (auto)".into());
    let note = format!("series condition number {cond:.2e}; evaluated in extended arithmetic");
    Ok(extended(&QContext::new(cfg.q)?, &b)?
        .0
        .into_iter()
        .map(|mut r| {
            r.notes = if r.notes.is_empty() { note.clone() } else { format!("{} | {note}", r.notes) };
            r
        })
        .collect())
}

fn aw3_checks<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let [a0, a1, a2] = cfg.alpha_t::<T>();
    let n = cfg.n;
    let p = AlphaParams::finite(ctx, a0, a1, a2, n);
    let mut rep = build_rep(ctx, &p, n)?;
    if let Some(d) = cfg.corrupt {
        perturb(&mut rep.l, d);
    }
    let consts = p.consts(ctx);
    let sc: [Param<T>; 6] = consts.map(Param::Scalar);
    let mut out = Vec::new();

    let rel = aw_residual(ctx, &rep.k, &rep.l, &sc)?.max_rel();
    out.push(CheckReport::gate("aw3.relations", base.clone(), rel, cfg.tol(1e-10)));
    if T::DIGITS >= 30 {
        let digits = if rel > 0.0 { -rel.log10() } else { f64::from(T::DIGITS) };
        out.push(
            CheckReport::gate("precision.extended_digits", base.clone(), rel, 1e-30)
                .with_notes(format!("about {digits:.1} significant digits in the relation residual")),
        );
    }

    let scale = rep.a_seq.iter().fold(T::one(), |m, a| m.max(*a * *a));
    let boundary = rep.boundary_sq.iter().fold(T::zero(), |m, b| m.max(b.abs())) / scale;
    out.push(CheckReport::gate("aw3.boundary", base.clone(), boundary.to_f64(), cfg.tol(1e-10)));

    let sh2 = ctx.sh(2.0);
    let spec = spectrum_identities(ctx, &rep.lambda, -(sh2 * sh2));
    out.push(CheckReport::gate("aw3.spectrum", base.clone(), spec, cfg.tol(1e-10)));

    let s = p.structure(ctx);
    let qm = casimir_q(ctx, &rep.k, &rep.l, &s)?;
    let q0 = qm[(0, 0)];
    let scalar = ((&qm - &Matrix::scalar(n + 1, q0)).norm() / qm.norm().max(T::one())).to_f64();
    let commutes = comm_residual(&qm, &rep.k)?.max(comm_residual(&qm, &rep.l)?);
    out.push(CheckReport::gate("aw3.casimir.commutes", base.clone(), commutes.max(scalar), cfg.tol(1e-10)));
    let poly_form = rel_gap(casimir_value_canonical(ctx, &consts), q0);
    out.push(CheckReport::gate("aw3.casimir.closed_form", base.clone(), poly_form, cfg.tol(1e-9)));
    let rf = root_forms(ctx, &p.roots());
    let roots_gap = rel_gap(rf.b, s.b).max(rel_gap(rf.d0, s.d0)).max(rel_gap(rf.d1, s.d1));
    out.push(CheckReport::gate("aw3.root_forms", base.clone(), roots_gap, cfg.tol(1e-10)));
    let root_gap = rel_gap(rf.q0, q0);
    out.push(CheckReport::warning(
        "aw3.casimir.root_form",
        base.clone(),
        root_gap,
        1e-9,
        if root_gap <= 1e-9 {
            "root-form Casimir value agrees with the matrix Casimir".into()
        } else {
            format!("root-form Casimir value {:.6e} disagrees with the matrix Casimir {:.6e}", rf.q0.to_f64(), q0.to_f64())
        },
    ));

    // Competing readings are scored on the probe dimension so that they
    // differ even for N = 0.
    let np = n.max(1);
    let pp = AlphaParams::finite(ctx, a0, a1, a2, np);
    let psc: [Param<T>; 6] = pp.consts(ctx).map(Param::Scalar);
    let ps = pp.structure(ctx);
    let probe = {
        let mut b = base.clone();
        b.insert("probe_N".into(), np.to_string());
        b
    };
    let mut diag = Adjudication::new("aw3.adjudicate.diagonal", 1e-9);
    for (name, form) in [("corrected", BnForm::Corrected), ("literal", BnForm::Literal)] {
        let r = build_rep_with(ctx, &pp, np, form).and_then(|r| aw_residual(ctx, &r.k, &r.l, &psc).map(|x| x.max_rel()));
        diag = diag.candidate(name, or_inf(r));
    }
    out.push(diag.to_report(probe.clone()));

    let prep = build_rep(ctx, &pp, np)?;
    let pq0 = casimir_q(ctx, &prep.k, &prep.l, &ps)?[(0, 0)];
    let cp = char_poly(ctx, &ps, pq0);
    let mut var = Adjudication::new("aw3.adjudicate.char_poly_variable", 1e-9);
    for v in PolyVariable::ALL {
        let worst = pp.roots().iter().map(|&r| cp.rel_eval(v.image(ctx, r))).fold(0.0, f64::max);
        var = var.candidate(v.name(), worst);
    }
    out.push(var.to_report(probe.clone()));

    let mut dual = Adjudication::new("aw3.adjudicate.dual_root_s3", 1e-9);
    for v in DualVariant::ALL {
        let sr = dual_roots(&pp.roots(), v);
        let r = rep_from_roots(ctx, &sr, np, ps.b, ps.d0).and_then(|(d, t)| aw_residual_bcd(ctx, &t, &d, &ps).map(|x| x.max_rel()));
        dual = dual.candidate(v.name(), or_inf(r));
    }
    out.push(dual.to_report(probe));
    Ok(out)
}

fn qracah_checks<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Checks {
    let [a0, a1, a2] = cfg.alpha_t::<T>();
    let n = cfg.n;
    let p = AlphaParams::finite(ctx, a0, a1, a2, n);
    let mut rep = build_rep(ctx, &p, n)?;
    if let Some(d) = cfg.corrupt {
        perturb(&mut rep.l, d);
    }
    let qp = QRacahParams::from_alpha(ctx, &p);
    let ser = qracah_table(&qp, n)?;
    let rec = recurrence_eval(ctx, &p, n)?;
    let from_rep = overlap_from_rep(ctx, &rep)?;
    let triple = rec.rel_diff(&ser).max(from_rep.rel_diff(&ser)).max(rec.rel_diff(&from_rep));
    let mut out = vec![CheckReport::gate("qracah.triple", base.clone(), triple, cfg.tol(1e-8))];

    let w = weights(ctx, &p, n, NormConstant::Rescaled)?;
    let orth = identity_defect(&orthogonality(&w.w, &ser));
    if w.positive {
        out.push(CheckReport::gate("qracah.orthogonality", base.clone(), orth, cfg.tol(1e-9)));
    } else {
        out.push(CheckReport::warning(
            "qracah.orthogonality",
            base.clone(),
            orth,
            cfg.tol(1e-9),
            "weights not all positive; raw orthogonality defect reported".into(),
        ));
    }
    out.push(CheckReport::warning(
        "qracah.weight_positivity",
        base.clone(),
        0.0,
        0.0,
        if w.positive { "all weights positive".into() } else { "some weights are not positive".into() },
    ));
    let from_vectors = weights_from_overlaps(&rep_overlaps(ctx, &rep)?);
    out.push(CheckReport::gate(
        "qracah.weights_from_vectors",
        base.clone(),
        rel_diff(&from_vectors, &w.w),
        cfg.tol(1e-8),
    ));

    let mut norm = Adjudication::new("qracah.adjudicate.norm_constant", 1e-9);
    for which in NormConstant::ALL {
        let r = weights(ctx, &p, n, which).map(|w| identity_defect(&orthogonality(&w.w, &ser)));
        norm = norm.candidate(which.name(), or_inf(r));
    }
    out.push(norm.to_report(base.clone()));

    let sw = AlphaParams { alpha: [p.alpha[1], p.alpha[0], -p.alpha[2], p.alpha[3]], ..p };
    let dual = qracah_table(&QRacahParams::from_alpha(ctx, &sw), n)?;
    out.push(CheckReport::gate(
        "qracah.duality",
        base.clone(),
        rel_diff(&ser.p.transpose(), &dual.p),
        cfg.tol(1e-9),
    ));
    let mag = series_magnitudes(&qp, n)?;
    let cond = series_condition(&qp, n)?
        .max(series_condition(&QRacahParams::from_alpha(ctx, &sw), n)?)
        .max(orthogonality_amplification(&w.w, &ser.p, &mag));
    Ok((out, cond))
}

/// Coefficient sets exercised by the quantum-group suite.
pub fn uq_coefficient_sets<T: Real>(ctx: &QContext<T>, alpha: &[T; 3]) -> Vec<(&'static str, TwistCoeffs<T>)> {
    let f = T::from_f64;
    vec![
        ("canonical", TwistCoeffs::canonical(ctx, alpha[0], alpha[1], alpha[2], f(1.3))),
        (
            "generic",
            TwistCoeffs { a_e: f(0.8), a_f: f(-1.3), a_s: f(0.4), b_e: f(1.1), b_f: f(0.6), b_t: f(-0.7) },
        ),
    ]
}

fn uq_single<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let alpha = cfg.alpha_t::<T>();
    let mut dims = vec![cfg.n1, cfg.n2];
    dims.dedup();
    let mut irrep = 0.0_f64;
    let mut emb = 0.0_f64;
    for &n in &dims {
        let r = build_irrep(ctx, n);
        irrep = r.relation_residuals(ctx)?.iter().fold(irrep, |m, x| m.max(*x));
        for (_, c) in uq_coefficient_sets(ctx, &alpha) {
            emb = emb.max(embedding_residual(ctx, &r, &c)?);
        }
    }
    Ok(vec![
        CheckReport::gate("uq.irrep.relations", base.clone(), irrep, cfg.tol(1e-10)),
        CheckReport::gate("uq.embedding.matrix_omega", base.clone(), emb, cfg.tol(1e-10)),
    ])
}

fn uq_tensor<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let alpha = cfg.alpha_t::<T>();
    let r1 = build_irrep(ctx, cfg.n1);
    let r2 = build_irrep(ctx, cfg.n2);
    let mut out = Vec::new();
    for (name, c) in uq_coefficient_sets(ctx, &alpha) {
        let mut p = base.clone();
        p.insert("coeffs".into(), name.into());
        let g = build_tensor(ctx, &r1, &r2, &c);
        let scale = g.d_omega.norm().max(T::one());
        let co = [
            (&g.d_omega - &g.d_omega_gen).norm(),
            (&g.d_yk - &g.d_yk_gen).norm(),
            (&g.d_yl - &g.d_yl_gen).norm(),
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max((*x / scale).to_f64()));
        out.push(CheckReport::gate("uq.coproducts", p.clone(), co, cfg.tol(1e-10)));
        let rows = verify_tensor_relations(ctx, &g, &c, ThetaForm::Symmetric, RelationSign::Minus)?;
        let mut loc = 0.0_f64;
        for (i, row) in rows.iter().enumerate() {
            out.push(
                CheckReport::gate(format!("uq.tensor.relation{}", i + 1), p.clone(), row.relation, cfg.tol(1e-10))
                    .with_notes(row.label),
            );
            loc = loc.max(row.locality);
        }
        out.push(CheckReport::gate("uq.tensor.locality", p.clone(), loc, cfg.tol(1e-10)));
        for (i, (label, r)) in commuting_pairs(&g)?.into_iter().enumerate() {
            out.push(
                CheckReport::gate(format!("uq.commuting.pair{}", i + 1), p.clone(), r, cfg.tol(1e-10))
                    .with_notes(label),
            );
        }
    }

    let (n1, n2) = cfg.probe_dims();
    let mut probe = base.clone();
    probe.insert("probe_N1".into(), n1.to_string());
    probe.insert("probe_N2".into(), n2.to_string());
    let (_, c) = uq_coefficient_sets(ctx, &alpha).remove(1);
    let g = build_tensor(ctx, &build_irrep(ctx, n1), &build_irrep(ctx, n2), &c);
    let worst = |theta, sign| -> f64 {
        or_inf(verify_tensor_relations(ctx, &g, &c, theta, sign).map(|rows| rows.iter().map(|r| r.relation).fold(0.0, f64::max)))
    };
    let mut sign = Adjudication::new("uq.adjudicate.relation_sign", 1e-10);
    for s in RelationSign::ALL {
        sign = sign.candidate(s.name(), worst(ThetaForm::Symmetric, s));
    }
    out.push(sign.to_report(probe.clone()));
    let mut theta = Adjudication::new("uq.adjudicate.theta_form", 1e-10);
    for t in [ThetaForm::Symmetric, ThetaForm::SingleTerm] {
        theta = theta.candidate(t.name(), worst(t, RelationSign::Minus));
    }
    out.push(theta.to_report(probe));
    Ok(out)
}

fn uq_solver(cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let ctx = QContext::<f64>::new(cfg.q)?;
    let mut out = Vec::new();
    let om0 = ctx.ch(cfg.n1 as f64 + 1.0);
    for (name, c) in uq_coefficient_sets(&ctx, &cfg.alpha) {
        let mut p = base.clone();
        p.insert("coeffs".into(), name.into());
        let s = structure_from_consts(&ctx, &[c.a_s, c.b_t, c.theta(&ctx), om0, c.b_e * c.b_f, c.a_e * c.a_f]);
        let r = match solve_embedding(&ctx, &s, om0) {
            Ok(sols) => sols
                .iter()
                .map(|x| {
                    let da = (x.a_s - c.a_s).abs() / c.a_s.abs().max(1.0);
                    let db = (x.b_t - c.b_t).abs() / c.b_t.abs().max(1.0);
                    da.max(db).max(x.residual)
                })
                .fold(f64::INFINITY, f64::min),
            Err(e) => {
                out.push(CheckReport::error("uq.solver.round_trip", p, e));
                continue;
            }
        };
        out.push(CheckReport::gate("uq.solver.round_trip", p, r, cfg.tol(1e-8)));
    }
    let excluded = crate::aw3::AwStructure { b: 0.0, c0: 0.0, c1: 0.0, d0: 0.0, d1: 1.0 };
    let res = solve_embedding(&ctx, &excluded, om0);
    let ok = matches!(res, Err(AwError::NoSolution(_)));
    out.push(
        CheckReport::gate("uq.solver.excluded", base.clone(), if ok { 0.0 } else { 1.0 }, 0.0)
            .with_notes("B = C0 = C1 = D0 = 0, D1 != 0 must report no solution"),
    );
    Ok(out)
}

fn uq_special<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let f = T::from_f64;
    let [a0, a1, _] = cfg.alpha_t::<T>();
    let c = TwistCoeffs::special(ctx, f(0.9), f(1.7), ctx.sinh_q(a0), ctx.sinh_q(a1));
    let n = cfg.n1;
    let r = build_irrep(ctx, n);
    let (yk, yl) = build_twisted(ctx, &r, &c);
    let om0 = ctx.ch(n as f64 + 1.0);
    let sw = special_aw_check(ctx, &yk, &yl, &c, om0, SpecialRoles::Swapped)?;
    let mut out = vec![
        CheckReport::gate("uq.special.cyclic", base.clone(), sw.cyclic[0].max(sw.cyclic[1]), cfg.tol(1e-10)),
        CheckReport::gate(
            "uq.special.casimir",
            base.clone(),
            (sw.affine - sw.casimir).abs() / sw.casimir.abs().max(1.0),
            cfg.tol(1e-9),
        ),
    ];
    let np = n.max(1);
    let rp = build_irrep(ctx, np);
    let (pk, pl) = build_twisted(ctx, &rp, &c);
    let pom = ctx.ch(np as f64 + 1.0);
    let mut probe = base.clone();
    probe.insert("probe_N".into(), np.to_string());
    let mut roles = Adjudication::new("uq.adjudicate.special_roles", 1e-10);
    for role in SpecialRoles::ALL {
        let r = special_aw_check(ctx, &pk, &pl, &c, pom, role).map(|x| x.cyclic[0].max(x.cyclic[1]));
        roles = roles.candidate(role.name(), or_inf(r));
    }
    out.push(roles.to_report(probe));
    Ok(out)
}

fn uq_four_fold<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let alpha = cfg.alpha_t::<T>();
    let (_, c) = uq_coefficient_sets(ctx, &alpha).remove(1);
    let one = T::one();
    let g = build_tensor(ctx, &build_irrep(ctx, cfg.n1), &build_irrep(ctx, cfg.n2), &c);
    let main = four_fold_check(ctx, &g, &c, one, -one)?;
    let mut out = vec![CheckReport::gate("uq.four_fold.relation", base.clone(), main.main, cfg.tol(1e-9))];
    let sib = main.siblings[0].max(main.siblings[1]);
    out.push(CheckReport::warning(
        "uq.four_fold.siblings",
        base.clone(),
        sib,
        1e-9,
        "cyclic companions of the extra relation, reported for information".into(),
    ));

    let (n1, n2) = cfg.probe_dims();
    let mut probe = base.clone();
    probe.insert("probe_N1".into(), n1.to_string());
    probe.insert("probe_N2".into(), n2.to_string());
    let gp = build_tensor(ctx, &build_irrep(ctx, n1), &build_irrep(ctx, n2), &c);
    let bumped = four_fold_check(ctx, &gp, &c, T::from_f64(1.01), -one)?.main;
    out.push(CheckReport::exceeds("uq.four_fold.beta_power", probe.clone(), bumped, 1e-3));
    let mut sign = Adjudication::new("uq.adjudicate.four_fold_theta_sign", 1e-9);
    for (name, s) in [("-theta", -one), ("+theta", one)] {
        sign = sign.candidate(name, or_inf(four_fold_check(ctx, &gp, &c, one, s).map(|r| r.main)));
    }
    out.push(sign.to_report(probe));
    Ok(out)
}

fn rank2_algebra<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let opts = Aw2Options { corrupt: cfg.corrupt, ..Default::default() };
    let rep = build_aw2(ctx, cfg.n1, cfg.n2, cfg.alpha_t(), &opts)?;
    let mut out = Vec::new();
    let mut loc = 0.0_f64;
    for r in verify_aw2_relations(ctx, &rep, MixedSign::Minus)? {
        out.push(CheckReport::gate(format!("rank2.relation.{}", r.id), base.clone(), r.relation, cfg.tol(1e-9)));
        loc = loc.max(r.locality);
    }
    out.push(CheckReport::gate("rank2.locality", base.clone(), loc, cfg.tol(1e-9)));
    for (i, (label, r)) in aw2_commutators(&rep)?.into_iter().enumerate() {
        out.push(
            CheckReport::gate(format!("rank2.commutator{}", i + 1), base.clone(), r, cfg.tol(1e-9)).with_notes(label),
        );
    }
    let st = stencil_checks(&rep);
    out.push(CheckReport::gate("rank2.stencil.off_stencil", base.clone(), st.off_stencil, cfg.tol(1e-12)));
    out.push(CheckReport::gate(
        "rank2.stencil.projector",
        base.clone(),
        st.projector_k1.max(st.projector_k2),
        cfg.tol(1e-12),
    ));
    out.push(CheckReport::gate("rank2.stencil.m2_band", base.clone(), st.m2_band, cfg.tol(1e-12)));
    out.push(CheckReport::gate("rank2.stencil.l1_band", base.clone(), st.l1_band, cfg.tol(1e-12)));
    out.push(CheckReport::gate("rank2.e_consistency", base.clone(), st.e_consistency, cfg.tol(1e-10)));
    out.push(CheckReport::gate("rank2.boundary", base.clone(), st.boundary, cfg.tol(1e-12)));
    Ok(out)
}

fn rank2_adjudicate<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Result<Vec<CheckReport>> {
    let (n1, n2) = cfg.probe_dims();
    let mut probe = base.clone();
    probe.insert("probe_N1".into(), n1.to_string());
    probe.insert("probe_N2".into(), n2.to_string());
    let alpha = cfg.alpha_t::<T>();
    let score = |opts: Aw2Options, sign: MixedSign| -> f64 {
        or_inf(build_aw2(ctx, n1, n2, alpha, &opts).and_then(|rep| {
            let rel = verify_aw2_relations(ctx, &rep, sign)?;
            Ok(rel.iter().map(|r| r.relation.max(r.locality)).fold(rep.e_consistency, f64::max))
        }))
    };
    let mut out = Vec::new();
    let mut coupling = Adjudication::new("rank2.adjudicate.coupling_constant", 1e-9);
    for c in CouplingReading::ALL {
        coupling = coupling.candidate(c.name(), score(Aw2Options { coupling: c, ..Default::default() }, MixedSign::Minus));
    }
    out.push(coupling.to_report(probe.clone()));
    let mut tilde = Adjudication::new("rank2.adjudicate.m2_coefficient", 1e-9);
    for (name, t) in [("-a^2(a0,-a2,-a1,a3)", TildeForm::Reflected), ("-a^2(a0,a2,a1,a3) literal", TildeForm::Literal)] {
        tilde = tilde.candidate(name, score(Aw2Options { tilde: t, ..Default::default() }, MixedSign::Minus));
    }
    out.push(tilde.to_report(probe.clone()));
    let mut sign = Adjudication::new("rank2.adjudicate.mixed_sign", 1e-9);
    for s in MixedSign::ALL {
        sign = sign.candidate(s.name(), score(Aw2Options::default(), s));
    }
    out.push(sign.to_report(probe));
    Ok(out)
}

fn rank2_bivariate<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Checks {
    let opts = Aw2Options { corrupt: cfg.corrupt, ..Default::default() };
    let alpha = cfg.alpha_t::<T>();
    let rep = build_aw2(ctx, cfg.n1, cfg.n2, alpha, &opts)?;
    let t = bivariate_overlaps(ctx, &rep)?;
    let mut out = vec![
        CheckReport::gate("rank2.bivariate.global_basis", base.clone(), t.global_mismatch, cfg.tol(1e-8)),
        CheckReport::gate(
            "rank2.bivariate.product_formula",
            base.clone(),
            product_formula_defect(ctx, &t, &alpha)?,
            cfg.tol(1e-7),
        ),
    ];
    let o = bivariate_orthogonality(ctx, &t, &alpha)?;
    if o.positive {
        out.push(CheckReport::gate("rank2.bivariate.orthogonality", base.clone(), o.identity_defect, cfg.tol(1e-8)));
    } else {
        out.push(CheckReport::warning(
            "rank2.bivariate.orthogonality",
            base.clone(),
            o.identity_defect,
            cfg.tol(1e-8),
            "product weight not positive; raw defect reported".into(),
        ));
    }
    out.push(CheckReport::warning(
        "rank2.bivariate.weight_positivity",
        base.clone(),
        0.0,
        0.0,
        if o.positive { "all weights positive".into() } else { "some weights are not positive".into() },
    ));
    out.push(CheckReport::gate("rank2.bivariate.weight_oracle", base.clone(), o.weight_oracle, cfg.tol(1e-7)));
    let cond = product_condition(ctx, &alpha, cfg.n1, cfg.n2)?.max(o.amplification);
    Ok((out, cond))
}

fn rank2_gasper_rahman<T: Real>(ctx: &QContext<T>, cfg: &SuiteConfig, base: &Params) -> Checks {
    let alpha = cfg.alpha_t::<T>();
    let g = gasper_rahman_bridge(ctx, &alpha, cfg.n1, cfg.n2)?;
    let checks = vec![
        CheckReport::gate(
            "rank2.gasper_rahman.balance",
            base.clone(),
            gasper_rahman_balance(ctx, &alpha, cfg.n1, cfg.n2),
            cfg.tol(1e-10),
        ),
        CheckReport::gate("rank2.gasper_rahman.ratio_spread", base.clone(), g.max_spread(), cfg.tol(1e-8)),
    ];
    Ok((checks, g.amplification))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failing(r: &[CheckReport]) -> Vec<String> {
        r.iter().filter(|c| !c.pass).map(|c| format!("{} {:e} {}", c.check_id, c.residual, c.notes)).collect()
    }

    #[test]
    fn default_point_passes() {
        let r = run_suite(Suite::All, &SuiteConfig::default(), Precision::Double).unwrap();
        assert!(failing(&r).is_empty(), "{:#?}", failing(&r));
        assert!(r.iter().any(|c| c.check_id == "aw3.casimir.root_form" && c.warning));
    }

    #[test]
    fn corruption_fails_named_checks() {
        let cfg = SuiteConfig { corrupt: Some(1e-3), ..Default::default() };
        let r = run_suite(Suite::All, &cfg, Precision::Double).unwrap();
        let f = failing(&r);
        assert!(f.iter().any(|x| x.starts_with("rank2.relation")), "{f:?}");
        assert!(f.iter().any(|x| x.starts_with("aw3.relations")), "{f:?}");
    }

    #[test]
    fn rejects_bad_q() {
        let cfg = SuiteConfig { q: 1.2, ..Default::default() };
        let e = run_suite(Suite::Aw3, &cfg, Precision::Double).unwrap_err();
        assert!(e.to_string().contains("0 < q < 1"));
    }

    #[test]
    fn zero_dimensions_still_resolve() {
        let cfg = SuiteConfig { n: 0, n1: 0, n2: 0, ..Default::default() };
        let r = run_suite(Suite::All, &cfg, Precision::Double).unwrap();
        assert!(failing(&r).is_empty(), "{:#?}", failing(&r));
    }

    #[test]
    fn collapsed_rank2_grid_is_a_usage_error() {
        let cfg = SuiteConfig { n1: 0, n2: 3, ..Default::default() };
        assert!(run_suite(Suite::Rank2, &cfg, Precision::Double).is_err());
        assert!(run_suite(Suite::Uq, &cfg, Precision::Double).is_ok());
    }
}
