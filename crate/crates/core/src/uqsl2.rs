//! Finite irreducible representations of U_q(sl2), twisted primitive
//! elements, two-fold coproducts and the relation checks built on them.

use crate::aw3::{aw_residual, aw_residual_bcd, casimir_q, structure_from_consts, AwStructure, Param};
use crate::error::{AwError, Result};
use crate::linalg::{comm_residual, poly, qcomm, rel_residual, Matrix};
use crate::qcore::{QContext, Real};

/// Matrices of the `(N+1)`-dimensional irreducible representation.
#[derive(Clone, Debug)]
pub struct UqIrrep<T> {
    pub n: usize,
    pub k: Matrix<T>,
    pub k_inv: Matrix<T>,
    pub e: Matrix<T>,
    pub f: Matrix<T>,
}

/// Weight basis `K̂ = diag q^{N/2−i}` with ladder entries
/// `√([i+1][N−i])`.
pub fn build_irrep<T: Real>(ctx: &QContext<T>, n: usize) -> UqIrrep<T> {
    let d = n + 1;
    let half = T::from_f64(n as f64 / 2.0);
    let w: Vec<T> = (0..d).map(|i| ctx.pow(half - T::from_i64(i as i64))).collect();
    let k = Matrix::from_diag(&w);
    let k_inv = Matrix::from_diag(&w.iter().map(|&x| T::one() / x).collect::<Vec<_>>());
    let mut e = Matrix::zeros(d, d);
    let mut f = Matrix::zeros(d, d);
    for i in 0..n {
        let v = (ctx.qbracket(T::from_i64(i as i64 + 1)) * ctx.qbracket(T::from_i64((n - i) as i64))).sqrt();
        e[(i, i + 1)] = v;
        f[(i + 1, i)] = v;
    }
    UqIrrep { n, k, k_inv, e, f }
}

impl<T: Real> UqIrrep<T> {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Relative residuals of `K̂K̂⁻¹ = 1`, `K̂Ê = qÊK̂`, `K̂F̂ = q⁻¹F̂K̂` and
    /// `ÊF̂ − F̂Ê = (K̂² − K̂⁻²)/(q − q⁻¹)`.
    pub fn relation_residuals(&self, ctx: &QContext<T>) -> Result<[f64; 4]> {
        let q = ctx.q();
        let id = Matrix::identity(self.dim());
        let kk = &self.k * &self.k;
        let kki = &self.k_inv * &self.k_inv;
        let scale = T::one() / (q - T::one() / q);
        Ok([
            rel_residual(&[&self.k * &self.k_inv, -&id])?,
            rel_residual(&[&self.k * &self.e, -&(&self.e * &self.k).scale(q)])?,
            rel_residual(&[&self.k * &self.f, -&(&self.f * &self.k).scale(T::one() / q)])?,
            rel_residual(&[
                &self.e * &self.f,
                -&(&self.f * &self.e),
                kk.scale(-scale),
                kki.scale(scale),
            ])?,
        ])
    }
}

/// `Ω = q⁻¹K̂² + qK̂⁻² + sinh_q(1)² ÊF̂`.
pub fn casimir_omega<T: Real>(ctx: &QContext<T>, r: &UqIrrep<T>) -> Matrix<T> {
    let q = ctx.q();
    (&r.k * &r.k).scale(T::one() / q) + (&r.k_inv * &r.k_inv).scale(q) + (&r.e * &r.f).scale(ctx.s1sq())
}

/// `Ω = qK̂² + q⁻¹K̂⁻² + sinh_q(1)² F̂Ê`.
pub fn casimir_omega_fe<T: Real>(ctx: &QContext<T>, r: &UqIrrep<T>) -> Matrix<T> {
    let q = ctx.q();
    (&r.k * &r.k).scale(q) + (&r.k_inv * &r.k_inv).scale(T::one() / q) + (&r.f * &r.e).scale(ctx.s1sq())
}

/// Coefficients of the twisted primitive elements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistCoeffs<T> {
    pub a_e: T,
    pub a_f: T,
    pub a_s: T,
    pub b_e: T,
    pub b_f: T,
    pub b_t: T,
}

/// How the scalar `θ` is formed from the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaForm {
    /// `−(aE·bF + aF·bE)/sinh_q(1)²`.
    Symmetric,
    /// `−aE·bF/sinh_q(1)²`.
    SingleTerm,
}

impl ThetaForm {
    pub const ALL: [ThetaForm; 2] = [ThetaForm::Symmetric, ThetaForm::SingleTerm];

    pub fn name(self) -> &'static str {
        match self {
            ThetaForm::Symmetric => "theta = -(aE*bF + aF*bE)/sinh_q(1)^2",
            ThetaForm::SingleTerm => "theta = -aE*bF/sinh_q(1)^2",
        }
    }
}

impl<T: Real> TwistCoeffs<T> {
    pub fn theta(&self, ctx: &QContext<T>) -> T {
        self.theta_with(ctx, ThetaForm::Symmetric)
    }

    pub fn theta_with(&self, ctx: &QContext<T>, form: ThetaForm) -> T {
        let s = ctx.s1sq();
        match form {
            ThetaForm::Symmetric => -(self.a_e * self.b_f + self.a_f * self.b_e) / s,
            ThetaForm::SingleTerm => -(self.a_e * self.b_f) / s,
        }
    }

    /// `aE = t sinh_q(1)`, `aF = sinh_q(1)/t`, `bE = s sinh_q(1)`,
    /// `bF = sinh_q(1)/s`, with `t/s = −q^{α2}`, so that
    /// `θ = cosh_q(α2)`, `aE·aF = bE·bF = sinh_q(1)²`.
    pub fn canonical(ctx: &QContext<T>, alpha0: T, alpha1: T, alpha2: T, t: T) -> Self {
        let sh1 = ctx.sh(1.0);
        let s = -t / ctx.pow(alpha2);
        TwistCoeffs {
            a_e: t * sh1,
            a_f: sh1 / t,
            a_s: ctx.sinh_q(alpha0),
            b_e: s * sh1,
            b_f: sh1 / s,
            b_t: ctx.sinh_q(alpha1),
        }
    }

    /// Same as [`TwistCoeffs::canonical`] but with `aF`, `bF` negated so
    /// that `aE·aF = bE·bF = −sinh_q(1)²`.
    pub fn special(ctx: &QContext<T>, t: T, s: T, a_s: T, b_t: T) -> Self {
        let sh1 = ctx.sh(1.0);
        TwistCoeffs {
            a_e: t * sh1,
            a_f: -sh1 / t,
            a_s,
            b_e: s * sh1,
            b_f: -sh1 / s,
            b_t,
        }
    }

    pub fn to_f64(&self) -> TwistCoeffs<f64> {
        TwistCoeffs {
            a_e: self.a_e.to_f64(),
            a_f: self.a_f.to_f64(),
            a_s: self.a_s.to_f64(),
            b_e: self.b_e.to_f64(),
            b_f: self.b_f.to_f64(),
            b_t: self.b_t.to_f64(),
        }
    }

    pub fn cast<U: Real>(&self) -> TwistCoeffs<U> {
        let c = |x: T| U::from_f64(x.to_f64());
        TwistCoeffs {
            a_e: c(self.a_e),
            a_f: c(self.a_f),
            a_s: c(self.a_s),
            b_e: c(self.b_e),
            b_f: c(self.b_f),
            b_t: c(self.b_t),
        }
    }
}

/// `(Y_K, Y_L)` on one irreducible representation.
pub fn build_twisted<T: Real>(ctx: &QContext<T>, r: &UqIrrep<T>, c: &TwistCoeffs<T>) -> (Matrix<T>, Matrix<T>) {
    let rq = ctx.pow(T::from_f64(0.5));
    let kk = &r.k * &r.k;
    let kki = &r.k_inv * &r.k_inv;
    let yk = (&r.e * &r.k).scale(rq * c.a_e) + (&r.f * &r.k).scale(c.a_f / rq) + kk.scale(c.a_s);
    let yl = (&r.e * &r.k_inv).scale(c.b_e / rq) + (&r.f * &r.k_inv).scale(rq * c.b_f) + kki.scale(c.b_t);
    (yk, yl)
}

/// Structure parameters of the embedding with `Ω` kept as a matrix:
/// `(as, bt, θ, Ω, bE·bF, aE·aF)`.
pub fn embedding_params<T: Real>(ctx: &QContext<T>, c: &TwistCoeffs<T>, omega: Param<T>) -> [Param<T>; 6] {
    [
        Param::Scalar(c.a_s),
        Param::Scalar(c.b_t),
        Param::Scalar(c.theta(ctx)),
        omega,
        Param::Scalar(c.b_e * c.b_f),
        Param::Scalar(c.a_e * c.a_f),
    ]
}

/// Generators on a two-fold tensor product.
#[derive(Clone, Debug)]
pub struct TensorGens<T> {
    pub one_yk: Matrix<T>,
    pub d_yk: Matrix<T>,
    pub yl_one: Matrix<T>,
    pub d_yl: Matrix<T>,
    /// Closed form of the coproduct of the Casimir.
    pub d_omega: Matrix<T>,
    /// Same element assembled from the coproducts of `K`, `E`, `F`.
    pub d_omega_gen: Matrix<T>,
    pub omega_one: Matrix<T>,
    pub one_omega: Matrix<T>,
    /// `Δ(Y_K)`, `Δ(Y_L)` assembled from the generator coproducts.
    pub d_yk_gen: Matrix<T>,
    pub d_yl_gen: Matrix<T>,
}

pub fn build_tensor<T: Real>(
    ctx: &QContext<T>,
    r1: &UqIrrep<T>,
    r2: &UqIrrep<T>,
    c: &TwistCoeffs<T>,
) -> TensorGens<T> {
    let i1 = Matrix::identity(r1.dim());
    let i2 = Matrix::identity(r2.dim());
    let (yk1, yl1) = build_twisted(ctx, r1, c);
    let (yk2, yl2) = build_twisted(ctx, r2, c);
    let k1sq = &r1.k * &r1.k;
    let k2isq = &r2.k_inv * &r2.k_inv;
    let om1 = casimir_omega(ctx, r1);
    let om2 = casimir_omega(ctx, r2);

    let one_yk = i1.kron(&yk2);
    let yl_one = yl1.kron(&i2);
    let d_yk = k1sq.kron(&yk2) + (&yk1 - &k1sq.scale(c.a_s)).kron(&i2);
    let d_yl = i1.kron(&(&yl2 - &k2isq.scale(c.b_t))) + yl1.kron(&k2isq);
    let d_omega = k1sq.kron(&om2) + om1.kron(&k2isq) - k1sq.kron(&k2isq).scale(ctx.ch(1.0))
        + ((&r1.k * &r1.f).kron(&(&r2.e * &r2.k_inv)) + (&r1.e * &r1.k).kron(&(&r2.k_inv * &r2.f)))
            .scale(ctx.s1sq());

    let dk = r1.k.kron(&r2.k);
    let dki = r1.k_inv.kron(&r2.k_inv);
    let de = r1.k.kron(&r2.e) + r1.e.kron(&r2.k_inv);
    let df = r1.k.kron(&r2.f) + r1.f.kron(&r2.k_inv);
    let glued = UqIrrep { n: 0, k: dk, k_inv: dki, e: de, f: df };
    let d_omega_gen = casimir_omega(ctx, &glued);
    let (d_yk_gen, d_yl_gen) = build_twisted(ctx, &glued, c);

    TensorGens {
        one_yk,
        d_yk,
        yl_one,
        d_yl,
        d_omega,
        d_omega_gen,
        omega_one: om1.kron(&i2),
        one_omega: i1.kron(&om2),
        d_yk_gen,
        d_yl_gen,
    }
}

/// Sign of the `sinh_q(1)²` entries in the last two rows of the relation
/// table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationSign {
    /// `−sinh_q(1)²`, literal reading.
    Minus,
    Plus,
}

impl RelationSign {
    pub const ALL: [RelationSign; 2] = [RelationSign::Minus, RelationSign::Plus];

    pub fn name(self) -> &'static str {
        match self {
            RelationSign::Minus => "-sinh_q(1)^2",
            RelationSign::Plus => "+sinh_q(1)^2",
        }
    }
}

/// One row of the relation table: a generator pair and its structure
/// parameters.
#[derive(Clone, Debug)]
pub struct TensorRelation<T> {
    pub label: &'static str,
    pub k: Matrix<T>,
    pub l: Matrix<T>,
    pub params: [Param<T>; 6],
}

/// The five generator pairs of the two-fold tensor product that satisfy
/// the relations.
pub fn tensor_relation_rows<T: Real>(
    ctx: &QContext<T>,
    g: &TensorGens<T>,
    c: &TwistCoeffs<T>,
    theta: ThetaForm,
    sign: RelationSign,
) -> Vec<TensorRelation<T>> {
    let th = Param::Scalar(c.theta_with(ctx, theta));
    let s = match sign {
        RelationSign::Minus => -ctx.s1sq(),
        RelationSign::Plus => ctx.s1sq(),
    };
    let sc = |x: T| Param::Scalar(x);
    let m = |x: &Matrix<T>| Param::Matrix(x.clone());
    let be_bf = c.b_e * c.b_f;
    let ae_af = c.a_e * c.a_f;
    vec![
        TensorRelation {
            label: "D(YK), D(YL)",
            k: g.d_yk.clone(),
            l: g.d_yl.clone(),
            params: [sc(c.a_s), sc(c.b_t), th.clone(), m(&g.d_omega), sc(be_bf), sc(ae_af)],
        },
        TensorRelation {
            label: "1(x)YK, D(YL)",
            k: g.one_yk.clone(),
            l: g.d_yl.clone(),
            params: [sc(c.a_s), m(&g.yl_one), th.clone(), m(&g.one_omega), sc(be_bf), sc(ae_af)],
        },
        TensorRelation {
            label: "D(YK), YL(x)1",
            k: g.d_yk.clone(),
            l: g.yl_one.clone(),
            params: [m(&g.one_yk), sc(c.b_t), th.clone(), m(&g.omega_one), sc(be_bf), sc(ae_af)],
        },
        TensorRelation {
            label: "1(x)YK, D(Omega)",
            k: g.one_yk.clone(),
            l: g.d_omega.clone(),
            params: [sc(c.a_s), m(&g.omega_one), m(&-&g.d_yk), m(&g.one_omega), sc(s), sc(ae_af)],
        },
        TensorRelation {
            label: "D(Omega), YL(x)1",
            k: g.d_omega.clone(),
            l: g.yl_one.clone(),
            params: [m(&g.one_omega), sc(c.b_t), m(&-&g.d_yl), m(&g.omega_one), sc(be_bf), sc(s)],
        },
    ]
}

/// Residuals of one table row.
#[derive(Clone, Debug)]
pub struct RowResult {
    pub label: &'static str,
    pub relation: f64,
    pub locality: f64,
}

pub fn verify_tensor_relations<T: Real>(
    ctx: &QContext<T>,
    g: &TensorGens<T>,
    c: &TwistCoeffs<T>,
    theta: ThetaForm,
    sign: RelationSign,
) -> Result<Vec<RowResult>> {
    tensor_relation_rows(ctx, g, c, theta, sign)
        .into_iter()
        .map(|row| {
            let r = aw_residual(ctx, &row.k, &row.l, &row.params)?;
            let loc = crate::aw3::locality_residual(&row.params, &row.k, &row.l)?;
            Ok(RowResult { label: row.label, relation: r.max_rel(), locality: loc })
        })
        .collect()
}

/// The five commuting pairs: `(1⊗Y_K, Y_L⊗1)`, `(1⊗Y_K, Δ(Y_K))`,
/// `(Y_L⊗1, Δ(Y_L))`, `(Δ(Ω), Δ(Y_K))`, `(Δ(Ω), Δ(Y_L))`.
pub fn commuting_pairs<T: Real>(g: &TensorGens<T>) -> Result<Vec<(&'static str, f64)>> {
    Ok(vec![
        ("1(x)YK, YL(x)1", comm_residual(&g.one_yk, &g.yl_one)?),
        ("1(x)YK, D(YK)", comm_residual(&g.one_yk, &g.d_yk)?),
        ("YL(x)1, D(YL)", comm_residual(&g.yl_one, &g.d_yl)?),
        ("D(Omega), D(YK)", comm_residual(&g.d_omega, &g.d_yk)?),
        ("D(Omega), D(YL)", comm_residual(&g.d_omega, &g.d_yl)?),
    ])
}

/// A real solution of the embedding problem.
#[derive(Clone, Copy, Debug)]
pub struct EmbeddingSolution {
    pub theta: f64,
    pub a_s: f64,
    pub b_t: f64,
    pub ae_af: f64,
    pub be_bf: f64,
    /// Individual factors when `aE·bF` and `aF·bE` are real.
    pub coeffs: Option<TwistCoeffs<f64>>,
    /// Largest relative error of the structure constants rebuilt from
    /// this solution.
    pub residual: f64,
}

/// Structure constants of `(as, bt, θ, Ω0, bE·bF, aE·aF)`.
pub fn embedding_structure(
    ctx: &QContext<f64>,
    a_s: f64,
    b_t: f64,
    theta: f64,
    omega0: f64,
    be_bf: f64,
    ae_af: f64,
) -> AwStructure<f64> {
    structure_from_consts(ctx, &[a_s, b_t, theta, omega0, be_bf, ae_af])
}

fn structure_error(a: &AwStructure<f64>, b: &AwStructure<f64>) -> f64 {
    let pa = [a.b, a.c0, a.c1, a.d0, a.d1];
    let pb = [b.b, b.c0, b.c1, b.d0, b.d1];
    pa.iter()
        .zip(pb)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Recovers the twisted-element coefficients realising a given structure
/// inside the representation where `Ω = Ω0`.
///
/// The three bilinear equations in `(θ, as, bt)` reduce to a degree-5
/// polynomial in `bt`; each real root is back-substituted and kept when the
/// rebuilt structure matches to `1e−9`.
pub fn solve_embedding(ctx: &QContext<f64>, s: &AwStructure<f64>, omega0: f64) -> Result<Vec<EmbeddingSolution>> {
    if omega0 == 0.0 {
        return Err(AwError::InvalidContext("Omega0 must be nonzero".into()));
    }
    let lone_d = s.b == 0.0 && s.c0 == 0.0 && s.c1 == 0.0 && ((s.d0 == 0.0) != (s.d1 == 0.0));
    if lone_d {
        return Err(AwError::NoSolution(
            "only one of D0, D1 is nonzero: no twisted elements realise it".into(),
        ));
    }
    let sq = ctx.s1sq();
    let c1: f64 = ctx.ch(1.0);
    let ae_af = -s.c1 / (c1 * c1);
    let be_bf = -s.c0 / (c1 * c1);
    let k0 = s.c0 * omega0 / c1;
    let k1 = s.c1 * omega0 / c1;
    let lead = c1 * sq / omega0;

    let den = [lead, 0.0, -k0];
    let num = [c1 * s.b / omega0, s.d0];
    let den2 = poly::poly_mul(&den, &den);
    let part1 = poly::poly_scale(&poly::poly_mul(&[1.0, 0.0], &den2), -k1);
    let inner = poly::poly_add(
        &poly::poly_scale(&poly::poly_mul(&num, &[1.0, 0.0]), sq),
        &poly::poly_scale(&den, -s.b),
    );
    let part2 = poly::poly_scale(&poly::poly_mul(&num, &inner), c1 / omega0);
    let part3 = poly::poly_scale(&den2, -s.d1);
    let quintic = poly::poly_add(&poly::poly_add(&part1, &part2), &part3);

    let mut cands: Vec<(f64, f64)> = Vec::new();
    if quintic.iter().all(|&x| x == 0.0) {
        return Err(AwError::NoSolution("reduced polynomial vanishes identically".into()));
    }
    for x3 in poly::real_roots(&quintic, 1e-7) {
        let d = poly::poly_eval(&den, x3);
        let scale = lead * x3 * x3 + k0.abs();
        if d.abs() > 1e-8 * scale.max(1e-300) {
            cands.push((poly::poly_eval(&num, x3) / d, x3));
        }
    }
    // den = 0 requires num = 0; as then solves a quadratic.
    if lead != 0.0 && k0 / lead >= 0.0 {
        let r = (k0 / lead).sqrt();
        for x3 in [r, -r] {
            let n = poly::poly_eval(&num, x3);
            if n.abs() > 1e-9 * (num[0] * x3).abs().max(s.d0.abs()).max(1.0) {
                continue;
            }
            let quad = [c1 * sq * x3 / omega0, -c1 * s.b / omega0, -k1 * x3 - s.d1];
            for x2 in poly::real_roots(&quad, 1e-9) {
                cands.push((x2, x3));
            }
        }
    }

    let mut out: Vec<EmbeddingSolution> = Vec::new();
    for (x2, x3) in cands {
        let x1 = (sq * x2 * x3 - s.b) / (sq * omega0);
        let rebuilt = embedding_structure(ctx, x2, x3, x1, omega0, be_bf, ae_af);
        let residual = structure_error(&rebuilt, s);
        if !(residual <= 1e-9) {
            continue;
        }
        let dup = out.iter().any(|o| (o.a_s - x2).abs() <= 1e-9 * x2.abs().max(1.0) && (o.b_t - x3).abs() <= 1e-9 * x3.abs().max(1.0));
        if dup {
            continue;
        }
        out.push(EmbeddingSolution {
            theta: x1,
            a_s: x2,
            b_t: x3,
            ae_af,
            be_bf,
            coeffs: factor_coeffs(sq, x1, x2, x3, ae_af, be_bf),
            residual,
        });
    }
    if out.is_empty() {
        return Err(AwError::NoSolution("no real root survives back-substitution".into()));
    }
    Ok(out)
}

/// Splits the products into individual factors: `u = aE·bF` and
/// `v = aF·bE` are the roots of `z² + sθz + (aE·aF)(bE·bF)` with
/// `s = sinh_q(1)²`.
fn factor_coeffs(sq: f64, theta: f64, a_s: f64, b_t: f64, ae_af: f64, be_bf: f64) -> Option<TwistCoeffs<f64>> {
    let p = sq * theta;
    let disc = p * p - 4.0 * ae_af * be_bf;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    let (u, v) = ((-p + r) / 2.0, (-p - r) / 2.0);
    let build = |u: f64, v: f64| -> Option<TwistCoeffs<f64>> {
        if ae_af != 0.0 {
            let a_e = ae_af.abs().sqrt();
            let a_f = ae_af / a_e;
            Some(TwistCoeffs { a_e, a_f, a_s, b_e: v / a_f, b_f: u / a_e, b_t })
        } else if v == 0.0 && u != 0.0 {
            Some(TwistCoeffs { a_e: 1.0, a_f: 0.0, a_s, b_e: be_bf / u, b_f: u, b_t })
        } else {
            None
        }
    };
    build(u, v).or_else(|| build(v, u))
}

/// Role assignment of the two generators among the `Λ` labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialRoles {
    /// `Λ12 = Y_L`, `Λ23 = Y_K`, literal reading.
    Literal,
    /// `Λ12 = Y_K`, `Λ23 = Y_L`.
    Swapped,
}

impl SpecialRoles {
    pub const ALL: [SpecialRoles; 2] = [SpecialRoles::Literal, SpecialRoles::Swapped];

    pub fn name(self) -> &'static str {
        match self {
            SpecialRoles::Literal => "L12 = YL, L23 = YK",
            SpecialRoles::Swapped => "L12 = YK, L23 = YL",
        }
    }
}

/// Results of the special-algebra identities.
#[derive(Clone, Debug)]
pub struct SpecialResult {
    /// Residuals of the two cyclic relations.
    pub cyclic: [f64; 2],
    /// Casimir value from the matrix formula.
    pub casimir: f64,
    /// `cosh_q(1)² − Λ123² − Λ1² − Λ2² − Λ3² − Λ123Λ1Λ2Λ3`.
    pub simplified: f64,
    /// `sinh_q(2)²·simplified + B²/sinh_q(1)²`.
    pub affine: f64,
}

/// Checks the special-algebra identities for `aE·aF = bE·bF = −sinh_q(1)²`:
/// `Λ1 = bt`, `Λ2 = Ω0`, `Λ3 = as`, `Λ123 = −θ`.
pub fn special_aw_check<T: Real>(
    ctx: &QContext<T>,
    yk: &Matrix<T>,
    yl: &Matrix<T>,
    c: &TwistCoeffs<T>,
    omega0: T,
    roles: SpecialRoles,
) -> Result<SpecialResult> {
    let n = yk.rows();
    let id = Matrix::<T>::identity(n);
    let sh2 = ctx.sh(2.0);
    let c1 = ctx.ch(1.0);
    let (l1, l2, l3, l123) = (c.b_t, omega0, c.a_s, -c.theta(ctx));
    let (l12, l23) = match roles {
        SpecialRoles::Literal => (yl, yk),
        SpecialRoles::Swapped => (yk, yl),
    };
    let l13 = &qcomm(ctx, l12, l23)?.scale(-T::one() / sh2) + &id.scale((l1 * l3 + l2 * l123) / c1);
    let r12 = rel_residual(&[
        l12.clone(),
        qcomm(ctx, l23, &l13)?.scale(T::one() / sh2),
        id.scale(-(l2 * l3 + l1 * l123) / c1),
    ])?;
    let r23 = rel_residual(&[
        l23.clone(),
        qcomm(ctx, &l13, l12)?.scale(T::one() / sh2),
        id.scale(-(l1 * l2 + l3 * l123) / c1),
    ])?;
    let a = [c.a_s, c.b_t, c.theta(ctx), omega0, c.b_e * c.b_f, c.a_e * c.a_f];
    let st = structure_from_consts(ctx, &a);
    let q = casimir_q(ctx, yk, yl, &st)?;
    let q0 = if n > 0 { q[(0, 0)] } else { T::zero() };
    let simplified = c1 * c1 - l123 * l123 - l1 * l1 - l2 * l2 - l3 * l3 - l123 * l1 * l2 * l3;
    let affine = sh2 * sh2 * simplified + st.b * st.b / ctx.s1sq();
    Ok(SpecialResult {
        cyclic: [r12, r23],
        casimir: q0.to_f64(),
        simplified: simplified.to_f64(),
        affine: affine.to_f64(),
    })
}

/// Results of the extra relations of the four-fold construction.
#[derive(Clone, Debug)]
pub struct FourFoldResult {
    /// `Λ14 = α[Λ13, Λ34]_q + β(Λ3Λ134 + Λ1Λ4)`.
    pub main: f64,
    /// `Λ13 = α[Λ34, Λ14]_q + β(Λ4Λ134 + Λ3Λ1)` and
    /// `Λ34 = α[Λ14, Λ13]_q + β(Λ1Λ134 + Λ4Λ3)`.
    pub siblings: [f64; 2],
}

/// Builds `Λ13`, `Λ14`, `Λ134` from the tensor generators with
/// `α = −1/sinh_q(2)` and `β = beta_scale/cosh_q(1)`, and evaluates the
/// extra relations. `theta_sign` multiplies `θ` in `Λ1234`.
pub fn four_fold_check<T: Real>(
    ctx: &QContext<T>,
    g: &TensorGens<T>,
    c: &TwistCoeffs<T>,
    beta_scale: T,
    theta_sign: T,
) -> Result<FourFoldResult> {
    let n = g.d_omega.rows();
    let id = Matrix::<T>::identity(n);
    let al = -T::one() / ctx.sh(2.0);
    let be = beta_scale / ctx.ch(1.0);
    let l1 = id.scale(c.b_t);
    let l2 = &g.omega_one;
    let l3 = &g.one_omega;
    let l4 = id.scale(c.a_s);
    let l12 = &g.yl_one;
    let l23 = &g.d_omega;
    let l34 = &g.one_yk;
    let l123 = &g.d_yl;
    let l234 = &g.d_yk;
    let l1234 = id.scale(theta_sign * c.theta(ctx));
    let qa = |x: &Matrix<T>, y: &Matrix<T>| qcomm(ctx, x, y).map(|m| m.scale(al));

    let l13 = qa(l12, l23)? + (&(l2 * l123) + &(&l1 * l3)).scale(be);
    let l14 = qa(l123, l234)? + (&(l23 * &l1234) + &(&l1 * &l4)).scale(be);
    let l134 = qa(l12, l234)? + (&(l2 * &l1234) + &(&l1 * l34)).scale(be);

    let main = rel_residual(&[
        l14.clone(),
        -&qa(&l13, l34)?,
        (&(l3 * &l134) + &(&l1 * &l4)).scale(-be),
    ])?;
    let s1 = rel_residual(&[
        l13.clone(),
        -&qa(l34, &l14)?,
        (&(&l4 * &l134) + &(l3 * &l1)).scale(-be),
    ])?;
    let s2 = rel_residual(&[
        l34.clone(),
        -&qa(&l14, &l13)?,
        (&(&l1 * &l134) + &(&l4 * l3)).scale(-be),
    ])?;
    Ok(FourFoldResult { main, siblings: [s1, s2] })
}

/// Relation residual of the single-representation embedding, with `Ω`
/// passed as a matrix.
pub fn embedding_residual<T: Real>(ctx: &QContext<T>, r: &UqIrrep<T>, c: &TwistCoeffs<T>) -> Result<f64> {
    let (yk, yl) = build_twisted(ctx, r, c);
    let om = casimir_omega(ctx, r);
    let params = embedding_params(ctx, c, Param::Matrix(om));
    Ok(aw_residual(ctx, &yk, &yl, &params)?.max_rel())
}

/// Relation residual of the embedding with `Ω` replaced by its scalar value.
pub fn embedding_residual_scalar<T: Real>(ctx: &QContext<T>, r: &UqIrrep<T>, c: &TwistCoeffs<T>) -> Result<f64> {
    let (yk, yl) = build_twisted(ctx, r, c);
    let om0 = ctx.ch(r.n as f64 + 1.0);
    let a = [c.a_s, c.b_t, c.theta(ctx), om0, c.b_e * c.b_f, c.a_e * c.a_f];
    Ok(aw_residual_bcd(ctx, &yk, &yl, &structure_from_consts(ctx, &a))?.max_rel())
}
