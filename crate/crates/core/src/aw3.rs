//! Rank-1 Askey–Wilson algebra: structure constants, the relation residual
//! map, finite-dimensional representations, Casimir and characteristic
//! polynomial.

use nalgebra::Complex;

use crate::error::{AwError, Result};
use crate::linalg::{comm_residual, poly, rel_residual, Matrix};
use crate::qcore::{QContext, Real};

/// A structure parameter that is either a number or an operator.
#[derive(Clone, Debug)]
pub enum Param<T> {
    Scalar(T),
    Matrix(Matrix<T>),
}

impl<T: Real> From<T> for Param<T> {
    fn from(x: T) -> Self {
        Param::Scalar(x)
    }
}

impl<T: Real> From<Matrix<T>> for Param<T> {
    fn from(m: Matrix<T>) -> Self {
        Param::Matrix(m)
    }
}

impl<T: Real> From<&Matrix<T>> for Param<T> {
    fn from(m: &Matrix<T>) -> Self {
        Param::Matrix(m.clone())
    }
}

impl<T: Real> Param<T> {
    pub fn mul(&self, rhs: &Param<T>) -> Param<T> {
        match (self, rhs) {
            (Param::Scalar(a), Param::Scalar(b)) => Param::Scalar(*a * *b),
            (Param::Scalar(a), Param::Matrix(m)) | (Param::Matrix(m), Param::Scalar(a)) => {
                Param::Matrix(m.scale(*a))
            }
            (Param::Matrix(a), Param::Matrix(b)) => Param::Matrix(a * b),
        }
    }

    pub fn scale(&self, s: T) -> Param<T> {
        match self {
            Param::Scalar(a) => Param::Scalar(*a * s),
            Param::Matrix(m) => Param::Matrix(m.scale(s)),
        }
    }

    /// `self · m`.
    pub fn apply(&self, m: &Matrix<T>) -> Matrix<T> {
        match self {
            Param::Scalar(a) => m.scale(*a),
            Param::Matrix(a) => a * m,
        }
    }

    pub fn to_matrix(&self, n: usize) -> Matrix<T> {
        match self {
            Param::Scalar(a) => Matrix::scalar(n, *a),
            Param::Matrix(m) => m.clone(),
        }
    }

    pub fn as_matrix(&self) -> Option<&Matrix<T>> {
        match self {
            Param::Matrix(m) => Some(m),
            Param::Scalar(_) => None,
        }
    }
}

/// The two components of the relation map together with their relative
/// residuals.
#[derive(Clone, Debug)]
pub struct AwResidual<T> {
    pub components: [Matrix<T>; 2],
    pub rel: [f64; 2],
}

impl<T> AwResidual<T> {
    pub fn max_rel(&self) -> f64 {
        self.rel[0].max(self.rel[1])
    }
}

/// Evaluates both components of `𝒜𝒲(K, L | A0..A5)`.
///
/// Products of structure parameters are taken in the order they appear in the relations so
/// operator-valued parameters are handled faithfully.
pub fn aw_residual<T: Real>(
    ctx: &QContext<T>,
    k: &Matrix<T>,
    l: &Matrix<T>,
    a: &[Param<T>; 6],
) -> Result<AwResidual<T>> {
    let n = k.rows();
    if !k.is_square() || !l.is_square() || l.rows() != n {
        return Err(AwError::DimensionMismatch("generators of different size".into()));
    }
    for p in a {
        if let Param::Matrix(m) = p {
            if m.rows() != n || !m.is_square() {
                return Err(AwError::DimensionMismatch("structure parameter size".into()));
            }
        }
    }
    let s = ctx.s1sq();
    let c1 = ctx.ch(1.0);
    let c2 = ctx.ch(2.0);
    let [a0, a1, a2, a3, a4, a5] = a;

    let kl = k * l;
    let lk = l * k;
    let kk = k * k;
    let ll = l * l;

    let first = vec![
        (&kl * k).scale(c2),
        -&(&kk * l),
        -&(&lk * k),
        a0.mul(a1).apply(k).scale(-s),
        a2.mul(a3).apply(k).scale(s),
        a5.apply(l).scale(c1 * c1),
        a1.mul(a3).mul(a5).to_matrix(n).scale(-c1),
        a0.mul(a2).to_matrix(n).scale(-c1 * s),
    ];
    let second = vec![
        (&lk * l).scale(c2),
        -&(&ll * k),
        -&(&kl * l),
        a0.mul(a1).apply(l).scale(-s),
        a2.mul(a3).apply(l).scale(s),
        a4.apply(k).scale(c1 * c1),
        a0.mul(a3).mul(a4).to_matrix(n).scale(-c1),
        a1.mul(a2).to_matrix(n).scale(-c1 * s),
    ];
    let r0 = rel_residual(&first)?;
    let r1 = rel_residual(&second)?;
    let sum = |v: Vec<Matrix<T>>| v.into_iter().reduce(|x, y| &x + &y).expect("terms");
    Ok(AwResidual {
        components: [sum(first), sum(second)],
        rel: [r0, r1],
    })
}

/// Largest commutator residual among the operator-valued structure
/// parameters and between each of them and the two generators.
pub fn locality_residual<T: Real>(params: &[Param<T>], k: &Matrix<T>, l: &Matrix<T>) -> Result<f64> {
    let mats: Vec<&Matrix<T>> = params.iter().filter_map(|p| p.as_matrix()).collect();
    let mut worst = 0.0_f64;
    for (i, a) in mats.iter().enumerate() {
        for b in &mats[i + 1..] {
            worst = worst.max(comm_residual(a, b)?);
        }
        worst = worst.max(comm_residual(a, k)?);
        worst = worst.max(comm_residual(a, l)?);
    }
    Ok(worst)
}

/// Structure constants `B, C0, C1, D0, D1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AwStructure<T> {
    pub b: T,
    pub c0: T,
    pub c1: T,
    pub d0: T,
    pub d1: T,
}

impl<T: Real> AwStructure<T> {
    /// Interchanges the roles of the two generators.
    pub fn swapped(&self) -> Self {
        AwStructure {
            b: self.b,
            c0: self.c1,
            c1: self.c0,
            d0: self.d1,
            d1: self.d0,
        }
    }

    pub fn to_f64(&self) -> AwStructure<f64> {
        AwStructure {
            b: self.b.to_f64(),
            c0: self.c0.to_f64(),
            c1: self.c1.to_f64(),
            d0: self.d0.to_f64(),
            d1: self.d1.to_f64(),
        }
    }
}

/// Structure constants from the reparametrised constants `A0..A5`.
pub fn structure_from_consts<T: Real>(ctx: &QContext<T>, a: &[T; 6]) -> AwStructure<T> {
    let s = ctx.s1sq();
    let c1 = ctx.ch(1.0);
    let [a0, a1, a2, a3, a4, a5] = *a;
    AwStructure {
        b: s * (a0 * a1 - a2 * a3),
        c0: -c1 * c1 * a4,
        c1: -c1 * c1 * a5,
        d0: c1 * (a0 * a3 * a4 + s * a1 * a2),
        d1: c1 * (a1 * a3 * a5 + s * a0 * a2),
    }
}

/// Residual of the relations written with plain structure constants.
pub fn aw_residual_bcd<T: Real>(
    ctx: &QContext<T>,
    k: &Matrix<T>,
    l: &Matrix<T>,
    s: &AwStructure<T>,
) -> Result<AwResidual<T>> {
    let n = k.rows();
    let c2 = ctx.ch(2.0);
    let kl = k * l;
    let lk = l * k;
    let first = vec![
        (&kl * k).scale(c2),
        -&(&(k * k) * l),
        -&(&lk * k),
        k.scale(-s.b),
        l.scale(-s.c1),
        Matrix::scalar(n, -s.d1),
    ];
    let second = vec![
        (&lk * l).scale(c2),
        -&(&(l * l) * k),
        -&(&kl * l),
        l.scale(-s.b),
        k.scale(-s.c0),
        Matrix::scalar(n, -s.d0),
    ];
    let r0 = rel_residual(&first)?;
    let r1 = rel_residual(&second)?;
    let sum = |v: Vec<Matrix<T>>| v.into_iter().reduce(|x, y| &x + &y).expect("terms");
    Ok(AwResidual {
        components: [sum(first), sum(second)],
        rel: [r0, r1],
    })
}

/// Reparametrised structure data `(α0, α1, α2, α3; A4, A5)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaParams<T> {
    pub alpha: [T; 4],
    pub a4: T,
    pub a5: T,
}

impl<T: Real> AlphaParams<T> {
    /// Canonical finite-dimensional parameters: `α3 = −(N+1)` and
    /// `A4 = A5 = sinh_q(1)²`.
    pub fn finite(ctx: &QContext<T>, a0: T, a1: T, a2: T, n: usize) -> Self {
        AlphaParams {
            alpha: [a0, a1, a2, -T::from_i64(n as i64 + 1)],
            a4: ctx.s1sq(),
            a5: ctx.s1sq(),
        }
    }

    /// `(A0, .., A5)` with `A0 = sinh_q α0`, `A1 = sinh_q α1`,
    /// `A2 = cosh_q α2`, `A3 = cosh_q α3`.
    pub fn consts(&self, ctx: &QContext<T>) -> [T; 6] {
        let [a0, a1, a2, a3] = self.alpha;
        [
            ctx.sinh_q(a0),
            ctx.sinh_q(a1),
            ctx.cosh_q(a2),
            ctx.cosh_q(a3),
            self.a4,
            self.a5,
        ]
    }

    pub fn structure(&self, ctx: &QContext<T>) -> AwStructure<T> {
        structure_from_consts(ctx, &self.consts(ctx))
    }

    /// `(α0+α3, α0−α3, α1+α2, α1−α2)`.
    pub fn roots(&self) -> [T; 4] {
        alpha_roots(&self.alpha)
    }

    /// Parameters with the roles of the two generators interchanged.
    pub fn swapped(&self) -> Self {
        let [a0, a1, a2, a3] = self.alpha;
        AlphaParams {
            alpha: [a1, a0, a2, a3],
            a4: self.a5,
            a5: self.a4,
        }
    }
}

pub fn alpha_roots<T: Real>(alpha: &[T; 4]) -> [T; 4] {
    let [a0, a1, a2, a3] = *alpha;
    [a0 + a3, a0 - a3, a1 + a2, a1 - a2]
}

/// Which numerator the diagonal coefficient uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnForm {
    /// `(A0A1 − A2A3)λ_n + cosh_q(1)(A1A3 + A0A2)`; agrees with the
    /// root form `(Bλ_n + D1)/((λ_n−λ_{n−1})(λ_{n+1}−λ_n))`.
    Corrected,
    /// `(A1 − A2A3)λ_n + ...`, literal reading.
    Literal,
}

/// Which argument permutation the tilde squared coefficient uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TildeForm {
    /// `−a²(α0, α2, α1, α3)`.
    Literal,
    /// `−a²(α0, −α2, −α1, α3)`.
    Reflected,
}

/// `sinh_q(2n + α0)`.
pub fn lambda<T: Real>(ctx: &QContext<T>, alpha0: T, n: T) -> T {
    ctx.sinh_q(n + n + alpha0)
}

/// Squared off-diagonal coefficient `a_n²(α)`.
pub fn an_sq<T: Real>(ctx: &QContext<T>, alpha: &[T; 4], n: T) -> T {
    let x = n + n + alpha[0] - T::one();
    let shx = ctx.sinh_q(x);
    let mut num = -T::one();
    for p in alpha_roots(alpha) {
        num *= shx - ctx.sinh_q(p);
    }
    let cx = ctx.cosh_q(x);
    num / (cx * cx * ctx.cosh_q(x + T::one()) * ctx.cosh_q(x - T::one()))
}

fn cc<T: Real>(ctx: &QContext<T>, alpha0: T, n: T) -> T {
    let x = n + n + alpha0;
    ctx.cosh_q(x - T::one()) * ctx.cosh_q(x + T::one())
}

/// Diagonal coefficient `b_n(α)`.
pub fn bn<T: Real>(ctx: &QContext<T>, alpha: &[T; 4], n: T, form: BnForm) -> T {
    let [a0, a1, a2, a3] = *alpha;
    let (c0, c1_, c2, c3) = (ctx.sinh_q(a0), ctx.sinh_q(a1), ctx.cosh_q(a2), ctx.cosh_q(a3));
    let lead = match form {
        BnForm::Corrected => c0 * c1_,
        BnForm::Literal => c1_,
    };
    let num = (lead - c2 * c3) * lambda(ctx, a0, n) + ctx.ch(1.0) * (c1_ * c3 + c0 * c2);
    num / cc(ctx, a0, n)
}

/// Tilde coefficients `(ã_n², b̃_n)` for the mixed-sign spectrum case.
pub fn tilde_coeffs<T: Real>(
    ctx: &QContext<T>,
    alpha: &[T; 4],
    n: T,
    form: TildeForm,
    bform: BnForm,
) -> (T, T) {
    let [a0, a1, a2, a3] = *alpha;
    let swapped = match form {
        TildeForm::Literal => [a0, a2, a1, a3],
        TildeForm::Reflected => [a0, -a2, -a1, a3],
    };
    let at2 = -an_sq(ctx, &swapped, n);
    let (t0, t1, t2, t3) = (ctx.sinh_q(a0), ctx.cosh_q(a1), ctx.sinh_q(a2), ctx.cosh_q(a3));
    let lead = match bform {
        BnForm::Corrected => t0 * t1,
        BnForm::Literal => t1,
    };
    let num = (lead - t2 * t3) * lambda(ctx, a0, n) + ctx.ch(1.0) * (t1 * t3 + t0 * t2);
    (at2, num / cc(ctx, a0, n))
}

/// `n(k) = k − N/2`.
pub fn half_index<T: Real>(k: usize, n: usize) -> T {
    T::from_f64(k as f64 - n as f64 / 2.0)
}

/// Finite-dimensional representation with diagonal `K` and tridiagonal `L`.
#[derive(Clone, Debug)]
pub struct Aw3Rep<T> {
    pub n: usize,
    pub k: Matrix<T>,
    pub l: Matrix<T>,
    pub lambda: Vec<T>,
    /// `a_{n(k)}` for `k = 1..=N` (positive branch).
    pub a_seq: Vec<T>,
    pub b_seq: Vec<T>,
    /// `a²` at the two truncation points `n(0)` and `n(N+1)`.
    pub boundary_sq: [T; 2],
    pub params: AlphaParams<T>,
}

/// Checks that every interior squared coefficient is positive.
pub fn validate_positivity<T: Real>(ctx: &QContext<T>, params: &AlphaParams<T>, n: usize) -> Result<()> {
    for k in 1..=n {
        let v = an_sq(ctx, &params.alpha, half_index(k, n));
        if !(v > T::zero()) {
            return Err(AwError::NegativeWeight {
                location: format!("a^2 at k={k}"),
                value: v.to_f64(),
            });
        }
    }
    Ok(())
}

pub fn build_rep<T: Real>(ctx: &QContext<T>, params: &AlphaParams<T>, n: usize) -> Result<Aw3Rep<T>> {
    build_rep_with(ctx, params, n, BnForm::Corrected)
}

pub fn build_rep_with<T: Real>(
    ctx: &QContext<T>,
    params: &AlphaParams<T>,
    n: usize,
    form: BnForm,
) -> Result<Aw3Rep<T>> {
    validate_positivity(ctx, params, n)?;
    let al = &params.alpha;
    let ns: Vec<T> = (0..=n).map(|k| half_index(k, n)).collect();
    let lam: Vec<T> = ns.iter().map(|&x| lambda(ctx, al[0], x)).collect();
    let b_seq: Vec<T> = ns.iter().map(|&x| bn(ctx, al, x, form)).collect();
    let a_seq: Vec<T> = (1..=n).map(|k| an_sq(ctx, al, ns[k]).sqrt()).collect();
    let boundary_sq = [
        an_sq(ctx, al, half_index(0, n)),
        an_sq(ctx, al, half_index(n + 1, n)),
    ];
    let k = Matrix::from_diag(&lam);
    let mut l = Matrix::from_diag(&b_seq);
    for i in 1..=n {
        l[(i, i - 1)] = a_seq[i - 1];
        l[(i - 1, i)] = a_seq[i - 1];
    }
    if !k.all_finite() || !l.all_finite() {
        return Err(AwError::Overflow("representation entries".into()));
    }
    Ok(Aw3Rep {
        n,
        k,
        l,
        lambda: lam,
        a_seq,
        b_seq,
        boundary_sq,
        params: *params,
    })
}

/// Representation built directly from four roots with
/// `C0 = C1 = −sinh_q(2)²`: `λ_n = sinh_q(2n+p0+1)`,
/// `a_n² = −Π(sinh_q(2n+p0) − sinh_q p_k)/(cosh_q(2n+p0)² cosh_q(2n+p0±1))`,
/// `b_n = (Bλ_n + D)/((λ_n−λ_{n−1})(λ_{n+1}−λ_n))`.
///
/// Returns `(diagonal, tridiagonal)`.
pub fn rep_from_roots<T: Real>(
    ctx: &QContext<T>,
    p: &[T; 4],
    n: usize,
    b: T,
    d: T,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let lam = |m: i64| ctx.sinh_q(T::from_i64(2 * m) + p[0] + T::one());
    let diag: Vec<T> = (0..=n as i64).map(lam).collect();
    let mut tri = Matrix::zeros(n + 1, n + 1);
    for m in 0..=n as i64 {
        let l0 = lam(m);
        tri[(m as usize, m as usize)] = (b * l0 + d) / ((l0 - lam(m - 1)) * (lam(m + 1) - l0));
    }
    for m in 1..=n {
        let x = T::from_i64(2 * m as i64) + p[0];
        let shx = ctx.sinh_q(x);
        let mut num = -T::one();
        for pk in p {
            num *= shx - ctx.sinh_q(*pk);
        }
        let cx = ctx.cosh_q(x);
        let a2 = num / (cx * cx * ctx.cosh_q(x + T::one()) * ctx.cosh_q(x - T::one()));
        if !(a2 > T::zero()) {
            return Err(AwError::NegativeWeight {
                location: format!("root-form a^2 at m={m}"),
                value: a2.to_f64(),
            });
        }
        tri[(m, m - 1)] = a2.sqrt();
        tri[(m - 1, m)] = a2.sqrt();
    }
    Ok((Matrix::from_diag(&diag), tri))
}

/// Casimir element evaluated on a pair of matrices.
pub fn casimir_q<T: Real>(
    ctx: &QContext<T>,
    k: &Matrix<T>,
    l: &Matrix<T>,
    s: &AwStructure<T>,
) -> Result<Matrix<T>> {
    let q = ctx.q();
    let q2 = q * q;
    let x = crate::linalg::qcomm(ctx, k, l)?;
    let kl = k * l;
    let lk = l * k;
    let terms = [
        (&kl * &x).scale(T::one() / q - q2 * q),
        (&x * &x).scale(q2),
        (&kl + &lk).scale(s.b),
        (k * k).scale(s.c0 * q2),
        (l * l).scale(s.c1 / q2),
        k.scale(s.d0 * (T::one() + q2)),
        l.scale(s.d1 * (T::one() + T::one() / q2)),
    ];
    Ok(terms.into_iter().reduce(|a, b| &a + &b).expect("terms"))
}

/// Structure constants and Casimir value written through the roots.
#[derive(Clone, Copy, Debug)]
pub struct RootForms<T> {
    pub b: T,
    pub d0: T,
    pub d1: T,
    pub q0: T,
}

/// Closed forms of `B, D0, D1, Q0` in terms of the roots, literal reading.
pub fn root_forms<T: Real>(ctx: &QContext<T>, p: &[T; 4]) -> RootForms<T> {
    let half = T::from_f64(0.5);
    let s1 = ctx.s1sq();
    let sh2 = ctx.sh(2.0);
    let s2 = sh2 * sh2;
    let c1 = ctx.ch(1.0);
    let sp01 = ctx.sinh_q((p[0] + p[1]) * half);
    let sp23 = ctx.sinh_q((p[2] + p[3]) * half);
    let cm01 = ctx.cosh_q((p[0] - p[1]) * half);
    let cm23 = ctx.cosh_q((p[2] - p[3]) * half);
    let b = s1 * (sp01 * sp23 - cm01 * cm23);
    let d0 = s2 / c1 * (sp01 * cm01 + sp23 * cm23);
    let d1 = s2 / c1 * (sp23 * cm01 + sp01 * cm23);
    let prod = p
        .iter()
        .fold(T::one(), |acc, &x| acc * ctx.sinh_q(x * half));
    let q0 = s2 * (prod + s1 - (s1 * b + d1 * d1) / (s1 * s2));
    RootForms { b, d0, d1, q0 }
}

/// Casimir value of the canonical representation (`A4 = A5 = sinh_q(1)²`)
/// as a polynomial in `A0..A3`:
/// `s1²(A0²A1² + A2²A3² + cosh_q(2)A0A1A2A3) + s2²(A0² + A1² − A2² − A3² + cosh_q(1)²)`.
pub fn casimir_value_canonical<T: Real>(ctx: &QContext<T>, a: &[T; 6]) -> T {
    let s1 = ctx.s1sq();
    let sh2 = ctx.sh(2.0);
    let c1 = ctx.ch(1.0);
    let [a0, a1, a2, a3, _, _] = *a;
    s1 * (a0 * a0 * a1 * a1 + a2 * a2 * a3 * a3 + ctx.ch(2.0) * a0 * a1 * a2 * a3)
        + sh2 * sh2 * (a0 * a0 + a1 * a1 - a2 * a2 - a3 * a3 + c1 * c1)
}

/// Characteristic polynomial coefficients (degree 4 first) and roots.
#[derive(Clone, Debug)]
pub struct CharPoly<T> {
    pub coeffs: [T; 5],
    pub roots: Vec<Complex<f64>>,
}

impl<T: Real> CharPoly<T> {
    pub fn eval(&self, z: T) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| acc * z + c)
    }

    /// `|𝒫(z)| / Σ|c_i z^i|`.
    pub fn rel_eval(&self, z: T) -> f64 {
        let mut scale = T::zero();
        let mut zp = T::one();
        for c in self.coeffs.iter().rev() {
            scale += (*c * zp).abs();
            zp *= z;
        }
        (self.eval(z).abs() / scale.max(T::from_f64(f64::MIN_POSITIVE))).to_f64()
    }
}

pub fn char_poly<T: Real>(ctx: &QContext<T>, s: &AwStructure<T>, q0: T) -> CharPoly<T> {
    let s1 = ctx.s1sq();
    let c1 = ctx.ch(1.0);
    let c1sq = c1 * c1;
    let c1q = c1sq * c1sq;
    let four = T::from_f64(4.0);
    let coeffs = [
        s.c0 * s1 / c1q,
        s.d0 * s1 / c1sq,
        (s.b * s.b - s1 * q0) / c1sq + (s1 - four) * s.c0 * s.c1 / c1q,
        s.b * s.d1 - four * s.c1 * s.d0 / c1sq,
        s.d1 * s.d1 + s.c1 * (s.b * s.b + four * q0) / c1sq - four * s.c0 * s.c1 * s.c1 / c1q,
    ];
    let f: Vec<f64> = coeffs.iter().map(|c| c.to_f64()).collect();
    CharPoly {
        coeffs,
        roots: poly::poly_roots(&f),
    }
}

/// Candidate readings of the characteristic polynomial's variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyVariable {
    /// `z = p_k`.
    Raw,
    /// `z = sinh_q(p_k)`.
    Sinh,
    /// `z = cosh_q(1) sinh_q(p_k)`.
    ScaledSinh,
}

impl PolyVariable {
    pub const ALL: [PolyVariable; 3] = [PolyVariable::Raw, PolyVariable::Sinh, PolyVariable::ScaledSinh];

    pub fn name(self) -> &'static str {
        match self {
            PolyVariable::Raw => "p_k",
            PolyVariable::Sinh => "sinh_q(p_k)",
            PolyVariable::ScaledSinh => "cosh_q(1)*sinh_q(p_k)",
        }
    }

    pub fn image<T: Real>(self, ctx: &QContext<T>, p: T) -> T {
        match self {
            PolyVariable::Raw => p,
            PolyVariable::Sinh => ctx.sinh_q(p),
            PolyVariable::ScaledSinh => ctx.ch(1.0) * ctx.sinh_q(p),
        }
    }

    pub fn preimage<T: Real>(self, ctx: &QContext<T>, z: T) -> T {
        match self {
            PolyVariable::Raw => z,
            PolyVariable::Sinh => ctx.arcsinh_q(z),
            PolyVariable::ScaledSinh => ctx.arcsinh_q(z / ctx.ch(1.0)),
        }
    }
}

/// Candidate readings of the fourth dual root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualVariant {
    /// `s3 = Σ/2 − p1`, literal reading.
    Literal,
    /// `s3 = Σ/2 − p2`.
    Symmetric,
}

impl DualVariant {
    pub const ALL: [DualVariant; 2] = [DualVariant::Literal, DualVariant::Symmetric];

    pub fn name(self) -> &'static str {
        match self {
            DualVariant::Literal => "s3 = sigma/2 - p1",
            DualVariant::Symmetric => "s3 = sigma/2 - p2",
        }
    }
}

/// Dual roots: `s0 = Σ/2 − p1`, `s1 = Σ/2 − p0`, `s2 = Σ/2 − p3` and the
/// selected `s3`.
pub fn dual_roots<T: Real>(p: &[T; 4], variant: DualVariant) -> [T; 4] {
    let half = (p[0] + p[1] + p[2] + p[3]) * T::from_f64(0.5);
    let s3 = match variant {
        DualVariant::Literal => half - p[1],
        DualVariant::Symmetric => half - p[2],
    };
    [half - p[1], half - p[0], half - p[3], s3]
}

/// Largest relative violation of the three spectrum recursions.
pub fn spectrum_identities<T: Real>(ctx: &QContext<T>, lambda: &[T], c1: T) -> f64 {
    let c2 = ctx.ch(2.0);
    let rel = |terms: &[T]| {
        let s = terms.iter().fold(T::zero(), |a, &b| a + b);
        let m = terms.iter().fold(T::zero(), |a, &b| a + b.abs());
        (s.abs() / m.max(T::from_f64(f64::MIN_POSITIVE))).to_f64()
    };
    let mut worst = 0.0_f64;
    for w in lambda.windows(2) {
        let (a, b) = (w[0], w[1]);
        worst = worst.max(rel(&[a * a, b * b, -c2 * a * b, c1]));
    }
    for w in lambda.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        worst = worst.max(rel(&[c2 * b, -c, -a]));
        worst = worst.max(rel(&[b * b, -c * a, c1]));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext<f64> {
        QContext::new(0.7).unwrap()
    }

    #[test]
    fn structure_examples() {
        let c = ctx();
        let p = AlphaParams { alpha: [0.0, 0.0, 0.4, 0.4], a4: c.s1sq(), a5: c.s1sq() };
        let s = p.structure(&c);
        assert!((s.b + c.s1sq() * c.ch(0.4) * c.ch(0.4)).abs() < 1e-14);
        let sh2 = c.sh(2.0);
        assert!((s.c0 + sh2 * sh2).abs() < 1e-13);
        assert!((s.c1 + sh2 * sh2).abs() < 1e-13);
    }

    #[test]
    fn aw_residual_zero_inputs() {
        let c = ctx();
        let z = Matrix::<f64>::zeros(3, 3);
        let zeros: [Param<f64>; 6] = std::array::from_fn(|_| Param::Scalar(0.0));
        let r = aw_residual(&c, &z, &z, &zeros).unwrap();
        assert_eq!(r.max_rel(), 0.0);

        let a: [Param<f64>; 6] = std::array::from_fn(|i| Param::Scalar(0.3 + i as f64));
        let r = aw_residual(&c, &z, &z, &a).unwrap();
        let s = c.s1sq();
        let c1 = c.ch(1.0);
        let d1 = c1 * (1.3 * 3.3 * 5.3 + s * 0.3 * 2.3);
        let d0 = c1 * (0.3 * 3.3 * 4.3 + s * 1.3 * 2.3);
        assert!((r.components[0][(1, 1)] + d1).abs() < 1e-12);
        assert!((r.components[1][(2, 2)] + d0).abs() < 1e-12);
        assert_eq!(r.components[0][(0, 1)], 0.0);
    }

    #[test]
    fn single_point_rep() {
        let c = ctx();
        let p = AlphaParams::finite(&c, 0.3, 0.8, 0.2, 0);
        let rep = build_rep(&c, &p, 0).unwrap();
        assert!((rep.k[(0, 0)] - c.sh(0.3)).abs() < 1e-15);
        let a: [Param<f64>; 6] = p.consts(&c).map(Param::Scalar);
        assert!(aw_residual(&c, &rep.k, &rep.l, &a).unwrap().max_rel() < 1e-13);
    }

    #[test]
    fn eigenvalue_differences() {
        let c = ctx();
        for n in [-1.5, -0.5, 0.0, 1.0, 2.5] {
            let d = lambda(&c, 0.3, n) - lambda(&c, 0.3, n - 1.0);
            assert!((d - c.sh(1.0) * c.ch(2.0 * n + 0.3 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn tilde_sign_relation_and_boundary() {
        let c = ctx();
        let al = [0.2, -0.7, 0.4, -4.0];
        for n in [-1.0, 0.0, 1.5] {
            let (at2, _) = tilde_coeffs(&c, &al, n, TildeForm::Literal, BnForm::Corrected);
            assert!((at2 + an_sq(&c, &[0.2, 0.4, -0.7, -4.0], n)).abs() < 1e-12);
        }
        let (at2, _) = tilde_coeffs(&c, &al, -1.5, TildeForm::Literal, BnForm::Corrected);
        assert!(at2.abs() < 1e-12);
    }

    #[test]
    fn spectrum_identity_negative_control() {
        let c = ctx();
        let fake: Vec<f64> = (0..5).map(|n| n as f64).collect();
        let c1 = -c.sh(2.0).powi(2);
        assert!(spectrum_identities(&c, &fake, c1) > 1e-3);
        let two: Vec<f64> = (0..2).map(|k| lambda(&c, 0.3, half_index(k, 1))).collect();
        assert!(spectrum_identities(&c, &two, c1) < 1e-12);
    }

    #[test]
    fn dual_roots_examples() {
        let s = dual_roots(&[0.7, 0.7, 0.7, 0.7], DualVariant::Literal);
        assert!(s.iter().all(|x| (x - 0.7).abs() < 1e-15));
        let p = [0.1, 2.3, -0.4, 1.1];
        let s = dual_roots(&p, DualVariant::Symmetric);
        assert!((s[0] + s[1] - p[0] - p[1] - (p[2] + p[3] - p[0] - p[1])).abs() < 1e-15);
    }

    #[test]
    fn negative_weight_reports_index() {
        let c = QContext::new(0.5).unwrap();
        let p = AlphaParams::finite(&c, 0.3, 0.2, 0.1, 3);
        match build_rep(&c, &p, 3) {
            Err(AwError::NegativeWeight { location, .. }) => assert!(location.contains("k=")),
            Ok(_) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }

    fn rep_case(q: f64, n: usize) -> (QContext<f64>, AlphaParams<f64>, Aw3Rep<f64>) {
        let c = QContext::new(q).unwrap();
        let p = AlphaParams::finite(&c, 0.3, 0.8, 0.2, n);
        let rep = build_rep(&c, &p, n).unwrap();
        (c, p, rep)
    }

    #[test]
    fn representation_satisfies_relations() {
        for n in 1..=6 {
            let (c, p, rep) = rep_case(0.5, n);
            let a: [Param<f64>; 6] = p.consts(&c).map(Param::Scalar);
            let r = aw_residual(&c, &rep.k, &rep.l, &a).unwrap();
            assert!(r.max_rel() < 1e-12, "N={n}: {:?}", r.rel);
            let r = aw_residual_bcd(&c, &rep.k, &rep.l, &p.structure(&c)).unwrap();
            assert!(r.max_rel() < 1e-12);
            assert!(rep.boundary_sq[0].abs() < 1e-10 && rep.boundary_sq[1].abs() < 1e-10);
        }
    }

    #[test]
    fn literal_diagonal_fails() {
        let (c, p, _) = rep_case(0.5, 3);
        let rep = build_rep_with(&c, &p, 3, BnForm::Literal).unwrap();
        let a: [Param<f64>; 6] = p.consts(&c).map(Param::Scalar);
        assert!(aw_residual(&c, &rep.k, &rep.l, &a).unwrap().max_rel() > 1e-6);
    }

    #[test]
    fn casimir_is_scalar_and_matches_closed_form() {
        let (c, p, rep) = rep_case(0.7, 4);
        let s = p.structure(&c);
        let q = casimir_q(&c, &rep.k, &rep.l, &s).unwrap();
        let q0 = q[(0, 0)];
        let off = (&q - &Matrix::scalar(5, q0)).norm() / q.norm();
        assert!(off < 1e-11, "{off}");
        let closed = casimir_value_canonical(&c, &p.consts(&c));
        assert!((closed - q0).abs() / q0.abs().max(1.0) < 1e-10, "{closed} vs {q0}");
        let rf = root_forms(&c, &p.roots());
        assert!((rf.b - s.b).abs() < 1e-10);
        assert!((rf.d0 - s.d0).abs() < 1e-10);
        assert!((rf.d1 - s.d1).abs() < 1e-10);
    }

    #[test]
    fn char_poly_vanishes_on_scaled_roots() {
        let (c, p, rep) = rep_case(0.7, 3);
        let s = p.structure(&c);
        let q0 = casimir_q(&c, &rep.k, &rep.l, &s).unwrap()[(0, 0)];
        let cp = char_poly(&c, &s, q0);
        for v in PolyVariable::ALL {
            let worst = p
                .roots()
                .iter()
                .map(|&r| cp.rel_eval(v.image(&c, r)))
                .fold(0.0, f64::max);
            if v == PolyVariable::ScaledSinh {
                assert!(worst < 1e-10, "{worst}");
            } else {
                assert!(worst > 1e-6, "{v:?} {worst}");
            }
        }
    }

    #[test]
    fn symmetric_dual_roots_give_swapped_rep() {
        let (c, p, rep) = rep_case(0.7, 3);
        let s = p.structure(&c);
        let pr = p.roots();
        let mut res = Vec::new();
        for v in DualVariant::ALL {
            let sr = dual_roots(&pr, v);
            let r = rep_from_roots(&c, &sr, 3, s.b, s.d0)
                .and_then(|(x, y)| aw_residual_bcd(&c, &y, &x, &s).map(|r| r.max_rel()))
                .unwrap_or(f64::INFINITY);
            res.push(r);
        }
        assert!(res[0] > 1e-6, "{res:?}");
        assert!(res[1] < 1e-11, "{res:?}");
        let (x, _) = rep_from_roots(&c, &dual_roots(&pr, DualVariant::Symmetric), 3, s.b, s.d0).unwrap();
        let _ = rep;
        for j in 0..=3 {
            let mu = lambda(&c, p.alpha[1], half_index(j, 3));
            assert!((x[(j, j)] - mu).abs() < 1e-11);
        }
    }
}
