//! Univariate q-Racah polynomials: series and recurrence evaluation,
//! overlaps from a representation, weights, norms and Sears' transformation.

use crate::aw3::{an_sq, bn, half_index, lambda, AlphaParams, Aw3Rep, BnForm};
use crate::error::{AwError, Result};
use crate::linalg::{match_spectrum, sym_eig, Matrix};
use crate::qcore::{phi43_with_magnitude, qpoch, qpoch_inf, QContext, Real};

/// Parameters `(α, β, γ, δ)` together with the series base.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QRacahParams<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
    pub base: T,
}

impl<T: Real> QRacahParams<T> {
    /// Parameters attached to a rank-1 representation, base `q²`:
    /// `α = −q^{α0+α1+α2+α3}`, `β = q^{α0−α1−α2+α3}`, `γ = q^{2α3}`,
    /// `δ = −q^{2α1}`.
    pub fn from_alpha(ctx: &QContext<T>, p: &AlphaParams<T>) -> Self {
        let [a0, a1, a2, a3] = p.alpha;
        let two = T::from_f64(2.0);
        QRacahParams {
            alpha: -ctx.pow(a0 + a1 + a2 + a3),
            beta: ctx.pow(a0 - a1 - a2 + a3),
            gamma: ctx.pow(two * a3),
            delta: -ctx.pow(two * a1),
            base: ctx.q() * ctx.q(),
        }
    }

    /// `base^{−j} + γδ base^{j+1}`.
    pub fn y_grid(&self, j: usize) -> T {
        let bj = self.base.powi(j as i32);
        T::one() / bj + self.gamma * self.delta * bj * self.base
    }

    /// `N` with `γ·base = base^{−N}`, when it exists to `1e−10`.
    pub fn degree_bound(&self) -> Option<usize> {
        let x = (self.gamma * self.base).ln() / self.base.ln();
        let n = (-x.to_f64()).round();
        if n >= 0.0 && (x.to_f64() + n).abs() <= 1e-10 {
            Some(n as usize)
        } else {
            None
        }
    }
}

/// Rescaled overlap table: rows are variable indices, columns degrees.
#[derive(Clone, Debug)]
pub struct OverlapTable<T> {
    pub p: Matrix<T>,
}

impl<T: Real> OverlapTable<T> {
    pub fn n(&self) -> usize {
        self.p.rows() - 1
    }

    /// Largest relative entrywise difference.
    pub fn rel_diff(&self, other: &OverlapTable<T>) -> f64 {
        rel_diff(&self.p, &other.p)
    }
}

/// `max |a − b| / max(1, |b|)` over all entries.
pub fn rel_diff<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return f64::INFINITY;
    }
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| ((*x - *y).abs() / y.abs().max(T::one())).to_f64())
        .fold(0.0, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) })
}

/// `R_n(y_j; α, β, γ, δ | base)` as a terminating balanced `4phi3`.
pub fn qracah_eval<T: Real>(n: usize, j: usize, p: &QRacahParams<T>) -> Result<T> {
    qracah_eval_with_magnitude(n, j, p).map(|(v, _)| v)
}

/// `R_n(y_j)` together with `Σ|term|` of its series.
pub fn qracah_eval_with_magnitude<T: Real>(n: usize, j: usize, p: &QRacahParams<T>) -> Result<(T, T)> {
    let b = p.base;
    let bn_ = b.powi(n as i32);
    let bj = b.powi(j as i32);
    phi43_with_magnitude(
        [T::one() / bn_, p.alpha * p.beta * bn_ * b, T::one() / bj, p.gamma * p.delta * bj * b],
        [p.alpha * b, p.beta * p.delta * b, p.gamma * b],
        b,
        b,
        n,
    )
}

/// `Σ|term|` for every entry of the table, same layout as [`qracah_table`].
pub fn series_magnitudes<T: Real>(p: &QRacahParams<T>, n: usize) -> Result<Matrix<T>> {
    let mut m = Matrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        for k in 0..=n {
            m[(j, k)] = qracah_eval_with_magnitude(k, j, p)?.1;
        }
    }
    Ok(m)
}

/// Largest `Σ|term| / max(1, |R_n(y_j)|)` over the table: the factor by
/// which rounding in the parameters and the summation is amplified.
pub fn series_condition<T: Real>(p: &QRacahParams<T>, n: usize) -> Result<f64> {
    let mut worst = 1.0_f64;
    for j in 0..=n {
        for k in 0..=n {
            let (v, m) = qracah_eval_with_magnitude(k, j, p)?;
            worst = worst.max((m / v.abs().max(T::one())).to_f64());
        }
    }
    Ok(worst)
}

/// Bound on how entry errors of size `ε·mag` propagate into the weighted
/// Gram matrix: `max_{k,l} Σ_j w_jk (mag_jk |P_jl| + |P_jk| mag_jl)`.
pub fn orthogonality_amplification<T: Real>(w: &Matrix<T>, p: &Matrix<T>, mag: &Matrix<T>) -> f64 {
    let n = p.rows();
    let mut worst = 0.0_f64;
    for k in 0..n {
        for l in 0..n {
            let s = (0..n).fold(T::zero(), |acc, j| {
                acc + w[(j, k)].abs() * (mag[(j, k)] * p[(j, l)].abs() + p[(j, k)].abs() * mag[(j, l)])
            });
            worst = worst.max(s.to_f64());
        }
    }
    worst
}

/// Full `(N+1)×(N+1)` table of `qracah_eval`, row `j`, column `n`.
pub fn qracah_table<T: Real>(p: &QRacahParams<T>, n: usize) -> Result<OverlapTable<T>> {
    let mut m = Matrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        for k in 0..=n {
            m[(j, k)] = qracah_eval(k, j, p)?;
        }
    }
    Ok(OverlapTable { p: m })
}

/// Overlaps generated by the three-term recurrence of the tridiagonal
/// generator, normalised to a unit first row and column.
pub fn recurrence_eval<T: Real>(ctx: &QContext<T>, params: &AlphaParams<T>, n: usize) -> Result<OverlapTable<T>> {
    crate::aw3::validate_positivity(ctx, params, n)?;
    let al = &params.alpha;
    let a: Vec<T> = (0..=n)
        .map(|k| if k == 0 { T::zero() } else { an_sq(ctx, al, half_index(k, n)).sqrt() })
        .collect();
    let b: Vec<T> = (0..=n).map(|k| bn(ctx, al, half_index(k, n), BnForm::Corrected)).collect();
    let mut raw = Matrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        let mu = lambda(ctx, al[1], half_index(j, n));
        let mut prev = T::zero();
        let mut cur = T::one();
        raw[(j, 0)] = cur;
        for k in 0..n {
            let next = ((mu - b[k]) * cur - a[k] * prev) / a[k + 1];
            raw[(j, k + 1)] = next;
            prev = cur;
            cur = next;
        }
    }
    let p = Matrix::from_fn(n + 1, n + 1, |j, k| raw[(j, k)] / raw[(0, k)]);
    if !p.all_finite() {
        return Err(AwError::Overflow("recurrence overlaps".into()));
    }
    Ok(OverlapTable { p })
}

/// Raw overlaps `O[j, k] = ⟨φ_j, ψ_k⟩` with `φ_j` the eigenvectors of the
/// tridiagonal generator, matched to `sinh_q(2m(j) + α1)`.
pub fn rep_overlaps<T: Real>(ctx: &QContext<T>, rep: &Aw3Rep<T>) -> Result<Matrix<T>> {
    let n = rep.n;
    let es = sym_eig(&rep.l)?;
    let targets: Vec<T> = (0..=n)
        .map(|j| lambda(ctx, rep.params.alpha[1], half_index(j, n)))
        .collect();
    let tol = 1e-8;
    let (perm, worst) = match_spectrum(&es.values, &targets, 1e-10)?;
    if worst > tol {
        return Err(AwError::SpectrumMatch(format!(
            "eigenvalues miss the expected spectrum by {worst:e}"
        )));
    }
    Ok(Matrix::from_fn(n + 1, n + 1, |j, k| es.vectors[(k, perm[j])]))
}

/// `O[j,k] O[0,0] / (O[j,0] O[0,k])`.
pub fn double_ratio<T: Real>(o: &Matrix<T>) -> OverlapTable<T> {
    let p = Matrix::from_fn(o.rows(), o.cols(), |j, k| {
        o[(j, k)] / o[(j, 0)] * o[(0, 0)] / o[(0, k)]
    });
    OverlapTable { p }
}

pub fn overlap_from_rep<T: Real>(ctx: &QContext<T>, rep: &Aw3Rep<T>) -> Result<OverlapTable<T>> {
    Ok(double_ratio(&rep_overlaps(ctx, rep)?))
}

/// Weight oracle from eigenvectors: `(O[j,0] O[0,k] / O[0,0])²`.
pub fn weights_from_overlaps<T: Real>(o: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(o.rows(), o.cols(), |j, k| {
        let x = o[(j, 0)] * o[(0, k)] / o[(0, 0)];
        x * x
    })
}

/// Which constant the norm `h_n` carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormConstant {
    /// The infinite-product prefactor, literal reading.
    Literal,
    /// `h_0 = Σ_j ρ(j)` in closed form:
    /// `(γδb², γ/(αβ); b)_N / (γδb/α, γb/β; b)_N`.
    Rescaled,
}

impl NormConstant {
    pub const ALL: [NormConstant; 2] = [NormConstant::Literal, NormConstant::Rescaled];

    pub fn name(self) -> &'static str {
        match self {
            NormConstant::Literal => "literal infinite-product constant",
            NormConstant::Rescaled => "rescaled constant h_0 = sum_j rho(j)",
        }
    }
}

/// `ρ(m)`, the unnormalised weight at grid point `m`.
pub fn rho<T: Real>(m: usize, p: &QRacahParams<T>) -> T {
    let (a, be, g, d, b) = (p.alpha, p.beta, p.gamma, p.delta, p.base);
    let gd = g * d;
    let num = qpoch(a * b, b, m)
        * qpoch(be * d * b, b, m)
        * qpoch(g * b, b, m)
        * qpoch(gd * b, b, m)
        * (T::one() - gd * b.powi(2 * m as i32 + 1));
    let den = qpoch(b, b, m)
        * qpoch(gd * b / a, b, m)
        * qpoch(g * b / be, b, m)
        * qpoch(d * b, b, m)
        * (a * be * b).powi(m as i32)
        * (T::one() - gd * b);
    num / den
}

/// `h_n / h_0`.
pub fn norm_ratio<T: Real>(n: usize, p: &QRacahParams<T>) -> T {
    let (a, be, g, d, b) = (p.alpha, p.beta, p.gamma, p.delta, p.base);
    let ab = a * be;
    let num = (T::one() - ab * b)
        * (g * d * b).powi(n as i32)
        * qpoch(b, b, n)
        * qpoch(ab * b / g, b, n)
        * qpoch(a * b / d, b, n)
        * qpoch(be * b, b, n);
    let den = (T::one() - ab * b.powi(2 * n as i32 + 1))
        * qpoch(a * b, b, n)
        * qpoch(ab * b, b, n)
        * qpoch(be * d * b, b, n)
        * qpoch(g * b, b, n);
    num / den
}

/// `h_0` under the chosen constant.
pub fn norm_constant<T: Real>(ctx: &QContext<T>, p: &QRacahParams<T>, n: usize, which: NormConstant) -> Result<T> {
    let (a, be, g, d, b) = (p.alpha, p.beta, p.gamma, p.delta, p.base);
    let inv = |x: T| T::one() / x;
    let h0 = match which {
        NormConstant::Literal => {
            let mut num = T::one();
            for x in [inv(a), g / be, d / a, inv(be), g * d * b * b] {
                num *= qpoch_inf(ctx, x, b)?;
            }
            let mut den = T::one();
            for x in [inv(a * be * b), g * d * b / a, g * b / be, d * b] {
                den *= qpoch_inf(ctx, x, b)?;
            }
            num / den
        }
        NormConstant::Rescaled => {
            qpoch(g * d * b * b, b, n) * qpoch(g / (a * be), b, n)
                / (qpoch(g * d * b / a, b, n) * qpoch(g * b / be, b, n))
        }
    };
    if !h0.is_finite() || h0 == T::zero() {
        return Err(AwError::Pole(0));
    }
    Ok(h0)
}

/// Weight table `w(j, k) = ρ(j) / h_k`.
#[derive(Clone, Debug)]
pub struct WeightTable<T> {
    pub w: Matrix<T>,
    pub rho: Vec<T>,
    pub h: Vec<T>,
    pub constant: NormConstant,
    /// False when some weight is not strictly positive.
    pub positive: bool,
}

pub fn weights<T: Real>(
    ctx: &QContext<T>,
    params: &AlphaParams<T>,
    n: usize,
    which: NormConstant,
) -> Result<WeightTable<T>> {
    weights_for(ctx, &QRacahParams::from_alpha(ctx, params), n, which)
}

pub fn weights_for<T: Real>(
    ctx: &QContext<T>,
    p: &QRacahParams<T>,
    n: usize,
    which: NormConstant,
) -> Result<WeightTable<T>> {
    let h0 = norm_constant(ctx, p, n, which)?;
    let rho: Vec<T> = (0..=n).map(|m| rho(m, p)).collect();
    let h: Vec<T> = (0..=n).map(|k| h0 * norm_ratio(k, p)).collect();
    for (k, x) in rho.iter().chain(&h).enumerate() {
        if !x.is_finite() || *x == T::zero() {
            return Err(AwError::Pole(k));
        }
    }
    let w = Matrix::from_fn(n + 1, n + 1, |j, k| rho[j] / h[k]);
    let positive = w.data().iter().all(|x| *x > T::zero());
    Ok(WeightTable { w, rho, h, constant: which, positive })
}

/// Gram matrix `G[k, k'] = Σ_j w(j, k) P(j, k) P(j, k')`.
pub fn orthogonality<T: Real>(w: &Matrix<T>, p: &OverlapTable<T>) -> Matrix<T> {
    let n = p.p.rows();
    Matrix::from_fn(n, n, |k, kk| {
        (0..n).fold(T::zero(), |acc, j| acc + w[(j, k)] * p.p[(j, k)] * p.p[(j, kk)])
    })
}

/// `max |G − I|`.
pub fn identity_defect<T: Real>(g: &Matrix<T>) -> f64 {
    (g - &Matrix::identity(g.rows())).max_abs().to_f64()
}

/// Terminating `4phi3(base^{−n}, a, b, c; d, e, f | base, base)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phi43Spec<T> {
    pub n: usize,
    /// `(a, b, c)`; the leading `base^{−n}` is implicit.
    pub num: [T; 3],
    pub den: [T; 3],
    pub base: T,
}

impl<T: Real> Phi43Spec<T> {
    pub fn eval(&self) -> Result<T> {
        self.eval_with_magnitude().map(|(v, _)| v)
    }

    /// Value and `Σ|term|`.
    pub fn eval_with_magnitude(&self) -> Result<(T, T)> {
        let b = self.base;
        let lead = T::one() / b.powi(self.n as i32);
        phi43_with_magnitude(
            [lead, self.num[0], self.num[1], self.num[2]],
            self.den,
            b,
            b,
            self.n,
        )
    }

    /// Relative defect of `def = abc·base^{1−n}`.
    pub fn balance_defect(&self) -> f64 {
        let [a, b, c] = self.num;
        let [d, e, f] = self.den;
        let rhs = a * b * c * self.base.powi(1 - self.n as i32);
        let lhs = d * e * f;
        ((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(T::from_f64(f64::MIN_POSITIVE))).to_f64()
    }
}

/// Sears' transformation of a balanced terminating `4phi3`:
/// `φ(base^{−n}, a, b, c; d, e, f) = a^n (d/a, f/a)_n / (d, f)_n ·
/// φ(base^{−n}, a, e/b, e/c; a base^{1−n}/d, e, a base^{1−n}/f)`.
///
/// Returns the transformed series and the prefactor.
pub fn sears_transform<T: Real>(s: &Phi43Spec<T>) -> Result<(Phi43Spec<T>, T)> {
    let defect = s.balance_defect();
    if defect > 1e-10 {
        return Err(AwError::BalanceViolation(defect));
    }
    let [a, b, c] = s.num;
    let [d, e, f] = s.den;
    let n = s.n;
    let shift = s.base.powi(1 - n as i32);
    let pre = a.powi(n as i32) * qpoch(d / a, s.base, n) * qpoch(f / a, s.base, n)
        / (qpoch(d, s.base, n) * qpoch(f, s.base, n));
    let out = Phi43Spec {
        n,
        num: [a, e / b, e / c],
        den: [a * shift / d, e, a * shift / f],
        base: s.base,
    };
    Ok((out, pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aw3::build_rep;

    fn setup(q: f64, n: usize) -> (QContext<f64>, AlphaParams<f64>) {
        let c = QContext::new(q).unwrap();
        let p = AlphaParams::finite(&c, 0.3, 0.8, 0.2, n);
        (c, p)
    }

    #[test]
    fn grid_examples() {
        let p = QRacahParams { alpha: 0.1, beta: 0.2, gamma: 0.3, delta: 0.5, base: 0.49 };
        assert!((p.y_grid(0) - (1.0 + 0.15 * 0.49)).abs() < 1e-15);
        let z = QRacahParams { delta: 0.0, ..p };
        assert!((z.y_grid(3) - 0.49f64.powi(-3)).abs() < 1e-12);
    }

    #[test]
    fn series_trivial_values() {
        let (c, p) = setup(0.7, 4);
        let r = QRacahParams::from_alpha(&c, &p);
        assert_eq!(r.degree_bound(), Some(4));
        for k in 0..=4 {
            assert_eq!(qracah_eval(0, k, &r).unwrap(), 1.0);
            assert!((qracah_eval(k, 0, &r).unwrap() - 1.0).abs() < 1e-13);
        }
        let (a, be, g, d, b) = (r.alpha, r.beta, r.gamma, r.delta, r.base);
        let hand = 1.0
            + (1.0 - 1.0 / b) * (1.0 - a * be * b * b) * (1.0 - 1.0 / b) * (1.0 - g * d * b * b) * b
                / ((1.0 - a * b) * (1.0 - be * d * b) * (1.0 - g * b) * (1.0 - b));
        assert!((qracah_eval(1, 1, &r).unwrap() - hand).abs() < 1e-12);
    }

    #[test]
    fn three_paths_agree() {
        for n in 1..=6 {
            let (c, p) = setup(0.5, n);
            let rec = recurrence_eval(&c, &p, n).unwrap();
            let ser = qracah_table(&QRacahParams::from_alpha(&c, &p), n).unwrap();
            let rep = overlap_from_rep(&c, &build_rep(&c, &p, n).unwrap()).unwrap();
            assert!(rec.rel_diff(&ser) < 1e-9, "N={n}");
            assert!(rep.rel_diff(&ser) < 1e-9, "N={n}");
        }
    }

    #[test]
    fn n1_recurrence_by_hand() {
        let (c, p) = setup(0.8, 1);
        let rec = recurrence_eval(&c, &p, 1).unwrap();
        let b0 = bn(&c, &p.alpha, -0.5, BnForm::Corrected);
        let mu = |j| lambda(&c, 0.8, half_index(j, 1));
        let expect = (mu(1) - b0) / (mu(0) - b0);
        assert!((rec.p[(1, 1)] - expect).abs() < 1e-12);
    }

    #[test]
    fn rescaled_weights_normalise() {
        let (c, p) = setup(0.7, 5);
        let ser = qracah_table(&QRacahParams::from_alpha(&c, &p), 5).unwrap();
        let w = weights(&c, &p, 5, NormConstant::Rescaled).unwrap();
        assert!(w.positive);
        assert!(identity_defect(&orthogonality(&w.w, &ser)) < 1e-10);
        let total: f64 = w.rho.iter().sum();
        assert!((total / w.h[0] - 1.0).abs() < 1e-12);
        let o = rep_overlaps(&c, &build_rep(&c, &p, 5).unwrap()).unwrap();
        assert!(rel_diff(&weights_from_overlaps(&o), &w.w) < 1e-9);
        let literal = weights(&c, &p, 5, NormConstant::Literal).unwrap();
        assert!(identity_defect(&orthogonality(&literal.w, &ser)) > 1e-3);
    }

    #[test]
    fn duality_swap_transposes() {
        let (c, p) = setup(0.7, 4);
        let [a0, a1, a2, a3] = p.alpha;
        let sw = AlphaParams { alpha: [a1, a0, -a2, a3], ..p };
        let t1 = qracah_table(&QRacahParams::from_alpha(&c, &p), 4).unwrap();
        let t2 = qracah_table(&QRacahParams::from_alpha(&c, &sw), 4).unwrap();
        assert!(rel_diff(&t1.p.transpose(), &t2.p) < 1e-9);
    }

    #[test]
    fn sears_examples() {
        let b = 0.49;
        let n = 3;
        let (a, bb, c, d, e) = (0.3, -0.8, 1.7, 0.45, -0.6);
        let f = a * bb * c * b.powi(1 - n as i32) / (d * e);
        let s = Phi43Spec { n, num: [a, bb, c], den: [d, e, f], base: b };
        let (t, pre) = sears_transform(&s).unwrap();
        let lhs = s.eval().unwrap();
        assert!((lhs - pre * t.eval().unwrap()).abs() / lhs.abs() < 1e-10);
        let (t2, pre2) = sears_transform(&t).unwrap();
        assert!((lhs - pre * pre2 * t2.eval().unwrap()).abs() / lhs.abs() < 1e-10);

        let z = Phi43Spec { n: 0, num: [a, bb, c], den: [d, e, a * bb * c * b / (d * e)], base: b };
        let (tz, pz) = sears_transform(&z).unwrap();
        assert_eq!((z.eval().unwrap(), tz.eval().unwrap(), pz), (1.0, 1.0, 1.0));

        let bad = Phi43Spec { den: [d, e, f * 1.01], ..s };
        assert!(matches!(sears_transform(&bad), Err(AwError::BalanceViolation(_))));
    }
}
