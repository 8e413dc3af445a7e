//! Rank-2 algebra on the `(n1, n2)` grid: generator matrices, relation and
//! stencil checks, bivariate overlaps, the product formula and the
//! correspondence with the Gasper–Rahman bivariate polynomials.

use std::collections::HashMap;

use crate::aw3::{
    an_sq, aw_residual, bn, half_index, lambda, locality_residual, tilde_coeffs, AlphaParams, BnForm, Param,
    TildeForm,
};
use crate::error::{AwError, Result};
use crate::linalg::{block_refine, comm_residual, match_spectrum, sym_eig, Matrix};
use crate::qcore::{QContext, Real};
use crate::qracah::{
    double_ratio, qracah_eval, qracah_eval_with_magnitude, rel_diff, series_condition, weights_for, NormConstant, Phi43Spec, QRacahParams, sears_transform,
};

/// Grid of doubled labels `(2n1, 2n2)`, ordered with `k2` outer and `k1`
/// inner, where `2n1 = 2k1 + 2k2 − N1 − N2` and `2n2 = 2k2 − N2`.
#[derive(Clone, Debug)]
pub struct Grid2 {
    pub n1: usize,
    pub n2: usize,
    states: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
}

impl Grid2 {
    pub fn new(n1: usize, n2: usize) -> Self {
        let mut states = Vec::with_capacity((n1 + 1) * (n2 + 1));
        for k2 in 0..=n2 as i64 {
            for k1 in 0..=n1 as i64 {
                states.push((2 * k1 + 2 * k2 - n1 as i64 - n2 as i64, 2 * k2 - n2 as i64));
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Grid2 { n1, n2, states, index }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[(i64, i64)] {
        &self.states
    }

    pub fn position(&self, t1: i64, t2: i64) -> Option<usize> {
        self.index.get(&(t1, t2)).copied()
    }

    /// `(k1, k2)` of a position.
    pub fn k_indices(&self, i: usize) -> (usize, usize) {
        (i % (self.n1 + 1), i / (self.n1 + 1))
    }

    /// `(n1, n2)` of a position.
    pub fn labels<T: Real>(&self, i: usize) -> (T, T) {
        let (t1, t2) = self.states[i];
        (T::from_f64(t1 as f64 / 2.0), T::from_f64(t2 as f64 / 2.0))
    }
}

/// Reading of the undefined coupling constant in the nine-term
/// coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingReading {
    /// `cosh_q(N2 + 1)`.
    DimN2,
    /// `cosh_q(N1 + 1)`.
    DimN1,
}

impl CouplingReading {
    pub const ALL: [CouplingReading; 2] = [CouplingReading::DimN2, CouplingReading::DimN1];

    pub fn name(self) -> &'static str {
        match self {
            CouplingReading::DimN2 => "cosh_q(N2+1)",
            CouplingReading::DimN1 => "cosh_q(N1+1)",
        }
    }
}

/// Build options.
#[derive(Clone, Copy, Debug)]
pub struct Aw2Options {
    pub coupling: CouplingReading,
    pub tilde: TildeForm,
    /// Relative perturbation of one diagonal entry of `L2`.
    pub corrupt: Option<f64>,
}

impl Default for Aw2Options {
    fn default() -> Self {
        Aw2Options {
            coupling: CouplingReading::DimN2,
            tilde: TildeForm::Reflected,
            corrupt: None,
        }
    }
}

/// The five generators as matrices over the grid.
#[derive(Clone, Debug)]
pub struct Aw2Rep<T> {
    pub grid: Grid2,
    pub one_k1: Matrix<T>,
    pub k2: Matrix<T>,
    pub l1_one: Matrix<T>,
    pub l2: Matrix<T>,
    pub m2: Matrix<T>,
    pub a0: T,
    pub a1: T,
    pub a2: T,
    pub a_n1: T,
    pub a_n2: T,
    pub coupling: T,
    pub alpha: [T; 3],
    /// Largest relative gap between the two closed forms of the diagonal
    /// of `L2`.
    pub e_consistency: f64,
    /// Largest squared coefficient met at a link leaving the grid.
    pub boundary_worst: f64,
}

/// Offsets of the nine-term stencil in doubled labels.
pub const STENCIL_OFFSETS: [(i64, i64); 9] = [
    (0, 0),
    (-2, 0),
    (2, 0),
    (0, -2),
    (0, 2),
    (-2, -2),
    (2, 2),
    (-2, 2),
    (2, -2),
];

/// Block parameters of the `L1` three-term action at fixed `n2`.
pub fn alpha_l1<T: Real>(alpha: &[T; 3], n1: usize, n2: T) -> [T; 4] {
    let two = T::from_f64(2.0);
    [alpha[0] + two * n2, alpha[1], alpha[2], -T::from_i64(n1 as i64 + 1)]
}

/// Block parameters of the `M2` three-term action at fixed `n1`.
pub fn alpha_m2<T: Real>(alpha: &[T; 3], n1: usize, n2: usize, label1: T) -> [T; 4] {
    let two = T::from_f64(2.0);
    [
        alpha[0],
        -T::from_i64(n1 as i64 + 1),
        -(alpha[0] + two * label1),
        -T::from_i64(n2 as i64 + 1),
    ]
}

/// Block parameters of the second-factor action at fixed `m1`.
pub fn alpha_k1<T: Real>(alpha: &[T; 3], n2: usize, m1: T) -> [T; 4] {
    let two = T::from_f64(2.0);
    [alpha[1] + two * m1, alpha[0], alpha[2], -T::from_i64(n2 as i64 + 1)]
}

struct Coeffs<'a, T: Real> {
    ctx: &'a QContext<T>,
    grid: &'a Grid2,
    alpha: [T; 3],
    n1: usize,
    n2: usize,
    tilde: TildeForm,
    a_consts: [T; 3],
    coupling: T,
}

impl<T: Real> Coeffs<'_, T> {
    fn al_sq(&self, n1: T, n2: T) -> T {
        an_sq(self.ctx, &alpha_l1(&self.alpha, self.n1, n2), n1 - n2)
    }

    fn bl(&self, n1: T, n2: T) -> T {
        bn(self.ctx, &alpha_l1(&self.alpha, self.n1, n2), n1 - n2, BnForm::Corrected)
    }

    fn tilde(&self, n1: T, n2: T) -> (T, T) {
        tilde_coeffs(
            self.ctx,
            &alpha_m2(&self.alpha, self.n1, self.n2, n1),
            n2,
            self.tilde,
            BnForm::Corrected,
        )
    }

    fn root(&self, v: T, what: &str, n1: T, n2: T) -> Result<T> {
        if v < T::from_f64(-1e-12) {
            return Err(AwError::NegativeWeight {
                location: format!("{what} at (n1, n2) = ({}, {})", n1.to_f64(), n2.to_f64()),
                value: v.to_f64(),
            });
        }
        Ok(v.max(T::zero()).sqrt())
    }

    fn al(&self, n1: T, n2: T) -> Result<T> {
        self.root(self.al_sq(n1, n2), "L1 block a^2", n1, n2)
    }

    fn am(&self, n1: T, n2: T) -> Result<T> {
        self.root(self.tilde(n1, n2).0, "M2 block a~^2", n1, n2)
    }

    fn cc(&self, n: T) -> T {
        let x = n + n + self.alpha[0];
        self.ctx.cosh_q(x - T::one()) * self.ctx.cosh_q(x + T::one())
    }

    fn lam(&self, n: T) -> T {
        lambda(self.ctx, self.alpha[0], n)
    }

    fn d(&self, n1: T, n2: T) -> Result<T> {
        let [_, a1, a2] = self.a_consts;
        let c1 = self.ctx.ch(1.0);
        Ok(self.am(n1, n2)? * (c1 * a1 - a2 * self.lam(n1)) / self.cc(n1))
    }

    fn e(&self, n1: T, n2: T) -> T {
        let [a0, a1, a2] = self.a_consts;
        let c1 = self.ctx.ch(1.0);
        let l = self.lam(n1);
        (self.tilde(n1, n2).1 * (c1 * a1 - a2 * l) + a0 * (a1 * l + c1 * a2)) / self.cc(n1)
    }

    fn e_alt(&self, n1: T, n2: T) -> T {
        let [a0, _, a2] = self.a_consts;
        let a3 = self.coupling;
        let c1 = self.ctx.ch(1.0);
        let l = self.lam(n2);
        (self.bl(n1, n2) * (a0 * l + c1 * a3) - a2 * (a3 * l - c1 * a0)) / self.cc(n2)
    }

    fn b(&self, n1: T, n2: T) -> Result<T> {
        let a0 = self.a_consts[0];
        let c1 = self.ctx.ch(1.0);
        Ok(self.al(n1, n2)? * (a0 * self.lam(n2) + c1 * self.coupling) / self.cc(n2))
    }

    fn corner_den(&self, v: T, n1: T, n2: T) -> Result<T> {
        if v.abs() < T::from_f64(1e-8) {
            return Err(AwError::InvalidContext(format!(
                "corner denominator {:e} degenerate at (n1, n2) = ({}, {})",
                v.to_f64(),
                n1.to_f64(),
                n2.to_f64()
            )));
        }
        Ok(v)
    }

    fn on_grid(&self, n1: T, n2: T) -> bool {
        let t = |x: T| (2.0 * x.to_f64()).round() as i64;
        self.grid.position(t(n1), t(n2)).is_some()
    }

    /// Two-step path product through `via`; zero when `via` is off the grid,
    /// where the vanishing boundary coefficient kills the term.
    fn path(&self, via: (T, T), f: impl FnOnce() -> Result<T>) -> Result<T> {
        if self.on_grid(via.0, via.1) {
            f()
        } else {
            Ok(T::zero())
        }
    }

    /// Coefficient towards `(n1−1, n2−1)`.
    fn a_corner(&self, n1: T, n2: T) -> Result<T> {
        let one = T::one();
        let den = self.corner_den(self.bl(n1 - one, n2 - one) - self.bl(n1, n2), n1, n2)?;
        let first = self.path((n1 - one, n2), || Ok(self.al(n1, n2)? * self.d(n1 - one, n2)?))?;
        let second = self.path((n1, n2 - one), || Ok(self.al(n1, n2 - one)? * self.d(n1, n2)?))?;
        Ok((first - second) / den)
    }

    /// Coefficient towards `(n1−1, n2+1)`.
    fn c_corner(&self, n1: T, n2: T) -> Result<T> {
        let one = T::one();
        let den = self.corner_den(self.bl(n1 - one, n2 + one) - self.bl(n1, n2), n1, n2)?;
        let first = self.path((n1 - one, n2), || Ok(self.al(n1, n2)? * self.d(n1 - one, n2 + one)?))?;
        let second = self.path((n1, n2 + one), || Ok(self.al(n1, n2 + one)? * self.d(n1, n2 + one)?))?;
        Ok((first - second) / den)
    }
}

fn place<T: Real>(m: &mut Matrix<T>, i: usize, j: usize, v: T) {
    m[(i, j)] = v;
    m[(j, i)] = v;
}

/// Rejects `N1 = 0` with `N2 > 0`: the grid collapses onto the diagonal and
/// every corner coefficient becomes the indeterminate form 0/0.
pub fn check_dims(n1: usize, n2: usize) -> Result<()> {
    if n1 == 0 && n2 > 0 {
        return Err(AwError::InvalidContext(format!(
            "rank-2 construction needs N1 >= 1 when N2 >= 1 (got N1 = 0, N2 = {n2}): corner coefficients are 0/0"
        )));
    }
    Ok(())
}

/// Builds the five generators in the joint eigenbasis of `1⊗K1` and `K2`.
pub fn build_aw2<T: Real>(
    ctx: &QContext<T>,
    n1: usize,
    n2: usize,
    alpha: [T; 3],
    opts: &Aw2Options,
) -> Result<Aw2Rep<T>> {
    check_dims(n1, n2)?;
    let grid = Grid2::new(n1, n2);
    let dim = grid.len();
    let a_n1 = ctx.ch(n1 as f64 + 1.0);
    let a_n2 = ctx.ch(n2 as f64 + 1.0);
    let consts = [ctx.sinh_q(alpha[0]), ctx.sinh_q(alpha[1]), ctx.cosh_q(alpha[2])];
    let coupling = match opts.coupling {
        CouplingReading::DimN2 => a_n2,
        CouplingReading::DimN1 => a_n1,
    };
    let cf = Coeffs { ctx, grid: &grid, alpha, n1, n2, tilde: opts.tilde, a_consts: consts, coupling };

    // Squared coefficients on links that leave the grid must vanish.
    let mut sq_scale = T::one();
    let mut boundary: Vec<T> = Vec::new();
    for (i, &(t1, t2)) in grid.states().iter().enumerate() {
        let (x1, x2): (T, T) = grid.labels(i);
        let one = T::one();
        let l_down = cf.al_sq(x1, x2);
        let l_up = cf.al_sq(x1 + one, x2);
        let m_down = cf.tilde(x1, x2).0;
        let m_up = cf.tilde(x1, x2 + one).0;
        for (v, nb) in [
            (l_down, grid.position(t1 - 2, t2)),
            (l_up, grid.position(t1 + 2, t2)),
            (m_down, grid.position(t1, t2 - 2)),
            (m_up, grid.position(t1, t2 + 2)),
        ] {
            match nb {
                Some(_) => sq_scale = sq_scale.max(v.abs()),
                None => boundary.push(v.abs()),
            }
        }
    }
    let boundary_worst = boundary
        .iter()
        .fold(T::zero(), |m, v| m.max(*v))
        .to_f64()
        / sq_scale.to_f64();
    if !(boundary_worst <= 1e-12) {
        return Err(AwError::IndexError(format!(
            "coefficient on a link leaving the grid is {boundary_worst:e}, expected 0"
        )));
    }

    let mut one_k1 = Matrix::zeros(dim, dim);
    let mut k2 = Matrix::zeros(dim, dim);
    let mut l1 = Matrix::zeros(dim, dim);
    let mut m2 = Matrix::zeros(dim, dim);
    let mut l2 = Matrix::zeros(dim, dim);
    let mut e_consistency = 0.0_f64;
    for (i, &(t1, t2)) in grid.states().iter().enumerate() {
        let (x1, x2): (T, T) = grid.labels(i);
        one_k1[(i, i)] = cf.lam(x2);
        k2[(i, i)] = cf.lam(x1);
        l1[(i, i)] = cf.bl(x1, x2);
        m2[(i, i)] = cf.tilde(x1, x2).1;
        let e = cf.e(x1, x2);
        let e_alt = cf.e_alt(x1, x2);
        e_consistency = e_consistency.max(((e - e_alt).abs() / e.abs().max(T::one())).to_f64());
        l2[(i, i)] = e;
        if let Some(j) = grid.position(t1 - 2, t2) {
            place(&mut l1, i, j, cf.al(x1, x2)?);
            place(&mut l2, i, j, cf.b(x1, x2)?);
        }
        if let Some(j) = grid.position(t1, t2 - 2) {
            place(&mut m2, i, j, cf.am(x1, x2)?);
            place(&mut l2, i, j, cf.d(x1, x2)?);
        }
        if let Some(j) = grid.position(t1 - 2, t2 - 2) {
            place(&mut l2, i, j, cf.a_corner(x1, x2)?);
        }
        if let Some(j) = grid.position(t1 - 2, t2 + 2) {
            place(&mut l2, i, j, cf.c_corner(x1, x2)?);
        }
    }
    if let Some(delta) = opts.corrupt {
        let i = dim / 2;
        let v = l2[(i, i)];
        l2[(i, i)] = v + T::from_f64(delta) * v.abs().max(T::one());
    }
    for m in [&one_k1, &k2, &l1, &m2, &l2] {
        if !m.all_finite() {
            return Err(AwError::Overflow("rank-2 generator entries".into()));
        }
    }
    Ok(Aw2Rep {
        grid,
        one_k1,
        k2,
        l1_one: l1,
        l2,
        m2,
        a0: consts[0],
        a1: consts[1],
        a2: consts[2],
        a_n1,
        a_n2,
        coupling,
        alpha,
        e_consistency,
        boundary_worst,
    })
}

/// Sign of the operator-valued entry in the two relations that mix `M2`
/// with the other generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixedSign {
    /// `+K2` and `+L2`, literal reading.
    Plus,
    /// `−K2` and `−L2`.
    Minus,
}

impl MixedSign {
    pub const ALL: [MixedSign; 2] = [MixedSign::Plus, MixedSign::Minus];

    pub fn name(self) -> &'static str {
        match self {
            MixedSign::Plus => "+K2 / +L2",
            MixedSign::Minus => "-K2 / -L2",
        }
    }
}

/// Residual of one relation together with its locality defect.
#[derive(Clone, Debug)]
pub struct RelationResult {
    pub id: &'static str,
    pub relation: f64,
    pub locality: f64,
}

/// Relation id, the generator pair and the six structure parameters.
type RelationRow<'a, T> = (&'static str, &'a Matrix<T>, &'a Matrix<T>, [Param<T>; 6]);

pub fn verify_aw2_relations<T: Real>(
    ctx: &QContext<T>,
    rep: &Aw2Rep<T>,
    sign: MixedSign,
) -> Result<Vec<RelationResult>> {
    let s = ctx.s1sq();
    let sc = |x: T| Param::Scalar(x);
    let m = |x: &Matrix<T>| Param::Matrix(x.clone());
    let (k2x, l2x) = match sign {
        MixedSign::Plus => (rep.k2.clone(), rep.l2.clone()),
        MixedSign::Minus => (-&rep.k2, -&rep.l2),
    };
    let rows: Vec<RelationRow<'_, T>> = vec![
        ("aw1", &rep.k2, &rep.l2, [sc(rep.a0), sc(rep.a1), sc(rep.a2), m(&rep.m2), sc(s), sc(s)]),
        ("aw4", &rep.one_k1, &rep.l2, [sc(rep.a0), m(&rep.l1_one), sc(rep.a2), sc(rep.a_n2), sc(s), sc(s)]),
        ("aw5", &rep.k2, &rep.l1_one, [m(&rep.one_k1), sc(rep.a1), sc(rep.a2), sc(rep.a_n1), sc(s), sc(s)]),
        ("aw6", &rep.one_k1, &rep.m2, [sc(rep.a0), sc(rep.a_n1), m(&k2x), sc(rep.a_n2), sc(-s), sc(s)]),
        ("aw7", &rep.m2, &rep.l1_one, [sc(rep.a_n2), sc(rep.a1), m(&l2x), sc(rep.a_n1), sc(s), sc(-s)]),
    ];
    rows.into_iter()
        .map(|(id, k, l, params)| {
            Ok(RelationResult {
                id,
                relation: aw_residual(ctx, k, l, &params)?.max_rel(),
                locality: locality_residual(&params, k, l)?,
            })
        })
        .collect()
}

/// Commutators `[1⊗K1, K2]`, `[L1⊗1, L2]`, `[M2, K2]`, `[M2, L2]`.
pub fn aw2_commutators<T: Real>(rep: &Aw2Rep<T>) -> Result<Vec<(&'static str, f64)>> {
    Ok(vec![
        ("[1(x)K1,K2]", comm_residual(&rep.one_k1, &rep.k2)?),
        ("[L1(x)1,L2]", comm_residual(&rep.l1_one, &rep.l2)?),
        ("[M2,K2]", comm_residual(&rep.m2, &rep.k2)?),
        ("[M2,L2]", comm_residual(&rep.m2, &rep.l2)?),
    ])
}

/// Sparsity and consistency checks of the constructed operators.
#[derive(Clone, Debug)]
pub struct StencilReport {
    /// Largest `L2` entry between `1⊗K1` eigenspaces more than one step
    /// apart, relative to `‖L2‖`.
    pub projector_k1: f64,
    /// Same for the eigenspaces of `K2`.
    pub projector_k2: f64,
    /// Largest `L2` entry outside the nine-term stencil, relative.
    pub off_stencil: f64,
    /// Largest `M2` entry outside its three-term band, relative.
    pub m2_band: f64,
    /// Largest `L1⊗1` entry outside its three-term band, relative.
    pub l1_band: f64,
    pub e_consistency: f64,
    pub boundary: f64,
}

/// Projector-based sparsity: eigenspaces are recovered from the diagonal
/// operators themselves, not from the grid labels.
pub fn stencil_checks<T: Real>(rep: &Aw2Rep<T>) -> StencilReport {
    let dim = rep.grid.len();
    let group = |d: &Matrix<T>| -> Vec<usize> {
        let mut vals: Vec<f64> = d.diag().iter().map(|x| x.to_f64()).collect();
        let raw = vals.clone();
        vals.sort_by(f64::total_cmp);
        vals.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
        raw.iter()
            .map(|v| vals.iter().position(|u| (u - v).abs() <= 1e-9 * u.abs().max(1.0)).expect("grouped"))
            .collect()
    };
    let gk1 = group(&rep.one_k1);
    let gk2 = group(&rep.k2);
    let norm = |m: &Matrix<T>| m.norm().to_f64().max(f64::MIN_POSITIVE);
    let (nl2, nm2, nl1) = (norm(&rep.l2), norm(&rep.m2), norm(&rep.l1_one));
    let mut r = StencilReport {
        projector_k1: 0.0,
        projector_k2: 0.0,
        off_stencil: 0.0,
        m2_band: 0.0,
        l1_band: 0.0,
        e_consistency: rep.e_consistency,
        boundary: rep.boundary_worst,
    };
    let states = rep.grid.states();
    for i in 0..dim {
        for j in 0..dim {
            let l2 = rep.l2[(i, j)].abs().to_f64() / nl2;
            if gk1[i].abs_diff(gk1[j]) > 1 {
                r.projector_k1 = r.projector_k1.max(l2);
            }
            if gk2[i].abs_diff(gk2[j]) > 1 {
                r.projector_k2 = r.projector_k2.max(l2);
            }
            let d = (states[j].0 - states[i].0, states[j].1 - states[i].1);
            if !STENCIL_OFFSETS.contains(&d) {
                r.off_stencil = r.off_stencil.max(l2);
            }
            if d.0 != 0 || d.1.abs() > 2 {
                r.m2_band = r.m2_band.max(rep.m2[(i, j)].abs().to_f64() / nm2);
            }
            if d.1 != 0 || d.0.abs() > 2 {
                r.l1_band = r.l1_band.max(rep.l1_one[(i, j)].abs().to_f64() / nl1);
            }
        }
    }
    r
}

/// `L2` coefficients per grid state in [`STENCIL_OFFSETS`] order; zero
/// where the neighbour is off the grid.
pub fn stencil_rows<T: Real>(rep: &Aw2Rep<T>) -> Vec<((i64, i64), [T; 9])> {
    rep.grid
        .states()
        .iter()
        .enumerate()
        .map(|(i, &(t1, t2))| {
            let mut row = [T::zero(); 9];
            for (c, (d1, d2)) in STENCIL_OFFSETS.iter().enumerate() {
                if let Some(j) = rep.grid.position(t1 + d1, t2 + d2) {
                    row[c] = rep.l2[(i, j)];
                }
            }
            ((t1, t2), row)
        })
        .collect()
}

/// Joint eigenbasis of `L1⊗1` and `L2`.
#[derive(Clone, Debug)]
pub struct PhiBasis<T> {
    /// Column `j2 + (N2+1)·j1` is the vector labelled `(j1, j2)`.
    pub vectors: Matrix<T>,
    pub labels: Vec<(usize, usize)>,
    /// Largest relative mismatch of an eigenvalue to its closed form.
    pub spectrum_error: f64,
}

pub fn phi_basis<T: Real>(ctx: &QContext<T>, rep: &Aw2Rep<T>) -> Result<PhiBasis<T>> {
    let (n1, n2) = (rep.grid.n1, rep.grid.n2);
    let a1 = rep.alpha[1];
    let es = sym_eig(&rep.l1_one)?;
    let mu1: Vec<T> = (0..=n1).map(|j| lambda(ctx, a1, half_index(j, n1))).collect();
    let mut labels = Vec::with_capacity(es.values.len());
    let mut worst = 0.0_f64;
    for v in &es.values {
        let (j, d) = mu1
            .iter()
            .enumerate()
            .map(|(j, m)| (j, ((*v - *m).abs() / m.abs().max(T::one())).to_f64()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("spectrum");
        worst = worst.max(d);
        labels.push(j);
    }
    for j in 0..=n1 {
        let count = labels.iter().filter(|&&l| l == j).count();
        if count != n2 + 1 {
            return Err(AwError::SpectrumMatch(format!(
                "eigenvalue for j1={j} has multiplicity {count}, expected {}",
                n2 + 1
            )));
        }
    }
    if worst > 1e-8 {
        return Err(AwError::SpectrumMatch(format!("L1 spectrum off by {worst:e}")));
    }
    let refined = block_refine(&labels, &rep.l2, &es.vectors)?;
    let dim = rep.grid.len();
    let mut vectors = Matrix::zeros(dim, dim);
    let mut out_labels = vec![(0, 0); dim];
    for j1 in 0..=n1 {
        let cols: Vec<usize> = (0..dim).filter(|&c| refined.labels[c] == j1).collect();
        let vals: Vec<T> = cols.iter().map(|&c| refined.values[c]).collect();
        let m1: T = half_index(j1, n1);
        let targets: Vec<T> = (0..=n2)
            .map(|j2| {
                let m2 = T::from_f64(j2 as f64) + m1 - T::from_f64(n2 as f64 / 2.0);
                lambda(ctx, a1, m2)
            })
            .collect();
        let (perm, err) = match_spectrum(&vals, &targets, 1e-10)?;
        worst = worst.max(err);
        for (j2, &p) in perm.iter().enumerate() {
            let col = j2 + (n2 + 1) * j1;
            out_labels[col] = (j1, j2);
            for r in 0..dim {
                vectors[(r, col)] = refined.vectors[(r, cols[p])];
            }
        }
    }
    if worst > 1e-8 {
        return Err(AwError::SpectrumMatch(format!("L2 spectrum off by {worst:e}")));
    }
    Ok(PhiBasis { vectors, labels: out_labels, spectrum_error: worst })
}

/// Bivariate overlaps indexed `[j1][j2][k1][k2]`, flattened row-major.
#[derive(Clone, Debug)]
pub struct BivarTable<T> {
    pub n1: usize,
    pub n2: usize,
    pub p: Vec<T>,
    /// Absolute values of the unnormalised overlaps.
    pub abs_overlap: Vec<T>,
    /// Largest gap between `|global overlap|` and `|factorised overlap|`.
    pub global_mismatch: f64,
}

impl<T: Real> BivarTable<T> {
    pub fn idx(&self, j1: usize, j2: usize, k1: usize, k2: usize) -> usize {
        ((j1 * (self.n2 + 1) + j2) * (self.n1 + 1) + k1) * (self.n2 + 1) + k2
    }

    pub fn get(&self, j1: usize, j2: usize, k1: usize, k2: usize) -> T {
        self.p[self.idx(j1, j2, k1, k2)]
    }
}

fn block_tri<T: Real>(ctx: &QContext<T>, alpha: [T; 4], n: usize) -> Result<Matrix<T>> {
    let s = ctx.s1sq();
    let p = AlphaParams { alpha, a4: s, a5: s };
    Ok(crate::aw3::build_rep(ctx, &p, n)?.l)
}

/// `V[j, k]`: component `j` of the eigenvector whose eigenvalue matches
/// `targets[k]`.
fn matched_vectors<T: Real>(m: &Matrix<T>, targets: &[T]) -> Result<Matrix<T>> {
    let es = sym_eig(m)?;
    let (perm, err) = match_spectrum(&es.values, targets, 1e-10)?;
    if err > 1e-8 {
        return Err(AwError::SpectrumMatch(format!("block spectrum off by {err:e}")));
    }
    Ok(Matrix::from_fn(m.rows(), targets.len(), |j, k| es.vectors[(j, perm[k])]))
}

pub fn bivariate_overlaps<T: Real>(ctx: &QContext<T>, rep: &Aw2Rep<T>) -> Result<BivarTable<T>> {
    let (n1, n2) = (rep.grid.n1, rep.grid.n2);
    let [a0, a1, _] = rep.alpha;
    let size = (n1 + 1) * (n2 + 1) * (n1 + 1) * (n2 + 1);
    let mut table = BivarTable {
        n1,
        n2,
        p: vec![T::zero(); size],
        abs_overlap: vec![T::zero(); size],
        global_mismatch: 0.0,
    };
    let mu: Vec<T> = (0..=n1).map(|j| lambda(ctx, a1, half_index(j, n1))).collect();
    let lam: Vec<T> = (0..=n2).map(|k| lambda(ctx, a0, half_index(k, n2))).collect();
    let mut b_blocks = Vec::with_capacity(n1 + 1);
    for j1 in 0..=n1 {
        let v = matched_vectors(&block_tri(ctx, alpha_k1(&rep.alpha, n2, half_index(j1, n1)), n2)?, &lam)?;
        b_blocks.push(v);
    }
    for k2 in 0..=n2 {
        let t = block_tri(ctx, alpha_l1(&rep.alpha, n1, half_index(k2, n2)), n1)?;
        let a = matched_vectors(&t, &mu)?.transpose();
        let pa = double_ratio(&a).p;
        for j1 in 0..=n1 {
            let vb = &b_blocks[j1];
            let pb = double_ratio(vb).p;
            for k1 in 0..=n1 {
                for j2 in 0..=n2 {
                    let i = table.idx(j1, j2, k1, k2);
                    table.p[i] = pa[(j1, k1)] * pb[(j2, k2)];
                    table.abs_overlap[i] = (a[(j1, k1)] * vb[(j2, k2)]).abs();
                }
            }
        }
    }
    let phi = phi_basis(ctx, rep)?;
    let mut worst = 0.0_f64;
    for (col, &(j1, j2)) in phi.labels.iter().enumerate() {
        for row in 0..rep.grid.len() {
            let (k1, k2) = rep.grid.k_indices(row);
            let g = phi.vectors[(row, col)].abs();
            worst = worst.max((g - table.abs_overlap[table.idx(j1, j2, k1, k2)]).abs().to_f64());
        }
    }
    table.global_mismatch = worst;
    Ok(table)
}

/// Parameters of the two univariate factors of the product formula.
pub fn product_factor_params<T: Real>(
    ctx: &QContext<T>,
    alpha: &[T; 3],
    n1: usize,
    n2: usize,
    j1: usize,
    k2: usize,
) -> (QRacahParams<T>, QRacahParams<T>) {
    let [a0, a1, a2] = *alpha;
    let f = |x: f64| T::from_f64(x);
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let (j1f, k2f) = (j1 as f64, k2 as f64);
    let b = ctx.q() * ctx.q();
    let first = QRacahParams {
        alpha: -ctx.pow(a0 + a1 + a2 + f(2.0 * k2f - n2f - n1f - 1.0)),
        beta: ctx.pow(a0 - a1 - a2 + f(2.0 * k2f - n2f - n1f - 1.0)),
        gamma: ctx.pow(f(-2.0 * n1f - 2.0)),
        delta: -ctx.pow(f(2.0) * a1),
        base: b,
    };
    let second = QRacahParams {
        alpha: -ctx.pow(a0 + a1 - a2 + f(2.0 * j1f - n1f - n2f - 1.0)),
        beta: ctx.pow(a0 - a1 + a2 + f(-2.0 * j1f + n1f - n2f - 1.0)),
        gamma: ctx.pow(f(-2.0 * n2f - 2.0)),
        delta: -ctx.pow(f(2.0) * a1 + f(4.0 * j1f - 2.0 * n1f)),
        base: b,
    };
    (first, second)
}

/// Product of two univariate q-Racah polynomials predicted for the
/// bivariate overlap.
pub fn bivariate_product_formula<T: Real>(
    ctx: &QContext<T>,
    alpha: &[T; 3],
    n1: usize,
    n2: usize,
    idx: (usize, usize, usize, usize),
) -> Result<T> {
    let (j1, j2, k1, k2) = idx;
    if j1 > n1 || k1 > n1 || j2 > n2 || k2 > n2 {
        return Err(AwError::IndexError(format!("({j1},{j2},{k1},{k2}) outside the grid")));
    }
    let (f1, f2) = product_factor_params(ctx, alpha, n1, n2, j1, k2);
    Ok(qracah_eval(k1, j1, &f1)? * qracah_eval(k2, j2, &f2)?)
}

/// Largest series condition number among the univariate factors of the
/// product formula.
pub fn product_condition<T: Real>(ctx: &QContext<T>, alpha: &[T; 3], n1: usize, n2: usize) -> Result<f64> {
    let mut worst = 1.0_f64;
    for k2 in 0..=n2 {
        worst = worst.max(series_condition(&product_factor_params(ctx, alpha, n1, n2, 0, k2).0, n1)?);
    }
    for j1 in 0..=n1 {
        worst = worst.max(series_condition(&product_factor_params(ctx, alpha, n1, n2, j1, 0).1, n2)?);
    }
    Ok(worst)
}

/// Largest relative difference between the overlaps and the product
/// formula.
pub fn product_formula_defect<T: Real>(ctx: &QContext<T>, table: &BivarTable<T>, alpha: &[T; 3]) -> Result<f64> {
    let (n1, n2) = (table.n1, table.n2);
    let mut pf = Vec::with_capacity(table.p.len());
    for j1 in 0..=n1 {
        for j2 in 0..=n2 {
            for k1 in 0..=n1 {
                for k2 in 0..=n2 {
                    pf.push(bivariate_product_formula(ctx, alpha, n1, n2, (j1, j2, k1, k2))?);
                }
            }
        }
    }
    let a = Matrix::from_rows(1, pf.len(), table.p.clone())?;
    let b = Matrix::from_rows(1, pf.len(), pf)?;
    Ok(rel_diff(&a, &b))
}

/// Product weight `w(j1,k1; first block) · w(j2,k2; second block)`.
pub fn double_weight<T: Real>(
    ctx: &QContext<T>,
    alpha: &[T; 3],
    n1: usize,
    n2: usize,
    idx: (usize, usize, usize, usize),
) -> Result<T> {
    let (j1, j2, k1, k2) = idx;
    let [a0, a1, a2] = *alpha;
    let two = T::from_f64(2.0);
    let s = ctx.s1sq();
    let pa = AlphaParams {
        alpha: [a0 + two * half_index::<T>(k2, n2), a1, a2, -T::from_i64(n1 as i64 + 1)],
        a4: s,
        a5: s,
    };
    let pb = AlphaParams {
        alpha: [a0, a1 + two * half_index::<T>(j1, n1), -a2, -T::from_i64(n2 as i64 + 1)],
        a4: s,
        a5: s,
    };
    let wa = weights_for(ctx, &QRacahParams::from_alpha(ctx, &pa), n1, NormConstant::Rescaled)?;
    let wb = weights_for(ctx, &QRacahParams::from_alpha(ctx, &pb), n2, NormConstant::Rescaled)?;
    Ok(wa.w[(j1, k1)] * wb.w[(j2, k2)])
}

/// `Σ|term|` of the product formula per entry, in [`BivarTable`] layout:
/// the product of the two factor magnitudes.
pub fn bivariate_magnitudes<T: Real>(ctx: &QContext<T>, alpha: &[T; 3], n1: usize, n2: usize) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity((n1 + 1) * (n2 + 1) * (n1 + 1) * (n2 + 1));
    for j1 in 0..=n1 {
        for j2 in 0..=n2 {
            for k1 in 0..=n1 {
                for k2 in 0..=n2 {
                    let (f1, f2) = product_factor_params(ctx, alpha, n1, n2, j1, k2);
                    let m1 = qracah_eval_with_magnitude(k1, j1, &f1)?.1;
                    let m2 = qracah_eval_with_magnitude(k2, j2, &f2)?.1;
                    out.push(m1 * m2);
                }
            }
        }
    }
    Ok(out)
}

/// Orthogonality of the bivariate overlaps under the product weight.
#[derive(Clone, Debug)]
pub struct BivarOrthogonality {
    /// `max |G − I|`.
    pub identity_defect: f64,
    /// Factor by which entry errors of relative size `ε` in the series can
    /// reach the Gram matrix.
    pub amplification: f64,
    /// Largest relative gap between `w2` and `|overlap|² / P²`.
    pub weight_oracle: f64,
    pub positive: bool,
}

pub fn bivariate_orthogonality<T: Real>(
    ctx: &QContext<T>,
    table: &BivarTable<T>,
    alpha: &[T; 3],
) -> Result<BivarOrthogonality> {
    let (n1, n2) = (table.n1, table.n2);
    let keys: Vec<(usize, usize)> = (0..=n1).flat_map(|k1| (0..=n2).map(move |k2| (k1, k2))).collect();
    let cells: Vec<(usize, usize)> = (0..=n1).flat_map(|j1| (0..=n2).map(move |j2| (j1, j2))).collect();
    let mut w = HashMap::new();
    let mut positive = true;
    let mut oracle = 0.0_f64;
    for &(j1, j2) in &cells {
        for &(k1, k2) in &keys {
            let v = double_weight(ctx, alpha, n1, n2, (j1, j2, k1, k2))?;
            positive &= v > T::zero();
            let p = table.get(j1, j2, k1, k2);
            let o = table.abs_overlap[table.idx(j1, j2, k1, k2)];
            let from_vectors = o * o / (p * p);
            oracle = oracle.max(((v - from_vectors).abs() / v.abs().max(T::from_f64(f64::MIN_POSITIVE))).to_f64());
            w.insert((j1, j2, k1, k2), v);
        }
    }
    let mag = bivariate_magnitudes(ctx, alpha, n1, n2)?;
    let mut defect = 0.0_f64;
    let mut amplification = 0.0_f64;
    for (a, &(k1, k2)) in keys.iter().enumerate() {
        for (b, &(l1, l2)) in keys.iter().enumerate() {
            let mut s = T::zero();
            let mut bound = T::zero();
            for &(j1, j2) in &cells {
                let (x, y) = (table.get(j1, j2, k1, k2), table.get(j1, j2, l1, l2));
                let (mx, my) = (mag[table.idx(j1, j2, k1, k2)], mag[table.idx(j1, j2, l1, l2)]);
                let wk = w[&(j1, j2, k1, k2)];
                s += wk * x * y;
                bound += wk.abs() * (mx * y.abs() + x.abs() * my);
            }
            let target = if a == b { T::one() } else { T::zero() };
            defect = defect.max((s - target).abs().to_f64());
            amplification = amplification.max(bound.to_f64());
        }
    }
    Ok(BivarOrthogonality { identity_defect: defect, amplification, weight_oracle: oracle, positive })
}

/// Ratio statistics of the Gasper–Rahman correspondence.
#[derive(Clone, Debug)]
pub struct GasperRahmanReport {
    /// Relative spread of the ratio over the grid, per `(k1, k2)`.
    pub spread: Vec<((usize, usize), f64)>,
    /// The constant ratio per `(k1, k2)`.
    pub ratio: Vec<((usize, usize), f64)>,
    /// Same spread before applying Sears' transformation.
    pub raw_spread: f64,
    /// Factor by which rounding of relative size `ε` in the series can
    /// reach the spread.
    pub amplification: f64,
}

impl GasperRahmanReport {
    pub fn max_spread(&self) -> f64 {
        self.spread.iter().map(|x| x.1).fold(0.0, f64::max)
    }
}

fn gr_factors<T: Real>(
    ctx: &QContext<T>,
    alpha: &[T; 3],
    n1: usize,
    n2: usize,
    degrees: (usize, usize),
    j: (usize, usize),
) -> (Phi43Spec<T>, Phi43Spec<T>) {
    let [a0, a1, a2] = *alpha;
    let f = |x: f64| T::from_f64(x);
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let (d1, d2) = degrees;
    let b = ctx.q() * ctx.q();
    let hat = a0 - a1 + a2;
    let two = f(2.0);
    let c1 = -ctx.pow(two * a0 + two * a2 + two);
    let c2 = ctx.pow(f(-2.0 * n2f));
    let c3 = ctx.pow(f(-2.0 * n1f));
    let cb = -ctx.pow(two * a0);
    let bn = ctx.pow(f(n1f + n2f - 1.0) - hat);
    let (j1f, j2f) = (j.0 as f64, j.1 as f64);
    let bx1 = ctx.pow(f(2.0 * j1f + 2.0 * j2f - n1f - n2f - 1.0) - hat);
    let bx2 = ctx.pow(f(2.0 * j1f - n1f + n2f - 1.0) - hat);
    let bd1 = b.powi(d1 as i32);
    let first = Phi43Spec {
        n: d1,
        num: [cb * c2 * bd1, T::one() / bx1, c1 * bx1],
        den: [cb * b, c1 * c2 * bx2, T::one() / bx2],
        base: b,
    };
    let second = Phi43Spec {
        n: d2,
        num: [cb * c2 * c3 * bd1 * bd1 * b.powi(d2 as i32), bd1 / bx2, c1 * c2 * bd1 * bx2],
        den: [cb * c2 * bd1 * bd1 * b, c1 * c2 * c3 * bd1 * bn, bd1 / bn],
        base: b,
    };
    (first, second)
}

/// Evaluates the Gasper–Rahman bivariate polynomial under the parameter,
/// variable and degree substitution (degrees swapped), transforms each
/// factor with Sears' formula and compares with the product formula.
pub fn gasper_rahman_bridge<T: Real>(
    ctx: &QContext<T>,
    alpha: &[T; 3],
    n1: usize,
    n2: usize,
) -> Result<GasperRahmanReport> {
    let mut spread = Vec::new();
    let mut ratio = Vec::new();
    let mut raw_spread = 0.0_f64;
    let mut amplification = 0.0_f64;
    let cond = |(v, m): (T, T)| (m / v.abs().max(T::from_f64(f64::MIN_POSITIVE))).to_f64();
    for k1 in 0..=n1 {
        for k2 in 0..=n2 {
            let mut vals = Vec::new();
            let mut raw = Vec::new();
            let mut sens = Vec::new();
            for j1 in 0..=n1 {
                for j2 in 0..=n2 {
                    let (s1, s2) = gr_factors(ctx, alpha, n1, n2, (k2, k1), (j1, j2));
                    let (f1, f2) = product_factor_params(ctx, alpha, n1, n2, j1, k2);
                    let p1 = qracah_eval_with_magnitude(k1, j1, &f1)?;
                    let p2 = qracah_eval_with_magnitude(k2, j2, &f2)?;
                    let pf = p1.0 * p2.0;
                    let direct = s1.eval()? * s2.eval()?;
                    let one = (T::one(), T::one());
                    let t1 = if s1.n > 0 { sears_transform(&s1)?.0.eval_with_magnitude()? } else { one };
                    let t2 = if s2.n > 0 { sears_transform(&s2)?.0.eval_with_magnitude()? } else { one };
                    let r = t1.0 * t2.0 / pf;
                    vals.push(r);
                    sens.push(r.abs().to_f64() * (cond(t1) + cond(t2) + cond(p1) + cond(p2)));
                    raw.push(direct / pf);
                }
            }
            let top = vals.iter().fold(T::zero(), |m, x| m.max(x.abs())).to_f64();
            amplification = amplification.max(sens.iter().fold(0.0_f64, |m, x| m.max(*x)) / top);
            spread.push(((k1, k2), rel_spread(&vals)));
            ratio.push(((k1, k2), vals[0].to_f64()));
            raw_spread = raw_spread.max(rel_spread(&raw));
        }
    }
    Ok(GasperRahmanReport { spread, ratio, raw_spread, amplification })
}

fn rel_spread<T: Real>(v: &[T]) -> f64 {
    let hi = v.iter().fold(v[0], |m, x| m.max(*x));
    let lo = v.iter().fold(v[0], |m, x| m.min(*x));
    let m = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if m == T::zero() || !m.to_f64().is_finite() {
        f64::INFINITY
    } else {
        ((hi - lo) / m).to_f64()
    }
}

/// Terminating balanced series helper used by the bridge: checks that
/// every factor is balanced.
pub fn gasper_rahman_balance<T: Real>(ctx: &QContext<T>, alpha: &[T; 3], n1: usize, n2: usize) -> f64 {
    let mut worst = 0.0_f64;
    for k1 in 0..=n1 {
        for k2 in 0..=n2 {
            for j1 in 0..=n1 {
                for j2 in 0..=n2 {
                    let (s1, s2) = gr_factors(ctx, alpha, n1, n2, (k2, k1), (j1, j2));
                    for s in [s1, s2] {
                        if s.n > 0 {
                            worst = worst.max(s.balance_defect());
                        }
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    const AL: [f64; 3] = [0.3, 0.8, 0.2];

    fn ctx() -> QContext<f64> {
        QContext::new(0.7).unwrap()
    }

    #[test]
    fn grid_bookkeeping() {
        let g = Grid2::new(3, 2);
        assert_eq!(g.len(), 12);
        for (i, &(t1, t2)) in g.states().iter().enumerate() {
            assert_eq!(g.position(t1, t2), Some(i));
            assert!((t1 - t2).abs() <= 3 && t2.abs() <= 2);
            let (k1, k2) = g.k_indices(i);
            assert_eq!(t2, 2 * k2 as i64 - 2);
            assert_eq!(t1 - t2, 2 * k1 as i64 - 3);
        }
    }

    #[test]
    fn trivial_grid() {
        let c = ctx();
        let r = build_aw2(&c, 0, 0, AL, &Aw2Options::default()).unwrap();
        assert_eq!(r.l2.rows(), 1);
        let rel = verify_aw2_relations(&c, &r, MixedSign::Minus).unwrap();
        assert!(rel.iter().all(|x| x.relation < 1e-13), "{rel:?}");
    }

    #[test]
    fn relations_and_adjudications() {
        let c = ctx();
        let r = build_aw2(&c, 3, 2, AL, &Aw2Options::default()).unwrap();
        let rel = verify_aw2_relations(&c, &r, MixedSign::Minus).unwrap();
        assert!(rel.iter().all(|x| x.relation < 1e-10 && x.locality < 1e-10), "{rel:?}");
        assert!(aw2_commutators(&r).unwrap().iter().all(|x| x.1 < 1e-10));
        let plus = verify_aw2_relations(&c, &r, MixedSign::Plus).unwrap();
        assert!(plus[3].relation > 1e-6 && plus[4].relation > 1e-6);

        let n1 = Aw2Options { coupling: CouplingReading::DimN1, ..Default::default() };
        let r1 = build_aw2(&c, 3, 2, AL, &n1).unwrap();
        let worst = verify_aw2_relations(&c, &r1, MixedSign::Minus)
            .unwrap()
            .iter()
            .map(|x| x.relation)
            .fold(0.0, f64::max);
        assert!(worst > 1e-6 || r1.e_consistency > 1e-6);
    }

    #[test]
    fn stencil_structure() {
        let c = ctx();
        let r = build_aw2(&c, 3, 3, AL, &Aw2Options::default()).unwrap();
        let s = stencil_checks(&r);
        assert!(s.e_consistency < 1e-10, "{s:?}");
        assert!(s.off_stencil == 0.0 && s.projector_k1 == 0.0 && s.projector_k2 == 0.0);
        assert!(s.m2_band == 0.0 && s.l1_band == 0.0);
        assert!(s.boundary <= 1e-12);
        assert_eq!(stencil_rows(&r).len(), 16);
    }

    #[test]
    fn corrupted_entry_is_detected() {
        let c = ctx();
        let opts = Aw2Options { corrupt: Some(1e-3), ..Default::default() };
        let r = build_aw2(&c, 2, 2, AL, &opts).unwrap();
        let worst = verify_aw2_relations(&c, &r, MixedSign::Minus)
            .unwrap()
            .iter()
            .map(|x| x.relation)
            .fold(0.0, f64::max);
        assert!(worst > 1e-5);
    }

    #[test]
    fn overlaps_match_product_formula() {
        let c = ctx();
        let r = build_aw2(&c, 3, 2, AL, &Aw2Options::default()).unwrap();
        let t = bivariate_overlaps(&c, &r).unwrap();
        assert!(t.global_mismatch < 1e-10);
        assert!(product_formula_defect(&c, &t, &AL).unwrap() < 1e-9);
        let o = bivariate_orthogonality(&c, &t, &AL).unwrap();
        assert!(o.positive && o.identity_defect < 1e-10 && o.weight_oracle < 1e-8, "{o:?}");
        for j1 in 0..=3 {
            for j2 in 0..=2 {
                assert!((t.get(j1, j2, 0, 0) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gasper_rahman_constant_ratio() {
        let c = ctx();
        assert!(gasper_rahman_balance(&c, &AL, 3, 3) < 1e-10);
        let g = gasper_rahman_bridge(&c, &AL, 3, 3).unwrap();
        assert!(g.max_spread() < 1e-8, "{:?}", g.spread);
        assert!(g.raw_spread > 1e-6);
    }
}
