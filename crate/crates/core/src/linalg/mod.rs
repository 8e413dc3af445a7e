//! Dense matrices, commutators, symmetric eigensolvers and relative
//! residual norms.

mod eig;
mod matrix;
pub mod poly;

pub use eig::{
    block_refine, fix_signs, match_spectrum, sym_eig, EigenSystem, RefinedSystem,
    LARGEST_ENTRY_POSITIVE,
};
pub use matrix::Matrix;

use crate::error::{AwError, Result};
use crate::qcore::{QContext, Real};

fn check_pair<T: Real>(x: &Matrix<T>, y: &Matrix<T>) -> Result<()> {
    if !x.is_square() || !y.is_square() || x.rows() != y.rows() {
        return Err(AwError::DimensionMismatch(format!(
            "commutator of {}x{} and {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    Ok(())
}

/// q-commutator `q XY − q⁻¹ YX`.
pub fn qcomm<T: Real>(ctx: &QContext<T>, x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    check_pair(x, y)?;
    let q = ctx.q();
    Ok(&(x * y).scale(q) - &(y * x).scale(T::one() / q))
}

/// Plain commutator `XY − YX`.
pub fn comm<T: Real>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    check_pair(x, y)?;
    Ok(&(x * y) - &(y * x))
}

/// `‖Σ terms‖_F / max(1, Σ ‖term‖_F)`.
pub fn rel_residual<T: Real>(terms: &[Matrix<T>]) -> Result<f64> {
    let Some(first) = terms.first() else {
        return Ok(0.0);
    };
    let mut total = Matrix::zeros(first.rows(), first.cols());
    let mut scale = T::zero();
    for t in terms {
        total = total.try_add(t)?;
        scale += t.norm();
    }
    let denom = scale.max(T::one());
    Ok((total.norm() / denom).to_f64())
}

/// Relative size of a commutator: `rel_residual([XY, −YX])`.
pub fn comm_residual<T: Real>(x: &Matrix<T>, y: &Matrix<T>) -> Result<f64> {
    check_pair(x, y)?;
    rel_residual(&[x * y, -&(y * x)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(seed: u64, n: usize) -> Matrix<f64> {
        let mut s = seed;
        Matrix::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn qcomm_examples() {
        let ctx = QContext::<f64>::new(0.6).unwrap();
        let x = sample(1, 3);
        let y = sample(2, 3);
        let k = ctx.q() - 1.0 / ctx.q();
        let same = qcomm(&ctx, &x, &x).unwrap();
        assert!((&same - &(&x * &x).scale(k)).max_abs() < 1e-14);
        let id = qcomm(&ctx, &Matrix::identity(3), &y).unwrap();
        assert!((&id - &y.scale(k)).max_abs() < 1e-14);
        let c = qcomm(&ctx, &x, &y).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut xy = 0.0;
                let mut yx = 0.0;
                for l in 0..3 {
                    xy += x[(i, l)] * y[(l, j)];
                    yx += y[(i, l)] * x[(l, j)];
                }
                assert!((c[(i, j)] - (0.6 * xy - yx / 0.6)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn comm_examples() {
        let x = sample(3, 4);
        let y = sample(4, 4);
        assert_eq!(comm(&x, &x).unwrap().max_abs(), 0.0);
        let d1 = Matrix::from_diag(&[1.0, 2.0]);
        let d2 = Matrix::from_diag(&[3.0, -1.0]);
        assert_eq!(comm(&d1, &d2).unwrap().max_abs(), 0.0);
        let a = comm(&x, &y).unwrap();
        let b = comm(&y, &x).unwrap();
        assert!((&a + &b).max_abs() < 1e-15);
        assert!(comm(&x, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn rel_residual_examples() {
        assert_eq!(rel_residual(&[Matrix::<f64>::zeros(2, 2)]).unwrap(), 0.0);
        let a = sample(5, 3);
        assert_eq!(rel_residual(&[a.clone(), -&a]).unwrap(), 0.0);
        let n = a.norm();
        let r = rel_residual(&[a.clone(), a.clone()]).unwrap();
        assert!((r - 2.0 * n / (2.0 * n).max(1.0)).abs() < 1e-15);
        assert!(rel_residual(&[a, Matrix::zeros(2, 2)]).is_err());
    }

    #[test]
    fn kron_shape_and_entries() {
        let a = Matrix::from_rows(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Matrix::<f64>::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(0, 2)], 2.0);
        assert_eq!(k[(3, 1)], 3.0);
        assert_eq!(k[(1, 2)], 0.0);
    }
}
