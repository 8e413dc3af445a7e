use crate::error::{AwError, Result};
use crate::linalg::Matrix;
use crate::qcore::Real;

/// Identifier of the eigenvector sign rule.
pub const LARGEST_ENTRY_POSITIVE: &str = "largest-entry-positive";

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
    pub convention_tag: &'static str,
}

/// Eigensystem refined inside the eigenspaces of a first operator.
#[derive(Clone, Debug)]
pub struct RefinedSystem<T> {
    /// Eigenspace label of the first operator, per column.
    pub labels: Vec<usize>,
    /// Eigenvalue of the refining operator, per column.
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig<T: Real>(a: &Matrix<T>) -> Result<EigenSystem<T>> {
    if !a.is_square() {
        return Err(AwError::DimensionMismatch("sym_eig needs a square matrix".into()));
    }
    let asym = a.asymmetry();
    let sym_tol = 1e-12_f64.max(T::epsilon().to_f64() * 64.0);
    if asym > sym_tol {
        return Err(AwError::NotSymmetric(asym));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale = a.norm().max(T::from_f64(f64::MIN_POSITIVE));
    let target = T::epsilon() * scale;
    let mut converged = n <= 1;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= T::epsilon() * target {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::from_f64(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(AwError::NonConvergence("Jacobi sweeps exhausted".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    fix_signs(&mut vectors);
    Ok(EigenSystem {
        values,
        vectors,
        convention_tag: LARGEST_ENTRY_POSITIVE,
    })
}

fn rotate<T: Real>(m: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let n = m.rows();
    for k in 0..n {
        let (kp, kq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * kp - s * kq;
        m[(k, q)] = s * kp + c * kq;
    }
    for k in 0..n {
        let (pk, qk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = c * pk - s * qk;
        m[(q, k)] = s * pk + c * qk;
    }
    m[(p, q)] = T::zero();
    m[(q, p)] = T::zero();
    for k in 0..n {
        let (kp, kq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * kp - s * kq;
        v[(k, q)] = s * kp + c * kq;
    }
}

/// Makes the largest-magnitude entry of every column positive; ties go to
/// the lowest row index.
pub fn fix_signs<T: Real>(vectors: &mut Matrix<T>) {
    for j in 0..vectors.cols() {
        let mut best = 0;
        for i in 1..vectors.rows() {
            if vectors[(i, j)].abs() > vectors[(best, j)].abs() {
                best = i;
            }
        }
        if vectors[(best, j)] < T::zero() {
            for i in 0..vectors.rows() {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
}

/// Diagonalises `b` inside the eigenspaces spanned by the columns of
/// `basis`, grouped by `labels`.
pub fn block_refine<T: Real>(
    labels: &[usize],
    b: &Matrix<T>,
    basis: &Matrix<T>,
) -> Result<RefinedSystem<T>> {
    if labels.len() != basis.cols() || basis.rows() != b.rows() || !b.is_square() {
        return Err(AwError::DimensionMismatch("block_refine shapes".into()));
    }
    let n = basis.rows();
    let mut groups: Vec<usize> = labels.to_vec();
    groups.sort_unstable();
    groups.dedup();

    let mut out_labels = Vec::with_capacity(labels.len());
    let mut out_values = Vec::with_capacity(labels.len());
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(labels.len());
    let bnorm = b.norm().to_f64().max(1.0);

    for &g in &groups {
        let idx: Vec<usize> = (0..labels.len()).filter(|&c| labels[c] == g).collect();
        let v = Matrix::from_fn(n, idx.len(), |i, j| basis[(i, idx[j])]);
        let bv = b * &v;
        let sub = &v.transpose() * &bv;
        let leak = (&bv - &(&v * &sub)).norm().to_f64() / bnorm;
        if leak > 1e-10 {
            return Err(AwError::EigenspaceLeakage {
                block: g,
                residual: leak,
            });
        }
        let sub = symmetrize(&sub);
        let es = sym_eig(&sub)?;
        let w = &v * &es.vectors;
        for (j, val) in es.values.iter().enumerate() {
            out_labels.push(g);
            out_values.push(*val);
            cols.push(w.column(j));
        }
    }
    let mut vectors = Matrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    fix_signs(&mut vectors);
    Ok(RefinedSystem {
        labels: out_labels,
        values: out_values,
        vectors,
    })
}

fn symmetrize<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let half = T::from_f64(0.5);
    Matrix::from_fn(a.rows(), a.cols(), |i, j| (a[(i, j)] + a[(j, i)]) * half)
}

/// Assigns each target to its nearest computed value.
///
/// Returns the index permutation and the largest relative mismatch. Fails
/// when two targets claim the same value or when the computed spectrum has a
/// gap below ten times `tol`.
pub fn match_spectrum<T: Real>(values: &[T], targets: &[T], tol: f64) -> Result<(Vec<usize>, f64)> {
    if values.len() != targets.len() {
        return Err(AwError::SpectrumMatch(format!(
            "{} values against {} targets",
            values.len(),
            targets.len()
        )));
    }
    let scale = values
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.to_f64().abs()));
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let gap = (values[i] - values[j]).abs().to_f64() / scale;
            if gap < 10.0 * tol {
                return Err(AwError::SpectrumMatch(format!(
                    "near-degenerate spectrum (relative gap {gap:e})"
                )));
            }
        }
    }
    let mut perm = Vec::with_capacity(targets.len());
    let mut worst = 0.0_f64;
    for t in targets {
        let (best, dist) = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, (*v - *t).abs().to_f64()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty spectrum");
        if perm.contains(&best) {
            return Err(AwError::SpectrumMatch("two targets share one eigenvalue".into()));
        }
        worst = worst.max(dist / t.to_f64().abs().max(1.0));
        perm.push(best);
    }
    Ok((perm, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_standard_basis() {
        let es = sym_eig(&Matrix::<f64>::identity(4)).unwrap();
        assert!(es.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert_eq!(es.vectors, Matrix::identity(4));
    }

    #[test]
    fn diagonal_sorted() {
        let es = sym_eig(&Matrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(es.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_rows(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(sym_eig(&m), Err(AwError::NotSymmetric(_))));
    }

    #[test]
    fn block_refine_trivial_cases() {
        let b = Matrix::from_diag(&[4.0, 5.0, 6.0]);
        let basis = Matrix::identity(3);
        let r = block_refine(&[0, 1, 1], &b, &basis).unwrap();
        assert_eq!(r.vectors, basis);
        assert_eq!(r.values, vec![4.0, 5.0, 6.0]);

        let b = Matrix::from_rows(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let whole = block_refine(&[0, 0], &b, &Matrix::identity(2)).unwrap();
        let direct = sym_eig(&b).unwrap();
        assert_eq!(whole.values, direct.values);
        assert!((&whole.vectors - &direct.vectors).max_abs() < 1e-15);
    }

    #[test]
    fn block_refine_detects_leakage() {
        let b = Matrix::from_rows(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let r = block_refine(&[0, 1], &b, &Matrix::identity(2));
        assert!(matches!(r, Err(AwError::EigenspaceLeakage { .. })));
    }

    #[test]
    fn match_spectrum_guards_gaps() {
        let (p, err) = match_spectrum(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0], 1e-10).unwrap();
        assert_eq!(p, vec![2, 0, 1]);
        assert_eq!(err, 0.0);
        assert!(match_spectrum(&[1.0, 1.0 + 1e-12], &[1.0, 1.0], 1e-10).is_err());
    }
}
