use nalgebra::{Complex, DMatrix};

/// All complex roots of `c[0] x^d + ... + c[d]` (highest degree first).
///
/// Exact leading zeros are dropped; exact trailing zeros contribute roots
/// at the origin. The remaining roots are companion-matrix eigenvalues.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let start = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
    let c = &coeffs[start..];
    if c.len() <= 1 {
        return Vec::new();
    }
    let zeros = c.iter().rev().take_while(|&&x| x == 0.0).count();
    let core = &c[..c.len() - zeros];
    let mut roots = vec![Complex::new(0.0, 0.0); zeros];
    let d = core.len() - 1;
    if d == 0 {
        return roots;
    }
    let lead = core[0];
    let comp = DMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            -core[j + 1] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    roots.extend(comp.complex_eigenvalues().iter().copied());
    roots
}

/// Evaluates a polynomial given highest degree first.
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Real roots, polished by a few Newton steps.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Vec<f64> {
    let deriv: Vec<f64> = {
        let d = coeffs.len().saturating_sub(1);
        coeffs[..d]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (d - i) as f64)
            .collect()
    };
    poly_roots(coeffs)
        .into_iter()
        .filter(|z| z.im.abs() <= imag_tol * z.re.abs().max(1.0))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..4 {
                let dp = poly_eval(&deriv, x);
                if dp == 0.0 {
                    break;
                }
                let step = poly_eval(coeffs, x) / dp;
                if !step.is_finite() {
                    break;
                }
                x -= step;
            }
            x
        })
        .collect()
}

/// Product of two polynomials (highest degree first).
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sum of two polynomials (highest degree first).
pub fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &x) in a.iter().enumerate() {
        out[n - a.len() + i] += x;
    }
    for (i, &x) in b.iter().enumerate() {
        out[n - b.len() + i] += x;
    }
    out
}

pub fn poly_scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|&x| x * s).collect()
}
