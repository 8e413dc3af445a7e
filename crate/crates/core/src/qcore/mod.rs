//! Scalar q-functions, q-Pochhammer symbols and terminating basic
//! hypergeometric series.

mod real;

pub use real::{sum, Quad, Real};

use crate::error::{AwError, Result};

/// Arithmetic used for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = AwError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(AwError::InvalidContext(format!(
                "precision must be `double` or `extended`, got `{other}`"
            ))),
        }
    }
}

/// Deformation parameter together with truncation and tolerance policy.
#[derive(Clone, Copy, Debug)]
pub struct QContext<T> {
    q: T,
    ln_q: T,
    q_f64: f64,
    pub eps_inf: f64,
    pub default_tol: f64,
}

impl<T: Real> QContext<T> {
    pub const DEFAULT_EPS_INF: f64 = 1e-18;
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(q: f64) -> Result<Self> {
        Self::with_policy(q, Self::DEFAULT_EPS_INF, Self::DEFAULT_TOL)
    }

    pub fn with_policy(q: f64, eps_inf: f64, default_tol: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(AwError::InvalidContext(format!(
                "q must satisfy 0 < q < 1, got {q}"
            )));
        }
        if !(eps_inf > 0.0) || !(default_tol > 0.0) {
            return Err(AwError::InvalidContext(
                "eps_inf and default_tol must be positive".into(),
            ));
        }
        let qt = T::from_f64(q);
        Ok(QContext {
            q: qt,
            ln_q: qt.ln(),
            q_f64: q,
            eps_inf,
            default_tol,
        })
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn q_f64(&self) -> f64 {
        self.q_f64
    }

    /// `T` constant from an `f64` literal.
    #[inline]
    pub fn c(&self, x: f64) -> T {
        T::from_f64(x)
    }

    /// q raised to a real power.
    #[inline]
    pub fn pow(&self, x: T) -> T {
        (x * self.ln_q).exp()
    }

    #[inline]
    pub fn sinh_q(&self, x: T) -> T {
        self.pow(x) - self.pow(-x)
    }

    #[inline]
    pub fn cosh_q(&self, x: T) -> T {
        self.pow(x) + self.pow(-x)
    }

    /// `sinh_q` of an `f64` argument.
    #[inline]
    pub fn sh(&self, x: f64) -> T {
        self.sinh_q(T::from_f64(x))
    }

    /// `cosh_q` of an `f64` argument.
    #[inline]
    pub fn ch(&self, x: f64) -> T {
        self.cosh_q(T::from_f64(x))
    }

    pub fn qbracket(&self, n: T) -> T {
        self.sinh_q(n) / self.sh(1.0)
    }

    /// Inverse of `sinh_q` on the reals.
    pub fn arcsinh_q(&self, y: T) -> T {
        let u = (y + (y * y + self.c(4.0)).sqrt()) / self.c(2.0);
        u.ln() / self.ln_q
    }

    pub fn checked_sinh_q(&self, x: T) -> Result<T> {
        finite(self.sinh_q(x), "sinh_q")
    }

    pub fn checked_cosh_q(&self, x: T) -> Result<T> {
        finite(self.cosh_q(x), "cosh_q")
    }

    /// Squared `sinh_q(1)`, the recurring normalisation constant.
    pub fn s1sq(&self) -> T {
        let s = self.sh(1.0);
        s * s
    }
}

/// Rejects NaN and infinities with an [`AwError::Overflow`].
pub fn finite<T: Real>(x: T, what: &str) -> Result<T> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(AwError::Overflow(what.to_string()))
    }
}

/// Finite q-Pochhammer symbol `(a; base)_n`.
pub fn qpoch<T: Real>(a: T, base: T, n: usize) -> T {
    let mut r = T::one();
    let mut p = T::one();
    for _ in 0..n {
        r *= T::one() - a * p;
        p *= base;
    }
    r
}

/// Infinite q-Pochhammer symbol `(a; base)_inf`, truncated once the running
/// factor is within `ctx.eps_inf` of one.
pub fn qpoch_inf<T: Real>(ctx: &QContext<T>, a: T, base: T) -> Result<T> {
    if !(base.abs() < T::one()) {
        return Err(AwError::NonConvergence(format!(
            "infinite product needs |base| < 1, got {:?}",
            base.to_f64()
        )));
    }
    let eps = T::from_f64(ctx.eps_inf);
    let mut r = T::one();
    let mut p = T::one();
    for _ in 0..100_000 {
        let t = a * p;
        if t.abs() < eps {
            return Ok(r);
        }
        r *= T::one() - t;
        p *= base;
    }
    Err(AwError::NonConvergence("infinite q-Pochhammer".into()))
}

/// Terminating `4phi3` series
/// `sum_k (num;base)_k / (den;base)_k * z^k / (base;base)_k`, `k <= nmax`.
///
/// Terms are generated by their running ratio. Summation stops at the
/// first vanishing numerator factor; a vanishing denominator factor before
/// that point is a [`AwError::Pole`].
pub fn phi43<T: Real>(num: [T; 4], den: [T; 3], base: T, z: T, nmax: usize) -> Result<T> {
    phi43_with_magnitude(num, den, base, z, nmax).map(|(v, _)| v)
}

/// [`phi43`] together with `Σ|term|`, which bounds the cancellation in
/// the sum.
pub fn phi43_with_magnitude<T: Real>(num: [T; 4], den: [T; 3], base: T, z: T, nmax: usize) -> Result<(T, T)> {
    let tiny = T::epsilon() * T::from_f64(64.0);
    let mut total = T::one();
    let mut magnitude = T::one();
    let mut term = T::one();
    let mut bk = T::one();
    for k in 0..nmax {
        let mut ratio = z / (T::one() - bk * base);
        let mut stop = false;
        for a in num {
            let f = T::one() - a * bk;
            if f.abs() <= tiny * (T::one() + (a * bk).abs()) {
                stop = true;
            }
            ratio *= f;
        }
        if stop {
            break;
        }
        for d in den {
            let f = T::one() - d * bk;
            if f.abs() <= tiny * (T::one() + (d * bk).abs()) {
                return Err(AwError::Pole(k));
            }
            ratio /= f;
        }
        term *= ratio;
        total += term;
        magnitude += term.abs();
        bk *= base;
    }
    Ok((finite(total, "phi43")?, magnitude))
}
