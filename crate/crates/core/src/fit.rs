//! Small numerical helpers shared by the fitting code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimises a unimodal `f` on `[a, b]` to an interval width of `tol`.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `n` points spaced evenly in log between `lo` and `hi` (both positive).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` points spaced evenly between `lo` and `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Ordinary least-squares solution of `X β ≈ y`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residual_ss: f64,
    /// `(XᵀX)⁻¹`, used to propagate standard errors.
    pub xtx_inv: DMatrix<f64>,
}

pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let rows = design.len();
    let cols = design.first().map_or(0, Vec::len);
    if rows != y.len() {
        return Err(Error::LengthMismatch {
            expected: rows,
            got: y.len(),
        });
    }
    if rows < cols || cols == 0 {
        return Err(Error::Underdetermined(format!(
            "{rows} points for {cols} coefficients"
        )));
    }
    let x = DMatrix::from_fn(rows, cols, |i, j| design[i][j]);
    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * &x;
    let xtx_inv = xtx
        .try_inverse()
        .ok_or_else(|| Error::Underdetermined("singular design matrix".into()))?;
    let beta = &xtx_inv * x.transpose() * &yv;
    let resid = &yv - &x * &beta;
    Ok(LeastSquares {
        coefficients: beta.iter().copied().collect(),
        residual_ss: resid.norm_squared(),
        xtx_inv,
    })
}

/// Weights `w` such that `Σ w_i y_i` is the least-squares fit with design rows
/// `design` evaluated at the basis vector `at`.
pub fn linear_weights(design: &[Vec<f64>], at: &[f64]) -> Result<Vec<f64>> {
    let rows = design.len();
    let cols = at.len();
    if rows < cols {
        return Err(Error::Underdetermined(format!(
            "{rows} points for {cols} coefficients"
        )));
    }
    let x = DMatrix::from_fn(rows, cols, |i, j| design[i][j]);
    let xtx_inv = (x.transpose() * &x)
        .try_inverse()
        .ok_or_else(|| Error::Underdetermined("singular design matrix".into()))?;
    let w = x * (xtx_inv * DVector::from_column_slice(at));
    Ok(w.iter().copied().collect())
}

/// Weights for the least-squares polynomial of degree `degree` through
/// `(x_i, y_i)` evaluated at `x0`.
pub fn polynomial_weights(x: &[f64], degree: usize, x0: f64) -> Result<Vec<f64>> {
    if x.len() < degree + 1 {
        return Err(Error::Underdetermined(format!(
            "{} points for a degree-{degree} polynomial",
            x.len()
        )));
    }
    let design: Vec<Vec<f64>> = x
        .iter()
        .map(|&xi| (0..=degree).map(|j| xi.powi(j as i32)).collect())
        .collect();
    let at: Vec<f64> = (0..=degree).map(|j| x0.powi(j as i32)).collect();
    linear_weights(&design, &at)
}

/// Lagrange weights at `x0` for interpolation through every point of `x`.
pub fn lagrange_weights(x: &[f64], x0: f64) -> Result<Vec<f64>> {
    for (i, a) in x.iter().enumerate() {
        if x[..i].contains(a) {
            return Err(Error::Underdetermined(format!("repeated abscissa {a}")));
        }
    }
    Ok((0..x.len())
        .map(|i| {
            (0..x.len())
                .filter(|&j| j != i)
                .map(|j| (x0 - x[j]) / (x[i] - x[j]))
                .product()
        })
        .collect())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
