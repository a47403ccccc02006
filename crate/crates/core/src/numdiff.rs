//! Central finite differences used as independent oracles.
//!
//! First derivatives use the step `1e-5 (1 + |x|)`. Second and mixed derivatives use
//! `1e-3 (1 + |x|)` with one Richardson extrapolation, which keeps both truncation and
//! rounding below `1e-9` relative for well-scaled inputs.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

pub fn first_step(x: f64) -> f64 {
    1e-5 * (1.0 + x.abs())
}

pub fn second_step(x: f64) -> f64 {
    1e-3 * (1.0 + x.abs())
}

fn bumped(x: &DVector<f64>, i: usize, d: f64) -> DVector<f64> {
    let mut y = x.clone();
    y[i] += d;
    y
}

/// Derivative of a scalar function of one variable.
pub fn derivative<F>(mut f: F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let e = first_step(x);
    Ok((f(x + e)? - f(x - e)?) / (2.0 * e))
}

/// Gradient of a scalar field.
pub fn gradient<F>(mut f: F, x: &DVector<f64>) -> Result<DVector<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<f64>,
{
    let mut out = DVector::zeros(x.len());
    for i in 0..x.len() {
        let e = first_step(x[i]);
        out[i] = (f(&bumped(x, i, e))? - f(&bumped(x, i, -e))?) / (2.0 * e);
    }
    Ok(out)
}

/// Jacobian `J[(i, j)] = d f_i / d x_j` of a vector field.
pub fn jacobian<F>(mut f: F, x: &DVector<f64>) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut cols = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let e = first_step(x[i]);
        cols.push((f(&bumped(x, i, e))? - f(&bumped(x, i, -e))?) / (2.0 * e));
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Derivatives of a matrix field: entry `s` is `d M / d x_s`.
pub fn matrix_derivatives<F>(mut f: F, x: &DVector<f64>) -> Result<Vec<DMatrix<f64>>>
where
    F: FnMut(&DVector<f64>) -> Result<DMatrix<f64>>,
{
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let e = first_step(x[i]);
        out.push((f(&bumped(x, i, e))? - f(&bumped(x, i, -e))?) / (2.0 * e));
    }
    Ok(out)
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Hessian of a scalar field.
pub fn hessian<F>(mut f: F, x: &DVector<f64>) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<f64>,
{
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut level = |scale: f64| -> Result<f64> {
                let ei = second_step(x[i]) * scale;
                let ej = second_step(x[j]) * scale;
                let mut pp = x.clone();
                pp[i] += ei;
                pp[j] += ej;
                let mut pm = x.clone();
                pm[i] += ei;
                pm[j] -= ej;
                let mut mp = x.clone();
                mp[i] -= ei;
                mp[j] += ej;
                let mut mm = x.clone();
                mm[i] -= ei;
                mm[j] -= ej;
                Ok((f(&pp)? - f(&pm)? - f(&mp)? + f(&mm)?) / (4.0 * ei * ej))
            };
            let v = richardson(level(1.0)?, level(0.5)?);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Mixed second derivatives `M[(i, j)] = d^2 f / dx_i dy_j` of a function of two vectors.
pub fn mixed_hessian<F>(mut f: F, x: &DVector<f64>, y: &DVector<f64>) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>, &DVector<f64>) -> Result<f64>,
{
    let mut out = DMatrix::zeros(x.len(), y.len());
    for i in 0..x.len() {
        for j in 0..y.len() {
            let mut level = |scale: f64| -> Result<f64> {
                let ei = second_step(x[i]) * scale;
                let ej = second_step(y[j]) * scale;
                let xp = bumped(x, i, ei);
                let xm = bumped(x, i, -ei);
                let yp = bumped(y, j, ej);
                let ym = bumped(y, j, -ej);
                Ok((f(&xp, &yp)? - f(&xp, &ym)? - f(&xm, &yp)? + f(&xm, &ym)?) / (4.0 * ei * ej))
            };
            out[(i, j)] = richardson(level(1.0)?, level(0.5)?);
        }
    }
    Ok(out)
}

/// First derivative of a vector-valued curve.
pub fn curve_derivative<F>(mut f: F, s: f64) -> Result<DVector<f64>>
where
    F: FnMut(f64) -> Result<DVector<f64>>,
{
    let e = first_step(s);
    Ok((f(s + e)? - f(s - e)?) / (2.0 * e))
}

/// Second derivative of a vector-valued curve.
pub fn curve_second_derivative<F>(mut f: F, s: f64) -> Result<DVector<f64>>
where
    F: FnMut(f64) -> Result<DVector<f64>>,
{
    let mid = f(s)?;
    let mut level = |scale: f64| -> Result<DVector<f64>> {
        let e = second_step(s) * scale;
        Ok((f(s + e)? - &mid * 2.0 + f(s - e)?) / (e * e))
    };
    let coarse = level(1.0)?;
    let fine = level(0.5)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_hessian() {
        let f = |x: &DVector<f64>| Ok(x[0].powi(3) * x[1] + (x[1] * x[2]).sin());
        let x = DVector::from_vec(vec![0.7, -0.4, 1.3]);
        let h = hessian(f, &x).unwrap();
        let exact = DMatrix::from_row_slice(
            3,
            3,
            &[
                6.0 * x[0] * x[1],
                3.0 * x[0] * x[0],
                0.0,
                3.0 * x[0] * x[0],
                -(x[1] * x[2]).sin() * x[2] * x[2],
                (x[1] * x[2]).cos() - x[1] * x[2] * (x[1] * x[2]).sin(),
                0.0,
                (x[1] * x[2]).cos() - x[1] * x[2] * (x[1] * x[2]).sin(),
                -(x[1] * x[2]).sin() * x[1] * x[1],
            ],
        );
        assert!((h - exact).abs().max() < 1e-9);
    }
}
