//! Parameter algebra, the input euclidean metric and the two vector kinds.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GeometryError, Result};

/// The characteristic parameter `g` together with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GParameter {
    g: f64,
    h: f64,
    big_g: f64,
    g_plus: f64,
    g_minus: f64,
    g_up_plus: f64,
    g_up_minus: f64,
    gamma: f64,
}

impl GParameter {
    pub fn new(g: f64) -> Result<Self> {
        if !g.is_finite() || g.abs() >= 2.0 {
            return Err(GeometryError::OutOfRange { g });
        }
        let h = (1.0 - g * g / 4.0).sqrt();
        Ok(Self {
            g,
            h,
            big_g: g / h,
            g_plus: g / 2.0 + h,
            g_minus: g / 2.0 - h,
            g_up_plus: -g / 2.0 + h,
            g_up_minus: -g / 2.0 - h,
            gamma: h - 1.0,
        })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `h = sqrt(1 - g^2/4)`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// `G = g/h`.
    pub fn big_g(&self) -> f64 {
        self.big_g
    }

    pub fn g_plus(&self) -> f64 {
        self.g_plus
    }

    pub fn g_minus(&self) -> f64 {
        self.g_minus
    }

    pub fn g_up_plus(&self) -> f64 {
        self.g_up_plus
    }

    pub fn g_up_minus(&self) -> f64 {
        self.g_up_minus
    }

    /// Conformal exponent `h - 1`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The constant `-g^2/4` of the curvature tensor.
    pub fn curvature_constant(&self) -> f64 {
        -self.g * self.g / 4.0
    }

    /// Sectional curvature of the indicatrix, `1 - g^2/4`.
    pub fn indicatrix_curvature(&self) -> f64 {
        1.0 + self.curvature_constant()
    }
}

/// Dimension and the euclidean metric `r_ab`, extended block-diagonally to `r_pq`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricContext {
    dim: usize,
    r_ab: DMatrix<f64>,
    r_pq: DMatrix<f64>,
    r_pq_inv: DMatrix<f64>,
    frame: DMatrix<f64>,
    det_r: f64,
}

impl MetricContext {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(GeometryError::InvalidMetric(format!("dimension {dim} < 2")));
        }
        Self::from_matrix(DMatrix::identity(dim - 1, dim - 1))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(GeometryError::InvalidMetric("empty diagonal".into()));
        }
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    /// Builds from an `(N-1)x(N-1)` matrix; symmetrizes and checks positive-definiteness.
    pub fn from_matrix(r_ab: DMatrix<f64>) -> Result<Self> {
        let n1 = r_ab.nrows();
        if n1 == 0 || r_ab.ncols() != n1 {
            return Err(GeometryError::InvalidMetric(format!(
                "expected a square matrix, got {}x{}",
                r_ab.nrows(),
                r_ab.ncols()
            )));
        }
        if r_ab.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let r_ab = (&r_ab + r_ab.transpose()) * 0.5;
        let dim = n1 + 1;
        let mut r_pq = DMatrix::zeros(dim, dim);
        r_pq.view_mut((0, 0), (n1, n1)).copy_from(&r_ab);
        r_pq[(n1, n1)] = 1.0;
        let chol = nalgebra::Cholesky::new(r_pq.clone())
            .ok_or_else(|| GeometryError::InvalidMetric("matrix is not positive-definite".into()))?;
        let frame = chol.l().transpose();
        let r_pq_inv = chol.inverse();
        let det_r = chol.determinant();
        Ok(Self { dim, r_ab, r_pq, r_pq_inv, frame, det_r })
    }

    /// Parses the text format: first token `N-1`, then `(N-1)^2` reals row-major.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n1: usize = tokens
            .next()
            .ok_or_else(|| GeometryError::InvalidMetric("empty metric file".into()))?
            .parse()
            .map_err(|e| GeometryError::InvalidMetric(format!("bad size: {e}")))?;
        let values = tokens
            .map(|t| t.parse::<f64>().map_err(|e| GeometryError::InvalidMetric(format!("bad entry {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != n1 * n1 {
            return Err(GeometryError::InvalidMetric(format!(
                "expected {} entries, found {}",
                n1 * n1,
                values.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(n1, n1, &values))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeometryError::InvalidMetric(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_ab(&self) -> &DMatrix<f64> {
        &self.r_ab
    }

    pub fn r_pq(&self) -> &DMatrix<f64> {
        &self.r_pq
    }

    pub fn r_pq_inv(&self) -> &DMatrix<f64> {
        &self.r_pq_inv
    }

    /// Upper-triangular `F` with `F^T F = r_pq`; `F x` gives orthonormal components.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// `det r_pq`, which equals `det r_ab`.
    pub fn det_r(&self) -> f64 {
        self.det_r
    }

    pub fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(GeometryError::DimensionMismatch { expected: self.dim, found });
        }
        Ok(())
    }

    /// `r_pq x^p y^q`.
    pub fn dot(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.r_pq * y)[(0, 0)]
    }

    /// `r^pq a_p b_q` for covectors.
    pub fn co_dot(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (a.transpose() * &self.r_pq_inv * b)[(0, 0)]
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.dot(x, x).max(0.0).sqrt()
    }

    pub fn lower(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.r_pq * x
    }

    pub fn raise(&self, a: &DVector<f64>) -> DVector<f64> {
        &self.r_pq_inv * a
    }

    /// `r_ab x^a y^b` over the first `N-1` components.
    pub fn bold_dot(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let n1 = self.dim - 1;
        let mut acc = 0.0;
        for a in 0..n1 {
            for b in 0..n1 {
                acc += self.r_ab[(a, b)] * x[a] * y[b];
            }
        }
        acc
    }

    /// `r_ab y^b` as an `N`-vector with a zero last slot.
    pub fn bold_lower(&self, y: &DVector<f64>) -> DVector<f64> {
        let n1 = self.dim - 1;
        let mut out = DVector::zeros(self.dim);
        for a in 0..n1 {
            out[a] = (0..n1).map(|b| self.r_ab[(a, b)] * y[b]).sum();
        }
        out
    }

    /// Euclidean angle between two vectors, computed from `atan2(|x ^ y|, x.y)`.
    pub fn euclidean_angle(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let (u, d12) = self.wedge_and_dot(x, y);
        u.atan2(d12)
    }

    /// `(sqrt((xx)(yy) - (xy)^2), (xy))`, with the wedge taken from the projected
    /// component to avoid cancellation for nearly parallel vectors.
    pub fn wedge_and_dot(&self, x: &DVector<f64>, y: &DVector<f64>) -> (f64, f64) {
        let d11 = self.dot(x, x);
        let d12 = self.dot(x, y);
        if d11 == 0.0 {
            return (0.0, d12);
        }
        let perp = y - x * (d12 / d11);
        (d11.sqrt() * self.norm(&perp), d12)
    }
}

macro_rules! vector_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(DVector<f64>);

        impl $name {
            pub fn new(components: Vec<f64>) -> Result<Self> {
                Self::from_vector(DVector::from_vec(components))
            }

            pub fn from_slice(components: &[f64]) -> Result<Self> {
                Self::from_vector(DVector::from_column_slice(components))
            }

            pub fn from_vector(v: DVector<f64>) -> Result<Self> {
                if v.len() < 2 {
                    return Err(GeometryError::DimensionMismatch { expected: 2, found: v.len() });
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(GeometryError::NonFinite);
                }
                Ok(Self(v))
            }

            /// Wraps without validation; callers guarantee finiteness.
            pub(crate) fn raw(v: DVector<f64>) -> Self {
                Self(v)
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn as_vector(&self) -> &DVector<f64> {
                &self.0
            }

            pub fn into_vector(self) -> DVector<f64> {
                self.0
            }

            pub fn as_slice(&self) -> &[f64] {
                self.0.as_slice()
            }

            /// Last component.
            pub fn last(&self) -> f64 {
                self.0[self.0.len() - 1]
            }

            /// Leading `N-1` components.
            pub fn bold(&self) -> &[f64] {
                &self.0.as_slice()[..self.0.len() - 1]
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&x| x == 0.0)
            }

            pub fn scaled(&self, factor: f64) -> Self {
                Self(&self.0 * factor)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self.0.iter().map(|x| format!("{x}")).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    };
}

vector_type!(
    /// A vector `R = (R^1, ..., R^{N-1}, Z)` in the original coordinates.
    FinslerVector
);

vector_type!(
    /// A vector `t` of the quasi-euclidean image space.
    QuasiVector
);

impl FinslerVector {
    /// `Z = R^N`.
    pub fn z(&self) -> f64 {
        self.last()
    }
}

/// `arccos` with rounding clamp; arguments beyond `[-1, 1]` by more than `1e-12` are errors.
pub fn clamped_acos(x: f64, quantity: &'static str) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + 1e-12 {
        return Err(GeometryError::NumericalDomain { quantity, value: x });
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_constants() {
        let p = GParameter::new(0.0).unwrap();
        assert_eq!((p.h(), p.big_g(), p.g_plus(), p.g_minus()), (1.0, 0.0, 1.0, -1.0));
        let p = GParameter::new(1.0).unwrap();
        assert!((p.h() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((p.big_g() - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        for g in [-1.7, -0.3, 0.9, 1.99] {
            let p = GParameter::new(g).unwrap();
            assert!((p.g_plus() + p.g_minus() - g).abs() < 1e-15);
            assert!((p.g_plus() - p.g_minus() - 2.0 * p.h()).abs() < 1e-15);
            assert!((p.g_plus().powi(2) + p.g_minus().powi(2) - 2.0).abs() < 1e-14);
        }
        let a = GParameter::new(-1.2).unwrap();
        let b = GParameter::new(1.2).unwrap();
        assert!((a.g_plus() + b.g_minus()).abs() < 1e-15);
        assert!(GParameter::new(2.0).is_err());
        assert!(GParameter::new(-2.5).is_err());
        assert!(GParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn metric_parsing() {
        let ctx = MetricContext::from_text("2\n2 0.5\n0.5 1\n").unwrap();
        assert_eq!(ctx.dim(), 3);
        assert!((ctx.det_r() - 1.75).abs() < 1e-14);
        let f = ctx.frame();
        assert!((f.transpose() * f - ctx.r_pq()).abs().max() < 1e-14);
        assert!(MetricContext::from_text("2\n1 2\n2 1\n").is_err());
        assert!(MetricContext::from_text("2\n1 2 3\n").is_err());
        let sym = MetricContext::from_text("2\n2 1\n0 2\n").unwrap();
        assert_eq!(sym.r_ab()[(0, 1)], 0.5);
    }

    #[test]
    fn acos_clamp() {
        assert_eq!(clamped_acos(1.0 + 1e-14, "x").unwrap(), 0.0);
        assert!(clamped_acos(1.0 + 1e-9, "x").is_err());
    }
}
