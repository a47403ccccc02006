//! The quasi-euclidean map `sigma`, its inverse `mu`, their Jacobians, the quasi-euclidean
//! metric with its Christoffel symbols and curvature, and the conformal flattening map.

use nalgebra::{DMatrix, DVector};

use crate::dense::{Tensor3, Tensor4};
use crate::error::{GeometryError, Result};
use crate::scalars::scalar_bundle;
use crate::space::{FinslerVector, GParameter, MetricContext, QuasiVector};

/// Scalars attached to a quasi-euclidean vector `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiScalars {
    /// `m = sqrt(r_ab t^a t^b)`.
    pub m: f64,
    /// `S = sqrt(r_pq t^p t^q)`.
    pub s: f64,
    /// Polar angle `phi = atan2(t^N, m)`.
    pub phi: f64,
    /// `k = exp(G phi / 2)`.
    pub k: f64,
    /// `I = t^N - (G/2) m`.
    pub i: f64,
}

pub(crate) fn check_quasi(ctx: &MetricContext, t: &QuasiVector) -> Result<()> {
    ctx.check_dim(t.dim())?;
    if t.is_zero() {
        return Err(GeometryError::ZeroVector);
    }
    Ok(())
}

pub fn quasi_scalars(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<QuasiScalars> {
    check_quasi(ctx, t)?;
    let v = t.as_vector();
    let m = ctx.bold_dot(v, v).max(0.0).sqrt();
    let s = ctx.norm(v);
    let phi = t.last().atan2(m);
    Ok(QuasiScalars { m, s, phi, k: (0.5 * p.big_g() * phi).exp(), i: t.last() - 0.5 * p.big_g() * m })
}

/// `sigma(R)`: `t^a = h J R^a`, `t^N = A J`.
pub fn sigma_map(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<QuasiVector> {
    let s = scalar_bundle(p, ctx, r)?;
    let n = ctx.dim();
    let mut t = r.as_vector() * (p.h() * s.j);
    t[n - 1] = s.a * s.j;
    Ok(QuasiVector::raw(t))
}

/// `mu(t)`: `R^a = t^a / (h k)`, `R^N = I / k`.
pub fn mu_map(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<FinslerVector> {
    let qs = quasi_scalars(p, ctx, t)?;
    let n = ctx.dim();
    let mut r = t.as_vector() / (p.h() * qs.k);
    r[n - 1] = qs.i / qs.k;
    Ok(FinslerVector::raw(r))
}

/// Jacobian of `sigma` with rows indexing the output: `J[(q, p)] = d sigma^q / d R^p`.
pub fn sigma_jacobian(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<DMatrix<f64>> {
    let s = scalar_bundle(p, ctx, r)?;
    if s.q == 0.0 {
        return Err(GeometryError::OnAxis { q: s.q, z: s.z });
    }
    let n = ctx.dim();
    let n1 = n - 1;
    let g = p.g();
    let h = p.h();
    let rv = r.as_vector();
    let rb = ctx.bold_lower(rv);
    let mut m = DMatrix::zeros(n, n);
    m[(n1, n1)] = (s.b + 0.5 * g * s.q * s.a) * s.j / s.b;
    for a in 0..n1 {
        m[(n1, a)] = -g * (s.z * s.a - s.b) / (2.0 * s.q) * s.j * rb[a] / s.b;
        m[(a, n1)] = 0.5 * g * s.q * s.j * rv[a] * h / s.b;
        for b in 0..n1 {
            let delta = if a == b { s.b } else { 0.0 };
            m[(a, b)] = (delta - g * rb[b] * rv[a] * s.z / (2.0 * s.q)) * s.j * h / s.b;
        }
    }
    Ok(m)
}

/// Jacobian of `mu` with rows indexing the output: `J[(p, q)] = d mu^p / d t^q`.
pub fn mu_jacobian(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<DMatrix<f64>> {
    let qs = quasi_scalars(p, ctx, t)?;
    if qs.m == 0.0 {
        return Err(GeometryError::OnAxis { q: 0.0, z: t.last() });
    }
    let n = ctx.dim();
    let n1 = n - 1;
    let half_g = 0.5 * p.big_g();
    let h = p.h();
    let tv = t.as_vector();
    let tn = t.last();
    let tl = ctx.bold_lower(tv);
    let (m, k, s2) = (qs.m, qs.k, qs.s * qs.s);
    let mut out = DMatrix::zeros(n, n);
    out[(n1, n1)] = 1.0 / k - half_g * m * qs.i / (k * s2);
    for a in 0..n1 {
        out[(n1, a)] = -half_g * tl[a] * (m + half_g * tn) / (k * s2);
        out[(a, n1)] = -half_g * m * tv[a] / (h * k * s2);
        for b in 0..n1 {
            let delta = if a == b { 1.0 / (h * k) } else { 0.0 };
            out[(a, b)] = delta + half_g * tn * tv[a] * tl[b] / (m * h * k * s2);
        }
    }
    Ok(out)
}

/// Quasi-euclidean metric and its derived objects at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiGeometry {
    pub n_lower: DMatrix<f64>,
    pub n_upper: DMatrix<f64>,
    /// `H_rs = r_rs - L_r L_s`.
    pub h_lower: DMatrix<f64>,
    /// `N_p^r_q`, stored at `(p, r, q)`.
    pub christoffel: Tensor3,
    /// `R_prqs`, stored at `(p, r, q, s)`.
    pub curvature: Tensor4,
}

/// `n_rs = r_rs/h^2 - (G^2/4) L_r L_s`.
pub fn quasi_metric_lower(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<DMatrix<f64>> {
    check_quasi(ctx, t)?;
    let ll = ctx.lower(t.as_vector()) / ctx.norm(t.as_vector());
    let h2 = p.h() * p.h();
    Ok(ctx.r_pq() / h2 - &ll * ll.transpose() * (0.25 * p.big_g().powi(2)))
}

/// `N_p^r_q = -(G^2/4) L^r H_pq / S`, stored at `(p, r, q)`.
pub fn christoffel(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<Tensor3> {
    check_quasi(ctx, t)?;
    let tv = t.as_vector();
    let s = ctx.norm(tv);
    let lu = tv / s;
    let ll = ctx.lower(&lu);
    let hl = ctx.r_pq() - &ll * ll.transpose();
    let c = -0.25 * p.big_g().powi(2) / s;
    Ok(Tensor3::from_fn(ctx.dim(), |a, r, b| c * lu[r] * hl[(a, b)]))
}

pub fn quasi_metric(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<QuasiGeometry> {
    check_quasi(ctx, t)?;
    let tv = t.as_vector();
    let s = ctx.norm(tv);
    let lu = tv / s;
    let ll = ctx.lower(&lu);
    let big_g2 = p.big_g().powi(2);
    let h2 = p.h() * p.h();
    let n_lower = ctx.r_pq() / h2 - &ll * ll.transpose() * (0.25 * big_g2);
    let n_upper = ctx.r_pq_inv() * h2 + &lu * lu.transpose() * (0.25 * p.g() * p.g());
    let h_lower = ctx.r_pq() - &ll * ll.transpose();
    let christoffel = christoffel(p, ctx, t)?;
    let c = -0.25 * big_g2 / (s * s);
    let curvature = Tensor4::from_fn(ctx.dim(), |a, r, b, d| {
        c * (h_lower[(a, b)] * h_lower[(r, d)] - h_lower[(a, d)] * h_lower[(b, r)])
    });
    Ok(QuasiGeometry { n_lower, n_upper, h_lower, christoffel, curvature })
}

/// Image of the conformal flattening map with its scale and Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalImage {
    pub image: DVector<f64>,
    /// `f = (S^2/2)^(gamma/2)`.
    pub scale: f64,
    /// `k^p_q = d image^p / d t^q`, rows indexing the output.
    pub jacobian: DMatrix<f64>,
}

pub fn conformal_flatten(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<ConformalImage> {
    check_quasi(ctx, t)?;
    let tv = t.as_vector();
    let x = 0.5 * ctx.dot(tv, tv);
    let half_gamma = 0.5 * p.gamma();
    let f = x.powf(half_gamma);
    let fp = half_gamma * x.powf(half_gamma - 1.0);
    let h = p.h();
    let n = ctx.dim();
    let tl = ctx.lower(tv);
    let jacobian = (DMatrix::identity(n, n) * f + tv * tl.transpose() * fp) / h;
    Ok(ConformalImage { image: tv * (f / h), scale: f, jacobian })
}

/// `k n^rs k^T`, which equals `f^2 r^pq`.
pub fn conformal_pushforward(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<DMatrix<f64>> {
    let img = conformal_flatten(p, ctx, t)?;
    let geo = quasi_metric(p, ctx, t)?;
    Ok(&img.jacobian * geo.n_upper * img.jacobian.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff;
    use crate::scalars::metric_function;

    fn ctx() -> MetricContext {
        MetricContext::from_text("2\n1.2 -0.2\n-0.2 0.9").unwrap()
    }

    #[test]
    fn roundtrip_and_norm() {
        let ctx = ctx();
        for g in [-1.5, 0.0, 0.8, 1.5] {
            let p = GParameter::new(g).unwrap();
            for z in [0.7, 0.0, -0.6] {
                let r = FinslerVector::from_slice(&[0.3, -0.5, z]).unwrap();
                let t = sigma_map(&p, &ctx, &r).unwrap();
                let back = mu_map(&p, &ctx, &t).unwrap();
                assert!((back.as_vector() - r.as_vector()).abs().max() < 1e-14);
                let k = metric_function(&p, &ctx, &r).unwrap();
                assert!((ctx.norm(t.as_vector()) - k).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jacobians_match_differences_and_invert() {
        let ctx = ctx();
        for g in [-1.2, 1.5] {
            let p = GParameter::new(g).unwrap();
            for z in [0.45, -0.8] {
                let r = FinslerVector::from_slice(&[0.3, -0.5, z]).unwrap();
                let js = sigma_jacobian(&p, &ctx, &r).unwrap();
                let fd = numdiff::jacobian(
                    |x| sigma_map(&p, &ctx, &FinslerVector::raw(x.clone())).map(|t| t.into_vector()),
                    r.as_vector(),
                )
                .unwrap();
                assert!((&js - fd).abs().max() < 1e-8);
                let t = sigma_map(&p, &ctx, &r).unwrap();
                let jm = mu_jacobian(&p, &ctx, &t).unwrap();
                let fd = numdiff::jacobian(
                    |x| mu_map(&p, &ctx, &QuasiVector::raw(x.clone())).map(|t| t.into_vector()),
                    t.as_vector(),
                )
                .unwrap();
                assert!((&jm - fd).abs().max() < 1e-8);
                assert!((jm * js - DMatrix::identity(3, 3)).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn conformal_identity() {
        let ctx = ctx();
        let p = GParameter::new(1.1).unwrap();
        let t = QuasiVector::from_slice(&[0.3, 0.9, -0.4]).unwrap();
        let img = conformal_flatten(&p, &ctx, &t).unwrap();
        let c = conformal_pushforward(&p, &ctx, &t).unwrap();
        assert!((c / img.scale.powi(2) - ctx.r_pq_inv()).abs().max() < 1e-12);
    }
}
