//! The scalar product, angle, two-vector tensor and geodesics written in the original
//! coordinates `R`, together with the angles a vector makes with the axis and the base plane.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::geodesics::{solve_chord, GeodesicChord};
use crate::quasimap::{mu_jacobian, mu_map, sigma_map};
use crate::scalars::{scalar_bundle, ScalarBundle};
use crate::space::{clamped_acos, FinslerVector, GParameter, MetricContext};
use crate::tensors::{gradient_covector, metric_tensor};

/// `<R, S>` with its angle and the auxiliary objects of its derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct FinslerPairProduct {
    pub product: f64,
    pub alpha: f64,
    /// `sqrt(B(R) B(S) - (A(R) A(S) + h^2 r_be R^b S^e)^2)`.
    pub w: f64,
    pub m_r: DVector<f64>,
    /// `None` when the images of `R` and `S` are collinear.
    pub s_r: Option<DVector<f64>>,
    pub g_lower: Option<DMatrix<f64>>,
}

struct Pair {
    sr: ScalarBundle,
    ss: ScalarBundle,
    /// `r_be R^b S^e`.
    rs: f64,
    /// `A(R) A(S) + h^2 r_be R^b S^e`.
    x: f64,
    w: f64,
}

fn pair(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<Pair> {
    let sr = scalar_bundle(p, ctx, r)?;
    let ss = scalar_bundle(p, ctx, s)?;
    ctx.check_dim(s.dim())?;
    let rs = ctx.bold_dot(r.as_vector(), s.as_vector());
    let x = sr.a * ss.a + p.h() * p.h() * rs;
    let w = (sr.b * ss.b - x * x).max(0.0).sqrt();
    Ok(Pair { sr, ss, rs, x, w })
}

fn pair_alpha(p: &GParameter, pr: &Pair) -> Result<f64> {
    Ok(clamped_acos(pr.x / (pr.sr.b * pr.ss.b).sqrt(), "product angle cosine")? / p.h())
}

/// `<R, S> = K(R) K(S) cos(alpha)`.
pub fn product_value(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<f64> {
    let pr = pair(p, ctx, r, s)?;
    Ok(pr.sr.k * pr.ss.k * pair_alpha(p, &pr)?.cos())
}

/// The angle `alpha(R, S)`.
pub fn finsler_angle(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<f64> {
    pair_alpha(p, &pair(p, ctx, r, s)?)
}

fn m_from_pair(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector, pr: &Pair) -> DVector<f64> {
    let n = ctx.dim();
    let g = p.g();
    let (rv, sv) = (r.as_vector(), s.as_vector());
    let (qr, zr) = (pr.sr.q, pr.sr.z);
    let mut base = -rv * (zr * pr.ss.a) + sv * pr.sr.b;
    if qr > 0.0 {
        base -= rv * (pr.rs * (qr + 0.5 * g * zr) / qr);
    }
    let mut m = ctx.bold_lower(&base);
    m[n - 1] = qr * qr * pr.ss.a - pr.rs * pr.sr.a;
    m
}

/// `M_p(R, S)`, the simplified numerator of `d alpha / dR^p`.
pub fn m_vector(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<DVector<f64>> {
    let pr = pair(p, ctx, r, s)?;
    Ok(m_from_pair(p, ctx, r, s, &pr))
}

/// `M_p(R, S)` taken as `B(R) sqrt(B(R) B(S)) / h^2` times the derivative of the angle cosine,
/// with the base components in their unsimplified form.
pub fn m_vector_unsimplified(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<DVector<f64>> {
    let pr = pair(p, ctx, r, s)?;
    let n = ctx.dim();
    let (g, h2) = (p.g(), p.h() * p.h());
    let (rv, sv) = (r.as_vector(), s.as_vector());
    let (qr, zr, br) = (pr.sr.q, pr.sr.z, pr.sr.b);
    let unit = if qr > 0.0 { rv / qr } else { DVector::zeros(n) };
    let first = ctx.bold_lower(&(&unit * (0.5 * g * pr.ss.a) + sv * h2)) * br;
    let second = ctx.bold_lower(&unit) * (pr.x * (0.5 * g * zr + qr));
    let mut m = (first - second) / h2;
    // d/dZ of the cosine numerator and of B(R)
    let dx = pr.ss.a;
    let db = 2.0 * zr + g * qr;
    m[n - 1] = (br * dx - 0.5 * pr.x * db) / h2;
    Ok(m)
}

/// `s_p(R, S) = M_p K(R) / (W B(R))`.
pub fn s_vector(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<DVector<f64>> {
    let pr = pair(p, ctx, r, s)?;
    if pr.w <= 1e-14 * (pr.sr.b * pr.ss.b).sqrt() {
        return Err(GeometryError::Collinear { u: pr.w });
    }
    Ok(m_from_pair(p, ctx, r, s, &pr) * (pr.sr.k / (pr.w * pr.sr.b)))
}

/// `(d<R,S>/dR^p, d<R,S>/dS^q)`.
pub fn product_gradients(
    p: &GParameter,
    ctx: &MetricContext,
    r: &FinslerVector,
    s: &FinslerVector,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let pr = pair(p, ctx, r, s)?;
    let alpha = pair_alpha(p, &pr)?;
    let value = pr.sr.k * pr.ss.k * alpha.cos();
    let h = p.h();
    let (sr, ss) = (s_vector(p, ctx, r, s)?, s_vector(p, ctx, s, r)?);
    let (lr, ls) = (gradient_covector(p, ctx, r)?, gradient_covector(p, ctx, s)?);
    let sin = alpha.sin();
    Ok((
        lr * (value / (pr.sr.k * pr.sr.k)) + sr * (h * pr.ss.k * sin),
        ls * (value / (pr.ss.k * pr.ss.k)) + ss * (h * pr.sr.k * sin),
    ))
}

/// Gradients of `A` and `B` at `R`; `R` must be off the axis.
fn ab_gradients(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, sb: &ScalarBundle) -> Result<(DVector<f64>, DVector<f64>)> {
    if sb.q == 0.0 {
        return Err(GeometryError::OnAxis { q: sb.q, z: sb.z });
    }
    let n = ctx.dim();
    let g = p.g();
    let dq = ctx.bold_lower(r.as_vector()) / sb.q;
    let mut da = &dq * (0.5 * g);
    da[n - 1] = 1.0;
    let mut db = &dq * (g * sb.z + 2.0 * sb.q);
    db[n - 1] = 2.0 * sb.z + g * sb.q;
    Ok((da, db))
}

/// `s_pq(R, S) = K(S) d s_p(R, S) / dS^q`.
pub fn s_tensor(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<DMatrix<f64>> {
    let pr = pair(p, ctx, r, s)?;
    if pr.w <= 1e-14 * (pr.sr.b * pr.ss.b).sqrt() {
        return Err(GeometryError::Collinear { u: pr.w });
    }
    let n = ctx.dim();
    let h2 = p.h() * p.h();
    let (da_r, db_r) = ab_gradients(p, ctx, r, &pr.sr)?;
    let (da_s, db_s) = ab_gradients(p, ctx, s, &pr.ss)?;
    let mut bold = ctx.r_pq().clone();
    bold.row_mut(n - 1).fill(0.0);
    bold.column_mut(n - 1).fill(0.0);
    let dx_r = &da_r * pr.ss.a + ctx.bold_lower(s.as_vector()) * h2;
    let dx_s = &da_s * pr.sr.a + ctx.bold_lower(r.as_vector()) * h2;
    let dx_rs = &da_r * da_s.transpose() + bold * h2;
    let m = (&dx_r * pr.sr.b - &db_r * (0.5 * pr.x)) / h2;
    let dm = (dx_rs * pr.sr.b - &db_r * dx_s.transpose() * 0.5) / h2;
    let dw = (&db_s * pr.sr.b - &dx_s * (2.0 * pr.x)) / (2.0 * pr.w);
    let scale = pr.sr.k / pr.sr.b * pr.ss.k;
    Ok((dm / pr.w - &m * dw.transpose() / (pr.w * pr.w)) * scale)
}

/// `G_pq(R, S) = d^2 <R,S> / dR^p dS^q` in the cos/sin decomposition.
pub fn finsler_two_vector_tensor(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<DMatrix<f64>> {
    let pr = pair(p, ctx, r, s)?;
    let alpha = pair_alpha(p, &pr)?;
    let h = p.h();
    let (kr, ks) = (pr.sr.k, pr.ss.k);
    let (srs, ssr) = (s_vector(p, ctx, r, s)?, s_vector(p, ctx, s, r)?);
    let (lr, ls) = (gradient_covector(p, ctx, r)?, gradient_covector(p, ctx, s)?);
    let spq = s_tensor(p, ctx, r, s)?;
    let cos_part = &lr * ls.transpose() / (kr * ks) - &srs * ssr.transpose() * (h * h);
    let sin_part = &lr * ssr.transpose() / kr + &srs * ls.transpose() / ks + spq;
    Ok(cos_part * alpha.cos() + sin_part * (h * alpha.sin()))
}

pub fn finsler_product(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &FinslerVector) -> Result<FinslerPairProduct> {
    let pr = pair(p, ctx, r, s)?;
    let alpha = pair_alpha(p, &pr)?;
    let m_r = m_from_pair(p, ctx, r, s, &pr);
    let s_r = s_vector(p, ctx, r, s).ok();
    let g_lower = if s_r.is_some() { finsler_two_vector_tensor(p, ctx, r, s).ok() } else { None };
    Ok(FinslerPairProduct { product: pr.sr.k * pr.ss.k * alpha.cos(), alpha, w: pr.w, m_r, s_r, g_lower })
}

/// Geodesic through `R1`, `R2`: the image under `mu` of the chord joining their images.
#[derive(Debug, Clone, PartialEq)]
pub struct FinslerGeodesic {
    pub chord: GeodesicChord,
    p: GParameter,
    ctx: MetricContext,
}

impl FinslerGeodesic {
    pub fn new(p: &GParameter, ctx: &MetricContext, r1: &FinslerVector, r2: &FinslerVector) -> Result<Self> {
        let t1 = sigma_map(p, ctx, r1)?;
        let t2 = sigma_map(p, ctx, r2)?;
        let chord = solve_chord(p, ctx, &t1, &t2)?;
        Ok(Self { chord, p: *p, ctx: ctx.clone() })
    }

    pub fn length(&self) -> f64 {
        self.chord.delta_s
    }

    pub fn point(&self, s: f64) -> Result<FinslerVector> {
        mu_map(&self.p, &self.ctx, &self.chord.point(s).t)
    }

    /// `dR/ds` through the Jacobian of `mu`.
    pub fn velocity(&self, s: f64) -> Result<DVector<f64>> {
        let t = self.chord.point(s).t;
        Ok(mu_jacobian(&self.p, &self.ctx, &t)? * self.chord.velocity(s))
    }

    /// `integral of sqrt(g_pq(R) R'^p R'^q) ds` over the chord by composite Simpson with
    /// `intervals` (rounded up to even) subintervals.
    pub fn arc_length(&self, intervals: usize) -> Result<f64> {
        let n = (intervals.max(2) + 1) / 2 * 2;
        let step = self.length() / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let s = i as f64 * step;
            let r = self.point(s)?;
            let v = self.velocity(s)?;
            let speed = (v.transpose() * metric_tensor(&self.p, &self.ctx, &r)? * &v)[(0, 0)].max(0.0).sqrt();
            let weight = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += weight * speed;
        }
        Ok(acc * step / 3.0)
    }
}

pub fn finsler_geodesic(p: &GParameter, ctx: &MetricContext, r1: &FinslerVector, r2: &FinslerVector, s: f64) -> Result<FinslerVector> {
    FinslerGeodesic::new(p, ctx, r1, r2)?.point(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngles {
    /// Angle with the positive `R^N` axis, `(1/h) arccos(A / sqrt B)`.
    pub axis: f64,
    /// Angle with the base plane, `(1/h) arccos(L / sqrt B)`.
    pub plane: f64,
}

pub fn axis_angles(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<AxisAngles> {
    let s = scalar_bundle(p, ctx, r)?;
    let root = s.b.sqrt();
    Ok(AxisAngles {
        axis: clamped_acos(s.a / root, "axis angle cosine")? / p.h(),
        plane: clamped_acos(s.l / root, "plane angle cosine")? / p.h(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff;
    use crate::geodesics::scalar_product;
    use crate::quasimap::sigma_jacobian;
    use crate::scalars::metric_function;
    use crate::twovector::two_vector_metric;

    fn fv(x: &[f64]) -> FinslerVector {
        FinslerVector::from_slice(x).unwrap()
    }

    fn ctx() -> MetricContext {
        MetricContext::from_text("3\n1.1 0.2 0.0\n0.2 0.8 -0.1\n0.0 -0.1 1.3").unwrap()
    }

    #[test]
    fn product_is_pullback() {
        let ctx = ctx();
        let (r, s) = (fv(&[0.4, -0.3, 0.8, 0.2]), fv(&[0.1, 0.6, 0.5, -0.4]));
        for g in [-1.5, 0.0, 0.9] {
            let p = GParameter::new(g).unwrap();
            let fp = finsler_product(&p, &ctx, &r, &s).unwrap();
            let (t1, t2) = (sigma_map(&p, &ctx, &r).unwrap(), sigma_map(&p, &ctx, &s).unwrap());
            assert!((fp.product - scalar_product(&p, &ctx, &t1, &t2).unwrap()).abs() < 1e-13);
            let k = metric_function(&p, &ctx, &r).unwrap();
            assert!((product_value(&p, &ctx, &r, &r).unwrap() - k * k).abs() < 1e-12);
            assert!(fp.m_r.dot(r.as_vector()).abs() < 1e-13);
            let un = m_vector_unsimplified(&p, &ctx, &r, &s).unwrap();
            assert!((un - &fp.m_r).abs().max() < 1e-13);
        }
    }

    #[test]
    fn gradients_and_tensor_match_differences() {
        let ctx = ctx();
        let (r, s) = (fv(&[0.4, -0.3, 0.8, 0.2]), fv(&[0.1, 0.6, 0.5, -0.4]));
        for g in [-1.2, 0.6] {
            let p = GParameter::new(g).unwrap();
            let (dr, ds) = product_gradients(&p, &ctx, &r, &s).unwrap();
            let fr = numdiff::gradient(|x| product_value(&p, &ctx, &FinslerVector::raw(x.clone()), &s), r.as_vector()).unwrap();
            let fs = numdiff::gradient(|x| product_value(&p, &ctx, &r, &FinslerVector::raw(x.clone())), s.as_vector()).unwrap();
            assert!((dr - fr).abs().max() < 1e-8);
            assert!((ds - fs).abs().max() < 1e-8);
            let big_g = finsler_two_vector_tensor(&p, &ctx, &r, &s).unwrap();
            let fd = numdiff::mixed_hessian(
                |a, b| product_value(&p, &ctx, &FinslerVector::raw(a.clone()), &FinslerVector::raw(b.clone())),
                r.as_vector(),
                s.as_vector(),
            )
            .unwrap();
            assert!((&big_g - fd).abs().max() < 1e-6);
            let (t1, t2) = (sigma_map(&p, &ctx, &r).unwrap(), sigma_map(&p, &ctx, &s).unwrap());
            let n = two_vector_metric(&p, &ctx, &t1, &t2).unwrap().n_lower;
            let pulled = sigma_jacobian(&p, &ctx, &r).unwrap().transpose() * n * sigma_jacobian(&p, &ctx, &s).unwrap();
            assert!((&big_g - pulled).abs().max() < 1e-8);
            let swapped = finsler_two_vector_tensor(&p, &ctx, &s, &r).unwrap();
            assert!((swapped.transpose() - &big_g).abs().max() < 1e-8);
        }
    }

    #[test]
    fn geodesic_endpoints_and_length() {
        let ctx = ctx();
        let p = GParameter::new(1.1).unwrap();
        let (r1, r2) = (fv(&[0.4, -0.3, 0.8, 0.2]), fv(&[0.1, 0.6, 0.5, -0.4]));
        let geo = FinslerGeodesic::new(&p, &ctx, &r1, &r2).unwrap();
        assert!((geo.point(0.0).unwrap().as_vector() - r1.as_vector()).abs().max() < 1e-13);
        assert!((geo.point(geo.length()).unwrap().as_vector() - r2.as_vector()).abs().max() < 1e-13);
        let len = geo.arc_length(1000).unwrap();
        assert!((len - geo.length()).abs() < 1e-8 * geo.length());
    }

    #[test]
    fn axis_angle_cases() {
        let ctx = ctx();
        let p = GParameter::new(0.8).unwrap();
        let a = axis_angles(&p, &ctx, &fv(&[0.0, 0.0, 0.0, 2.0])).unwrap();
        assert_eq!(a.axis, 0.0);
        let r = fv(&[0.4, -0.3, 0.8, -0.2]);
        let a = axis_angles(&p, &ctx, &r).unwrap();
        let via = finsler_angle(&p, &ctx, &r, &fv(&[0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((a.axis - via).abs() < 1e-14);
    }
}
