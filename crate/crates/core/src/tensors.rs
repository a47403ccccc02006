//! One-vector tensors: gradient covector, metric tensor and its inverse, angular tensor,
//! Cartan tensor and the curvature tensor.

use nalgebra::{DMatrix, DVector};

use crate::dense::{Tensor3, Tensor4};
use crate::error::{GeometryError, Result};
use crate::numdiff;
use crate::scalars::{scalar_bundle, ScalarBundle};
use crate::space::{FinslerVector, GParameter, MetricContext};

struct Pieces {
    s: ScalarBundle,
    /// `r_ab R^b` padded with a zero last slot.
    rb: DVector<f64>,
    k2: f64,
}

fn pieces(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<Pieces> {
    let s = scalar_bundle(p, ctx, r)?;
    let rb = ctx.bold_lower(r.as_vector());
    Ok(Pieces { k2: s.k * s.k, s, rb })
}

/// `R_p = (1/2) dK^2/dR^p`.
pub fn gradient_covector(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<DVector<f64>> {
    let Pieces { s, rb, k2 } = pieces(p, ctx, r)?;
    let n = ctx.dim();
    let mut out = rb * (k2 / s.b);
    out[n - 1] = (s.z + p.g() * s.q) * k2 / s.b;
    Ok(out)
}

/// The metric tensor `g_pq`. On the axis `q = 0` the removable term `Z/q` is taken as zero.
pub fn metric_tensor(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<DMatrix<f64>> {
    let Pieces { s, rb, k2 } = pieces(p, ctx, r)?;
    let n = ctx.dim();
    let n1 = n - 1;
    let g = p.g();
    let b2 = s.b * s.b;
    let mut m = DMatrix::zeros(n, n);
    m[(n1, n1)] = ((s.z + g * s.q).powi(2) + s.q * s.q) * k2 / b2;
    let off = if s.q > 0.0 { g * s.z / s.q * k2 / b2 } else { 0.0 };
    for a in 0..n1 {
        let v = g * s.q * rb[a] * k2 / b2;
        m[(n1, a)] = v;
        m[(a, n1)] = v;
        for b in 0..n1 {
            m[(a, b)] = k2 / s.b * ctx.r_ab()[(a, b)] - off * rb[a] * rb[b];
        }
    }
    Ok(m)
}

/// The reciprocal tensor `g^pq` in closed form.
pub fn inverse_metric(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<DMatrix<f64>> {
    let Pieces { s, k2, .. } = pieces(p, ctx, r)?;
    let n = ctx.dim();
    let n1 = n - 1;
    let g = p.g();
    let rv = r.as_vector();
    let r_inv = ctx.r_pq_inv();
    let mut m = DMatrix::zeros(n, n);
    m[(n1, n1)] = (s.z * s.z + s.q * s.q) / k2;
    let off = if s.q > 0.0 { g * (s.z + g * s.q) / (s.q * k2) } else { 0.0 };
    for a in 0..n1 {
        let v = -g * s.q * rv[a] / k2;
        m[(n1, a)] = v;
        m[(a, n1)] = v;
        for b in 0..n1 {
            m[(a, b)] = s.b / k2 * r_inv[(a, b)] + off * rv[a] * rv[b];
        }
    }
    Ok(m)
}

/// `h_pq = g_pq - R_p R_q / K^2`.
pub fn angular_tensor(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<DMatrix<f64>> {
    let gl = metric_tensor(p, ctx, r)?;
    let rl = gradient_covector(p, ctx, r)?;
    let k2 = scalar_bundle(p, ctx, r)?.k.powi(2);
    Ok(gl - &rl * rl.transpose() / k2)
}

/// Component list of the angular tensor, independent of `angular_tensor`.
pub fn angular_tensor_listed(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<DMatrix<f64>> {
    let Pieces { s, rb, k2 } = pieces(p, ctx, r)?;
    let n = ctx.dim();
    let n1 = n - 1;
    let b2 = s.b * s.b;
    let mut m = DMatrix::zeros(n, n);
    m[(n1, n1)] = s.q * s.q * k2 / b2;
    let off = if s.q > 0.0 { (p.g() * s.z + s.q) / s.q * k2 / b2 } else { 0.0 };
    for a in 0..n1 {
        let v = -s.z * rb[a] * k2 / b2;
        m[(n1, a)] = v;
        m[(a, n1)] = v;
        for b in 0..n1 {
            m[(a, b)] = k2 / s.b * ctx.r_ab()[(a, b)] - off * rb[a] * rb[b];
        }
    }
    Ok(m)
}

/// Cartan tensor with its index placements and traces.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanTensor {
    /// `C_pqr`.
    pub lower: Tensor3,
    /// `C_p^q_r = g^{qt} C_ptr`.
    pub mixed: Tensor3,
    /// `C_p = g^{qr} C_pqr`.
    pub vec_lower: DVector<f64>,
    /// `C^p = g^{pq} C_q`.
    pub vec_upper: DVector<f64>,
}

impl CartanTensor {
    /// `C_p C^p`.
    pub fn trace_square(&self) -> f64 {
        self.vec_lower.dot(&self.vec_upper)
    }
}

struct Chart {
    z: f64,
    w: f64,
    /// `w_a = r_ab R^b / Z`, padded.
    w_low: DVector<f64>,
    /// `w^a = R^a / Z`, padded.
    w_up: DVector<f64>,
    q: f64,
    v2: f64,
}

fn chart(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<Chart> {
    let s = scalar_bundle(p, ctx, r)?;
    if s.q == 0.0 || s.z == 0.0 {
        return Err(GeometryError::OnAxis { q: s.q, z: s.z });
    }
    let w = s.q / s.z;
    let mut w_up = r.as_vector() / s.z;
    w_up[ctx.dim() - 1] = 0.0;
    let w_low = ctx.bold_lower(&w_up);
    let v = s.k / s.z.abs();
    Ok(Chart { z: s.z, w, w_low, w_up, q: crate::scalars::quadratic_q(p, w), v2: v * v })
}

/// Lowered Cartan components from the `w`-chart lists. Requires `q != 0` and `Z != 0`.
pub fn cartan_lower(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<Tensor3> {
    let c = chart(p, ctx, r)?;
    let n = ctx.dim();
    let n1 = n - 1;
    let g = p.g();
    let (w, q, v2) = (c.w, c.q, c.v2);
    let rab = ctx.r_ab();
    let wl = &c.w_low;
    let q2 = q * q;
    let q3 = q2 * q;
    let mut t = Tensor3::zeros(n);
    let nnn = g * w.powi(3) * v2 / q3;
    t[(n1, n1, n1)] = nnn / c.z;
    for a in 0..n1 {
        let ann = -g * w * wl[a] * v2 / q3 / c.z;
        t[(a, n1, n1)] = ann;
        t[(n1, a, n1)] = ann;
        t[(n1, n1, a)] = ann;
        for b in 0..n1 {
            let abn = (0.5 * g * w * v2 / q2 * rab[(a, b)]
                + 0.5 * g * (1.0 - g * w - w * w) * wl[a] * wl[b] / w * v2 / q3)
                / c.z;
            t[(a, b, n1)] = abn;
            t[(a, n1, b)] = abn;
            t[(n1, a, b)] = abn;
            for cc in 0..n1 {
                let first = -0.5 * g * v2 / q2 / w
                    * (rab[(a, b)] * wl[cc] + rab[(a, cc)] * wl[b] + rab[(b, cc)] * wl[a]);
                let second = g * wl[a] * wl[b] * wl[cc] / w.powi(3) * (0.5 * q + g * w + w * w) * v2 / q3;
                t[(a, b, cc)] = (first + second) / c.z;
            }
        }
    }
    Ok(t)
}

/// Full Cartan tensor: lowered list, mixed components raised with `g^pq`, and traces.
pub fn cartan_tensor(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<CartanTensor> {
    let lower = cartan_lower(p, ctx, r)?;
    let gi = inverse_metric(p, ctx, r)?;
    Ok(assemble_cartan(lower, &gi))
}

fn assemble_cartan(lower: Tensor3, gi: &DMatrix<f64>) -> CartanTensor {
    let n = lower.dim();
    let mixed = Tensor3::from_fn(n, |pp, qq, rr| (0..n).map(|t| gi[(qq, t)] * lower[(pp, t, rr)]).sum());
    let vec_lower = DVector::from_fn(n, |pp, _| {
        let mut acc = 0.0;
        for qq in 0..n {
            for rr in 0..n {
                acc += gi[(qq, rr)] * lower[(pp, qq, rr)];
            }
        }
        acc
    });
    let vec_upper = gi * &vec_lower;
    CartanTensor { lower, mixed, vec_lower, vec_upper }
}

/// Cartan tensor from central differences of `metric_tensor`; valid on the axis too.
pub fn cartan_by_differences(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<CartanTensor> {
    let n = ctx.dim();
    let derivs = numdiff::matrix_derivatives(|x| metric_tensor(p, ctx, &FinslerVector::raw(x.clone())), r.as_vector())?;
    let lower = Tensor3::from_fn(n, |a, b, c| 0.5 * derivs[c][(a, b)]);
    let gi = inverse_metric(p, ctx, r)?;
    Ok(assemble_cartan(lower, &gi))
}

/// The mixed list `C_p^q_r` written directly in the `w` chart, used to cross-check the raised form.
pub fn cartan_mixed_listed(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<Tensor3> {
    let c = chart(p, ctx, r)?;
    let n = ctx.dim();
    let n1 = n - 1;
    let g = p.g();
    let (w, q) = (c.w, c.q);
    let q2 = q * q;
    let rab = ctx.r_ab();
    let (wl, wu) = (&c.w_low, &c.w_up);
    let mut t = Tensor3::zeros(n);
    t[(n1, n1, n1)] = g * w.powi(3) / q2;
    for a in 0..n1 {
        let ann = -g * w * wl[a] / q2;
        t[(a, n1, n1)] = ann;
        t[(n1, n1, a)] = ann;
        t[(n1, a, n1)] = -g * w * (1.0 + g * w) * wu[a] / q2;
        for b in 0..n1 {
            let anb = 0.5 * g * w * rab[(a, b)] / q + 0.5 * g * (1.0 - g * w - w * w) * wl[a] * wl[b] / (w * q2);
            t[(a, n1, b)] = anb;
            let delta = if a == b { 1.0 } else { 0.0 };
            let nab = 0.5 * g * w * delta / q + 0.5 * g * (1.0 + g * w - w * w) * wu[a] * wl[b] / (w * q2);
            t[(n1, a, b)] = nab;
            t[(b, a, n1)] = nab;
            for cc in 0..n1 {
                let dab = if a == b { 1.0 } else { 0.0 };
                let dcb = if cc == b { 1.0 } else { 0.0 };
                let first = -0.5 * g * (dab * wl[cc] + dcb * wl[a] + (1.0 + g * w) * rab[(a, cc)] * wu[b]) / (w * q);
                let second = 0.5 * g * (g * w * q + q + 2.0 * w * w) * wl[a] * wu[b] * wl[cc] / (w.powi(3) * q2);
                t[(a, b, cc)] = first + second;
            }
        }
    }
    let mut out = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[(i, j, k)] = t[(i, j, k)] / c.z;
            }
        }
    }
    Ok(out)
}

/// Closed-form traces `(C_p, C^p)` from the `w`-chart list.
pub fn cartan_traces_listed(
    p: &GParameter,
    ctx: &MetricContext,
    r: &FinslerVector,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let c = chart(p, ctx, r)?;
    let n = ctx.dim();
    let n1 = n - 1;
    let g = p.g();
    let nf = n as f64;
    let k2 = c.v2 * c.z * c.z;
    let mut low = DVector::zeros(n);
    let mut up = DVector::zeros(n);
    low[n1] = 0.5 * nf * g * c.w / c.q / c.z;
    up[n1] = 0.5 * nf * g * c.w * c.z / k2;
    for a in 0..n1 {
        low[a] = -0.5 * nf * g * c.w_low[a] / c.w / c.q / c.z;
        up[a] = -0.5 * nf * g * c.w_up[a] * (1.0 + g * c.w) / c.w * c.z / k2;
    }
    Ok((low, up))
}

/// `(h_pq C_r + h_pr C_q + h_qr C_p - C_p C_q C_r / (C_s C^s)) / N`; zero when the trace vanishes.
pub fn cartan_algebraic_form(h_lower: &DMatrix<f64>, c: &CartanTensor) -> Tensor3 {
    let n = h_lower.nrows();
    let cs = c.trace_square();
    let v = &c.vec_lower;
    if cs == 0.0 {
        return Tensor3::zeros(n);
    }
    Tensor3::from_fn(n, |a, b, d| {
        (h_lower[(a, b)] * v[d] + h_lower[(a, d)] * v[b] + h_lower[(b, d)] * v[a] - v[a] * v[b] * v[d] / cs) / n as f64
    })
}

/// `S_pqrs = C_tqr C_p^t_s - C_tqs C_p^t_r`.
pub fn curvature_tensor(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<Tensor4> {
    Ok(curvature_from_cartan(&cartan_tensor(p, ctx, r)?))
}

pub fn curvature_from_cartan(c: &CartanTensor) -> Tensor4 {
    let n = c.lower.dim();
    Tensor4::from_fn(n, |pp, qq, rr, ss| {
        (0..n)
            .map(|t| c.lower[(t, qq, rr)] * c.mixed[(pp, t, ss)] - c.lower[(t, qq, ss)] * c.mixed[(pp, t, rr)])
            .sum()
    })
}

/// `S* (h_pr h_qs - h_ps h_qr) / K^2` with `S* = -g^2/4`.
pub fn curvature_closed_form(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<Tensor4> {
    let h = angular_tensor(p, ctx, r)?;
    let k2 = scalar_bundle(p, ctx, r)?.k.powi(2);
    let s_star = p.curvature_constant();
    Ok(Tensor4::from_fn(ctx.dim(), |a, b, c, d| {
        s_star * (h[(a, c)] * h[(b, d)] - h[(a, d)] * h[(b, c)]) / k2
    }))
}

/// Recovers the scalar `S*` from a curvature tensor by projecting on the angular structure.
/// Undefined for `N = 2`, where the angular structure has rank one and the tensor vanishes.
pub fn curvature_scalar(p: &GParameter, ctx: &MetricContext, r: &FinslerVector, s: &Tensor4) -> Result<f64> {
    let n = ctx.dim();
    if n < 3 {
        return Err(GeometryError::NumericalDomain { quantity: "curvature scalar dimension", value: n as f64 });
    }
    let h = angular_tensor(p, ctx, r)?;
    let k2 = scalar_bundle(p, ctx, r)?.k.powi(2);
    let (mut num, mut den) = (0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let basis = (h[(a, c)] * h[(b, d)] - h[(a, d)] * h[(b, c)]) / k2;
                    num += s[(a, b, c, d)] * basis;
                    den += basis * basis;
                }
            }
        }
    }
    Ok(num / den)
}

/// Every one-vector tensor at `R`. Requires `R` off the axis and the base plane.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorStack {
    pub r_lower: DVector<f64>,
    pub g_lower: DMatrix<f64>,
    pub g_upper: DMatrix<f64>,
    pub h_lower: DMatrix<f64>,
    pub cartan: CartanTensor,
    pub curvature: Tensor4,
}

pub fn tensor_stack(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<TensorStack> {
    let cartan = cartan_tensor(p, ctx, r)?;
    let curvature = curvature_from_cartan(&cartan);
    Ok(TensorStack {
        r_lower: gradient_covector(p, ctx, r)?,
        g_lower: metric_tensor(p, ctx, r)?,
        g_upper: inverse_metric(p, ctx, r)?,
        h_lower: angular_tensor(p, ctx, r)?,
        cartan,
        curvature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (MetricContext, FinslerVector) {
        let ctx = MetricContext::from_text("2\n1.5 0.3\n0.3 0.8").unwrap();
        (ctx, FinslerVector::from_slice(&[0.4, -0.7, 0.55]).unwrap())
    }

    #[test]
    fn metric_inverse_and_hessian() {
        let (ctx, r) = sample();
        for g in [-1.5, 0.5, 1.2] {
            let p = GParameter::new(g).unwrap();
            let gl = metric_tensor(&p, &ctx, &r).unwrap();
            let gu = inverse_metric(&p, &ctx, &r).unwrap();
            assert!((&gl * &gu - DMatrix::identity(3, 3)).abs().max() < 1e-12);
            let hess = numdiff::hessian(
                |x| Ok(crate::scalars::metric_function(&p, &ctx, &FinslerVector::raw(x.clone()))?.powi(2)),
                r.as_vector(),
            )
            .unwrap();
            assert!((hess * 0.5 - &gl).abs().max() < 1e-8);
        }
    }

    #[test]
    fn cartan_lists_agree_with_differences() {
        let (ctx, mut r) = sample();
        for z in [0.55, -0.35] {
            r = FinslerVector::from_slice(&[r.as_slice()[0], r.as_slice()[1], z]).unwrap();
            for g in [-1.3, 0.7, 1.5] {
                let p = GParameter::new(g).unwrap();
                let c = cartan_tensor(&p, &ctx, &r).unwrap();
                let fd = cartan_by_differences(&p, &ctx, &r).unwrap();
                assert!(c.lower.max_abs_diff(&fd.lower) < 1e-8 * c.lower.max_abs().max(1.0), "lower g={g} z={z} {} {}", c.lower.max_abs_diff(&fd.lower), c.lower.max_abs());
                let listed = cartan_mixed_listed(&p, &ctx, &r).unwrap();
                assert!(c.mixed.max_abs_diff(&listed) < 1e-10, "mixed g={g} z={z}");
                let (low, up) = cartan_traces_listed(&p, &ctx, &r).unwrap();
                assert!((&c.vec_lower - low).abs().max() < 1e-10);
                assert!((&c.vec_upper - up).abs().max() < 1e-10);
            }
        }
    }

    #[test]
    fn angular_list_matches_definition() {
        let (ctx, r) = sample();
        let p = GParameter::new(-0.9).unwrap();
        let a = angular_tensor(&p, &ctx, &r).unwrap();
        let b = angular_tensor_listed(&p, &ctx, &r).unwrap();
        assert!((a - b).abs().max() < 1e-12);
    }

    #[test]
    fn axis_is_rejected_for_cartan() {
        let ctx = MetricContext::identity(3).unwrap();
        let p = GParameter::new(0.5).unwrap();
        let r = FinslerVector::from_slice(&[0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(cartan_tensor(&p, &ctx, &r), Err(GeometryError::OnAxis { .. })));
        assert!(metric_tensor(&p, &ctx, &r).is_ok());
    }
}
