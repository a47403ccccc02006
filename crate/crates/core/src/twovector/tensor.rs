use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::geodesics::{pair_invariants, PairInvariants};
use crate::numdiff;
use crate::quasimap::{check_quasi, quasi_metric_lower};
use crate::space::{GParameter, MetricContext, QuasiVector};

use super::frame::frame_from_invariants;

/// Mixed second derivative `n_pq = d^2 <t1, t2> / dt1^p dt2^q` with its scalar pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoVectorTensor {
    pub n_lower: DMatrix<f64>,
    /// `cos(alpha) - (t1t2) sin(alpha) / (h u)`.
    pub a1: f64,
    /// `cos(alpha)/h - (t1t2) sin(alpha) / u`.
    pub a2: f64,
    /// `sqrt((t1t1)(t2t2) sin(alpha) / u)`.
    pub z: f64,
    /// Closed-form determinant `(|t1||t2| sin(alpha) / u)^(N-2) h^(-N) det r`.
    pub det: f64,
    /// Frame `f^R_p(t1, t2)` in the simplified radical form; `None` when a radicand is negative.
    pub frame: Option<DMatrix<f64>>,
}

pub(crate) fn tensor_from_invariants(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &DVector<f64>,
    t2: &DVector<f64>,
    inv: &PairInvariants,
) -> (DMatrix<f64>, f64, f64, f64) {
    let h = p.h();
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let (n1, n2) = (inv.norm1(), inv.norm2());
    let a1 = c - inv.dot12 * s / (h * inv.u);
    let a2 = c / h - inv.dot12 * s / inv.u;
    let z2 = inv.dot11 * inv.dot22 * s / inv.u;
    let (l1, l2) = (ctx.lower(t1), ctx.lower(t2));
    let (e1, e2) = (ctx.lower(&inv.d1), ctx.lower(&inv.d2));
    let n = ctx.r_pq() * (z2 / (h * n1 * n2)) + &l1 * l2.transpose() * (a1 / (n1 * n2))
        - &e1 * e2.transpose() * (a2 / (h * n1 * n2));
    (n, a1, a2, z2)
}

pub fn two_vector_metric(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<TwoVectorTensor> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let (n_lower, a1, a2, z2) = tensor_from_invariants(p, ctx, x, y, &inv);
    let dim = ctx.dim() as i32;
    let ratio = inv.norm1() * inv.norm2() * inv.alpha(p).sin() / inv.u;
    let det = ratio.powi(dim - 2) * p.h().powi(-dim) * ctx.det_r();
    let frame = frame_from_invariants(p, ctx, x, y, &inv).ok();
    Ok(TwoVectorTensor { n_lower, a1, a2, z: z2.max(0.0).sqrt(), det, frame })
}

/// One step of the approach `t1 = t - eps v / 2`, `t2 = t + eps v / 2`. The tensor error
/// is first order in `eps` since the tensor is not symmetric off the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceRow {
    pub epsilon: f64,
    /// `max |n(t1, t2) - n(t)|`.
    pub tensor_error: f64,
    /// `max |dn/dt1^s + dn/dt2^s - dn(t)/dt^s|`, derivatives by differences.
    pub derivative_sum_error: f64,
    /// `max |dn/dt1^s - (1 - 1/h^2) H_sp t_q / (tt)|`.
    pub first_limit_error: f64,
    /// `max |dn/dt2^s - (1 - 1/h^2) t_p H_qs / (tt)|`.
    pub second_limit_error: f64,
    pub a1: f64,
    pub a2_over_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceReport {
    pub rows: Vec<CoincidenceRow>,
    /// `1 - 1/h^2`, the limit of `a1`.
    pub a1_limit: f64,
    /// Whether `tensor_error` decreases along the sequence.
    pub monotone: bool,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.abs().max()
}

pub fn coincidence_limits(
    p: &GParameter,
    ctx: &MetricContext,
    t: &QuasiVector,
    direction: &QuasiVector,
    epsilons: &[f64],
) -> Result<CoincidenceReport> {
    check_quasi(ctx, t)?;
    check_quasi(ctx, direction)?;
    let (u, _) = ctx.wedge_and_dot(t.as_vector(), direction.as_vector());
    if u <= 1e-12 * ctx.norm(t.as_vector()) * ctx.norm(direction.as_vector()) {
        return Err(GeometryError::Collinear { u });
    }
    let tv = t.as_vector();
    let v = direction.as_vector();
    let n = ctx.dim();
    let one = quasi_metric_lower(p, ctx, t)?;
    let tt = ctx.dot(tv, tv);
    let tl = ctx.lower(tv);
    let hl = ctx.r_pq() - &tl * tl.transpose() / tt;
    let factor = 1.0 - 1.0 / (p.h() * p.h());
    let one_derivs = numdiff::matrix_derivatives(|x| quasi_metric_lower(p, ctx, &QuasiVector::raw(x.clone())), tv)?;

    let metric = |a: &DVector<f64>, b: &DVector<f64>| -> Result<DMatrix<f64>> {
        let inv = pair_invariants(ctx, &QuasiVector::raw(a.clone()), &QuasiVector::raw(b.clone()))?;
        Ok(tensor_from_invariants(p, ctx, a, b, &inv).0)
    };

    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let t1 = tv - v * (0.5 * eps);
        let t2 = tv + v * (0.5 * eps);
        let inv = pair_invariants(ctx, &QuasiVector::raw(t1.clone()), &QuasiVector::raw(t2.clone()))?;
        let (n12, a1, a2, _) = tensor_from_invariants(p, ctx, &t1, &t2, &inv);
        let d1 = numdiff::matrix_derivatives(|x| metric(x, &t2), &t1)?;
        let d2 = numdiff::matrix_derivatives(|x| metric(&t1, x), &t2)?;
        let (mut sum_err, mut e1, mut e2) = (0.0f64, 0.0f64, 0.0f64);
        for s in 0..n {
            sum_err = sum_err.max(max_abs(&(&d1[s] + &d2[s] - &one_derivs[s])));
            let first = DMatrix::from_fn(n, n, |a, b| factor * hl[(s, a)] * tl[b] / tt);
            let second = DMatrix::from_fn(n, n, |a, b| factor * tl[a] * hl[(b, s)] / tt);
            e1 = e1.max(max_abs(&(&d1[s] - first)));
            e2 = e2.max(max_abs(&(&d2[s] - second)));
        }
        rows.push(CoincidenceRow {
            epsilon: eps,
            tensor_error: max_abs(&(n12 - &one)),
            derivative_sum_error: sum_err,
            first_limit_error: e1,
            second_limit_error: e2,
            a1,
            a2_over_u: a2 / inv.u,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].tensor_error <= w[0].tensor_error);
    Ok(CoincidenceReport { rows, a1_limit: factor, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(x: &[f64]) -> QuasiVector {
        QuasiVector::from_slice(x).unwrap()
    }

    fn ctx() -> MetricContext {
        MetricContext::from_text("3\n1.1 0.2 0.0\n0.2 0.8 -0.1\n0.0 -0.1 1.3").unwrap()
    }

    #[test]
    fn matches_mixed_differences() {
        let ctx = ctx();
        for g in [-1.5, 0.5, 1.2] {
            let p = GParameter::new(g).unwrap();
            let (t1, t2) = (qv(&[0.4, -0.3, 0.8, 0.2]), qv(&[-0.1, 0.6, 0.5, -0.4]));
            let tv = two_vector_metric(&p, &ctx, &t1, &t2).unwrap();
            let fd = numdiff::mixed_hessian(
                |a, b| crate::geodesics::scalar_product(&p, &ctx, &QuasiVector::raw(a.clone()), &QuasiVector::raw(b.clone())),
                t1.as_vector(),
                t2.as_vector(),
            )
            .unwrap();
            assert!((&tv.n_lower - fd).abs().max() < 1e-7);
            let det = tv.n_lower.determinant();
            assert!((det - tv.det).abs() < 1e-10 * det.abs());
            let swapped = two_vector_metric(&p, &ctx, &t2, &t1).unwrap();
            assert!((swapped.n_lower.transpose() - &tv.n_lower).abs().max() < 1e-13);
        }
    }

    #[test]
    fn euclidean_pair_gives_background_metric() {
        let ctx = ctx();
        let p = GParameter::new(0.0).unwrap();
        let tv = two_vector_metric(&p, &ctx, &qv(&[0.4, -0.3, 0.8, 0.2]), &qv(&[-0.1, 0.6, 0.5, -0.4])).unwrap();
        assert!((&tv.n_lower - ctx.r_pq()).abs().max() < 1e-14);
    }

    #[test]
    fn coincidence_sequence() {
        let ctx = ctx();
        let p = GParameter::new(1.0).unwrap();
        let rep = coincidence_limits(
            &p,
            &ctx,
            &qv(&[0.4, -0.3, 0.8, 0.2]),
            &qv(&[0.3, 0.5, -0.2, 0.1]),
            &[1e-2, 1e-3, 1e-4],
        )
        .unwrap();
        assert!(rep.monotone);
        let last = rep.rows.last().unwrap();
        assert!(last.tensor_error < 1e-4);
        assert!(last.derivative_sum_error < 1e-4);
        assert!((last.a1 - rep.a1_limit).abs() < 1e-6);
        assert!(last.a2_over_u.abs() < 1e-3);
    }
}
