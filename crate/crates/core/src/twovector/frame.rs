use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{GeometryError, Result};
use crate::geodesics::{pair_invariants, PairInvariants};
use crate::space::{GParameter, MetricContext, QuasiVector};

struct Radicals {
    pre: f64,
    z: f64,
    root1: f64,
    root2: f64,
}

fn radicals(p: &GParameter, inv: &PairInvariants) -> Result<Radicals> {
    let h = p.h();
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let z2 = inv.dot11 * inv.dot22 * s / inv.u;
    let rad1 = h * inv.dot12 * c + inv.u * s;
    let rad2 = inv.dot12 * c / h + inv.u * s;
    for (quantity, value) in [("frame z^2", z2), ("frame radicand 1", rad1), ("frame radicand 2", rad2)] {
        if value < 0.0 {
            return Err(GeometryError::NumericalDomain { quantity, value });
        }
    }
    Ok(Radicals { pre: (h * inv.norm1() * inv.norm2()).sqrt(), z: z2.sqrt(), root1: rad1.sqrt(), root2: rad2.sqrt() })
}

pub(crate) fn frame_from_invariants(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &DVector<f64>,
    t2: &DVector<f64>,
    inv: &PairInvariants,
) -> Result<DMatrix<f64>> {
    let rad = radicals(p, inv)?;
    let h = p.h();
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let a1 = c - inv.dot12 * s / (h * inv.u);
    let a2 = c / h - inv.dot12 * s / inv.u;
    // (z - sqrt(z^2 + (t1t2) X)) / (t1t2) = -X / (z + sqrt(...))
    let c1 = h * a1 / (rad.z + rad.root1);
    let c2 = -a2 / (rad.z + rad.root2);
    let f = ctx.frame();
    let out = f * rad.z + (f * t2) * ctx.lower(t1).transpose() * c1 + (f * &inv.d1) * ctx.lower(&inv.d2).transpose() * c2;
    Ok(out / rad.pre)
}

/// Frame `f^R_p(t1, t2)`, rows indexing `R`, in the simplified radical form.
pub fn frame(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<DMatrix<f64>> {
    let inv = pair_invariants(ctx, t1, t2)?;
    frame_from_invariants(p, ctx, t1.as_vector(), t2.as_vector(), &inv)
}

/// `sum_R f^R_p(t1, t2) f^R_q(t2, t1)`.
pub fn reconstruct(forward: &DMatrix<f64>, backward: &DMatrix<f64>) -> DMatrix<f64> {
    forward.transpose() * backward
}

/// Closed forms of the four frame contractions.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameContractions {
    /// `f^R_p t1^p`.
    pub on_t1: DVector<f64>,
    /// `f^R_p t2^p`.
    pub on_t2: DVector<f64>,
    /// `sum_R f^R_p t1^R`, a covector.
    pub by_t1: DVector<f64>,
    /// `sum_R f^R_p t2^R`, a covector.
    pub by_t2: DVector<f64>,
}

pub fn frame_contractions(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<FrameContractions> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let rad = radicals(p, &inv)?;
    let h = p.h();
    let c = inv.alpha(p).cos();
    // (root1 - root2) / (t1t2) without the removable singularity at (t1t2) = 0
    let gap = c * (h - 1.0 / h) / (rad.root1 + rad.root2);
    let f = ctx.frame();
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let (fx, fy) = (f * x, f * y);
    let (lx, ly) = (ctx.lower(x), ctx.lower(y));
    Ok(FrameContractions {
        on_t1: (&fy * (inv.dot11 * gap) + &fx * rad.root2) / rad.pre,
        on_t2: &fy * (rad.root1 / rad.pre),
        by_t1: &lx * (rad.root1 / rad.pre),
        by_t2: (&lx * (inv.dot22 * gap) + &ly * rad.root2) / rad.pre,
    })
}

fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// A frame built from the bisector and the in-plane normal of the pair, for which
/// `reconstruct(unrolled_frame(t1, t2), unrolled_frame(t2, t1))` returns the tensor exactly.
pub fn unrolled_frame(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<DMatrix<f64>> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let h = p.h();
    let theta = inv.euclidean_angle;
    let alpha = theta / h;
    let perp2 = alpha.sin() / (h * theta.sin());
    if !(perp2 >= 0.0) {
        return Err(GeometryError::NumericalDomain { quantity: "unrolled frame normal scale", value: perp2 });
    }
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let e1 = x / inv.norm1();
    let e2 = y / inv.norm2();
    let bis = &e1 + &e2;
    let bis = &bis / ctx.norm(&bis);
    let nor = &e2 - &e1;
    let nor = &nor / ctx.norm(&nor);
    let m = rotation(-0.5 * theta / h) * Matrix2::new(1.0, 0.0, 0.0, 1.0 / h) * rotation(0.5 * theta);
    let (bl, nl) = (ctx.lower(&bis), ctx.lower(&nor));
    let f = ctx.frame();
    let (fb, fn_) = (f * &bis, f * &nor);
    let dim = ctx.dim();
    let proj = DMatrix::identity(dim, dim) - &bis * bl.transpose() - &nor * nl.transpose();
    let plane = &fb * (bl.transpose() * m[(0, 0)] + nl.transpose() * m[(0, 1)])
        + &fn_ * (bl.transpose() * m[(1, 0)] + nl.transpose() * m[(1, 1)]);
    Ok(plane + f * proj * perp2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twovector::two_vector_metric;

    fn qv(x: &[f64]) -> QuasiVector {
        QuasiVector::from_slice(x).unwrap()
    }

    fn ctx() -> MetricContext {
        MetricContext::from_text("3\n1.1 0.2 0.0\n0.2 0.8 -0.1\n0.0 -0.1 1.3").unwrap()
    }

    #[test]
    fn contractions_match_closed_forms() {
        let ctx = ctx();
        for g in [-1.0, 0.5, 1.5] {
            let p = GParameter::new(g).unwrap();
            let (t1, t2) = (qv(&[0.4, -0.3, 0.8, 0.2]), qv(&[0.1, 0.6, 0.5, -0.4]));
            let f = frame(&p, &ctx, &t1, &t2).unwrap();
            let cl = frame_contractions(&p, &ctx, &t1, &t2).unwrap();
            let fr = ctx.frame();
            assert!((&f * t1.as_vector() - &cl.on_t1).abs().max() < 1e-12);
            assert!((&f * t2.as_vector() - &cl.on_t2).abs().max() < 1e-12);
            assert!((f.transpose() * (fr * t1.as_vector()) - &cl.by_t1).abs().max() < 1e-12);
            assert!((f.transpose() * (fr * t2.as_vector()) - &cl.by_t2).abs().max() < 1e-12);
        }
    }

    #[test]
    fn unrolled_frame_reconstructs() {
        let ctx = ctx();
        for g in [-1.5, 0.0, 0.5, 1.2] {
            let p = GParameter::new(g).unwrap();
            let (t1, t2) = (qv(&[0.4, -0.3, 0.8, 0.2]), qv(&[0.1, 0.6, 0.5, -0.4]));
            let n = two_vector_metric(&p, &ctx, &t1, &t2).unwrap().n_lower;
            let f12 = unrolled_frame(&p, &ctx, &t1, &t2).unwrap();
            let f21 = unrolled_frame(&p, &ctx, &t2, &t1).unwrap();
            assert!((reconstruct(&f12, &f21) - n).abs().max() < 1e-12);
        }
    }

    #[test]
    fn euclidean_frame_is_orthonormal() {
        let ctx = ctx();
        let p = GParameter::new(0.0).unwrap();
        let (t1, t2) = (qv(&[0.4, -0.3, 0.8, 0.2]), qv(&[0.1, 0.6, 0.5, -0.4]));
        let f = frame(&p, &ctx, &t1, &t2).unwrap();
        assert!((f.transpose() * &f - ctx.r_pq()).abs().max() < 1e-13);
    }
}
