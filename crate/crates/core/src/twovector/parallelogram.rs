use nalgebra::{DVector, Matrix2, Vector2};

use crate::error::{GeometryError, Result};
use crate::geodesics::pair_invariants;
use crate::quasimap::check_quasi;
use crate::space::{GParameter, MetricContext, QuasiVector};

fn check_acute(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<()> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let alpha = inv.alpha(p);
    if alpha >= std::f64::consts::FRAC_PI_2 {
        return Err(GeometryError::ObtuseInput { alpha });
    }
    Ok(())
}

/// The direction `c = m(t1, t2) t1 + m(t2, t1) t2` of the first-order sum correction.
pub fn sum_correction(ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<DVector<f64>> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let diag = x + y;
    let a1 = ctx.euclidean_angle(x, &diag);
    let a2 = ctx.euclidean_angle(y, &diag);
    let m12 = (inv.dot12 * a1 - inv.dot22 * a2) / inv.u;
    let m21 = (inv.dot12 * a2 - inv.dot11 * a1) / inv.u;
    Ok(x * m12 + y * m21)
}

/// `t1 (+) t2 ~ t1 + t2 + (1/h - 1) c(t1, t2)` for an acute pair.
pub fn oplus_first_order(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<QuasiVector> {
    check_acute(p, ctx, t1, t2)?;
    let k = 1.0 / p.h() - 1.0;
    let c = sum_correction(ctx, t1, t2)?;
    QuasiVector::from_vector(t1.as_vector() + t2.as_vector() + c * k)
}

/// The vector `s(t1, t3)` of the first-order difference.
pub fn difference_vector(ctx: &MetricContext, t1: &QuasiVector, t3: &QuasiVector) -> Result<DVector<f64>> {
    let inv = pair_invariants(ctx, t1, t3)?;
    let (x, z) = (t1.as_vector(), t3.as_vector());
    let v = z - x;
    let a13 = inv.euclidean_angle;
    let av3 = ctx.euclidean_angle(&v, z);
    let vx = ctx.dot(&v, x);
    let vv = ctx.dot(&v, &v);
    Ok((&v * (inv.dot11 * a13 - vx * av3) + x * (vv * av3 - vx * a13)) / inv.u)
}

/// Residuals of `(t3 - t1, s) = u(t1, t3) angle(t1, t3)`, `(t1, s) = u(t1, t3) angle(t3 - t1, t3)`
/// and `u(t3 - t1, t3) = u(t1, t3)`, each scaled by the size of its right side.
pub fn difference_vector_identities(ctx: &MetricContext, t1: &QuasiVector, t3: &QuasiVector) -> Result<[f64; 3]> {
    let inv = pair_invariants(ctx, t1, t3)?;
    let s = difference_vector(ctx, t1, t3)?;
    let (x, z) = (t1.as_vector(), t3.as_vector());
    let v = z - x;
    let av3 = ctx.euclidean_angle(&v, z);
    let scaled = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let (u_v3, _) = ctx.wedge_and_dot(&v, z);
    Ok([
        scaled(ctx.dot(&v, &s), inv.u * inv.euclidean_angle),
        scaled(ctx.dot(x, &s), inv.u * av3),
        scaled(u_v3, inv.u),
    ])
}

/// `t3 (-) t1 ~ t3 - t1 + (1/h - 1) s(t1, t3)`.
pub fn ominus_first_order(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t3: &QuasiVector) -> Result<QuasiVector> {
    check_quasi(ctx, t1)?;
    check_quasi(ctx, t3)?;
    let v = t3.as_vector() - t1.as_vector();
    if v.iter().all(|x| *x == 0.0) {
        return Err(GeometryError::ZeroVector);
    }
    let k = 1.0 / p.h() - 1.0;
    let s = difference_vector(ctx, t1, t3)?;
    QuasiVector::from_vector(v + s * k)
}

fn pair_angle(p: &GParameter, ctx: &MetricContext, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    ctx.euclidean_angle(x, y) / p.h()
}

/// Residuals of the equal-opposite-sides conditions in length-squared form:
/// `|t1|^2 + |t3|^2 - 2|t1||t3| cos(alpha13) - |t2|^2` and its mirror.
pub fn defining_residuals(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &QuasiVector,
    t2: &QuasiVector,
    t3: &QuasiVector,
) -> Result<(f64, f64)> {
    for t in [t1, t2, t3] {
        check_quasi(ctx, t)?;
    }
    let (x, y, z) = (t1.as_vector(), t2.as_vector(), t3.as_vector());
    let (d11, d22, d33) = (ctx.dot(x, x), ctx.dot(y, y), ctx.dot(z, z));
    let (n1, n2, n3) = (d11.sqrt(), d22.sqrt(), d33.sqrt());
    let r1 = d11 + d33 - 2.0 * n1 * n3 * pair_angle(p, ctx, x, z).cos() - d22;
    let r2 = d33 + d22 - 2.0 * n3 * n2 * pair_angle(p, ctx, y, z).cos() - d11;
    Ok((r1, r2))
}

/// Residuals of the same conditions divided through by `|t3|`.
pub fn convenient_residuals(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &QuasiVector,
    t2: &QuasiVector,
    t3: &QuasiVector,
) -> Result<(f64, f64)> {
    let (r1, r2) = defining_residuals(p, ctx, t1, t2, t3)?;
    let n3 = ctx.norm(t3.as_vector());
    Ok((r1 / n3, r2 / n3))
}

/// A sum vector solving the defining conditions to working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedSum {
    pub sum: QuasiVector,
    pub iterations: usize,
    /// `max(|r1|, |r2|) / max(1, |t1|^2, |t2|^2)` of the defining residuals.
    pub residual: f64,
}

const REFINE_TOL: f64 = 1e-10;
const REFINE_MAX_ITER: usize = 200;

/// Newton iteration for the sum vector in polar coordinates `(|t3|, angle from t1)` within
/// the plane of the pair, seeded by the first-order sum.
pub fn parallelogram_refine(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<RefinedSum> {
    let seed = oplus_first_order(p, ctx, t1, t2)?;
    let inv = pair_invariants(ctx, t1, t2)?;
    let h = p.h();
    let (n1, n2) = (inv.norm1(), inv.norm2());
    let e1 = t1.as_vector() / n1;
    let e2 = &inv.d1 / n1;
    let span = inv.euclidean_angle;
    let (d11, d22) = (inv.dot11, inv.dot22);
    let scale = d11.max(d22).max(1.0);

    let eval = |v: &Vector2<f64>| -> Vector2<f64> {
        let (rho, th) = (v[0], v[1]);
        Vector2::new(
            rho * rho - 2.0 * n1 * rho * (th / h).cos() + d11 - d22,
            rho * rho - 2.0 * n2 * rho * ((span - th) / h).cos() + d22 - d11,
        )
    };
    let jac = |v: &Vector2<f64>| -> Matrix2<f64> {
        let (rho, th) = (v[0], v[1]);
        let (c1, s1) = ((th / h).cos(), (th / h).sin());
        let (c2, s2) = (((span - th) / h).cos(), ((span - th) / h).sin());
        Matrix2::new(
            2.0 * rho - 2.0 * n1 * c1,
            2.0 * n1 * rho * s1 / h,
            2.0 * rho - 2.0 * n2 * c2,
            -2.0 * n2 * rho * s2 / h,
        )
    };

    let sv = seed.as_vector();
    let mut state = Vector2::new(ctx.norm(sv), ctx.dot(sv, &e2).atan2(ctx.dot(sv, &e1)));
    let mut f = eval(&state);
    let mut iterations = 0;
    while f.amax() / scale > 0.01 * REFINE_TOL {
        if iterations == REFINE_MAX_ITER {
            return Err(GeometryError::MaxIterations { iterations, residual: f.amax() / scale });
        }
        iterations += 1;
        let step = match jac(&state).lu().solve(&f) {
            Some(s) => s,
            None => return Err(GeometryError::MaxIterations { iterations, residual: f.amax() / scale }),
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = state - step * lambda;
            let ft = eval(&trial);
            if ft.amax() < f.amax() {
                state = trial;
                f = ft;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let (rho, th) = (state[0], state[1]);
    let sum = QuasiVector::from_vector((e1 * th.cos() + e2 * th.sin()) * rho)?;
    let (r1, r2) = defining_residuals(p, ctx, t1, t2, &sum)?;
    let residual = r1.abs().max(r2.abs()) / scale;
    if residual >= REFINE_TOL {
        return Err(GeometryError::MaxIterations { iterations, residual });
    }
    Ok(RefinedSum { sum, iterations, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(x: &[f64]) -> QuasiVector {
        QuasiVector::from_slice(x).unwrap()
    }

    fn ctx() -> MetricContext {
        MetricContext::from_text("2\n1.1 0.2\n0.2 0.8").unwrap()
    }

    fn from_k(k: f64) -> GParameter {
        let h = 1.0 / (1.0 + k);
        GParameter::new(2.0 * (1.0 - h * h).sqrt()).unwrap()
    }

    #[test]
    fn euclidean_sum_and_difference() {
        let ctx = ctx();
        let p = GParameter::new(0.0).unwrap();
        let (t1, t2) = (qv(&[1.0, 0.2, 0.1]), qv(&[0.3, 0.9, -0.2]));
        let sum = oplus_first_order(&p, &ctx, &t1, &t2).unwrap();
        assert_eq!(sum.as_vector(), &(t1.as_vector() + t2.as_vector()));
        let diff = ominus_first_order(&p, &ctx, &t1, &sum).unwrap();
        assert!((diff.as_vector() - t2.as_vector()).abs().max() < 1e-15);
        let refined = parallelogram_refine(&p, &ctx, &t1, &t2).unwrap();
        assert_eq!(refined.iterations, 0);
    }

    #[test]
    fn first_order_residuals_are_quadratic() {
        let ctx = ctx();
        let (t1, t2) = (qv(&[1.0, 0.2, 0.1]), qv(&[0.3, 0.9, -0.2]));
        let mut res = Vec::new();
        let mut comp = Vec::new();
        for k in [1e-1, 1e-2, 1e-3] {
            let p = from_k(k);
            let t3 = oplus_first_order(&p, &ctx, &t1, &t2).unwrap();
            let (a, b) = convenient_residuals(&p, &ctx, &t1, &t2, &t3).unwrap();
            res.push(a.abs().max(b.abs()));
            let back = ominus_first_order(&p, &ctx, &t1, &t3).unwrap();
            comp.push((back.as_vector() - t2.as_vector()).abs().max());
        }
        for series in [&res, &comp] {
            let slope = (series[0].log10() - series[2].log10()) / 2.0;
            assert!((1.8..=2.2).contains(&slope), "slope {slope}");
        }
        let sym = oplus_first_order(&from_k(0.1), &ctx, &t2, &t1).unwrap();
        let fwd = oplus_first_order(&from_k(0.1), &ctx, &t1, &t2).unwrap();
        assert!((sym.as_vector() - fwd.as_vector()).abs().max() < 1e-15);
    }

    #[test]
    fn difference_identities_hold() {
        let ctx = ctx();
        let (t1, t3) = (qv(&[1.0, 0.2, 0.1]), qv(&[1.3, 1.1, -0.1]));
        for r in difference_vector_identities(&ctx, &t1, &t3).unwrap() {
            assert!(r < 1e-13);
        }
    }

    #[test]
    fn refine_converges() {
        let ctx = ctx();
        let (t1, t2) = (qv(&[1.0, 0.2, 0.1]), qv(&[0.3, 0.9, -0.2]));
        for g in [0.2, 0.8, -1.0] {
            let p = GParameter::new(g).unwrap();
            let refined = parallelogram_refine(&p, &ctx, &t1, &t2).unwrap();
            assert!(refined.residual < 1e-10);
            assert!(refined.iterations <= 50);
        }
        let obtuse = parallelogram_refine(&GParameter::new(0.2).unwrap(), &ctx, &t1, &qv(&[-1.0, 0.3, 0.0]));
        assert!(matches!(obtuse, Err(GeometryError::ObtuseInput { .. })));
    }
}
