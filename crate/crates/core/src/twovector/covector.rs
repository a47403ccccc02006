use nalgebra::DVector;

use crate::error::{GeometryError, Result};
use crate::geodesics::{pair_invariants, COLLINEAR_RATIO};
use crate::space::{GParameter, MetricContext, QuasiVector};

/// Co-metric products of a covector pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoProducts {
    pub t11: f64,
    pub t22: f64,
    pub t12: f64,
    /// `sqrt((T1T1)(T2T2) - (T1T2)^2)`; the closed form may carry a sign.
    pub wedge: f64,
}

/// Covectors `T1 = n(t1, t2) t2`, `T2 = t1 n(t1, t2)` with their duals `D1`, `D2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorPair {
    pub co1: DVector<f64>,
    pub co2: DVector<f64>,
    pub dual1: DVector<f64>,
    pub dual2: DVector<f64>,
    /// `-wedge(T) / u(t)`.
    pub f_scale: f64,
    pub products: CoProducts,
}

fn co_products(ctx: &MetricContext, a: &DVector<f64>, b: &DVector<f64>) -> CoProducts {
    let (x, y) = (ctx.raise(a), ctx.raise(b));
    let (wedge, t12) = ctx.wedge_and_dot(&x, &y);
    CoProducts { t11: ctx.co_dot(a, a), t22: ctx.co_dot(b, b), t12, wedge }
}

fn duals(a: &DVector<f64>, b: &DVector<f64>, pr: &CoProducts) -> (DVector<f64>, DVector<f64>) {
    ((b * pr.t11 - a * pr.t12) / pr.wedge, (a * pr.t22 - b * pr.t12) / pr.wedge)
}

pub fn covector_pair(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<CovectorPair> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let h = p.h();
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let (n1, n2) = (inv.norm1(), inv.norm2());
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let co1 = ctx.lower(&((x * c + &inv.d1 * (s / h)) * (n2 / n1)));
    let co2 = ctx.lower(&((y * c + &inv.d2 * (s / h)) * (n1 / n2)));
    let products = co_products(ctx, &co1, &co2);
    if products.wedge <= COLLINEAR_RATIO * (products.t11 * products.t22).sqrt() {
        return Err(GeometryError::Collinear { u: products.wedge });
    }
    let (dual1, dual2) = duals(&co1, &co2, &products);
    Ok(CovectorPair { co1, co2, dual1, dual2, f_scale: -products.wedge / inv.u, products })
}

/// `(n t2, t1 n)` contracted from the two-vector tensor.
pub fn covectors_by_contraction(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &QuasiVector,
    t2: &QuasiVector,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = super::two_vector_metric(p, ctx, t1, t2)?.n_lower;
    Ok((&n * t2.as_vector(), n.transpose() * t1.as_vector()))
}

/// Products of `T1`, `T2` written through the vector pair; `wedge` keeps its sign.
pub fn products_closed_form(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<CoProducts> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let h = p.h();
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let plus = c * c + s * s / (h * h);
    let minus = c * c - s * s / (h * h);
    Ok(CoProducts {
        t11: inv.dot22 * plus,
        t22: inv.dot11 * plus,
        t12: minus * inv.dot12 + 2.0 / h * inv.u * c * s,
        wedge: 2.0 / h * inv.dot12 * s * c - minus * inv.u,
    })
}

/// Residuals of the three relations expressing the vector-side pair `((t1t2), u)` through
/// the covector-side pair, with `alpha` the angle of the vectors.
pub fn product_relations(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<[f64; 3]> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let cp = covector_pair(p, ctx, t1, t2)?;
    let pr = cp.products;
    let h = p.h();
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let plus = c * c + s * s / (h * h);
    let minus = c * c - s * s / (h * h);
    let r1 = plus * plus * inv.u - (2.0 / h * pr.t12 * s * c - minus * pr.wedge);
    let r2 = plus * plus * inv.dot12 - (minus * pr.t12 + 2.0 / h * s * c * pr.wedge);
    let r3 = plus * (-inv.dot12 * s / h + inv.u * c) - (pr.t12 * s / h - pr.wedge * c);
    Ok([r1, r2, r3])
}

/// `<T1, T2> = |T1| |T2| cos(alpha)`.
pub fn co_scalar_product(ctx: &MetricContext, co1: &DVector<f64>, co2: &DVector<f64>, alpha: f64) -> f64 {
    (ctx.co_dot(co1, co1) * ctx.co_dot(co2, co2)).sqrt() * alpha.cos()
}

/// Recovers `(t1, t2)` from `T1`, `T2` and the vector angle `alpha`.
pub fn invert_covectors(
    p: &GParameter,
    ctx: &MetricContext,
    co1: &DVector<f64>,
    co2: &DVector<f64>,
    alpha: f64,
) -> Result<(QuasiVector, QuasiVector)> {
    ctx.check_dim(co1.len())?;
    ctx.check_dim(co2.len())?;
    if co1.iter().chain(co2.iter()).any(|x| !x.is_finite()) || !alpha.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    let pr = co_products(ctx, co1, co2);
    if pr.t11 == 0.0 || pr.t22 == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    if pr.wedge <= COLLINEAR_RATIO * (pr.t11 * pr.t22).sqrt() {
        return Err(GeometryError::Collinear { u: pr.wedge });
    }
    let h = p.h();
    let (c, s) = (alpha.cos(), alpha.sin());
    let plus = c * c + s * s / (h * h);
    let (d1, d2) = duals(co1, co2, &pr);
    let ratio = (pr.t22 / pr.t11).sqrt();
    let t1 = ctx.raise(&((co1 * c + d1 * (s / h)) * (ratio / plus)));
    let t2 = ctx.raise(&((co2 * c + d2 * (s / h)) * (1.0 / (ratio * plus))));
    Ok((QuasiVector::from_vector(t1)?, QuasiVector::from_vector(t2)?))
}

/// Euclidean angle between `T1` and `T2` as a function of the vector angle `alpha`,
/// on its principal branch `2 psi - h alpha` with `psi = atan2(sin(alpha)/h, cos(alpha))` unwrapped.
pub fn co_angle_map(p: &GParameter, alpha: f64) -> f64 {
    let h = p.h();
    let raw = (alpha.sin() / h).atan2(alpha.cos());
    let tau = std::f64::consts::TAU;
    let psi = raw + tau * ((alpha - raw) / tau).round();
    2.0 * psi - h * alpha
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoAngle {
    pub alpha: f64,
    /// Residual of the implicit equation for `cos(h alpha)`.
    pub residual: f64,
    pub iterations: usize,
}

fn implicit_residual(p: &GParameter, pr: &CoProducts, alpha: f64) -> f64 {
    let h = p.h();
    let (c, s) = (alpha.cos(), alpha.sin());
    let plus = c * c + s * s / (h * h);
    let minus = c * c - s * s / (h * h);
    let rhs = (minus * pr.t12 + 2.0 / h * s * c * pr.wedge) / (plus * (pr.t11 * pr.t22).sqrt());
    (h * alpha).cos() - rhs
}

/// Solves for the vector angle `alpha` given `T1`, `T2`, taking the smallest root.
pub fn solve_co_angle(p: &GParameter, ctx: &MetricContext, co1: &DVector<f64>, co2: &DVector<f64>) -> Result<CoAngle> {
    ctx.check_dim(co1.len())?;
    ctx.check_dim(co2.len())?;
    let pr = co_products(ctx, co1, co2);
    if pr.t11 == 0.0 || pr.t22 == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    if pr.wedge <= COLLINEAR_RATIO * (pr.t11 * pr.t22).sqrt() {
        return Err(GeometryError::Collinear { u: pr.wedge });
    }
    let h = p.h();
    let target = pr.wedge.atan2(pr.t12);
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI / h);
    if co_angle_map(p, hi) < target {
        return Err(GeometryError::NoRoot);
    }
    let mut alpha = target;
    let mut iterations = 0;
    while iterations < 200 {
        iterations += 1;
        let f = co_angle_map(p, alpha) - target;
        if f.abs() <= 4.0 * f64::EPSILON * target.max(1.0) {
            break;
        }
        if f > 0.0 {
            hi = alpha;
        } else {
            lo = alpha;
        }
        let c = alpha.cos();
        let s = alpha.sin();
        let slope = 2.0 / (h * (c * c + s * s / (h * h))) - h;
        let next = alpha - f / slope;
        alpha = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(CoAngle { alpha, residual: implicit_residual(p, &pr, alpha), iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::angle;
    use crate::numdiff;

    fn qv(x: &[f64]) -> QuasiVector {
        QuasiVector::from_slice(x).unwrap()
    }

    fn ctx() -> MetricContext {
        MetricContext::from_text("3\n1.1 0.2 0.0\n0.2 0.8 -0.1\n0.0 -0.1 1.3").unwrap()
    }

    fn pair() -> (QuasiVector, QuasiVector) {
        (qv(&[0.4, -0.3, 0.8, 0.2]), qv(&[0.1, 0.6, 0.5, -0.4]))
    }

    #[test]
    fn closed_forms_match_contraction() {
        let ctx = ctx();
        let (t1, t2) = pair();
        for g in [-1.5, 0.0, 0.7, 1.5] {
            let p = GParameter::new(g).unwrap();
            let cp = covector_pair(&p, &ctx, &t1, &t2).unwrap();
            let (a, b) = covectors_by_contraction(&p, &ctx, &t1, &t2).unwrap();
            assert!((&cp.co1 - a).abs().max() < 1e-13);
            assert!((&cp.co2 - b).abs().max() < 1e-13);
            let sp = crate::geodesics::scalar_product(&p, &ctx, &t1, &t2).unwrap();
            assert!((t1.as_vector().dot(&cp.co1) + t2.as_vector().dot(&cp.co2) - 2.0 * sp).abs() < 1e-13);
            let closed = products_closed_form(&p, &ctx, &t1, &t2).unwrap();
            assert!((closed.t11 - cp.products.t11).abs() < 1e-13);
            assert!((closed.t22 - cp.products.t22).abs() < 1e-13);
            assert!((closed.t12 - cp.products.t12).abs() < 1e-13);
            assert!((closed.wedge - cp.products.wedge).abs() < 1e-12);
            for r in product_relations(&p, &ctx, &t1, &t2).unwrap() {
                assert!(r.abs() < 1e-12);
            }
            let inv = pair_invariants(&ctx, &t1, &t2).unwrap();
            let alpha = inv.alpha(&p);
            let (c, s, h) = (alpha.cos(), alpha.sin(), p.h());
            let f = c * c - s * s / (h * h) - 2.0 / h * s * c * inv.dot12 / inv.u;
            assert!((f - cp.f_scale).abs() < 1e-12);
        }
    }

    #[test]
    fn euclidean_covectors_swap() {
        let ctx = ctx();
        let (t1, t2) = pair();
        let p = GParameter::new(0.0).unwrap();
        let cp = covector_pair(&p, &ctx, &t1, &t2).unwrap();
        assert!((&cp.co1 - ctx.lower(t2.as_vector())).abs().max() < 1e-14);
        assert!((&cp.co2 - ctx.lower(t1.as_vector())).abs().max() < 1e-14);
    }

    #[test]
    fn metric_recovered_from_covector_derivatives() {
        let ctx = ctx();
        let (t1, t2) = pair();
        let p = GParameter::new(1.2).unwrap();
        let n = super::super::two_vector_metric(&p, &ctx, &t1, &t2).unwrap().n_lower;
        let j1 = numdiff::jacobian(
            |x| covector_pair(&p, &ctx, &t1, &QuasiVector::raw(x.clone())).map(|c| c.co1),
            t2.as_vector(),
        )
        .unwrap();
        let j2 = numdiff::jacobian(
            |x| covector_pair(&p, &ctx, &QuasiVector::raw(x.clone()), &t2).map(|c| c.co2),
            t1.as_vector(),
        )
        .unwrap();
        assert!((&j1 - &n).abs().max() < 1e-8);
        assert!((j2.transpose() - &n).abs().max() < 1e-8);
    }

    #[test]
    fn duals_and_inversion() {
        let ctx = ctx();
        let (t1, t2) = pair();
        for g in [-1.5, 0.3, 1.5] {
            let p = GParameter::new(g).unwrap();
            let cp = covector_pair(&p, &ctx, &t1, &t2).unwrap();
            let pr = cp.products;
            assert!(ctx.co_dot(&cp.co1, &cp.dual1).abs() < 1e-13);
            assert!(ctx.co_dot(&cp.co2, &cp.dual2).abs() < 1e-13);
            assert!((ctx.co_dot(&cp.dual1, &cp.dual2) + pr.t12).abs() < 1e-13);
            assert!((ctx.co_dot(&cp.dual1, &cp.co2) - pr.wedge).abs() < 1e-13);
            assert!((ctx.co_dot(&cp.co1, &cp.dual2) - pr.wedge).abs() < 1e-13);
            let alpha = angle(&p, &ctx, &t1, &t2).unwrap();
            let (b1, b2) = invert_covectors(&p, &ctx, &cp.co1, &cp.co2, alpha).unwrap();
            assert!((b1.as_vector() - t1.as_vector()).abs().max() < 1e-12);
            assert!((b2.as_vector() - t2.as_vector()).abs().max() < 1e-12);
            let solved = solve_co_angle(&p, &ctx, &cp.co1, &cp.co2).unwrap();
            assert!((solved.alpha - alpha).abs() < 1e-12);
            assert!(solved.residual.abs() < 1e-12);
        }
    }
}
