//! Angle, scalar product and two-point length of the quasi-euclidean space, and its
//! closed-form geodesics.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::quasimap::check_quasi;
use crate::space::{GParameter, MetricContext, QuasiVector};

/// Euclidean invariants of a pair together with the auxiliary vectors `d1`, `d2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInvariants {
    pub dot11: f64,
    pub dot22: f64,
    pub dot12: f64,
    /// `sqrt(dot11 dot22 - dot12^2)`.
    pub u: f64,
    /// `(dot11 t2 - dot12 t1) / u`.
    pub d1: DVector<f64>,
    /// `(dot22 t1 - dot12 t2) / u`.
    pub d2: DVector<f64>,
    /// Euclidean angle between the vectors, in `[0, pi]`.
    pub euclidean_angle: f64,
}

impl PairInvariants {
    pub fn norm1(&self) -> f64 {
        self.dot11.sqrt()
    }

    pub fn norm2(&self) -> f64 {
        self.dot22.sqrt()
    }

    /// The angle `alpha = euclidean_angle / h`.
    pub fn alpha(&self, p: &GParameter) -> f64 {
        self.euclidean_angle / p.h()
    }
}

/// Relative size of `u` below which a pair counts as collinear.
pub const COLLINEAR_RATIO: f64 = 1e-14;

pub fn pair_invariants(ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<PairInvariants> {
    check_quasi(ctx, t1)?;
    check_quasi(ctx, t2)?;
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let dot11 = ctx.dot(x, x);
    let dot22 = ctx.dot(y, y);
    let (u, dot12) = ctx.wedge_and_dot(x, y);
    if u <= COLLINEAR_RATIO * (dot11 * dot22).sqrt() {
        return Err(GeometryError::Collinear { u });
    }
    Ok(PairInvariants {
        dot11,
        dot22,
        dot12,
        u,
        d1: (y * dot11 - x * dot12) / u,
        d2: (x * dot22 - y * dot12) / u,
        euclidean_angle: u.atan2(dot12),
    })
}

/// The angle `alpha = (1/h) * euclidean angle`, in `[0, pi/h]`.
pub fn angle(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<f64> {
    check_quasi(ctx, t1)?;
    check_quasi(ctx, t2)?;
    Ok(ctx.euclidean_angle(t1.as_vector(), t2.as_vector()) / p.h())
}

/// `<t1, t2> = |t1| |t2| cos(alpha)`.
pub fn scalar_product(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<f64> {
    let alpha = angle(p, ctx, t1, t2)?;
    Ok(ctx.norm(t1.as_vector()) * ctx.norm(t2.as_vector()) * alpha.cos())
}

/// `|t2 (-) t1|^2 = (t1t1) + (t2t2) - 2|t1||t2| cos(alpha)`, evaluated without cancellation.
pub fn distance_squared(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<f64> {
    let alpha = angle(p, ctx, t1, t2)?;
    let a = ctx.norm(t1.as_vector());
    let s = ctx.norm(t2.as_vector());
    let half = (0.5 * alpha).sin();
    Ok((a - s).powi(2) + 4.0 * a * s * half * half)
}

/// A solved geodesic segment from `t1` to `t2` with radius law `S^2(s) = a^2 + 2bs + s^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicChord {
    #[serde(skip)]
    pub t1: DVector<f64>,
    #[serde(skip)]
    pub t2: DVector<f64>,
    pub a: f64,
    pub s_end: f64,
    pub alpha: f64,
    pub delta_s: f64,
    pub b: f64,
    /// `sqrt(a^2 - b^2) = a S_end sin(alpha) / delta_s`.
    #[serde(skip)]
    pub rho: f64,
    #[serde(skip)]
    h: f64,
    #[serde(skip)]
    radial: bool,
}

/// A sampled chord point; `within_segment` is false for extrapolated parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordPoint {
    pub t: QuasiVector,
    pub within_segment: bool,
}

pub fn solve_chord(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<GeodesicChord> {
    check_quasi(ctx, t1)?;
    check_quasi(ctx, t2)?;
    if t1 == t2 {
        return Err(GeometryError::DegenerateChord);
    }
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let a = ctx.norm(x);
    let s_end = ctx.norm(y);
    let (u, _) = ctx.wedge_and_dot(x, y);
    let radial = u <= COLLINEAR_RATIO * a * s_end;
    let alpha = if radial { 0.0 } else { angle(p, ctx, t1, t2)? };
    if radial && ctx.dot(x, y) < 0.0 {
        return Err(GeometryError::ReflexAngle { alpha: std::f64::consts::PI / p.h() });
    }
    if alpha >= std::f64::consts::PI - 1e-12 {
        return Err(GeometryError::ReflexAngle { alpha });
    }
    let delta_s = distance_squared(p, ctx, t1, t2)?.sqrt();
    if delta_s == 0.0 {
        return Err(GeometryError::DegenerateChord);
    }
    let (b, rho) = if radial {
        (if s_end > a { a } else { -a }, 0.0)
    } else {
        ((a * s_end * alpha.cos() - a * a) / delta_s, a * s_end * alpha.sin() / delta_s)
    };
    Ok(GeodesicChord { t1: x.clone(), t2: y.clone(), a, s_end, alpha, delta_s, b, rho, h: p.h(), radial })
}

impl GeodesicChord {
    pub fn radius_squared(&self, s: f64) -> f64 {
        self.a * self.a + 2.0 * self.b * s + s * s
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    /// Angle swept from `t1`, times `h`: `atan2(rho s, a^2 + b s)`.
    fn swept(&self, s: f64) -> f64 {
        (self.rho * s).atan2(self.a * self.a + self.b * s)
    }

    /// Angle remaining to `t2`: `atan2(rho (ds - s), a^2 + b ds + (b + ds) s)`.
    fn remaining(&self, s: f64) -> f64 {
        let ds = self.delta_s;
        (self.rho * (ds - s)).atan2(self.a * self.a + self.b * ds + (self.b + ds) * s)
    }

    fn within(&self, s: f64) -> bool {
        (0.0..=self.delta_s).contains(&s)
    }

    pub fn point(&self, s: f64) -> ChordPoint {
        let radius = self.radius_squared(s).max(0.0).sqrt();
        let t = if self.radial {
            &self.t1 * (radius / self.a)
        } else {
            let h = self.h;
            let denom = (h * self.alpha).sin();
            &self.t1 * (radius / self.a * (h * self.remaining(s)).sin() / denom)
                + &self.t2 * (radius / self.s_end * (h * self.swept(s)).sin() / denom)
        };
        ChordPoint { t: QuasiVector::raw(t), within_segment: self.within(s) }
    }

    pub fn velocity(&self, s: f64) -> DVector<f64> {
        let r2 = self.radius_squared(s);
        let radius = r2.max(0.0).sqrt();
        if self.radial {
            return &self.t1 * ((self.b + s) / (radius * self.a));
        }
        let h = self.h;
        let denom = (h * self.alpha).sin();
        let t = self.point(s).t.into_vector();
        t * ((self.b + s) / r2)
            - &self.t1 * (self.rho * h / (self.a * radius) * (h * self.remaining(s)).cos() / denom)
            + &self.t2 * (self.rho * h / (radius * self.s_end) * (h * self.swept(s)).cos() / denom)
    }
}

pub fn geodesic_point(chord: &GeodesicChord, s: f64) -> ChordPoint {
    chord.point(s)
}

pub fn geodesic_velocity(chord: &GeodesicChord, s: f64) -> DVector<f64> {
    chord.velocity(s)
}

/// Covector gradients `b1 = (1/2) d|t2 (-) t1|^2 / dt1` and `b2` likewise for `t2`.
pub fn length_gradients(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &QuasiVector,
    t2: &QuasiVector,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let (n1, n2) = (inv.norm1(), inv.norm2());
    let h = p.h();
    let (x, y) = (t1.as_vector(), t2.as_vector());
    let b1 = x * (1.0 - n2 / n1 * c) - &inv.d1 * (n2 / (h * n1) * s);
    let b2 = y * (1.0 - n1 / n2 * c) - &inv.d2 * (n1 / (h * n2) * s);
    Ok((ctx.lower(&b1), ctx.lower(&b2)))
}

/// Closed forms of `(b1 b1)`, `(b2 b2)`, `(b1 b2)`.
pub fn length_gradient_products(
    p: &GParameter,
    ctx: &MetricContext,
    t1: &QuasiVector,
    t2: &QuasiVector,
) -> Result<(f64, f64, f64)> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let alpha = inv.alpha(p);
    let (c, s) = (alpha.cos(), alpha.sin());
    let (n1, n2) = (inv.norm1(), inv.norm2());
    let h = p.h();
    let extra = 1.0 / (h * h) - 1.0;
    let base = inv.dot11 + inv.dot22 - 2.0 * n1 * n2 * c;
    let ratio = n1 / n2 + n2 / n1 - 2.0 * c;
    let b11 = base + extra * inv.dot22 * s * s;
    let b22 = base + extra * inv.dot11 * s * s;
    let b12 = -(ratio * c + extra * s * s) * inv.dot12 - ratio * inv.u * s / h;
    Ok((b11, b22, b12))
}

/// The ratio `dot11 dot22 sin(alpha) / (h |t1| |t2| u)`, which tends to `1/h^2` at coincidence.
pub fn coincidence_ratio(p: &GParameter, ctx: &MetricContext, t1: &QuasiVector, t2: &QuasiVector) -> Result<f64> {
    let inv = pair_invariants(ctx, t1, t2)?;
    let alpha = inv.alpha(p);
    Ok(inv.dot11 * inv.dot22 * alpha.sin() / (p.h() * inv.norm1() * inv.norm2() * inv.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn qv(x: &[f64]) -> QuasiVector {
        QuasiVector::from_slice(x).unwrap()
    }

    #[test]
    fn worked_examples() {
        let ctx = MetricContext::identity(2).unwrap();
        let p0 = GParameter::new(0.0).unwrap();
        let chord = solve_chord(&p0, &ctx, &qv(&[1.0, 0.0]), &qv(&[0.0, 1.0])).unwrap();
        assert!((chord.alpha - PI / 2.0).abs() < 1e-15);
        assert!((chord.delta_s - 2f64.sqrt()).abs() < 1e-15);
        assert!((chord.b + 1.0 / 2f64.sqrt()).abs() < 1e-15);

        let ctx3 = MetricContext::identity(3).unwrap();
        let p1 = GParameter::new(1.0).unwrap();
        let (ex, ez) = (qv(&[1.0, 0.0, 0.0]), qv(&[0.0, 0.0, 1.0]));
        let alpha = angle(&p1, &ctx3, &ex, &ez).unwrap();
        assert!((alpha - PI / 3f64.sqrt()).abs() < 1e-15);
        let sp = scalar_product(&p1, &ctx3, &ex, &ez).unwrap();
        assert!((sp - (PI / 3f64.sqrt()).cos()).abs() < 1e-15);
        assert!((sp + 0.240_618_514_519_408_7).abs() < 1e-15);
    }

    #[test]
    fn radial_chord() {
        let ctx = MetricContext::identity(3).unwrap();
        let p = GParameter::new(0.7).unwrap();
        let t1 = qv(&[0.2, -0.4, 0.5]);
        let chord = solve_chord(&p, &ctx, &t1, &t1.scaled(2.5)).unwrap();
        assert!(chord.is_radial());
        assert_eq!(chord.b, chord.a);
        assert!((chord.delta_s - 1.5 * chord.a).abs() < 1e-14);
        let end = chord.point(chord.delta_s).t;
        assert!((end.as_vector() - t1.scaled(2.5).as_vector()).abs().max() < 1e-14);
        let inward = solve_chord(&p, &ctx, &t1, &t1.scaled(0.5)).unwrap();
        assert_eq!(inward.b, -inward.a);
    }

    #[test]
    fn endpoints_and_errors() {
        let ctx = MetricContext::identity(3).unwrap();
        let p = GParameter::new(-1.1).unwrap();
        let (t1, t2) = (qv(&[0.9, 0.1, -0.3]), qv(&[-0.2, 0.7, 0.4]));
        let chord = solve_chord(&p, &ctx, &t1, &t2).unwrap();
        assert!((chord.point(0.0).t.as_vector() - t1.as_vector()).abs().max() < 1e-14);
        assert!((chord.point(chord.delta_s).t.as_vector() - t2.as_vector()).abs().max() < 1e-14);
        assert!(!chord.point(-0.1).within_segment);
        assert_eq!(solve_chord(&p, &ctx, &t1, &t1), Err(GeometryError::DegenerateChord));
        let far = solve_chord(&p, &ctx, &qv(&[1.0, 0.0, 0.0]), &qv(&[-1.0, 0.05, 0.0]));
        assert!(matches!(far, Err(GeometryError::ReflexAngle { .. })));
    }
}
