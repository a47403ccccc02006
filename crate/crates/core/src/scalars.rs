//! Scalar building blocks: `q`, `B`, `Q`, `E`, `A`, `L`, `Phi`, `J`, `K` and the generating function `V`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::space::{FinslerVector, GParameter, MetricContext};

/// Every scalar attached to a vector `R`. `Q` and `E` live in the `w = q/Z` chart and are
/// absent when `Z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarBundle {
    pub q: f64,
    pub z: f64,
    pub b: f64,
    pub q_w: Option<f64>,
    pub e_w: Option<f64>,
    pub a: f64,
    pub l: f64,
    pub phi: f64,
    pub j: f64,
    pub k: f64,
}

impl ScalarBundle {
    /// Builds the bundle from `q >= 0` and `Z`; the pair must not be `(0, 0)`.
    pub fn from_qz(p: &GParameter, q: f64, z: f64) -> Self {
        let g = p.g();
        let b = z * z + g * q * z + q * q;
        let a = z + 0.5 * g * q;
        let l = q + 0.5 * g * z;
        let phi = phi_angle(p, q, z);
        let j = (0.5 * p.big_g() * phi).exp();
        let (q_w, e_w) = if z != 0.0 {
            let w = q / z;
            (Some(quadratic_q(p, w)), Some(e_w(p, w)))
        } else {
            (None, None)
        };
        Self { q, z, b, q_w, e_w, a, l, phi, j, k: b.sqrt() * j }
    }

    /// `w = q/Z`, when `Z != 0`.
    pub fn w(&self) -> Option<f64> {
        (self.z != 0.0).then(|| self.q / self.z)
    }

    /// `V = K/|Z|`, when `Z != 0`.
    pub fn v(&self) -> Option<f64> {
        (self.z != 0.0).then(|| self.k / self.z.abs())
    }
}

/// `q = sqrt(r_ab R^a R^b)`.
pub fn q_norm(ctx: &MetricContext, r: &FinslerVector) -> f64 {
    ctx.bold_dot(r.as_vector(), r.as_vector()).max(0.0).sqrt()
}

pub(crate) fn check_vector(ctx: &MetricContext, r: &FinslerVector) -> Result<()> {
    ctx.check_dim(r.dim())?;
    if r.is_zero() {
        return Err(GeometryError::ZeroVector);
    }
    Ok(())
}

pub fn scalar_bundle(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<ScalarBundle> {
    check_vector(ctx, r)?;
    Ok(ScalarBundle::from_qz(p, q_norm(ctx, r), r.z()))
}

/// The metric function `K(g;R)`.
pub fn metric_function(p: &GParameter, ctx: &MetricContext, r: &FinslerVector) -> Result<f64> {
    Ok(scalar_bundle(p, ctx, r)?.k)
}

/// `Phi = atan2(A, hq)`, valid for every `(q, Z) != 0` and ranging over `[-pi/2, pi/2]`.
pub fn phi_angle(p: &GParameter, q: f64, z: f64) -> f64 {
    (z + 0.5 * p.g() * q).atan2(p.h() * q)
}

fn sign_indicator(z: f64) -> f64 {
    if z < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `Phi = eps*pi/2 + arctan(G/2) - arctan(q/(hZ) + G/2)`; undefined at `Z = 0`.
pub fn phi_shifted_branch(p: &GParameter, q: f64, z: f64) -> Option<f64> {
    if z == 0.0 {
        return None;
    }
    let half_g = 0.5 * p.big_g();
    Some(sign_indicator(z) * FRAC_PI_2 + half_g.atan() - (q / (p.h() * z) + half_g).atan())
}

/// `Phi = eps*pi/2 + arctan(G/2) - arctan(L/(hZ))`; undefined at `Z = 0`.
pub fn phi_l_branch(p: &GParameter, q: f64, z: f64) -> Option<f64> {
    if z == 0.0 {
        return None;
    }
    let l = q + 0.5 * p.g() * z;
    Some(sign_indicator(z) * FRAC_PI_2 + (0.5 * p.big_g()).atan() - (l / (p.h() * z)).atan())
}

/// `Phi = eps*pi/2 - arctan(hq/A)` with `eps` the sign of `Z` (`+1` at `Z = 0`).
/// Only meaningful where `A` has the sign of `eps`; `None` elsewhere.
pub fn phi_cot_branch(p: &GParameter, q: f64, z: f64) -> Option<f64> {
    let a = z + 0.5 * p.g() * q;
    let eps = sign_indicator(z);
    if a == 0.0 || a.signum() != eps {
        return None;
    }
    Some(eps * FRAC_PI_2 - (p.h() * q / a).atan())
}

/// `Q(w) = 1 + gw + w^2`.
pub fn quadratic_q(p: &GParameter, w: f64) -> f64 {
    1.0 + p.g() * w + w * w
}

/// `E(w) = 1 + gw/2`.
pub fn e_w(p: &GParameter, w: f64) -> f64 {
    1.0 + 0.5 * p.g() * w
}

/// `Phi` in the `w` chart; negative `w` stands for `Z < 0`, and `w = 0` takes `Z > 0`.
pub fn phi_w(p: &GParameter, w: f64) -> f64 {
    let s = sign_indicator(w);
    phi_angle(p, w.abs(), s)
}

/// `j(w) = exp(G Phi(w)/2)`.
pub fn j_w(p: &GParameter, w: f64) -> f64 {
    (0.5 * p.big_g() * phi_w(p, w)).exp()
}

/// Generating metric function `V(w) = sqrt(Q(w)) j(w)`, so that `K = |Z| V(q/Z)`.
pub fn generating_v(p: &GParameter, w: f64) -> f64 {
    quadratic_q(p, w).sqrt() * j_w(p, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fv(x: &[f64]) -> FinslerVector {
        FinslerVector::from_slice(x).unwrap()
    }

    #[test]
    fn q_examples() {
        let id = MetricContext::identity(3).unwrap();
        assert_eq!(q_norm(&id, &fv(&[3.0, 4.0, -7.0])), 5.0);
        assert_eq!(q_norm(&id, &fv(&[0.0, 0.0, 2.0])), 0.0);
        let d = MetricContext::diagonal(&[2.0, 1.0]).unwrap();
        assert!((q_norm(&d, &fv(&[1.0, 1.0, 0.0])) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn axis_values() {
        let id = MetricContext::identity(3).unwrap();
        for g in [-1.5, 0.3, 1.0] {
            let p = GParameter::new(g).unwrap();
            assert_eq!(scalar_bundle(&p, &id, &fv(&[0.0, 0.0, 2.0])).unwrap().phi, FRAC_PI_2);
            assert_eq!(scalar_bundle(&p, &id, &fv(&[0.0, 0.0, -2.0])).unwrap().phi, -FRAC_PI_2);
            let s = scalar_bundle(&p, &id, &fv(&[0.3, -0.4, 0.0])).unwrap();
            assert!((s.phi - (0.5 * p.big_g()).atan()).abs() < 1e-15);
        }
        let p = GParameter::new(1.0).unwrap();
        let k = metric_function(&p, &id, &fv(&[0.0, 0.0, 1.0])).unwrap();
        assert!((k - (p.big_g() * PI / 4.0).exp()).abs() < 1e-14);
        assert!(scalar_bundle(&p, &id, &fv(&[0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn euclidean_case() {
        let ctx = MetricContext::diagonal(&[2.0, 0.5]).unwrap();
        let p = GParameter::new(0.0).unwrap();
        let r = fv(&[0.3, -1.2, 0.7]);
        let k = metric_function(&p, &ctx, &r).unwrap();
        assert!((k - ctx.norm(r.as_vector())).abs() < 1e-15);
    }

    #[test]
    fn branch_families_agree() {
        for g in [-1.5, -0.5, 0.5, 1.5] {
            let p = GParameter::new(g).unwrap();
            for &(q, z) in &[(0.3, 0.9), (1.0, -0.2), (0.7, 0.01), (2.0, -1.5), (0.5, -0.1)] {
                let phi = phi_angle(&p, q, z);
                assert!((phi_shifted_branch(&p, q, z).unwrap() - phi).abs() < 1e-12);
                assert!((phi_l_branch(&p, q, z).unwrap() - phi).abs() < 1e-12);
                if let Some(c) = phi_cot_branch(&p, q, z) {
                    assert!((c - phi).abs() < 1e-12);
                }
                let s = ScalarBundle::from_qz(&p, q, z);
                assert!((s.a * s.a + p.h() * p.h() * q * q - s.b).abs() < 1e-12);
                assert!((s.l * s.l + p.h() * p.h() * z * z - s.b).abs() < 1e-12);
                assert!((s.k - z.abs() * generating_v(&p, q / z)).abs() < 1e-12 * s.k);
            }
        }
    }
}
