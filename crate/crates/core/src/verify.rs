//! Seeded verification suite. Every check samples inputs from a ChaCha8 stream derived from
//! the seed and the check position, evaluates a residual per sample and compares the maximum
//! with a fixed tolerance. The report is ordered by check id.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::Tensor4;
use crate::error::{GeometryError, Result};
use crate::finslerops::{
    axis_angles, finsler_angle, finsler_product, finsler_two_vector_tensor, m_vector, m_vector_unsimplified,
    product_gradients, product_value, FinslerGeodesic,
};
use crate::geodesics::{
    angle, coincidence_ratio, distance_squared, length_gradient_products, length_gradients, pair_invariants,
    scalar_product, solve_chord,
};
use crate::numdiff;
use crate::quasimap::{
    christoffel, conformal_flatten, mu_jacobian, mu_map, quasi_metric, quasi_metric_lower, sigma_jacobian, sigma_map,
};
use crate::scalars::{generating_v, metric_function, phi_cot_branch, phi_l_branch, phi_shifted_branch, scalar_bundle};
use crate::space::{FinslerVector, GParameter, MetricContext, QuasiVector};
use crate::tensors::{
    angular_tensor, cartan_algebraic_form, cartan_by_differences, cartan_tensor, curvature_closed_form,
    curvature_from_cartan, curvature_scalar, gradient_covector, metric_tensor,
};
use crate::twovector::{
    co_angle_map, coincidence_limits, convenient_residuals, covector_pair, covectors_by_contraction, difference_vector_identities,
    frame, frame_contractions, invert_covectors, ominus_first_order, oplus_first_order, parallelogram_refine, product_relations,
    products_closed_form, reconstruct, solve_co_angle, two_vector_metric, unrolled_frame,
};

/// Inputs of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub g: f64,
    pub ctx: MetricContext,
    pub seed: u64,
    pub trials: usize,
    /// Tolerance for checks that do not pin their own.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    /// Acceptance criterion number, when the check belongs to one.
    pub criterion: Option<u8>,
    pub module: String,
    pub identity: String,
    pub samples: usize,
    /// Samples excluded because they fall outside the domain of the checked formula.
    pub skipped: usize,
    /// Samples whose evaluation raised an unexpected error.
    pub errors: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub h: f64,
    pub big_g: f64,
    pub gamma: f64,
    pub curvature_constant: f64,
    pub indicatrix_curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub g: f64,
    pub dim: usize,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub constants: Constants,
    pub warnings: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub failed: Vec<String>,
    pub passed: bool,
}

/// Residual bookkeeping for one check.
#[derive(Debug, Default)]
struct Tally {
    max: f64,
    samples: usize,
    skipped: usize,
    errors: usize,
}

impl Tally {
    fn push(&mut self, r: f64) {
        self.samples += 1;
        if r.is_nan() {
            self.max = f64::INFINITY;
        } else {
            self.max = self.max.max(r);
        }
    }

    /// Records an `Ok` residual, a domain skip, or an error.
    fn record(&mut self, r: Result<Option<f64>>) {
        match r {
            Ok(Some(v)) => self.push(v),
            Ok(None) => self.skipped += 1,
            Err(_) => {
                self.samples += 1;
                self.errors += 1;
            }
        }
    }
}

struct Check {
    id: &'static str,
    criterion: Option<u8>,
    module: &'static str,
    identity: &'static str,
    /// `None` means the run-level tolerance applies.
    tolerance: Option<f64>,
    run: fn(&mut Env) -> Tally,
}

struct Env {
    p: GParameter,
    ctx: MetricContext,
    rng: ChaCha8Rng,
    trials: usize,
}

fn scaled(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn scaled_vec(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

fn scaled_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

impl Env {
    fn dim(&self) -> usize {
        self.ctx.dim()
    }

    fn raw(&mut self) -> DVector<f64> {
        loop {
            let n = self.dim();
            let v = DVector::from_fn(n, |_, _| self.rng.gen_range(-1.0..=1.0));
            if self.ctx.norm(&v) >= 0.1 {
                return v;
            }
        }
    }

    fn quasi(&mut self) -> QuasiVector {
        QuasiVector::raw(self.raw())
    }

    /// A vector kept away from the axis and the base plane.
    fn finsler(&mut self) -> FinslerVector {
        loop {
            let v = self.raw();
            let r = FinslerVector::raw(v);
            let norm = self.ctx.norm(r.as_vector());
            let q = crate::scalars::q_norm(&self.ctx, &r);
            if r.z().abs() >= 0.05 * norm && q >= 0.05 * norm {
                return r;
            }
        }
    }

    fn quasi_pair(&mut self) -> (QuasiVector, QuasiVector) {
        loop {
            let (a, b) = (self.raw(), self.raw());
            let (u, _) = self.ctx.wedge_and_dot(&a, &b);
            if u >= 0.05 * self.ctx.norm(&a) * self.ctx.norm(&b) {
                return (QuasiVector::raw(a), QuasiVector::raw(b));
            }
        }
    }

    /// A pair whose angle under `p` stays below `limit`.
    fn quasi_pair_below(&mut self, p: &GParameter, limit: f64) -> (QuasiVector, QuasiVector) {
        loop {
            let (a, b) = self.quasi_pair();
            if self.ctx.euclidean_angle(a.as_vector(), b.as_vector()) / p.h() < limit {
                return (a, b);
            }
        }
    }

    fn finsler_pair(&mut self) -> (FinslerVector, FinslerVector) {
        loop {
            let (a, b) = (self.finsler(), self.finsler());
            let (Ok(t1), Ok(t2)) = (sigma_map(&self.p, &self.ctx, &a), sigma_map(&self.p, &self.ctx, &b)) else {
                continue;
            };
            let (u, _) = self.ctx.wedge_and_dot(t1.as_vector(), t2.as_vector());
            if u >= 0.05 * self.ctx.norm(t1.as_vector()) * self.ctx.norm(t2.as_vector()) {
                return (a, b);
            }
        }
    }

    fn euclid(&self) -> GParameter {
        GParameter::new(0.0).expect("zero is in range")
    }
}

fn tally(env: &mut Env, mut f: impl FnMut(&mut Env) -> Result<Option<f64>>) -> Tally {
    let mut t = Tally::default();
    for _ in 0..env.trials {
        let r = f(env);
        t.record(r);
    }
    t
}

// ---- criterion 1: euclidean degeneration ----

fn euclid_scalars(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let k = metric_function(&e.euclid(), &e.ctx, &r)?;
        Ok(Some(scaled(k, e.ctx.norm(r.as_vector()))))
    })
}

fn euclid_tensors(env: &mut Env) -> Tally {
    tally(env, |e| {
        let p0 = e.euclid();
        let r = e.finsler();
        let g = metric_tensor(&p0, &e.ctx, &r)?;
        let n = quasi_metric_lower(&p0, &e.ctx, &QuasiVector::raw(r.as_vector().clone()))?;
        Ok(Some(scaled_mat(&g, e.ctx.r_pq()).max(scaled_mat(&n, e.ctx.r_pq()))))
    })
}

fn euclid_angles(env: &mut Env) -> Tally {
    tally(env, |e| {
        let p0 = e.euclid();
        let (t1, t2) = e.quasi_pair();
        let (x, y) = (t1.as_vector(), t2.as_vector());
        let d12 = e.ctx.dot(x, y);
        let cosine = d12 / (e.ctx.norm(x) * e.ctx.norm(y));
        let a = angle(&p0, &e.ctx, &t1, &t2)?;
        let sp = scalar_product(&p0, &e.ctx, &t1, &t2)?;
        let d2 = distance_squared(&p0, &e.ctx, &t1, &t2)?;
        let diff = x - y;
        Ok(Some(scaled(a, cosine.acos()).max(scaled(sp, d12)).max(scaled(d2, e.ctx.dot(&diff, &diff)))))
    })
}

fn euclid_geodesics(env: &mut Env) -> Tally {
    tally(env, |e| {
        let p0 = e.euclid();
        let (t1, t2) = e.quasi_pair_below(&p0, PI - 0.1);
        let chord = solve_chord(&p0, &e.ctx, &t1, &t2)?;
        let (x, y) = (t1.as_vector(), t2.as_vector());
        let mut worst = 0.0f64;
        for i in 0..=4 {
            let s = chord.delta_s * i as f64 / 4.0;
            let straight = x + (y - x) * (s / chord.delta_s);
            worst = worst.max(scaled_vec(chord.point(s).t.as_vector(), &straight));
        }
        Ok(Some(worst))
    })
}

fn euclid_two_vector(env: &mut Env) -> Tally {
    tally(env, |e| {
        let p0 = e.euclid();
        let (t1, t2) = e.quasi_pair();
        let n = two_vector_metric(&p0, &e.ctx, &t1, &t2)?.n_lower;
        let cp = covector_pair(&p0, &e.ctx, &t1, &t2)?;
        Ok(Some(
            scaled_mat(&n, e.ctx.r_pq())
                .max(scaled_vec(&cp.co1, &e.ctx.lower(t2.as_vector())))
                .max(scaled_vec(&cp.co2, &e.ctx.lower(t1.as_vector()))),
        ))
    })
}

fn euclid_parallelogram(env: &mut Env) -> Tally {
    tally(env, |e| {
        let p0 = e.euclid();
        let (t1, t2) = e.quasi_pair_below(&p0, PI / 2.0);
        let sum = oplus_first_order(&p0, &e.ctx, &t1, &t2)?;
        let exact = t1.as_vector() + t2.as_vector();
        let back = ominus_first_order(&p0, &e.ctx, &t1, &sum)?;
        Ok(Some(scaled_vec(sum.as_vector(), &exact).max(scaled_vec(back.as_vector(), t2.as_vector()))))
    })
}

// ---- criterion 2: hessian ----

fn hessian_check(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let (p, ctx) = (e.p, e.ctx.clone());
        let g = metric_tensor(&p, &ctx, &r)?;
        let h = numdiff::hessian(
            |x| Ok(metric_function(&p, &ctx, &FinslerVector::raw(x.clone()))?.powi(2)),
            r.as_vector(),
        )?;
        Ok(Some((h * 0.5 - &g).amax() / g.amax()))
    })
}

// ---- criterion 3: determinants ----

fn det_metric(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let g = metric_tensor(&e.p, &e.ctx, &r)?;
        let j = scalar_bundle(&e.p, &e.ctx, &r)?.j;
        Ok(Some(relative(g.determinant(), j.powi(2 * e.dim() as i32) * e.ctx.det_r())))
    })
}

fn det_quasi(env: &mut Env) -> Tally {
    tally(env, |e| {
        let t = e.quasi();
        let n = quasi_metric_lower(&e.p, &e.ctx, &t)?;
        Ok(Some(relative(n.determinant(), e.p.h().powi(2 * (1 - e.dim() as i32)) * e.ctx.det_r())))
    })
}

// ---- criterion 4: cartan structure ----

fn cartan_algebraic(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let c = cartan_tensor(&e.p, &e.ctx, &r)?;
        let h = angular_tensor(&e.p, &e.ctx, &r)?;
        let alg = cartan_algebraic_form(&h, &c);
        Ok(Some(c.lower.max_abs_diff(&alg) / c.lower.max_abs().max(1.0)))
    })
}

fn cartan_trace(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let c = cartan_tensor(&e.p, &e.ctx, &r)?;
        let k = metric_function(&e.p, &e.ctx, &r)?;
        let n = e.dim() as f64;
        let g = e.p.g();
        Ok(Some(relative(c.trace_square(), n * n * g * g / (4.0 * k * k))))
    })
}

fn cartan_differences(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let c = cartan_tensor(&e.p, &e.ctx, &r)?;
        let fd = cartan_by_differences(&e.p, &e.ctx, &r)?;
        Ok(Some(c.lower.max_abs_diff(&fd.lower) / c.lower.max_abs().max(1.0)))
    })
}

// ---- criterion 5: curvature ----

fn curvature_form(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let s = curvature_from_cartan(&cartan_tensor(&e.p, &e.ctx, &r)?);
        let closed = curvature_closed_form(&e.p, &e.ctx, &r)?;
        Ok(Some(s.max_abs_diff(&closed) / closed.max_abs().max(1.0)))
    })
}

fn curvature_constant(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let s = curvature_from_cartan(&cartan_tensor(&e.p, &e.ctx, &r)?);
        if e.dim() == 2 {
            let k2 = metric_function(&e.p, &e.ctx, &r)?.powi(2);
            return Ok(Some(s.max_abs() * k2));
        }
        let star = curvature_scalar(&e.p, &e.ctx, &r, &s)?;
        Ok(Some(scaled(star, e.p.curvature_constant())))
    })
}

// ---- criterion 6: the diffeomorphism ----

fn roundtrip(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = FinslerVector::raw(e.raw());
        let t = sigma_map(&e.p, &e.ctx, &r)?;
        let back = mu_map(&e.p, &e.ctx, &t)?;
        let t2 = e.quasi();
        let r2 = mu_map(&e.p, &e.ctx, &t2)?;
        let t2b = sigma_map(&e.p, &e.ctx, &r2)?;
        Ok(Some(scaled_vec(back.as_vector(), r.as_vector()).max(scaled_vec(t2b.as_vector(), t2.as_vector()))))
    })
}

fn norm_preservation(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = FinslerVector::raw(e.raw());
        let t = sigma_map(&e.p, &e.ctx, &r)?;
        Ok(Some(scaled(e.ctx.norm(t.as_vector()), metric_function(&e.p, &e.ctx, &r)?)))
    })
}

fn sigma_det(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let j = scalar_bundle(&e.p, &e.ctx, &r)?.j;
        let n = e.dim() as i32;
        let m = sigma_jacobian(&e.p, &e.ctx, &r)?;
        Ok(Some(relative(m.determinant(), e.p.h().powi(n - 1) * j.powi(n))))
    })
}

fn jacobians_fd(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let (p, ctx) = (e.p, e.ctx.clone());
        let js = sigma_jacobian(&p, &ctx, &r)?;
        let fd = numdiff::jacobian(|x| sigma_map(&p, &ctx, &FinslerVector::raw(x.clone())).map(|t| t.into_vector()), r.as_vector())?;
        let t = sigma_map(&p, &ctx, &r)?;
        let jm = mu_jacobian(&p, &ctx, &t)?;
        let n = ctx.dim();
        Ok(Some(scaled_mat(&js, &fd).max(scaled_mat(&(jm * &js), &DMatrix::identity(n, n)))))
    })
}

fn metric_pullback(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = e.finsler();
        let js = sigma_jacobian(&e.p, &e.ctx, &r)?;
        let t = sigma_map(&e.p, &e.ctx, &r)?;
        let n = quasi_metric_lower(&e.p, &e.ctx, &t)?;
        let g = metric_tensor(&e.p, &e.ctx, &r)?;
        Ok(Some(scaled_mat(&(js.transpose() * n * js), &g)))
    })
}

// ---- criterion 7: quasi-euclidean geometry ----

fn christoffel_identities(env: &mut Env) -> Tally {
    tally(env, |e| {
        let t = e.quasi();
        let n = e.dim();
        let c = christoffel(&e.p, &e.ctx, &t)?;
        let tv = t.as_vector();
        let s = e.ctx.norm(tv);
        let mut worst = 0.0f64;
        for r in 0..n {
            for q in 0..n {
                let contraction: f64 = (0..n).map(|p| tv[p] * c[(p, r, q)]).sum();
                worst = worst.max(contraction.abs());
            }
        }
        for p in 0..n {
            let trace: f64 = (0..n).map(|s| c[(p, s, s)]).sum();
            worst = worst.max(trace.abs() * s);
        }
        Ok(Some(worst))
    })
}

/// `R_p^r_qs` from central differences of the Christoffel symbols, lowered with `r_pq`.
fn curvature_by_differences(p: &GParameter, ctx: &MetricContext, t: &QuasiVector) -> Result<Tensor4> {
    let n = ctx.dim();
    let nn = n * n * n;
    let flat = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let c = christoffel(p, ctx, &QuasiVector::raw(x.clone()))?;
        Ok(DVector::from_fn(nn, |i, _| c[(i / (n * n), (i / n) % n, i % n)]))
    };
    let jac = numdiff::jacobian(flat, t.as_vector())?;
    let d = |a: usize, r: usize, b: usize, s: usize| jac[((a * n + r) * n + b, s)];
    let c = christoffel(p, ctx, t)?;
    let rl = ctx.r_pq();
    let mixed = Tensor4::from_fn(n, |a, r, b, s| {
        let mut v = d(a, r, b, s) - d(a, r, s, b);
        for w in 0..n {
            v += c[(a, w, b)] * c[(w, r, s)] - c[(a, w, s)] * c[(w, r, b)];
        }
        v
    });
    Ok(Tensor4::from_fn(n, |a, r, b, s| (0..n).map(|w| rl[(r, w)] * mixed[(a, w, b, s)]).sum()))
}

fn quasi_curvature(env: &mut Env) -> Tally {
    tally(env, |e| {
        let t = e.quasi();
        let closed = quasi_metric(&e.p, &e.ctx, &t)?.curvature;
        let fd = curvature_by_differences(&e.p, &e.ctx, &t)?;
        let s2 = e.ctx.dot(t.as_vector(), t.as_vector());
        Ok(Some(fd.max_abs_diff(&closed) * s2))
    })
}

fn conformal(env: &mut Env) -> Tally {
    tally(env, |e| {
        let t = e.quasi();
        let (p, ctx) = (e.p, e.ctx.clone());
        let img = conformal_flatten(&p, &ctx, &t)?;
        let k = numdiff::jacobian(|x| conformal_flatten(&p, &ctx, &QuasiVector::raw(x.clone())).map(|c| c.image), t.as_vector())?;
        let nu = quasi_metric(&p, &ctx, &t)?.n_upper;
        let c = &k * nu * k.transpose() / img.scale.powi(2);
        Ok(Some(scaled_mat(&c, ctx.r_pq_inv()).max(scaled_mat(&k, &img.jacobian))))
    })
}

// ---- criterion 8: geodesics ----

fn chord_pair(e: &mut Env) -> (QuasiVector, QuasiVector) {
    let p = e.p;
    e.quasi_pair_below(&p, PI - 0.1)
}

fn geodesic_endpoints(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = chord_pair(e);
        let chord = solve_chord(&e.p, &e.ctx, &t1, &t2)?;
        Ok(Some(
            scaled_vec(chord.point(0.0).t.as_vector(), t1.as_vector())
                .max(scaled_vec(chord.point(chord.delta_s).t.as_vector(), t2.as_vector())),
        ))
    })
}

fn geodesic_ode(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = chord_pair(e);
        let chord = solve_chord(&e.p, &e.ctx, &t1, &t2)?;
        let coef = 0.25 * e.p.g().powi(2) * (chord.a * chord.a - chord.b * chord.b);
        let mut worst = 0.0f64;
        for frac in [0.25, 0.5, 0.75] {
            let s = chord.delta_s * frac;
            let acc = numdiff::curve_second_derivative(|x| Ok(chord.point(x).t.into_vector()), s)?;
            let t = chord.point(s).t.into_vector();
            let expected = &t * (coef / chord.radius_squared(s).powi(2));
            worst = worst.max(scaled_vec(&acc, &expected));
        }
        Ok(Some(worst))
    })
}

fn geodesic_unit_speed(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = chord_pair(e);
        let chord = solve_chord(&e.p, &e.ctx, &t1, &t2)?;
        let mut worst = 0.0f64;
        for i in 0..=10 {
            let s = chord.delta_s * i as f64 / 10.0;
            let u = chord.velocity(s);
            let n = quasi_metric_lower(&e.p, &e.ctx, &chord.point(s).t)?;
            worst = worst.max(((u.transpose() * n * &u)[(0, 0)] - 1.0).abs());
        }
        Ok(Some(worst))
    })
}

fn geodesic_radial_rate(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = chord_pair(e);
        let chord = solve_chord(&e.p, &e.ctx, &t1, &t2)?;
        let mut worst = 0.0f64;
        for i in 0..=10 {
            let s = chord.delta_s * i as f64 / 10.0;
            let t = chord.point(s).t.into_vector();
            worst = worst.max(scaled(e.ctx.dot(&t, &chord.velocity(s)), chord.b + s));
        }
        Ok(Some(worst))
    })
}

fn geodesic_arc_length(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = chord_pair(e);
        let chord = solve_chord(&e.p, &e.ctx, &t1, &t2)?;
        let segments = 1000;
        let mut len = 0.0;
        let mut prev = chord.point(0.0).t.into_vector();
        for i in 1..=segments {
            let s = chord.delta_s * i as f64 / segments as f64;
            let mid = chord.point(s - 0.5 * chord.delta_s / segments as f64).t;
            let next = chord.point(s).t.into_vector();
            let dt = &next - &prev;
            let n = quasi_metric_lower(&e.p, &e.ctx, &mid)?;
            len += (dt.transpose() * n * &dt)[(0, 0)].max(0.0).sqrt();
            prev = next;
        }
        Ok(Some(relative(len, chord.delta_s)))
    })
}

fn geodesic_velocity_fd(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = chord_pair(e);
        let chord = solve_chord(&e.p, &e.ctx, &t1, &t2)?;
        let s = 0.37 * chord.delta_s;
        let fd = numdiff::curve_derivative(|x| Ok(chord.point(x).t.into_vector()), s)?;
        Ok(Some(scaled_vec(&chord.velocity(s), &fd)))
    })
}

fn pair_battery(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let inv = pair_invariants(&e.ctx, &t1, &t2)?;
        let (x, y) = (t1.as_vector(), t2.as_vector());
        let c = &e.ctx;
        let checks = [
            scaled(c.dot(x, &inv.d1), 0.0),
            scaled(c.dot(y, &inv.d2), 0.0),
            scaled(c.dot(&inv.d1, &inv.d2), -inv.dot12),
            scaled(c.dot(&inv.d1, &inv.d1), inv.dot11),
            scaled(c.dot(&inv.d2, &inv.d2), inv.dot22),
            scaled(c.dot(&inv.d1, y), inv.u),
            scaled(c.dot(x, &inv.d2), inv.u),
        ];
        Ok(Some(checks.into_iter().fold(0.0, f64::max)))
    })
}

fn length_gradient_check(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let (p, ctx) = (e.p, e.ctx.clone());
        let (b1, b2) = length_gradients(&p, &ctx, &t1, &t2)?;
        let f1 = numdiff::gradient(|x| Ok(0.5 * distance_squared(&p, &ctx, &QuasiVector::raw(x.clone()), &t2)?), t1.as_vector())?;
        let f2 = numdiff::gradient(|x| Ok(0.5 * distance_squared(&p, &ctx, &t1, &QuasiVector::raw(x.clone()))?), t2.as_vector())?;
        let (p11, p22, p12) = length_gradient_products(&p, &ctx, &t1, &t2)?;
        let euler = t1.as_vector().dot(&b1) + t2.as_vector().dot(&b2);
        Ok(Some(
            scaled_vec(&b1, &f1)
                .max(scaled_vec(&b2, &f2))
                .max(scaled(ctx.co_dot(&b1, &b1), p11))
                .max(scaled(ctx.co_dot(&b2, &b2), p22))
                .max(scaled(ctx.co_dot(&b1, &b2), p12))
                .max(scaled(euler, distance_squared(&p, &ctx, &t1, &t2)?)),
        ))
    })
}

// ---- criterion 9: angle ----

fn angle_additivity(env: &mut Env) -> Tally {
    let mut t = Tally::default();
    for _ in 0..100 {
        let (t1, t3) = env.quasi_pair_below(&GParameter::new(0.0).expect("in range"), PI - 0.05);
        let (x, z) = (t1.as_vector(), t3.as_vector());
        let l1 = env.rng.gen_range(0.1..1.0);
        let l3 = env.rng.gen_range(0.1..1.0);
        let t2 = QuasiVector::raw(x / env.ctx.norm(x) * l1 + z / env.ctx.norm(z) * l3);
        let r = (|| -> Result<Option<f64>> {
            let a13 = angle(&env.p, &env.ctx, &t1, &t3)?;
            let a12 = angle(&env.p, &env.ctx, &t1, &t2)?;
            let a23 = angle(&env.p, &env.ctx, &t2, &t3)?;
            Ok(Some(scaled(a12 + a23, a13)))
        })();
        t.record(r);
    }
    t
}

fn angle_scale(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let (l1, l2) = (e.rng.gen_range(0.1..10.0), e.rng.gen_range(0.1..10.0));
        let a = angle(&e.p, &e.ctx, &t1, &t2)?;
        let b = angle(&e.p, &e.ctx, &t1.scaled(l1), &t2.scaled(l2))?;
        Ok(Some((a - b).abs() / (a.max(1.0) * f64::EPSILON)))
    })
}

fn fundamental_limit(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t, v) = e.quasi_pair();
        let t2 = QuasiVector::raw(t.as_vector() + v.as_vector() * (1e-4 / e.ctx.norm(v.as_vector()) * e.ctx.norm(t.as_vector())));
        let ratio = coincidence_ratio(&e.p, &e.ctx, &t, &t2)?;
        Ok(Some((ratio - 1.0 / (e.p.h() * e.p.h())).abs()))
    })
}

// ---- criterion 10: two-vector tensor ----

fn two_vector_fd(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let (p, ctx) = (e.p, e.ctx.clone());
        let n = two_vector_metric(&p, &ctx, &t1, &t2)?.n_lower;
        let fd = numdiff::mixed_hessian(
            |a, b| scalar_product(&p, &ctx, &QuasiVector::raw(a.clone()), &QuasiVector::raw(b.clone())),
            t1.as_vector(),
            t2.as_vector(),
        )?;
        let dist = numdiff::mixed_hessian(
            |a, b| Ok(-0.5 * distance_squared(&p, &ctx, &QuasiVector::raw(a.clone()), &QuasiVector::raw(b.clone()))?),
            t1.as_vector(),
            t2.as_vector(),
        )?;
        Ok(Some(scaled_mat(&fd, &n).max(scaled_mat(&dist, &n))))
    })
}

fn two_vector_det(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let tv = two_vector_metric(&e.p, &e.ctx, &t1, &t2)?;
        Ok(Some(relative(tv.n_lower.determinant(), tv.det)))
    })
}

fn unit_pair(e: &mut Env) -> (QuasiVector, QuasiVector) {
    let (t, v) = e.quasi_pair();
    let (tv, vv) = (t.as_vector(), v.as_vector());
    (QuasiVector::raw(tv / e.ctx.norm(tv)), QuasiVector::raw(vv / e.ctx.norm(vv)))
}

fn coincidence_monotone(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t, v) = unit_pair(e);
        let rep = coincidence_limits(&e.p, &e.ctx, &t, &v, &[1e-2, 1e-3, 1e-4])?;
        let mut worst = 0.0f64;
        for w in rep.rows.windows(2) {
            // at g = 0 the tensor is constant and the errors sit at rounding level
            if w[1].tensor_error > 1e-13 {
                worst = worst.max(w[1].tensor_error / w[0].tensor_error);
            }
        }
        Ok(Some(worst))
    })
}

fn coincidence_derivative(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t, v) = unit_pair(e);
        let rep = coincidence_limits(&e.p, &e.ctx, &t, &v, &[1e-4])?;
        Ok(Some(rep.rows[0].derivative_sum_error))
    })
}

/// Frame checks skip pairs whose radicands are negative.
fn frame_or_skip<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(GeometryError::NumericalDomain { .. }) => Ok(None),
        Err(err) => Err(err),
    }
}

fn frame_contraction_check(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let Some(f) = frame_or_skip(frame(&e.p, &e.ctx, &t1, &t2))? else { return Ok(None) };
        let cl = frame_contractions(&e.p, &e.ctx, &t1, &t2)?;
        let fr = e.ctx.frame();
        let (x, y) = (t1.as_vector(), t2.as_vector());
        Ok(Some(
            scaled_vec(&(&f * x), &cl.on_t1)
                .max(scaled_vec(&(&f * y), &cl.on_t2))
                .max(scaled_vec(&(f.transpose() * (fr * x)), &cl.by_t1))
                .max(scaled_vec(&(f.transpose() * (fr * y)), &cl.by_t2)),
        ))
    })
}

fn frame_reconstruction(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let Some(f12) = frame_or_skip(frame(&e.p, &e.ctx, &t1, &t2))? else { return Ok(None) };
        let Some(f21) = frame_or_skip(frame(&e.p, &e.ctx, &t2, &t1))? else { return Ok(None) };
        let n = two_vector_metric(&e.p, &e.ctx, &t1, &t2)?.n_lower;
        Ok(Some(scaled_mat(&reconstruct(&f12, &f21), &n)))
    })
}

fn unrolled_reconstruction(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let Some(f12) = frame_or_skip(unrolled_frame(&e.p, &e.ctx, &t1, &t2))? else { return Ok(None) };
        let f21 = unrolled_frame(&e.p, &e.ctx, &t2, &t1)?;
        let n = two_vector_metric(&e.p, &e.ctx, &t1, &t2)?.n_lower;
        Ok(Some(scaled_mat(&reconstruct(&f12, &f21), &n)))
    })
}

fn two_vector_swap(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let a = two_vector_metric(&e.p, &e.ctx, &t1, &t2)?.n_lower;
        let b = two_vector_metric(&e.p, &e.ctx, &t2, &t1)?.n_lower;
        Ok(Some(scaled_mat(&b.transpose(), &a)))
    })
}

// ---- criterion 11: covariant version ----

fn covector_closed(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let cp = covector_pair(&e.p, &e.ctx, &t1, &t2)?;
        let (a, b) = covectors_by_contraction(&e.p, &e.ctx, &t1, &t2)?;
        let sp = scalar_product(&e.p, &e.ctx, &t1, &t2)?;
        let euler = t1.as_vector().dot(&cp.co1) + t2.as_vector().dot(&cp.co2);
        Ok(Some(scaled_vec(&cp.co1, &a).max(scaled_vec(&cp.co2, &b)).max(scaled(euler, 2.0 * sp))))
    })
}

fn covector_products(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let cp = covector_pair(&e.p, &e.ctx, &t1, &t2)?;
        let closed = products_closed_form(&e.p, &e.ctx, &t1, &t2)?;
        let pr = cp.products;
        let c = &e.ctx;
        let mut worst = [
            scaled(pr.t11, closed.t11),
            scaled(pr.t22, closed.t22),
            scaled(pr.t12, closed.t12),
            scaled(pr.wedge, closed.wedge.abs()),
            scaled(c.co_dot(&cp.co1, &cp.dual1), 0.0),
            scaled(c.co_dot(&cp.co2, &cp.dual2), 0.0),
            scaled(c.co_dot(&cp.dual1, &cp.dual2), -pr.t12),
            scaled(c.co_dot(&cp.dual1, &cp.co2), pr.wedge),
            scaled(c.co_dot(&cp.co1, &cp.dual2), pr.wedge),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        // the relations through the signed wedge hold on the principal branch only
        if closed.wedge > 0.0 {
            for r in product_relations(&e.p, &e.ctx, &t1, &t2)? {
                worst = worst.max(r.abs() / pr.t11.max(pr.t22).max(1.0));
            }
        }
        Ok(Some(worst))
    })
}

/// Pairs whose covector angle leaves `(0, pi)` are outside the principal branch.
fn principal_pair(e: &mut Env) -> Result<Option<(QuasiVector, QuasiVector, f64)>> {
    let (t1, t2) = e.quasi_pair();
    let alpha = angle(&e.p, &e.ctx, &t1, &t2)?;
    if co_angle_map(&e.p, alpha) >= PI - 1e-3 {
        return Ok(None);
    }
    Ok(Some((t1, t2, alpha)))
}

fn covector_inversion(env: &mut Env) -> Tally {
    tally(env, |e| {
        let Some((t1, t2, alpha)) = principal_pair(e)? else { return Ok(None) };
        let cp = covector_pair(&e.p, &e.ctx, &t1, &t2)?;
        let (b1, b2) = invert_covectors(&e.p, &e.ctx, &cp.co1, &cp.co2, alpha)?;
        Ok(Some(scaled_vec(b1.as_vector(), t1.as_vector()).max(scaled_vec(b2.as_vector(), t2.as_vector()))))
    })
}

fn co_angle_residual(env: &mut Env) -> Tally {
    tally(env, |e| {
        let Some((t1, t2, _)) = principal_pair(e)? else { return Ok(None) };
        let cp = covector_pair(&e.p, &e.ctx, &t1, &t2)?;
        Ok(Some(solve_co_angle(&e.p, &e.ctx, &cp.co1, &cp.co2)?.residual.abs()))
    })
}

fn co_angle_consistency(env: &mut Env) -> Tally {
    tally(env, |e| {
        let Some((t1, t2, alpha)) = principal_pair(e)? else { return Ok(None) };
        let cp = covector_pair(&e.p, &e.ctx, &t1, &t2)?;
        Ok(Some(scaled(solve_co_angle(&e.p, &e.ctx, &cp.co1, &cp.co2)?.alpha, alpha)))
    })
}

fn covector_metric_recovery(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = e.quasi_pair();
        let (p, ctx) = (e.p, e.ctx.clone());
        let n = two_vector_metric(&p, &ctx, &t1, &t2)?.n_lower;
        let j1 = numdiff::jacobian(|x| covector_pair(&p, &ctx, &t1, &QuasiVector::raw(x.clone())).map(|c| c.co1), t2.as_vector())?;
        let j2 = numdiff::jacobian(|x| covector_pair(&p, &ctx, &QuasiVector::raw(x.clone()), &t2).map(|c| c.co2), t1.as_vector())?;
        Ok(Some(scaled_mat(&j1, &n).max(scaled_mat(&j2.transpose(), &n))))
    })
}

// ---- criterion 12: parallelogram ----

const ORDER_KS: [f64; 3] = [1e-1, 1e-2, 1e-3];

fn parameter_from_k(k: f64) -> GParameter {
    let h = 1.0 / (1.0 + k);
    GParameter::new(2.0 * (1.0 - h * h).sqrt()).expect("k > 0 gives |g| < 2")
}

fn loglog_slope(ys: &[f64]) -> f64 {
    let xs: Vec<f64> = ORDER_KS.iter().map(|k| k.log10()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ls.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Acute with respect to the largest parameter of the order study.
fn acute_pair(e: &mut Env) -> (QuasiVector, QuasiVector) {
    e.quasi_pair_below(&parameter_from_k(ORDER_KS[0]), PI / 2.0 - 0.05)
}

fn oplus_order(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = acute_pair(e);
        let mut ys = Vec::new();
        for k in ORDER_KS {
            let p = parameter_from_k(k);
            let t3 = oplus_first_order(&p, &e.ctx, &t1, &t2)?;
            let (a, b) = convenient_residuals(&p, &e.ctx, &t1, &t2, &t3)?;
            ys.push(a.abs().max(b.abs()));
        }
        Ok(Some((loglog_slope(&ys) - 2.0).abs()))
    })
}

fn ominus_order(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t2) = acute_pair(e);
        let mut ys = Vec::new();
        for k in ORDER_KS {
            let p = parameter_from_k(k);
            let t3 = oplus_first_order(&p, &e.ctx, &t1, &t2)?;
            let back = ominus_first_order(&p, &e.ctx, &t1, &t3)?;
            ys.push((back.as_vector() - t2.as_vector()).amax());
        }
        Ok(Some((loglog_slope(&ys) - 2.0).abs()))
    })
}

fn ominus_identities(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (t1, t3) = e.quasi_pair();
        if t1 == t3 {
            return Ok(None);
        }
        Ok(Some(difference_vector_identities(&e.ctx, &t1, &t3)?.into_iter().fold(0.0, f64::max)))
    })
}

fn refine_check(env: &mut Env) -> Tally {
    tally(env, |e| {
        let p = GParameter::new(0.2)?;
        let (t1, t2) = e.quasi_pair_below(&p, PI / 2.0 - 0.05);
        match parallelogram_refine(&p, &e.ctx, &t1, &t2) {
            Ok(r) => Ok(Some(r.residual)),
            Err(GeometryError::MaxIterations { residual, .. }) => Ok(Some(residual.max(1.0))),
            Err(err) => Err(err),
        }
    })
}

// ---- criterion 13: pullback ----

fn pullback_product(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (r, s) = (FinslerVector::raw(e.raw()), FinslerVector::raw(e.raw()));
        let fp = product_value(&e.p, &e.ctx, &r, &s)?;
        let (t1, t2) = (sigma_map(&e.p, &e.ctx, &r)?, sigma_map(&e.p, &e.ctx, &s)?);
        let k = metric_function(&e.p, &e.ctx, &r)?;
        let same = product_value(&e.p, &e.ctx, &r, &r)?;
        Ok(Some(scaled(fp, scalar_product(&e.p, &e.ctx, &t1, &t2)?).max(scaled(same, k * k))))
    })
}

fn finsler_limit(env: &mut Env) -> Tally {
    tally(env, |e| {
        // the approach direction must be transverse to R: the sin/cos form is 0/0 on collinear pairs
        let (r, v) = loop {
            let (r, v) = e.finsler_pair();
            let (u, _) = e.ctx.wedge_and_dot(r.as_vector(), v.as_vector());
            if u >= 0.05 * e.ctx.norm(r.as_vector()) * e.ctx.norm(v.as_vector()) {
                break (r, v);
            }
        };
        let g = metric_tensor(&e.p, &e.ctx, &r)?;
        let step = 1e-4 * e.ctx.norm(r.as_vector()) / e.ctx.norm(v.as_vector());
        let s = FinslerVector::raw(r.as_vector() + v.as_vector() * step);
        let big = finsler_two_vector_tensor(&e.p, &e.ctx, &r, &s)?;
        Ok(Some(scaled_mat(&big, &g)))
    })
}

fn pullback_tensor(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (r, s) = e.finsler_pair();
        let big = finsler_two_vector_tensor(&e.p, &e.ctx, &r, &s)?;
        let (t1, t2) = (sigma_map(&e.p, &e.ctx, &r)?, sigma_map(&e.p, &e.ctx, &s)?);
        let n = two_vector_metric(&e.p, &e.ctx, &t1, &t2)?.n_lower;
        let pulled = sigma_jacobian(&e.p, &e.ctx, &r)?.transpose() * n * sigma_jacobian(&e.p, &e.ctx, &s)?;
        Ok(Some(scaled_mat(&big, &pulled)))
    })
}

fn m_orthogonality(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (r, s) = e.finsler_pair();
        let m = m_vector(&e.p, &e.ctx, &r, &s)?;
        let un = m_vector_unsimplified(&e.p, &e.ctx, &r, &s)?;
        let scale = m.amax().max(1.0) * r.as_vector().amax().max(1.0);
        Ok(Some((m.dot(r.as_vector()).abs() / scale).max(scaled_vec(&un, &m))))
    })
}

fn axis_angle_check(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = FinslerVector::raw(e.raw());
        let a = axis_angles(&e.p, &e.ctx, &r)?;
        let n = e.dim();
        let mut axis = DVector::zeros(n);
        axis[n - 1] = 1.0;
        let via_axis = finsler_angle(&e.p, &e.ctx, &r, &FinslerVector::raw(axis))?;
        let mut base = r.as_vector().clone();
        base[n - 1] = 0.0;
        if base.iter().all(|x| *x == 0.0) {
            return Ok(Some(scaled(a.axis, via_axis)));
        }
        let via_plane = finsler_angle(&e.p, &e.ctx, &r, &FinslerVector::raw(base))?;
        Ok(Some(scaled(a.axis, via_axis).max(scaled(a.plane, via_plane))))
    })
}

fn product_gradient_check(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (r, s) = e.finsler_pair();
        let (p, ctx) = (e.p, e.ctx.clone());
        let (dr, ds) = product_gradients(&p, &ctx, &r, &s)?;
        let fr = numdiff::gradient(|x| product_value(&p, &ctx, &FinslerVector::raw(x.clone()), &s), r.as_vector())?;
        let fs = numdiff::gradient(|x| product_value(&p, &ctx, &r, &FinslerVector::raw(x.clone())), s.as_vector())?;
        Ok(Some(scaled_vec(&dr, &fr).max(scaled_vec(&ds, &fs))))
    })
}

fn finsler_tensor_fd(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (r, s) = e.finsler_pair();
        let (p, ctx) = (e.p, e.ctx.clone());
        let fp = finsler_product(&p, &ctx, &r, &s)?;
        let Some(big) = fp.g_lower else { return Ok(None) };
        let fd = numdiff::mixed_hessian(
            |a, b| product_value(&p, &ctx, &FinslerVector::raw(a.clone()), &FinslerVector::raw(b.clone())),
            r.as_vector(),
            s.as_vector(),
        )?;
        Ok(Some(scaled_mat(&fd, &big)))
    })
}

fn finsler_geodesic_check(env: &mut Env) -> Tally {
    tally(env, |e| {
        let (r1, r2) = loop {
            let (a, b) = e.finsler_pair();
            let (t1, t2) = (sigma_map(&e.p, &e.ctx, &a)?, sigma_map(&e.p, &e.ctx, &b)?);
            if angle(&e.p, &e.ctx, &t1, &t2)? < PI - 0.1 {
                break (a, b);
            }
        };
        let geo = FinslerGeodesic::new(&e.p, &e.ctx, &r1, &r2)?;
        let ends = scaled_vec(geo.point(0.0)?.as_vector(), r1.as_vector())
            .max(scaled_vec(geo.point(geo.length())?.as_vector(), r2.as_vector()));
        match geo.arc_length(1000) {
            Ok(len) => Ok(Some(ends.max(relative(len, geo.length())))),
            // the chord may cross the axis, where the Jacobian of mu is singular
            Err(GeometryError::OnAxis { .. }) => Ok(None),
            Err(err) => Err(err),
        }
    })
}

// ---- module invariants without a criterion ----

fn scalar_identities(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = FinslerVector::raw(e.raw());
        let s = scalar_bundle(&e.p, &e.ctx, &r)?;
        let h = e.p.h();
        let mut worst = scaled(s.a * s.a + h * h * s.q * s.q, s.b).max(scaled(s.l * s.l + h * h * s.z * s.z, s.b));
        for branch in [
            phi_shifted_branch(&e.p, s.q, s.z),
            phi_l_branch(&e.p, s.q, s.z),
            phi_cot_branch(&e.p, s.q, s.z),
        ]
        .into_iter()
        .flatten()
        {
            worst = worst.max(scaled(branch, s.phi));
        }
        if s.z != 0.0 {
            worst = worst.max(scaled(s.z.abs() * generating_v(&e.p, s.q / s.z), s.k));
        }
        let mirrored = GParameter::new(-e.p.g())?;
        let flip = scalar_bundle(&mirrored, &e.ctx, &FinslerVector::raw({
            let mut v = r.as_vector().clone();
            let n = v.len();
            v[n - 1] = -v[n - 1];
            v
        }))?;
        worst = worst.max(scaled(flip.k, s.k));
        Ok(Some(worst))
    })
}

fn gradient_identity(env: &mut Env) -> Tally {
    tally(env, |e| {
        let r = FinslerVector::raw(e.raw());
        let g = metric_tensor(&e.p, &e.ctx, &r)?;
        let lowered = &g * r.as_vector();
        Ok(Some(scaled_vec(&lowered, &gradient_covector(&e.p, &e.ctx, &r)?)))
    })
}

fn checks() -> Vec<Check> {
    macro_rules! c {
        ($id:literal, $crit:expr, $module:literal, $identity:literal, $tol:expr, $run:ident) => {
            Check { id: $id, criterion: $crit, module: $module, identity: $identity, tolerance: $tol, run: $run }
        };
    }
    vec![
        c!("01.euclid.metric_function", Some(1), "core", "g=0: K(R) = sqrt(r_pq R^p R^q)", Some(1e-12), euclid_scalars),
        c!("01.euclid.metric_tensors", Some(1), "tensors", "g=0: g_pq = n_pq = r_pq", Some(1e-12), euclid_tensors),
        c!("01.euclid.angles", Some(1), "geodesics", "g=0: angle, product and distance are euclidean", Some(1e-12), euclid_angles),
        c!("01.euclid.geodesics", Some(1), "geodesics", "g=0: t(s) = t1 + (t2 - t1) s / ds", Some(1e-12), euclid_geodesics),
        c!("01.euclid.two_vector", Some(1), "twovector", "g=0: n_pq(t1,t2) = r_pq, T1 = t2, T2 = t1", Some(1e-12), euclid_two_vector),
        c!("01.euclid.parallelogram", Some(1), "twovector", "g=0: t1 (+) t2 = t1 + t2, t3 (-) t1 = t3 - t1", Some(1e-12), euclid_parallelogram),
        c!("02.hessian", Some(2), "tensors", "g_pq = (1/2) d2 K^2 / dR^p dR^q", Some(1e-6), hessian_check),
        c!("03.det_metric", Some(3), "tensors", "det g_pq = J^(2N) det r_ab", Some(1e-10), det_metric),
        c!("03.det_quasi", Some(3), "quasimap", "det n_rs = h^(2(1-N)) det r_ab", Some(1e-10), det_quasi),
        c!("04.cartan_algebraic", Some(4), "tensors", "C_pqr = (h_pq C_r + h_pr C_q + h_qr C_p - C_p C_q C_r / C_s C^s) / N", Some(1e-8), cartan_algebraic),
        c!("04.cartan_trace", Some(4), "tensors", "C_p C^p = N^2 g^2 / (4 K^2)", Some(1e-10), cartan_trace),
        c!("04.cartan_differences", None, "tensors", "C_pqr = (1/2) d g_pq / dR^r", Some(1e-6), cartan_differences),
        c!("05.curvature_form", Some(5), "tensors", "S_pqrs = S* (h_pr h_qs - h_ps h_qr) / K^2", Some(1e-8), curvature_form),
        c!("05.curvature_constant", Some(5), "tensors", "S* = -g^2/4; S_pqrs = 0 when N = 2", Some(1e-8), curvature_constant),
        c!("06.roundtrip", Some(6), "quasimap", "mu(sigma(R)) = R, sigma(mu(t)) = t", Some(1e-10), roundtrip),
        c!("06.norm_preservation", Some(6), "quasimap", "S(sigma(R)) = K(R)", Some(1e-12), norm_preservation),
        c!("06.sigma_determinant", Some(6), "quasimap", "det sigma^p_q = h^(N-1) J^N", Some(1e-10), sigma_det),
        c!("06.jacobians", None, "quasimap", "sigma Jacobian by differences; mu Jacobian inverts it", Some(1e-6), jacobians_fd),
        c!("06.metric_pullback", None, "quasimap", "g_pq = sigma^r_p sigma^s_q n_rs", None, metric_pullback),
        c!("07.christoffel_identities", Some(7), "quasimap", "t^p N_p^r_q = 0, N_p^s_s = 0", Some(1e-12), christoffel_identities),
        c!("07.curvature_differences", Some(7), "quasimap", "R_prqs closed form = derivatives of N plus quadratic terms, r-lowered", Some(1e-6), quasi_curvature),
        c!("07.conformal", Some(7), "quasimap", "k n^-1 k^T = f^2 r^pq", Some(1e-8), conformal),
        c!("08.endpoints", Some(8), "geodesics", "t(0) = t1, t(ds) = t2", Some(1e-10), geodesic_endpoints),
        c!("08.ode", Some(8), "geodesics", "t'' = (g^2/4)(a^2 - b^2) t / S^4", Some(1e-6), geodesic_ode),
        c!("08.unit_speed", Some(8), "geodesics", "n_pq u^p u^q = 1", Some(1e-8), geodesic_unit_speed),
        c!("08.radial_rate", Some(8), "geodesics", "t . t' = b + s", Some(1e-9), geodesic_radial_rate),
        c!("08.arc_length", Some(8), "geodesics", "integral of sqrt(n_pq dt^p dt^q) = ds", Some(1e-5), geodesic_arc_length),
        c!("08.velocity_differences", None, "geodesics", "t' matches differences of t(s)", Some(1e-6), geodesic_velocity_fd),
        c!("08.pair_invariants", None, "geodesics", "d-vector battery", None, pair_battery),
        c!("08.length_gradients", None, "geodesics", "b1, b2 = gradients of |t2 (-) t1|^2 / 2 and their products", Some(1e-6), length_gradient_check),
        c!("09.additivity", Some(9), "geodesics", "alpha(t1,t3) = alpha(t1,t2) + alpha(t2,t3) for coplanar ordered triples", Some(1e-10), angle_additivity),
        c!("09.scale_invariance", Some(9), "geodesics", "alpha(l1 t1, l2 t2) = alpha(t1, t2), in units of epsilon", Some(16.0), angle_scale),
        c!("09.fundamental_limit", Some(9), "geodesics", "(t1t1)(t2t2) sin(alpha) / (h |t1||t2| u) -> 1/h^2 at eps = 1e-4", Some(1e-3), fundamental_limit),
        c!("10.tensor_differences", Some(10), "twovector", "n_pq = d2 <t1,t2> / dt1^p dt2^q = -(1/2) d2 |t2 (-) t1|^2 / dt1^p dt2^q", Some(1e-5), two_vector_fd),
        c!("10.determinant", Some(10), "twovector", "det n_pq = (|t1||t2| sin(alpha)/u)^(N-2) h^-N det r", Some(1e-9), two_vector_det),
        c!("10.coincidence_monotone", Some(10), "twovector", "|n(t1,t2) - n(t)| decreases over eps = 1e-2, 1e-3, 1e-4 (largest ratio)", Some(1.0), coincidence_monotone),
        c!("10.derivative_sum_limit", Some(10), "twovector", "dn/dt1^s + dn/dt2^s -> dn(t)/dt^s at eps = 1e-4", Some(1e-4), coincidence_derivative),
        c!("10.frame_contractions", Some(10), "twovector", "frame contracted with t1, t2 on either index", Some(1e-9), frame_contraction_check),
        c!("10.frame_reconstruction", Some(10), "twovector", "n_pq(t1,t2) = sum_R f^R_p(t1,t2) f^R_q(t2,t1), radical frame", Some(1e-9), frame_reconstruction),
        c!("10.unrolled_frame_reconstruction", Some(10), "twovector", "n_pq(t1,t2) = sum_R f^R_p(t1,t2) f^R_q(t2,t1), bisector frame", Some(1e-9), unrolled_reconstruction),
        c!("10.swap_symmetry", None, "twovector", "n_pq(t1,t2) = n_qp(t2,t1)", None, two_vector_swap),
        c!("11.covector_closed_form", Some(11), "twovector", "T1 = n t2, T2 = t1 n, t1.T1 + t2.T2 = 2<t1,t2>", Some(1e-10), covector_closed),
        c!("11.product_battery", Some(11), "twovector", "(T1T1), (T2T2), (T1T2), wedge, D identities and the rotation relations", Some(1e-9), covector_products),
        c!("11.inversion_roundtrip", Some(11), "twovector", "t -> T -> t", Some(1e-8), covector_inversion),
        c!("11.co_angle_residual", Some(11), "twovector", "implicit cos(h alpha) equation at the solved angle", Some(1e-12), co_angle_residual),
        c!("11.co_angle_consistency", Some(11), "twovector", "solve_co_angle(T(t1,t2)) = alpha(t1,t2)", Some(1e-9), co_angle_consistency),
        c!("11.metric_recovery", Some(11), "twovector", "n_pq = dT1_p/dt2^q = dT2_q/dt1^p", Some(1e-5), covector_metric_recovery),
        c!("12.oplus_order", Some(12), "twovector", "|slope - 2| of first-order sum residuals over k = 1e-1, 1e-2, 1e-3", Some(0.2), oplus_order),
        c!("12.ominus_order", Some(12), "twovector", "|slope - 2| of ((t1 (+) t2) (-) t1) - t2 over the same k", Some(0.2), ominus_order),
        c!("12.ominus_identities", Some(12), "twovector", "(t3-t1, s) and (t1, s) identities, u(t3-t1,t3) = u(t1,t3)", Some(1e-10), ominus_identities),
        c!("12.refine", Some(12), "twovector", "refined sum solves the defining equations at g = 0.2", Some(1e-10), refine_check),
        c!("13.pullback_product", Some(13), "finslerops", "<R,S> = <sigma R, sigma S>, <R,R> = K^2", Some(1e-9), pullback_product),
        c!("13.finsler_limit", Some(13), "finslerops", "G_pq(R, R + eps v) -> g_pq(R), eps = 1e-4 relative", Some(1e-3), finsler_limit),
        c!("13.pullback_tensor", Some(13), "finslerops", "G_pq = sigma^r_p(R) sigma^s_q(S) n_rs", Some(1e-8), pullback_tensor),
        c!("13.m_orthogonality", Some(13), "finslerops", "M_p R^p = 0; simplified M = unsimplified M", Some(1e-12), m_orthogonality),
        c!("13.axis_angles", Some(13), "finslerops", "axis and plane angles equal alpha(R, e_N) and alpha(R, (R,0))", Some(1e-10), axis_angle_check),
        c!("13.product_gradients", None, "finslerops", "d<R,S>/dR, d<R,S>/dS closed forms", Some(1e-6), product_gradient_check),
        c!("13.tensor_differences", None, "finslerops", "G_pq = d2 <R,S> / dR^p dS^q", Some(1e-6), finsler_tensor_fd),
        c!("13.geodesic", None, "finslerops", "mu of the chord hits R1, R2; Finsler arc length = ds", None, finsler_geodesic_check),
        c!("90.scalar_identities", None, "core", "A^2 + h^2 q^2 = B, L^2 + h^2 Z^2 = B, Phi branches, |Z| V(w) = K, gZ parity", None, scalar_identities),
        c!("90.gradient_identity", None, "tensors", "R_p = g_pq R^q", None, gradient_identity),
    ]
}

/// Runs every check; `Err` only for an invalid configuration.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    let p = GParameter::new(config.g)?;
    if config.trials == 0 {
        return Err(GeometryError::InvalidMetric("trials must be at least 1".into()));
    }
    if !(config.tol > 0.0) {
        return Err(GeometryError::InvalidMetric("tolerance must be positive".into()));
    }
    let mut warnings = Vec::new();
    if config.g.abs() > 1.9 {
        warnings.push(format!("|g| = {} is close to 2; h = {:.3e} and derived quantities are ill-conditioned", config.g.abs(), p.h()));
    }
    let mut records = Vec::new();
    for (index, check) in checks().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index as u64);
        let mut env = Env { p, ctx: config.ctx.clone(), rng, trials: config.trials };
        let t = (check.run)(&mut env);
        let tolerance = check.tolerance.unwrap_or(config.tol);
        let passed = t.errors == 0 && t.samples > 0 && t.max < tolerance;
        records.push(CheckRecord {
            id: check.id.to_string(),
            criterion: check.criterion,
            module: check.module.to_string(),
            identity: check.identity.to_string(),
            samples: t.samples,
            skipped: t.skipped,
            errors: t.errors,
            max_residual: t.max,
            tolerance,
            passed,
        });
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let failed: Vec<String> = records.iter().filter(|r| !r.passed).map(|r| r.id.clone()).collect();
    Ok(VerifyReport {
        g: config.g,
        dim: config.ctx.dim(),
        seed: config.seed,
        trials: config.trials,
        tol: config.tol,
        constants: Constants {
            h: p.h(),
            big_g: p.big_g(),
            gamma: p.gamma(),
            curvature_constant: p.curvature_constant(),
            indicatrix_curvature: p.indicatrix_curvature(),
        },
        warnings,
        passed: failed.is_empty(),
        failed,
        checks: records,
    })
}

/// A reproducible positive definite `r_ab = A^T A / (N-1) + I/2` with `A` uniform in `[-1, 1]`.
pub fn seeded_metric(dim: usize, seed: u64) -> Result<MetricContext> {
    if dim < 2 {
        return Err(GeometryError::InvalidMetric(format!("dimension {dim} < 2")));
    }
    let n1 = dim - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n1, n1, |_, _| rng.gen_range(-1.0..=1.0));
    let r = a.transpose() * &a / n1 as f64 + DMatrix::identity(n1, n1) * 0.5;
    MetricContext::from_matrix(r)
}
