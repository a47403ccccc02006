use finsleroid::geodesics::{angle, scalar_product, solve_chord};
use finsleroid::quasimap::{mu_map, sigma_map};
use finsleroid::scalars::metric_function;
use finsleroid::tensors::{gradient_covector, metric_tensor};
use finsleroid::twovector::{covector_pair, two_vector_metric};
use finsleroid::{FinslerVector, GParameter, MetricContext, QuasiVector};
use nalgebra::DVector;
use proptest::prelude::*;

fn param() -> impl Strategy<Value = f64> {
    -1.8f64..1.8
}

fn components(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n).prop_filter("away from zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.01)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn transverse(x: &[f64], y: &[f64]) -> bool {
    let ctx = MetricContext::identity(x.len()).unwrap();
    let (a, b) = (DVector::from_column_slice(x), DVector::from_column_slice(y));
    ctx.wedge_and_dot(&a, &b).0 > 0.05 * a.norm() * b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_function_is_positively_homogeneous(g in param(), r in components(3), lambda in 0.01f64..100.0) {
        let (p, ctx) = (GParameter::new(g).unwrap(), MetricContext::identity(3).unwrap());
        let k = metric_function(&p, &ctx, &FinslerVector::new(r.clone()).unwrap()).unwrap();
        let scaled = FinslerVector::new(r.iter().map(|x| x * lambda).collect()).unwrap();
        prop_assert!(k > 0.0);
        prop_assert!(close(metric_function(&p, &ctx, &scaled).unwrap(), lambda * k, 1e-13));
    }

    #[test]
    fn parameter_sign_mirrors_the_axis(g in param(), r in components(4)) {
        let ctx = MetricContext::identity(4).unwrap();
        let mut mirrored = r.clone();
        mirrored[3] = -mirrored[3];
        let k = metric_function(&GParameter::new(g).unwrap(), &ctx, &FinslerVector::new(r).unwrap()).unwrap();
        let m = metric_function(&GParameter::new(-g).unwrap(), &ctx, &FinslerVector::new(mirrored).unwrap()).unwrap();
        prop_assert!(close(k, m, 1e-14));
    }

    #[test]
    fn metric_tensor_is_positive_definite_and_reproduces_the_gradient(g in param(), r in components(3)) {
        let (p, ctx) = (GParameter::new(g).unwrap(), MetricContext::identity(3).unwrap());
        let rv = FinslerVector::new(r).unwrap();
        let m = metric_tensor(&p, &ctx, &rv).unwrap();
        prop_assert!(m.clone().cholesky().is_some());
        let lowered = &m * rv.as_vector();
        let grad = gradient_covector(&p, &ctx, &rv).unwrap();
        prop_assert!((lowered - &grad).amax() <= 1e-12 * (1.0 + grad.amax()));
    }

    #[test]
    fn sigma_and_mu_are_inverse(g in param(), r in components(3)) {
        let (p, ctx) = (GParameter::new(g).unwrap(), MetricContext::identity(3).unwrap());
        let rv = FinslerVector::new(r).unwrap();
        let back = mu_map(&p, &ctx, &sigma_map(&p, &ctx, &rv).unwrap()).unwrap();
        prop_assert!((back.as_vector() - rv.as_vector()).amax() <= 1e-12 * (1.0 + rv.as_vector().amax()));
    }

    #[test]
    fn angle_is_symmetric_and_bounded(g in param(), a in components(3), b in components(3)) {
        prop_assume!(transverse(&a, &b));
        let (p, ctx) = (GParameter::new(g).unwrap(), MetricContext::identity(3).unwrap());
        let (t1, t2) = (QuasiVector::new(a).unwrap(), QuasiVector::new(b).unwrap());
        let x = angle(&p, &ctx, &t1, &t2).unwrap();
        prop_assert!(close(x, angle(&p, &ctx, &t2, &t1).unwrap(), 1e-14));
        prop_assert!(x > 0.0 && x <= std::f64::consts::PI / p.h() + 1e-12);
        prop_assert!(close(scalar_product(&p, &ctx, &t1, &t2).unwrap(), scalar_product(&p, &ctx, &t2, &t1).unwrap(), 1e-14));
    }

    #[test]
    fn two_vector_tensor_transposes_under_swap(g in param(), a in components(4), b in components(4)) {
        prop_assume!(transverse(&a, &b));
        let (p, ctx) = (GParameter::new(g).unwrap(), MetricContext::identity(4).unwrap());
        let (t1, t2) = (QuasiVector::new(a).unwrap(), QuasiVector::new(b).unwrap());
        let n12 = two_vector_metric(&p, &ctx, &t1, &t2).unwrap().n_lower;
        let n21 = two_vector_metric(&p, &ctx, &t2, &t1).unwrap().n_lower;
        prop_assert!((n12 - n21.transpose()).amax() <= 1e-12 * (1.0 + n21.amax()));
    }

    #[test]
    fn covectors_satisfy_the_euler_relation(g in param(), a in components(3), b in components(3)) {
        prop_assume!(transverse(&a, &b));
        let (p, ctx) = (GParameter::new(g).unwrap(), MetricContext::identity(3).unwrap());
        let (t1, t2) = (QuasiVector::new(a).unwrap(), QuasiVector::new(b).unwrap());
        let cp = covector_pair(&p, &ctx, &t1, &t2).unwrap();
        let lhs = t1.as_vector().dot(&cp.co1) + t2.as_vector().dot(&cp.co2);
        prop_assert!(close(lhs, 2.0 * scalar_product(&p, &ctx, &t1, &t2).unwrap(), 1e-12));
    }

    #[test]
    fn chords_hit_their_endpoints(g in param(), a in components(3), b in components(3)) {
        prop_assume!(transverse(&a, &b));
        let (p, ctx) = (GParameter::new(g).unwrap(), MetricContext::identity(3).unwrap());
        let (t1, t2) = (QuasiVector::new(a).unwrap(), QuasiVector::new(b).unwrap());
        prop_assume!(angle(&p, &ctx, &t1, &t2).unwrap() < std::f64::consts::PI - 0.05);
        let chord = solve_chord(&p, &ctx, &t1, &t2).unwrap();
        let end = chord.point(chord.delta_s).t;
        prop_assert!((end.as_vector() - t2.as_vector()).amax() <= 1e-11 * (1.0 + t2.as_vector().amax()));
        prop_assert!(chord.delta_s > 0.0);
    }
}
