//! The quasi-euclidean map: round trip, norm preservation, Jacobian determinant and the
//! flattening of the quasi-euclidean metric.

use finsleroid::quasimap::{conformal_flatten, mu_map, quasi_metric, sigma_jacobian, sigma_map};
use finsleroid::scalars::scalar_bundle;
use finsleroid::{FinslerVector, GParameter, MetricContext};

fn main() -> finsleroid::Result<()> {
    let p = GParameter::new(-1.2)?;
    let ctx = MetricContext::identity(3)?;
    let r = FinslerVector::new(vec![0.5, 0.25, -0.75])?;
    let t = sigma_map(&p, &ctx, &r)?;
    let back = mu_map(&p, &ctx, &t)?;
    println!("R = {:?}", r.as_vector().as_slice());
    println!("t = sigma(R) = {:?}", t.as_vector().as_slice());
    println!("mu(t) - R = {:.3e}", (back.as_vector() - r.as_vector()).amax());

    let s = scalar_bundle(&p, &ctx, &r)?;
    println!("|t| = {:.15}, K(R) = {:.15}", ctx.norm(t.as_vector()), s.k);
    let det = sigma_jacobian(&p, &ctx, &r)?.determinant();
    println!("det sigma' = {:.15}, h^(N-1) J^N = {:.15}", det, p.h().powi(2) * s.j.powi(3));

    let geo = quasi_metric(&p, &ctx, &t)?;
    println!("n_pq =\n{:.6}", geo.n_lower);
    let img = conformal_flatten(&p, &ctx, &t)?;
    let c = &img.jacobian * &geo.n_upper * img.jacobian.transpose() / img.scale.powi(2);
    println!("k n^-1 k^T / f^2 =\n{:.12}", c);
    Ok(())
}
