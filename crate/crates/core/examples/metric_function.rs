//! The metric function and its scalar building blocks across the parameter range.

use finsleroid::scalars::scalar_bundle;
use finsleroid::{FinslerVector, GParameter, MetricContext};

fn main() -> finsleroid::Result<()> {
    let ctx = MetricContext::identity(3)?;
    let r = FinslerVector::new(vec![0.6, -0.8, 0.5])?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "g", "h", "B", "Phi", "J", "K");
    for g in [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5] {
        let p = GParameter::new(g)?;
        let s = scalar_bundle(&p, &ctx, &r)?;
        println!("{g:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", p.h(), s.b, s.phi, s.j, s.k);
    }
    // the euclidean length is recovered at g = 0
    println!("|R| = {:.6}", ctx.norm(r.as_vector()));
    Ok(())
}
