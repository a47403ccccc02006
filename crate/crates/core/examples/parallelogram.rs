//! Sum and difference of vectors under the parallelogram law: first order and refined.

use finsleroid::twovector::{convenient_residuals, ominus_first_order, oplus_first_order, parallelogram_refine};
use finsleroid::{GParameter, MetricContext, QuasiVector};

fn main() -> finsleroid::Result<()> {
    let ctx = MetricContext::identity(3)?;
    let t1 = QuasiVector::new(vec![1.0, 0.2, 0.1])?;
    let t2 = QuasiVector::new(vec![0.3, 0.9, 0.2])?;
    println!("{:>6} {:>12} {:>12}", "k", "residual", "difference");
    for k in [1e-1, 1e-2, 1e-3] {
        let h = 1.0 / (1.0 + k);
        let p = GParameter::new(2.0 * (1.0f64 - h * h).sqrt())?;
        let t3 = oplus_first_order(&p, &ctx, &t1, &t2)?;
        let (a, b) = convenient_residuals(&p, &ctx, &t1, &t2, &t3)?;
        let back = ominus_first_order(&p, &ctx, &t1, &t3)?;
        println!("{k:>6.0e} {:>12.3e} {:>12.3e}", a.abs().max(b.abs()), (back.as_vector() - t2.as_vector()).amax());
    }
    let p = GParameter::new(0.2)?;
    let refined = parallelogram_refine(&p, &ctx, &t1, &t2)?;
    println!("refined sum {:?} after {} iterations, residual {:.3e}", refined.sum.as_vector().as_slice(), refined.iterations, refined.residual);
    Ok(())
}
