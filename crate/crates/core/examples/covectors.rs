//! The covariant version: covectors of a pair, their products, inversion and the co-angle.

use finsleroid::geodesics::angle;
use finsleroid::twovector::{covector_pair, invert_covectors, solve_co_angle};
use finsleroid::{GParameter, MetricContext, QuasiVector};

fn main() -> finsleroid::Result<()> {
    let p = GParameter::new(0.7)?;
    let ctx = MetricContext::identity(3)?;
    let t1 = QuasiVector::new(vec![1.0, 0.3, 0.2])?;
    let t2 = QuasiVector::new(vec![0.1, 1.0, 0.5])?;
    let cp = covector_pair(&p, &ctx, &t1, &t2)?;
    println!("T1 = {:?}", cp.co1.as_slice());
    println!("T2 = {:?}", cp.co2.as_slice());
    let pr = cp.products;
    println!("(T1T1) = {:.9}, (T2T2) = {:.9}, (T1T2) = {:.9}, wedge = {:.9}", pr.t11, pr.t22, pr.t12, pr.wedge);

    let alpha = angle(&p, &ctx, &t1, &t2)?;
    let solved = solve_co_angle(&p, &ctx, &cp.co1, &cp.co2)?;
    println!("alpha = {alpha:.15}, from covectors = {:.15} ({} iterations)", solved.alpha, solved.iterations);
    let (b1, b2) = invert_covectors(&p, &ctx, &cp.co1, &cp.co2, solved.alpha)?;
    println!("inversion error: {:.3e}, {:.3e}", (b1.as_vector() - t1.as_vector()).amax(), (b2.as_vector() - t2.as_vector()).amax());
    Ok(())
}
