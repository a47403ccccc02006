//! Angle, scalar product and the two-vector metric tensor, with its coincidence limit.

use finsleroid::geodesics::{angle, scalar_product};
use finsleroid::twovector::{coincidence_limits, two_vector_metric};
use finsleroid::{GParameter, MetricContext, QuasiVector};

fn main() -> finsleroid::Result<()> {
    let p = GParameter::new(0.9)?;
    let ctx = MetricContext::identity(3)?;
    let t1 = QuasiVector::new(vec![1.0, 0.0, 0.5])?;
    let t2 = QuasiVector::new(vec![0.2, 0.9, -0.1])?;
    println!("alpha = {:.12}", angle(&p, &ctx, &t1, &t2)?);
    println!("<t1,t2> = {:.12}", scalar_product(&p, &ctx, &t1, &t2)?);
    let tv = two_vector_metric(&p, &ctx, &t1, &t2)?;
    println!("n_pq(t1,t2) =\n{:.9}", tv.n_lower);
    println!("det = {:.12} (closed form {:.12})", tv.n_lower.determinant(), tv.det);

    let dir = QuasiVector::new(vec![0.0, 1.0, 0.3])?;
    let report = coincidence_limits(&p, &ctx, &t1, &dir, &[1e-1, 1e-2, 1e-3, 1e-4])?;
    println!("{:>8} {:>12} {:>12}", "eps", "|n - n(t)|", "deriv sum");
    for row in &report.rows {
        println!("{:>8.0e} {:>12.3e} {:>12.3e}", row.epsilon, row.tensor_error, row.derivative_sum_error);
    }
    println!("monotone: {}", report.monotone);
    Ok(())
}
