//! Orthonormal frames of the two-vector tensor: the radical frame and the bisector frame.

use finsleroid::twovector::{frame, frame_contractions, reconstruct, two_vector_metric, unrolled_frame};
use finsleroid::{GParameter, MetricContext, QuasiVector};

fn main() -> finsleroid::Result<()> {
    let ctx = MetricContext::identity(3)?;
    let t1 = QuasiVector::new(vec![1.0, 0.1, 0.3])?;
    let t2 = QuasiVector::new(vec![0.4, 0.8, 0.2])?;
    for g in [0.0, 0.5, 1.0, -1.5] {
        let p = GParameter::new(g)?;
        let n = two_vector_metric(&p, &ctx, &t1, &t2)?.n_lower;
        let radical = reconstruct(&frame(&p, &ctx, &t1, &t2)?, &frame(&p, &ctx, &t2, &t1)?);
        let bisector = reconstruct(&unrolled_frame(&p, &ctx, &t1, &t2)?, &unrolled_frame(&p, &ctx, &t2, &t1)?);
        println!(
            "g = {g:>5}: radical frame residual {:.3e}, bisector frame residual {:.3e}",
            (radical - &n).amax(),
            (bisector - &n).amax()
        );
    }
    let p = GParameter::new(0.5)?;
    let f = frame(&p, &ctx, &t1, &t2)?;
    let c = frame_contractions(&p, &ctx, &t1, &t2)?;
    println!("f t1 = {:?}", (&f * t1.as_vector()).as_slice());
    println!("closed form = {:?}", c.on_t1.as_slice());
    Ok(())
}
