//! Closed-form geodesic between two quasi-euclidean points, sampled with its invariants.

use finsleroid::geodesics::solve_chord;
use finsleroid::quasimap::quasi_metric_lower;
use finsleroid::{GParameter, MetricContext, QuasiVector};

fn main() -> finsleroid::Result<()> {
    let p = GParameter::new(1.0)?;
    let ctx = MetricContext::identity(3)?;
    let t1 = QuasiVector::new(vec![1.0, 0.2, 0.4])?;
    let t2 = QuasiVector::new(vec![-0.3, 1.1, 0.6])?;
    let chord = solve_chord(&p, &ctx, &t1, &t2)?;
    println!("a = {:.9}, b = {:.9}, alpha = {:.9}, delta_s = {:.9}", chord.a, chord.b, chord.alpha, chord.delta_s);
    println!("{:>8} {:>30} {:>12} {:>12}", "s", "t(s)", "n(u,u)", "t.t - law");
    for i in 0..=8 {
        let s = chord.delta_s * i as f64 / 8.0;
        let t = chord.point(s).t;
        let u = chord.velocity(s);
        let n = quasi_metric_lower(&p, &ctx, &t)?;
        let speed = (u.transpose() * n * &u)[(0, 0)];
        let tt = ctx.dot(t.as_vector(), t.as_vector());
        let law = chord.a * chord.a + 2.0 * chord.b * s + s * s;
        let v = t.as_vector();
        println!("{s:>8.4} [{:>8.5} {:>8.5} {:>8.5}] {speed:>12.9} {:>12.2e}", v[0], v[1], v[2], tt - law);
    }
    Ok(())
}
