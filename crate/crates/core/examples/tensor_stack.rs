//! Metric, angular, Cartan and curvature tensors at one vector, with their identities.

use finsleroid::tensors::{curvature_closed_form, curvature_scalar, tensor_stack};
use finsleroid::scalars::metric_function;
use finsleroid::{FinslerVector, GParameter, MetricContext};

fn main() -> finsleroid::Result<()> {
    let p = GParameter::new(0.8)?;
    let ctx = MetricContext::diagonal(&[1.0, 2.0, 0.5])?;
    let r = FinslerVector::new(vec![0.3, -0.4, 0.9, 0.7])?;
    let stack = tensor_stack(&p, &ctx, &r)?;
    println!("g_pq =\n{:.6}", stack.g_lower);
    let j = finsleroid::scalars::scalar_bundle(&p, &ctx, &r)?.j;
    println!("det g = {:.12}, J^(2N) det r = {:.12}", stack.g_lower.determinant(), j.powi(8) * ctx.det_r());

    let k = metric_function(&p, &ctx, &r)?;
    let n = ctx.dim() as f64;
    println!("C_p C^p = {:.12}, N^2 g^2 / 4K^2 = {:.12}", stack.cartan.trace_square(), n * n * p.g().powi(2) / (4.0 * k * k));

    let closed = curvature_closed_form(&p, &ctx, &r)?;
    println!("curvature from Cartan vs closed form: {:.3e}", stack.curvature.max_abs_diff(&closed));
    println!("S* = {:.12} (expected {:.12})", curvature_scalar(&p, &ctx, &r, &stack.curvature)?, p.curvature_constant());
    println!("indicatrix curvature h^2 = {:.12}", p.indicatrix_curvature());
    Ok(())
}
