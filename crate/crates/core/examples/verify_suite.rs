//! Runs the seeded verification suite and prints one line per check.

use finsleroid::verify::{run_verify, seeded_metric, VerifyConfig};
use finsleroid::MetricContext;

fn main() -> finsleroid::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let g = args.first().copied().unwrap_or(0.7);
    let dim = args.get(1).map(|d| *d as usize).unwrap_or(3);
    let ctx = if std::env::args().any(|a| a == "spd") { seeded_metric(dim, 11)? } else { MetricContext::identity(dim)? };
    let config = VerifyConfig { g, ctx, seed: 7, trials: 200, tol: 1e-8 };
    let report = run_verify(&config)?;
    for c in &report.checks {
        println!(
            "{:<5} {:<34} n={:<3} skip={:<3} err={:<3} max={:<10.3e} tol={:<8.1e}",
            if c.passed { "ok" } else { "FAIL" },
            c.id,
            c.samples,
            c.skipped,
            c.errors,
            c.max_residual,
            c.tolerance
        );
    }
    println!("failed: {:?}", report.failed);
    Ok(())
}
