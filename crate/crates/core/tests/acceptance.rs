//! Acceptance suite: one PASS/FAIL line per criterion over the grid
//! g in {0, +-0.5, +-1, +-1.5}, N in {2, 3, 5}, identity and seeded positive definite metrics.
//! Tolerances live with each check in `finsleroid::verify`.

use std::collections::BTreeMap;
use std::process::Command;

use finsleroid::verify::{run_verify, seeded_metric, CheckRecord, VerifyConfig};
use finsleroid::MetricContext;

const GS: [f64; 7] = [0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5];
const DIMS: [usize; 3] = [2, 3, 5];
const SEED: u64 = 20240611;
const TRIALS: usize = 200;
const TOL: f64 = 1e-9;

/// Checks that fail by construction. The radical frame does not reconstruct the two-vector
/// tensor for g != 0; the bisector frame in the same criterion does.
const KNOWN_FAILURES: [&str; 1] = ["10.frame_reconstruction"];

const TITLES: [&str; 14] = [
    "euclidean degeneration",
    "hessian consistency",
    "determinant identities",
    "cartan structure",
    "curvature constants",
    "diffeomorphism",
    "quasi-euclidean geometry",
    "geodesics",
    "angle",
    "two-vector tensor",
    "covariant version",
    "parallelogram law",
    "pullback coherence",
    "cli determinism",
];

struct Run {
    label: String,
    checks: Vec<CheckRecord>,
}

fn grid() -> Vec<(f64, usize, bool)> {
    let mut out = Vec::new();
    for &g in &GS {
        for &n in &DIMS {
            for spd in [false, true] {
                out.push((g, n, spd));
            }
        }
    }
    out
}

fn run_grid() -> Vec<Run> {
    let jobs = grid();
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(g, n, spd)| {
                scope.spawn(move || {
                    let ctx = if spd { seeded_metric(n, SEED + n as u64).unwrap() } else { MetricContext::identity(n).unwrap() };
                    let config = VerifyConfig { g, ctx, seed: SEED, trials: TRIALS, tol: TOL };
                    let report = run_verify(&config).unwrap();
                    let label = format!("g={g:+} N={n} {}", if spd { "spd" } else { "identity" });
                    Run { label, checks: report.checks }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

/// Worst residual relative to its tolerance, with the check and configuration that produced it.
#[derive(Default)]
struct Summary {
    failures: Vec<String>,
    worst: Option<(f64, String)>,
    samples: usize,
    skipped: usize,
}

fn determinism() -> (bool, String) {
    let bin = env!("CARGO_BIN_EXE_finsleroid");
    let args = ["verify", "--g", "1.0", "--dim", "3", "--seed", "42", "--trials", "50", "--format", "json"];
    let first = Command::new(bin).args(args).output().unwrap();
    let second = Command::new(bin).args(args).output().unwrap();
    let same = first.stdout == second.stdout && first.status.code() == second.status.code();
    let detail = format!("{} bytes, exit codes {:?}/{:?}", first.stdout.len(), first.status.code(), second.status.code());
    (same && !first.stdout.is_empty(), detail)
}

#[test]
fn acceptance() {
    let runs = run_grid();
    let mut by_criterion: BTreeMap<u8, Summary> = BTreeMap::new();
    let mut unexpected = Vec::new();
    for run in &runs {
        for c in &run.checks {
            let Some(k) = c.criterion else {
                if !c.passed {
                    unexpected.push(format!("{} [{}]", c.id, run.label));
                }
                continue;
            };
            let s = by_criterion.entry(k).or_default();
            s.samples += c.samples;
            s.skipped += c.skipped;
            let ratio = c.max_residual / c.tolerance;
            if s.worst.as_ref().map_or(true, |(w, _)| ratio > *w) {
                s.worst = Some((ratio, format!("{} [{}] {:.3e} / {:.1e}", c.id, run.label, c.max_residual, c.tolerance)));
            }
            if !c.passed {
                let line = format!("{} [{}] {:.3e} / {:.1e}", c.id, run.label, c.max_residual, c.tolerance);
                if !KNOWN_FAILURES.contains(&c.id.as_str()) {
                    unexpected.push(line.clone());
                }
                s.failures.push(line);
            }
        }
    }

    println!();
    for (k, title) in TITLES.iter().enumerate() {
        let k = k as u8 + 1;
        if k == 14 {
            let (ok, detail) = determinism();
            println!("criterion {k:02} {:<4} {title}: two verify runs byte-identical ({detail})", if ok { "PASS" } else { "FAIL" });
            if !ok {
                unexpected.push("14.determinism".into());
            }
            continue;
        }
        let s = &by_criterion[&k];
        let status = if s.failures.is_empty() { "PASS" } else { "FAIL" };
        let worst = s.worst.as_ref().map(|(_, w)| w.as_str()).unwrap_or("-");
        println!(
            "criterion {k:02} {status:<4} {title}: {} samples, {} skipped, worst {worst}",
            s.samples, s.skipped
        );
        let mut ids: Vec<&str> = s.failures.iter().map(|f| f.split(' ').next().unwrap()).collect();
        ids.dedup();
        for id in ids {
            let count = s.failures.iter().filter(|f| f.starts_with(id)).count();
            let known = if KNOWN_FAILURES.contains(&id) { " (known)" } else { "" };
            println!("             failing: {id} in {count}/{} configurations{known}", runs.len());
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures:\n{}", unexpected.join("\n"));
}
