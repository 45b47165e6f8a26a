//! Ratio Cheeger cut of a two-moons k-NN graph from several starts.
//!
//! cargo run --release --example two_moons_cheeger [n] [random_starts]

use std::sync::Arc;

use balcut::graph::TwoMoons;
use balcut::objective::RatioObjective;
use balcut::outer::{multi_init_run, SolverConfig};
use balcut::setfn::{BalanceFunction, Extension};

fn main() -> balcut::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);
    let starts: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);

    let (g, labels) = TwoMoons::new(n, 10, 1).build()?;
    println!("two moons: {} vertices, {} edges", g.n(), g.edge_count());
    let obj = RatioObjective::cut(
        Arc::new(g),
        Extension::lovasz(BalanceFunction::RatioCheeger),
    )?;
    let cfg = SolverConfig {
        seed: 1,
        ..SolverConfig::default()
    };
    let report = multi_init_run(&obj, &cfg, starts, true)?;
    for run in &report.runs {
        println!(
            "run {:2} ({:?}): ratio {:.6} after {} steps, {:?}",
            run.index, run.init, run.best_ratio, run.outer_iterations, run.termination
        );
    }

    let agree = labels
        .iter()
        .enumerate()
        .filter(|(i, &l)| report.best_set.contains(*i) == (l == 0))
        .count();
    let accuracy = agree.max(n - agree) as f64 / n as f64;
    println!(
        "best {:.6}, moon recovery {:.1}%",
        report.best,
        100.0 * accuracy
    );
    Ok(())
}
