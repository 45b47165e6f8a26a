//! Effect of the proximal weight on solution quality and iteration count.
//!
//! cargo run --release --example prox_sweep

use std::sync::Arc;

use balcut::graph::two_moons_graph;
use balcut::objective::{Constraint, RatioObjective};
use balcut::outer::{initial_pool, run_pool, SolverConfig};
use balcut::setfn::{BalanceFunction, Extension};

fn main() -> balcut::Result<()> {
    let (g, _) = two_moons_graph(300, 8, None, 0.25, 5)?;
    let obj = RatioObjective::cut(
        Arc::new(g),
        Extension::lovasz(BalanceFunction::RatioCheeger),
    )?;
    let pool = initial_pool(&obj, Constraint::L2, 8, false, 11)?;

    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>6}",
        "c", "avg", "top10", "best", "steps"
    );
    for c in [0.0, 0.5, 1.0, 2.0, 4.0] {
        // c^k = λ^k c: the regularization follows the current ratio
        let cfg = SolverConfig::with_relative_prox(c);
        let rep = run_pool(&obj, &cfg, &pool)?;
        let steps: usize = rep.runs.iter().map(|r| r.outer_iterations).sum();
        println!(
            "{c:>5} {:>10.6} {:>10.6} {:>10.6} {:>6}",
            rep.avg, rep.top10_avg, rep.best, steps
        );
    }
    Ok(())
}
