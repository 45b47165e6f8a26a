//! One convex inner problem solved directly, with its dual certificate.
//!
//! cargo run --example inner_problem

use balcut::graph::Graph;
use balcut::inner::{InnerProblem, InnerSolver};

fn main() -> balcut::Result<()> {
    let g = Graph::path(3);
    // min_{|u| <= 1} TV(u) - <u, v>: a descent exists only for strong enough v
    for strength in [0.4, 0.5, 0.8, 1.2] {
        let v = vec![-strength, 0.0, strength];
        let p = InnerProblem::new(&g, v, 0.0)?;
        let mut solver = InnerSolver::new(&g);
        match solver.solve(&p, 1e-10, 100_000) {
            Ok(sol) => println!(
                "v = ±{strength}: descent Φ = {:.6} at u = {:.4?} ({} iterations)",
                sol.phi, sol.u, sol.iterations
            ),
            Err(e) => println!(
                "v = ±{strength}: no descent, lower bound {:.2e}, certified {}",
                e.best.lower_bound, e.certified
            ),
        }
    }
    Ok(())
}
