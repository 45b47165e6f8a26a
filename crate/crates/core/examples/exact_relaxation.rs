//! Exhaustive search against the continuous relaxation on a small random graph.
//!
//! cargo run --release --example exact_relaxation [n] [seed]

use std::sync::Arc;

use balcut::graph::Graph;
use balcut::objective::RatioObjective;
use balcut::oracle::{brute_force_optimum, verify_exact_relaxation};
use balcut::outer::SolverConfig;
use balcut::setfn::{BalanceFunction, Extension};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(n: usize, seed: u64) -> balcut::Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 1..n {
        // spanning tree first so the graph is connected
        edges.push((rng.random_range(0..i), i, rng.random_range(0.2..2.0)));
    }
    let tree = edges.clone();
    for i in 0..n {
        for j in i + 1..n {
            let in_tree = tree.iter().any(|&(a, b, _)| (a, b) == (i, j));
            if !in_tree && rng.random_bool(0.3) {
                edges.push((i, j, rng.random_range(0.2..2.0)));
            }
        }
    }
    Graph::from_edges(n, edges)
}

fn main() -> balcut::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let g = Arc::new(random_graph(n, seed)?);

    for b in [BalanceFunction::RatioCut, BalanceFunction::RatioCheeger] {
        let opt = brute_force_optimum(&g, &b)?;
        println!(
            "{}: optimum {:.6} at {} ({} subsets)",
            b.name(),
            opt.best_ratio,
            opt.best_set,
            opt.evaluated
        );
        let obj = RatioObjective::cut(g.clone(), Extension::lovasz(b))?;
        let rep = verify_exact_relaxation(&obj, &SolverConfig::default(), 1000, 20, seed)?;
        println!(
            "  min sampled F = {:.6}, solver best = {:.6}, hit rate {:.0}%",
            rep.min_sampled_value,
            rep.best_solver_ratio,
            100.0 * rep.optimal_fraction
        );
    }
    Ok(())
}
