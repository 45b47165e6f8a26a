//! Starts from the spectral cut and asks RatioDCA-prox to improve it.
//!
//! cargo run --release --example improve_spectral

use std::sync::Arc;

use balcut::graph::two_moons_graph;
use balcut::objective::RatioObjective;
use balcut::outer::{improve_partition, optimal_threshold, SolverConfig};
use balcut::setfn::{BalanceFunction, Extension};
use balcut::spectral::second_eigenvector;

fn main() -> balcut::Result<()> {
    // noisy moons, where the spectral cut is not locally optimal
    let (g, _) = two_moons_graph(300, 8, None, 0.25, 5)?;
    let g = Arc::new(g);
    let b = BalanceFunction::RatioCheeger;

    let fiedler = second_eigenvector(&g, 1e-8, 1_000_000)?;
    let (spectral, ratio) = optimal_threshold(&g, &b, &fiedler)?;
    println!("spectral cut: |A| = {}, ratio {ratio:.6}", spectral.len());

    let obj = RatioObjective::cut(g, Extension::lovasz(b))?;
    let imp = improve_partition(&obj, &SolverConfig::default(), &spectral)?;
    println!(
        "{:?}: |A| = {}, ratio {:.6} -> {:.6}",
        imp.outcome,
        imp.set.len(),
        imp.initial_ratio,
        imp.ratio
    );
    Ok(())
}
