//! A user-supplied balancing function: the normalized cut
//! cut(A) / min(vol(A), vol(Ā)).
//!
//! cargo run --release --example custom_balance

use std::sync::Arc;

use balcut::graph::{Graph, VertexSet};
use balcut::objective::RatioObjective;
use balcut::oracle::brute_force_optimum;
use balcut::outer::{multi_init_run, SolverConfig};
use balcut::setfn::{BalanceFunction, Extension};

fn main() -> balcut::Result<()> {
    // a dense cluster, a sparse tail and one bridge
    let mut edges = vec![
        (5, 6, 0.3),
        (6, 7, 1.0),
        (7, 8, 1.0),
        (8, 9, 1.0),
        (9, 6, 1.0),
    ];
    for i in 0..6 {
        for j in i + 1..6 {
            edges.push((i, j, 1.0));
        }
    }
    let g = Arc::new(Graph::from_edges(10, edges)?);

    let degrees: Vec<f64> = (0..g.n()).map(|i| g.weighted_degree(i)).collect();
    let total: f64 = degrees.iter().sum();
    // min of a modular function and its complement: concave of modular, so submodular
    let vol = BalanceFunction::custom("min-volume", true, move |a: &VertexSet| {
        let v: f64 = a.members().iter().map(|&i| degrees[i]).sum();
        v.min(total - v)
    });

    let opt = brute_force_optimum(&g, &vol)?;
    println!(
        "exhaustive: {} with ratio {:.6}",
        opt.best_set, opt.best_ratio
    );

    let obj = RatioObjective::cut(g, Extension::lovasz(vol))?;
    let rep = multi_init_run(&obj, &SolverConfig::default(), 10, true)?;
    println!("RatioDCA-prox: {} with ratio {:.6}", rep.best_set, rep.best);
    Ok(())
}
