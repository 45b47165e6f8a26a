//! Cut-monotone iterations: the thresholded ratio never increases and the
//! run stops after finitely many steps.
//!
//! cargo run --release --example cut_monotone

use std::sync::Arc;

use balcut::graph::TwoMoons;
use balcut::objective::RatioObjective;
use balcut::outer::{initial_pool, ratiodca_prox, Mode, SolverConfig};
use balcut::setfn::{BalanceFunction, Extension};

fn main() -> balcut::Result<()> {
    let (g, _) = TwoMoons::new(200, 8, 3).build()?;
    let obj = RatioObjective::cut(
        Arc::new(g),
        Extension::lovasz(BalanceFunction::RatioCheeger),
    )?;
    let cfg = SolverConfig {
        mode: Mode::CutMonotone,
        ..SolverConfig::default()
    };
    let pool = initial_pool(&obj, cfg.constraint, 3, false, 4)?;
    for (i, f0) in pool.vectors.iter().enumerate() {
        let res = ratiodca_prox(&obj, &cfg, f0)?;
        let trace: Vec<String> = res
            .trace
            .iter()
            .map(|t| {
                let mark = if t.indicator_step { "*" } else { "" };
                format!("{:.5}{mark}", t.threshold_ratio)
            })
            .collect();
        println!("start {i}: {} ({:?})", trace.join(" "), res.termination);
    }
    println!("* marks a jump to the best threshold set");
    Ok(())
}
