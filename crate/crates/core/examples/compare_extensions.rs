//! Lovász extension against the median extension of the Cheeger balance,
//! from identical starting vectors.
//!
//! cargo run --release --example compare_extensions [n]

use balcut::cli::{cmd_compare_extensions, BalanceArg, ExperimentSpec, GraphSource, OutFormat};

fn main() -> balcut::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(300);
    let mut spec = ExperimentSpec::new(GraphSource::TwoMoons { n, k: 10, seed: 1 });
    spec.balance = BalanceArg::Cheeger;
    spec.random_inits = 6;
    spec.spectral = true;
    let report = cmd_compare_extensions(&spec)?;
    println!(
        "Lovász better on {}, equal on {}, worse on {} of {} starts",
        report.better, report.equal, report.worse, report.inits
    );
    println!(
        "best Lovász {:.6}, best median {:.6}",
        report.best_lovasz, report.best_other
    );
    print!("{}", report.render(OutFormat::Csv)?);
    Ok(())
}
