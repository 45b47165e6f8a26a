//! Reads a METIS graph, scores a few sets and thresholds a vector.
//!
//! cargo run --example parse_and_cut

use std::io::Cursor;

use balcut::graph::{parse_graph, GraphFormat, VertexSet};
use balcut::outer::{optimal_threshold, set_ratio};
use balcut::setfn::BalanceFunction;

// Two triangles joined by a light edge (vertex ids are 1-based in METIS).
const METIS: &str = "\
% two triangles
6 7 1
2 1 3 1
1 1 3 1 4 0.2
1 1 2 1
2 0.2 5 1 6 1
4 1 6 1
4 1 5 1
";

fn main() -> balcut::Result<()> {
    let g = parse_graph(Cursor::new(METIS), GraphFormat::Metis)?;
    println!("{} vertices, {} edges", g.n(), g.edge_count());

    let b = BalanceFunction::RatioCheeger;
    for members in [vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 3]] {
        let a = VertexSet::from_members(g.n(), members);
        println!(
            "A = {a}: cut {:.2}, ratio {:.4}",
            g.cut_value(&a)?,
            set_ratio(&g, &b, &a)?
        );
    }

    let f = [0.9, 0.7, 0.8, -0.1, -0.6, -0.5];
    println!("TV(f) = {:.3}", g.total_variation(&f)?);
    let (best, ratio) = optimal_threshold(&g, &b, &f)?;
    println!("best threshold set {best} with ratio {ratio:.4}");
    Ok(())
}
