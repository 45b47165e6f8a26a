//! Balanced graph cuts through their exact continuous relaxation.
//!
//! A balanced cut criterion `cut(A, Ā) / Ŝ(A)` is minimized over real
//! vectors as the ratio `TV(f) / S(f)` of the graph total variation and an
//! extension `S` of the balancing function, using RatioDCA-prox: an outer
//! descent loop on the ratio whose steps are convex problems solved by a
//! primal-dual method. Optimal thresholding turns any vector back into a
//! cut at least as good as its ratio.
//!
//! ```
//! use std::sync::Arc;
//! use balcut::graph::Graph;
//! use balcut::objective::RatioObjective;
//! use balcut::outer::{ratiodca_prox, SolverConfig};
//! use balcut::setfn::{BalanceFunction, Extension};
//!
//! let g = Arc::new(Graph::path(4));
//! let obj = RatioObjective::cut(g, Extension::lovasz(BalanceFunction::RatioCut)).unwrap();
//! let res = ratiodca_prox(&obj, &SolverConfig::default(), &[0.1, 0.4, -0.2, -0.3]).unwrap();
//! assert_eq!(res.best_set_ratio, 0.25);
//! ```

pub mod cli;
pub mod error;
pub mod graph;
pub mod inner;
pub mod objective;
pub mod oracle;
pub mod outer;
pub mod setfn;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
pub use objective::{Constraint, RatioObjective};
pub use outer::{ratiodca_prox, SolveResult, SolverConfig};
pub use setfn::{BalanceFunction, Extension, ExtensionKind};
