//! Exhaustive ground truth for small graphs, and numerical checks of
//! subgradient oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::objective::{dot, Functional, RatioObjective};
use crate::outer::{optimal_threshold, ratiodca_prox, SolverConfig};
use crate::setfn::BalanceFunction;

/// Largest graph the exhaustive search accepts.
pub const MAX_ORACLE_N: usize = 24;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_set: VertexSet,
    pub best_ratio: f64,
    /// Number of subsets scored: `2^(n-1) - 1`.
    pub evaluated: u64,
}

/// Exact `min_A cut(A, Ā) / Ŝ(A)` over nonempty proper subsets.
///
/// Only sets avoiding the last vertex are enumerated (the ratio is
/// symmetric under complement). Set `A` is encoded by the bitmask of its
/// members; ties go to the smallest encoding. Every subset is scored from
/// scratch, so the result does not depend on the enumeration order.
pub fn brute_force_optimum(g: &Graph, b: &BalanceFunction) -> Result<OracleResult> {
    brute_force_optimum_with_limit(g, b, MAX_ORACLE_N)
}

/// As [`brute_force_optimum`] with a size guard of `limit <= 24`.
pub fn brute_force_optimum_with_limit(
    g: &Graph,
    b: &BalanceFunction,
    limit: usize,
) -> Result<OracleResult> {
    let n = g.n();
    let limit = limit.min(MAX_ORACLE_N);
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(
            "a cut needs at least two vertices".into(),
        ));
    }
    let total: u64 = 1 << (n - 1);
    let edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();

    let score = |mask: u64| -> Option<f64> {
        let size = mask.count_ones() as usize;
        let balance = match b.value_by_size(n, size) {
            Some(s) => s,
            None => b.value_unchecked(&VertexSet::from_bits(n, mask)),
        };
        if !(balance > 0.0) {
            return None;
        }
        let cut: f64 = edges
            .iter()
            .filter(|(u, v, _)| ((mask >> u) ^ (mask >> v)) & 1 == 1)
            .map(|(_, _, w)| w)
            .sum();
        Some(cut / balance)
    };
    let better = |a: (f64, u64), b: (f64, u64)| -> (f64, u64) {
        match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
            std::cmp::Ordering::Greater => b,
            _ => a,
        }
    };

    let chunks = total.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .filter_map(|c| {
            let lo = (c * CHUNK).max(1);
            let hi = ((c + 1) * CHUNK).min(total);
            (lo..hi)
                .filter_map(|m| score(m).map(|r| (r, m)))
                .reduce(better)
        })
        .reduce_with(better);

    let (best_ratio, mask) =
        best.ok_or_else(|| Error::Degenerate("Ŝ vanishes on every nonempty proper subset".into()))?;
    Ok(OracleResult {
        best_set: VertexSet::from_bits(n, mask),
        best_ratio,
        evaluated: total - 1,
    })
}

/// Largest violation of the subgradient inequality
/// `A(f + t d) >= A(f) + t <s(f), d>` over `trials` random directions and
/// `t ∈ {1e-3, 1e-2, 1e-1}`. Nonpositive (up to rounding) for a valid
/// subgradient oracle of a convex functional.
pub fn directional_derivative_check(a: &dyn Functional, f: &[f64], trials: usize) -> f64 {
    directional_derivative_check_seeded(a, f, trials, 0x5eed)
}

pub fn directional_derivative_check_seeded(
    a: &dyn Functional,
    f: &[f64],
    trials: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = a.subgradient(f);
    let base = a.value(f);
    let mut worst = f64::NEG_INFINITY;
    let mut moved = vec![0.0; f.len()];
    for _ in 0..trials {
        let d: Vec<f64> = (0..f.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let slope = dot(&s, &d);
        for t in [1e-3, 1e-2, 1e-1] {
            for ((m, x), di) in moved.iter_mut().zip(f).zip(&d) {
                *m = x + t * di;
            }
            worst = worst.max(t * slope - (a.value(&moved) - base));
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationReport {
    pub optimum: OracleResult,
    pub samples: usize,
    /// Smallest `F(f)` over the random samples.
    pub min_sampled_value: f64,
    /// Largest `threshold ratio - F(f)` over the samples (nonpositive).
    pub max_threshold_excess: f64,
    pub solver_runs: usize,
    /// Smallest thresholded ratio among solver outputs.
    pub best_solver_ratio: f64,
    /// Fraction of solver runs whose thresholded ratio equals the optimum.
    pub optimal_fraction: f64,
}

fn ratio_tol(x: f64) -> f64 {
    1e-10 * (1.0 + x.abs())
}

/// Checks the exactness of the continuous relaxation against the
/// exhaustive optimum: every random sample and every solver output must
/// satisfy `optimum <= threshold ratio <= F(f)`. Any violation is an
/// [`Error::Relaxation`].
pub fn verify_exact_relaxation(
    obj: &RatioObjective,
    cfg: &SolverConfig,
    samples: usize,
    solver_runs: usize,
    seed: u64,
) -> Result<RelaxationReport> {
    let g = obj.graph();
    let b = obj.s1().base();
    let optimum = brute_force_optimum(g, b)?;
    let opt = optimum.best_ratio;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let check = |f: &[f64]| -> Result<Option<(f64, f64)>> {
        if obj.is_degenerate(f)? {
            return Ok(None);
        }
        let value = obj.ratio_value(f)?;
        let (_, ratio) = optimal_threshold(g, b, f)?;
        if ratio > value + ratio_tol(value) {
            return Err(Error::Relaxation(format!(
                "threshold ratio {ratio} exceeds F(f) = {value}"
            )));
        }
        if ratio < opt - ratio_tol(opt) || value < opt - ratio_tol(opt) {
            return Err(Error::Relaxation(format!(
                "F(f) = {value} / threshold ratio {ratio} below the optimum {opt}"
            )));
        }
        Ok(Some((value, ratio)))
    };

    let mut min_sampled_value = f64::INFINITY;
    let mut max_threshold_excess = f64::NEG_INFINITY;
    let mut counted = 0;
    for _ in 0..samples {
        let f: Vec<f64> = (0..g.n()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if let Some((value, ratio)) = check(&f)? {
            counted += 1;
            min_sampled_value = min_sampled_value.min(value);
            max_threshold_excess = max_threshold_excess.max(ratio - value);
        }
    }

    let mut best_solver_ratio = f64::INFINITY;
    let mut hits = 0;
    for i in 0..solver_runs {
        let f0 =
            crate::outer::random_init(obj, cfg.constraint, &mut crate::outer::run_rng(seed, i))?;
        let res = ratiodca_prox(obj, cfg, &f0)?;
        check(&res.f_star)?;
        let r = res.best_set_ratio;
        if r < opt - ratio_tol(opt) {
            return Err(Error::Relaxation(format!(
                "solver cut ratio {r} below the optimum {opt}"
            )));
        }
        best_solver_ratio = best_solver_ratio.min(r);
        if r <= opt + ratio_tol(opt) {
            hits += 1;
        }
    }

    Ok(RelaxationReport {
        optimum,
        samples: counted,
        min_sampled_value,
        max_threshold_excess,
        solver_runs,
        best_solver_ratio,
        optimal_fraction: if solver_runs == 0 {
            0.0
        } else {
            hits as f64 / solver_runs as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::TotalVariation;
    use crate::setfn::Extension;
    use std::sync::Arc;

    #[test]
    fn small_optima() {
        let p3 = Graph::path(3);
        let r = brute_force_optimum(&p3, &BalanceFunction::RatioCut).unwrap();
        assert_eq!(r.best_ratio, 0.5);
        assert_eq!(r.best_set, VertexSet::from_members(3, [0]));
        assert_eq!(r.evaluated, 3);
        let r = brute_force_optimum(&p3, &BalanceFunction::RatioCheeger).unwrap();
        assert_eq!(r.best_ratio, 1.0);
        let r = brute_force_optimum(&Graph::complete(3), &BalanceFunction::RatioCut).unwrap();
        assert_eq!(r.best_ratio, 1.0);
    }

    #[test]
    fn size_guard() {
        let g = Graph::path(25);
        assert!(matches!(
            brute_force_optimum(&g, &BalanceFunction::RatioCut),
            Err(Error::TooLarge { n: 25, limit: 24 })
        ));
        let g = Graph::path(8);
        assert!(brute_force_optimum_with_limit(&g, &BalanceFunction::RatioCut, 6).is_err());
        assert!(brute_force_optimum_with_limit(&g, &BalanceFunction::RatioCut, 100).is_ok());
    }

    #[test]
    fn chunked_enumeration_matches_a_plain_scan() {
        // 17 vertices spans several chunks.
        let n = 17;
        let g = Graph::from_edges(
            n,
            (0..n).flat_map(|i| {
                [
                    (i, (i + 1) % n, 1.0 + (i % 3) as f64),
                    (i, (i + 5) % n, 0.5),
                ]
            }),
        )
        .unwrap();
        let b = BalanceFunction::RatioCheeger;
        let r = brute_force_optimum(&g, &b).unwrap();
        let mut best = (f64::INFINITY, 0u64);
        for m in 1..(1u64 << (n - 1)) {
            let a = VertexSet::from_bits(n, m);
            let ratio = g.cut_value(&a).unwrap() / b.balance_set_value(&a).unwrap();
            if ratio < best.0 {
                best = (ratio, m);
            }
        }
        assert_eq!(r.best_ratio, best.0);
        assert_eq!(r.best_set, VertexSet::from_bits(n, best.1));
    }

    #[test]
    fn derivative_check_and_negative_control() {
        struct Doubled(TotalVariation);
        impl Functional for Doubled {
            fn value(&self, f: &[f64]) -> f64 {
                self.0.value(f)
            }
            fn subgradient(&self, f: &[f64]) -> Vec<f64> {
                self.0.subgradient(f).iter().map(|s| 2.0 * s).collect()
            }
        }
        let tv = TotalVariation(Arc::new(Graph::path(3)));
        let f = [0.0, 1.0, 3.0];
        assert!(directional_derivative_check(&tv, &f, 200) <= 1e-10);
        assert!(directional_derivative_check(&Doubled(tv), &f, 200) > 1e-4);
    }

    #[test]
    fn relaxation_on_p3() {
        let obj = RatioObjective::cut(
            Arc::new(Graph::path(3)),
            Extension::lovasz(BalanceFunction::RatioCut),
        )
        .unwrap();
        let rep = verify_exact_relaxation(&obj, &SolverConfig::default(), 1000, 5, 1).unwrap();
        assert!(rep.max_threshold_excess <= 1e-10);
        assert!(rep.min_sampled_value >= 0.5 - 1e-10);
        assert_eq!(rep.optimal_fraction, 1.0);
    }
}
