//! Primal-dual hybrid gradient solver for the inner convex problem
//!
//! ```text
//! min_{|u|_2 <= 1}  TV(u) - <u, v>
//! ```
//!
//! written as the saddle problem `min_u max_{|α_e| <= w_e} <Bu, α> - <u, v>`
//! where `B` is the unweighted signed incidence operator (one row per edge)
//! and the edge weights are the dual box radii. Both `|u|_2 <= 1` and
//! `|u|_2^2 <= 1` describe the same feasible set, so a single solver serves
//! both constraint functions.
//!
//! Weak duality gives the certified lower bound `-|B^T α - v|_2` on the
//! optimal value, which drives the stopping rule and the no-descent
//! certificate used by the outer loop.
//!
//! By default the iteration restarts adaptively from the running average
//! of the iterates whenever the average (or the current point) has cut the
//! primal-dual gap by a fixed factor since the last restart. Both domains
//! are bounded, so the plain gap is a valid restart measure.

mod prox;

use thiserror::Error;

pub use prox::solve_inner_prox_form;

use crate::error::{check_len, Result};
use crate::graph::Graph;
use crate::objective::{dot, norm2};

/// How often (in iterations) the gap is evaluated.
const CHECK_EVERY: usize = 10;

// Restart thresholds, as fractions of the gap at the last restart, and the
// share of all iterations after which a restart is forced.
const RESTART_SUFFICIENT: f64 = 0.2;
const RESTART_NECESSARY: f64 = 0.8;
const RESTART_ARTIFICIAL: f64 = 0.36;

/// One inner problem: the graph, the linear term `v` and the value
/// `Φ(f^k) = -c p` that a useful solution has to beat.
#[derive(Debug, Clone)]
pub struct InnerProblem<'g> {
    graph: &'g Graph,
    linear: Vec<f64>,
    target: f64,
    margin: f64,
    step_ratio: f64,
    restarts: bool,
}

impl<'g> InnerProblem<'g> {
    pub fn new(graph: &'g Graph, linear: Vec<f64>, target: f64) -> Result<Self> {
        check_len(graph.n(), linear.len())?;
        Ok(Self {
            graph,
            linear,
            target,
            margin: 0.0,
            step_ratio: 1.0,
            restarts: true,
        })
    }

    /// Descent only counts when `Φ(u) < target - margin`.
    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin.max(0.0);
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// `Φ(u) = TV(u) - <u, v>`.
    pub fn objective(&self, u: &[f64]) -> f64 {
        self.graph.tv_unchecked(u) - dot(u, &self.linear)
    }

    /// Primal step `τ = r s`, dual step `σ = s / r` with
    /// `s = 0.99 / sqrt(2 d_max)`, so `σ τ |B|^2 < 1` for any ratio `r > 0`.
    pub fn with_step_ratio(mut self, ratio: f64) -> Self {
        if ratio > 0.0 && ratio.is_finite() {
            self.step_ratio = ratio;
        }
        self
    }

    /// Plain PDHG (no restarts to the average) when false.
    pub fn with_restarts(mut self, restarts: bool) -> Self {
        self.restarts = restarts;
        self
    }

    /// `(σ, τ)`.
    pub fn step_sizes(&self) -> (f64, f64) {
        let step = 0.99 / (2.0 * self.graph.max_degree().max(1) as f64).sqrt();
        (step / self.step_ratio, step * self.step_ratio)
    }

    /// `B^T α - v`.
    fn dual_residual(&self, alpha: &[f64], out: &mut [f64]) {
        out.iter_mut().zip(&self.linear).for_each(|(o, v)| *o = -v);
        for (e, edge) in self.graph.edges().iter().enumerate() {
            out[edge.u] += alpha[e];
            out[edge.v] -= alpha[e];
        }
    }
}

/// Upper bound on `Φ(u) - min Φ` for feasible `u` and `α` in the dual box:
/// `Φ(u) + |B^T α - v|_2`.
pub fn pd_gap(p: &InnerProblem, u: &[f64], alpha: &[f64]) -> f64 {
    let mut residual = vec![0.0; p.graph.n()];
    p.dual_residual(alpha, &mut residual);
    (p.objective(u) + norm2(&residual)).max(0.0)
}

/// Result of an inner solve. `u` is rescaled to the unit sphere whenever
/// that lowers `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub u: Vec<f64>,
    pub phi: f64,
    /// Primal-dual gap at the last check.
    pub gap: f64,
    /// Best certified lower bound on `min Φ`.
    pub lower_bound: f64,
    pub iterations: usize,
    pub descent_achieved: bool,
}

/// The solver could not find `Φ(u) < target - margin`.
#[derive(Debug, Clone, Error)]
#[error("no descent below the target (certified: {certified})")]
pub struct NoDescent {
    pub best: InnerSolution,
    /// True when the dual bound proves that no descent exists.
    pub certified: bool,
}

/// Snapshot of the iteration handed to stopping rules.
#[derive(Debug, Clone, Copy)]
struct Check {
    iteration: usize,
    phi: f64,
    gap: f64,
    lower_bound: f64,
}

/// PDHG state that can be warm-started across related problems.
#[derive(Debug, Clone)]
pub struct InnerSolver {
    u: Vec<f64>,
    alpha: Vec<f64>,
}

impl InnerSolver {
    pub fn new(graph: &Graph) -> Self {
        Self {
            u: vec![0.0; graph.n()],
            alpha: vec![0.0; graph.edge_count()],
        }
    }

    /// Starts the next solve from the primal point `u` (projected onto the
    /// unit ball); the dual variables are kept.
    pub fn set_primal(&mut self, u: &[f64]) {
        self.u.copy_from_slice(u);
        project_ball(&mut self.u);
    }

    pub fn primal(&self) -> &[f64] {
        &self.u
    }

    pub fn dual(&self) -> &[f64] {
        &self.alpha
    }

    /// Solves until descent below the target is found and the gap
    /// satisfies `gap <= tol (1 + |Φ(u)|)`; until the dual bound certifies
    /// that no descent exists; or until `max_iter` iterations.
    pub fn solve(
        &mut self,
        p: &InnerProblem,
        tol: f64,
        max_iter: usize,
    ) -> std::result::Result<InnerSolution, NoDescent> {
        assert_eq!(self.u.len(), p.graph.n(), "solver built for another graph");
        let threshold = p.target - p.margin;
        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut lower_bound = f64::NEG_INFINITY;
        let mut certified = false;
        let mut last = None;

        self.iterate(p, max_iter, |u, check| {
            lower_bound = lower_bound.max(check.lower_bound);
            let (cand, phi) = rescaled(u, check.phi);
            if best.as_ref().is_none_or(|(_, b)| phi < *b) {
                best = Some((cand, phi));
            }
            last = Some(check);
            let descent = best.as_ref().is_some_and(|(_, b)| *b < threshold);
            if !descent && lower_bound >= threshold {
                certified = true;
                return true;
            }
            descent && check.gap <= tol * (1.0 + check.phi.abs())
        });

        let check = last.expect("at least one check runs");
        let (u, phi) = best.expect("at least one check runs");
        let descent_achieved = phi < threshold;
        let solution = InnerSolution {
            u,
            phi,
            gap: check.gap,
            lower_bound,
            iterations: check.iteration,
            descent_achieved,
        };
        if descent_achieved {
            Ok(solution)
        } else {
            Err(NoDescent {
                best: solution,
                certified,
            })
        }
    }

    /// Runs until `gap <= tol (1 + |Φ(u)|)` or `max_iter`. Returns the
    /// primal point of the last check (not rescaled).
    pub fn minimize(&mut self, p: &InnerProblem, tol: f64, max_iter: usize) -> InnerSolution {
        let mut last = None;
        let mut point = Vec::new();
        let mut lower_bound = f64::NEG_INFINITY;
        self.iterate(p, max_iter, |u, check| {
            lower_bound = lower_bound.max(check.lower_bound);
            last = Some(check);
            point.clear();
            point.extend_from_slice(u);
            check.gap <= tol * (1.0 + check.phi.abs())
        });
        let check = last.expect("at least one check runs");
        InnerSolution {
            u: point,
            phi: check.phi,
            gap: check.gap,
            lower_bound,
            iterations: check.iteration,
            descent_achieved: check.phi < p.target - p.margin,
        }
    }

    /// Core PDHG loop. `stop` sees a primal point with its check every
    /// `CHECK_EVERY` iterations (and before the first one) and ends the run
    /// by returning true. With restarts the point is whichever of the
    /// current iterate and the running average has the smaller gap.
    fn iterate<F>(&mut self, p: &InnerProblem, max_iter: usize, mut stop: F)
    where
        F: FnMut(&[f64], Check) -> bool,
    {
        let n = p.graph.n();
        let m = p.graph.edge_count();
        let edges = p.graph.edges();
        let ends: Vec<(u32, u32)> = edges.iter().map(|e| (e.u as u32, e.v as u32)).collect();
        let radius: Vec<f64> = edges.iter().map(|e| e.w).collect();
        let (sigma, tau) = p.step_sizes();
        let mut u_bar = self.u.clone();
        let mut residual = vec![0.0; n];
        // Expects `residual = B^T α - v` for the dual point in question.
        let check = |u: &[f64], residual: &[f64], iteration| {
            let dual_norm = norm2(residual);
            let phi = p.objective(u);
            Check {
                iteration,
                phi,
                gap: (phi + dual_norm).max(0.0),
                lower_bound: -dual_norm,
            }
        };

        p.dual_residual(&self.alpha, &mut residual);
        let first = check(&self.u, &residual, 0);
        if stop(&self.u, first) {
            return;
        }

        let (mut sum_u, mut sum_alpha, mut sum_res) = if p.restarts {
            (vec![0.0; n], vec![0.0; m], vec![0.0; n])
        } else {
            Default::default()
        };
        let mut avg_u = vec![0.0; n];
        let mut avg_res = vec![0.0; n];
        let mut count = 0usize;
        let mut restart_gap = first.gap;
        let mut last_candidate = f64::INFINITY;
        let mut last_restart = 0usize;

        for it in 1..=max_iter {
            // Dual ascent fused with the accumulation of B^T α - v.
            residual.copy_from_slice(&p.linear);
            residual.iter_mut().for_each(|r| *r = -*r);
            for ((a, &(i, j)), &w) in self.alpha.iter_mut().zip(&ends).zip(&radius) {
                let (i, j) = (i as usize, j as usize);
                let next = (*a + sigma * (u_bar[i] - u_bar[j])).clamp(-w, w);
                *a = next;
                residual[i] += next;
                residual[j] -= next;
            }
            for i in 0..n {
                u_bar[i] = self.u[i] - tau * residual[i];
            }
            project_ball(&mut u_bar);
            // u_bar now holds u^{t+1}; extrapolate in place.
            for i in 0..n {
                let next = u_bar[i];
                u_bar[i] = 2.0 * next - self.u[i];
                self.u[i] = next;
            }
            if p.restarts {
                add_to(&mut sum_u, &self.u);
                add_to(&mut sum_alpha, &self.alpha);
                add_to(&mut sum_res, &residual);
                count += 1;
            }
            if it % CHECK_EVERY != 0 && it != max_iter {
                continue;
            }

            let current = check(&self.u, &residual, it);
            if !p.restarts {
                if stop(&self.u, current) {
                    return;
                }
                continue;
            }
            let scale = 1.0 / count as f64;
            avg_u
                .iter_mut()
                .zip(&sum_u)
                .for_each(|(a, s)| *a = s * scale);
            avg_res
                .iter_mut()
                .zip(&sum_res)
                .for_each(|(a, s)| *a = s * scale);
            let average = check(&avg_u, &avg_res, it);
            let use_average = average.gap < current.gap;
            let mut candidate = if use_average { average } else { current };
            candidate.lower_bound = current.lower_bound.max(average.lower_bound);

            let gap = candidate.gap;
            let restart = gap <= RESTART_SUFFICIENT * restart_gap
                || (gap <= RESTART_NECESSARY * restart_gap && gap > last_candidate)
                || (it - last_restart) as f64 >= RESTART_ARTIFICIAL * it as f64;
            last_candidate = gap;
            if restart {
                if use_average {
                    self.u.copy_from_slice(&avg_u);
                    self.alpha
                        .iter_mut()
                        .zip(&sum_alpha)
                        .for_each(|(a, s)| *a = s * scale);
                    residual.copy_from_slice(&avg_res);
                }
                u_bar.copy_from_slice(&self.u);
                sum_u.fill(0.0);
                sum_alpha.fill(0.0);
                sum_res.fill(0.0);
                count = 0;
                restart_gap = gap;
                last_candidate = f64::INFINITY;
                last_restart = it;
            }
            let point = if use_average { &avg_u } else { &self.u };
            if stop(point, candidate) {
                if use_average && !restart {
                    self.u.copy_from_slice(&avg_u);
                }
                return;
            }
        }
    }
}

fn add_to(sum: &mut [f64], x: &[f64]) {
    sum.iter_mut().zip(x).for_each(|(s, v)| *s += v);
}

/// Cold-started inner solve.
pub fn solve_inner(
    p: &InnerProblem,
    tol: f64,
    max_iter: usize,
) -> std::result::Result<InnerSolution, NoDescent> {
    InnerSolver::new(p.graph).solve(p, tol, max_iter)
}

/// Moves `u` onto the unit sphere when `Φ(u) < 0` (one-homogeneity makes
/// that a decrease).
fn rescaled(u: &[f64], phi: f64) -> (Vec<f64>, f64) {
    let norm = norm2(u);
    if phi < 0.0 && norm > 0.0 {
        (u.iter().map(|x| x / norm).collect(), phi / norm)
    } else {
        (u.to_vec(), phi)
    }
}

pub(crate) fn project_ball(u: &mut [f64]) {
    let norm = norm2(u);
    if norm > 1.0 {
        u.iter_mut().for_each(|x| *x /= norm);
    }
}
