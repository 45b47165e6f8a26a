//! The RatioDCA-prox outer loop.
//!
//! Each outer step picks subgradients at the current iterate `f^k`, solves
//! the inner problem
//!
//! ```text
//! min_{G(u) <= 1}  R1(u) + λ^k S2(u) - <u, r2(f^k) + λ^k s1(f^k) + c^k g(f^k)>
//! ```
//!
//! and accepts the minimizer if it beats `Φ(f^k) = -c^k p`. The loop stops
//! once the inner solver certifies that no such descent exists.

mod multi;
mod threshold;

use serde::{Deserialize, Serialize};

pub(crate) use multi::run_rng;
pub use multi::{
    initial_pool, multi_init_run, random_init, run_pool, threads_from_env, InitKind, InitPool,
    RunRecord, RunReport,
};
pub use threshold::{optimal_threshold, set_ratio};

use crate::error::{check_len, Error, Result};
use crate::graph::VertexSet;
use crate::inner::{InnerProblem, InnerSolution, InnerSolver};
use crate::objective::{norm2, Constraint, RatioObjective};
use crate::setfn::ExtensionKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Standard,
    /// Thresholds every iterate, uses the cut value as `λ^k` and jumps to
    /// the normalized indicator of the best cut whenever the inner problem
    /// has no descent. Terminates after finitely many steps.
    CutMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Proximal schedule `c^k = c_r + λ^k c_s`.
    pub c_r: f64,
    pub c_s: f64,
    pub constraint: Constraint,
    pub mode: Mode,
    /// Inner tolerance at step k: `max(tol_min, tol0 * rho^k)`.
    pub inner_tol0: f64,
    pub inner_tol_decay: f64,
    pub inner_tol_min: f64,
    pub inner_max_iter: usize,
    /// Primal/dual step ratio of the inner PDHG solver.
    pub inner_step_ratio: f64,
    /// Adaptive restarts of the inner solver from its averaged iterates.
    pub inner_restarts: bool,
    pub max_outer: usize,
    /// Descent must beat the target by `term_eps (1 + λ^k)`.
    pub term_eps: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            c_r: 0.0,
            c_s: 0.0,
            constraint: Constraint::L2,
            mode: Mode::Standard,
            inner_tol0: 1e-2,
            inner_tol_decay: 0.5,
            inner_tol_min: 1e-8,
            inner_max_iter: 100_000,
            inner_step_ratio: 1.0,
            inner_restarts: true,
            max_outer: 100,
            term_eps: 1e-8,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// `c^k = c λ^k`, the schedule used for proximal sweeps.
    pub fn with_relative_prox(c: f64) -> Self {
        Self {
            c_s: c,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.c_r >= 0.0 && self.c_r.is_finite()) {
            return bad("c_r must be finite and nonnegative");
        }
        if !(self.c_s >= 0.0 && self.c_s.is_finite()) {
            return bad("c_s must be finite and nonnegative");
        }
        if !(self.term_eps > 0.0) {
            return bad("term_eps must be positive");
        }
        if !(self.inner_tol0 > 0.0 && self.inner_tol_min > 0.0) {
            return bad("inner tolerances must be positive");
        }
        if !(self.inner_tol_decay > 0.0 && self.inner_tol_decay <= 1.0) {
            return bad("inner_tol_decay must lie in (0, 1]");
        }
        if !(self.inner_step_ratio > 0.0 && self.inner_step_ratio.is_finite()) {
            return bad("inner_step_ratio must be finite and positive");
        }
        if self.inner_max_iter == 0 {
            return bad("inner_max_iter must be at least 1");
        }
        Ok(())
    }

    pub fn prox_weight(&self, lambda: f64) -> f64 {
        self.c_r + lambda * self.c_s
    }

    pub fn inner_tol(&self, k: usize) -> f64 {
        let exp = k.min(i32::MAX as usize) as i32;
        (self.inner_tol0 * self.inner_tol_decay.powi(exp)).max(self.inner_tol_min)
    }

    pub fn termination_margin(&self, lambda: f64) -> f64 {
        self.term_eps * (1.0 + lambda.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The dual bound proved that the last iterate minimizes its own inner
    /// problem (up to the margin).
    Certified,
    /// The inner solver ran out of iterations without finding descent.
    InnerStalled,
    /// An inner solution was found but its ratio did not decrease, which
    /// only happens through rounding.
    NoStrictDecrease,
    MaxOuter,
}

/// One row per outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// `λ^k` at the start of the iteration.
    pub lambda: f64,
    /// Inner objective reached (best iterate when no descent was found).
    pub phi: f64,
    /// `|f^{k+1} - f^k|_2`, zero when the iterate was kept.
    pub step_norm: f64,
    pub inner_iterations: usize,
    /// Proximal weight actually used for the inner problem.
    pub c: f64,
    /// Ratio of the best threshold set of `f^k`.
    pub threshold_ratio: f64,
    /// Step accepted (new iterate taken).
    pub accepted: bool,
    /// Cut-monotone mode moved to the normalized indicator of the best cut.
    pub indicator_step: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub f_star: Vec<f64>,
    pub lambda_star: f64,
    pub best_set: VertexSet,
    pub best_set_ratio: f64,
    pub trace: Vec<TraceEntry>,
    pub termination: Termination,
}

impl SolveResult {
    /// The run stopped on its own rather than at `max_outer`.
    pub fn terminated(&self) -> bool {
        self.termination != Termination::MaxOuter
    }

    pub fn certified(&self) -> bool {
        self.termination == Termination::Certified
    }

    pub fn accepted_steps(&self) -> usize {
        self.trace.iter().filter(|t| t.accepted).count()
    }
}

enum Step {
    Descent {
        sol: InnerSolution,
        c: f64,
    },
    Stop {
        best: InnerSolution,
        c: f64,
        certified: bool,
    },
}

/// RatioDCA-prox driver for one objective and configuration.
#[derive(Debug, Clone, Copy)]
pub struct RatioDca<'a> {
    obj: &'a RatioObjective,
    cfg: &'a SolverConfig,
}

impl<'a> RatioDca<'a> {
    pub fn new(obj: &'a RatioObjective, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if obj.s2().is_some() {
            return Err(Error::Unsupported(
                "the inner solver handles S2 = 0 only".into(),
            ));
        }
        if cfg.mode == Mode::CutMonotone {
            if cfg.c_r != 0.0 || cfg.c_s != 0.0 {
                return Err(Error::Unsupported(
                    "cut-monotone mode requires c_r = c_s = 0".into(),
                ));
            }
            if obj.s1().kind() != ExtensionKind::Lovasz || obj.r2().is_some() {
                return Err(Error::Unsupported(
                    "cut-monotone mode requires the Lovász extension and R2 = 0".into(),
                ));
            }
        }
        Ok(Self { obj, cfg })
    }

    /// Inner problem at `f` (with `G(f) = 1`) for ratio `lambda` and
    /// proximal weight `c`: linear term `v`, target `-c p` and margin.
    pub fn inner_problem(&self, f: &[f64], lambda: f64, c: f64) -> Result<InnerProblem<'a>> {
        let sub = self.obj.subgradients(self.cfg.constraint, f)?;
        let v = self.obj.linear_term(&sub, lambda, c);
        let target = -c * self.cfg.constraint.degree();
        Ok(InnerProblem::new(self.obj.graph(), v, target)?
            .with_margin(self.cfg.termination_margin(lambda))
            .with_step_ratio(self.cfg.inner_step_ratio)
            .with_restarts(self.cfg.inner_restarts))
    }

    fn step(
        &self,
        solver: &mut InnerSolver,
        f: &[f64],
        lambda: f64,
        c: f64,
        tol: f64,
    ) -> Result<Step> {
        let p = self.inner_problem(f, lambda, c)?;
        solver.set_primal(f);
        match solver.solve(&p, tol, self.cfg.inner_max_iter) {
            Ok(sol) => Ok(Step::Descent { sol, c }),
            // The proximal term only slows the step down; termination is
            // decided on the unregularized problem.
            Err(_) if c > 0.0 => self.step(solver, f, lambda, 0.0, tol),
            Err(nd) => Ok(Step::Stop {
                best: nd.best,
                c,
                certified: nd.certified,
            }),
        }
    }

    pub fn solve(&self, f0: &[f64]) -> Result<SolveResult> {
        check_len(self.obj.n(), f0.len())?;
        let f = self.cfg.constraint.normalize(f0)?;
        if self.obj.is_degenerate(&f)? {
            return Err(Error::Degenerate("S(f0) = 0".into()));
        }
        match self.cfg.mode {
            Mode::Standard => self.solve_standard(f),
            Mode::CutMonotone => self.solve_cut_monotone(f),
        }
    }

    fn threshold(&self, f: &[f64]) -> Result<(VertexSet, f64)> {
        optimal_threshold(self.obj.graph(), self.obj.s1().base(), f)
    }

    fn solve_standard(&self, mut f: Vec<f64>) -> Result<SolveResult> {
        let mut lambda = self.obj.ratio_value(&f)?;
        let (mut best_set, mut best_ratio) = self.threshold(&f)?;
        let mut threshold_ratio = best_ratio;
        let mut solver = InnerSolver::new(self.obj.graph());
        let mut trace = Vec::new();
        let mut termination = Termination::MaxOuter;

        for k in 0..self.cfg.max_outer {
            let c = self.cfg.prox_weight(lambda);
            let mut entry = TraceEntry {
                lambda,
                phi: 0.0,
                step_norm: 0.0,
                inner_iterations: 0,
                c,
                threshold_ratio,
                accepted: false,
                indicator_step: false,
            };
            match self.step(&mut solver, &f, lambda, c, self.cfg.inner_tol(k))? {
                Step::Descent { sol, c } => {
                    entry.phi = sol.phi;
                    entry.inner_iterations = sol.iterations;
                    entry.c = c;
                    let next = self.cfg.constraint.normalize(&sol.u)?;
                    let next_lambda = self.obj.ratio_value(&next)?;
                    if !(next_lambda < lambda) {
                        trace.push(entry);
                        termination = Termination::NoStrictDecrease;
                        break;
                    }
                    entry.step_norm = distance(&next, &f);
                    entry.accepted = true;
                    trace.push(entry);
                    f = next;
                    lambda = next_lambda;
                    let (set, ratio) = self.threshold(&f)?;
                    threshold_ratio = ratio;
                    if ratio < best_ratio {
                        best_set = set;
                        best_ratio = ratio;
                    }
                }
                Step::Stop { best, c, certified } => {
                    entry.phi = best.phi;
                    entry.inner_iterations = best.iterations;
                    entry.c = c;
                    trace.push(entry);
                    termination = if certified {
                        Termination::Certified
                    } else {
                        Termination::InnerStalled
                    };
                    break;
                }
            }
        }

        Ok(SolveResult {
            f_star: f,
            lambda_star: lambda,
            best_set,
            best_set_ratio: best_ratio,
            trace,
            termination,
        })
    }

    fn solve_cut_monotone(&self, mut f: Vec<f64>) -> Result<SolveResult> {
        let mut solver = InnerSolver::new(self.obj.graph());
        let mut trace = Vec::new();
        let mut termination = Termination::MaxOuter;
        let (mut best_set, mut best_ratio) = self.threshold(&f)?;
        let mut lambda = best_ratio;

        for k in 0..self.cfg.max_outer {
            let (set, ratio) = self.threshold(&f)?;
            lambda = ratio;
            if ratio < best_ratio {
                best_set = set.clone();
                best_ratio = ratio;
            }
            let indicator = self.cfg.constraint.normalize(&set.indicator())?;
            let mut entry = TraceEntry {
                lambda,
                phi: 0.0,
                step_norm: 0.0,
                inner_iterations: 0,
                c: 0.0,
                threshold_ratio: ratio,
                accepted: false,
                indicator_step: false,
            };
            match self.step(&mut solver, &f, lambda, 0.0, self.cfg.inner_tol(k))? {
                Step::Descent { sol, .. } => {
                    entry.phi = sol.phi;
                    entry.inner_iterations = sol.iterations;
                    let next = self.cfg.constraint.normalize(&sol.u)?;
                    entry.step_norm = distance(&next, &f);
                    entry.accepted = true;
                    trace.push(entry);
                    f = next;
                }
                Step::Stop {
                    best, certified, ..
                } => {
                    entry.phi = best.phi;
                    entry.inner_iterations = best.iterations;
                    if f == indicator {
                        trace.push(entry);
                        termination = if certified {
                            Termination::Certified
                        } else {
                            Termination::InnerStalled
                        };
                        break;
                    }
                    // Φ(1*) = 0 is within the margin of the inner minimum.
                    entry.step_norm = distance(&indicator, &f);
                    entry.accepted = true;
                    entry.indicator_step = true;
                    trace.push(entry);
                    f = indicator;
                }
            }
        }

        Ok(SolveResult {
            f_star: f,
            lambda_star: lambda,
            best_set,
            best_set_ratio: best_ratio,
            trace,
            termination,
        })
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d)
}

/// Runs RatioDCA-prox from `f0`.
pub fn ratiodca_prox(obj: &RatioObjective, cfg: &SolverConfig, f0: &[f64]) -> Result<SolveResult> {
    RatioDca::new(obj, cfg)?.solve(f0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImprovementOutcome {
    /// A partition with strictly smaller ratio was found.
    Improved,
    /// The indicator of the input minimizes its own inner problem.
    Certified,
    /// Neither: the inner solver stalled.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    pub set: VertexSet,
    pub ratio: f64,
    pub initial_ratio: f64,
    pub outcome: ImprovementOutcome,
    pub result: SolveResult,
}

/// Runs RatioDCA-prox from `1_A` and returns a set with strictly smaller
/// ratio, or `A` itself together with the reason no improvement was made.
pub fn improve_partition(
    obj: &RatioObjective,
    cfg: &SolverConfig,
    a: &VertexSet,
) -> Result<Improvement> {
    check_len(obj.n(), a.n())?;
    if a.is_empty() || a.is_full() {
        return Err(Error::Degenerate(
            "cannot improve the trivial partition (∅ or V)".into(),
        ));
    }
    let initial_ratio = set_ratio(obj.graph(), obj.s1().base(), a)?;
    let result = ratiodca_prox(obj, cfg, &a.indicator())?;
    if result.best_set_ratio < initial_ratio {
        return Ok(Improvement {
            set: result.best_set.clone(),
            ratio: result.best_set_ratio,
            initial_ratio,
            outcome: ImprovementOutcome::Improved,
            result,
        });
    }
    let outcome = if result.certified() {
        ImprovementOutcome::Certified
    } else {
        ImprovementOutcome::Stalled
    };
    Ok(Improvement {
        set: a.clone(),
        ratio: initial_ratio,
        initial_ratio,
        outcome,
        result,
    })
}

/// `-min_{G(u) <= 1} Φ⁰_{f*}(u)` for the unregularized inner problem at
/// `f*` with ratio `λ*`. Zero exactly when `f*` satisfies the nonlinear
/// eigenvector condition for the chosen subgradients.
pub fn eigen_residual(
    obj: &RatioObjective,
    cfg: &SolverConfig,
    f_star: &[f64],
    lambda_star: f64,
) -> Result<f64> {
    check_len(obj.n(), f_star.len())?;
    let g = cfg.constraint.value(f_star);
    if (g - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "eigen_residual needs G(f*) = 1, got {g}"
        )));
    }
    let sub = obj.subgradients(cfg.constraint, f_star)?;
    let v = obj.linear_term(&sub, lambda_star, 0.0);
    let p = InnerProblem::new(obj.graph(), v, 0.0)?;
    let mut solver = InnerSolver::new(obj.graph());
    solver.set_primal(f_star);
    let sol = solver.minimize(&p, cfg.inner_tol_min, cfg.inner_max_iter);
    let norm = norm2(&sol.u);
    // Φ is one-homogeneous, so a negative value improves on the sphere.
    let phi = if sol.phi < 0.0 && norm > 0.0 {
        sol.phi / norm
    } else {
        sol.phi
    };
    Ok((-phi).max(0.0))
}
