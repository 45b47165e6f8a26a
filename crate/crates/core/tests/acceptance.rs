//! End-to-end acceptance checks. Each test prints one `criterion N: PASS` or
//! `criterion N: FAIL` line with the measured quantities, then asserts.

mod common;

use std::sync::Arc;
use std::time::Instant;

use balcut::cli::{cmd_compare_extensions, BalanceArg, ExperimentSpec, GraphSource};
use balcut::graph::{two_moons_graph, Graph, VertexSet};
use balcut::inner::{solve_inner_prox_form, InnerProblem, InnerSolver};
use balcut::objective::{Constraint, RatioObjective};
use balcut::oracle::brute_force_optimum;
use balcut::outer::{
    eigen_residual, improve_partition, initial_pool, multi_init_run, optimal_threshold,
    ratiodca_prox, run_pool, set_ratio, ImprovementOutcome, Mode, SolverConfig, Termination,
};
use balcut::setfn::{lovasz_subgradient, lovasz_value, BalanceFunction, Extension, ExtensionKind};
use common::*;
use rand::Rng;
use std::io::Write;

fn report(id: u32, ok: bool, detail: String) {
    // straight to the stdout handle so the line survives output capture
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stdout(), "criterion {id}: {verdict} ({detail})");
    assert!(ok, "criterion {id} failed: {detail}");
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn criterion_1_exactness_at_desk_scale() {
    let start = Instant::now();
    let mut below_optimum = 0;
    let mut threshold_violations = 0;
    let mut instances = 0;
    let mut optimal_hits = 0;
    for gi in 0..20u64 {
        let n = 6 + (gi % 7) as usize;
        let g = random_connected_graph(n, 0.35, 100 + gi);
        for b in [BalanceFunction::RatioCut, BalanceFunction::RatioCheeger] {
            instances += 1;
            let opt = brute_force_optimum(&g, &b).unwrap().best_ratio;
            let obj = cut_objective(g.clone(), b.clone());

            let mut r = rng(1000 + gi);
            for _ in 0..1000 {
                let f = random_vector(n, &mut r);
                let (_, ratio) = optimal_threshold(&g, &b, &f).unwrap();
                let value = obj.ratio_value(&f).unwrap();
                if ratio > value + 1e-10 {
                    threshold_violations += 1;
                }
                if ratio < opt - 1e-10 {
                    below_optimum += 1;
                }
            }

            let cfg = SolverConfig {
                seed: gi,
                ..SolverConfig::default()
            };
            let rep = multi_init_run(&obj, &cfg, 100, false).unwrap();
            below_optimum += rep
                .runs
                .iter()
                .filter(|r| r.best_ratio < opt - 1e-10)
                .count();
            if close(rep.best, opt, 1e-10) {
                optimal_hits += 1;
            }
        }
    }
    let fraction = optimal_hits as f64 / instances as f64;
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        below_optimum == 0 && threshold_violations == 0 && fraction >= 0.8 && secs < 120.0,
        format!(
            "{instances} instances; below-optimum {below_optimum}; threshold violations \
             {threshold_violations}; best-of-100 optimal on {:.1}%; {secs:.1}s",
            100.0 * fraction
        ),
    );
}

#[test]
fn criterion_2_monotone_descent() {
    let mut runs = 0;
    let mut violations = 0;
    let mut steps = 0;
    let mut feasibility = 0;
    for r in 0..40u64 {
        let n = 10 + (r as usize * 7) % 50;
        let g = random_connected_graph(n, 4.0 / n as f64, 200 + r);
        let b = if r % 2 == 0 {
            BalanceFunction::RatioCut
        } else {
            BalanceFunction::RatioCheeger
        };
        let obj = cut_objective(g, b);
        let f0 = random_vector(n, &mut rng(300 + r));
        for c in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let cfg = SolverConfig::with_relative_prox(c);
            let res = ratiodca_prox(&obj, &cfg, &f0).unwrap();
            runs += 1;
            if res.termination == Termination::NoStrictDecrease {
                violations += 1;
            }
            let mut lambdas: Vec<f64> = res.trace.iter().map(|t| t.lambda).collect();
            lambdas.push(res.lambda_star);
            for (k, t) in res.trace.iter().enumerate() {
                if t.accepted {
                    steps += 1;
                    if !(lambdas[k + 1] < lambdas[k] * (1.0 + 1e-12)) {
                        violations += 1;
                    }
                }
                if res.best_set_ratio > t.lambda + 1e-10 {
                    violations += 1;
                }
            }
            if (Constraint::L2.value(&res.f_star) - 1.0).abs() > 1e-10
                || obj.denominator(&res.f_star).unwrap() <= 0.0
            {
                feasibility += 1;
            }
        }
    }
    report(
        2,
        violations == 0 && feasibility == 0,
        format!("{runs} runs, {steps} accepted steps, {violations} violations, {feasibility} infeasible"),
    );
}

#[test]
fn criterion_3_lovasz_machinery() {
    let mut r = rng(3);
    let (mut euler, mut threshold, mut maximal) = (0, 0, 0);
    let (mut neg_euler, mut neg_threshold, mut neg_maximal) = (0, 0, 0);
    let trials = 1000;
    for t in 0..trials {
        let n = 3 + t % 10;
        let f = random_vector(n, &mut r);
        let extensions = [
            Extension::lovasz(BalanceFunction::RatioCut),
            Extension::lovasz(BalanceFunction::RatioCheeger),
            Extension::new(BalanceFunction::RatioCut, ExtensionKind::ScaledMean).unwrap(),
            Extension::new(BalanceFunction::RatioCheeger, ExtensionKind::Median).unwrap(),
        ];
        let mut euler_ok = true;
        let mut neg_euler_caught = false;
        for e in &extensions {
            let s = e.subgradient(&f);
            let value = e.value(&f);
            euler_ok &= close(dot(&s, &f), value, 1e-10);
            neg_euler_caught |= !close(2.0 * dot(&s, &f), value, 1e-10);
        }
        euler += euler_ok as usize;
        neg_euler += neg_euler_caught as usize;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| f[j].total_cmp(&f[i]));
        let mut all_ok = true;
        let mut corrupted_caught = false;
        for b in [BalanceFunction::RatioCut, BalanceFunction::RatioCheeger] {
            let s = lovasz_subgradient(&b, &f);
            let mut bad = s.clone();
            bad.swap(order[0], order[n - 1]);
            for k in 1..n {
                let set = VertexSet::from_members(n, order[..k].iter().copied());
                let target = b.balance_set_value(&set).unwrap();
                let ind = set.indicator();
                all_ok &= close(dot(&s, &ind), target, 1e-10);
                corrupted_caught |= !close(dot(&bad, &ind), target, 1e-10);
            }
        }
        threshold += all_ok as usize;
        neg_threshold += corrupted_caught as usize;

        let lovasz = lovasz_value(&BalanceFunction::RatioCut, &f);
        let mean = extensions[2].value(&f);
        let a = VertexSet::from_members(n, (0..n).filter(|i| f[*i] > 0.0));
        let scale = r.random_range(0.1..5.0);
        let shift = r.random_range(-3.0..3.0);
        let g: Vec<f64> = a.indicator().iter().map(|x| scale * x + shift).collect();
        let eq = close(
            lovasz_value(&BalanceFunction::RatioCut, &g),
            extensions[2].value(&g),
            1e-10,
        );
        maximal += (lovasz >= mean - 1e-10 * (1.0 + mean) && eq) as usize;
        // Reversed inequality must fail strictly on generic vectors.
        neg_maximal += (mean < lovasz - 1e-10 * (1.0 + lovasz)) as usize;
    }
    let ok = euler == trials
        && threshold == trials
        && maximal == trials
        && neg_euler == trials
        && neg_threshold == trials
        && neg_maximal > 0;
    report(
        3,
        ok,
        format!(
            "euler {euler}/{trials}, threshold {threshold}/{trials}, maximality {maximal}/{trials}; \
             negative controls caught: euler {neg_euler}, threshold {neg_threshold}, \
             strict maximality {neg_maximal}"
        ),
    );
}

#[test]
fn criterion_4_prox_form_equivalence() {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for gi in 0..10u64 {
        let n = 10 + (gi as usize * 2);
        let g = random_connected_graph(n, 0.25, 400 + gi);
        let b = if gi % 2 == 0 {
            BalanceFunction::RatioCut
        } else {
            BalanceFunction::RatioCheeger
        };
        let obj = cut_objective(g.clone(), b);
        let c = [0.5, 1.0, 2.0][gi as usize % 3];
        let cfg = SolverConfig {
            c_s: 1.0 / (2.0 * c),
            constraint: Constraint::L2Squared,
            inner_tol0: 1e-10,
            inner_tol_min: 1e-10,
            inner_max_iter: 2_000_000,
            max_outer: 1,
            ..SolverConfig::default()
        };
        let mut f = unit(&random_vector(n, &mut rng(500 + gi)));
        for _ in 0..5 {
            let lambda = obj.ratio_value(&f).unwrap();
            let s1 = obj.s1().subgradient(&f);
            let res = ratiodca_prox(&obj, &cfg, &f).unwrap();
            let next = if res.accepted_steps() == 1 {
                res.f_star
            } else {
                f.clone()
            };
            let prox = solve_inner_prox_form(&g, &f, &s1, lambda, c, 1e-10, 2_000_000).unwrap();
            worst = worst.max(dist(&next, &prox));
            compared += 1;
            f = next;
        }
    }
    report(
        4,
        worst <= 1e-6,
        format!("{compared} iterates compared, max difference {worst:.3e}"),
    );
}

#[test]
fn criterion_5_proximal_ordering() {
    let mut violations = 0;
    let mut worst_drop: f64 = 0.0;
    for i in 0..50u64 {
        let n = 8 + (i as usize % 18);
        let g = random_connected_graph(n, 0.3, 600 + i);
        let obj = cut_objective(g.clone(), BalanceFunction::RatioCut);
        let f = unit(&random_vector(n, &mut rng(700 + i)));
        let lambda = obj.ratio_value(&f).unwrap();
        let sub = obj.subgradients(Constraint::L2, &f).unwrap();
        let mut previous = f64::NEG_INFINITY;
        for c in [0.0, 0.5, 1.0, 2.0] {
            let v = obj.linear_term(&sub, lambda, c);
            let p = InnerProblem::new(&g, v, 0.0).unwrap();
            let sol = InnerSolver::new(&g).minimize(&p, 1e-10, 2_000_000);
            let u = unit(&sol.u);
            let value = dot(&u, &sub.g);
            if value < previous - 1e-8 {
                violations += 1;
                worst_drop = worst_drop.max(previous - value);
            }
            previous = value;
        }
    }
    report(
        5,
        violations == 0,
        format!("50 instances, {violations} violations, worst drop {worst_drop:.3e}"),
    );
}

#[test]
fn criterion_6_improvement_theorem() {
    let (mut improved, mut certified, mut failures) = (0, 0, 0);
    let mut instance = 0u64;
    let mut tested = 0;
    while tested < 50 {
        instance += 1;
        let n = 8 + (instance as usize % 9);
        let g = random_connected_graph(n, 0.3, 800 + instance);
        let b = if instance % 2 == 0 {
            BalanceFunction::RatioCut
        } else {
            BalanceFunction::RatioCheeger
        };
        let opt = brute_force_optimum(&g, &b).unwrap().best_ratio;
        let mut r = rng(900 + instance);
        let a = VertexSet::from_mask((0..n).map(|_| r.random_bool(0.5)).collect());
        if a.is_empty() || a.is_full() {
            continue;
        }
        let ratio_a = set_ratio(&g, &b, &a).unwrap();
        if ratio_a <= opt + 1e-9 {
            continue;
        }
        tested += 1;
        let obj = cut_objective(g, b);
        let cfg = SolverConfig {
            max_outer: 1,
            ..SolverConfig::default()
        };
        let imp = improve_partition(&obj, &cfg, &a).unwrap();
        match imp.outcome {
            ImprovementOutcome::Improved if imp.ratio < ratio_a => improved += 1,
            ImprovementOutcome::Certified => certified += 1,
            _ => failures += 1,
        }
    }
    report(
        6,
        failures == 0,
        format!("50 partitions: {improved} improved, {certified} certified, {failures} failures"),
    );
}

#[test]
fn criterion_7_finite_termination() {
    let mut failures = 0;
    let mut max_iters = 0;
    let mut certified = 0;
    for i in 0..20u64 {
        let g = if i < 10 {
            let n = 40 + 16 * i as usize;
            two_moons_graph(n, 6, None, 0.1, i).unwrap().0
        } else {
            let n = 30 + 17 * (i as usize - 10);
            random_connected_graph(n, 3.0 / n as f64, 1000 + i)
        };
        let n = g.n();
        let b = if i % 2 == 0 {
            BalanceFunction::RatioCheeger
        } else {
            BalanceFunction::RatioCut
        };
        let obj = cut_objective(g, b);
        let cfg = SolverConfig {
            mode: Mode::CutMonotone,
            ..SolverConfig::default()
        };
        let res = ratiodca_prox(&obj, &cfg, &random_vector(n, &mut rng(1100 + i))).unwrap();
        let monotone = res
            .trace
            .windows(2)
            .all(|w| w[1].lambda <= w[0].lambda * (1.0 + 1e-12));
        max_iters = max_iters.max(res.trace.len());
        certified += res.certified() as usize;
        if !(res.terminated() && monotone && res.trace.len() <= 100) {
            failures += 1;
        }
    }
    report(
        7,
        failures == 0,
        format!("20 graphs, {failures} failures, {certified} certified, max {max_iters} outer iterations"),
    );
}

#[test]
fn criterion_8_eigenvector_certification() {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for r in 0..30u64 {
        let n = 10 + (r as usize * 3) % 30;
        let g = random_connected_graph(n, 3.0 / n as f64, 1200 + r);
        let obj = cut_objective(g, BalanceFunction::RatioCut);
        let f0 = random_vector(n, &mut rng(1300 + r));
        for c in [0.0, 1.0] {
            let cfg = SolverConfig::with_relative_prox(c);
            let res = ratiodca_prox(&obj, &cfg, &f0).unwrap();
            if res.certified() {
                let residual = eigen_residual(&obj, &cfg, &res.f_star, res.lambda_star).unwrap();
                worst = worst.max(residual);
                checked += 1;
            }
        }
    }
    report(
        8,
        checked > 0 && worst <= 1e-6,
        format!("{checked} certified runs, max residual {worst:.3e}"),
    );
}

#[test]
fn criterion_9_inner_solver_oracle_agreement() {
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut r = rng(9);
    for mask in 0..8u32 {
        let edges: Vec<(usize, usize, f64)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &(u, v))| (u, v, 1.0))
            .collect();
        let g = Arc::new(Graph::from_edges(3, edges).unwrap());
        let obj =
            RatioObjective::cut(g.clone(), Extension::lovasz(BalanceFunction::RatioCut)).unwrap();
        for _ in 0..50 {
            let f = unit(&random_vector(3, &mut r));
            let lambda = r.random_range(0.0..2.0);
            let c = r.random_range(0.0..2.0);
            let sub = obj.subgradients(Constraint::L2, &f).unwrap();
            let v = obj.linear_term(&sub, lambda, c);
            let p = InnerProblem::new(&g, v.clone(), 0.0).unwrap();
            let sol = InnerSolver::new(&g).minimize(&p, 1e-10, 1_000_000);
            let norm = sol.u.iter().map(|x| x * x).sum::<f64>().sqrt();
            let solver_min = if sol.phi < 0.0 {
                sol.phi / norm
            } else {
                sol.phi
            };
            let truth = sphere_grid_min(&g, &v);
            worst = worst.max((solver_min - truth).abs());
            cases += 1;
        }
    }
    // The P3 example: v = λ (-2, 0, 2) separates vertex 2 from vertex 0.
    let g = Graph::path(3);
    let v = vec![-1.2, 0.0, 1.2];
    let p = InnerProblem::new(&g, v.clone(), 0.0).unwrap();
    let sol = InnerSolver::new(&g).minimize(&p, 1e-10, 1_000_000);
    let separates = sol.u[2] > sol.u[0] && sol.phi < 0.0;
    let rescaled = p.objective(&unit(&sol.u));
    worst = worst.max((rescaled - sphere_grid_min(&g, &v)).abs());
    report(
        9,
        worst <= 1e-4 && separates,
        format!(
            "{cases} random instances on all 8 labeled 3-vertex graphs, max |Φ - grid| {worst:.3e}"
        ),
    );
}

#[test]
fn criterion_10_two_moons_end_to_end() {
    let start = Instant::now();
    let (g, _) = two_moons_graph(2000, 10, None, 0.1, 1).unwrap();
    assert!(g.is_connected(), "two-moons graph must be connected");
    let edges = g.edge_count();
    let obj = cut_objective(g.clone(), BalanceFunction::RatioCheeger);
    let cfg = SolverConfig {
        seed: 1,
        ..SolverConfig::default()
    };
    let pool = initial_pool(&obj, cfg.constraint, 19, true, cfg.seed).unwrap();
    let (_, spectral_ratio) =
        optimal_threshold(&g, &BalanceFunction::RatioCheeger, &pool.vectors[0]).unwrap();
    let rep = run_pool(&obj, &cfg, &pool).unwrap();
    let solve_secs = start.elapsed().as_secs_f64();

    let mut spec = ExperimentSpec::new(GraphSource::TwoMoons {
        n: 2000,
        k: 10,
        seed: 1,
    });
    spec.balance = BalanceArg::Cheeger;
    spec.random_inits = 10;
    spec.spectral = true;
    spec.seed = 1;
    let cmp = cmd_compare_extensions(&spec).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let _ = writeln!(
        std::io::stdout(),
        "  compare-extensions (Lovász vs {}): better/equal/worse = {}/{}/{}, ratio of best cuts {:.2}%{}",
        cmp.other,
        cmp.better,
        cmp.equal,
        cmp.worse,
        100.0 * cmp.best_ratio,
        if cmp.better + cmp.equal >= cmp.worse { "" } else { " (Lovász not ahead)" }
    );
    report(
        10,
        rep.best <= spectral_ratio && cmp.better + cmp.equal + cmp.worse == 11 && secs < 300.0,
        format!(
            "{edges} edges; best-of-20 {:.6} vs spectral threshold {spectral_ratio:.6} \
             (avg {:.6}, top-10 {:.6}); solves {solve_secs:.1}s, total {secs:.1}s",
            rep.best, rep.avg, rep.top10_avg
        ),
    );
}
