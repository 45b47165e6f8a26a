#![allow(dead_code)]

use std::sync::Arc;

use balcut::graph::Graph;
use balcut::objective::RatioObjective;
use balcut::setfn::{BalanceFunction, Extension};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph: a random spanning tree plus each other pair with
/// probability `p`, weights uniform in [0.2, 2].
pub fn random_connected_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    for i in 1..n {
        let j = rng.random_range(0..i);
        present[i][j] = true;
        present[j][i] = true;
        edges.push((j, i, rng.random_range(0.2..2.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present[i][j] && rng.random_bool(p) {
                edges.push((i, j, rng.random_range(0.2..2.0)));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn unit(f: &[f64]) -> Vec<f64> {
    let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    f.iter().map(|x| x / norm).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn cut_objective(g: Graph, b: BalanceFunction) -> RatioObjective {
    RatioObjective::cut(Arc::new(g), Extension::lovasz(b)).unwrap()
}

/// Independent `TV(u) - <u, v>`.
pub fn phi(g: &Graph, v: &[f64], u: &[f64]) -> f64 {
    let tv: f64 = g
        .edges()
        .iter()
        .map(|e| e.w * (u[e.u] - u[e.v]).abs())
        .sum();
    tv - dot(u, v)
}

fn sphere_point(theta: f64, z: f64) -> [f64; 3] {
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * theta.cos(), r * theta.sin(), z]
}

/// `min_{|u| <= 1} Φ(u)` for a 3-vertex graph: a Fibonacci grid of 10^4
/// directions, then a shrinking compass search on the sphere around the
/// best 20 grid points. Φ is piecewise linear with kinks on the great
/// circles `u_i = u_j`, where compass search stalls, so each of those
/// circles is also searched by a 1-D grid plus golden-section zoom. Φ is
/// one-homogeneous, so the ball minimum is `min(0, sphere minimum)`.
pub fn sphere_grid_min(g: &Graph, v: &[f64]) -> f64 {
    assert_eq!(g.n(), 3);
    let count = 10_000;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut grid: Vec<(f64, [f64; 3])> = (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let u = sphere_point(golden * i as f64, z);
            (phi(g, v, &u), u)
        })
        .collect();
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = grid[0].0;
    for &(mut value, mut u) in grid.iter().take(20) {
        let mut step = 0.05;
        while step > 1e-10 {
            let mut improved = false;
            // Tangent basis at u.
            let a = if u[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            let d = dot(&a, &u);
            let t1 = unit(&[a[0] - d * u[0], a[1] - d * u[1], a[2] - d * u[2]]);
            let t2 = [
                u[1] * t1[2] - u[2] * t1[1],
                u[2] * t1[0] - u[0] * t1[2],
                u[0] * t1[1] - u[1] * t1[0],
            ];
            for k in 0..24 {
                let ang = k as f64 * std::f64::consts::PI / 12.0;
                let (c, s) = (ang.cos(), ang.sin());
                let cand = unit(&[
                    u[0] + step * (c * t1[0] + s * t2[0]),
                    u[1] + step * (c * t1[1] + s * t2[1]),
                    u[2] + step * (c * t1[2] + s * t2[2]),
                ]);
                let val = phi(g, v, &cand);
                if val < value {
                    value = val;
                    u = [cand[0], cand[1], cand[2]];
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(value);
    }
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (0, 2, 1)] {
        best = best.min(kink_circle_min(g, v, i, j, k));
    }
    best.min(0.0)
}

fn kink_circle_min(g: &Graph, v: &[f64], i: usize, j: usize, k: usize) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let point = |theta: f64| {
        let mut u = [0.0; 3];
        u[i] = h * theta.cos();
        u[j] = h * theta.cos();
        u[k] = theta.sin();
        u
    };
    let value = |theta: f64| phi(g, v, &point(theta));
    let count = 10_000;
    let width = std::f64::consts::TAU / count as f64;
    let mut samples: Vec<(f64, f64)> = (0..count)
        .map(|s| {
            let t = s as f64 * width;
            (value(t), t)
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = samples[0].0;
    for &(_, t) in samples.iter().take(10) {
        let (mut a, mut b) = (t - width, t + width);
        while b - a > 1e-13 {
            let c = b - ratio * (b - a);
            let d = a + ratio * (b - a);
            if value(c) < value(d) {
                b = d;
            } else {
                a = c;
            }
        }
        best = best.min(value(0.5 * (a + b)));
    }
    best
}
