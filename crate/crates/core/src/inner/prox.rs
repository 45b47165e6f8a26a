use crate::error::{check_len, Error, Result};
use crate::graph::Graph;
use crate::objective::{dot, norm2, norm2_sq};

/// Proximal form of the inner step:
///
/// ```text
/// h = argmin_u  TV(u) + (λ / 2c) |u - (f + c v)|_2^2,   returns h / |h|_2
/// ```
///
/// solved by PDHG on the strongly convex primal. Stops once the duality gap
/// drops below `tol (1 + |P(u)|)`, then polishes: a gap `ε` only places the
/// iterate within `sqrt(2ε / μ)` of the minimizer (`μ = λ / c`), so
/// neighbours closer than a multiple of that distance are merged and the
/// problem restricted to the resulting level sets is solved in closed form.
/// The polished point is kept when it respects the assumed order of
/// neighbouring level sets and does not increase the objective.
pub fn solve_inner_prox_form(
    g: &Graph,
    f: &[f64],
    v: &[f64],
    lambda: f64,
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    check_len(g.n(), f.len())?;
    check_len(g.n(), v.len())?;
    if !(c > 0.0 && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "proximal form needs c > 0 and λ > 0, got c = {c}, λ = {lambda}"
        )));
    }
    let n = g.n();
    let mu = lambda / c;
    let z: Vec<f64> = f.iter().zip(v).map(|(a, b)| a + c * b).collect();
    let edges = g.edges();
    let step = 0.99 / (2.0 * g.max_degree().max(1) as f64).sqrt();
    let (sigma, tau) = (step, step);

    let mut u = z.clone();
    let mut u_bar = z.clone();
    let mut alpha = vec![0.0; edges.len()];
    let mut bt_alpha = vec![0.0; n];

    let apply_bt = |alpha: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (a, e) in alpha.iter().zip(edges) {
            out[e.u] += a;
            out[e.v] -= a;
        }
    };

    let mut gap = f64::INFINITY;
    for it in 1..=max_iter {
        for (a, e) in alpha.iter_mut().zip(edges) {
            *a = (*a + sigma * (u_bar[e.u] - u_bar[e.v])).clamp(-e.w, e.w);
        }
        apply_bt(&alpha, &mut bt_alpha);
        for i in 0..n {
            let next = (u[i] - tau * bt_alpha[i] + tau * mu * z[i]) / (1.0 + tau * mu);
            u_bar[i] = 2.0 * next - u[i];
            u[i] = next;
        }
        if it % 10 == 0 {
            let diff: Vec<f64> = u.iter().zip(&z).map(|(a, b)| a - b).collect();
            let primal = g.tv_unchecked(&u) + 0.5 * mu * norm2_sq(&diff);
            let dual = dot(&bt_alpha, &z) - norm2_sq(&bt_alpha) / (2.0 * mu);
            gap = primal - dual;
            if gap <= tol * (1.0 + primal.abs()) {
                break;
            }
        }
    }

    let radius = (2.0 * gap.max(0.0) / mu).sqrt();
    if let Some(polished) = polish(g, &u, &z, mu, 4.0 * radius + 1e-12) {
        let value = |x: &[f64]| {
            let diff: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
            g.tv_unchecked(x) + 0.5 * mu * norm2_sq(&diff)
        };
        if value(&polished) <= value(&u) {
            u = polished;
        }
    }

    let norm = norm2(&u);
    if !(norm > 0.0) {
        return Err(Error::Numerical(
            "proximal step returned the zero vector".into(),
        ));
    }
    Ok(u.iter().map(|x| x / norm).collect())
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Exact minimizer of `TV(x) + (μ/2)|x - z|^2` among vectors constant on
/// the clusters of `u` (edges with `|u_i - u_j| <= merge`) and ordered like
/// the cluster means of `u`. `None` if the closed form breaks that order.
fn polish(g: &Graph, u: &[f64], z: &[f64], mu: f64, merge: f64) -> Option<Vec<f64>> {
    let n = u.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for e in g.edges() {
        if (u[e.u] - u[e.v]).abs() <= merge {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            parent[a] = b;
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut size = vec![0.0; n];
    let mut u_mean = vec![0.0; n];
    let mut z_sum = vec![0.0; n];
    for i in 0..n {
        size[roots[i]] += 1.0;
        u_mean[roots[i]] += u[i];
        z_sum[roots[i]] += z[i];
    }
    for r in 0..n {
        if size[r] > 0.0 {
            u_mean[r] /= size[r];
        }
    }
    // Net TV subgradient pushed onto each cluster by the crossing edges.
    let mut push = vec![0.0; n];
    let mut crossing = Vec::new();
    for e in g.edges() {
        let (a, b) = (roots[e.u], roots[e.v]);
        if a == b {
            continue;
        }
        let sign = (u_mean[a] - u_mean[b]).signum();
        if sign == 0.0 {
            return None;
        }
        push[a] += e.w * sign;
        push[b] -= e.w * sign;
        crossing.push((a, b, sign));
    }
    let value: Vec<f64> = (0..n)
        .map(|r| {
            if size[r] > 0.0 {
                (z_sum[r] - push[r] / mu) / size[r]
            } else {
                0.0
            }
        })
        .collect();
    if crossing
        .iter()
        .any(|&(a, b, sign)| (value[a] - value[b]) * sign <= 0.0)
    {
        return None;
    }
    Some(roots.iter().map(|&r| value[r]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominant_quadratic_returns_normalized_shift() {
        let g = Graph::path(3);
        let f = [0.5, -0.5, 0.0];
        let v = [0.1, 0.2, -0.3];
        let c = 1e-6;
        let out = solve_inner_prox_form(&g, &f, &v, 1.0, c, 1e-14, 10_000).unwrap();
        let z: Vec<f64> = f.iter().zip(&v).map(|(a, b)| a + c * b).collect();
        let nz = norm2(&z);
        for (o, zi) in out.iter().zip(&z) {
            assert!((o - zi / nz).abs() < 1e-4);
        }
    }

    #[test]
    fn two_vertex_fixed_point() {
        let g = Graph::path(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = [-h, h];
        for c in [0.1, 1.0, 10.0] {
            let out = solve_inner_prox_form(&g, &f, &[-1.0, 1.0], 1.0, c, 1e-14, 100_000).unwrap();
            assert!(
                (out[0] + h).abs() < 1e-9 && (out[1] - h).abs() < 1e-9,
                "c={c}: {out:?}"
            );
        }
    }

    #[test]
    fn polishing_recovers_the_exact_minimizer() {
        // P3 with z = (0, 0, 3) and μ = 1: x = (0.5, 0.5, 2) in closed form.
        let g = Graph::path(3);
        let z = [0.0, 0.0, 3.0];
        let rough = [0.5 + 1e-7, 0.5 - 1e-7, 2.0 + 3e-7];
        let x = polish(&g, &rough, &z, 1.0, 1e-6).unwrap();
        assert_eq!(x, vec![0.5, 0.5, 2.0]);
        // Wrong order assumptions are refused.
        assert!(polish(&g, &[0.0, 1.0, 0.0], &[5.0, 0.0, 5.0], 100.0, 1e-9).is_none());
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let g = Graph::path(2);
        assert!(solve_inner_prox_form(&g, &[1.0, 0.0], &[0.0, 0.0], 1.0, 0.0, 1e-8, 10).is_err());
        assert!(solve_inner_prox_form(&g, &[1.0, 0.0], &[0.0, 0.0], 0.0, 1.0, 1e-8, 10).is_err());
    }
}
