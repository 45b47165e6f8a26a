//! Second eigenvector of the unnormalized graph Laplacian `L = D - W`,
//! used to initialize the solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::objective::{dot, norm2};

/// Implicit Laplacian operator over a graph.
#[derive(Debug, Clone, Copy)]
pub struct LaplacianView<'g> {
    graph: &'g Graph,
}

impl<'g> LaplacianView<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self { graph }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.graph.laplacian_apply(x, out);
    }

    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let mut lx = vec![0.0; x.len()];
        self.apply(x, &mut lx);
        dot(x, &lx) / dot(x, x)
    }

    /// `|L x - (x^T L x) x|_2` for unit `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut lx = vec![0.0; x.len()];
        self.apply(x, &mut lx);
        let rho = dot(x, &lx);
        lx.iter()
            .zip(x)
            .map(|(l, xi)| (l - rho * xi).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn deflate_and_normalize(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = norm2(x);
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Unit-norm, mean-zero eigenvector of the second smallest Laplacian
/// eigenvalue, by power iteration on `cI - L` with the constant vector
/// deflated (`c = 1 + max weighted degree`).
///
/// Stops once `|Lv - (v^T L v) v|_2 <= tol`. The sign is fixed so that the
/// first clearly nonzero component is positive.
pub fn second_eigenvector(g: &Graph, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "the second eigenvector needs at least two vertices".into(),
        ));
    }
    let (_, components) = g.components();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let lap = LaplacianView::new(g);
    let shift = 1.0 + g.max_weighted_degree();
    let mut rng = ChaCha8Rng::seed_from_u64(0x2e16);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    deflate_and_normalize(&mut x);
    let mut lx = vec![0.0; n];
    let mut converged = false;
    for it in 0..max_iter {
        lap.apply(&x, &mut lx);
        if it % 10 == 0 {
            let rho = dot(&x, &lx);
            let res = lx
                .iter()
                .zip(&x)
                .map(|(l, xi)| (l - rho * xi).powi(2))
                .sum::<f64>()
                .sqrt();
            if res <= tol {
                converged = true;
                break;
            }
        }
        for (xi, li) in x.iter_mut().zip(&lx) {
            *xi = shift * *xi - li;
        }
        deflate_and_normalize(&mut x);
    }
    if !converged && lap.residual(&x) > tol {
        return Err(Error::Numerical(format!(
            "power iteration did not reach residual {tol} in {max_iter} iterations"
        )));
    }

    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertices() {
        let v = second_eigenvector(&Graph::path(2), 1e-12, 10_000).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0] - h).abs() < 1e-10 && (v[1] + h).abs() < 1e-10);
        let rq = LaplacianView::new(&Graph::path(2)).rayleigh_quotient(&v);
        assert!((rq - 2.0).abs() < 1e-10);
    }

    #[test]
    fn path_of_three() {
        let g = Graph::path(3);
        let v = second_eigenvector(&g, 1e-12, 100_000).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [h, 0.0, -h];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{v:?}");
        }
        assert!((LaplacianView::new(&g).rayleigh_quotient(&v) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(
            second_eigenvector(&g, 1e-8, 100),
            Err(Error::Disconnected { components: 2 })
        ));
    }
}
