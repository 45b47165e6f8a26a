use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Graph;
use crate::error::{Error, Result};

/// Parameters of the two-moons k-nearest-neighbor graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoMoons {
    pub n: usize,
    pub k: usize,
    /// Gaussian kernel width; `None` uses the mean distance to the k-th neighbor.
    pub sigma: Option<f64>,
    pub noise: f64,
    pub seed: u64,
}

impl TwoMoons {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        Self {
            n,
            k,
            sigma: None,
            noise: 0.1,
            seed,
        }
    }

    pub fn build(&self) -> Result<(Graph, Vec<u8>)> {
        two_moons_graph(self.n, self.k, self.sigma, self.noise, self.seed)
    }
}

/// Symmetrized k-NN graph over `n` noisy points on two interleaved
/// half-circles, with weights `exp(-|x_i - x_j|^2 / (2 sigma^2))`.
///
/// The first `n / 2` points lie on the upper unit half-circle, the rest on
/// the lower one centered at `(1, 0.5)`. Returns the graph and the moon
/// label of each vertex.
pub fn two_moons_graph(
    n: usize,
    k: usize,
    sigma: Option<f64>,
    noise: f64,
    seed: u64,
) -> Result<(Graph, Vec<u8>)> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "two-moons needs a positive even point count, got {n}"
        )));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "neighbor count k = {k} must satisfy 1 <= k < n = {n}"
        )));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid noise level {noise}"
        )));
    }
    if let Some(s) = sigma {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidArgument(format!("invalid kernel width {s}")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let half = n / 2;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let t = rng.random_range(0.0..std::f64::consts::PI);
        let (x, y) = if i < half {
            (t.cos(), t.sin())
        } else {
            (1.0 - t.cos(), 0.5 - t.sin())
        };
        let dx = noise * normal.sample(&mut rng);
        let dy = noise * normal.sample(&mut rng);
        points.push([x + dx, y + dy]);
        labels.push(u8::from(i >= half));
    }

    // Brute-force k-NN; ties resolved by index so the graph is reproducible.
    let mut knn: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for (i, p) in points.iter().enumerate() {
        scratch.clear();
        scratch.extend(
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, q)| {
                    let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                    (d2, j)
                }),
        );
        let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        scratch.select_nth_unstable_by(k - 1, by_dist);
        let nearest = &mut scratch[..k];
        nearest.sort_by(by_dist);
        knn.push(nearest.iter().map(|&(d2, j)| (j, d2)).collect());
    }

    let sigma =
        sigma.unwrap_or_else(|| knn.iter().map(|nb| nb[k - 1].1.sqrt()).sum::<f64>() / n as f64);
    let sigma = if sigma > 0.0 { sigma } else { 1.0 };

    let mut pairs: Vec<(usize, usize, f64)> = knn
        .iter()
        .enumerate()
        .flat_map(|(i, nb)| nb.iter().map(move |&(j, d2)| (i.min(j), i.max(j), d2)))
        .collect();
    pairs.sort_by_key(|p| (p.0, p.1));
    pairs.dedup_by(|a, b| (a.0, a.1) == (b.0, b.1));
    let edges = pairs.into_iter().map(|(i, j, d2)| {
        let w = (-d2 / (2.0 * sigma * sigma)).exp().max(f64::MIN_POSITIVE);
        (i, j, w)
    });
    Ok((Graph::from_edges(n, edges)?, labels))
}
