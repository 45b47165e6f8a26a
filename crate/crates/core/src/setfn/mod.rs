//! Symmetric balancing set functions and their continuous extensions.
//!
//! The Lovász extension of a set function `Ŝ` with `Ŝ(∅) = 0` is evaluated
//! on the sorted threshold chain of `f`: with `f` sorted ascending and
//! `C_i` the set of the `n - i` largest entries,
//! `S(f) = sum_{i=1}^{n-1} Ŝ(C_i) (f_(i+1) - f_(i)) + f_(1) Ŝ(V)`.
//! The greedy subgradient assigns `Ŝ(C_{i-1}) - Ŝ(C_i)` to the vertex at
//! sorted position `i`.

mod extension;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use extension::{extension_subgradient, extension_value, Extension, ExtensionKind};

use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// Oracle type for user-supplied balancing functions.
pub type SetOracle = Arc<dyn Fn(&VertexSet) -> f64 + Send + Sync>;

/// Sizes up to which [`BalanceFunction::validate`] enumerates every subset.
const EXHAUSTIVE_LIMIT: usize = 12;
const VALIDATION_SAMPLES: usize = 4096;

/// A symmetric, nonnegative balancing function `Ŝ` with `Ŝ(∅) = Ŝ(V) = 0`.
#[derive(Clone)]
pub enum BalanceFunction {
    /// `Ŝ(A) = |A| |Ā|`.
    RatioCut,
    /// `Ŝ(A) = min(|A|, |Ā|)`.
    RatioCheeger,
    Custom {
        name: String,
        oracle: SetOracle,
        submodular: bool,
    },
}

impl fmt::Debug for BalanceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RatioCut => write!(f, "RatioCut"),
            Self::RatioCheeger => write!(f, "RatioCheeger"),
            Self::Custom {
                name, submodular, ..
            } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("submodular", submodular)
                .finish(),
        }
    }
}

impl BalanceFunction {
    pub fn custom<F>(name: impl Into<String>, submodular: bool, oracle: F) -> Self
    where
        F: Fn(&VertexSet) -> f64 + Send + Sync + 'static,
    {
        Self::Custom {
            name: name.into(),
            oracle: Arc::new(oracle),
            submodular,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::RatioCut => "ratio-cut",
            Self::RatioCheeger => "ratio-cheeger",
            Self::Custom { name, .. } => name,
        }
    }

    pub fn is_submodular(&self) -> bool {
        match self {
            Self::RatioCut | Self::RatioCheeger => true,
            Self::Custom { submodular, .. } => *submodular,
        }
    }

    /// Value for a set of cardinality `k` in a ground set of size `n`, when
    /// the function only depends on cardinality.
    pub fn value_by_size(&self, n: usize, k: usize) -> Option<f64> {
        let (k, rest) = (k as f64, (n - k) as f64);
        match self {
            Self::RatioCut => Some(k * rest),
            Self::RatioCheeger => Some(k.min(rest)),
            Self::Custom { .. } => None,
        }
    }

    pub(crate) fn value_unchecked(&self, a: &VertexSet) -> f64 {
        match self {
            Self::Custom { oracle, .. } => oracle(a),
            _ => self
                .value_by_size(a.n(), a.len())
                .expect("cardinality based"),
        }
    }

    /// `Ŝ(A)`. Custom oracles are checked for symmetry and nonnegativity on
    /// every call.
    pub fn balance_set_value(&self, a: &VertexSet) -> Result<f64> {
        let value = self.value_unchecked(a);
        if let Self::Custom { name, oracle, .. } = self {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::SetFunction(format!(
                    "`{name}` returned {value} for {a}"
                )));
            }
            let other = oracle(&a.complement());
            if (value - other).abs() > 1e-12 * (1.0 + value.abs()) {
                return Err(Error::SetFunction(format!(
                    "`{name}` is not symmetric: {value} for {a} but {other} for its complement"
                )));
            }
        }
        Ok(value)
    }

    /// Checks `Ŝ(∅) = Ŝ(V) = 0`, symmetry and nonnegativity: exhaustively for
    /// `n <= 12`, on seeded random subsets otherwise.
    pub fn validate(&self, n: usize) -> Result<()> {
        let zero_at = |set: VertexSet| -> Result<()> {
            let v = self.value_unchecked(&set);
            if v != 0.0 {
                return Err(Error::SetFunction(format!(
                    "`{}` must vanish on ∅ and V, got {v} for {set}",
                    self.name()
                )));
            }
            Ok(())
        };
        zero_at(VertexSet::empty(n))?;
        zero_at(VertexSet::full(n))?;
        if !matches!(self, Self::Custom { .. }) {
            return Ok(());
        }
        if n <= EXHAUSTIVE_LIMIT {
            for bits in 0..(1u64 << n) {
                self.balance_set_value(&VertexSet::from_bits(n, bits))?;
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5e7f);
            for _ in 0..VALIDATION_SAMPLES {
                let mask = (0..n).map(|_| rng.random_bool(0.5)).collect();
                self.balance_set_value(&VertexSet::from_mask(mask))?;
            }
        }
        Ok(())
    }

    /// `Ŝ(C_0), ..., Ŝ(C_n)` along a chain where `C_i` holds the vertices at
    /// positions `i..n` of `order` (so `C_0 = V`, `C_n = ∅`).
    pub(crate) fn chain_values(&self, order: &[usize]) -> Vec<f64> {
        let n = order.len();
        match self {
            Self::Custom { oracle, .. } => {
                let mut set = VertexSet::full(n);
                let mut out = Vec::with_capacity(n + 1);
                out.push(oracle(&set));
                for &v in order {
                    set.remove(v);
                    out.push(oracle(&set));
                }
                out
            }
            _ => (0..=n)
                .map(|i| self.value_by_size(n, n - i).expect("cardinality based"))
                .collect(),
        }
    }
}

/// Indices of `f` in ascending order, ties kept in index order.
pub(crate) fn ascending_order(f: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
    order
}

/// Lovász extension of `b` evaluated at `f`.
pub fn lovasz_value(b: &BalanceFunction, f: &[f64]) -> f64 {
    if f.is_empty() {
        return 0.0;
    }
    let order = ascending_order(f);
    let chain = b.chain_values(&order);
    let mut value = f[order[0]] * chain[0];
    for i in 1..order.len() {
        value += chain[i] * (f[order[i]] - f[order[i - 1]]);
    }
    value
}

/// Greedy subgradient of the Lovász extension at `f`.
///
/// Satisfies `<f, s> = S(f)` and `<s, 1_{C_i}> = Ŝ(C_i)` for every set of
/// the sorted chain.
pub fn lovasz_subgradient(b: &BalanceFunction, f: &[f64]) -> Vec<f64> {
    let order = ascending_order(f);
    let chain = b.chain_values(&order);
    let mut s = vec![0.0; f.len()];
    for (i, &v) in order.iter().enumerate() {
        s[v] = chain[i] - chain[i + 1];
    }
    s
}
