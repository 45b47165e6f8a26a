use super::{lovasz_subgradient, lovasz_value, BalanceFunction};
use crate::error::{Error, Result};

/// Which continuous extension of the balancing function to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionKind {
    Lovasz,
    /// `(n/2) * |f - mean(f) 1|_1`, an extension of `|A| |Ā|`.
    ScaledMean,
    /// `sum_i |f_i - median(f)|`, an extension of `min(|A|, |Ā|)`.
    Median,
}

/// A one-homogeneous, even, shift-invariant extension `S` of a balancing
/// function, agreeing with `Ŝ` on indicator vectors.
#[derive(Debug, Clone)]
pub struct Extension {
    base: BalanceFunction,
    kind: ExtensionKind,
}

impl Extension {
    /// The mean and median extensions only reproduce the ratio cut and the
    /// ratio Cheeger cut respectively; other pairings are rejected.
    pub fn new(base: BalanceFunction, kind: ExtensionKind) -> Result<Self> {
        let ok = match kind {
            ExtensionKind::Lovasz => true,
            ExtensionKind::ScaledMean => matches!(base, BalanceFunction::RatioCut),
            ExtensionKind::Median => matches!(base, BalanceFunction::RatioCheeger),
        };
        if !ok {
            return Err(Error::Unsupported(format!(
                "the {kind:?} extension does not extend the {} balancing function",
                base.name()
            )));
        }
        Ok(Self { base, kind })
    }

    pub fn lovasz(base: BalanceFunction) -> Self {
        Self {
            base,
            kind: ExtensionKind::Lovasz,
        }
    }

    pub fn base(&self) -> &BalanceFunction {
        &self.base
    }

    pub fn kind(&self) -> ExtensionKind {
        self.kind
    }

    /// Convex whenever the base is submodular (Lovász) or always (mean, median).
    pub fn is_convex(&self) -> bool {
        self.kind != ExtensionKind::Lovasz || self.base.is_submodular()
    }

    pub fn value(&self, f: &[f64]) -> f64 {
        extension_value(self, f)
    }

    pub fn subgradient(&self, f: &[f64]) -> Vec<f64> {
        extension_subgradient(self, f)
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn mean(f: &[f64]) -> f64 {
    f.iter().sum::<f64>() / f.len() as f64
}

/// Lower middle order statistic.
fn lower_median(f: &[f64]) -> f64 {
    let mut sorted = f.to_vec();
    let mid = (f.len() - 1) / 2;
    let (_, m, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

pub fn extension_value(e: &Extension, f: &[f64]) -> f64 {
    if f.is_empty() {
        return 0.0;
    }
    match e.kind {
        ExtensionKind::Lovasz => lovasz_value(&e.base, f),
        ExtensionKind::ScaledMean => {
            let m = mean(f);
            0.5 * f.len() as f64 * f.iter().map(|x| (x - m).abs()).sum::<f64>()
        }
        ExtensionKind::Median => {
            let m = lower_median(f);
            f.iter().map(|x| (x - m).abs()).sum()
        }
    }
}

/// A subgradient of the extension at `f`; always sums to zero.
pub fn extension_subgradient(e: &Extension, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    if n == 0 {
        return Vec::new();
    }
    match e.kind {
        ExtensionKind::Lovasz => lovasz_subgradient(&e.base, f),
        ExtensionKind::ScaledMean => {
            let m = mean(f);
            let signs: Vec<f64> = f.iter().map(|x| sign(x - m)).collect();
            let centre = mean(&signs);
            let scale = 0.5 * n as f64;
            signs.iter().map(|s| scale * (s - centre)).collect()
        }
        ExtensionKind::Median => {
            let m = lower_median(f);
            let mut s: Vec<f64> = f.iter().map(|x| sign(x - m)).collect();
            // Ties at the median absorb the imbalance between strict signs.
            let below = s.iter().filter(|&&x| x < 0.0).count() as i64;
            let above = s.iter().filter(|&&x| x > 0.0).count() as i64;
            let mut excess = below - above;
            let fill = if excess > 0 { 1.0 } else { -1.0 };
            for (i, x) in f.iter().enumerate() {
                if excess == 0 {
                    break;
                }
                if *x == m {
                    s[i] = fill;
                    excess -= fill as i64;
                }
            }
            debug_assert_eq!(excess, 0, "ties at the median always balance the signs");
            s
        }
    }
}
