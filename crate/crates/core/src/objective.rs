//! The ratio objective `F = (R1 - R2) / (S1 - S2)` and the inner objective
//!
//! ```text
//! Φ(u) = R1(u) - <u, r2(f)> + λ (S2(u) - <u, s1(f)>) - c <u, g(f)>
//! ```
//!
//! built from subgradients taken at the current iterate `f`.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::graph::Graph;
use crate::setfn::Extension;

/// Relative tolerance below which the denominator is treated as zero.
const DEGENERATE_REL: f64 = 1e-12;

/// A convex, positively one-homogeneous functional with a subgradient oracle.
///
/// Implementations may panic when `f` has the wrong length; the public entry
/// points of this crate check dimensions first.
pub trait Functional: Send + Sync {
    fn value(&self, f: &[f64]) -> f64;
    fn subgradient(&self, f: &[f64]) -> Vec<f64>;
}

/// Graph total variation as a [`Functional`].
#[derive(Debug, Clone)]
pub struct TotalVariation(pub Arc<Graph>);

impl Functional for TotalVariation {
    fn value(&self, f: &[f64]) -> f64 {
        self.0.tv_unchecked(f)
    }

    fn subgradient(&self, f: &[f64]) -> Vec<f64> {
        self.0.tv_subgradient_unchecked(f)
    }
}

impl Functional for Extension {
    fn value(&self, f: &[f64]) -> f64 {
        Extension::value(self, f)
    }

    fn subgradient(&self, f: &[f64]) -> Vec<f64> {
        Extension::subgradient(self, f)
    }
}

/// `scale * inner`, for `scale >= 0`.
pub struct Scaled<T> {
    pub scale: f64,
    pub inner: T,
}

impl<T: Functional> Functional for Scaled<T> {
    fn value(&self, f: &[f64]) -> f64 {
        self.scale * self.inner.value(f)
    }

    fn subgradient(&self, f: &[f64]) -> Vec<f64> {
        let mut s = self.inner.subgradient(f);
        s.iter_mut().for_each(|x| *x *= self.scale);
        s
    }
}

/// The constraint function `G` bounding the inner problem.
///
/// Both variants have the Euclidean unit ball as sublevel set `{G <= 1}`;
/// they differ in degree and subgradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// `|f|_2`, degree 1.
    L2,
    /// `|f|_2^2`, degree 2.
    L2Squared,
}

impl Constraint {
    pub fn degree(self) -> f64 {
        match self {
            Self::L2 => 1.0,
            Self::L2Squared => 2.0,
        }
    }

    pub fn value(self, f: &[f64]) -> f64 {
        let sq = norm2_sq(f);
        match self {
            Self::L2 => sq.sqrt(),
            Self::L2Squared => sq,
        }
    }

    /// `g(f)`; for `L2` at the origin the zero vector is returned.
    pub fn subgradient(self, f: &[f64]) -> Vec<f64> {
        match self {
            Self::L2 => {
                let norm = norm2(f);
                if norm == 0.0 {
                    vec![0.0; f.len()]
                } else {
                    f.iter().map(|x| x / norm).collect()
                }
            }
            Self::L2Squared => f.iter().map(|x| 2.0 * x).collect(),
        }
    }

    /// Rescales `f` onto the level set `G = 1`.
    pub fn normalize(self, f: &[f64]) -> Result<Vec<f64>> {
        let norm = norm2(f);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Degenerate("cannot normalize a zero vector".into()));
        }
        Ok(f.iter().map(|x| x / norm).collect())
    }
}

/// Subgradients at the current iterate that define one inner problem.
#[derive(Debug, Clone)]
pub struct Subgradients {
    pub r2: Option<Vec<f64>>,
    pub s1: Vec<f64>,
    pub g: Vec<f64>,
}

/// `F = R / S` with `R1 = TV` on a graph.
///
/// All shipped cut objectives have `R2 = S2 = 0`; the optional parts exist
/// for objectives that need a nontrivial d.c. split.
#[derive(Clone)]
pub struct RatioObjective {
    graph: Arc<Graph>,
    tv: TotalVariation,
    s1: Extension,
    r2: Option<Arc<dyn Functional>>,
    s2: Option<Arc<dyn Functional>>,
}

impl fmt::Debug for RatioObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RatioObjective")
            .field("n", &self.graph.n())
            .field("s1", &self.s1)
            .field("r2", &self.r2.is_some())
            .field("s2", &self.s2.is_some())
            .finish()
    }
}

impl RatioObjective {
    /// Balanced-cut objective `TV(f) / S(f)`. The extension must be convex
    /// and a custom base is validated against the graph size.
    pub fn cut(graph: Arc<Graph>, extension: Extension) -> Result<Self> {
        if !extension.is_convex() {
            return Err(Error::Unsupported(format!(
                "the Lovász extension of non-submodular `{}` is not convex",
                extension.base().name()
            )));
        }
        extension.base().validate(graph.n())?;
        Ok(Self {
            tv: TotalVariation(graph.clone()),
            graph,
            s1: extension,
            r2: None,
            s2: None,
        })
    }

    /// Adds convex one-homogeneous parts `R2` and `S2`.
    pub fn with_dc_parts(
        mut self,
        r2: Option<Arc<dyn Functional>>,
        s2: Option<Arc<dyn Functional>>,
    ) -> Self {
        self.r2 = r2;
        self.s2 = s2;
        self
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn r1(&self) -> &TotalVariation {
        &self.tv
    }

    pub fn s1(&self) -> &Extension {
        &self.s1
    }

    pub fn r2(&self) -> Option<&Arc<dyn Functional>> {
        self.r2.as_ref()
    }

    pub fn s2(&self) -> Option<&Arc<dyn Functional>> {
        self.s2.as_ref()
    }

    /// `R(f) = R1(f) - R2(f)`; errors if it is negative beyond rounding.
    pub fn numerator(&self, f: &[f64]) -> Result<f64> {
        check_len(self.n(), f.len())?;
        let r1 = self.tv.value(f);
        let r = r1 - self.r2.as_ref().map_or(0.0, |p| p.value(f));
        if r < -DEGENERATE_REL * (1.0 + r1) {
            return Err(Error::Degenerate(format!(
                "numerator R(f) = {r} is negative"
            )));
        }
        Ok(r.max(0.0))
    }

    /// `S(f) = S1(f) - S2(f)`; errors if it is negative beyond rounding.
    pub fn denominator(&self, f: &[f64]) -> Result<f64> {
        check_len(self.n(), f.len())?;
        let s1 = self.s1.value(f);
        let s = s1 - self.s2.as_ref().map_or(0.0, |p| p.value(f));
        if s < -DEGENERATE_REL * (1.0 + s1) {
            return Err(Error::Degenerate(format!(
                "denominator S(f) = {s} is negative"
            )));
        }
        Ok(s.max(0.0))
    }

    /// Scale below which `S(f)` counts as zero.
    fn degenerate_threshold(&self, f: &[f64]) -> f64 {
        let inf = f.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        DEGENERATE_REL * inf * self.n() as f64
    }

    /// Whether `S(f)` is (numerically) zero, making `F(f)` undefined.
    pub fn is_degenerate(&self, f: &[f64]) -> Result<bool> {
        Ok(self.denominator(f)? <= self.degenerate_threshold(f))
    }

    /// `F(f) = R(f) / S(f)`.
    pub fn ratio_value(&self, f: &[f64]) -> Result<f64> {
        let s = self.denominator(f)?;
        if s <= self.degenerate_threshold(f) {
            return Err(Error::Degenerate("S(f) = 0, the ratio is undefined".into()));
        }
        Ok(self.numerator(f)? / s)
    }

    /// Subgradients `r2(f)`, `s1(f)`, `g(f)` at the iterate `f`.
    pub fn subgradients(&self, constraint: Constraint, f: &[f64]) -> Result<Subgradients> {
        check_len(self.n(), f.len())?;
        Ok(Subgradients {
            r2: self.r2.as_ref().map(|p| p.subgradient(f)),
            s1: self.s1.subgradient(f),
            g: constraint.subgradient(f),
        })
    }

    /// `v = r2(f) + λ s1(f) + c g(f)`, so that
    /// `Φ(u) = R1(u) + λ S2(u) - <u, v>`.
    pub fn linear_term(&self, sub: &Subgradients, lambda: f64, c: f64) -> Vec<f64> {
        let mut v: Vec<f64> = sub
            .s1
            .iter()
            .zip(&sub.g)
            .map(|(s, g)| lambda * s + c * g)
            .collect();
        if let Some(r2) = &sub.r2 {
            v.iter_mut().zip(r2).for_each(|(x, r)| *x += r);
        }
        v
    }

    /// Inner objective `Φ(u)` for the iterate whose subgradients are `sub`.
    pub fn inner_objective_value(
        &self,
        u: &[f64],
        sub: &Subgradients,
        lambda: f64,
        c: f64,
    ) -> Result<f64> {
        check_len(self.n(), u.len())?;
        check_len(self.n(), sub.s1.len())?;
        check_len(self.n(), sub.g.len())?;
        if let Some(r2) = &sub.r2 {
            check_len(self.n(), r2.len())?;
        }
        let v = self.linear_term(sub, lambda, c);
        let s2 = self.s2.as_ref().map_or(0.0, |p| p.value(u));
        Ok(self.tv.value(u) + lambda * s2 - dot(u, &v))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2_sq(f: &[f64]) -> f64 {
    f.iter().map(|x| x * x).sum()
}

pub(crate) fn norm2(f: &[f64]) -> f64 {
    norm2_sq(f).sqrt()
}
