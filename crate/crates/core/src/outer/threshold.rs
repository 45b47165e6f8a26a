use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::setfn::BalanceFunction;

/// Best super-level set `C_t = {i : f_i > t}` of `f` under
/// `cut(C_t, C̄_t) / Ŝ(C_t)`.
///
/// Sweeps the vertices in descending order of `f`, updating the cut
/// incrementally, and only scores sets that are genuine thresholds (no tie
/// split). `∅`, `V` and sets with `Ŝ = 0` are skipped; among equal ratios
/// the smallest set wins. The returned ratio is recomputed from scratch for
/// the returned set.
pub fn optimal_threshold(g: &Graph, b: &BalanceFunction, f: &[f64]) -> Result<(VertexSet, f64)> {
    let n = g.n();
    check_len(n, f.len())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| f[j].total_cmp(&f[i]));

    let mut set = VertexSet::empty(n);
    let mut cut = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for k in 0..n.saturating_sub(1) {
        let v = order[k];
        for (j, w) in g.neighbors(v) {
            if set.contains(j) {
                cut -= w;
            } else {
                cut += w;
            }
        }
        set.insert(v);
        if f[order[k + 1]] >= f[v] {
            continue;
        }
        let balance = match b.value_by_size(n, k + 1) {
            Some(s) => s,
            None => b.balance_set_value(&set)?,
        };
        if balance <= 0.0 {
            continue;
        }
        let ratio = cut.max(0.0) / balance;
        if best.is_none_or(|(_, r)| ratio < r) {
            best = Some((k + 1, ratio));
        }
    }

    let (size, _) = best.ok_or_else(|| {
        Error::Degenerate("no threshold set with positive balance (is f constant?)".into())
    })?;
    let best_set = VertexSet::from_members(n, order[..size].iter().copied());
    let ratio = g.cut_value(&best_set)? / b.balance_set_value(&best_set)?;
    Ok((best_set, ratio))
}

/// `cut(A, Ā) / Ŝ(A)`.
pub fn set_ratio(g: &Graph, b: &BalanceFunction, a: &VertexSet) -> Result<f64> {
    let balance = b.balance_set_value(a)?;
    if balance <= 0.0 {
        return Err(Error::Degenerate(format!("Ŝ({a}) = 0")));
    }
    Ok(g.cut_value(a)? / balance)
}
