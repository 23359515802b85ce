//! Step-by-step propagation of the simple random walk on X through the
//! neighbour oracle. Since X itself is queried, the coefficients are those of
//! the infinite graph, not of a truncation.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::cellmodel::{SelfSimilarGraph, VertexKey, VertexRefError};

/// `out[k][y] = p^(k)(x, y)` for `k <= order`, exact.
pub(crate) fn exact_distributions(
    g: &SelfSimilarGraph,
    x: &VertexKey,
    order: usize,
) -> Result<Vec<HashMap<VertexKey, BigRational>>, VertexRefError> {
    let mut cur: HashMap<VertexKey, BigRational> = HashMap::from([(x.clone(), BigRational::from_integer(1.into()))]);
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        if k == order {
            out.push(cur);
            break;
        }
        let mut next: HashMap<VertexKey, BigRational> = HashMap::with_capacity(cur.len() * 2);
        for (v, p) in &cur {
            let nb = g.neighbours(v)?;
            let share = p / BigRational::from_integer(BigInt::from(nb.len()));
            for u in nb.iter() {
                *next.entry(u.clone()).or_insert_with(BigRational::zero) += &share;
            }
        }
        out.push(std::mem::replace(&mut cur, next));
    }
    Ok(out)
}

/// Exact coefficients `p^(k)(x, y)` for `k <= order`.
pub(crate) fn exact_series(
    g: &SelfSimilarGraph,
    x: &VertexKey,
    y: &VertexKey,
    order: usize,
) -> Result<Vec<BigRational>, VertexRefError> {
    Ok(exact_distributions(g, x, order)?
        .into_iter()
        .map(|m| m.get(y).cloned().unwrap_or_else(BigRational::zero))
        .collect())
}

/// Floating coefficients `p^(k)(x, ·)` for `k <= order`. Ordered maps keep
/// the summation order, and hence the rounding, reproducible.
pub(crate) fn float_distributions(
    g: &SelfSimilarGraph,
    x: &VertexKey,
    order: usize,
) -> Result<Vec<BTreeMap<VertexKey, f64>>, VertexRefError> {
    let mut cur: BTreeMap<VertexKey, f64> = BTreeMap::from([(x.clone(), 1.0)]);
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        if k == order {
            out.push(cur);
            break;
        }
        let mut next: BTreeMap<VertexKey, f64> = BTreeMap::new();
        for (v, p) in &cur {
            let nb = g.neighbours(v)?;
            let share = p / nb.len() as f64;
            for u in nb.iter() {
                *next.entry(u.clone()).or_insert(0.0) += share;
            }
        }
        out.push(std::mem::replace(&mut cur, next));
    }
    Ok(out)
}
