use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{Polynomial, RatFunError, RationalFunction};

/// Sparse square matrix of exact rationals, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    rows: Vec<BTreeMap<usize, BigRational>>,
}

impl TransitionMatrix {
    pub fn new(n: usize) -> Self {
        Self { rows: vec![BTreeMap::new(); n] }
    }

    pub fn from_dense(dense: &[Vec<BigRational>]) -> Self {
        let mut m = Self::new(dense.len());
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        if v.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        self.rows[i].get(&j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &BigRational)> {
        self.rows[i].iter().map(|(j, v)| (*j, v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.size());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                t.rows[*j].insert(i, v.clone());
            }
        }
        t
    }

    /// Entries in [0,1] and row sums at most 1.
    pub fn validate(&self) -> Result<(), RatFunError> {
        for (i, row) in self.rows.iter().enumerate() {
            let mut sum = BigRational::zero();
            for (j, v) in row {
                if *j >= self.size() {
                    return Err(RatFunError::InvalidMatrix(format!("column {j} out of range")));
                }
                if v.is_negative() || *v > BigRational::one() {
                    return Err(RatFunError::InvalidMatrix(format!("entry ({i},{j}) = {v} outside [0,1]")));
                }
                sum += v;
            }
            if sum > BigRational::one() {
                return Err(RatFunError::InvalidMatrix(format!("row {i} sums to {sum} > 1")));
            }
        }
        Ok(())
    }
}

/// Entries `(I - zQ)^{-1}[r][c]` for `r` in `rows`, `c` in `cols`, exactly.
///
/// Sparse Gaussian elimination over Q(z) with diagonal pivots in minimum-degree
/// order. Diagonal pivots never vanish: every Schur complement of `I - zQ`
/// equals the identity at `z = 0`.
pub fn solve_resolvent(
    q: &TransitionMatrix,
    rows: &[usize],
    cols: &[usize],
) -> Result<Vec<Vec<RationalFunction>>, RatFunError> {
    q.validate()?;
    let n = q.size();
    if let Some(bad) = rows.iter().chain(cols).find(|&&i| i >= n) {
        return Err(RatFunError::InvalidMatrix(format!("index {bad} out of range for size {n}")));
    }
    // Solve against as few right-hand sides as possible.
    let transposed = rows.len() < cols.len();
    let (mat, rhs, out) = if transposed { (q.transpose(), rows, cols) } else { (q.clone(), cols, rows) };
    let sols = solve_columns(&mat, rhs);
    let mut result = vec![vec![RationalFunction::zero(); cols.len()]; rows.len()];
    for (k, sol) in sols.iter().enumerate() {
        for (m, &o) in out.iter().enumerate() {
            let v = sol[o].clone();
            if transposed {
                result[k][m] = v;
            } else {
                result[m][k] = v;
            }
        }
    }
    Ok(result)
}

/// Full solution vectors of `(I - zQ) x = e_c` for each `c` in `rhs`.
fn solve_columns(q: &TransitionMatrix, rhs: &[usize]) -> Vec<Vec<RationalFunction>> {
    let n = q.size();
    let mut a: Vec<BTreeMap<usize, RationalFunction>> = vec![BTreeMap::new(); n];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        a[i].insert(i, RationalFunction::one());
        col_rows[i].insert(i);
        for (j, v) in q.row(i) {
            let entry = RationalFunction::from_polynomial(Polynomial::monomial(-v.clone(), 1));
            let cur = a[i].remove(&j).unwrap_or_else(RationalFunction::zero);
            let next = &cur + &entry;
            if next.is_zero() {
                col_rows[j].remove(&i);
            } else {
                a[i].insert(j, next);
                col_rows[j].insert(i);
            }
        }
    }
    for (k, &c) in rhs.iter().enumerate() {
        a[c].insert(n + k, RationalFunction::one());
    }

    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let p = (0..n)
            .filter(|&i| !eliminated[i])
            .min_by_key(|&i| {
                let r = a[i].range(..n).count() - 1;
                let c = col_rows[i].len() - 1;
                (r * c, i)
            })
            .expect("a remaining pivot");
        let pivot_row = a[p].clone();
        let pivot = pivot_row[&p].clone();
        let targets: Vec<usize> = col_rows[p].iter().copied().filter(|&i| i != p).collect();
        for i in targets {
            let aip = a[i].remove(&p).expect("column structure in sync");
            let factor = aip.checked_div(&pivot).expect("diagonal pivot is nonzero");
            for (&j, v) in pivot_row.iter() {
                if j == p {
                    continue;
                }
                let delta = &factor * v;
                let cur = a[i].remove(&j).unwrap_or_else(RationalFunction::zero);
                let next = &cur - &delta;
                if next.is_zero() {
                    if j < n {
                        col_rows[j].remove(&i);
                    }
                } else {
                    a[i].insert(j, next);
                    if j < n {
                        col_rows[j].insert(i);
                    }
                }
            }
        }
        for &j in pivot_row.keys() {
            if j < n {
                col_rows[j].remove(&p);
            }
        }
        col_rows[p].clear();
        eliminated[p] = true;
        order.push(p);
    }

    (0..rhs.len())
        .into_par_iter()
        .map(|k| {
            let mut x: Vec<Option<RationalFunction>> = vec![None; n];
            for &p in order.iter().rev() {
                let mut s = a[p].get(&(n + k)).cloned().unwrap_or_else(RationalFunction::zero);
                for (&j, v) in a[p].range(..n) {
                    if j != p {
                        s = &s - &(v * x[j].as_ref().expect("later pivot solved"));
                    }
                }
                x[p] = Some(s.checked_div(&a[p][&p]).expect("diagonal pivot is nonzero"));
            }
            x.into_iter().map(|v| v.expect("all unknowns solved")).collect()
        })
        .collect()
}
