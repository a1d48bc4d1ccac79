//! Brute-force reference for small constraint systems.
//!
//! Enumerates every column subset, keeps those with linearly independent
//! columns whose unique solution is nonnegative. These are exactly the
//! vertices of `{A x = b, x >= 0}`. Shares no code with the simplex.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{OgjError, Result};
use crate::joining::ConstraintSystem;
use crate::rational::Rational;

pub const ORACLE_MAX_VARS: usize = 14;

/// Solves `A_S x_S = b` when the columns `S` are independent and the system is consistent.
fn solve_subset(cs: &ConstraintSystem, subset: &[usize]) -> Option<Vec<Rational>> {
    let k = subset.len();
    let mut m: Vec<Vec<Rational>> = cs
        .rows
        .iter()
        .zip(&cs.rhs)
        .map(|(row, b)| {
            let mut r = vec![Rational::zero(); k + 1];
            for (j, a) in row {
                if let Ok(pos) = subset.binary_search(j) {
                    r[pos] = a.clone();
                }
            }
            r[k] = b.clone();
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..k {
        let pivot = (rank..m.len()).find(|&i| !m[i][col].is_zero())?;
        m.swap(rank, pivot);
        let lead = m[rank][col].clone();
        for x in m[rank].iter_mut() {
            *x /= &lead;
        }
        let prow = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    if m[rank..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some(m[..k].iter().map(|row| row[k].clone()).collect())
}

/// All vertices of the feasible polytope, deduplicated.
pub fn vertices(cs: &ConstraintSystem) -> Result<Vec<Vec<Rational>>> {
    let n = cs.n_vars();
    if n > ORACLE_MAX_VARS {
        return Err(OgjError::OutOfRange(format!("oracle limited to {ORACLE_MAX_VARS} variables, got {n}")));
    }
    let mut found = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&j| mask & (1 << j) != 0).collect();
        if let Some(xs) = solve_subset(cs, &subset) {
            if xs.iter().all(|x| !x.is_negative()) {
                let mut full = vec![Rational::zero(); n];
                for (&j, x) in subset.iter().zip(xs) {
                    full[j] = x;
                }
                found.insert(full);
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Minimum objective over all vertices (`None` when infeasible).
pub fn minimum(cs: &ConstraintSystem) -> Result<Option<Rational>> {
    Ok(vertices(cs)?.iter().map(|x| cs.objective_value(x)).min())
}

/// Vertices attaining the minimum objective.
pub fn optimal_vertices(cs: &ConstraintSystem) -> Result<Vec<Vec<Rational>>> {
    let all = vertices(cs)?;
    let Some(best) = all.iter().map(|x| cs.objective_value(x)).min() else { return Ok(Vec::new()) };
    Ok(all.into_iter().filter(|x| cs.objective_value(x) == best).collect())
}

pub fn is_vertex(cs: &ConstraintSystem, x: &[Rational]) -> Result<bool> {
    Ok(vertices(cs)?.iter().any(|v| v.as_slice() == x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::joining::{bijective_from_map, build_constraints, product_joining};
    use crate::labeling::cost_matrix;
    use crate::rational::{frac, one};

    #[test]
    fn p2_segment_has_two_vertices() {
        let g = WeightedGraph::unlabeled(2, &[(0, 1, one())]).unwrap();
        let cs = build_constraints(&g, &g, &cost_matrix(g.labels(), g.labels())).unwrap();
        let vs = vertices(&cs).unwrap();
        assert_eq!(vs.len(), 2);
        let id = cs.from_joining(&bijective_from_map(&g, &g, &[0, 1]).unwrap()).unwrap();
        let swap = cs.from_joining(&bijective_from_map(&g, &g, &[1, 0]).unwrap()).unwrap();
        assert!(vs.contains(&id) && vs.contains(&swap));
        let prod = cs.from_joining(&product_joining(&g, &g)).unwrap();
        assert!(!is_vertex(&cs, &prod).unwrap());
        assert_eq!(prod, vec![frac(1, 4), frac(1, 4)]);
        assert_eq!(minimum(&cs).unwrap(), Some(Rational::zero()));
    }
}
