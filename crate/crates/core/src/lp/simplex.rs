//! Dense exact tableau simplex for `A x = b, x >= 0` over a subset of columns.

use num_traits::{One, Signed, Zero};

use crate::error::{OgjError, Result};
use crate::rational::Rational;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

/// Sparse equality system borrowed from a constraint system.
#[derive(Clone, Copy)]
pub(crate) struct System<'a> {
    pub rows: &'a [Vec<(usize, Rational)>],
    pub rhs: &'a [Rational],
    pub n_vars: usize,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Stats {
    pub pivots: usize,
}

/// Basic feasible point of the (restricted) system.
#[derive(Clone, Debug)]
pub(crate) struct Bfs {
    pub basis: Vec<usize>,
    pub values: Vec<Rational>,
}

/// Removes columns forced to zero: a row with zero right-hand side whose
/// remaining coefficients share one sign pins all of them. Returns `None`
/// when the restricted system is visibly infeasible.
pub(crate) fn propagate(sys: System<'_>, allowed: &mut [bool]) -> Option<()> {
    loop {
        let mut changed = false;
        for (row, b) in sys.rows.iter().zip(sys.rhs) {
            let mut pos = false;
            let mut neg = false;
            for (j, a) in row {
                if allowed[*j] {
                    if a.is_positive() {
                        pos = true;
                    } else {
                        neg = true;
                    }
                }
            }
            match (pos, neg) {
                (false, false) if !b.is_zero() => return None,
                (true, false) | (false, true) => {
                    if (pos && b.is_negative()) || (neg && b.is_positive()) {
                        return None;
                    }
                    if b.is_zero() {
                        for (j, _) in row {
                            if allowed[*j] {
                                allowed[*j] = false;
                                changed = true;
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        if !changed {
            return Some(());
        }
    }
}

struct Tableau {
    /// `rows[i]` has one entry per tableau column plus the right-hand side last.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, p: usize, q: usize, costs: &mut [Rational], stats: &mut Stats) {
        let mut prow = std::mem::take(&mut self.rows[p]);
        let piv = prow[q].clone();
        if !piv.is_one() {
            for x in prow.iter_mut().filter(|x| !x.is_zero()) {
                *x /= &piv;
            }
        }
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for row in self.rows.iter_mut().filter(|r| !r.is_empty()) {
            let f = row[q].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let d = &f * &prow[j];
                row[j] -= d;
            }
        }
        let f = costs[q].clone();
        if !f.is_zero() {
            for &j in &nz {
                let d = &f * &prow[j];
                costs[j] -= d;
            }
        }
        self.rows[p] = prow;
        self.basis[p] = q;
        stats.pivots += 1;
    }

    /// Minimizes with reduced costs `costs` (last entry is minus the objective)
    /// over columns with `enter_ok[j]`.
    fn optimize(&mut self, costs: &mut [Rational], enter_ok: &[bool], stats: &mut Stats) -> Result<()> {
        let mut streak = 0usize;
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let mut entering: Option<usize> = None;
            for j in (0..self.width).filter(|&j| enter_ok[j] && costs[j].is_negative()) {
                match entering {
                    None => entering = Some(j),
                    Some(_) if bland => break,
                    Some(e) if costs[j] < costs[e] => entering = Some(j),
                    _ => {}
                }
            }
            let Some(q) = entering else { return Ok(()) };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, ratio)) = leave else {
                return Err(OgjError::Infeasible("objective unbounded below".into()));
            };
            if ratio.is_zero() {
                streak += 1;
            } else if !bland {
                streak = 0;
            }
            self.pivot(p, q, costs, stats);
        }
    }
}

/// Finds a basic feasible solution of `A x = b, x >= 0, x_j = 0 for !allowed[j]`,
/// optimal for `objective` when one is given. `None` means infeasible.
pub(crate) fn find_bfs(
    sys: System<'_>,
    allowed: &[bool],
    objective: Option<&[Rational]>,
    stats: &mut Stats,
) -> Result<Option<Bfs>> {
    let mut allowed = allowed.to_vec();
    if propagate(sys, &mut allowed).is_none() {
        return Ok(None);
    }
    let cols: Vec<usize> = (0..sys.n_vars).filter(|&j| allowed[j]).collect();
    let mut local = vec![usize::MAX; sys.n_vars];
    for (k, &j) in cols.iter().enumerate() {
        local[j] = k;
    }
    let k = cols.len();

    // Row-reduce [A | b] restricted to the allowed columns.
    let mut dense: Vec<Vec<Rational>> = Vec::with_capacity(sys.rows.len());
    for (row, b) in sys.rows.iter().zip(sys.rhs) {
        let mut r = vec![Rational::zero(); k + 1];
        let mut any = false;
        for (j, a) in row {
            if allowed[*j] {
                r[local[*j]] = a.clone();
                any = true;
            }
        }
        if !any {
            if b.is_zero() {
                continue;
            }
            return Ok(None);
        }
        r[k] = b.clone();
        dense.push(r);
    }
    let mut reduced: Vec<Vec<Rational>> = Vec::new();
    let mut pivots_of: Vec<usize> = Vec::new();
    for mut r in dense {
        for (prow, &pc) in reduced.iter().zip(&pivots_of) {
            let f = r[pc].clone();
            if f.is_zero() {
                continue;
            }
            for j in (0..=k).filter(|&j| !prow[j].is_zero()) {
                let d = &f * &prow[j];
                r[j] -= d;
            }
        }
        let Some(pc) = (0..k).find(|&j| !r[j].is_zero()) else {
            if r[k].is_zero() {
                continue;
            }
            return Ok(None);
        };
        let lead = r[pc].clone();
        for x in r.iter_mut().filter(|x| !x.is_zero()) {
            *x /= &lead;
        }
        // Keep earlier rows reduced in the new pivot column.
        for prow in reduced.iter_mut() {
            let f = prow[pc].clone();
            if f.is_zero() {
                continue;
            }
            for j in (0..=k).filter(|&j| !r[j].is_zero()) {
                let d = &f * &r[j];
                prow[j] -= d;
            }
        }
        reduced.push(r);
        pivots_of.push(pc);
    }
    let m = reduced.len();

    // Rows with negative right-hand side get an artificial column.
    let art_rows: Vec<usize> = (0..m).filter(|&i| reduced[i][k].is_negative()).collect();
    let width = k + art_rows.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = pivots_of.clone();
    for (i, r) in reduced.into_iter().enumerate() {
        let mut row = Vec::with_capacity(width + 1);
        let negate = r[k].is_negative();
        row.extend(r[..k].iter().map(|x| if negate { -x } else { x.clone() }));
        row.extend((0..art_rows.len()).map(|_| Rational::zero()));
        row.push(if negate { -&r[k] } else { r[k].clone() });
        if let Ok(a) = art_rows.binary_search(&i) {
            row[k + a] = Rational::one();
            basis[i] = k + a;
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis, width };

    if !art_rows.is_empty() {
        let mut costs = vec![Rational::zero(); width + 1];
        for &i in &art_rows {
            for (j, x) in tab.rows[i].iter().enumerate() {
                if j < k || j == width {
                    costs[j] -= x;
                }
            }
        }
        let enter_ok = vec![true; width];
        tab.optimize(&mut costs, &enter_ok, stats)?;
        if !costs[width].is_zero() {
            return Ok(None);
        }
        // Drive remaining artificials out of the basis.
        for i in 0..m {
            if tab.basis[i] >= k {
                if let Some(q) = (0..k).find(|&j| !tab.rows[i][j].is_zero()) {
                    let mut scratch = vec![Rational::zero(); width + 1];
                    tab.pivot(i, q, &mut scratch, stats);
                } else {
                    // Cannot happen after row reduction; the row is redundant.
                    tab.rows[i].clear();
                }
            }
        }
        let keep: Vec<usize> = (0..m).filter(|&i| !tab.rows[i].is_empty()).collect();
        tab.rows = keep.iter().map(|&i| {
            let mut r = std::mem::take(&mut tab.rows[i]);
            let rhs = r.pop().unwrap();
            r.truncate(k);
            r.push(rhs);
            r
        }).collect();
        tab.basis = keep.iter().map(|&i| tab.basis[i]).collect();
        tab.width = k;
    }

    if let Some(c) = objective {
        let mut costs: Vec<Rational> = cols.iter().map(|&j| c[j].clone()).collect();
        costs.push(Rational::zero());
        for (i, row) in tab.rows.iter().enumerate() {
            let cb = costs[tab.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, x) in row.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                costs[j] -= &cb * x;
            }
        }
        let enter_ok = vec![true; k];
        tab.optimize(&mut costs, &enter_ok, stats)?;
        debug_assert!(costs[..k].iter().all(|d| !d.is_negative()));
    }

    let mut values = vec![Rational::zero(); sys.n_vars];
    let mut basis: Vec<usize> = Vec::with_capacity(tab.rows.len());
    for (i, row) in tab.rows.iter().enumerate() {
        let j = cols[tab.basis[i]];
        values[j] = row[tab.width].clone();
        basis.push(j);
    }
    basis.sort_unstable();
    Ok(Some(Bfs { basis, values }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn sys<'a>(rows: &'a [Vec<(usize, Rational)>], rhs: &'a [Rational], n: usize) -> System<'a> {
        System { rows, rhs, n_vars: n }
    }

    #[test]
    fn small_lp_optimum() {
        // x0 + x1 + x2 = 1, x0 - x1 = 0; minimize x0 + 2 x2 - x1
        let rows = vec![
            vec![(0, int(1)), (1, int(1)), (2, int(1))],
            vec![(0, int(1)), (1, int(-1))],
        ];
        let rhs = vec![int(1), int(0)];
        let c = vec![int(1), int(-1), int(2)];
        let bfs = find_bfs(sys(&rows, &rhs, 3), &[true; 3], Some(&c), &mut Stats::default()).unwrap().unwrap();
        assert_eq!(bfs.values, vec![frac(1, 2), frac(1, 2), int(0)]);
    }

    #[test]
    fn infeasible_and_negative_rhs() {
        let rows = vec![vec![(0, int(1)), (1, int(1))]];
        let rhs = vec![int(-1)];
        assert!(find_bfs(sys(&rows, &rhs, 2), &[true; 2], None, &mut Stats::default()).unwrap().is_none());
        let rows = vec![vec![(0, int(1)), (1, int(-2))]];
        let rhs = vec![int(-2)];
        let bfs = find_bfs(sys(&rows, &rhs, 2), &[true; 2], None, &mut Stats::default()).unwrap().unwrap();
        assert_eq!(bfs.values, vec![int(0), int(1)]);
    }

    #[test]
    fn propagation_pins_one_signed_rows() {
        let rows = vec![vec![(0, int(1)), (1, int(2))], vec![(1, int(1)), (2, int(1))]];
        let rhs = vec![int(0), int(1)];
        let mut allowed = vec![true; 3];
        propagate(sys(&rows, &rhs, 3), &mut allowed).unwrap();
        assert_eq!(allowed, vec![false, false, true]);
    }
}
