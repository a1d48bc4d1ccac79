//! Vertices of the optimal face by support splitting.
//!
//! Every vertex `y != x` of a face containing the vertex `x` vanishes on some
//! `e` in `spp(x)`, so recursing on the subfaces `{x_e = 0}` for `e` in the
//! support of each vertex found reaches every vertex. Subfaces are memoized
//! after zero-forcing propagation.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::joining::ConstraintSystem;
use crate::rational::Rational;

use super::simplex::{find_bfs, propagate, Stats, System};
use super::BasicSolution;

pub const DEFAULT_FACE_CAP: usize = 20_000;

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub vertices: Vec<BasicSolution>,
    /// Number of faces for which a feasibility problem was solved.
    pub faces_visited: usize,
    /// False when the cap stopped the search or the caller asked to stop.
    pub complete: bool,
    pub pivots: usize,
}

type Rows = Vec<Vec<(usize, Rational)>>;

/// Rows, right-hand side and allowed columns describing the face `{objective = rho}`.
/// With nonnegative costs and `rho = 0` the face is cut out by dropping costly columns.
fn optimal_face(cs: &ConstraintSystem, rho: &Rational) -> (Rows, Vec<Rational>, Vec<bool>) {
    let mut rows = cs.rows.clone();
    let mut rhs = cs.rhs.clone();
    let mut root = vec![true; cs.n_vars()];
    if rho.is_zero() && !cs.objective.iter().any(Signed::is_negative) {
        for (j, c) in cs.objective.iter().enumerate() {
            root[j] = c.is_zero();
        }
    } else {
        rows.push(cs.objective.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, c.clone())).collect());
        rhs.push(rho.clone());
    }
    (rows, rhs, root)
}

pub fn enumerate_optimal_vertices(cs: &ConstraintSystem, rho: &Rational, cap: usize) -> Result<Enumeration> {
    enumerate_optimal_vertices_until(cs, rho, cap, |_| false)
}

/// Like [`enumerate_optimal_vertices`], stopping as soon as `stop` returns true for a new vertex.
pub fn enumerate_optimal_vertices_until(
    cs: &ConstraintSystem,
    rho: &Rational,
    cap: usize,
    mut stop: impl FnMut(&BasicSolution) -> bool,
) -> Result<Enumeration> {
    let n = cs.n_vars();
    let (rows, rhs, mut root) = optimal_face(cs, rho);
    let sys = System { rows: &rows, rhs: &rhs, n_vars: n };

    let mut out = Enumeration { vertices: Vec::new(), faces_visited: 0, complete: true, pivots: 0 };
    if propagate(sys, &mut root).is_none() {
        return Ok(out);
    }
    let mut stats = Stats::default();
    let mut seen_faces: HashSet<Vec<bool>> = HashSet::from([root.clone()]);
    let mut seen_supports: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(face) = queue.pop_front() {
        if out.faces_visited >= cap {
            out.complete = false;
            break;
        }
        out.faces_visited += 1;
        let Some(bfs) = find_bfs(sys, &face, None, &mut stats)? else { continue };
        let support: Vec<usize> = (0..n).filter(|&j| !bfs.values[j].is_zero()).collect();
        if seen_supports.insert(support.clone()) {
            let objective_value = cs.objective_value(&bfs.values);
            let v = BasicSolution { basis: bfs.basis, values: bfs.values, objective_value };
            let halt = stop(&v);
            out.vertices.push(v);
            if halt {
                out.complete = false;
                break;
            }
        }
        for &e in &support {
            let mut child = face.clone();
            child[e] = false;
            if propagate(sys, &mut child).is_some() && seen_faces.insert(child.clone()) {
                queue.push_back(child);
            }
        }
    }
    out.pivots = stats.pivots;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BijectiveSearch {
    /// Bijective points of the optimal face; each is an extreme point.
    pub vertices: Vec<BasicSolution>,
    /// Search nodes at which a feasibility problem was solved.
    pub nodes: usize,
    /// False when the node cap or an early stop cut the search short.
    pub complete: bool,
    pub pivots: usize,
}

/// Finds the bijective joinings on the optimal face by assigning left vertices
/// one at a time and pruning partial assignments whose restricted face is empty.
///
/// A bijective joining is determined by its vertex map, so every leaf of the
/// search is a single point of the face and hence an extreme point.
pub fn bijective_optimal_vertices(cs: &ConstraintSystem, rho: &Rational, cap: usize, stop_at_first: bool) -> Result<BijectiveSearch> {
    let (nl, nr) = (cs.left_ids.len(), cs.right_ids.len());
    let mut out = BijectiveSearch { vertices: Vec::new(), nodes: 0, complete: true, pivots: 0 };
    if nl != nr {
        return Ok(out);
    }
    let (rows, rhs, root) = optimal_face(cs, rho);
    let sys = System { rows: &rows, rhs: &rhs, n_vars: cs.n_vars() };
    let ends: Vec<[(usize, usize); 2]> = cs.vars.iter().map(|&(a, b)| [(a / nr, a % nr), (b / nr, b % nr)]).collect();
    let mut stats = Stats::default();
    let mut assigned: Vec<Option<usize>> = vec![None; nl];
    let mut used = vec![false; nr];

    struct Ctx<'a> {
        sys: System<'a>,
        root: &'a [bool],
        ends: &'a [[(usize, usize); 2]],
        cap: usize,
        stop_at_first: bool,
    }

    fn visit(
        ctx: &Ctx<'_>,
        cs: &ConstraintSystem,
        assigned: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        stats: &mut Stats,
        out: &mut BijectiveSearch,
    ) -> Result<bool> {
        if out.nodes >= ctx.cap {
            out.complete = false;
            return Ok(true);
        }
        out.nodes += 1;
        let fits = |&(u, v): &(usize, usize)| match assigned[u] {
            Some(w) => w == v,
            None => !used[v],
        };
        let mut allowed: Vec<bool> = ctx.root.iter().zip(ctx.ends).map(|(&r, e)| r && e.iter().all(fits)).collect();
        if propagate(ctx.sys, &mut allowed).is_none() {
            return Ok(false);
        }
        let Some(bfs) = find_bfs(ctx.sys, &allowed, None, stats)? else { return Ok(false) };
        let Some(u) = (0..assigned.len()).find(|&u| assigned[u].is_none()) else {
            let objective_value = cs.objective_value(&bfs.values);
            out.vertices.push(BasicSolution { basis: bfs.basis, values: bfs.values, objective_value });
            return Ok(ctx.stop_at_first);
        };
        let candidates: BTreeSet<usize> = ctx
            .ends
            .iter()
            .zip(&allowed)
            .filter(|(_, &ok)| ok)
            .flat_map(|(e, _)| e.iter().filter(|&&(x, _)| x == u).map(|&(_, v)| v).collect::<Vec<_>>())
            .collect();
        for v in candidates {
            assigned[u] = Some(v);
            used[v] = true;
            let halt = visit(ctx, cs, assigned, used, stats, out)?;
            assigned[u] = None;
            used[v] = false;
            if halt {
                return Ok(true);
            }
        }
        Ok(false)
    }

    let ctx = Ctx { sys, root: &root, ends: &ends, cap, stop_at_first };
    let halted = visit(&ctx, cs, &mut assigned, &mut used, &mut stats, &mut out)?;
    if halted {
        out.complete = false;
    }
    out.pivots = stats.pivots;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{default_ids, WeightedGraph};
    use crate::joining::{bijective_from_map, build_constraints};
    use crate::labeling::{cost_matrix, LabelValue};
    use crate::lp::solve;
    use crate::rational::{frac, one};

    #[test]
    fn p2_zero_cost_has_identity_and_swap() {
        let g = WeightedGraph::unlabeled(2, &[(0, 1, one())]).unwrap();
        let cs = build_constraints(&g, &g, &cost_matrix(g.labels(), g.labels())).unwrap();
        let e = enumerate_optimal_vertices(&cs, &Rational::zero(), DEFAULT_FACE_CAP).unwrap();
        assert!(e.complete);
        let mut found: Vec<_> = e.vertices.iter().map(|v| cs.to_joining(&v.values)).collect();
        let id = bijective_from_map(&g, &g, &[0, 1]).unwrap();
        let swap = bijective_from_map(&g, &g, &[1, 0]).unwrap();
        found.sort_by_key(|j| j.entries().keys().next().copied());
        assert_eq!(found.len(), 2);
        assert!(found.contains(&id) && found.contains(&swap));
    }

    #[test]
    fn distinct_path_self_pair_has_only_the_diagonal() {
        let g = WeightedGraph::from_edges(
            default_ids(4),
            (1..=4).map(LabelValue::Int).collect(),
            &[(0, 1, frac(1, 3)), (1, 2, frac(1, 12)), (2, 3, frac(1, 12))],
        )
        .unwrap();
        let cs = build_constraints(&g, &g, &cost_matrix(g.labels(), g.labels())).unwrap();
        let rho = solve(&cs).unwrap().rho;
        let e = enumerate_optimal_vertices(&cs, &rho, DEFAULT_FACE_CAP).unwrap();
        assert_eq!(e.vertices.len(), 1);
        assert_eq!(cs.to_joining(&e.vertices[0].values), bijective_from_map(&g, &g, &[0, 1, 2, 3]).unwrap());
    }

    #[test]
    fn cap_flags_partial_results() {
        let g = WeightedGraph::unlabeled(4, &[(0, 1, one()), (1, 2, one()), (2, 3, one()), (3, 0, one())]).unwrap();
        let cs = build_constraints(&g, &g, &cost_matrix(g.labels(), g.labels())).unwrap();
        let e = enumerate_optimal_vertices(&cs, &Rational::zero(), 1).unwrap();
        assert!(!e.complete);
        assert_eq!(e.faces_visited, 1);
    }
}
