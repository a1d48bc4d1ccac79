//! Exact linear programming over the joining polytope.

mod enumerate;
mod simplex;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{OgjError, Result};
use crate::graph::WeightedGraph;
use crate::joining::{build_constraints, ConstraintSystem, WeightJoining};
use crate::labeling::CostMatrix;
use crate::rational::{self, Rational};

pub use enumerate::{bijective_optimal_vertices, enumerate_optimal_vertices, BijectiveSearch, enumerate_optimal_vertices_until, Enumeration, DEFAULT_FACE_CAP};
pub(crate) use simplex::{find_bfs, Stats, System};

/// Basic feasible solution of a constraint system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicSolution {
    pub basis: Vec<usize>,
    pub values: Vec<Rational>,
    pub objective_value: Rational,
}

impl BasicSolution {
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&j| !self.values[j].is_zero()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub rho: Rational,
    pub vertex: BasicSolution,
    pub pivots: usize,
    /// True when `rho = 0` was settled by the zero-cost feasibility check alone.
    pub zero_cost_shortcut: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverReport {
    pub rho: String,
    pub support: Vec<String>,
    pub pivots: usize,
    pub bases_visited: usize,
    pub certificate: String,
}

pub(crate) fn system(cs: &ConstraintSystem) -> System<'_> {
    System { rows: &cs.rows, rhs: &cs.rhs, n_vars: cs.n_vars() }
}

fn package(cs: &ConstraintSystem, bfs: simplex::Bfs) -> BasicSolution {
    let objective_value = cs.objective_value(&bfs.values);
    BasicSolution { basis: bfs.basis, values: bfs.values, objective_value }
}

/// Minimizes the objective exactly with a full two-phase solve.
pub fn solve_full(cs: &ConstraintSystem) -> Result<LpSolution> {
    let mut stats = Stats::default();
    let all = vec![true; cs.n_vars()];
    let bfs = find_bfs(system(cs), &all, Some(&cs.objective), &mut stats)?
        .ok_or_else(|| OgjError::Infeasible("joining system has no feasible point".into()))?;
    let vertex = package(cs, bfs);
    Ok(LpSolution { rho: vertex.objective_value.clone(), vertex, pivots: stats.pivots, zero_cost_shortcut: false })
}

/// A basic feasible solution using only zero-cost columns, if one exists.
pub fn zero_cost_vertex(cs: &ConstraintSystem) -> Result<Option<BasicSolution>> {
    let allowed: Vec<bool> = cs.objective.iter().map(Zero::is_zero).collect();
    let mut stats = Stats::default();
    Ok(find_bfs(system(cs), &allowed, None, &mut stats)?.map(|b| package(cs, b)))
}

/// Minimizes the objective; `rho = 0` is decided first by a feasibility check
/// on the zero-cost columns, which is exact because every cost is nonnegative.
pub fn solve(cs: &ConstraintSystem) -> Result<LpSolution> {
    if cs.objective.iter().any(Signed::is_negative) {
        return solve_full(cs);
    }
    let allowed: Vec<bool> = cs.objective.iter().map(Zero::is_zero).collect();
    let mut stats = Stats::default();
    if let Some(bfs) = find_bfs(system(cs), &allowed, None, &mut stats)? {
        let vertex = package(cs, bfs);
        return Ok(LpSolution { rho: Rational::zero(), vertex, pivots: stats.pivots, zero_cost_shortcut: true });
    }
    let mut full = solve_full(cs)?;
    full.pivots += stats.pivots;
    Ok(full)
}

/// `rho_c(G, H)` for an arbitrary nonnegative cost matrix.
pub fn optimal_cost(g: &WeightedGraph, h: &WeightedGraph, cost: &CostMatrix) -> Result<Rational> {
    Ok(solve(&build_constraints(g, h, cost)?)?.rho)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtremeCertificate {
    Minimal,
    /// A feasible point whose support is strictly inside the tested one.
    SmallerSupport(Vec<Rational>),
}

impl ExtremeCertificate {
    pub fn is_minimal(&self) -> bool {
        matches!(self, ExtremeCertificate::Minimal)
    }
}

/// Decides whether the feasible point `x` has minimal support, one feasibility LP per support element.
pub fn is_extreme_point(cs: &ConstraintSystem, x: &[Rational]) -> Result<ExtremeCertificate> {
    if !cs.is_feasible_point(x) {
        return Err(OgjError::InvalidJoining("point violates the constraint system".into()));
    }
    let support: Vec<usize> = (0..x.len()).filter(|&j| !x[j].is_zero()).collect();
    let mut stats = Stats::default();
    for &e in &support {
        let mut allowed = vec![false; x.len()];
        for &j in &support {
            allowed[j] = j != e;
        }
        if let Some(bfs) = find_bfs(system(cs), &allowed, None, &mut stats)? {
            return Ok(ExtremeCertificate::SmallerSupport(bfs.values));
        }
    }
    Ok(ExtremeCertificate::Minimal)
}

/// Extreme-point test for a joining of `G` and `H`.
pub fn is_extreme(g: &WeightedGraph, h: &WeightedGraph, gamma: &WeightJoining) -> Result<(ExtremeCertificate, Option<WeightJoining>)> {
    let cs = build_constraints(g, h, &CostMatrix::zeros(g.n(), h.n()))?;
    let x = cs.from_joining(gamma)?;
    let cert = is_extreme_point(&cs, &x)?;
    let witness = match &cert {
        ExtremeCertificate::SmallerSupport(y) => Some(cs.to_joining(y)),
        ExtremeCertificate::Minimal => None,
    };
    Ok((cert, witness))
}

/// The joining graph `(spp(r_gamma), gamma)` of an extreme point is connected.
pub fn check_connected_extremal(gamma: &WeightJoining) -> bool {
    gamma.is_connected()
}

pub fn report(cs: &ConstraintSystem, sol: &LpSolution, bases_visited: usize, certificate: &str) -> SolverReport {
    let m = cs.right_ids.len();
    let name = |a: usize| format!("{}|{}", cs.left_ids[a / m], cs.right_ids[a % m]);
    SolverReport {
        rho: rational::render(&sol.rho),
        support: sol
            .vertex
            .support()
            .into_iter()
            .map(|j| {
                let (a, b) = cs.vars[j];
                format!("{}\u{2192}{}", name(a), name(b))
            })
            .collect(),
        pivots: sol.pivots,
        bases_visited,
        certificate: certificate.to_string(),
    }
}
