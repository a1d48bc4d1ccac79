//! Weight joinings on `U x V`, the LP constraint system they satisfy, and the
//! structural operations on them (products, bijections, factor maps,
//! block decomposition, restriction, three-way gluing).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{OgjError, Result};
use crate::graph::{check_permutation, connected_components, validate_weight_function, Component, PairMap, WeightViolation, WeightedGraph};
use crate::labeling::CostMatrix;
use crate::rational::{self, Rational};

/// Symmetric weight function on the product set, indexed by `a = u * |V| + v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightJoining {
    left: Vec<String>,
    right: Vec<String>,
    gamma: BTreeMap<(usize, usize), Rational>,
    r: Vec<Rational>,
}

impl WeightJoining {
    /// Wraps an ordered-pair map without validating it; zero entries are dropped.
    pub fn from_ordered(left: Vec<String>, right: Vec<String>, map: BTreeMap<(usize, usize), Rational>) -> Self {
        let size = left.len() * right.len();
        let gamma: BTreeMap<_, _> = map.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        let mut r = vec![Rational::zero(); size];
        for (&(a, _), w) in &gamma {
            r[a] += w;
        }
        WeightJoining { left, right, gamma, r }
    }

    /// Builds from unordered entries `((a, b), w)`, writing both directions.
    pub fn from_unordered(
        left: Vec<String>,
        right: Vec<String>,
        entries: impl IntoIterator<Item = ((usize, usize), Rational)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for ((a, b), w) in entries {
            if w.is_zero() {
                continue;
            }
            *map.entry((a, b)).or_insert_with(Rational::zero) += &w;
            if a != b {
                *map.entry((b, a)).or_insert_with(Rational::zero) += &w;
            }
        }
        Self::from_ordered(left, right, map)
    }

    pub fn for_graphs(g: &WeightedGraph, h: &WeightedGraph, map: BTreeMap<(usize, usize), Rational>) -> Self {
        Self::from_ordered(g.ids().to_vec(), h.ids().to_vec(), map)
    }

    pub fn n_left(&self) -> usize {
        self.left.len()
    }

    pub fn n_right(&self) -> usize {
        self.right.len()
    }

    pub fn left_ids(&self) -> &[String] {
        &self.left
    }

    pub fn right_ids(&self) -> &[String] {
        &self.right
    }

    pub fn index(&self, u: usize, v: usize) -> usize {
        u * self.right.len() + v
    }

    pub fn split(&self, a: usize) -> (usize, usize) {
        (a / self.right.len(), a % self.right.len())
    }

    pub fn get(&self, a: usize, b: usize) -> Rational {
        self.gamma.get(&(a, b)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Ordered entries, both directions present.
    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.gamma
    }

    /// Entries with `a <= b`.
    pub fn unordered_entries(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> + '_ {
        self.gamma.iter().filter(|((a, b), _)| a <= b).map(|(&k, w)| (k, w))
    }

    pub fn support(&self) -> BTreeSet<(usize, usize)> {
        self.unordered_entries().map(|(k, _)| k).collect()
    }

    pub fn marginal(&self) -> &[Rational] {
        &self.r
    }

    pub fn r(&self, u: usize, v: usize) -> &Rational {
        &self.r[self.index(u, v)]
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let map = self.gamma.iter().map(|(&k, w)| (k, w * s)).collect();
        Self::from_ordered(self.left.clone(), self.right.clone(), map)
    }

    /// `<c, r_gamma>`.
    pub fn cost(&self, c: &CostMatrix) -> Rational {
        self.r
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(a, x)| {
                let (u, v) = self.split(a);
                c.get(u, v) * x
            })
            .sum()
    }

    /// The graph `(spp(r_gamma), gamma)` is connected.
    pub fn is_connected(&self) -> bool {
        let verts: Vec<usize> = (0..self.r.len()).filter(|&a| !self.r[a].is_zero()).collect();
        let Some(&start) = verts.first() else { return false };
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b) in self.gamma.keys() {
            adj.entry(a).or_default().push(b);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for &b in adj.get(&a).into_iter().flatten() {
                if seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen.len() == verts.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JoiningViolation {
    Weight(WeightViolation),
    LeftMarginal {
        u: String,
        #[serde(with = "rational::serde_str")]
        expected: Rational,
        #[serde(with = "rational::serde_str")]
        actual: Rational,
    },
    RightMarginal {
        v: String,
        #[serde(with = "rational::serde_str")]
        expected: Rational,
        #[serde(with = "rational::serde_str")]
        actual: Rational,
    },
    LeftTransition { u: String, v: String, next: String },
    RightTransition { u: String, v: String, next: String },
    EdgePreservation { from: String, to: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoiningReport {
    pub violations: Vec<JoiningViolation>,
}

impl JoiningReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pair_name(g: &WeightedGraph, h: &WeightedGraph, u: usize, v: usize) -> String {
    format!("{}|{}", g.id(u), h.id(v))
}

/// Checks the weight-function axioms, both coupling conditions and edge preservation.
pub fn is_valid_joining(g: &WeightedGraph, h: &WeightedGraph, gamma: &WeightJoining) -> JoiningReport {
    let (n, m) = (g.n(), h.n());
    let mut violations = Vec::new();
    if gamma.n_left() != n || gamma.n_right() != m {
        violations.push(JoiningViolation::EdgePreservation {
            from: format!("{}x{}", gamma.n_left(), gamma.n_right()),
            to: format!("{n}x{m}"),
        });
        return JoiningReport { violations };
    }
    let names: Vec<String> = (0..n * m).map(|a| pair_name(g, h, a / m, a % m)).collect();
    let ordered: PairMap = gamma.entries().clone();
    violations.extend(validate_weight_function(&names, &ordered).violations.into_iter().map(JoiningViolation::Weight));

    for &(a, b) in gamma.entries().keys() {
        let (u, v) = (a / m, a % m);
        let (u2, v2) = (b / m, b % m);
        if !g.has_edge(u, u2) || !h.has_edge(v, v2) {
            violations.push(JoiningViolation::EdgePreservation { from: names[a].clone(), to: names[b].clone() });
        }
    }

    for u in 0..n {
        let actual: Rational = (0..m).map(|v| gamma.r(u, v).clone()).sum();
        if &actual != g.p(u) {
            violations.push(JoiningViolation::LeftMarginal { u: g.id(u).into(), expected: g.p(u).clone(), actual });
        }
    }
    for v in 0..m {
        let actual: Rational = (0..n).map(|u| gamma.r(u, v).clone()).sum();
        if &actual != h.p(v) {
            violations.push(JoiningViolation::RightMarginal { v: h.id(v).into(), expected: h.p(v).clone(), actual });
        }
    }

    // s_left[(a, u')] = sum over v' of gamma(a, (u', v')), and symmetrically.
    let mut s_left: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut s_right: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (&(a, b), w) in gamma.entries() {
        *s_left.entry((a, b / m)).or_insert_with(Rational::zero) += w;
        *s_right.entry((a, b % m)).or_insert_with(Rational::zero) += w;
    }
    for a in 0..n * m {
        let (u, v) = (a / m, a % m);
        let r = gamma.marginal()[a].clone();
        let mut targets: BTreeSet<usize> = g.neighbors(u).map(|(x, _)| x).collect();
        targets.extend(s_left.range((a, 0)..(a + 1, 0)).map(|(&(_, x), _)| x));
        for u2 in targets {
            let s = s_left.get(&(a, u2)).cloned().unwrap_or_else(Rational::zero);
            if g.p(u) * s != g.weight(u, u2) * &r {
                violations.push(JoiningViolation::LeftTransition { u: g.id(u).into(), v: h.id(v).into(), next: g.id(u2).into() });
            }
        }
        let mut targets: BTreeSet<usize> = h.neighbors(v).map(|(x, _)| x).collect();
        targets.extend(s_right.range((a, 0)..(a + 1, 0)).map(|(&(_, x), _)| x));
        for v2 in targets {
            let s = s_right.get(&(a, v2)).cloned().unwrap_or_else(Rational::zero);
            if h.p(v) * s != h.weight(v, v2) * &r {
                violations.push(JoiningViolation::RightTransition { u: g.id(u).into(), v: h.id(v).into(), next: h.id(v2).into() });
            }
        }
    }
    JoiningReport { violations }
}

/// Sums of `gamma` over the right (resp. left) coordinates, as ordered-pair maps on `U` (resp. `V`).
pub fn edge_coupling_sums(gamma: &WeightJoining) -> (PairMap, PairMap) {
    let m = gamma.n_right();
    let mut left = PairMap::new();
    let mut right = PairMap::new();
    for (&(a, b), w) in gamma.entries() {
        *left.entry((a / m, b / m)).or_insert_with(Rational::zero) += w;
        *right.entry((a % m, b % m)).or_insert_with(Rational::zero) += w;
    }
    (left, right)
}

/// `alpha ⊗ beta`.
pub fn product_joining(g: &WeightedGraph, h: &WeightedGraph) -> WeightJoining {
    let m = h.n();
    let mut map = BTreeMap::new();
    for (u, u2, a) in g.pair_map().iter().map(|(&(x, y), w)| (x, y, w.clone())) {
        for (&(v, v2), b) in &h.pair_map() {
            map.insert((u * m + v, u2 * m + v2), &a * b);
        }
    }
    WeightJoining::for_graphs(g, h, map)
}

/// Checks that `f` is a bijection with `alpha(u, u') = beta(f(u), f(u'))`.
pub fn check_weight_preserving(g: &WeightedGraph, h: &WeightedGraph, f: &[usize]) -> Result<()> {
    if g.n() != h.n() {
        return Err(OgjError::NotBijective(format!("{} vs {} vertices", g.n(), h.n())));
    }
    check_permutation(f, g.n())?;
    for (u, u2, w) in g.edges() {
        let b = h.weight(f[u], f[u2]);
        if b != w {
            return Err(OgjError::NotWeightPreserving(format!(
                "alpha({}, {}) = {} but beta({}, {}) = {}",
                g.id(u),
                g.id(u2),
                rational::render(&w),
                h.id(f[u]),
                h.id(f[u2]),
                rational::render(&b)
            )));
        }
    }
    if g.ordered_edge_count() != h.ordered_edge_count() {
        return Err(OgjError::NotWeightPreserving("edge counts differ".into()));
    }
    Ok(())
}

/// The bijective joining `gamma_f((u, f u), (u', f u')) = alpha(u, u')`.
pub fn bijective_from_map(g: &WeightedGraph, h: &WeightedGraph, f: &[usize]) -> Result<WeightJoining> {
    g.require_fully_supported()?;
    h.require_fully_supported()?;
    check_weight_preserving(g, h, f)?;
    Ok(graph_of_map(g, h, f))
}

fn graph_of_map(g: &WeightedGraph, h: &WeightedGraph, f: &[usize]) -> WeightJoining {
    let m = h.n();
    let map = g
        .pair_map()
        .into_iter()
        .map(|((u, u2), w)| ((u * m + f[u], u2 * m + f[u2]), w))
        .collect();
    WeightJoining::for_graphs(g, h, map)
}

/// Each row of `r_gamma` has exactly one positive entry.
pub fn is_deterministic(gamma: &WeightJoining) -> bool {
    (0..gamma.n_left()).all(|u| (0..gamma.n_right()).filter(|&v| gamma.r(u, v).is_positive()).count() == 1)
}

/// Rows and columns of `r_gamma` each have exactly one positive entry.
pub fn is_bijective(gamma: &WeightJoining) -> bool {
    gamma.n_left() == gamma.n_right()
        && is_deterministic(gamma)
        && (0..gamma.n_right()).all(|v| (0..gamma.n_left()).filter(|&u| gamma.r(u, v).is_positive()).count() == 1)
}

/// `f_gamma(u)` = the unique `v` with `r_gamma(u, v) > 0`.
pub fn induced_map(gamma: &WeightJoining) -> Result<Vec<usize>> {
    (0..gamma.n_left())
        .map(|u| {
            let mut pos = (0..gamma.n_right()).filter(|&v| gamma.r(u, v).is_positive());
            match (pos.next(), pos.next()) {
                (Some(v), None) => Ok(v),
                _ => Err(OgjError::NotDeterministic(format!("row {} of r_gamma", gamma.left_ids()[u]))),
            }
        })
        .collect()
}

/// Verifies `q(v) * sum_{u' in f^-1(v')} alpha(u, u') = p(u) * beta(v, v')` for all `u` and `v'`.
pub fn factor_check(g: &WeightedGraph, h: &WeightedGraph, f: &[usize]) -> Result<()> {
    g.require_fully_supported()?;
    h.require_fully_supported()?;
    if f.len() != g.n() || f.iter().any(|&v| v >= h.n()) {
        return Err(OgjError::NotFactorMap("map is not total on U".into()));
    }
    let image: BTreeSet<usize> = f.iter().copied().collect();
    if image.len() != h.n() {
        return Err(OgjError::NotFactorMap("map is not surjective".into()));
    }
    for u in 0..g.n() {
        let v = f[u];
        let mut into = vec![Rational::zero(); h.n()];
        for (u2, w) in g.neighbors(u) {
            into[f[u2]] += w;
        }
        for (v2, s) in into.iter().enumerate() {
            if h.p(v) * s != g.p(u) * h.weight(v, v2) {
                return Err(OgjError::NotFactorMap(format!(
                    "balance fails at u = {}, v' = {}",
                    g.id(u),
                    h.id(v2)
                )));
            }
        }
    }
    Ok(())
}

/// `gamma_f((u, f u), (u', f u')) = alpha(u, u')` for a factor map `f`.
pub fn joining_from_factor(g: &WeightedGraph, h: &WeightedGraph, f: &[usize]) -> Result<WeightJoining> {
    factor_check(g, h, f)?;
    let gamma = graph_of_map(g, h, f);
    let report = is_valid_joining(g, h, &gamma);
    if !report.is_valid() {
        return Err(OgjError::InvalidJoining(format!("{:?}", report.violations)));
    }
    Ok(gamma)
}

// ---------------------------------------------------------------------------
// Disjoint decomposition

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub left: Vec<Component>,
    pub right: Vec<Component>,
    /// `pi[i][j]` = mass of `gamma` on `(U_i x V_j)^2`.
    pub pi: Vec<Vec<Rational>>,
    /// Joinings of the renormalized components; product joinings where `pi[i][j] = 0`.
    pub blocks: Vec<Vec<WeightJoining>>,
}

impl Decomposition {
    pub fn left_masses(&self) -> Vec<Rational> {
        self.left.iter().map(|c| c.mass.clone()).collect()
    }

    pub fn right_masses(&self) -> Vec<Rational> {
        self.right.iter().map(|c| c.mass.clone()).collect()
    }
}

fn nondegenerate_components(g: &WeightedGraph) -> Result<Vec<Component>> {
    g.require_fully_supported()?;
    Ok(connected_components(g))
}

/// `pi` has row sums `nu_g` and column sums `nu_h`, all entries nonnegative.
pub fn is_coupling(pi: &[Vec<Rational>], nu_g: &[Rational], nu_h: &[Rational]) -> bool {
    pi.len() == nu_g.len()
        && pi.iter().all(|row| row.len() == nu_h.len() && row.iter().all(|x| !x.is_negative()))
        && pi.iter().zip(nu_g).all(|(row, s)| &row.iter().sum::<Rational>() == s)
        && (0..nu_h.len()).all(|j| pi.iter().map(|row| row[j].clone()).sum::<Rational>() == nu_h[j])
}

pub fn decompose_disjoint(g: &WeightedGraph, h: &WeightedGraph, gamma: &WeightJoining) -> Result<Decomposition> {
    let report = is_valid_joining(g, h, gamma);
    if !report.is_valid() {
        return Err(OgjError::InvalidJoining(format!("{:?}", report.violations)));
    }
    let left = nondegenerate_components(g)?;
    let right = nondegenerate_components(h)?;
    let locate = |comps: &[Component], n: usize| {
        let mut at = vec![(0, 0); n];
        for (i, c) in comps.iter().enumerate() {
            for (k, &u) in c.vertices.iter().enumerate() {
                at[u] = (i, k);
            }
        }
        at
    };
    let (lu, lv) = (locate(&left, g.n()), locate(&right, h.n()));
    let m = h.n();
    let mut raw: BTreeMap<(usize, usize), BTreeMap<(usize, usize), Rational>> = BTreeMap::new();
    for (&(a, b), w) in gamma.entries() {
        let ((i, ku), (j, kv)) = (lu[a / m], lv[a % m]);
        let ((_, ku2), (_, kv2)) = (lu[b / m], lv[b % m]);
        let mj = right[j].vertices.len();
        raw.entry((i, j)).or_default().insert((ku * mj + kv, ku2 * mj + kv2), w.clone());
    }
    let mut pi = vec![vec![Rational::zero(); right.len()]; left.len()];
    let mut blocks = Vec::with_capacity(left.len());
    for (i, ci) in left.iter().enumerate() {
        let gi = ci.graph.as_ref().expect("fully supported");
        let mut row = Vec::with_capacity(right.len());
        for (j, cj) in right.iter().enumerate() {
            let hj = cj.graph.as_ref().expect("fully supported");
            let block = raw.remove(&(i, j)).unwrap_or_default();
            let mass: Rational = block.values().sum();
            if mass.is_zero() {
                row.push(product_joining(gi, hj));
            } else {
                let scaled = block.into_iter().map(|(k, w)| (k, w / &mass)).collect();
                row.push(WeightJoining::for_graphs(gi, hj, scaled));
            }
            pi[i][j] = mass;
        }
        blocks.push(row);
    }
    Ok(Decomposition { left, right, pi, blocks })
}

/// Reassembles `gamma = sum_ij pi_ij * gamma_ij` after checking every block and the coupling.
pub fn compose_disjoint(
    g: &WeightedGraph,
    h: &WeightedGraph,
    pi: &[Vec<Rational>],
    blocks: &[Vec<WeightJoining>],
) -> Result<WeightJoining> {
    let left = nondegenerate_components(g)?;
    let right = nondegenerate_components(h)?;
    let nu_g: Vec<Rational> = left.iter().map(|c| c.mass.clone()).collect();
    let nu_h: Vec<Rational> = right.iter().map(|c| c.mass.clone()).collect();
    if !is_coupling(pi, &nu_g, &nu_h) {
        return Err(OgjError::NotCoupling("pi does not couple the component masses".into()));
    }
    if blocks.len() != left.len() || blocks.iter().any(|row| row.len() != right.len()) {
        return Err(OgjError::InvalidJoining("block grid does not match the component counts".into()));
    }
    let m = h.n();
    let mut map = BTreeMap::new();
    for (i, ci) in left.iter().enumerate() {
        let gi = ci.graph.as_ref().expect("fully supported");
        for (j, cj) in right.iter().enumerate() {
            let hj = cj.graph.as_ref().expect("fully supported");
            let block = &blocks[i][j];
            let report = is_valid_joining(gi, hj, block);
            if !report.is_valid() {
                return Err(OgjError::InvalidJoining(format!("block ({i}, {j}): {:?}", report.violations)));
            }
            if pi[i][j].is_zero() {
                continue;
            }
            let mj = cj.vertices.len();
            let lift = |a: usize| ci.vertices[a / mj] * m + cj.vertices[a % mj];
            for (&(a, b), w) in block.entries() {
                map.insert((lift(a), lift(b)), w * &pi[i][j]);
            }
        }
    }
    Ok(WeightJoining::for_graphs(g, h, map))
}

// ---------------------------------------------------------------------------
// Restriction

/// `Z_alpha(U0) = sum over u, u' in U0 of alpha(u, u')`.
pub fn restriction_mass(g: &WeightedGraph, subset: &[usize]) -> Rational {
    let inside: BTreeSet<usize> = subset.iter().copied().collect();
    subset
        .iter()
        .flat_map(|&u| g.neighbors(u).filter(|(v, _)| inside.contains(v)).map(|(_, w)| w.clone()))
        .sum()
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub left: WeightedGraph,
    pub right: WeightedGraph,
    pub mass: Rational,
    pub joining: WeightJoining,
}

/// Restricts `gamma` to `(U0 x V0)^2` and renormalizes by the common mass.
pub fn restrict_joining(
    g: &WeightedGraph,
    h: &WeightedGraph,
    gamma: &WeightJoining,
    u0: &[usize],
    v0: &[usize],
) -> Result<Restriction> {
    let in_u: BTreeSet<usize> = u0.iter().copied().collect();
    let in_v: BTreeSet<usize> = v0.iter().copied().collect();
    let m = h.n();
    for a in (0..g.n() * m).filter(|&a| gamma.marginal()[a].is_positive()) {
        let (u, v) = (a / m, a % m);
        if in_u.contains(&u) != in_v.contains(&v) {
            return Err(OgjError::SupportViolation(format!(
                "r_gamma({}, {}) > 0 straddles the split",
                g.id(u),
                h.id(v)
            )));
        }
    }
    let z_g = restriction_mass(g, u0);
    let z_h = restriction_mass(h, v0);
    let z: Rational = gamma
        .entries()
        .iter()
        .filter(|((a, b), _)| {
            in_u.contains(&(a / m)) && in_v.contains(&(a % m)) && in_u.contains(&(b / m)) && in_v.contains(&(b % m))
        })
        .map(|(_, w)| w.clone())
        .sum();
    if z_g.is_zero() {
        return Err(OgjError::ZeroMass);
    }
    if z_g != z_h || z_g != z {
        return Err(OgjError::SupportViolation(format!(
            "restriction masses differ: {} / {} / {}",
            rational::render(&z_g),
            rational::render(&z_h),
            rational::render(&z)
        )));
    }
    let left = g.induced_scaled(u0, &z)?;
    let right = h.induced_scaled(v0, &z)?;
    let pos_u: HashMap<usize, usize> = u0.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let pos_v: HashMap<usize, usize> = v0.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m0 = v0.len();
    let mut map = BTreeMap::new();
    for (&(a, b), w) in gamma.entries() {
        let coords = (pos_u.get(&(a / m)), pos_v.get(&(a % m)), pos_u.get(&(b / m)), pos_v.get(&(b % m)));
        if let (Some(&u), Some(&v), Some(&u2), Some(&v2)) = coords {
            map.insert((u * m0 + v, u2 * m0 + v2), w / &z);
        }
    }
    let joining = WeightJoining::for_graphs(&left, &right, map);
    Ok(Restriction { left, right, mass: z, joining })
}

// ---------------------------------------------------------------------------
// Gluing

pub type Triple = (usize, usize, usize);

#[derive(Clone, Debug)]
pub struct ThreeWayJoining {
    pub gamma: BTreeMap<(Triple, Triple), Rational>,
}

impl ThreeWayJoining {
    /// Ordered-pair map on `X_i x X_j` obtained by summing out the third coordinate.
    pub fn project(&self, keep: (usize, usize), n_second: usize) -> BTreeMap<(usize, usize), Rational> {
        let pick = |t: &Triple, k: usize| match k {
            0 => t.0,
            1 => t.1,
            _ => t.2,
        };
        let mut out = BTreeMap::new();
        for ((s, t), w) in &self.gamma {
            let a = pick(s, keep.0) * n_second + pick(s, keep.1);
            let b = pick(t, keep.0) * n_second + pick(t, keep.1);
            *out.entry((a, b)).or_insert_with(Rational::zero) += w;
        }
        out
    }
}

/// Glues `gamma12` and `gamma23` along their shared middle graph.
pub fn glue_three_way(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    g3: &WeightedGraph,
    gamma12: &WeightJoining,
    gamma23: &WeightJoining,
) -> Result<(ThreeWayJoining, WeightJoining)> {
    let (n2, n3) = (g2.n(), g3.n());
    if gamma12.n_right() != n2 || gamma23.n_left() != n2 || gamma12.n_left() != g1.n() || gamma23.n_right() != n3 {
        return Err(OgjError::VertexMismatch("joinings do not share the middle graph".into()));
    }
    let (_, mid12) = edge_coupling_sums(gamma12);
    let (mid23, _) = edge_coupling_sums(gamma23);
    let alpha2 = g2.pair_map();
    if mid12 != alpha2 || mid23 != alpha2 {
        return Err(OgjError::InvalidJoining("middle marginals of the two joinings differ".into()));
    }
    #[allow(clippy::type_complexity)]
    let mut by_middle: HashMap<(usize, usize), Vec<(usize, usize, &Rational)>> = HashMap::new();
    for (&(a, b), w) in gamma23.entries() {
        by_middle.entry((a / n3, b / n3)).or_default().push((a % n3, b % n3, w));
    }
    let mut three = BTreeMap::new();
    let mut map13 = BTreeMap::new();
    for (&(a, b), w12) in gamma12.entries() {
        let (x, y, x2, y2) = (a / n2, a % n2, b / n2, b % n2);
        let denom = g2.weight(y, y2);
        for &(z, z2, w23) in by_middle.get(&(y, y2)).into_iter().flatten() {
            let w = w12 * w23 / &denom;
            *map13.entry((x * n3 + z, x2 * n3 + z2)).or_insert_with(Rational::zero) += &w;
            three.insert(((x, y, z), (x2, y2, z2)), w);
        }
    }
    Ok((ThreeWayJoining { gamma: three }, WeightJoining::for_graphs(g1, g3, map13)))
}

// ---------------------------------------------------------------------------
// Constraint system

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Normalization,
    LeftTransition,
    RightTransition,
    LeftMarginal,
    RightMarginal,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub marginal_rows: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { marginal_rows: true }
    }
}

/// Equality-form LP `A x = b, x >= 0` whose feasible points are the joinings of `alpha` and `beta`.
///
/// One variable per unordered product pair `{a, b}` (`a <= b`) allowed by edge preservation.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub left_ids: Vec<String>,
    pub right_ids: Vec<String>,
    pub vars: Vec<(usize, usize)>,
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
    pub kinds: Vec<RowKind>,
    pub objective: Vec<Rational>,
}

pub fn build_constraints(g: &WeightedGraph, h: &WeightedGraph, cost: &CostMatrix) -> Result<ConstraintSystem> {
    build_constraints_with(g, h, cost, BuildOptions::default())
}

pub fn build_constraints_with(
    g: &WeightedGraph,
    h: &WeightedGraph,
    cost: &CostMatrix,
    opts: BuildOptions,
) -> Result<ConstraintSystem> {
    let (n, m) = (g.n(), h.n());
    if cost.n_left() != n || cost.n_right() != m {
        return Err(OgjError::VertexMismatch(format!(
            "cost is {}x{}, graphs are {n}x{m}",
            cost.n_left(),
            cost.n_right()
        )));
    }
    if let Some(x) = cost.rows().iter().flatten().find(|x| x.is_negative()) {
        return Err(OgjError::OutOfRange(format!("negative cost {}", rational::render(x))));
    }
    let (ea, eb) = (g.pair_map(), h.pair_map());
    let mut vars = Vec::new();
    for &(u, u2) in ea.keys() {
        for &(v, v2) in eb.keys() {
            let (a, b) = (u * m + v, u2 * m + v2);
            if a <= b {
                vars.push((a, b));
            }
        }
    }
    vars.sort_unstable();
    let var_of: HashMap<(usize, usize), usize> = vars.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let var = |a: usize, b: usize| var_of[&(a.min(b), a.max(b))];

    // r(a) as a sparse combination of variables.
    let mut r_terms: Vec<Vec<usize>> = vec![Vec::new(); n * m];
    for (i, &(a, b)) in vars.iter().enumerate() {
        r_terms[a].push(i);
        if a != b {
            r_terms[b].push(i);
        }
    }

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut kinds = Vec::new();
    let two = rational::int(2);
    rows.push(
        vars.iter()
            .enumerate()
            .map(|(i, &(a, b))| (i, if a == b { Rational::one() } else { two.clone() }))
            .collect(),
    );
    rhs.push(Rational::one());
    kinds.push(RowKind::Normalization);

    let mut push_row = |acc: BTreeMap<usize, Rational>, b: Rational, kind: RowKind| {
        let row: Vec<(usize, Rational)> = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        if !row.is_empty() || !b.is_zero() {
            rows.push(row);
            rhs.push(b);
            kinds.push(kind);
        }
    };

    for u in 0..n {
        for v in 0..m {
            let a = u * m + v;
            if r_terms[a].is_empty() {
                continue;
            }
            // p(u) * sum_v' gamma((u,v),(u',v')) - alpha(u,u') * r(u,v) = 0
            for (u2, w) in g.neighbors(u) {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (v2, _) in h.neighbors(v) {
                    *acc.entry(var(a, u2 * m + v2)).or_insert_with(Rational::zero) += g.p(u);
                }
                for &i in &r_terms[a] {
                    *acc.entry(i).or_insert_with(Rational::zero) -= w;
                }
                push_row(acc, Rational::zero(), RowKind::LeftTransition);
            }
            for (v2, w) in h.neighbors(v) {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (u2, _) in g.neighbors(u) {
                    *acc.entry(var(a, u2 * m + v2)).or_insert_with(Rational::zero) += h.p(v);
                }
                for &i in &r_terms[a] {
                    *acc.entry(i).or_insert_with(Rational::zero) -= w;
                }
                push_row(acc, Rational::zero(), RowKind::RightTransition);
            }
        }
    }
    if opts.marginal_rows {
        for u in 0..n {
            let mut acc = BTreeMap::new();
            for v in 0..m {
                for &i in &r_terms[u * m + v] {
                    *acc.entry(i).or_insert_with(Rational::zero) += Rational::one();
                }
            }
            push_row(acc, g.p(u).clone(), RowKind::LeftMarginal);
        }
        for v in 0..m {
            let mut acc = BTreeMap::new();
            for u in 0..n {
                for &i in &r_terms[u * m + v] {
                    *acc.entry(i).or_insert_with(Rational::zero) += Rational::one();
                }
            }
            push_row(acc, h.p(v).clone(), RowKind::RightMarginal);
        }
    }
    let objective = vars
        .iter()
        .map(|&(a, b)| {
            let ca = cost.get(a / m, a % m);
            if a == b {
                ca.clone()
            } else {
                ca + cost.get(b / m, b % m)
            }
        })
        .collect();
    Ok(ConstraintSystem { left_ids: g.ids().to_vec(), right_ids: h.ids().to_vec(), vars, rows, rhs, kinds, objective })
}

impl ConstraintSystem {
    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn to_joining(&self, x: &[Rational]) -> WeightJoining {
        WeightJoining::from_unordered(
            self.left_ids.clone(),
            self.right_ids.clone(),
            self.vars.iter().zip(x).map(|(&k, w)| (k, w.clone())),
        )
    }

    /// Variable vector of `gamma`; fails if `gamma` has mass outside the variable set.
    pub fn from_joining(&self, gamma: &WeightJoining) -> Result<Vec<Rational>> {
        let pos: HashMap<(usize, usize), usize> = self.vars.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut x = vec![Rational::zero(); self.vars.len()];
        for (k, w) in gamma.unordered_entries() {
            let i = *pos.get(&k).ok_or_else(|| OgjError::SupportViolation(format!("pair {k:?} is not an allowed variable")))?;
            x[i] = w.clone();
        }
        Ok(x)
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.vars.len()
            && x.iter().all(|v| !v.is_negative())
            && self
                .rows
                .iter()
                .zip(&self.rhs)
                .all(|(row, b)| &row.iter().map(|(i, a)| a * &x[*i]).sum::<Rational>() == b)
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).filter(|(_, v)| !v.is_zero()).map(|(c, v)| c * v).sum()
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JoiningDocument {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub gamma: BTreeMap<String, String>,
    pub marginal: BTreeMap<String, String>,
}

impl JoiningDocument {
    pub fn from_joining(gamma: &WeightJoining) -> Self {
        let m = gamma.n_right();
        let name = |a: usize| format!("{}|{}", gamma.left[a / m], gamma.right[a % m]);
        let entries = gamma
            .unordered_entries()
            .map(|((a, b), w)| (format!("{}\u{2192}{}", name(a), name(b)), rational::render(w)))
            .collect();
        let marginal = gamma
            .marginal()
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(a, x)| (name(a), rational::render(x)))
            .collect();
        JoiningDocument { left: gamma.left.clone(), right: gamma.right.clone(), gamma: entries, marginal }
    }

    pub fn to_joining(&self) -> Result<WeightJoining> {
        let li: HashMap<&str, usize> = self.left.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let ri: HashMap<&str, usize> = self.right.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let m = self.right.len();
        let parse_vertex = |s: &str| -> Result<usize> {
            let (u, v) = s.split_once('|').ok_or_else(|| OgjError::Parse(format!("bad product vertex {s:?}")))?;
            let u = *li.get(u).ok_or_else(|| OgjError::Parse(format!("unknown left vertex {u:?}")))?;
            let v = *ri.get(v).ok_or_else(|| OgjError::Parse(format!("unknown right vertex {v:?}")))?;
            Ok(u * m + v)
        };
        let mut entries = Vec::new();
        for (k, w) in &self.gamma {
            let (a, b) = k.split_once('\u{2192}').ok_or_else(|| OgjError::Parse(format!("bad joining key {k:?}")))?;
            entries.push(((parse_vertex(a)?, parse_vertex(b)?), rational::parse(w)?));
        }
        Ok(WeightJoining::from_unordered(self.left.clone(), self.right.clone(), entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::default_ids;
    use crate::labeling::{cost_matrix, LabelValue};
    use crate::rational::frac;

    fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, rational::one())).collect();
        WeightedGraph::unlabeled(n, &e).unwrap()
    }

    fn p2() -> WeightedGraph {
        unit(2, &[(0, 1)])
    }

    fn labeled_path() -> WeightedGraph {
        WeightedGraph::from_edges(
            default_ids(4),
            [0, 1, 2, 2].iter().map(|&l| LabelValue::Int(l)).collect(),
            &[(0, 1, frac(1, 3)), (1, 2, frac(1, 12)), (2, 3, frac(1, 12))],
        )
        .unwrap()
    }

    #[test]
    fn product_of_p2_has_four_quarter_entries() {
        let g = p2();
        let gamma = product_joining(&g, &g);
        assert_eq!(gamma.entries().len(), 4);
        assert!(gamma.entries().values().all(|w| *w == frac(1, 4)));
        assert!(is_valid_joining(&g, &g, &gamma).is_valid());
        for u in 0..2 {
            for v in 0..2 {
                assert_eq!(gamma.r(u, v), &(g.p(u) * g.p(v)));
            }
        }
    }

    #[test]
    fn product_with_single_self_loop_copies_alpha() {
        let g = labeled_path();
        let h = WeightedGraph::unlabeled(1, &[(0, 0, rational::one())]).unwrap();
        let gamma = product_joining(&g, &h);
        for ((u, u2), w) in g.pair_map() {
            assert_eq!(gamma.get(u, u2), w);
        }
        assert!(is_valid_joining(&g, &h, &gamma).is_valid());
    }

    #[test]
    fn edge_coupling_sums_reproduce_marginal_graphs() {
        let g = labeled_path();
        let h = unit(3, &[(0, 1), (1, 2), (0, 2)]);
        let (a, b) = edge_coupling_sums(&product_joining(&g, &h));
        assert_eq!(a, g.pair_map());
        assert_eq!(b, h.pair_map());
    }

    #[test]
    fn identity_and_swap_on_p2() {
        let g = p2();
        let id = bijective_from_map(&g, &g, &[0, 1]).unwrap();
        assert_eq!(id.get(0, 3), frac(1, 2));
        assert!(is_valid_joining(&g, &g, &id).is_valid());
        assert!(is_bijective(&id));
        assert_eq!(induced_map(&id).unwrap(), vec![0, 1]);
        let swap = bijective_from_map(&g, &g, &[1, 0]).unwrap();
        assert_eq!(swap.get(1, 2), frac(1, 2));
        assert!(is_valid_joining(&g, &g, &swap).is_valid());
        assert!(!is_deterministic(&product_joining(&g, &g)));
    }

    #[test]
    fn diagonal_joining_copies_alpha() {
        let g = labeled_path();
        let gamma = bijective_from_map(&g, &g, &[0, 1, 2, 3]).unwrap();
        for ((u, u2), w) in g.pair_map() {
            assert_eq!(gamma.get(u * 4 + u, u2 * 4 + u2), w);
        }
    }

    #[test]
    fn weight_breaking_map_is_rejected() {
        let g = labeled_path();
        let err = bijective_from_map(&g, &g, &[3, 2, 1, 0]).unwrap_err();
        assert!(matches!(err, OgjError::NotWeightPreserving(_)));
    }

    #[test]
    fn zeroed_product_entry_breaks_normalization_and_transition() {
        let g = WeightedGraph::unlabeled(3, &[(0, 1, frac(1, 1)), (1, 2, frac(1, 1))]).unwrap();
        let gamma = product_joining(&g, &g);
        let mut map = gamma.entries().clone();
        map.remove(&(4, 0));
        map.remove(&(0, 4));
        let broken = WeightJoining::for_graphs(&g, &g, map);
        let report = is_valid_joining(&g, &g, &broken);
        assert!(report.violations.iter().any(|v| matches!(v, JoiningViolation::Weight(WeightViolation::Normalization { .. }))));
        assert!(report.violations.iter().any(|v| matches!(v, JoiningViolation::LeftTransition { .. })));
    }

    #[test]
    fn c4_folds_onto_p2() {
        let c4 = unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let h = p2();
        let f = [0, 1, 0, 1];
        factor_check(&c4, &h, &f).unwrap();
        let gamma = joining_from_factor(&c4, &h, &f).unwrap();
        assert!(is_deterministic(&gamma));
        assert!(!is_bijective(&gamma));
        assert!(is_valid_joining(&c4, &h, &gamma).is_valid());
    }

    #[test]
    fn isomorphism_and_collapse_are_factor_maps() {
        let g = labeled_path();
        let gamma = joining_from_factor(&g, &g, &[0, 1, 2, 3]).unwrap();
        assert!(is_bijective(&gamma));
        let point = WeightedGraph::unlabeled(1, &[(0, 0, rational::one())]).unwrap();
        joining_from_factor(&g, &point, &[0, 0, 0, 0]).unwrap();
        assert!(factor_check(&g, &g, &[0, 0, 1, 2]).is_err());
    }

    fn two_triangles() -> WeightedGraph {
        unit(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    }

    #[test]
    fn product_of_two_triangles_decomposes_into_quarters() {
        let g = two_triangles();
        let d = decompose_disjoint(&g, &g, &product_joining(&g, &g)).unwrap();
        assert!(d.pi.iter().flatten().all(|x| *x == frac(1, 4)));
        let back = compose_disjoint(&g, &g, &d.pi, &d.blocks).unwrap();
        assert_eq!(back, product_joining(&g, &g));
    }

    #[test]
    fn connected_decomposition_is_trivial() {
        let g = labeled_path();
        let gamma = product_joining(&g, &g);
        let d = decompose_disjoint(&g, &g, &gamma).unwrap();
        assert_eq!(d.pi, vec![vec![rational::one()]]);
        assert_eq!(d.blocks[0][0], gamma);
    }

    #[test]
    fn identity_coupling_of_isomorphic_components_is_bijective() {
        let g = two_triangles();
        let d = decompose_disjoint(&g, &g, &bijective_from_map(&g, &g, &[0, 1, 2, 3, 4, 5]).unwrap()).unwrap();
        assert_eq!(d.pi, vec![vec![frac(1, 2), Rational::zero()], vec![Rational::zero(), frac(1, 2)]]);
        let gamma = compose_disjoint(&g, &g, &d.pi, &d.blocks).unwrap();
        assert!(is_bijective(&gamma));
        let bad_pi = vec![vec![frac(1, 2), frac(1, 2)], vec![Rational::zero(), Rational::zero()]];
        assert!(matches!(compose_disjoint(&g, &g, &bad_pi, &d.blocks), Err(OgjError::NotCoupling(_))));
    }

    #[test]
    fn restriction_to_everything_is_identity() {
        let g = labeled_path();
        let gamma = product_joining(&g, &g);
        let all = [0, 1, 2, 3];
        let r = restrict_joining(&g, &g, &gamma, &all, &all).unwrap();
        assert_eq!(r.mass, rational::one());
        assert_eq!(r.joining, gamma);
    }

    #[test]
    fn restriction_to_tree_interior() {
        // P4 with leaves 0 and 3; the identity joining maps leaves to leaves.
        let g = unit(4, &[(0, 1), (1, 2), (2, 3)]);
        let gamma = bijective_from_map(&g, &g, &[0, 1, 2, 3]).unwrap();
        let r = restrict_joining(&g, &g, &gamma, &[1, 2], &[1, 2]).unwrap();
        assert_eq!(r.mass, frac(1, 3));
        assert!(is_valid_joining(&r.left, &r.right, &r.joining).is_valid());
        let straddle = bijective_from_map(&g, &g, &[3, 2, 1, 0]).unwrap();
        assert!(restrict_joining(&g, &g, &straddle, &[1, 2], &[0, 1]).is_err());
    }

    #[test]
    fn gluing_examples() {
        let g = p2();
        let id = bijective_from_map(&g, &g, &[0, 1]).unwrap();
        let swap = bijective_from_map(&g, &g, &[1, 0]).unwrap();
        let (_, g13) = glue_three_way(&g, &g, &g, &id, &id).unwrap();
        assert_eq!(g13, id);
        let (three, g13) = glue_three_way(&g, &g, &g, &id, &swap).unwrap();
        assert_eq!(g13, swap);
        assert_eq!(&three.project((0, 1), 2), id.entries());
        assert_eq!(&three.project((1, 2), 2), swap.entries());

        let a = labeled_path();
        let b = unit(3, &[(0, 1), (1, 2)]);
        let c = unit(3, &[(0, 1), (1, 2), (2, 0)]);
        let (three, g13) = glue_three_way(&a, &b, &c, &product_joining(&a, &b), &product_joining(&b, &c)).unwrap();
        assert_eq!(g13, product_joining(&a, &c));
        assert_eq!(&three.project((0, 1), 3), product_joining(&a, &b).entries());
        assert!(glue_three_way(&a, &b, &c, &product_joining(&a, &b), &product_joining(&c, &c)).is_err());
    }

    #[test]
    fn constraint_system_accepts_product_and_rejects_outside_support() {
        let g = labeled_path();
        let h = unit(3, &[(0, 1), (1, 2)]);
        let cs = build_constraints(&g, &h, &cost_matrix(g.labels(), h.labels())).unwrap();
        let x = cs.from_joining(&product_joining(&g, &h)).unwrap();
        assert!(cs.is_feasible_point(&x));
        let gamma = product_joining(&g, &h);
        assert_eq!(cs.objective_value(&x), gamma.cost(&cost_matrix(g.labels(), h.labels())));
        assert_eq!(cs.to_joining(&x), gamma);
    }

    #[test]
    fn zero_marginal_column_carries_no_variables() {
        let g = p2();
        let h = unit(3, &[(0, 1)]);
        let cs = build_constraints(&g, &h, &CostMatrix::zeros(2, 3)).unwrap();
        assert!(cs.vars.iter().all(|&(a, b)| a % 3 != 2 && b % 3 != 2));
        assert!(cs.is_feasible_point(&cs.from_joining(&product_joining(&g, &h)).unwrap()));
    }

    #[test]
    fn joining_document_round_trip() {
        let g = labeled_path();
        let gamma = product_joining(&g, &p2());
        let doc = JoiningDocument::from_joining(&gamma);
        assert_eq!(doc.to_joining().unwrap(), gamma);
        assert_eq!(doc.gamma.len(), gamma.unordered_entries().count());
    }
}
