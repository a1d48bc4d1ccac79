//! Weighted, vertex-labeled undirected graphs represented by weight functions.
//!
//! A graph on `n` vertices stores a symmetric, nonnegative weight function
//! `alpha` over ordered vertex pairs whose entries sum to exactly one. Vertex
//! ids are opaque strings; the input order fixes the matrix indexing used by
//! every other module.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{OgjError, Result};
use crate::labeling::LabelValue;
use crate::rational::{self, Rational};

/// Sparse map over ordered vertex pairs `(u, u')`, indexed by position.
pub type PairMap = BTreeMap<(usize, usize), Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<BTreeMap<usize, Rational>>,
    labels: Vec<LabelValue>,
    marginal: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum WeightViolation {
    Negative {
        u: String,
        v: String,
        #[serde(with = "rational::serde_str")]
        weight: Rational,
    },
    Symmetry {
        u: String,
        v: String,
        #[serde(with = "rational::serde_str")]
        forward: Rational,
        #[serde(with = "rational::serde_str")]
        backward: Rational,
    },
    Normalization {
        #[serde(with = "rational::serde_str")]
        total: Rational,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<WeightViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three weight-function axioms, reporting a witness for each violation.
pub fn validate_weight_function(ids: &[String], w: &PairMap) -> ValidationReport {
    let mut violations = Vec::new();
    let name = |i: usize| ids.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
    let mut total = Rational::zero();
    for (&(u, v), x) in w {
        total += x;
        if x.is_negative() {
            violations.push(WeightViolation::Negative { u: name(u), v: name(v), weight: x.clone() });
        }
        if u < v {
            let back = w.get(&(v, u)).cloned().unwrap_or_else(Rational::zero);
            if &back != x {
                violations.push(WeightViolation::Symmetry {
                    u: name(u),
                    v: name(v),
                    forward: x.clone(),
                    backward: back,
                });
            }
        } else if u > v && !w.contains_key(&(v, u)) && !x.is_zero() {
            violations.push(WeightViolation::Symmetry {
                u: name(u),
                v: name(v),
                forward: x.clone(),
                backward: Rational::zero(),
            });
        }
    }
    if total != rational::one() {
        violations.push(WeightViolation::Normalization { total });
    }
    ValidationReport { violations }
}

impl WeightedGraph {
    /// Builds a graph from an ordered-pair weight map that must already be a weight function.
    pub fn new(ids: Vec<String>, labels: Vec<LabelValue>, weights: &PairMap) -> Result<Self> {
        Self::check_shape(&ids, &labels, weights)?;
        let report = validate_weight_function(&ids, weights);
        if !report.is_valid() {
            return Err(OgjError::InvalidWeights(format!("{:?}", report.violations)));
        }
        Ok(Self::assemble(ids, labels, weights))
    }

    /// Builds a graph from an undirected edge list (one entry per unordered pair).
    pub fn from_edges(
        ids: Vec<String>,
        labels: Vec<LabelValue>,
        edges: &[(usize, usize, Rational)],
    ) -> Result<Self> {
        let map = symmetrize(ids.len(), edges)?;
        Self::new(ids, labels, &map)
    }

    /// Like [`WeightedGraph::from_edges`] but divides by the total ordered-pair mass first.
    pub fn from_raw_edges(
        ids: Vec<String>,
        labels: Vec<LabelValue>,
        edges: &[(usize, usize, Rational)],
    ) -> Result<Self> {
        let map = symmetrize(ids.len(), edges)?;
        normalize(ids, labels, &map)
    }

    /// Unlabeled graph (constant unit label) with vertex ids `0..n`.
    pub fn unlabeled(n: usize, edges: &[(usize, usize, Rational)]) -> Result<Self> {
        Self::from_raw_edges(default_ids(n), vec![LabelValue::unit(); n], edges)
    }

    fn check_shape(ids: &[String], labels: &[LabelValue], weights: &PairMap) -> Result<()> {
        if ids.is_empty() {
            return Err(OgjError::InvalidGraph("empty vertex set".into()));
        }
        if labels.len() != ids.len() {
            return Err(OgjError::InvalidGraph(format!(
                "{} labels for {} vertices",
                labels.len(),
                ids.len()
            )));
        }
        let distinct: BTreeSet<&String> = ids.iter().collect();
        if distinct.len() != ids.len() {
            return Err(OgjError::InvalidGraph("duplicate vertex id".into()));
        }
        if let Some(&(u, v)) = weights.keys().find(|(u, v)| *u >= ids.len() || *v >= ids.len()) {
            return Err(OgjError::InvalidGraph(format!("pair ({u}, {v}) out of range")));
        }
        Ok(())
    }

    fn assemble(ids: Vec<String>, labels: Vec<LabelValue>, weights: &PairMap) -> Self {
        let n = ids.len();
        let mut adj = vec![BTreeMap::new(); n];
        for (&(u, v), w) in weights {
            if !w.is_zero() {
                adj[u].insert(v, w.clone());
            }
        }
        let marginal = adj.iter().map(|row| row.values().sum()).collect();
        let index = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        WeightedGraph { ids, index, adj, labels, marginal }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, u: usize) -> &str {
        &self.ids[u]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn weight(&self, u: usize, v: usize) -> Rational {
        self.adj[u].get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains_key(&v)
    }

    /// Positive-weight neighbors of `u`, including `u` itself when it carries a self-loop.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.adj[u].iter().map(|(&v, w)| (v, w))
    }

    /// Number of distinct `u'` with `alpha(u, u') > 0`; a self-loop counts once.
    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn label(&self, u: usize) -> &LabelValue {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[LabelValue] {
        &self.labels
    }

    pub fn marginal(&self) -> &[Rational] {
        &self.marginal
    }

    pub fn p(&self, u: usize) -> &Rational {
        &self.marginal[u]
    }

    pub fn is_fully_supported(&self) -> bool {
        self.marginal.iter().all(|p| p.is_positive())
    }

    pub fn require_fully_supported(&self) -> Result<()> {
        match self.marginal.iter().position(|p| !p.is_positive()) {
            Some(u) => Err(OgjError::NotFullySupported(self.ids[u].clone())),
            None => Ok(()),
        }
    }

    /// Ordered-pair weight map (both directions of every edge).
    pub fn pair_map(&self) -> PairMap {
        let mut map = PairMap::new();
        for (u, row) in self.adj.iter().enumerate() {
            for (&v, w) in row {
                map.insert((u, v), w.clone());
            }
        }
        map
    }

    /// Undirected edges `(u, v, w)` with `u <= v`.
    pub fn edges(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for (u, row) in self.adj.iter().enumerate() {
            for (&v, w) in row.range(u..) {
                out.push((u, v, w.clone()));
            }
        }
        out
    }

    /// Number of positive entries of `alpha` over ordered pairs.
    pub fn ordered_edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.len()).sum()
    }

    pub fn with_labels(&self, labels: Vec<LabelValue>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(OgjError::InvalidGraph(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n()
            )));
        }
        let mut g = self.clone();
        g.labels = labels;
        Ok(g)
    }

    /// Vertices with exactly one neighbor, which is not the vertex itself.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&u| self.adj[u].len() == 1 && !self.adj[u].contains_key(&u))
            .collect()
    }

    /// Base of a leaf: its unique neighbor.
    pub fn leaf_base(&self, u: usize) -> Option<usize> {
        if self.adj[u].len() == 1 && !self.adj[u].contains_key(&u) {
            self.adj[u].keys().next().copied()
        } else {
            None
        }
    }

    pub fn is_connected(&self) -> bool {
        component_ids(self).iter().all(|&c| c == 0)
    }

    /// Hop distances from `src` over positive-weight edges (`None` when unreachable).
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in self.adj[u].keys() {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Renames vertices so that `perm[u]` is the new position of old vertex `u`.
    /// Vertex ids stay attached to positions; the structure moves.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n())?;
        let mut map = PairMap::new();
        for (u, row) in self.adj.iter().enumerate() {
            for (&v, w) in row {
                map.insert((perm[u], perm[v]), w.clone());
            }
        }
        let mut labels = vec![LabelValue::unit(); self.n()];
        for (u, l) in self.labels.iter().enumerate() {
            labels[perm[u]] = l.clone();
        }
        Ok(Self::assemble(self.ids.clone(), labels, &map))
    }

    /// Subgraph induced on `verts` with weights divided by `scale` (vertex order follows `verts`).
    pub(crate) fn induced_scaled(&self, verts: &[usize], scale: &Rational) -> Result<Self> {
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut map = PairMap::new();
        for (i, &u) in verts.iter().enumerate() {
            for (&v, w) in &self.adj[u] {
                if let Some(&j) = pos.get(&v) {
                    map.insert((i, j), w / scale);
                }
            }
        }
        let ids = verts.iter().map(|&u| self.ids[u].clone()).collect();
        let labels = verts.iter().map(|&u| self.labels[u].clone()).collect();
        Self::new(ids, labels, &map)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(OgjError::NotBijective(format!("map has {} entries for {} vertices", perm.len(), n)));
    }
    let mut seen = vec![false; n];
    for (u, &v) in perm.iter().enumerate() {
        if v >= n || seen[v] {
            return Err(OgjError::NotBijective(format!("vertex {u} maps to {v} twice or out of range")));
        }
        seen[v] = true;
    }
    Ok(())
}

pub fn default_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn symmetrize(n: usize, edges: &[(usize, usize, Rational)]) -> Result<PairMap> {
    let mut map = PairMap::new();
    for (u, v, w) in edges {
        let (u, v) = (*u, *v);
        if u >= n || v >= n {
            return Err(OgjError::InvalidGraph(format!("edge ({u}, {v}) out of range")));
        }
        if map.contains_key(&(u, v)) {
            return Err(OgjError::InvalidGraph(format!("multi-edge between {u} and {v}")));
        }
        map.insert((u, v), w.clone());
        map.insert((v, u), w.clone());
    }
    Ok(map)
}

/// Divides every entry of a nonnegative symmetric map by its total ordered-pair sum.
pub fn normalize(ids: Vec<String>, labels: Vec<LabelValue>, raw: &PairMap) -> Result<WeightedGraph> {
    WeightedGraph::check_shape(&ids, &labels, raw)?;
    let report = validate_weight_function(&ids, raw);
    if let Some(v) = report
        .violations
        .iter()
        .find(|v| !matches!(v, WeightViolation::Normalization { .. }))
    {
        return Err(OgjError::InvalidWeights(format!("{v:?}")));
    }
    let total: Rational = raw.values().sum();
    if total.is_zero() {
        return Err(OgjError::ZeroMass);
    }
    let scaled: PairMap = raw.iter().map(|(&k, w)| (k, w / &total)).collect();
    WeightedGraph::new(ids, labels, &scaled)
}

/// Component index per vertex, numbered in order of first appearance.
pub fn component_ids(g: &WeightedGraph) -> Vec<usize> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut next = 0;
    for s in 0..g.n() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for (v, _) in g.neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

#[derive(Clone, Debug)]
pub struct Component {
    pub vertices: Vec<usize>,
    /// `S = sum of p(u)` over the component.
    pub mass: Rational,
    /// The renormalized component graph; `None` for a zero-mass (isolated) vertex.
    pub graph: Option<WeightedGraph>,
}

impl Component {
    pub fn is_degenerate(&self) -> bool {
        self.graph.is_none()
    }
}

pub fn connected_components(g: &WeightedGraph) -> Vec<Component> {
    let comp = component_ids(g);
    let k = comp.iter().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); k];
    for (u, &c) in comp.iter().enumerate() {
        groups[c].push(u);
    }
    groups
        .into_iter()
        .map(|vertices| {
            let mass: Rational = vertices.iter().map(|&u| g.p(u).clone()).sum();
            let graph = if mass.is_zero() {
                None
            } else {
                Some(g.induced_scaled(&vertices, &mass).expect("component of a weight function"))
            };
            Component { vertices, mass, graph }
        })
        .collect()
}

/// Reversible random walk on a weighted graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovChain {
    pub states: Vec<String>,
    /// Sparse rows of `P(u' | u)`.
    pub transition: Vec<BTreeMap<usize, Rational>>,
    pub stationary: Vec<Rational>,
}

impl MarkovChain {
    pub fn prob(&self, u: usize, v: usize) -> Rational {
        self.transition[u].get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn satisfies_detailed_balance(&self) -> bool {
        let n = self.states.len();
        (0..n).all(|u| {
            (0..n).all(|v| &self.stationary[u] * self.prob(u, v) == &self.stationary[v] * self.prob(v, u))
        })
    }

    /// Rows with positive stationary mass sum to one; the others are all-zero.
    pub fn rows_are_stochastic(&self) -> bool {
        self.transition.iter().zip(&self.stationary).all(|(row, p)| {
            let s: Rational = row.values().sum();
            if p.is_zero() {
                row.is_empty()
            } else {
                s == rational::one()
            }
        })
    }

    /// `alpha(u, u') = p(u) P(u' | u)`.
    pub fn edge_weights(&self) -> PairMap {
        let mut map = PairMap::new();
        for (u, row) in self.transition.iter().enumerate() {
            for (&v, pr) in row {
                map.insert((u, v), &self.stationary[u] * pr);
            }
        }
        map
    }
}

pub fn random_walk(g: &WeightedGraph) -> MarkovChain {
    let transition = (0..g.n())
        .map(|u| {
            let p = g.p(u);
            if p.is_zero() {
                BTreeMap::new()
            } else {
                g.neighbors(u).map(|(v, w)| (v, w / p)).collect()
            }
        })
        .collect();
    MarkovChain { states: g.ids().to_vec(), transition, stationary: g.marginal().to_vec() }
}

/// Simple unweighted graph (no self-loops, no weights) with primary labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    pub ids: Vec<String>,
    pub adjacency: Vec<BTreeSet<usize>>,
    pub labels: Vec<LabelValue>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(OgjError::InvalidGraph(format!("bad simple edge ({u}, {v})")));
            }
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(SimpleGraph { ids: default_ids(n), adjacency, labels: vec![LabelValue::unit(); n] })
    }

    pub fn with_labels(mut self, labels: Vec<LabelValue>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(OgjError::InvalidGraph("label count mismatch".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Support of a weighted graph, dropping self-loops and weights.
    pub fn from_weighted(g: &WeightedGraph) -> Self {
        let adjacency = (0..g.n())
            .map(|u| g.neighbors(u).map(|(v, _)| v).filter(|&v| v != u).collect())
            .collect();
        SimpleGraph { ids: g.ids().to_vec(), adjacency, labels: g.labels().to_vec() }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, a) in self.adjacency.iter().enumerate() {
            out.extend(a.range(u + 1..).map(|&v| (u, v)));
        }
        out
    }

    /// Unit edge weights, normalized.
    pub fn to_weighted(&self) -> Result<WeightedGraph> {
        let edges: Vec<_> = self.edges().into_iter().map(|(u, v)| (u, v, rational::one())).collect();
        WeightedGraph::from_raw_edges(self.ids.clone(), self.labels.clone(), &edges)
    }
}

/// Weighted graph of the delta-lazy random walk, labeled `(phi(u), (deg(u), |U|))`.
///
/// Each ordered edge gets `(1 - delta) / 2|E|` and each vertex a self-loop of
/// `delta * deg(u) / 2|E|`.
pub fn lazy_transform(g: &SimpleGraph, delta: &Rational) -> Result<WeightedGraph> {
    let half = rational::frac(1, 2);
    if delta <= &half || delta >= &rational::one() {
        return Err(OgjError::OutOfRange(format!(
            "lazy parameter must lie in (1/2, 1), got {}",
            rational::render(delta)
        )));
    }
    let m = g.edge_count();
    if m == 0 {
        return Err(OgjError::InvalidGraph("lazy transform needs at least one edge".into()));
    }
    let two_m = rational::int(2 * m as i64);
    let step = (rational::one() - delta) / &two_m;
    let mut map = PairMap::new();
    for u in 0..g.n() {
        let deg = g.degree(u);
        if deg > 0 {
            map.insert((u, u), delta * rational::int(deg as i64) / &two_m);
        }
        for &v in &g.adjacency[u] {
            map.insert((u, v), step.clone());
        }
    }
    let n = g.n() as i64;
    let labels = (0..g.n())
        .map(|u| {
            LabelValue::pair(
                g.labels[u].clone(),
                LabelValue::Tuple(vec![LabelValue::Int(g.degree(u) as i64), LabelValue::Int(n)]),
            )
        })
        .collect();
    WeightedGraph::new(g.ids.clone(), labels, &map)
}

// ---------------------------------------------------------------------------
// JSON graph document

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default)]
    pub label: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub w: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub normalized: bool,
}

impl GraphDocument {
    /// Raw ordered-pair map, symmetrized, before any normalization.
    pub fn raw_pairs(&self) -> Result<(Vec<String>, Vec<LabelValue>, PairMap)> {
        let ids: Vec<String> = self.vertices.iter().map(|v| v.id.clone()).collect();
        let labels = self.vertices.iter().map(|v| LabelValue::from_json(&v.label)).collect();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            let u = *index.get(e.u.as_str()).ok_or_else(|| OgjError::InvalidGraph(format!("unknown vertex {:?}", e.u)))?;
            let v = *index.get(e.v.as_str()).ok_or_else(|| OgjError::InvalidGraph(format!("unknown vertex {:?}", e.v)))?;
            edges.push((u, v, rational::parse(&e.w)?));
        }
        let map = symmetrize(ids.len(), &edges)?;
        Ok((ids, labels, map))
    }

    pub fn to_graph(&self) -> Result<WeightedGraph> {
        let (ids, labels, map) = self.raw_pairs()?;
        if self.normalized {
            WeightedGraph::new(ids, labels, &map)
        } else {
            normalize(ids, labels, &map)
        }
    }

    pub fn from_graph(g: &WeightedGraph) -> Self {
        let vertices = (0..g.n())
            .map(|u| VertexDoc { id: g.id(u).to_string(), label: g.label(u).to_json() })
            .collect();
        let edges = g
            .edges()
            .into_iter()
            .map(|(u, v, w)| EdgeDoc { u: g.id(u).to_string(), v: g.id(v).to_string(), w: rational::render(&w) })
            .collect();
        GraphDocument { vertices, edges, normalized: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    pub(crate) fn labeled_path() -> WeightedGraph {
        let labels = [0, 1, 2, 2].iter().map(|&l| LabelValue::Int(l)).collect();
        WeightedGraph::from_edges(
            default_ids(4),
            labels,
            &[(0, 1, frac(1, 3)), (1, 2, frac(1, 12)), (2, 3, frac(1, 12))],
        )
        .unwrap()
    }

    #[test]
    fn labeled_path_is_a_weight_function() {
        let g = labeled_path();
        assert!(validate_weight_function(g.ids(), &g.pair_map()).is_valid());
    }

    #[test]
    fn asymmetric_map_reports_symmetry_witness() {
        let ids = default_ids(2);
        let mut w = PairMap::new();
        w.insert((0, 1), frac(1, 2));
        w.insert((1, 0), frac(1, 4));
        let report = validate_weight_function(&ids, &w);
        assert!(report.violations.iter().any(|v| matches!(v, WeightViolation::Symmetry { u, v, .. } if u == "0" && v == "1")));
    }

    #[test]
    fn all_zero_map_violates_normalization() {
        let ids = default_ids(3);
        let report = validate_weight_function(&ids, &PairMap::new());
        assert_eq!(report.violations, vec![WeightViolation::Normalization { total: Rational::zero() }]);
    }

    #[test]
    fn normalize_examples() {
        let tri = WeightedGraph::unlabeled(3, &[(0, 1, rational::one()), (1, 2, rational::one()), (0, 2, rational::one())]).unwrap();
        assert!(tri.pair_map().values().all(|w| *w == frac(1, 6)));
        let edge = WeightedGraph::unlabeled(2, &[(0, 1, rational::int(7))]).unwrap();
        assert_eq!(edge.weight(0, 1), frac(1, 2));
        let g = labeled_path();
        let again = normalize(g.ids().to_vec(), g.labels().to_vec(), &g.pair_map()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn normalize_rejects_zero_mass_and_asymmetry() {
        let ids = default_ids(2);
        assert!(matches!(normalize(ids.clone(), vec![LabelValue::unit(); 2], &PairMap::new()), Err(OgjError::ZeroMass)));
        let mut w = PairMap::new();
        w.insert((0, 1), rational::one());
        assert!(normalize(ids, vec![LabelValue::unit(); 2], &w).is_err());
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(labeled_path().marginal(), &[frac(1, 3), frac(5, 12), frac(1, 6), frac(1, 12)]);
        let edge = WeightedGraph::unlabeled(2, &[(0, 1, rational::one())]).unwrap();
        assert_eq!(edge.marginal(), &[frac(1, 2), frac(1, 2)]);
        let iso = WeightedGraph::unlabeled(3, &[(0, 1, rational::one())]).unwrap();
        assert!(iso.p(2).is_zero());
        assert!(!iso.is_fully_supported());
    }

    #[test]
    fn components_of_two_triangles() {
        let one = rational::one();
        let g = WeightedGraph::unlabeled(
            6,
            &[(0, 1, one.clone()), (1, 2, one.clone()), (0, 2, one.clone()), (3, 4, one.clone()), (4, 5, one.clone()), (3, 5, one)],
        )
        .unwrap();
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 2);
        for c in &comps {
            assert_eq!(c.mass, frac(1, 2));
            let cg = c.graph.as_ref().unwrap();
            assert!(cg.pair_map().values().all(|w| *w == frac(1, 6)));
        }
    }

    #[test]
    fn isolated_vertex_is_degenerate_component() {
        let g = WeightedGraph::unlabeled(3, &[(0, 1, rational::one())]).unwrap();
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 2);
        assert!(comps[1].is_degenerate());
        assert!(comps[1].mass.is_zero());
        let tree = WeightedGraph::unlabeled(3, &[(0, 1, rational::one()), (1, 2, rational::one())]).unwrap();
        let comps = connected_components(&tree);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].mass, rational::one());
    }

    #[test]
    fn random_walk_examples() {
        let edge = WeightedGraph::unlabeled(2, &[(0, 1, rational::one())]).unwrap();
        let mc = random_walk(&edge);
        assert_eq!(mc.prob(0, 1), rational::one());
        assert_eq!(mc.prob(1, 0), rational::one());
        assert!(mc.prob(0, 0).is_zero());

        let mc = random_walk(&labeled_path());
        assert_eq!(mc.prob(1, 0), frac(4, 5));
        assert_eq!(mc.prob(1, 2), frac(1, 5));
        assert!(mc.satisfies_detailed_balance());
        assert!(mc.rows_are_stochastic());

        let iso = WeightedGraph::unlabeled(3, &[(0, 1, rational::one())]).unwrap();
        assert!(random_walk(&iso).transition[2].is_empty());
    }

    #[test]
    fn lazy_transform_examples() {
        let tri = SimpleGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let g = lazy_transform(&tri, &frac(3, 4)).unwrap();
        assert_eq!(g.weight(0, 0), frac(1, 4));
        assert_eq!(g.weight(0, 1), frac(1, 24));
        let p2 = SimpleGraph::new(2, &[(0, 1)]).unwrap();
        let g = lazy_transform(&p2, &frac(3, 4)).unwrap();
        assert_eq!(g.weight(0, 0), frac(3, 8));
        assert_eq!(g.weight(0, 1), frac(1, 8));
        assert_eq!(g.label(0), &LabelValue::pair(LabelValue::unit(), LabelValue::Tuple(vec![LabelValue::Int(1), LabelValue::Int(2)])));
        assert!(lazy_transform(&p2, &frac(1, 2)).is_err());
        assert!(lazy_transform(&p2, &rational::one()).is_err());
        assert!(lazy_transform(&SimpleGraph::new(2, &[]).unwrap(), &frac(3, 4)).is_err());
    }

    #[test]
    fn document_round_trip() {
        let g = labeled_path();
        let doc = GraphDocument::from_graph(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back: GraphDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn document_rejects_multi_edges() {
        let doc: GraphDocument = serde_json::from_str(
            r#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"b","w":"1"},{"u":"b","v":"a","w":"1"}],"normalized":false}"#,
        )
        .unwrap();
        assert!(doc.to_graph().is_err());
    }
}
