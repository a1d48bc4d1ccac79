//! Label values, labeling schemes and the 0-1 label cost.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{OgjError, Result};
use crate::graph::{component_ids, random_walk, WeightedGraph};
use crate::rational::{self, Rational};

/// A hashable, totally ordered label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelValue {
    Atom(String),
    Int(i64),
    Rat(Rational),
    Tuple(Vec<LabelValue>),
    /// Always stored sorted, so equality ignores insertion order.
    Multiset(Vec<Rational>),
    Class(usize),
}

impl LabelValue {
    /// The constant label `()`.
    pub fn unit() -> Self {
        LabelValue::Tuple(Vec::new())
    }

    pub fn pair(a: LabelValue, b: LabelValue) -> Self {
        LabelValue::Tuple(vec![a, b])
    }

    pub fn atom(s: impl Into<String>) -> Self {
        LabelValue::Atom(s.into())
    }

    pub fn multiset(mut items: Vec<Rational>) -> Self {
        items.sort();
        LabelValue::Multiset(items)
    }

    pub fn from_json(v: &Value) -> Self {
        match v {
            Value::Null => LabelValue::unit(),
            Value::Bool(b) => LabelValue::Atom(b.to_string()),
            Value::String(s) => LabelValue::Atom(s.clone()),
            Value::Number(n) => match n.as_i64() {
                Some(i) => LabelValue::Int(i),
                None => rational::parse(&n.to_string())
                    .map(LabelValue::Rat)
                    .unwrap_or_else(|_| LabelValue::Atom(n.to_string())),
            },
            Value::Array(items) => LabelValue::Tuple(items.iter().map(LabelValue::from_json).collect()),
            Value::Object(map) => {
                if map.len() == 1 {
                    if let Some(Value::Array(items)) = map.get("multiset") {
                        let parsed: Option<Vec<Rational>> = items
                            .iter()
                            .map(|x| x.as_str().and_then(|s| rational::parse(s).ok()))
                            .collect();
                        if let Some(qs) = parsed {
                            return LabelValue::multiset(qs);
                        }
                    }
                    if let Some(c) = map.get("class").and_then(Value::as_u64) {
                        return LabelValue::Class(c as usize);
                    }
                    if let Some(q) = map.get("q").and_then(Value::as_str).and_then(|s| rational::parse(s).ok()) {
                        return LabelValue::Rat(q);
                    }
                }
                // Arbitrary objects become sorted (key, value) tuples.
                LabelValue::Tuple(
                    map.iter()
                        .map(|(k, v)| LabelValue::pair(LabelValue::Atom(k.clone()), LabelValue::from_json(v)))
                        .collect(),
                )
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            LabelValue::Atom(s) => Value::String(s.clone()),
            LabelValue::Int(i) => json!(i),
            LabelValue::Rat(q) => json!({ "q": rational::render(q) }),
            LabelValue::Tuple(items) => Value::Array(items.iter().map(LabelValue::to_json).collect()),
            LabelValue::Multiset(qs) => json!({ "multiset": qs.iter().map(rational::render).collect::<Vec<_>>() }),
            LabelValue::Class(c) => json!({ "class": c }),
        }
    }
}

impl fmt::Display for LabelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelValue::Atom(s) => write!(f, "{s}"),
            LabelValue::Int(i) => write!(f, "{i}"),
            LabelValue::Rat(q) => write!(f, "{}", rational::render(q)),
            LabelValue::Tuple(items) => {
                write!(f, "(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            LabelValue::Multiset(qs) => {
                let parts: Vec<String> = qs.iter().map(rational::render).collect();
                write!(f, "{{{{{}}}}}", parts.join(", "))
            }
            LabelValue::Class(c) => write!(f, "#{c}"),
        }
    }
}

impl From<i64> for LabelValue {
    fn from(i: i64) -> Self {
        LabelValue::Int(i)
    }
}

impl From<&str> for LabelValue {
    fn from(s: &str) -> Self {
        LabelValue::Atom(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedLabeling {
    pub scheme: String,
    pub labels: Vec<LabelValue>,
}

impl AugmentedLabeling {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Dense cost matrix `c(u, v)` over `U x V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix {
    rows: Vec<Vec<Rational>>,
    n_right: usize,
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n_right = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_right) {
            return Err(OgjError::VertexMismatch("ragged cost matrix".into()));
        }
        Ok(CostMatrix { rows, n_right })
    }

    pub fn zeros(n_left: usize, n_right: usize) -> Self {
        CostMatrix { rows: vec![vec![Rational::zero(); n_right]; n_left], n_right }
    }

    pub fn get(&self, u: usize, v: usize) -> &Rational {
        &self.rows[u][v]
    }

    pub fn n_left(&self) -> usize {
        self.rows.len()
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        CostMatrix { rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(), n_right: self.n_right }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }
}

/// `c(u, v) = 0` iff `psi_G(u) = psi_H(v)`, else `1`.
pub fn cost_matrix(psi_g: &[LabelValue], psi_h: &[LabelValue]) -> CostMatrix {
    let rows = psi_g
        .iter()
        .map(|a| {
            psi_h
                .iter()
                .map(|b| if a == b { Rational::zero() } else { Rational::one() })
                .collect()
        })
        .collect();
    CostMatrix { rows, n_right: psi_h.len() }
}

pub fn degree_labels(g: &WeightedGraph) -> Vec<LabelValue> {
    (0..g.n()).map(|u| LabelValue::Int(g.degree(u) as i64)).collect()
}

pub fn multiweight_labels(g: &WeightedGraph) -> Vec<LabelValue> {
    (0..g.n())
        .map(|u| LabelValue::multiset(g.neighbors(u).map(|(_, w)| w.clone()).collect()))
        .collect()
}

/// Pairs primary and secondary labels vertex by vertex.
pub fn augment(primary: &[LabelValue], secondary: &[LabelValue]) -> Result<Vec<LabelValue>> {
    if primary.len() != secondary.len() {
        return Err(OgjError::VertexMismatch(format!(
            "{} primary labels vs {} secondary labels",
            primary.len(),
            secondary.len()
        )));
    }
    Ok(primary
        .iter()
        .zip(secondary)
        .map(|(a, b)| LabelValue::pair(a.clone(), b.clone()))
        .collect())
}

/// Hop distance to each landmark's vertex; `None` stands for infinity.
pub fn landmark_distances(g: &WeightedGraph, landmarks: &[LabelValue]) -> Result<Vec<Vec<Option<usize>>>> {
    let mut sources = Vec::with_capacity(landmarks.len());
    for a in landmarks {
        let hits: Vec<usize> = (0..g.n()).filter(|&u| g.label(u) == a).collect();
        if hits.len() > 1 {
            return Err(OgjError::SchemeInapplicable(format!(
                "landmark label {a} is carried by {} vertices",
                hits.len()
            )));
        }
        sources.push(hits.first().map(|&s| g.bfs_distances(s)));
    }
    Ok((0..g.n())
        .map(|u| {
            sources
                .iter()
                .map(|d| d.as_ref().and_then(|d| d[u]))
                .collect()
        })
        .collect())
}

pub fn is_complete_landmark_set(g: &WeightedGraph, landmarks: &[LabelValue]) -> Result<bool> {
    let d = landmark_distances(g, landmarks)?;
    let mut seen = std::collections::HashSet::new();
    Ok(d.iter().all(|row| seen.insert(row.clone())))
}

fn distance_label(row: &[Option<usize>]) -> LabelValue {
    LabelValue::Tuple(
        row.iter()
            .map(|d| match d {
                Some(d) => LabelValue::Int(*d as i64),
                None => LabelValue::atom("inf"),
            })
            .collect(),
    )
}

/// Partition of `U ⊔ V` by the law of the label sequence of the random walk.
///
/// Returns class ids for the vertices of `G` followed by those of `H`,
/// numbered by first appearance.
pub fn process_class_labels(
    g: &WeightedGraph,
    h: &WeightedGraph,
    psi_g: &[LabelValue],
    psi_h: &[LabelValue],
) -> Result<(Vec<usize>, Vec<usize>)> {
    g.require_fully_supported()?;
    h.require_fully_supported()?;
    let (ng, nh) = (g.n(), h.n());
    let n = ng + nh;
    // Block-diagonal transition matrix on the disjoint union.
    let mut rows: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(n);
    for (offset, graph) in [(0, g), (ng, h)] {
        let mc = random_walk(graph);
        for row in mc.transition {
            rows.push(row.into_iter().map(|(v, p)| (v + offset, p)).collect());
        }
    }
    let mut ids: BTreeMap<&LabelValue, usize> = BTreeMap::new();
    let base: Vec<usize> = psi_g
        .iter()
        .chain(psi_h)
        .map(|l| {
            let k = ids.len();
            *ids.entry(l).or_insert(k)
        })
        .collect();
    let k = ids.len();

    let mut basis = EchelonBasis::new(n);
    let mut work: Vec<Vec<Rational>> = Vec::new();
    for a in 0..k {
        let v: Vec<Rational> = base.iter().map(|&b| if b == a { Rational::one() } else { Rational::zero() }).collect();
        if let Some(x) = basis.insert(v) {
            work.push(x);
        }
    }
    while let Some(x) = work.pop() {
        let px: Vec<Rational> = rows.iter().map(|row| row.iter().map(|(j, p)| p * &x[*j]).sum()).collect();
        for a in 0..k {
            let v = px
                .iter()
                .zip(&base)
                .map(|(y, &b)| if b == a { y.clone() } else { Rational::zero() })
                .collect();
            if let Some(y) = basis.insert(v) {
                work.push(y);
            }
        }
    }
    let mut class_of: HashMap<Vec<Rational>, usize> = HashMap::new();
    let classes: Vec<usize> = (0..n)
        .map(|s| {
            let sig: Vec<Rational> = basis.vectors.iter().map(|v| v[s].clone()).collect();
            let next = class_of.len();
            *class_of.entry(sig).or_insert(next)
        })
        .collect();
    Ok((classes[..ng].to_vec(), classes[ng..].to_vec()))
}

/// Row-echelon basis used to grow a vector space one candidate at a time.
struct EchelonBasis {
    vectors: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    dim: usize,
}

impl EchelonBasis {
    fn new(dim: usize) -> Self {
        EchelonBasis { vectors: Vec::new(), pivots: Vec::new(), dim }
    }

    /// Reduces `v` against the basis; stores and returns it if it is independent.
    fn insert(&mut self, mut v: Vec<Rational>) -> Option<Vec<Rational>> {
        debug_assert_eq!(v.len(), self.dim);
        for (b, &p) in self.vectors.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        let p = v.iter().position(|x| !x.is_zero())?;
        let lead = v[p].clone();
        for x in v.iter_mut() {
            *x /= &lead;
        }
        self.vectors.push(v.clone());
        self.pivots.push(p);
        Some(v)
    }
}

/// Named labeling schemes `psi = (phi, phi')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `psi = phi`; also accepted as "identity" (trivial secondary label).
    Primary,
    Degree,
    Multiweight,
    Landmark(Vec<LabelValue>),
    /// Process-level classes of the base scheme, computed jointly for the pair.
    Process(Box<Scheme>),
    /// `(phi, (mass of the containing tree, multiweight))`.
    TreeMassMultiweight,
    /// `(phi, (mass of the containing root path, multiweight))`; the root carries `(phi, (M, 0))`.
    PathMassMultiweight,
}

impl Scheme {
    pub fn is_pair_dependent(&self) -> bool {
        matches!(self, Scheme::Process(_))
    }

    /// Labels of a single graph (not defined for pair-dependent schemes).
    pub fn labels(&self, g: &WeightedGraph) -> Result<AugmentedLabeling> {
        let phi = g.labels();
        let labels = match self {
            Scheme::Primary => phi.to_vec(),
            Scheme::Degree => augment(phi, &degree_labels(g))?,
            Scheme::Multiweight => augment(phi, &multiweight_labels(g))?,
            Scheme::Landmark(marks) => {
                let d = landmark_distances(g, marks)?;
                let secondary: Vec<_> = d.iter().map(|row| distance_label(row)).collect();
                augment(phi, &secondary)?
            }
            Scheme::TreeMassMultiweight => augment(phi, &tree_mass_secondary(g))?,
            Scheme::PathMassMultiweight => augment(phi, &path_mass_secondary(g)?)?,
            Scheme::Process(_) => {
                return Err(OgjError::SchemeInapplicable(
                    "process labels depend on the compared pair".into(),
                ))
            }
        };
        Ok(AugmentedLabeling { scheme: self.to_string(), labels })
    }

    pub fn label_pair(&self, g: &WeightedGraph, h: &WeightedGraph) -> Result<(AugmentedLabeling, AugmentedLabeling)> {
        match self {
            Scheme::Process(base) => {
                let (bg, bh) = base.label_pair(g, h)?;
                let (cg, ch) = process_class_labels(g, h, &bg.labels, &bh.labels)?;
                let wrap = |cs: Vec<usize>| AugmentedLabeling {
                    scheme: self.to_string(),
                    labels: cs.into_iter().map(LabelValue::Class).collect(),
                };
                Ok((wrap(cg), wrap(ch)))
            }
            _ => Ok((self.labels(g)?, self.labels(h)?)),
        }
    }

    pub fn cost(&self, g: &WeightedGraph, h: &WeightedGraph) -> Result<CostMatrix> {
        let (a, b) = self.label_pair(g, h)?;
        Ok(cost_matrix(&a.labels, &b.labels))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Primary => write!(f, "primary"),
            Scheme::Degree => write!(f, "degree"),
            Scheme::Multiweight => write!(f, "multiweight"),
            Scheme::Landmark(marks) => {
                let names: Vec<String> = marks.iter().map(|m| m.to_string()).collect();
                write!(f, "landmark:{}", names.join(","))
            }
            Scheme::Process(base) if **base == Scheme::Primary => write!(f, "process"),
            Scheme::Process(base) => write!(f, "process:{base}"),
            Scheme::TreeMassMultiweight => write!(f, "tree-mass+multiweight"),
            Scheme::PathMassMultiweight => write!(f, "path-mass+multiweight"),
        }
    }
}

impl FromStr for Scheme {
    type Err = OgjError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "primary" | "identity" => Scheme::Primary,
            "degree" => Scheme::Degree,
            "multiweight" => Scheme::Multiweight,
            "process" => Scheme::Process(Box::new(Scheme::Primary)),
            "tree-mass+multiweight" => Scheme::TreeMassMultiweight,
            "path-mass+multiweight" => Scheme::PathMassMultiweight,
            _ => {
                if let Some(rest) = s.strip_prefix("landmark:") {
                    let marks = rest
                        .split(',')
                        .map(str::trim)
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse::<i64>().map(LabelValue::Int).unwrap_or_else(|_| LabelValue::atom(x)))
                        .collect();
                    Scheme::Landmark(marks)
                } else if let Some(rest) = s.strip_prefix("process:") {
                    Scheme::Process(Box::new(rest.parse()?))
                } else {
                    return Err(OgjError::UnknownScheme(s.to_string()));
                }
            }
        })
    }
}

fn tree_mass_secondary(g: &WeightedGraph) -> Vec<LabelValue> {
    let comp = component_ids(g);
    let mut mass: BTreeMap<usize, Rational> = BTreeMap::new();
    for (u, &c) in comp.iter().enumerate() {
        *mass.entry(c).or_insert_with(Rational::zero) += g.p(u);
    }
    let mw = multiweight_labels(g);
    comp.iter()
        .zip(mw)
        .map(|(c, m)| LabelValue::pair(LabelValue::Rat(mass[c].clone()), m))
        .collect()
}

/// The label placed on glued vertex `j` of `M`.
pub fn magic_tag(j: usize) -> LabelValue {
    LabelValue::Tuple(vec![LabelValue::atom("M"), LabelValue::Int(j as i64)])
}

fn path_mass_secondary(g: &WeightedGraph) -> Result<Vec<LabelValue>> {
    let roots: Vec<usize> = (0..g.n()).filter(|&u| g.degree(u) > 2).collect();
    let &[root] = roots.as_slice() else {
        return Err(OgjError::SchemeInapplicable(format!(
            "path-mass labels need exactly one vertex of degree > 2, found {}",
            roots.len()
        )));
    };
    // Components of G minus the root.
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut k = 0;
    for s in (0..n).filter(|&s| s != root) {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = k;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for (v, _) in g.neighbors(u) {
                if v != root && comp[v] == usize::MAX {
                    comp[v] = k;
                    stack.push(v);
                }
            }
        }
        k += 1;
    }
    // Ordered-pair mass touching each path, root edges included.
    let mut mass = vec![Rational::zero(); k];
    for (u, v, w) in g.edges() {
        let c = if u != root { comp[u] } else { comp[v] };
        if u == root && v == root {
            continue;
        }
        let times = if u == v { 1 } else { 2 };
        mass[c] += w * rational::int(times);
    }
    let mw = multiweight_labels(g);
    Ok((0..n)
        .map(|u| {
            if u == root {
                magic_tag(0)
            } else {
                LabelValue::pair(LabelValue::Rat(mass[comp[u]].clone()), mw[u].clone())
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{default_ids, WeightedGraph};
    use crate::rational::frac;

    fn distinct_path() -> WeightedGraph {
        WeightedGraph::from_edges(
            default_ids(4),
            (1..=4).map(LabelValue::Int).collect(),
            &[(0, 1, frac(1, 3)), (1, 2, frac(1, 12)), (2, 3, frac(1, 12))],
        )
        .unwrap()
    }

    fn unit_edges(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, rational::one())).collect();
        WeightedGraph::unlabeled(n, &e).unwrap()
    }

    fn triangle_with_tails() -> WeightedGraph {
        // a b c d e f g h i j
        unit_edges(10, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 3), (5, 7), (6, 8), (8, 9)])
    }

    #[test]
    fn degree_examples() {
        let ints = |v: &[i64]| v.iter().map(|&i| LabelValue::Int(i)).collect::<Vec<_>>();
        assert_eq!(degree_labels(&distinct_path()), ints(&[1, 2, 2, 1]));
        assert_eq!(degree_labels(&triangle_with_tails()), ints(&[1, 2, 2, 3, 2, 3, 3, 1, 2, 1]));
        assert_eq!(degree_labels(&unit_edges(3, &[(0, 1)]))[2], LabelValue::Int(0));
    }

    #[test]
    fn multiweight_examples() {
        let mw = multiweight_labels(&distinct_path());
        assert_eq!(mw[0], LabelValue::multiset(vec![frac(1, 3)]));
        assert_eq!(mw[1], LabelValue::multiset(vec![frac(1, 12), frac(1, 3)]));
        assert_eq!(mw[2], LabelValue::multiset(vec![frac(1, 12), frac(1, 12)]));
        assert_eq!(mw[3], LabelValue::multiset(vec![frac(1, 12)]));
        let tri = unit_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(multiweight_labels(&tri).iter().all(|m| *m == LabelValue::multiset(vec![frac(1, 6), frac(1, 6)])));
        assert_eq!(multiweight_labels(&unit_edges(3, &[(0, 1)]))[2], LabelValue::Multiset(vec![]));
    }

    #[test]
    fn augment_examples() {
        let p4 = unit_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let a = augment(p4.labels(), &degree_labels(&p4)).unwrap();
        assert_eq!(a[0], LabelValue::pair(LabelValue::unit(), LabelValue::Int(1)));
        assert_eq!(a[1], LabelValue::pair(LabelValue::unit(), LabelValue::Int(2)));
        let g = distinct_path();
        let a = augment(g.labels(), &multiweight_labels(&g)).unwrap();
        let distinct: std::collections::BTreeSet<_> = a.iter().collect();
        assert_eq!(distinct.len(), 4);
        let constant = vec![LabelValue::unit(); 3];
        let a = augment(&constant, &constant).unwrap();
        assert!(a.iter().all(|x| *x == a[0]));
        assert!(augment(&constant, &constant[..2]).is_err());
    }

    #[test]
    fn landmark_examples() {
        let mut labels = vec![LabelValue::unit(); 4];
        labels[0] = LabelValue::atom("a");
        let p4 = unit_edges(4, &[(0, 1), (1, 2), (2, 3)]).with_labels(labels.clone()).unwrap();
        let d = landmark_distances(&p4, &[LabelValue::atom("a")]).unwrap();
        assert_eq!(d, vec![vec![Some(0)], vec![Some(1)], vec![Some(2)], vec![Some(3)]]);
        assert!(is_complete_landmark_set(&p4, &[LabelValue::atom("a")]).unwrap());
        let d = landmark_distances(&p4, &[LabelValue::atom("z")]).unwrap();
        assert!(d.iter().all(|row| row == &vec![None]));
        labels[3] = LabelValue::atom("a");
        let twice = p4.with_labels(labels).unwrap();
        assert!(landmark_distances(&twice, &[LabelValue::atom("a")]).is_err());

        let mut c4_labels = vec![LabelValue::unit(); 4];
        c4_labels[0] = LabelValue::atom("a");
        let c4 = unit_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).with_labels(c4_labels).unwrap();
        assert!(!is_complete_landmark_set(&c4, &[LabelValue::atom("a")]).unwrap());

        let all: Vec<LabelValue> = (0..4).map(LabelValue::Int).collect();
        let unique = c4.with_labels(all.clone()).unwrap();
        assert!(is_complete_landmark_set(&unique, &all).unwrap());
    }

    #[test]
    fn triangle_with_tails_process_classes_are_singletons() {
        let g = triangle_with_tails();
        let d = Scheme::Degree.labels(&g).unwrap();
        let (cg, ch) = process_class_labels(&g, &g, &d.labels, &d.labels).unwrap();
        let distinct: std::collections::BTreeSet<_> = cg.iter().collect();
        assert_eq!(distinct.len(), 10);
        assert_eq!(cg, ch);
    }

    #[test]
    fn c6_vs_two_triangles_single_process_class() {
        let c6 = unit_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let tt = unit_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let (a, b) = process_class_labels(&c6, &tt, c6.labels(), tt.labels()).unwrap();
        assert!(a.iter().chain(&b).all(|&c| c == 0));
    }

    #[test]
    fn process_classes_refine_base_labels() {
        let g = distinct_path();
        let (cg, _) = process_class_labels(&g, &g, g.labels(), g.labels()).unwrap();
        assert_eq!(cg, vec![0, 1, 2, 3]);
        let p3 = unit_edges(3, &[(0, 1), (1, 2)]);
        let (cg, _) = process_class_labels(&p3, &p3, p3.labels(), p3.labels()).unwrap();
        // Walk labels are constant, so every start looks alike.
        assert_eq!(cg, vec![0, 0, 0]);
    }

    #[test]
    fn cost_matrix_examples() {
        let single = vec![LabelValue::Int(5)];
        assert!(cost_matrix(&single, &single).get(0, 0).is_zero());
        let g = distinct_path();
        let c = cost_matrix(g.labels(), g.labels());
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(c.get(u, v).is_zero(), u == v);
            }
        }
        let constant = vec![LabelValue::unit(); 3];
        assert!(cost_matrix(&constant, &constant).is_zero());
    }

    #[test]
    fn scheme_names_round_trip() {
        for name in ["primary", "degree", "multiweight", "landmark:a,3", "process", "process:degree", "tree-mass+multiweight", "path-mass+multiweight"] {
            let s: Scheme = name.parse().unwrap();
            assert_eq!(s.to_string(), name);
        }
        assert_eq!("identity".parse::<Scheme>().unwrap(), Scheme::Primary);
        assert!("bogus".parse::<Scheme>().is_err());
    }

    #[test]
    fn label_json_round_trip() {
        let l = LabelValue::Tuple(vec![
            LabelValue::atom("x"),
            LabelValue::Int(-2),
            LabelValue::Rat(frac(1, 3)),
            LabelValue::multiset(vec![frac(1, 2), frac(1, 6)]),
            LabelValue::Class(4),
            LabelValue::unit(),
        ]);
        assert_eq!(LabelValue::from_json(&l.to_json()), l);
        assert_eq!(LabelValue::from_json(&Value::Null), LabelValue::unit());
    }
}
