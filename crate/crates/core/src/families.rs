//! Seeded generators for trees, forests, flowers and small random graphs, and
//! the gluing constructor used to assemble graphs from connected parts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{OgjError, Result};
use crate::graph::{component_ids, default_ids, normalize, PairMap, SimpleGraph, WeightedGraph};
use crate::labeling::{magic_tag, AugmentedLabeling, LabelValue, Scheme};
use crate::rational::{self, Rational};

/// Finite pools that edge weights and primary labels are drawn from.
#[derive(Clone, Debug)]
pub struct Pools {
    pub weights: Vec<Rational>,
    pub labels: Vec<LabelValue>,
}

impl Default for Pools {
    fn default() -> Self {
        Pools { weights: vec![rational::one()], labels: vec![LabelValue::unit()] }
    }
}

impl Pools {
    pub fn new(weights: Vec<Rational>, labels: Vec<LabelValue>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_positive()) {
            return Err(OgjError::OutOfRange("weight pool must be nonempty and positive".into()));
        }
        if labels.is_empty() {
            return Err(OgjError::OutOfRange("label pool must be nonempty".into()));
        }
        Ok(Pools { weights, labels })
    }

    /// Weights `1..=k` and integer labels `0..l`.
    pub fn integers(k: i64, l: i64) -> Self {
        Pools { weights: (1..=k).map(rational::int).collect(), labels: (0..l).map(LabelValue::Int).collect() }
    }

    fn weight(&self, rng: &mut impl Rng) -> Rational {
        self.weights.choose(rng).expect("nonempty pool").clone()
    }

    fn label(&self, rng: &mut impl Rng) -> LabelValue {
        self.labels.choose(rng).expect("nonempty pool").clone()
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edges of a uniformly random labeled tree on `n >= 2` vertices (Prüfer decoding).
pub fn random_tree_edges(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = *leaves.iter().next().expect("a leaf always exists");
        leaves.remove(&leaf);
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn weighted_edges(edges: &[(usize, usize)], pools: &Pools, rng: &mut impl Rng) -> Vec<(usize, usize, Rational)> {
    edges.iter().map(|&(u, v)| (u, v, pools.weight(rng))).collect()
}

pub fn gen_tree_with(n: usize, pools: &Pools, rng: &mut impl Rng) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(OgjError::OutOfRange(format!("trees need n >= 2, got {n}")));
    }
    let edges = random_tree_edges(n, rng);
    let weighted = weighted_edges(&edges, pools, rng);
    let labels = (0..n).map(|_| pools.label(rng)).collect();
    WeightedGraph::from_raw_edges(default_ids(n), labels, &weighted)
}

pub fn gen_tree(n: usize, pools: &Pools, seed: u64) -> Result<WeightedGraph> {
    gen_tree_with(n, pools, &mut rng_from_seed(seed))
}

/// Disjoint union of random trees, normalized as a whole, with tree-mass + multiweight labels.
pub fn gen_forest_with(sizes: &[usize], pools: &Pools, rng: &mut impl Rng) -> Result<(WeightedGraph, AugmentedLabeling)> {
    if sizes.is_empty() {
        return Err(OgjError::OutOfRange("forest needs at least one tree".into()));
    }
    let mut edges = Vec::new();
    let mut offset = 0;
    for &n in sizes {
        if n < 2 {
            return Err(OgjError::OutOfRange(format!("trees need n >= 2, got {n}")));
        }
        let tree = random_tree_edges(n, rng);
        edges.extend(weighted_edges(&tree, pools, rng).into_iter().map(|(u, v, w)| (u + offset, v + offset, w)));
        offset += n;
    }
    let labels = (0..offset).map(|_| pools.label(rng)).collect();
    let g = WeightedGraph::from_raw_edges(default_ids(offset), labels, &edges)?;
    let psi = Scheme::TreeMassMultiweight.labels(&g)?;
    Ok((g, psi))
}

pub fn gen_forest(sizes: &[usize], pools: &Pools, seed: u64) -> Result<(WeightedGraph, AugmentedLabeling)> {
    gen_forest_with(sizes, pools, &mut rng_from_seed(seed))
}

/// Path with `len` edges on vertices `0..=len`, raw weights from the pool.
fn raw_path(len: usize, pools: &Pools, rng: &mut impl Rng) -> Vec<(usize, usize, Rational)> {
    (0..len).map(|i| (i, i + 1, pools.weight(rng))).collect()
}

/// Flower with the given cycle lengths sharing one root, built by gluing paths.
pub fn gen_flower_with(cycle_lengths: &[usize], pools: &Pools, rng: &mut impl Rng) -> Result<(WeightedGraph, AugmentedLabeling)> {
    if cycle_lengths.len() < 2 {
        return Err(OgjError::OutOfRange("flowers need at least two cycles".into()));
    }
    if let Some(&l) = cycle_lengths.iter().find(|&&l| l < 3) {
        return Err(OgjError::OutOfRange(format!("cycle length {l} < 3")));
    }
    let mut parts = Vec::new();
    let mut totals = Vec::new();
    for &len in cycle_lengths {
        let edges = raw_path(len, pools, rng);
        let total: Rational = edges.iter().map(|(_, _, w)| w * rational::int(2)).sum();
        let labels = (0..=len).map(|_| pools.label(rng)).collect();
        let graph = WeightedGraph::from_raw_edges(default_ids(len + 1), labels, &edges)?;
        parts.push(GluingPart { graph, leaf_map: BTreeMap::from([(0, 0), (len, 0)]) });
        totals.push(total);
    }
    let sum: Rational = totals.iter().sum();
    let mu = totals.iter().map(|t| t / &sum).collect();
    let spec = GluingSpec { parts, m_ids: vec!["root".into()], m_labels: None, mu, tau: PairMap::new() };
    let glued = glue(&spec)?;
    let g = glued.graph;
    let psi = Scheme::PathMassMultiweight.labels(&g)?;
    Ok((g, psi))
}

pub fn gen_flower(cycle_lengths: &[usize], pools: &Pools, seed: u64) -> Result<(WeightedGraph, AugmentedLabeling)> {
    gen_flower_with(cycle_lengths, pools, &mut rng_from_seed(seed))
}

/// Connected graph: a random spanning tree plus up to `extra` random chords.
pub fn gen_connected_with(n: usize, extra: usize, pools: &Pools, rng: &mut impl Rng) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(OgjError::OutOfRange(format!("need n >= 2, got {n}")));
    }
    let mut edges: BTreeSet<(usize, usize)> = random_tree_edges(n, rng).into_iter().collect();
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    let weighted = weighted_edges(&edges, pools, rng);
    let labels = (0..n).map(|_| pools.label(rng)).collect();
    WeightedGraph::from_raw_edges(default_ids(n), labels, &weighted)
}

/// Erdős–Rényi style simple graph with edge probability `num/den`.
pub fn gen_simple_with(n: usize, num: u32, den: u32, rng: &mut impl Rng) -> SimpleGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_ratio(num, den) {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::new(n, &edges).expect("edges in range")
}

pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Moves the structure of `G` along `sigma`; `sigma` is an isomorphism from `G` to the result.
pub fn permute(g: &WeightedGraph, sigma: &[usize]) -> Result<WeightedGraph> {
    g.permute(sigma)
}

// ---------------------------------------------------------------------------
// Gluing

#[derive(Clone, Debug)]
pub struct GluingPart {
    /// A connected graph `G_i`.
    pub graph: WeightedGraph,
    /// Leaf subset `L_i` with its map `f_i` into `M` (indices).
    pub leaf_map: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug)]
pub struct GluingSpec {
    pub parts: Vec<GluingPart>,
    pub m_ids: Vec<String>,
    /// Primary labels of `M`; defaults to the reserved tags `("M", j)`.
    pub m_labels: Option<Vec<LabelValue>>,
    pub mu: Vec<Rational>,
    /// Symmetric nonnegative weights on `M x M`.
    pub tau: PairMap,
}

#[derive(Clone, Debug)]
pub struct Glued {
    pub graph: WeightedGraph,
    /// For each glued vertex, `(part, local index)`; `None` for vertices of `M`.
    pub origin: Vec<Option<(usize, usize)>>,
    /// Glued index of each element of `M`.
    pub m_vertices: Vec<usize>,
}

impl GluingSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(OgjError::InvalidGluing(s));
        if self.mu.len() != self.parts.len() {
            return bad(format!("{} weights for {} parts", self.mu.len(), self.parts.len()));
        }
        if let Some(m) = self.mu.iter().find(|m| !m.is_positive()) {
            return bad(format!("mu = {} is not positive", rational::render(m)));
        }
        let k = self.m_ids.len();
        if let Some(l) = &self.m_labels {
            if l.len() != k {
                return bad("M label count mismatch".into());
            }
        }
        for (i, part) in self.parts.iter().enumerate() {
            let g = &part.graph;
            if !g.is_connected() {
                return bad(format!("part {i} is not connected"));
            }
            if part.leaf_map.len() >= g.n() {
                return bad(format!("part {i} keeps no vertex outside its leaf set"));
            }
            let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
            for (&leaf, &m) in &part.leaf_map {
                let Some(base) = (leaf < g.n()).then(|| g.leaf_base(leaf)).flatten() else {
                    return bad(format!("vertex {leaf} of part {i} is not a leaf"));
                };
                if part.leaf_map.contains_key(&base) {
                    return bad(format!("leaf {leaf} of part {i} has a glued base"));
                }
                if m >= k {
                    return bad(format!("leaf {leaf} of part {i} maps outside M"));
                }
                if !used.insert((base, m)) {
                    return bad(format!("two leaves of part {i} with base {base} map to the same element of M"));
                }
            }
        }
        for (&(a, b), w) in &self.tau {
            if a >= k || b >= k {
                return bad(format!("tau entry ({a}, {b}) outside M x M"));
            }
            if w.is_negative() {
                return bad("tau has a negative entry".into());
            }
            if self.tau.get(&(b, a)) != Some(w) {
                return bad(format!("tau is not symmetric at ({a}, {b})"));
            }
        }
        let total: Rational = self.mu.iter().sum::<Rational>() + self.tau.values().sum::<Rational>();
        if total != rational::one() {
            return bad(format!("mu and tau sum to {}, not 1", rational::render(&total)));
        }
        Ok(())
    }
}

/// Assembles `alpha = tau + sum_i mu_i alpha'_i` on `U'_1 ∪ ... ∪ U'_k ∪ M`.
pub fn glue(spec: &GluingSpec) -> Result<Glued> {
    spec.validate()?;
    let mut origin = Vec::new();
    let mut local_to_glued: Vec<HashMap<usize, usize>> = Vec::new();
    for (i, part) in spec.parts.iter().enumerate() {
        let mut map = HashMap::new();
        for u in (0..part.graph.n()).filter(|u| !part.leaf_map.contains_key(u)) {
            map.insert(u, origin.len());
            origin.push(Some((i, u)));
        }
        local_to_glued.push(map);
    }
    let first_m = origin.len();
    let m_vertices: Vec<usize> = (0..spec.m_ids.len()).map(|j| first_m + j).collect();
    origin.extend(spec.m_ids.iter().map(|_| None));

    let mut ids: Vec<String> = origin
        .iter()
        .map(|o| o.map(|(i, u)| spec.parts[i].graph.id(u).to_string()).unwrap_or_default())
        .collect();
    for (j, id) in spec.m_ids.iter().enumerate() {
        ids[first_m + j] = id.clone();
    }
    if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
        for (x, o) in origin.iter().enumerate() {
            if let Some((i, u)) = o {
                ids[x] = format!("p{i}:{}", spec.parts[*i].graph.id(*u));
            }
        }
        if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
            return Err(OgjError::InvalidGluing("vertex ids collide after prefixing".into()));
        }
    }

    let mut labels: Vec<LabelValue> = origin
        .iter()
        .map(|o| o.map(|(i, u)| spec.parts[i].graph.label(u).clone()).unwrap_or_else(LabelValue::unit))
        .collect();
    for j in 0..spec.m_ids.len() {
        labels[first_m + j] = spec.m_labels.as_ref().map(|l| l[j].clone()).unwrap_or_else(|| magic_tag(j));
    }

    let mut alpha = PairMap::new();
    for (&(a, b), w) in &spec.tau {
        *alpha.entry((first_m + a, first_m + b)).or_insert_with(Rational::zero) += w;
    }
    for (i, part) in spec.parts.iter().enumerate() {
        let place = |u: usize| match part.leaf_map.get(&u) {
            Some(&m) => first_m + m,
            None => local_to_glued[i][&u],
        };
        for ((u, v), w) in part.graph.pair_map() {
            *alpha.entry((place(u), place(v))).or_insert_with(Rational::zero) += &spec.mu[i] * w;
        }
    }
    let graph = WeightedGraph::new(ids, labels, &alpha)?;
    Ok(Glued { graph, origin, m_vertices })
}

fn part_tag(psi_part: &LabelValue, mu: &Rational, attachments: Vec<(usize, LabelValue)>) -> LabelValue {
    let mut att: Vec<LabelValue> = attachments
        .into_iter()
        .map(|(m, l)| LabelValue::pair(LabelValue::Int(m as i64), l))
        .collect();
    att.sort();
    LabelValue::Tuple(vec![LabelValue::atom("part"), psi_part.clone(), LabelValue::Rat(mu.clone()), LabelValue::Tuple(att)])
}

/// Glues and assigns labels satisfying the magic-decomposition conditions:
/// `M` gets the reserved tags, and each kept vertex records its part label
/// under `base`, the part weight and the labels of its glued leaves.
pub fn glue_with_magic_labels(spec: &GluingSpec, base: &Scheme) -> Result<Glued> {
    let mut glued = glue(spec)?;
    let part_labels: Vec<Vec<LabelValue>> = spec.parts.iter().map(|p| base.labels(&p.graph).map(|a| a.labels)).collect::<Result<_>>()?;
    let mut labels = glued.graph.labels().to_vec();
    for (x, o) in glued.origin.iter().enumerate() {
        match o {
            Some((i, u)) => {
                let part = &spec.parts[*i];
                let attachments = part
                    .leaf_map
                    .iter()
                    .filter(|(&leaf, _)| part.graph.leaf_base(leaf) == Some(*u))
                    .map(|(&leaf, &m)| (m, part_labels[*i][leaf].clone()))
                    .collect();
                labels[x] = part_tag(&part_labels[*i][*u], &spec.mu[*i], attachments);
            }
            None => {
                let j = glued.m_vertices.iter().position(|&y| y == x).expect("M vertex");
                labels[x] = magic_tag(j);
            }
        }
    }
    glued.graph = glued.graph.with_labels(labels)?;
    Ok(glued)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct MagicReport {
    /// Conditions (1) through (5), in order.
    pub conditions: [bool; 5],
    /// The parts rebuilt from the glued graph and its labels match the specification.
    pub parts_reconstructed: bool,
}

impl MagicReport {
    pub fn holds(&self) -> bool {
        self.conditions.iter().all(|&c| c) && self.parts_reconstructed
    }
}

fn is_reserved(l: &LabelValue) -> bool {
    matches!(l, LabelValue::Tuple(items) if items.first() == Some(&LabelValue::atom("M")))
}

fn part_fields(l: &LabelValue) -> Option<(&LabelValue, &Rational, &[LabelValue])> {
    match l {
        LabelValue::Tuple(items) if items.len() == 4 && items[0] == LabelValue::atom("part") => match (&items[2], &items[3]) {
            (LabelValue::Rat(mu), LabelValue::Tuple(att)) => Some((&items[1], mu, att)),
            _ => None,
        },
        _ => None,
    }
}

/// `eta'`: the part label of the leaf glued to `m_label` at the base labeled `base_label`.
fn leaf_label(m_label: &LabelValue, base_label: &LabelValue) -> Option<LabelValue> {
    let LabelValue::Tuple(tag) = m_label else { return None };
    let idx = tag.get(1)?;
    let (_, _, att) = part_fields(base_label)?;
    att.iter().find_map(|a| match a {
        LabelValue::Tuple(pair) if pair.len() == 2 && &pair[0] == idx => Some(pair[1].clone()),
        _ => None,
    })
}

/// Checks the five label conditions on a glued graph and rebuilds every part
/// from the glued weights and labels alone.
pub fn check_magic_decomposition(spec: &GluingSpec, glued: &Glued, base: &Scheme) -> Result<MagicReport> {
    let g = &glued.graph;
    let psi = g.labels();
    let in_m: BTreeSet<usize> = glued.m_vertices.iter().copied().collect();
    let part_labels: Vec<Vec<LabelValue>> = spec.parts.iter().map(|p| base.labels(&p.graph).map(|a| a.labels)).collect::<Result<_>>()?;
    let mut report = MagicReport::default();

    report.conditions[0] = (0..g.n()).all(|x| is_reserved(&psi[x]) == in_m.contains(&x));
    report.conditions[1] = glued.m_vertices.iter().map(|&x| &psi[x]).collect::<BTreeSet<_>>().len() == glued.m_vertices.len();
    report.conditions[2] = glued.origin.iter().enumerate().all(|(x, o)| match o {
        Some((i, u)) => part_fields(&psi[x]).map(|f| f.0) == Some(&part_labels[*i][*u]),
        None => true,
    });
    report.conditions[3] = spec.parts.iter().enumerate().all(|(i, part)| {
        part.leaf_map.iter().all(|(&leaf, &m)| {
            let base_local = part.graph.leaf_base(leaf).expect("validated leaf");
            let base_x = glued.origin.iter().position(|o| *o == Some((i, base_local))).expect("kept base");
            leaf_label(&psi[glued.m_vertices[m]], &psi[base_x]).as_ref() == Some(&part_labels[i][leaf])
        })
    });
    report.conditions[4] = glued.origin.iter().enumerate().all(|(x, o)| match o {
        Some((i, _)) => part_fields(&psi[x]).map(|f| f.1) == Some(&spec.mu[*i]),
        None => true,
    });

    // Rebuild parts: components of G - M, weights divided by omega, leaves from M-edges.
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in (0..n).filter(|x| !in_m.contains(x)) {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = groups.len();
        comp[s] = c;
        let mut group = vec![s];
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for (y, _) in g.neighbors(x) {
                if !in_m.contains(&y) && comp[y] == usize::MAX {
                    comp[y] = c;
                    group.push(y);
                    stack.push(y);
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }
    let mut rebuilt_ok = groups.len() == spec.parts.len();
    for group in &groups {
        let Some((i, _)) = glued.origin[group[0]] else {
            rebuilt_ok = false;
            continue;
        };
        let Some((_, mu, _)) = part_fields(&psi[group[0]]) else {
            rebuilt_ok = false;
            continue;
        };
        let part = &spec.parts[i];
        // Expected local index of every rebuilt vertex.
        let mut expected = PairMap::new();
        for ((u, v), w) in part.graph.pair_map() {
            expected.insert((u, v), w);
        }
        let mut rebuilt = PairMap::new();
        let mut rebuilt_labels: BTreeMap<usize, LabelValue> = BTreeMap::new();
        for &x in group {
            let (_, u) = glued.origin[x].expect("part vertex");
            rebuilt_labels.insert(u, part_fields(&psi[x]).map(|f| f.0.clone()).unwrap_or_else(LabelValue::unit));
            for (y, w) in g.neighbors(x) {
                let w = w / mu;
                if in_m.contains(&y) {
                    let Some(ll) = leaf_label(&psi[y], &psi[x]) else {
                        rebuilt_ok = false;
                        continue;
                    };
                    // The leaf of this part attached at u and glued to y.
                    let m = glued.m_vertices.iter().position(|&z| z == y).expect("M vertex");
                    let Some((&leaf, _)) = part
                        .leaf_map
                        .iter()
                        .find(|(&l, &mm)| mm == m && part.graph.leaf_base(l) == Some(u))
                    else {
                        rebuilt_ok = false;
                        continue;
                    };
                    rebuilt.insert((u, leaf), w.clone());
                    rebuilt.insert((leaf, u), w);
                    rebuilt_labels.insert(leaf, ll);
                } else {
                    let (_, v) = glued.origin[y].expect("part vertex");
                    rebuilt.insert((u, v), w);
                }
            }
        }
        let labels_ok = rebuilt_labels.len() == part.graph.n()
            && rebuilt_labels.iter().all(|(&u, l)| *l == part_labels[i][u]);
        rebuilt_ok &= rebuilt == expected && labels_ok;
    }
    report.parts_reconstructed = rebuilt_ok;
    Ok(report)
}

/// Component index of every vertex (re-exported for family predicates).
pub fn components(g: &WeightedGraph) -> Vec<usize> {
    component_ids(g)
}

/// Acyclic and connected.
pub fn is_tree(g: &WeightedGraph) -> bool {
    g.is_connected() && g.edges().iter().all(|(u, v, _)| u != v) && g.edges().len() + 1 == g.n()
}

pub fn is_forest(g: &WeightedGraph) -> bool {
    let k = component_ids(g).into_iter().max().map_or(0, |m| m + 1);
    g.edges().iter().all(|(u, v, _)| u != v) && g.edges().len() + k == g.n()
}

/// One root of degree `2k`, every other vertex of degree 2, `k` cycles.
pub fn is_flower(g: &WeightedGraph, cycles: usize) -> bool {
    let roots: Vec<usize> = (0..g.n()).filter(|&u| g.degree(u) != 2).collect();
    g.is_connected()
        && roots.len() == 1
        && g.degree(roots[0]) == 2 * cycles
        && g.edges().iter().all(|(u, v, _)| u != v)
        && g.edges().len() == g.n() - 1 + cycles
}

/// Normalizes a nonnegative symmetric map (re-exported for callers assembling raw weights).
pub fn normalized(ids: Vec<String>, labels: Vec<LabelValue>, raw: &PairMap) -> Result<WeightedGraph> {
    normalize(ids, labels, raw)
}
