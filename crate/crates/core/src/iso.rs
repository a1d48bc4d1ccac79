//! Isomorphism detection and identification from optimal joinings, plus the
//! brute-force and color-refinement baselines used to cross-check them.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::graph::{SimpleGraph, WeightedGraph};
use crate::joining::{build_constraints, induced_map, is_bijective, ConstraintSystem};
use crate::labeling::{cost_matrix, LabelValue, Scheme};
use crate::lp::{self, DEFAULT_FACE_CAP};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    IsomorphicCertified,
    NotIsomorphicCertified,
    ZeroCostButUncertified,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::IsomorphicCertified => "isomorphic-certified",
            Verdict::NotIsomorphicCertified => "not-isomorphic-certified",
            Verdict::ZeroCostButUncertified => "zero-cost-but-uncertified",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DetectionResult {
    pub rho: Rational,
    pub verdict: Verdict,
    /// Vertex maps `f[u] = v`, each verified.
    pub isomorphisms: Vec<Vec<usize>>,
    /// Bijective optimal extreme points found by the search.
    pub vertices_examined: usize,
    pub scheme: String,
    /// Set when the opt-in brute-force fallback ran: whether it found an isomorphism.
    pub brute_force: Option<bool>,
    pub complete: bool,
}

impl DetectionResult {
    pub fn to_json(&self, g: &WeightedGraph, h: &WeightedGraph, flags: Value) -> Value {
        json!({
            "rho": rational::render(&self.rho),
            "verdict": self.verdict.as_str(),
            "isomorphisms": self.isomorphisms.iter().map(|f| map_json(g, h, f)).collect::<Vec<_>>(),
            "scheme": self.scheme,
            "flags": flags,
        })
    }
}

pub fn map_json(g: &WeightedGraph, h: &WeightedGraph, f: &[usize]) -> Value {
    let m: serde_json::Map<String, Value> =
        f.iter().enumerate().map(|(u, &v)| (g.id(u).to_string(), Value::String(h.id(v).to_string()))).collect();
    Value::Object(m)
}

#[derive(Clone, Copy, Debug)]
pub struct DetectOptions {
    pub cap: usize,
    pub brute_force_fallback: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { cap: DEFAULT_FACE_CAP, brute_force_fallback: false }
    }
}

/// Constraint system for the label cost of `scheme`.
pub fn scheme_system(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme) -> Result<ConstraintSystem> {
    let (a, b) = scheme.label_pair(g, h)?;
    build_constraints(g, h, &cost_matrix(&a.labels, &b.labels))
}

/// `rho_Psi(G, H)`.
pub fn ogj_cost(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme) -> Result<Rational> {
    Ok(lp::solve(&scheme_system(g, h, scheme)?)?.rho)
}

/// Whether `rho_Psi(G, H) = 0`, decided by feasibility on the zero-cost columns alone.
pub fn cost_vanishes(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme) -> Result<bool> {
    Ok(lp::zero_cost_vertex(&scheme_system(g, h, scheme)?)?.is_some())
}

pub fn detect(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme) -> Result<DetectionResult> {
    detect_with(g, h, scheme, DetectOptions::default())
}

pub fn detect_with(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme, opts: DetectOptions) -> Result<DetectionResult> {
    g.require_fully_supported()?;
    h.require_fully_supported()?;
    let cs = scheme_system(g, h, scheme)?;
    let sol = lp::solve(&cs)?;
    let mut result = DetectionResult {
        rho: sol.rho.clone(),
        verdict: Verdict::NotIsomorphicCertified,
        isomorphisms: Vec::new(),
        vertices_examined: 0,
        scheme: scheme.to_string(),
        brute_force: None,
        complete: true,
    };
    if !sol.rho.is_zero() {
        return Ok(result);
    }
    let search = lp::bijective_optimal_vertices(&cs, &sol.rho, opts.cap, true)?;
    result.vertices_examined = search.vertices.len();
    result.complete = search.complete || !search.vertices.is_empty();
    let found = search.vertices.iter().find_map(|v| {
        let gamma = cs.to_joining(&v.values);
        let f = induced_map(&gamma).ok()?;
        (is_bijective(&gamma) && verify_isomorphism(g, h, &f).is_ok()).then_some(f)
    });
    if let Some(f) = found {
        result.verdict = Verdict::IsomorphicCertified;
        result.isomorphisms.push(f);
        return Ok(result);
    }
    result.verdict = Verdict::ZeroCostButUncertified;
    if opts.brute_force_fallback {
        let maps = brute_force_isomorphisms(g, h);
        result.brute_force = Some(!maps.is_empty());
        if let Some(f) = maps.into_iter().next() {
            result.verdict = Verdict::IsomorphicCertified;
            result.isomorphisms.push(f);
        }
    }
    Ok(result)
}

#[derive(Clone, Debug)]
pub struct Identification {
    pub rho: Rational,
    /// Sorted, verified vertex maps induced by bijective optimal extreme points.
    pub isomorphisms: Vec<Vec<usize>>,
    pub vertices_examined: usize,
    /// Every optimal extreme point found was bijective.
    pub all_vertices_bijective: bool,
    pub complete: bool,
    pub faces_visited: usize,
}

pub fn identify(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme) -> Result<Identification> {
    identify_with_cap(g, h, scheme, DEFAULT_FACE_CAP)
}

pub fn identify_with_cap(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme, cap: usize) -> Result<Identification> {
    g.require_fully_supported()?;
    h.require_fully_supported()?;
    let cs = scheme_system(g, h, scheme)?;
    let rho = lp::solve(&cs)?.rho;
    let mut out = Identification {
        rho: rho.clone(),
        isomorphisms: Vec::new(),
        vertices_examined: 0,
        all_vertices_bijective: true,
        complete: true,
        faces_visited: 0,
    };
    if !rho.is_zero() {
        return Ok(out);
    }
    let e = lp::enumerate_optimal_vertices(&cs, &rho, cap)?;
    let mut maps = BTreeSet::new();
    for v in &e.vertices {
        let gamma = cs.to_joining(&v.values);
        match is_bijective(&gamma).then(|| induced_map(&gamma)) {
            Some(Ok(f)) if verify_isomorphism(g, h, &f).is_ok() => {
                maps.insert(f);
            }
            _ => out.all_vertices_bijective = false,
        }
    }
    let search = lp::bijective_optimal_vertices(&cs, &rho, cap, false)?;
    for v in &search.vertices {
        if let Ok(f) = induced_map(&cs.to_joining(&v.values)) {
            if verify_isomorphism(g, h, &f).is_ok() {
                maps.insert(f);
            }
        }
    }
    out.isomorphisms = maps.into_iter().collect();
    out.vertices_examined = e.vertices.len();
    out.complete = e.complete && search.complete;
    out.faces_visited = e.faces_visited;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum IsoWitness {
    NotBijective { detail: String },
    WeightMismatch { u: String, u2: String, left: String, right: String },
    LabelMismatch { u: String, v: String },
}

/// Checks bijectivity, `alpha(u, u') = beta(f u, f u')` and `phi_G = phi_H ∘ f`.
pub fn verify_isomorphism(g: &WeightedGraph, h: &WeightedGraph, f: &[usize]) -> std::result::Result<(), IsoWitness> {
    if g.n() != h.n() || f.len() != g.n() {
        return Err(IsoWitness::NotBijective { detail: format!("{} vertices, {} images, {} targets", g.n(), f.len(), h.n()) });
    }
    let mut hit = vec![false; h.n()];
    for &v in f {
        if v >= h.n() || std::mem::replace(&mut hit[v], true) {
            return Err(IsoWitness::NotBijective { detail: format!("target {v} repeated or out of range") });
        }
    }
    for (u, &v) in f.iter().enumerate() {
        if g.label(u) != h.label(v) {
            return Err(IsoWitness::LabelMismatch { u: g.id(u).into(), v: h.id(v).into() });
        }
    }
    for u in 0..g.n() {
        let touched: BTreeSet<usize> = g
            .neighbors(u)
            .map(|(x, _)| x)
            .chain(f.iter().enumerate().filter(|(_, &v)| h.has_edge(f[u], v)).map(|(x, _)| x))
            .collect();
        for u2 in touched {
            let (a, b) = (g.weight(u, u2), h.weight(f[u], f[u2]));
            if a != b {
                return Err(IsoWitness::WeightMismatch {
                    u: g.id(u).into(),
                    u2: g.id(u2).into(),
                    left: rational::render(&a),
                    right: rational::render(&b),
                });
            }
        }
    }
    Ok(())
}

/// All weight- and primary-label-preserving bijections, by backtracking.
pub fn brute_force_isomorphisms(g: &WeightedGraph, h: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    if n != h.n() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut f = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        g: &WeightedGraph,
        h: &WeightedGraph,
        u: usize,
        f: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if u == g.n() {
            out.push(f.clone());
            return;
        }
        for v in 0..h.n() {
            if used[v] || g.label(u) != h.label(v) || g.p(u) != h.p(v) || g.degree(u) != h.degree(v) {
                continue;
            }
            if g.weight(u, u) != h.weight(v, v) {
                continue;
            }
            if (0..u).any(|x| g.weight(u, x) != h.weight(v, f[x])) {
                continue;
            }
            f[u] = v;
            used[v] = true;
            extend(g, h, u + 1, f, used, out);
            used[v] = false;
            f[u] = usize::MAX;
        }
    }
    extend(g, h, 0, &mut f, &mut used, &mut out);
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SchemeFlags {
    pub injective: bool,
    pub locally_injective: bool,
    pub has_magic_symbol: bool,
}

pub fn check_scheme_preconditions(g: &WeightedGraph, psi: &[LabelValue]) -> SchemeFlags {
    let mut counts: BTreeMap<&LabelValue, usize> = BTreeMap::new();
    for l in psi {
        *counts.entry(l).or_default() += 1;
    }
    let locally_injective = (0..g.n()).all(|u| {
        let mut seen = HashSet::new();
        g.neighbors(u).all(|(x, _)| seen.insert(&psi[x]))
    });
    SchemeFlags {
        injective: counts.values().all(|&c| c == 1),
        locally_injective,
        has_magic_symbol: counts.values().any(|&c| c == 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WlOutcome {
    Distinguished { round: usize },
    Inconclusive { rounds: usize },
}

impl WlOutcome {
    pub fn is_distinguished(&self) -> bool {
        matches!(self, WlOutcome::Distinguished { .. })
    }
}

/// Color refinement on the disjoint union, starting from the graphs' labels.
pub fn wl_test(g: &SimpleGraph, h: &SimpleGraph) -> WlOutcome {
    let n = g.n();
    let adj: Vec<Vec<usize>> = g
        .adjacency
        .iter()
        .map(|a| a.iter().copied().collect())
        .chain(h.adjacency.iter().map(|a| a.iter().map(|&v| v + n).collect()))
        .collect();
    let mut ids: BTreeMap<&LabelValue, usize> = BTreeMap::new();
    for l in g.labels.iter().chain(&h.labels) {
        let k = ids.len();
        ids.entry(l).or_insert(k);
    }
    let mut colors: Vec<usize> = g.labels.iter().chain(&h.labels).map(|l| ids[l]).collect();
    let histograms_differ = |c: &[usize]| {
        let mut a = c[..n].to_vec();
        let mut b = c[n..].to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a != b
    };
    let mut classes = ids.len();
    let mut round = 0;
    loop {
        if histograms_differ(&colors) {
            return WlOutcome::Distinguished { round };
        }
        let signatures: Vec<(usize, Vec<usize>)> = adj
            .iter()
            .enumerate()
            .map(|(x, nb)| {
                let mut s: Vec<usize> = nb.iter().map(|&y| colors[y]).collect();
                s.sort_unstable();
                (colors[x], s)
            })
            .collect();
        let canon: BTreeMap<&(usize, Vec<usize>), usize> =
            signatures.iter().collect::<BTreeSet<_>>().into_iter().enumerate().map(|(i, s)| (s, i)).collect();
        let next: Vec<usize> = signatures.iter().map(|s| canon[s]).collect();
        round += 1;
        if canon.len() == classes {
            // Stable partition; the histogram check above already ran on it.
            return if histograms_differ(&next) {
                WlOutcome::Distinguished { round }
            } else {
                WlOutcome::Inconclusive { rounds: round }
            };
        }
        classes = canon.len();
        colors = next;
    }
}
