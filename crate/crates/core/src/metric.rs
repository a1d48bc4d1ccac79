//! The κ-OGJ distance between weightings of a common vertex set, an exact
//! checker for the metric axioms, and a continuity probe for the optimal cost.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{OgjError, Result};
use crate::graph::{PairMap, SimpleGraph, WeightedGraph};
use crate::joining::{glue_three_way, is_valid_joining};
use crate::labeling::{CostMatrix, Scheme};
use crate::lp::{solve, solve_full};
use crate::joining::build_constraints;
use crate::rational::{self, Rational};

/// Hop distances of a connected simple graph, as a cost matrix.
pub fn hop_metric(g: &SimpleGraph) -> Result<CostMatrix> {
    let n = g.n();
    let mut rows = Vec::with_capacity(n);
    for s in 0..n {
        let mut dist = vec![None; n];
        dist[s] = Some(0i64);
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &g.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        let row: Option<Vec<Rational>> = dist.into_iter().map(|d| d.map(rational::int)).collect();
        rows.push(row.ok_or_else(|| OgjError::NotAMetric("hop metric needs a connected graph".into()))?);
    }
    CostMatrix::new(rows)
}

/// Errors unless `c` is a metric: square, symmetric, zero exactly on the diagonal, triangle inequality.
pub fn check_metric_cost(c: &CostMatrix) -> Result<()> {
    let n = c.n_left();
    let bad = |s: String| Err(OgjError::NotAMetric(s));
    if c.n_right() != n {
        return bad(format!("{}x{} cost is not square", n, c.n_right()));
    }
    for x in 0..n {
        for y in 0..n {
            let v = c.get(x, y);
            if x == y && !v.is_zero() {
                return bad(format!("c({x},{x}) = {}", rational::render(v)));
            }
            if x != y && !v.is_positive() {
                return bad(format!("c({x},{y}) = {} is not positive", rational::render(v)));
            }
            if v != c.get(y, x) {
                return bad(format!("c is not symmetric at ({x},{y})"));
            }
            for z in 0..n {
                if v > &(c.get(x, z) + c.get(z, y)) {
                    return bad(format!("triangle fails at ({x},{z},{y})"));
                }
            }
        }
    }
    Ok(())
}

fn require_common(g: &WeightedGraph, h: &WeightedGraph, c: &CostMatrix) -> Result<()> {
    if g.ids() != h.ids() {
        return Err(OgjError::VertexMismatch("graphs must share one vertex set".into()));
    }
    if c.n_left() != g.n() {
        return Err(OgjError::VertexMismatch(format!("cost is {}x{}, graphs have {} vertices", c.n_left(), c.n_right(), g.n())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distance {
    /// `rho_kappa^kappa`, the exact canonical value.
    #[serde(with = "rational::serde_str")]
    pub powered: Rational,
    /// `rho_kappa` as a decimal, for display only.
    pub value: f64,
    pub kappa: u32,
}

impl Distance {
    fn new(powered: Rational, kappa: u32) -> Self {
        let value = rational::to_f64(&powered).powf(1.0 / kappa as f64);
        Distance { powered, value, kappa }
    }
}

fn powered_cost(c: &CostMatrix, kappa: u32) -> Result<CostMatrix> {
    if kappa == 0 {
        return Err(OgjError::OutOfRange("kappa must be a positive integer".into()));
    }
    Ok(c.map(|x| rational::pow(x, kappa)))
}

pub fn ogj_distance(g: &WeightedGraph, h: &WeightedGraph, c: &CostMatrix, kappa: u32) -> Result<Distance> {
    require_common(g, h, c)?;
    check_metric_cost(c)?;
    let cost = powered_cost(c, kappa)?;
    let rho = solve(&build_constraints(g, h, &cost)?)?.rho;
    Ok(Distance::new(rho, kappa))
}

/// Decides `a^(1/k) <= b^(1/k) + c^(1/k)` for nonnegative rationals without taking roots.
/// Returns `None` only when `k >= 3` and bisection could not separate the two sides.
pub fn root_triangle_holds(a: &Rational, b: &Rational, c: &Rational, kappa: u32) -> Option<bool> {
    match kappa {
        1 => Some(a <= &(b + c)),
        2 => {
            let s = a - b - c;
            Some(!s.is_positive() || &s * &s <= rational::int(4) * b * c)
        }
        _ => {
            if a.is_zero() {
                return Some(true);
            }
            let mut lb = (Rational::zero(), Rational::zero());
            let mut ub = (root_upper(b, kappa), root_upper(c, kappa));
            for _ in 0..200 {
                if a <= &rational::pow(&(&lb.0 + &lb.1), kappa) {
                    return Some(true);
                }
                if a > &rational::pow(&(&ub.0 + &ub.1), kappa) {
                    return Some(false);
                }
                refine(b, kappa, &mut lb.0, &mut ub.0);
                refine(c, kappa, &mut lb.1, &mut ub.1);
            }
            None
        }
    }
}

fn root_upper(x: &Rational, kappa: u32) -> Rational {
    let mut u = Rational::one();
    while &rational::pow(&u, kappa) < x {
        u *= rational::int(2);
    }
    u
}

/// One bisection step on the bracket `lo <= x^(1/k) <= hi`.
fn refine(x: &Rational, kappa: u32, lo: &mut Rational, hi: &mut Rational) {
    let mid = (&*lo + &*hi) / rational::int(2);
    if &rational::pow(&mid, kappa) <= x {
        *lo = mid;
    } else {
        *hi = mid;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleViolation {
    pub triple: (usize, usize, usize),
    /// `d13^k - (d12^(1/k) + d23^(1/k))^k` for `k = 1`; for `k >= 2` the
    /// root-free witness `d13^k - d12^k - d23^k`.
    pub deficit: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MetricReport {
    pub kappa: u32,
    pub pairs_tested: usize,
    pub triples_tested: usize,
    pub symmetry_violations: Vec<(usize, usize)>,
    pub identity_violations: Vec<(usize, usize)>,
    pub triangle_violations: Vec<TriangleViolation>,
    /// Triples for which the `k >= 3` root comparison stayed undecided.
    pub undecided: usize,
    /// Triples where the glued joining exceeded `d12 + d23` (checked for `k = 1`).
    pub gluing_violations: Vec<(usize, usize, usize)>,
    pub distances: Vec<Vec<String>>,
}

impl MetricReport {
    pub fn is_clean(&self) -> bool {
        self.symmetry_violations.is_empty()
            && self.identity_violations.is_empty()
            && self.triangle_violations.is_empty()
            && self.gluing_violations.is_empty()
            && self.undecided == 0
    }
}

/// All pairwise `rho_kappa^kappa`.
pub fn distance_matrix(graphs: &[WeightedGraph], c: &CostMatrix, kappa: u32) -> Result<Vec<Vec<Rational>>> {
    graphs
        .iter()
        .map(|g| graphs.iter().map(|h| ogj_distance(g, h, c, kappa).map(|d| d.powered)).collect())
        .collect()
}

/// Checks the axioms on supplied powered distances. Used directly in self-test mode
/// with deliberately corrupted values.
pub fn check_axioms(graphs: &[WeightedGraph], d: &[Vec<Rational>], kappa: u32) -> MetricReport {
    let k = graphs.len();
    let mut report = MetricReport { kappa, ..MetricReport::default() };
    for i in 0..k {
        for j in 0..k {
            report.pairs_tested += 1;
            if d[i][j] != d[j][i] {
                report.symmetry_violations.push((i, j));
            }
            if d[i][j].is_zero() != (graphs[i].pair_map() == graphs[j].pair_map()) {
                report.identity_violations.push((i, j));
            }
            for m in 0..k {
                report.triples_tested += 1;
                match root_triangle_holds(&d[i][m], &d[i][j], &d[j][m], kappa) {
                    Some(true) => {}
                    Some(false) => {
                        let deficit = &d[i][m] - &d[i][j] - &d[j][m];
                        report.triangle_violations.push(TriangleViolation { triple: (i, j, m), deficit: rational::render(&deficit) });
                    }
                    None => report.undecided += 1,
                }
            }
        }
    }
    report.distances = d.iter().map(|row| row.iter().map(rational::render).collect()).collect();
    report
}

/// Cost of the joining obtained by gluing optimal joinings of `(g1, g2)` and `(g2, g3)`,
/// together with `d12 + d23`. Requires `kappa = 1`.
pub fn gluing_witness(g1: &WeightedGraph, g2: &WeightedGraph, g3: &WeightedGraph, c: &CostMatrix) -> Result<(Rational, Rational)> {
    let cs12 = build_constraints(g1, g2, c)?;
    let cs23 = build_constraints(g2, g3, c)?;
    let s12 = solve_full(&cs12)?;
    let s23 = solve_full(&cs23)?;
    let gamma12 = cs12.to_joining(&s12.vertex.values);
    let gamma23 = cs23.to_joining(&s23.vertex.values);
    let (_, gamma13) = glue_three_way(g1, g2, g3, &gamma12, &gamma23)?;
    let report = is_valid_joining(g1, g3, &gamma13);
    if !report.is_valid() {
        return Err(OgjError::InvalidJoining(format!("glued joining is invalid: {:?}", report.violations.first())));
    }
    Ok((gamma13.cost(c), s12.rho + s23.rho))
}

pub fn metric_suite(graphs: &[WeightedGraph], c: &CostMatrix, kappa: u32) -> Result<MetricReport> {
    let d = distance_matrix(graphs, c, kappa)?;
    let mut report = check_axioms(graphs, &d, kappa);
    if kappa == 1 {
        let k = graphs.len();
        for i in 0..k {
            for j in 0..k {
                for m in 0..k {
                    let (glued, bound) = gluing_witness(&graphs[i], &graphs[j], &graphs[m], c)?;
                    if glued > bound || d[i][m] > glued {
                        report.gluing_violations.push((i, j, m));
                    }
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Stability

/// `(alpha + eps * delta) / (1 + eps * sum(delta))`.
pub fn perturb(g: &WeightedGraph, delta: &PairMap, eps: &Rational) -> Result<WeightedGraph> {
    let mut raw = g.pair_map();
    for (&(u, v), d) in delta {
        if u >= g.n() || v >= g.n() {
            return Err(OgjError::OutOfRange(format!("perturbation touches ({u}, {v}) outside the graph")));
        }
        *raw.entry((u, v)).or_insert_with(Rational::zero) += eps * d;
    }
    let total: Rational = raw.values().sum();
    let report = crate::graph::validate_weight_function(g.ids(), &raw.iter().map(|(k, w)| (*k, w / &total)).collect());
    if !report.is_valid() {
        return Err(OgjError::InvalidWeights(format!("perturbed weights: {:?}", report.violations.first())));
    }
    raw.retain(|_, w| !w.is_zero());
    crate::graph::normalize(g.ids().to_vec(), g.labels().to_vec(), &raw)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    #[serde(with = "rational::serde_str")]
    pub rho: Rational,
    #[serde(with = "rational::serde_str")]
    pub deviation: Rational,
    pub deviation_decimal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityProbe {
    #[serde(with = "rational::serde_str")]
    pub rho: Rational,
    pub rows: Vec<StabilityRow>,
    /// The perturbation adds an edge outside the support of `alpha`.
    pub support_changing: bool,
}

impl StabilityProbe {
    /// Deviations never increase along the (decreasing) epsilon sequence.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].deviation <= w[0].deviation)
    }

    pub fn final_deviation(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.deviation_decimal)
    }
}

/// `|rho(alpha_eps, beta) - rho(alpha, beta)|` for each epsilon, with the cost of
/// `scheme` on the unperturbed pair held fixed.
pub fn stability_probe(g: &WeightedGraph, h: &WeightedGraph, scheme: &Scheme, delta: &PairMap, epsilons: &[Rational]) -> Result<StabilityProbe> {
    let cost = scheme.cost(g, h)?;
    let rho = solve(&build_constraints(g, h, &cost)?)?.rho;
    let support_changing = delta.iter().any(|(&(u, v), d)| !d.is_zero() && !g.has_edge(u, v));
    let rows = epsilons
        .iter()
        .map(|eps| {
            let ge = perturb(g, delta, eps)?;
            let rho_eps = solve(&build_constraints(&ge, h, &cost)?)?.rho;
            let deviation = (&rho_eps - &rho).abs();
            let deviation_decimal = rational::to_f64(&deviation);
            Ok(StabilityRow { eps: eps.clone(), rho: rho_eps, deviation, deviation_decimal })
        })
        .collect::<Result<_>>()?;
    Ok(StabilityProbe { rho, rows, support_changing })
}

/// `eps0, eps0/2, ..., eps0/2^halvings`.
pub fn halving_sequence(eps0: &Rational, halvings: usize) -> Vec<Rational> {
    std::iter::successors(Some(eps0.clone()), |e| Some(e / rational::int(2))).take(halvings + 1).collect()
}
