use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Value};

use ogj::families::{self, GluingPart, GluingSpec, Pools};
use ogj::graph::{lazy_transform, validate_weight_function, PairMap, WeightViolation};
use ogj::iso::{self, check_scheme_preconditions, cost_vanishes, map_json, DetectOptions};
use ogj::joining::{build_constraints, decompose_disjoint, JoiningDocument};
use ogj::labeling::LabelValue;
use ogj::sweep::{run_suite, Suite, SweepConfig};
use ogj::{lp, metric, rational, GraphDocument, OgjError, Scheme, SimpleGraph, WeightedGraph};

use crate::io::{emit, read_cost, read_graph, read_graphs, read_joining, read_json, Cache};
use crate::{Cli, Command, Status};

pub fn run(cli: &Cli) -> Result<Status> {
    let out = cli.out.as_deref();
    let (value, status) = match &cli.command {
        Command::Validate { graph } => validate(graph)?,
        Command::Cost { g, h, scheme } => {
            let (g, h, scheme) = (read_graph(g)?, read_graph(h)?, parse_scheme(scheme)?);
            let rho = iso::ogj_cost(&g, &h, &scheme)?;
            (json!({ "rho": rational::render(&rho), "scheme": scheme.to_string() }), Status::Ok)
        }
        Command::Solve { g, h, scheme, cost } => solve(g, h, scheme, cost.as_deref())?,
        Command::Detect { g, h, scheme, cap, brute_force } => detect(g, h, scheme, *cap, *brute_force)?,
        Command::Identify { g, h, scheme, cap } => identify(g, h, scheme, *cap)?,
        Command::Wl { g, h, delta } => wl(g, h, delta)?,
        Command::Metric { graphs, cost, kappa } => {
            let report = metric::metric_suite(&read_graphs(graphs)?, &read_cost(cost)?, *kappa)?;
            let status = if report.is_clean() { Status::Ok } else { Status::SuiteFailed };
            (serde_json::to_value(&report)?, status)
        }
        Command::Generate { family, n, sizes, cycles, extra, p, weights, labels, seed } => {
            let key = format!(
                "generate-{family}-n{n}-s{}-c{}-e{extra}-p{p}-w{weights}-l{labels}-seed{seed}",
                join(sizes),
                join(cycles)
            );
            let value = Cache::from_env().get_or_insert(&key, || {
                let pools = Pools::integers(*weights, *labels);
                let g = generate(family, *n, sizes, cycles, *extra, p, &pools, *seed)?;
                Ok(serde_json::to_value(GraphDocument::from_graph(&g))?)
            })?;
            (value, Status::Ok)
        }
        Command::Glue { spec, scheme } => glue(spec, scheme.as_deref())?,
        Command::Decompose { g, h, joining } => decompose(g, h, joining)?,
        Command::Sweep { suite, trials, max_n, seed, cap, jobs } => {
            let suite: Suite = suite.parse()?;
            let mut cfg = SweepConfig::for_suite(suite, *seed);
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.max_n = max_n.unwrap_or(cfg.max_n);
            cfg.cap = positive(*cap, "cap")?;
            cfg.jobs = jobs.map(|j| positive(j, "jobs")).transpose()?;
            let report = run_suite(suite, &cfg)?;
            eprintln!("{suite}: {}/{} checks passed over {} trials", report.passed, report.checks, report.trials);
            let status = if !report.all_passed() {
                Status::SuiteFailed
            } else if report.capped > 0 {
                Status::CapExceeded
            } else {
                Status::Ok
            };
            (serde_json::to_value(&report)?, status)
        }
    };
    emit(&value, out)?;
    Ok(status)
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join("_")
}

fn positive(x: usize, what: &str) -> Result<usize> {
    if x == 0 {
        return Err(OgjError::OutOfRange(format!("{what} must be positive")).into());
    }
    Ok(x)
}

fn parse_scheme(s: &str) -> Result<Scheme> {
    Ok(s.parse()?)
}

fn validate(path: &Path) -> Result<(Value, Status)> {
    let doc: GraphDocument = read_json(path)?;
    let (ids, _, map) = doc.raw_pairs()?;
    let mut report = validate_weight_function(&ids, &map);
    if !doc.normalized {
        // Unnormalized documents are scaled on load; only a zero total is fatal.
        report.violations.retain(|v| match v {
            WeightViolation::Normalization { total } => total.is_zero(),
            _ => true,
        });
    }
    let valid = report.is_valid();
    let value = json!({
        "valid": valid,
        "normalized": doc.normalized,
        "vertices": ids.len(),
        "violations": report.violations,
    });
    Ok((value, if valid { Status::Ok } else { Status::Invalid }))
}

fn solve(g: &Path, h: &Path, scheme: &str, cost: Option<&Path>) -> Result<(Value, Status)> {
    let (g, h) = (read_graph(g)?, read_graph(h)?);
    let (c, scheme_name) = match cost {
        Some(p) => (read_cost(p)?, "custom".to_string()),
        None => {
            let s = parse_scheme(scheme)?;
            (s.cost(&g, &h)?, s.to_string())
        }
    };
    let cs = build_constraints(&g, &h, &c)?;
    let sol = lp::solve(&cs)?;
    let certificate = if sol.zero_cost_shortcut { "zero-cost-feasible" } else { "optimal" };
    let report = lp::report(&cs, &sol, 1, certificate);
    let joining = JoiningDocument::from_joining(&cs.to_joining(&sol.vertex.values));
    Ok((json!({ "scheme": scheme_name, "report": report, "joining": joining }), Status::Ok))
}

fn detect(g: &Path, h: &Path, scheme: &str, cap: usize, brute_force: bool) -> Result<(Value, Status)> {
    let (g, h, scheme) = (read_graph(g)?, read_graph(h)?, parse_scheme(scheme)?);
    let opts = DetectOptions { cap: positive(cap, "cap")?, brute_force_fallback: brute_force };
    let d = iso::detect_with(&g, &h, &scheme, opts)?;
    let (psi_g, _) = scheme.label_pair(&g, &h)?;
    let flags = json!({
        "preconditions": check_scheme_preconditions(&g, &psi_g.labels),
        "vertices_examined": d.vertices_examined,
        "complete": d.complete,
        "brute_force": d.brute_force,
    });
    let status = if d.complete { Status::Ok } else { Status::CapExceeded };
    Ok((d.to_json(&g, &h, flags), status))
}

fn identify(g: &Path, h: &Path, scheme: &str, cap: usize) -> Result<(Value, Status)> {
    let (g, h, scheme) = (read_graph(g)?, read_graph(h)?, parse_scheme(scheme)?);
    let id = iso::identify_with_cap(&g, &h, &scheme, positive(cap, "cap")?)?;
    let value = json!({
        "rho": rational::render(&id.rho),
        "isomorphisms": id.isomorphisms.iter().map(|f| map_json(&g, &h, f)).collect::<Vec<_>>(),
        "scheme": scheme.to_string(),
        "flags": {
            "vertices_examined": id.vertices_examined,
            "all_vertices_bijective": id.all_vertices_bijective,
            "faces_visited": id.faces_visited,
            "complete": id.complete,
        },
    });
    Ok((value, if id.complete { Status::Ok } else { Status::CapExceeded }))
}

fn wl(g: &Path, h: &Path, delta: &str) -> Result<(Value, Status)> {
    let delta = rational::parse(delta)?;
    let (g, h) = (SimpleGraph::from_weighted(&read_graph(g)?), SimpleGraph::from_weighted(&read_graph(h)?));
    let outcome = iso::wl_test(&g, &h);
    let zero = cost_vanishes(&lazy_transform(&g, &delta)?, &lazy_transform(&h, &delta)?, &Scheme::Primary)?;
    let value = json!({
        "wl": outcome,
        "delta": rational::render(&delta),
        "lazy_cost_zero": zero,
    });
    Ok((value, Status::Ok))
}

#[allow(clippy::too_many_arguments)]
fn generate(
    family: &str,
    n: usize,
    sizes: &[usize],
    cycles: &[usize],
    extra: usize,
    p: &str,
    pools: &Pools,
    seed: u64,
) -> Result<WeightedGraph> {
    let mut rng = families::rng_from_seed(seed);
    Ok(match family {
        "tree" => families::gen_tree(n, pools, seed)?,
        "forest" => families::gen_forest(nonempty(sizes, "--sizes")?, pools, seed)?.0,
        "flower" => families::gen_flower(nonempty(cycles, "--cycles")?, pools, seed)?.0,
        "connected" => families::gen_connected_with(n, extra, pools, &mut rng)?,
        "simple" => {
            let p = rational::parse(p)?;
            let (num, den) = (u32::try_from(p.numer()), u32::try_from(p.denom()));
            let (Ok(num), Ok(den)) = (num, den) else { bail!(OgjError::OutOfRange("edge probability".into())) };
            if num > den {
                bail!(OgjError::OutOfRange("edge probability above 1".into()));
            }
            families::gen_simple_with(n, num, den, &mut rng).to_weighted()?
        }
        other => bail!(OgjError::Parse(format!("unknown family {other:?}"))),
    })
}

fn nonempty<'a>(xs: &'a [usize], flag: &str) -> Result<&'a [usize]> {
    if xs.is_empty() {
        bail!(OgjError::OutOfRange(format!("{flag} is required")));
    }
    Ok(xs)
}

#[derive(Deserialize)]
struct PartDoc {
    graph: GraphDocument,
    /// Leaf id to M id.
    #[serde(default)]
    leaf_map: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct MDoc {
    id: String,
    #[serde(default)]
    label: Option<Value>,
}

#[derive(Deserialize)]
struct TauDoc {
    u: String,
    v: String,
    w: String,
}

#[derive(Deserialize)]
struct GluingDoc {
    parts: Vec<PartDoc>,
    #[serde(default)]
    m: Vec<MDoc>,
    mu: Vec<String>,
    #[serde(default)]
    tau: Vec<TauDoc>,
}

fn gluing_spec(doc: &GluingDoc) -> Result<GluingSpec> {
    let m_ids: Vec<String> = doc.m.iter().map(|m| m.id.clone()).collect();
    let m_index = |id: &str| {
        m_ids.iter().position(|x| x == id).ok_or_else(|| OgjError::InvalidGluing(format!("unknown M vertex {id:?}")))
    };
    let mut parts = Vec::new();
    for (i, p) in doc.parts.iter().enumerate() {
        let graph = p.graph.to_graph().with_context(|| format!("part {i}"))?;
        let mut leaf_map = BTreeMap::new();
        for (leaf, target) in &p.leaf_map {
            let u = graph
                .index_of(leaf)
                .ok_or_else(|| OgjError::InvalidGluing(format!("part {i} has no vertex {leaf:?}")))?;
            leaf_map.insert(u, m_index(target)?);
        }
        parts.push(GluingPart { graph, leaf_map });
    }
    let m_labels = if doc.m.iter().any(|m| m.label.is_some()) {
        Some(doc.m.iter().map(|m| m.label.as_ref().map(LabelValue::from_json).unwrap_or_else(LabelValue::unit)).collect())
    } else {
        None
    };
    let mut tau = PairMap::new();
    for t in &doc.tau {
        let (u, v, w) = (m_index(&t.u)?, m_index(&t.v)?, rational::parse(&t.w)?);
        tau.insert((u, v), w.clone());
        tau.insert((v, u), w);
    }
    let mu = doc.mu.iter().map(|s| rational::parse(s)).collect::<ogj::Result<Vec<_>>>()?;
    Ok(GluingSpec { parts, m_ids, m_labels, mu, tau })
}

fn glue(path: &Path, scheme: Option<&str>) -> Result<(Value, Status)> {
    let doc: GluingDoc = read_json(path)?;
    let spec = gluing_spec(&doc)?;
    let Some(scheme) = scheme else {
        let glued = families::glue(&spec)?;
        let m: Vec<&str> = glued.m_vertices.iter().map(|&x| glued.graph.id(x)).collect();
        return Ok((json!({ "graph": GraphDocument::from_graph(&glued.graph), "m_vertices": m }), Status::Ok));
    };
    let base = parse_scheme(scheme)?;
    let glued = families::glue_with_magic_labels(&spec, &base)?;
    let report = families::check_magic_decomposition(&spec, &glued, &base)?;
    let m: Vec<&str> = glued.m_vertices.iter().map(|&x| glued.graph.id(x)).collect();
    let value = json!({
        "graph": GraphDocument::from_graph(&glued.graph),
        "m_vertices": m,
        "magic_report": report,
        "holds": report.holds(),
    });
    Ok((value, if report.holds() { Status::Ok } else { Status::Invalid }))
}

fn decompose(g: &Path, h: &Path, joining: &Path) -> Result<(Value, Status)> {
    let (g, h) = (read_graph(g)?, read_graph(h)?);
    let gamma = read_joining(joining)?;
    let d = decompose_disjoint(&g, &h, &gamma)?;
    let ids = |graph: &WeightedGraph, comps: &[ogj::graph::Component]| -> Vec<Value> {
        comps
            .iter()
            .map(|c| {
                json!({
                    "vertices": c.vertices.iter().map(|&u| graph.id(u)).collect::<Vec<_>>(),
                    "mass": rational::render(&c.mass),
                })
            })
            .collect()
    };
    let render = |row: &Vec<ogj::Rational>| row.iter().map(rational::render).collect::<Vec<_>>();
    let value = json!({
        "left": ids(&g, &d.left),
        "right": ids(&h, &d.right),
        "pi": d.pi.iter().map(render).collect::<Vec<_>>(),
        "blocks": d.blocks.iter().map(|row| row.iter().map(JoiningDocument::from_joining).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok((value, Status::Ok))
}
