use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde_json::Value;

use ogj::joining::JoiningDocument;
use ogj::labeling::CostMatrix;
use ogj::{rational, GraphDocument, WeightedGraph};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(ogj::OgjError::from)
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    let doc: GraphDocument = read_json(path)?;
    doc.to_graph().with_context(|| format!("loading graph {}", path.display()))
}

pub fn read_graphs(path: &Path) -> Result<Vec<WeightedGraph>> {
    let docs: Vec<GraphDocument> = read_json(path)?;
    docs.iter()
        .enumerate()
        .map(|(i, d)| d.to_graph().with_context(|| format!("graph {i} of {}", path.display())))
        .collect()
}

pub fn read_joining(path: &Path) -> Result<ogj::WeightJoining> {
    let doc: JoiningDocument = read_json(path)?;
    Ok(doc.to_joining()?)
}

/// A cost matrix file is an array of rows of "num/den" strings.
pub fn read_cost(path: &Path) -> Result<CostMatrix> {
    let rows: Vec<Vec<String>> = read_json(path)?;
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| rational::parse(s)).collect::<ogj::Result<Vec<_>>>())
        .collect::<ogj::Result<Vec<_>>>()?;
    Ok(CostMatrix::new(rows)?)
}

/// Pretty JSON with a trailing newline, to `out` or stdout.
pub fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Fixture cache rooted at `OGJ_CACHE_DIR`, if set.
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn from_env() -> Self {
        Cache { dir: std::env::var_os("OGJ_CACHE_DIR").filter(|d| !d.is_empty()).map(PathBuf::from) }
    }

    pub fn get_or_insert(&self, key: &str, make: impl FnOnce() -> Result<Value>) -> Result<Value> {
        let Some(dir) = &self.dir else { return make() };
        let path = dir.join(format!("{}.json", sanitize(key)));
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(v) = serde_json::from_str(&text) {
                return Ok(v);
            }
        }
        let v = make()?;
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(&path, serde_json::to_string(&v)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(v)
    }
}

fn sanitize(key: &str) -> String {
    key.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}
