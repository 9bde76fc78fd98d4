//! Input documents and their JSON encodings.

use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tropibary::approximation::Cover;
use tropibary::space::FiniteSpace;
use tropibary::{ConvexParams, FiniteMeasure, IdemMeasure, PointMeasure, TropScalar, TropVector};

pub const FORMAT_VERSION: u64 = 1;

/// Raw text of an argument that is either inline JSON, `-` for stdin, or a path.
pub fn read_arg(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with(['{', '[', '"']) || trimmed.parse::<f64>().is_ok() {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        return Ok(text);
    }
    std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

/// Parses `text` as `T`, reporting the JSON path of the first violation.
/// A top-level `"version"` field, when present, must be the supported one.
pub fn parse<T: DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| anyhow!("{what}: invalid JSON: {e}"))?;
    if let Value::Object(map) = &mut value {
        if let Some(v) = map.remove("version") {
            if v.as_u64() != Some(FORMAT_VERSION) {
                bail!("{what}: at version: unsupported version {v}, expected {FORMAT_VERSION}");
            }
        }
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            anyhow!("{what}: {}", e.inner())
        } else {
            anyhow!("{what}: at {path}: {}", e.inner())
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    n: Option<usize>,
    labels: Option<Vec<String>>,
    points: Option<Vec<TropVector>>,
}

impl SpaceDoc {
    pub fn build(self) -> Result<FiniteSpace> {
        let space = match (self.n, self.labels) {
            (Some(n), Some(labels)) if labels.len() != n => {
                bail!("space: n = {n} but {} labels given", labels.len())
            }
            (_, Some(labels)) => FiniteSpace::with_labels(labels)?,
            (Some(n), None) => FiniteSpace::new(n)?,
            (None, None) => match &self.points {
                Some(points) => FiniteSpace::new(points.len())?,
                None => bail!("space: needs n, labels or points"),
            },
        };
        Ok(match self.points {
            Some(points) => space.with_points(points).context("space.points")?,
            None => space,
        })
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum At {
    Index(usize),
    Label(String),
    Point(TropVector),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    at: At,
    w: TropScalar,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    space: Option<SpaceDoc>,
    atoms: Vec<AtomDoc>,
}

/// A measure on a labelled finite space, or directly on points of ℝ^d.
#[derive(Clone, Debug)]
pub enum Measure {
    Finite { space: FiniteSpace, mu: FiniteMeasure },
    Points(PointMeasure),
}

fn weights<A: Ord + Clone>(pairs: Vec<(A, TropScalar)>, renormalize: bool) -> Result<IdemMeasure<A>> {
    let mu = if renormalize { IdemMeasure::from_weights_renormalized(pairs) } else { IdemMeasure::from_weights(pairs) };
    mu.map_err(|e| anyhow!("atoms: {e}"))
}

impl MeasureDoc {
    /// Resolves atom references against the document's space, or against
    /// `fallback` when the document has none.
    pub fn resolve(self, fallback: Option<&FiniteSpace>, renormalize: bool) -> Result<Measure> {
        let space = match self.space {
            Some(doc) => Some(doc.build()?),
            None => fallback.cloned(),
        };
        let Some(space) = space else {
            let mut pairs = Vec::with_capacity(self.atoms.len());
            for (k, atom) in self.atoms.into_iter().enumerate() {
                match atom.at {
                    At::Point(x) => pairs.push((x, atom.w)),
                    _ => bail!("atoms[{k}].at: a label or index needs a space"),
                }
            }
            return Ok(Measure::Points(weights(pairs, renormalize)?));
        };
        let mut pairs = Vec::with_capacity(self.atoms.len());
        for (k, atom) in self.atoms.into_iter().enumerate() {
            let index = match &atom.at {
                At::Index(i) if *i < space.len() => Some(*i),
                At::Index(_) => None,
                At::Label(label) => space.index_of(label),
                At::Point(x) => space.points().and_then(|pts| pts.iter().position(|p| p == x)),
            };
            let index = index.ok_or_else(|| anyhow!("atoms[{k}].at: not a point of the space"))?;
            pairs.push((index, atom.w));
        }
        let mu = weights(pairs, renormalize)?;
        Ok(Measure::Finite { space, mu })
    }
}

impl Measure {
    pub fn load(what: &str, arg: &str, fallback: Option<&FiniteSpace>, renormalize: bool) -> Result<(Self, String)> {
        let text = read_arg(arg)?;
        let doc: MeasureDoc = parse(what, &text)?;
        let m = doc.resolve(fallback, renormalize).with_context(|| what.to_string())?;
        Ok((m, text))
    }

    pub fn finite(self, what: &str) -> Result<(FiniteSpace, FiniteMeasure)> {
        match self {
            Measure::Finite { space, mu } => Ok((space, mu)),
            Measure::Points(_) => bail!("{what}: expected a measure on a finite space"),
        }
    }

    /// Point measure, embedding a finite one through its space's points.
    pub fn points(self, what: &str) -> Result<PointMeasure> {
        match self {
            Measure::Points(mu) => Ok(mu),
            Measure::Finite { space, mu } => space.embed(&mu).with_context(|| format!("{what}: space has no points")),
        }
    }
}

pub fn space_json(space: &FiniteSpace) -> Value {
    let mut v = json!({ "n": space.len(), "labels": space.labels() });
    if let Some(points) = space.points() {
        v["points"] = json!(points);
    }
    v
}

pub fn finite_json(space: &FiniteSpace, mu: &FiniteMeasure) -> Value {
    let atoms: Vec<Value> = mu
        .atoms()
        .map(|(i, w)| json!({ "at": space.labels()[*i], "w": TropScalar::Finite(w.clone()) }))
        .collect();
    json!({ "space": space_json(space), "atoms": atoms })
}

pub fn point_json(mu: &PointMeasure) -> Value {
    json!({ "atoms": mu })
}

/// Function tables: an array of finite scalars indexed like the space.
pub fn table(what: &str, text: &str) -> Result<Vec<tropibary::Rational>> {
    let values: Vec<TropScalar> = parse(what, text)?;
    values
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.as_rational().cloned().ok_or_else(|| anyhow!("{what}: at [{k}]: function values must be finite")))
        .collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum MapDoc {
    Targets(Vec<usize>),
    Full { targets: Vec<usize>, codomain: usize },
}

impl MapDoc {
    pub fn into_parts(self) -> (Vec<usize>, Option<usize>) {
        match self {
            MapDoc::Targets(t) => (t, None),
            MapDoc::Full { targets, codomain } => (targets, Some(codomain)),
        }
    }
}

/// Either a bare list of covers or `{"covers": [...]}`.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum ChainDoc {
    List(Vec<Cover>),
    Wrapped { covers: Vec<Cover> },
}

impl ChainDoc {
    pub fn into_covers(self) -> Vec<Cover> {
        match self {
            ChainDoc::List(c) | ChainDoc::Wrapped { covers: c } => c,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostDoc {
    pub lo: TropVector,
    pub hi: TropVector,
}

/// Instances accepted by `lift`.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceDoc {
    Finite {
        space: Option<SpaceDoc>,
        lambda: MeasureDoc,
        beta: MeasureDoc,
        params: ConvexParams,
    },
    Interval {
        x: TropScalar,
        y: TropScalar,
        params: ConvexParams,
        bounds: (TropScalar, TropScalar),
    },
    Box {
        x: TropVector,
        y: TropVector,
        params: ConvexParams,
        lo: TropVector,
        hi: TropVector,
    },
    Beta {
        host: HostDoc,
        measure: MeasureDoc,
    },
    Fiber {
        map: MapDoc,
        nu: MeasureDoc,
        mu: MeasureDoc,
        a: MeasureDoc,
        params: ConvexParams,
    },
}

impl InstanceDoc {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceDoc::Finite { .. } => "finite",
            InstanceDoc::Interval { .. } => "interval",
            InstanceDoc::Box { .. } => "box",
            InstanceDoc::Beta { .. } => "beta",
            InstanceDoc::Fiber { .. } => "fiber",
        }
    }
}
