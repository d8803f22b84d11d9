//! JSON file formats for graphs, automorphisms and graph self-maps.
//!
//! A graph file looks like
//! `{"rank": 2, "vertices": ["v"], "edges": [{"id": "e1", "from": "v", "to": "v", "length": "1/2"}, ...],
//!   "marking": {"x": ["e1"], "y": ["~e2"]}, "basepoint": "v"}`.
//! Lengths may be numbers or rational strings; a `~` prefix reverses an edge.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use osk_core::free_group::{Letter, ALPHABET};
use osk_core::graph::{Edge, EdgePath, MarkedGraph, MetricGraph};
use osk_core::scalar::fmt_sig;
use osk_core::train_track::GraphSelfMap;
use osk_core::{Automorphism, Point, Word};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Number(f64),
    Text(String),
}

impl Length {
    pub fn value(&self) -> Result<f64, CliError> {
        match self {
            Length::Number(v) => Ok(*v),
            Length::Text(s) => parse_length(s),
        }
    }
}

/// Parses `0.25`, `1/3` or `2 / 7`.
pub fn parse_length(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Parse(format!("invalid length {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: Length,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub rank: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub marking: BTreeMap<String, Vec<String>>,
    pub basepoint: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfMapSpec {
    pub graph: GraphSpec,
    pub edge_images: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub vertex_images: BTreeMap<String, String>,
}

fn generator_name(i: usize) -> String {
    (ALPHABET[i] as char).to_string()
}

fn generator_index(name: &str, rank: usize) -> Result<usize, CliError> {
    let mut chars = name.chars();
    let letter = match (chars.next(), chars.next()) {
        (Some(c), None) => Letter::from_char(c),
        _ => None,
    };
    match letter {
        Some(l) if !l.is_inverse() && l.generator() <= rank => Ok(l.generator() - 1),
        _ => Err(CliError::Parse(format!("{name:?} is not a generator of rank {rank}"))),
    }
}

fn vertex(names: &[String], name: &str) -> Result<usize, CliError> {
    names
        .iter()
        .position(|v| v == name)
        .ok_or_else(|| CliError::Parse(format!("unknown vertex {name:?}")))
}

fn parse_path(g: &MetricGraph<f64>, dirs: &[String]) -> Result<EdgePath, CliError> {
    dirs.iter().map(|d| g.parse_direction(d).map_err(CliError::from)).collect()
}

impl GraphSpec {
    pub fn metric_graph(&self) -> Result<MetricGraph<f64>, CliError> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    name: e.id.clone(),
                    from: vertex(&self.vertices, &e.from)?,
                    to: vertex(&self.vertices, &e.to)?,
                    length: e.length.value()?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(MetricGraph::new(self.vertices.clone(), edges)?)
    }

    pub fn point(&self) -> Result<Point, CliError> {
        let g = self.metric_graph()?;
        let mut loops: Vec<Option<EdgePath>> = vec![None; self.rank];
        for (name, dirs) in &self.marking {
            let i = generator_index(name, self.rank)?;
            loops[i] = Some(parse_path(&g, dirs)?);
        }
        let loops = loops
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| CliError::Parse(format!("marking lacks generator {}", generator_name(i)))))
            .collect::<Result<Vec<_>, _>>()?;
        let base = vertex(&self.vertices, &self.basepoint)?;
        Ok(MarkedGraph::new(g, base, loops)?)
    }

    pub fn from_point(p: &Point) -> GraphSpec {
        let g = p.graph();
        let names = |path: &[osk_core::graph::OrientedEdge]| path.iter().map(|&d| g.direction_name(d)).collect();
        GraphSpec {
            rank: p.rank(),
            vertices: g.vertices().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    id: e.name.clone(),
                    from: g.vertices()[e.from].clone(),
                    to: g.vertices()[e.to].clone(),
                    length: Length::Text(fmt_sig(e.length)),
                })
                .collect(),
            marking: p.loops().iter().enumerate().map(|(i, l)| (generator_name(i), names(l))).collect(),
            basepoint: g.vertices()[p.basepoint()].clone(),
        }
    }
}

impl SelfMapSpec {
    pub fn self_map(&self) -> Result<GraphSelfMap<f64>, CliError> {
        let point = self.graph.point()?;
        let g = point.graph();
        let vertex_images = (0..g.vertex_count())
            .map(|v| {
                let name = &g.vertices()[v];
                match self.vertex_images.get(name) {
                    Some(img) => vertex(g.vertices(), img),
                    // a single vertex maps to itself
                    None if g.vertex_count() == 1 => Ok(0),
                    None => Err(CliError::Parse(format!("no image for vertex {name:?}"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let edge_images = g
            .edges()
            .iter()
            .map(|e| match self.edge_images.get(&e.name) {
                Some(dirs) => parse_path(g, dirs),
                None => Err(CliError::Parse(format!("no image for edge {:?}", e.name))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        for name in self.edge_images.keys() {
            if g.edge_index(name).is_none() {
                return Err(CliError::Parse(format!("image given for unknown edge {name:?}")));
            }
        }
        Ok(GraphSelfMap::new(point.clone(), vertex_images, edge_images)?)
    }

    pub fn from_map(f: &GraphSelfMap<f64>) -> SelfMapSpec {
        let g = f.point().graph();
        SelfMapSpec {
            graph: GraphSpec::from_point(f.point()),
            edge_images: g
                .edges()
                .iter()
                .zip(f.edge_images())
                .map(|(e, img)| (e.name.clone(), img.iter().map(|&d| g.direction_name(d)).collect()))
                .collect(),
            vertex_images: (0..g.vertex_count())
                .map(|v| (g.vertices()[v].clone(), g.vertices()[f.vertex_images()[v]].clone()))
                .collect(),
        }
    }
}

/// Parses `{"x": "xy", "y": "x"}`.
pub fn automorphism_from_value(v: &Value) -> Result<Automorphism, CliError> {
    let obj = v.as_object().ok_or_else(|| CliError::Parse("automorphism must be a JSON object".into()))?;
    let rank = obj.len();
    let mut images = vec![None; rank];
    for (name, img) in obj {
        let i = generator_index(name, rank)?;
        let s = img.as_str().ok_or_else(|| CliError::Parse(format!("image of {name} must be a word string")))?;
        images[i] = Some(Word::parse_with_rank(s, rank)?);
    }
    let images = images.into_iter().map(|w| w.expect("every generator assigned")).collect();
    Ok(Automorphism::new(rank, images)?)
}

/// What a JSON input file turned out to contain.
pub enum Document {
    Graph(GraphSpec),
    SelfMap(SelfMapSpec),
    Automorphism(Value),
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Read(path.display().to_string(), e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_document(path: &Path) -> Result<Document, CliError> {
    let v = read_json(path)?;
    if v.get("edge_images").is_some() {
        Ok(Document::SelfMap(from_value(v, path)?))
    } else if v.get("edges").is_some() {
        Ok(Document::Graph(from_value(v, path)?))
    } else {
        Ok(Document::Automorphism(v))
    }
}

pub fn read_point(path: &Path) -> Result<Point, CliError> {
    from_value::<GraphSpec>(read_json(path)?, path)?.point()
}

pub fn read_self_map(path: &Path) -> Result<GraphSelfMap<f64>, CliError> {
    from_value::<SelfMapSpec>(read_json(path)?, path)?.self_map()
}

pub fn read_automorphism(path: &Path) -> Result<Automorphism, CliError> {
    automorphism_from_value(&read_json(path)?)
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
