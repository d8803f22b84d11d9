//! Metric graphs, edge paths and marked metric graphs (points of Outer
//! Space).

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::free_group::{basis_inverse, push_reduced, Automorphism, CyclicWord, Letter, Word};
use crate::scalar::Scalar;

/// An edge traversed in one of its two directions. As a direction at a
/// vertex it denotes the germ at the start of the traversal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OrientedEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl OrientedEdge {
    pub fn forward(edge: usize) -> OrientedEdge {
        OrientedEdge { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> OrientedEdge {
        OrientedEdge { edge, reversed: true }
    }

    #[inline]
    pub fn inverse(self) -> OrientedEdge {
        OrientedEdge { edge: self.edge, reversed: !self.reversed }
    }

    /// Dense index in `0..2E`.
    #[inline]
    pub fn index(self) -> usize {
        2 * self.edge + usize::from(self.reversed)
    }

    #[inline]
    pub fn from_index(i: usize) -> OrientedEdge {
        OrientedEdge { edge: i / 2, reversed: i % 2 == 1 }
    }
}

pub type EdgePath = Vec<OrientedEdge>;

pub fn reverse_path(path: &[OrientedEdge]) -> EdgePath {
    path.iter().rev().map(|d| d.inverse()).collect()
}

#[inline]
fn push_tight(buf: &mut EdgePath, d: OrientedEdge) {
    if buf.last() == Some(&d.inverse()) {
        buf.pop();
    } else {
        buf.push(d);
    }
}

/// Removes backtracking `e ē` from a path (assumed connected).
pub fn tighten(path: &[OrientedEdge]) -> EdgePath {
    let mut buf = Vec::with_capacity(path.len());
    for &d in path {
        push_tight(&mut buf, d);
    }
    buf
}

/// Tightens a closed path up to free homotopy: removes backtracking and
/// the cancelling ends.
pub fn tighten_cyclic(path: &[OrientedEdge]) -> EdgePath {
    let t = tighten(path);
    let (mut i, mut j) = (0, t.len());
    while j - i >= 2 && t[i] == t[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    t[i..j].to_vec()
}

/// Least rotation of a closed path or of its reverse.
pub fn canonical_cycle(path: &[OrientedEdge]) -> EdgePath {
    fn least(p: &[OrientedEdge]) -> EdgePath {
        (0..p.len())
            .map(|r| p[r..].iter().chain(&p[..r]).copied().collect::<EdgePath>())
            .min()
            .unwrap_or_default()
    }
    least(path).min(least(&reverse_path(path)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub length: S,
}

/// A finite graph with a length on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph<S> {
    vertices: Vec<String>,
    edges: Vec<Edge<S>>,
}

impl<S: Scalar> MetricGraph<S> {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge<S>>) -> Result<MetricGraph<S>> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        for e in &edges {
            if e.from >= vertices.len() || e.to >= vertices.len() {
                return Err(Error::InvalidGraph(format!("edge {} has an unknown endpoint", e.name)));
            }
            if !e.length.is_finite() {
                return Err(Error::InvalidGraph(format!("edge {} has non-finite length", e.name)));
            }
        }
        Ok(MetricGraph { vertices, edges })
    }

    /// Convenience constructor from `(from, to, length)` triples; edges are
    /// named `e1, e2, ...` and vertices `v0, v1, ...`.
    pub fn from_triples(n_vertices: usize, triples: &[(usize, usize, f64)]) -> Result<MetricGraph<S>> {
        let vertices = (0..n_vertices).map(|i| format!("v{i}")).collect();
        let edges = triples
            .iter()
            .enumerate()
            .map(|(i, &(from, to, len))| Edge { name: format!("e{}", i + 1), from, to, length: S::lit(len) })
            .collect();
        MetricGraph::new(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge<S> {
        &self.edges[i]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    #[inline]
    pub fn origin(&self, d: OrientedEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.reversed {
            e.to
        } else {
            e.from
        }
    }

    #[inline]
    pub fn terminus(&self, d: OrientedEdge) -> usize {
        self.origin(d.inverse())
    }

    #[inline]
    pub fn length(&self, edge: usize) -> S {
        self.edges[edge].length
    }

    pub fn lengths(&self) -> Vec<S> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn path_length(&self, path: &[OrientedEdge]) -> S {
        path.iter().map(|d| self.edges[d.edge].length).sum()
    }

    pub fn volume(&self) -> S {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|e| usize::from(e.from == v) + usize::from(e.to == v)).sum()
    }

    /// Directions (outgoing germs) at `v`, sorted.
    pub fn directions_at(&self, v: usize) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == v {
                out.push(OrientedEdge::forward(i));
            }
            if e.to == v {
                out.push(OrientedEdge::backward(i));
            }
        }
        out
    }

    pub fn all_directions(&self) -> impl Iterator<Item = OrientedEdge> {
        (0..2 * self.edges.len()).map(OrientedEdge::from_index)
    }

    /// Connected components of the subgraph spanned by edges with
    /// `keep(edge)`, as a component id per vertex.
    pub fn components_with(&self, keep: impl Fn(usize) -> bool) -> (usize, Vec<usize>) {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for (i, e) in self.edges.iter().enumerate() {
                    if !keep(i) {
                        continue;
                    }
                    for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                        if a == v && comp[b] == usize::MAX {
                            comp[b] = count;
                            queue.push_back(b);
                        }
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    pub fn is_connected(&self) -> bool {
        self.components_with(|_| true).0 == 1
    }

    /// First Betti number `E − V + components`.
    pub fn betti_number(&self) -> usize {
        let c = self.components_with(|_| true).0;
        self.edges.len() + c - self.vertices.len()
    }

    /// Checks that consecutive edges of `path` meet.
    pub fn check_path(&self, path: &[OrientedEdge]) -> Result<()> {
        for d in path {
            if d.edge >= self.edges.len() {
                return Err(Error::BrokenPath(format!("unknown edge index {}", d.edge)));
            }
        }
        for (i, w) in path.windows(2).enumerate() {
            if self.terminus(w[0]) != self.origin(w[1]) {
                return Err(Error::BrokenPath(format!(
                    "{} does not end where {} starts (position {})",
                    self.direction_name(w[0]),
                    self.direction_name(w[1]),
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// The immersed path homotopic to `path` rel endpoints.
    pub fn tighten_path(&self, path: &[OrientedEdge]) -> Result<EdgePath> {
        self.check_path(path)?;
        Ok(tighten(path))
    }

    pub fn is_closed(&self, path: &[OrientedEdge]) -> bool {
        match (path.first(), path.last()) {
            (Some(&a), Some(&b)) => self.origin(a) == self.terminus(b),
            _ => true,
        }
    }

    /// Breadth-first spanning tree from `root`, scanning directions in
    /// index order. Returns the tree-edge flags and, per vertex, the tree
    /// path from `root`.
    pub fn spanning_tree(&self, root: usize) -> (Vec<bool>, Vec<EdgePath>) {
        let n = self.vertices.len();
        let mut in_tree = vec![false; self.edges.len()];
        let mut paths: Vec<Option<EdgePath>> = vec![None; n];
        paths[root] = Some(Vec::new());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for d in self.directions_at(v) {
                let t = self.terminus(d);
                if paths[t].is_none() {
                    in_tree[d.edge] = true;
                    let mut p = paths[v].clone().expect("visited");
                    p.push(d);
                    paths[t] = Some(p);
                    queue.push_back(t);
                }
            }
        }
        (in_tree, paths.into_iter().map(Option::unwrap_or_default).collect())
    }

    pub fn with_lengths(&self, lengths: &[S]) -> Result<MetricGraph<S>> {
        if lengths.len() != self.edges.len() {
            return Err(Error::InvalidGraph(format!(
                "{} lengths for {} edges",
                lengths.len(),
                self.edges.len()
            )));
        }
        let mut g = self.clone();
        for (e, &l) in g.edges.iter_mut().zip(lengths) {
            e.length = l;
        }
        Ok(g)
    }

    /// Rescales to volume 1.
    pub fn normalized(&self) -> MetricGraph<S> {
        let vol = self.volume();
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length = e.length / vol;
        }
        g
    }

    pub fn cast<T: Scalar>(&self) -> MetricGraph<T> {
        MetricGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { name: e.name.clone(), from: e.from, to: e.to, length: T::lit(e.length.as_f64()) })
                .collect(),
        }
    }

    pub fn direction_name(&self, d: OrientedEdge) -> String {
        let name = &self.edges[d.edge].name;
        if d.reversed {
            format!("~{name}")
        } else {
            name.clone()
        }
    }

    pub fn format_path(&self, path: &[OrientedEdge]) -> String {
        path.iter().map(|&d| self.direction_name(d)).collect::<Vec<_>>().join(" ")
    }

    /// Parses `e1`, `~e1` (reversed).
    pub fn parse_direction(&self, s: &str) -> Result<OrientedEdge> {
        let (name, reversed) = match s.strip_prefix('~') {
            Some(rest) => (rest, true),
            None => (s, false),
        };
        let edge = self
            .edge_index(name)
            .ok_or_else(|| Error::Parse(format!("unknown edge \"{name}\"")))?;
        Ok(OrientedEdge { edge, reversed })
    }
}

/// One violated invariant of a point.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationIssue {
    LowValence { vertex: String, valence: usize },
    LengthOutOfRange { edge: String, length: f64 },
    Volume { volume: f64 },
    ZeroLengthCycle,
    Disconnected,
    BettiMismatch { betti: usize, rank: usize },
    MarkingNotBasis(String),
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::LowValence { vertex, valence } => {
                write!(f, "vertex {vertex} has valence {valence} < 3")
            }
            ValidationIssue::LengthOutOfRange { edge, length } => {
                write!(f, "edge {edge} has length {length} outside [0,1]")
            }
            ValidationIssue::Volume { volume } => write!(f, "volume {volume} != 1"),
            ValidationIssue::ZeroLengthCycle => write!(f, "zero-length subgraph is not a forest"),
            ValidationIssue::Disconnected => write!(f, "graph is disconnected"),
            ValidationIssue::BettiMismatch { betti, rank } => {
                write!(f, "first Betti number {betti} differs from rank {rank}")
            }
            ValidationIssue::MarkingNotBasis(why) => write!(f, "marking is not a basis: {why}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.issues.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A marked metric graph: a point of Outer Space.
///
/// The marking sends generator `x_i` to the closed edge path `loops[i]` at
/// the basepoint. Edge labels (the marking inverse) are words of F_n with
/// `label(e) = γ_u e γ̄_v` for the spanning-tree paths `γ`; they are absent
/// when the loops do not form a basis of the fundamental group.
#[derive(Clone, Debug)]
pub struct MarkedGraph<S> {
    graph: MetricGraph<S>,
    basepoint: usize,
    loops: Vec<EdgePath>,
    in_tree: Vec<bool>,
    labels: Option<Arc<Vec<Word>>>,
}

impl<S: Scalar> MarkedGraph<S> {
    /// Builds a point from generator loops. Loops are tightened; labels are
    /// computed when the loops form a basis.
    pub fn new(graph: MetricGraph<S>, basepoint: usize, loops: Vec<EdgePath>) -> Result<MarkedGraph<S>> {
        if basepoint >= graph.vertex_count() {
            return Err(Error::InvalidGraph("basepoint is not a vertex".into()));
        }
        if loops.is_empty() || loops.len() > crate::free_group::MAX_RANK {
            return Err(Error::InvalidGraph(format!("unsupported rank {}", loops.len())));
        }
        let mut tight = Vec::with_capacity(loops.len());
        for (i, l) in loops.iter().enumerate() {
            graph.check_path(l)?;
            if let (Some(&first), Some(&last)) = (l.first(), l.last()) {
                if graph.origin(first) != basepoint || graph.terminus(last) != basepoint {
                    return Err(Error::BrokenPath(format!(
                        "loop for generator {} is not closed at the basepoint",
                        Letter::new(i + 1, false)
                    )));
                }
            }
            tight.push(tighten(l));
        }
        let (in_tree, _) = graph.spanning_tree(basepoint);
        let mut p = MarkedGraph { graph, basepoint, loops: tight, in_tree, labels: None };
        p.labels = p.compute_labels().ok().map(Arc::new);
        Ok(p)
    }

    pub fn graph(&self) -> &MetricGraph<S> {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.loops.len()
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// Generator loops, indexed by generator − 1.
    pub fn loops(&self) -> &[EdgePath] {
        &self.loops
    }

    pub fn in_tree(&self) -> &[bool] {
        &self.in_tree
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    /// Labels of forward edges; tree edges have the empty label.
    pub fn labels(&self) -> Result<&[Word]> {
        self.labels
            .as_deref()
            .map(Vec::as_slice)
            .ok_or_else(|| Error::NotABasis("marking loops do not form a basis".into()))
    }

    /// Non-tree edges in index order; these freely generate π₁ at the basepoint.
    pub fn cotree_edges(&self) -> Vec<usize> {
        (0..self.graph.edge_count()).filter(|&e| !self.in_tree[e]).collect()
    }

    /// Word of a path in the free basis of π₁ given by the non-tree edges.
    pub fn cotree_word(&self, path: &[OrientedEdge]) -> Word {
        let cotree = self.cotree_edges();
        Word::from_letters(path.iter().filter(|d| !self.in_tree[d.edge]).map(|d| {
            let j = cotree.iter().position(|&e| e == d.edge).expect("cotree edge");
            Letter::new(j + 1, d.reversed)
        }))
    }

    fn compute_labels(&self) -> Result<Vec<Word>> {
        let cotree = self.cotree_edges();
        if cotree.len() != self.rank() {
            return Err(Error::NotABasis(format!(
                "graph has Betti number {} but marking has rank {}",
                cotree.len(),
                self.rank()
            )));
        }
        let words: Vec<Word> = self.loops.iter().map(|l| self.cotree_word(l)).collect();
        let inverse = basis_inverse(self.rank(), &words)?;
        let mut labels = vec![Word::identity(); self.graph.edge_count()];
        for (j, &e) in cotree.iter().enumerate() {
            labels[e] = inverse[j].clone();
        }
        Ok(labels)
    }

    /// Word in F_n read along a path through the edge labels.
    pub fn path_word(&self, path: &[OrientedEdge]) -> Result<Word> {
        let labels = self.labels()?;
        let mut buf = Vec::new();
        for d in path {
            let lab = labels[d.edge].letters();
            if d.reversed {
                for &l in lab.iter().rev() {
                    push_reduced(&mut buf, l.inverse());
                }
            } else {
                for &l in lab {
                    push_reduced(&mut buf, l);
                }
            }
        }
        Ok(Word::from_letters(buf))
    }

    /// Conjugacy class of a closed path.
    pub fn loop_class(&self, path: &[OrientedEdge]) -> Result<CyclicWord> {
        Ok(CyclicWord::new(&self.path_word(path)?))
    }

    /// Tight based loop realizing a word through the generator loops.
    pub fn realize(&self, letters: &[Letter]) -> EdgePath {
        let mut buf = Vec::new();
        for &l in letters {
            let lp = &self.loops[l.generator() - 1];
            if l.is_inverse() {
                for &d in lp.iter().rev() {
                    push_tight(&mut buf, d.inverse());
                }
            } else {
                for &d in lp {
                    push_tight(&mut buf, d);
                }
            }
        }
        buf
    }

    /// Immersed loop freely homotopic to the image of `letters`.
    pub fn realize_cyclic(&self, letters: &[Letter]) -> EdgePath {
        tighten_cyclic(&self.realize(letters))
    }

    /// Length of the immersed loop representing the class.
    pub fn loop_length(&self, alpha: &CyclicWord) -> S {
        self.loop_length_letters(alpha.letters())
    }

    pub fn loop_length_letters(&self, letters: &[Letter]) -> S {
        self.graph.path_length(&self.realize_cyclic(letters))
    }

    /// Length of the tight based path realizing `w` (not cyclically reduced).
    pub fn based_length(&self, w: &Word) -> S {
        self.graph.path_length(&self.realize(w.letters()))
    }

    /// Checks every invariant of a point.
    pub fn validate(&self) -> ValidationReport {
        let g = &self.graph;
        let mut issues = Vec::new();
        let tol = S::tolerance();
        for v in 0..g.vertex_count() {
            let val = g.valence(v);
            if val < 3 {
                issues.push(ValidationIssue::LowValence { vertex: g.vertices[v].clone(), valence: val });
            }
        }
        for e in g.edges() {
            if e.length < S::zero() || e.length > S::one() + tol {
                issues.push(ValidationIssue::LengthOutOfRange { edge: e.name.clone(), length: e.length.as_f64() });
            }
        }
        let vol = g.volume();
        if (vol - S::one()).abs() > tol {
            issues.push(ValidationIssue::Volume { volume: vol.as_f64() });
        }
        let (zero_comps, _) = g.components_with(|e| g.length(e) <= tol);
        let zero_edges = g.edges().iter().filter(|e| e.length <= tol).count();
        // A subgraph is a forest iff E = V − components.
        if zero_edges + zero_comps != g.vertex_count() {
            issues.push(ValidationIssue::ZeroLengthCycle);
        }
        if !g.is_connected() {
            issues.push(ValidationIssue::Disconnected);
        }
        let betti = g.betti_number();
        if betti != self.rank() {
            issues.push(ValidationIssue::BettiMismatch { betti, rank: self.rank() });
        } else if let Err(e) = self.compute_labels() {
            issues.push(ValidationIssue::MarkingNotBasis(e.to_string()));
        }
        ValidationReport { issues }
    }

    /// Precomposes the marking with `phi`: `ℓ(α, p·φ) = ℓ(φ(α), p)`.
    pub fn act(&self, phi: &Automorphism) -> Result<MarkedGraph<S>> {
        if !phi.is_verified() {
            return Err(Error::Unverified);
        }
        if phi.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: phi.rank() });
        }
        let loops = phi.images().iter().map(|w| self.realize(w.letters())).collect();
        let labels = match &self.labels {
            Some(labels) => {
                let inv = phi.inverse()?;
                Some(Arc::new(labels.iter().map(|w| inv.apply_letters(w.letters())).collect()))
            }
            None => None,
        };
        Ok(MarkedGraph {
            graph: self.graph.clone(),
            basepoint: self.basepoint,
            loops,
            in_tree: self.in_tree.clone(),
            labels,
        })
    }

    /// Same marking with new edge lengths.
    pub fn with_lengths(&self, lengths: &[S]) -> Result<MarkedGraph<S>> {
        let mut p = self.clone();
        p.graph = self.graph.with_lengths(lengths)?;
        Ok(p)
    }

    pub fn normalized(&self) -> MarkedGraph<S> {
        let mut p = self.clone();
        p.graph = self.graph.normalized();
        p
    }

    pub fn cast<T: Scalar>(&self) -> MarkedGraph<T> {
        MarkedGraph {
            graph: self.graph.cast(),
            basepoint: self.basepoint,
            loops: self.loops.clone(),
            in_tree: self.in_tree.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Changes the marking of a rose by an automorphism of its edge
    /// alphabet: edge words of every class get rewritten by `psi`.
    pub fn rose_rewrite(&self, psi: &Automorphism) -> Result<MarkedGraph<S>> {
        if self.graph.vertex_count() != 1 || self.graph.edge_count() != self.rank() {
            return Err(Error::Precondition("rose_rewrite needs a rose".into()));
        }
        let inv = psi.inverse()?;
        let to_word = |p: &EdgePath| self.cotree_word(p);
        let from_word = |w: &Word| -> EdgePath {
            w.letters()
                .iter()
                .map(|l| OrientedEdge { edge: l.generator() - 1, reversed: l.is_inverse() })
                .collect()
        };
        let loops = self
            .loops
            .iter()
            .map(|l| from_word(&psi.apply_letters(to_word(l).letters())))
            .collect();
        let labels = match &self.labels {
            Some(labels) => {
                // new edge e_j reads as inv(e_j) in the old edge alphabet
                let new = (1..=self.rank())
                    .map(|j| {
                        let old_path = from_word(inv.image(j));
                        let mut buf = Vec::new();
                        for d in old_path {
                            let lab = labels[d.edge].letters();
                            if d.reversed {
                                for &l in lab.iter().rev() {
                                    push_reduced(&mut buf, l.inverse());
                                }
                            } else {
                                for &l in lab {
                                    push_reduced(&mut buf, l);
                                }
                            }
                        }
                        Word::from_letters(buf)
                    })
                    .collect();
                Some(Arc::new(new))
            }
            None => None,
        };
        Ok(MarkedGraph {
            graph: self.graph.clone(),
            basepoint: self.basepoint,
            loops,
            in_tree: self.in_tree.clone(),
            labels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::WhiteheadMove;

    fn rose(lengths: &[f64]) -> MarkedGraph<f64> {
        let triples: Vec<_> = lengths.iter().map(|&l| (0, 0, l)).collect();
        let g = MetricGraph::from_triples(1, &triples).unwrap();
        let loops = (0..lengths.len()).map(|i| vec![OrientedEdge::forward(i)]).collect();
        MarkedGraph::new(g, 0, loops).unwrap()
    }

    fn theta() -> MarkedGraph<f64> {
        let t = 1.0 / 3.0;
        let g = MetricGraph::from_triples(2, &[(0, 1, t), (0, 1, t), (0, 1, t)]).unwrap();
        let f = OrientedEdge::forward;
        let b = OrientedEdge::backward;
        MarkedGraph::new(g, 0, vec![vec![f(0), b(1)], vec![f(1), b(2)]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(rose(&[0.5, 0.5]).validate().is_valid());
        let bad = rose(&[0.5, 0.25]).validate();
        assert_eq!(bad.issues, vec![ValidationIssue::Volume { volume: 0.75 }]);
        let t = theta();
        assert!(t.validate().is_valid(), "{}", t.validate());
        assert_eq!(t.graph().betti_number(), 2);
    }

    #[test]
    fn validate_reports_each_issue() {
        // valence-2 vertex on a subdivided loop plus a zero-length cycle
        let g = MetricGraph::<f64>::from_triples(2, &[(0, 1, 0.0), (1, 0, 0.0), (0, 0, 1.0)]).unwrap();
        let f = OrientedEdge::forward;
        let p = MarkedGraph::new(g, 0, vec![vec![f(0), f(1)], vec![f(2)]]).unwrap();
        let r = p.validate();
        assert!(r.issues.contains(&ValidationIssue::LowValence { vertex: "v1".into(), valence: 2 }));
        assert!(r.issues.contains(&ValidationIssue::ZeroLengthCycle));
    }

    #[test]
    fn non_basis_marking_is_reported() {
        let g = MetricGraph::<f64>::from_triples(1, &[(0, 0, 0.5), (0, 0, 0.5)]).unwrap();
        let f = OrientedEdge::forward;
        let p = MarkedGraph::new(g, 0, vec![vec![f(0), f(0)], vec![f(1)]]).unwrap();
        assert!(!p.has_labels());
        assert!(matches!(p.validate().issues[0], ValidationIssue::MarkingNotBasis(_)));
    }

    #[test]
    fn tighten_examples() {
        let f = OrientedEdge::forward;
        let b = OrientedEdge::backward;
        assert!(tighten(&[f(0), b(0)]).is_empty());
        assert_eq!(tighten(&[f(0), b(1), f(1), b(2)]), vec![f(0), b(2)]);
        let immersed = vec![f(0), b(1), f(2)];
        assert_eq!(tighten(&immersed), immersed);
        let t = theta();
        assert!(t.graph().tighten_path(&[f(0), f(1)]).is_err());
    }

    #[test]
    fn loop_length_examples() {
        let r = rose(&[0.5, 0.5]);
        assert!((r.loop_length(&CyclicWord::parse("xy").unwrap()) - 1.0).abs() < 1e-12);
        assert!((r.loop_length(&CyclicWord::parse("xyYx").unwrap()) - 1.0).abs() < 1e-12);
        let t = theta();
        assert!((t.loop_length(&CyclicWord::parse("xy").unwrap()) - 2.0 / 3.0).abs() < 1e-12);
        assert!((t.loop_length(&CyclicWord::parse("xY").unwrap()) - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn labels_invert_the_marking() {
        let t = theta();
        for g in 1..=2 {
            let w = t.path_word(&t.loops()[g - 1]).unwrap();
            assert_eq!(w, Word::generator(g));
        }
    }

    #[test]
    fn act_matches_substitution() {
        let r = rose(&[0.3, 0.7]);
        let x = Letter::new(1, false);
        let y = Letter::new(2, false);
        let phi = WhiteheadMove::new([x, y], x).unwrap().automorphism(2).unwrap();
        let q = r.act(&phi).unwrap();
        for s in ["x", "y", "xy", "xY", "xxYxy"] {
            let a = CyclicWord::parse(s).unwrap();
            let lhs = q.loop_length(&a);
            let rhs = r.loop_length(&phi.apply_cyclic(&a).unwrap());
            assert!((lhs - rhs).abs() < 1e-12, "{s}");
        }
        // labels stay inverse to the new marking
        for g in 1..=2 {
            assert_eq!(q.path_word(&q.loops()[g - 1]).unwrap(), Word::generator(g));
        }
        assert!(r.act(&Automorphism::from_named([("x", "xy"), ("y", "x")]).unwrap()).is_err());
    }

    #[test]
    fn rose_rewrite_applies_to_edge_words() {
        let r = rose(&[0.5, 0.5]);
        let x = Letter::new(1, false);
        let y = Letter::new(2, false);
        let psi = WhiteheadMove::new([x, y], x).unwrap().automorphism(2).unwrap();
        let q = r.rose_rewrite(&psi).unwrap();
        // edge word of y becomes psi(y) = yX
        assert_eq!(q.cotree_word(&q.loops()[1]), Word::parse("yX").unwrap());
        for g in 1..=2 {
            assert_eq!(q.path_word(&q.loops()[g - 1]).unwrap(), Word::generator(g));
        }
    }
}
