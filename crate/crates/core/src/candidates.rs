//! Candidate loops: embedded circles, figure-eights and barbells.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Result;
use crate::free_group::CyclicWord;
use crate::graph::{canonical_cycle, reverse_path, EdgePath, MarkedGraph, MetricGraph, OrientedEdge};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CandidateKind {
    Embedded,
    FigureEight,
    Barbell,
}

impl fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateKind::Embedded => "embedded",
            CandidateKind::FigureEight => "figure-eight",
            CandidateKind::Barbell => "barbell",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateLoop {
    pub kind: CandidateKind,
    pub path: EdgePath,
    pub class: CyclicWord,
}

/// A simple cycle with its vertex and edge sets.
#[derive(Clone, Debug)]
struct Cycle {
    path: EdgePath,
    vertices: Vec<bool>,
    edges: Vec<bool>,
}

impl Cycle {
    fn new<S: Scalar>(g: &MetricGraph<S>, path: EdgePath) -> Cycle {
        let mut vertices = vec![false; g.vertex_count()];
        let mut edges = vec![false; g.edge_count()];
        for &d in &path {
            vertices[g.origin(d)] = true;
            edges[d.edge] = true;
        }
        Cycle { path, vertices, edges }
    }

    /// Rotation starting at vertex `v`, which the cycle must visit.
    fn rotated_to<S: Scalar>(&self, g: &MetricGraph<S>, v: usize) -> EdgePath {
        let i = self.path.iter().position(|&d| g.origin(d) == v).expect("vertex on cycle");
        self.path[i..].iter().chain(&self.path[..i]).copied().collect()
    }
}

/// All embedded circles, each once up to rotation and inversion.
fn simple_cycles<S: Scalar>(g: &MetricGraph<S>) -> Vec<Cycle> {
    let n = g.vertex_count();
    let mut found = BTreeSet::new();
    let mut visited = vec![false; n];
    let mut used = vec![false; g.edge_count()];
    let mut path = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn dfs<S: Scalar>(
        g: &MetricGraph<S>,
        start: usize,
        v: usize,
        visited: &mut [bool],
        used: &mut [bool],
        path: &mut EdgePath,
        found: &mut BTreeSet<EdgePath>,
    ) {
        for d in g.directions_at(v) {
            if used[d.edge] {
                continue;
            }
            let t = g.terminus(d);
            if t == start {
                path.push(d);
                found.insert(canonical_cycle(path));
                path.pop();
            } else if t > start && !visited[t] {
                visited[t] = true;
                used[d.edge] = true;
                path.push(d);
                dfs(g, start, t, visited, used, path, found);
                path.pop();
                used[d.edge] = false;
                visited[t] = false;
            }
        }
    }

    for s in 0..n {
        visited[s] = true;
        dfs(g, s, s, &mut visited, &mut used, &mut path, &mut found);
        visited[s] = false;
    }
    found.into_iter().map(|p| Cycle::new(g, p)).collect()
}

/// Embedded arcs from a vertex of `a` to a vertex of `b` whose interior
/// avoids both cycles.
fn connecting_arcs<S: Scalar>(g: &MetricGraph<S>, a: &Cycle, b: &Cycle) -> Vec<EdgePath> {
    let mut arcs = Vec::new();
    let mut visited = vec![false; g.vertex_count()];
    let mut path = Vec::new();

    fn walk<S: Scalar>(
        g: &MetricGraph<S>,
        v: usize,
        a: &Cycle,
        b: &Cycle,
        visited: &mut [bool],
        path: &mut EdgePath,
        arcs: &mut Vec<EdgePath>,
    ) {
        for d in g.directions_at(v) {
            if a.edges[d.edge] || b.edges[d.edge] {
                continue;
            }
            let t = g.terminus(d);
            if b.vertices[t] {
                path.push(d);
                arcs.push(path.clone());
                path.pop();
            } else if !a.vertices[t] && !visited[t] {
                visited[t] = true;
                path.push(d);
                walk(g, t, a, b, visited, path, arcs);
                path.pop();
                visited[t] = false;
            }
        }
    }

    for p in 0..g.vertex_count() {
        if a.vertices[p] {
            walk(g, p, a, b, &mut visited, &mut path, &mut arcs);
        }
    }
    arcs
}

/// Candidate loop paths of a graph, deduplicated up to rotation and
/// inversion, sorted by kind and then by canonical path.
pub fn candidate_paths<S: Scalar>(g: &MetricGraph<S>) -> Vec<(CandidateKind, EdgePath)> {
    let cycles = simple_cycles(g);
    let mut out: BTreeSet<(CandidateKind, EdgePath)> = BTreeSet::new();
    for c in &cycles {
        out.insert((CandidateKind::Embedded, c.path.clone()));
    }
    for (i, c1) in cycles.iter().enumerate() {
        for c2 in &cycles[i + 1..] {
            if c1.edges.iter().zip(&c2.edges).any(|(a, b)| *a && *b) {
                continue;
            }
            let shared: Vec<usize> = (0..g.vertex_count()).filter(|&v| c1.vertices[v] && c2.vertices[v]).collect();
            match shared.len() {
                1 => {
                    let v = shared[0];
                    let p1 = c1.rotated_to(g, v);
                    let p2 = c2.rotated_to(g, v);
                    for second in [p2.clone(), reverse_path(&p2)] {
                        let path: EdgePath = p1.iter().chain(&second).copied().collect();
                        out.insert((CandidateKind::FigureEight, canonical_cycle(&path)));
                    }
                }
                0 => {
                    for arc in connecting_arcs(g, c1, c2) {
                        let p = g.origin(arc[0]);
                        let q = g.terminus(*arc.last().expect("nonempty arc"));
                        let p1 = c1.rotated_to(g, p);
                        let p2 = c2.rotated_to(g, q);
                        let back = reverse_path(&arc);
                        for second in [p2.clone(), reverse_path(&p2)] {
                            let path: EdgePath =
                                p1.iter().chain(&arc).chain(&second).chain(&back).copied().collect();
                            out.insert((CandidateKind::Barbell, canonical_cycle(&path)));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    out.into_iter().collect()
}

/// All candidate loops of a point with their conjugacy classes.
pub fn enumerate_candidates<S: Scalar>(p: &MarkedGraph<S>) -> Result<Vec<CandidateLoop>> {
    candidate_paths(p.graph())
        .into_iter()
        .map(|(kind, path)| {
            let class = p.loop_class(&path)?;
            Ok(CandidateLoop { kind, path, class })
        })
        .collect()
}

/// Re-checks the combinatorial shape of a candidate path.
pub fn check_candidate_shape<S: Scalar>(g: &MetricGraph<S>, kind: CandidateKind, path: &[OrientedEdge]) -> bool {
    if path.is_empty() || g.check_path(path).is_err() || !g.is_closed(path) {
        return false;
    }
    // immersed as a cyclic path
    let n = path.len();
    if (0..n).any(|i| path[(i + 1) % n] == path[i].inverse()) {
        return false;
    }
    let mut edge_count = vec![0usize; g.edge_count()];
    let mut vertex_visits = vec![0usize; g.vertex_count()];
    for &d in path {
        edge_count[d.edge] += 1;
        vertex_visits[g.origin(d)] += 1;
    }
    let twice: usize = edge_count.iter().filter(|&&c| c == 2).count();
    let many = edge_count.iter().any(|&c| c > 2);
    if many {
        return false;
    }
    let visits: Vec<usize> = vertex_visits.iter().copied().filter(|&c| c > 0).collect();
    match kind {
        CandidateKind::Embedded => twice == 0 && visits.iter().all(|&c| c == 1),
        CandidateKind::FigureEight => {
            twice == 0 && visits.iter().filter(|&&c| c == 2).count() == 1 && visits.iter().all(|&c| c <= 2)
        }
        CandidateKind::Barbell => {
            // bar edges twice; the two bar endpoints visited twice, interior bar vertices twice
            twice >= 1 && visits.iter().all(|&c| c <= 2)
        }
    }
}
