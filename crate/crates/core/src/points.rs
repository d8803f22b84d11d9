//! Standard points, random points and minimal models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::free_group::{Automorphism, WhiteheadMove};
use crate::graph::{tighten, EdgePath, MarkedGraph, MetricGraph, OrientedEdge};
use crate::scalar::Scalar;

/// Rose with petal `i` marking generator `i + 1`.
pub fn rose<S: Scalar>(lengths: &[S]) -> Result<MarkedGraph<S>> {
    let triples: Vec<_> = lengths.iter().map(|l| (0, 0, l.as_f64())).collect();
    let g = MetricGraph::from_triples(1, &triples)?.with_lengths(lengths)?;
    let loops = (0..lengths.len()).map(|i| vec![OrientedEdge::forward(i)]).collect();
    MarkedGraph::new(g, 0, loops)
}

/// Rose with all petals of length `1/n`.
pub fn standard_rose<S: Scalar>(rank: usize) -> Result<MarkedGraph<S>> {
    let l = S::one() / S::lit(rank as f64);
    rose(&vec![l; rank])
}

/// Marks a connected graph by the fundamental loops of its non-tree edges
/// at `basepoint`.
pub fn tree_marking<S: Scalar>(graph: MetricGraph<S>, basepoint: usize) -> Result<MarkedGraph<S>> {
    let (in_tree, paths) = graph.spanning_tree(basepoint);
    let loops: Vec<EdgePath> = (0..graph.edge_count())
        .filter(|&e| !in_tree[e])
        .map(|e| {
            let d = OrientedEdge::forward(e);
            let mut p = paths[graph.origin(d)].clone();
            p.push(d);
            p.extend(crate::graph::reverse_path(&paths[graph.terminus(d)]));
            tighten(&p)
        })
        .collect();
    MarkedGraph::new(graph, basepoint, loops)
}

/// Theta graph with edges `e1, e2, e3` from `v` to `w` and marking
/// `x ↦ e1 ē2`, `y ↦ e2 ē3`.
pub fn theta<S: Scalar>(lengths: [S; 3]) -> Result<MarkedGraph<S>> {
    let g = MetricGraph::from_triples(2, &[(0, 1, 0.0); 3])?.with_lengths(&lengths)?;
    let f = OrientedEdge::forward;
    let b = OrientedEdge::backward;
    MarkedGraph::new(g, 0, vec![vec![f(0), b(1)], vec![f(1), b(2)]])
}

/// Barbell: loop `e1`, bar `e2`, loop `e3`; marking `x ↦ e1`, `y ↦ e2 e3 ē2`.
pub fn barbell<S: Scalar>(lengths: [S; 3]) -> Result<MarkedGraph<S>> {
    let g = MetricGraph::from_triples(2, &[(0, 0, 0.0), (0, 1, 0.0), (1, 1, 0.0)])?.with_lengths(&lengths)?;
    let f = OrientedEdge::forward;
    let b = OrientedEdge::backward;
    MarkedGraph::new(g, 0, vec![vec![f(0)], vec![f(1), f(2), b(1)]])
}

/// Trivalent and other standard graph shapes of the given rank, with
/// equal edge lengths and tree markings.
/// Vertex count and `(from, to, length)` edges.
type Shape = (usize, Vec<(usize, usize, f64)>);

pub fn templates<S: Scalar>(rank: usize) -> Result<Vec<MarkedGraph<S>>> {
    let mut out = vec![standard_rose(rank)?];
    let shapes: Vec<Shape> = match rank {
        2 => vec![
            (2, vec![(0, 1, 0.0), (0, 1, 0.0), (0, 1, 0.0)]),
            (2, vec![(0, 0, 0.0), (0, 1, 0.0), (1, 1, 0.0)]),
        ],
        3 => vec![
            (4, vec![(0, 1, 0.0), (0, 2, 0.0), (0, 3, 0.0), (1, 2, 0.0), (1, 3, 0.0), (2, 3, 0.0)]),
            (2, vec![(0, 1, 0.0), (0, 1, 0.0), (0, 1, 0.0), (0, 1, 0.0)]),
        ],
        _ => vec![],
    };
    for (nv, triples) in shapes {
        let l = 1.0 / triples.len() as f64;
        let t: Vec<_> = triples.iter().map(|&(a, b, _)| (a, b, l)).collect();
        out.push(tree_marking(MetricGraph::from_triples(nv, &t)?, 0)?);
    }
    Ok(out)
}

/// Composite of `n_moves` uniformly random Whitehead automorphisms.
pub fn random_automorphism<R: Rng>(rank: usize, n_moves: usize, rng: &mut R) -> Result<Automorphism> {
    let moves = WhiteheadMove::all(rank);
    let mut phi = Automorphism::identity(rank);
    for _ in 0..n_moves {
        let mv = moves.choose(rng).expect("at least one move");
        phi = phi.compose(&mv.automorphism(rank)?)?;
    }
    Ok(phi)
}

/// Multiplies each length by `1 + jitter·U(−1,1)` and renormalizes.
pub fn jitter_lengths<S: Scalar, R: Rng>(p: &MarkedGraph<S>, jitter: f64, rng: &mut R) -> Result<MarkedGraph<S>> {
    if !(0.0..1.0).contains(&jitter) {
        return Err(Error::Precondition(format!("jitter {jitter} must lie in [0, 1)")));
    }
    if jitter == 0.0 {
        return Ok(p.normalized());
    }
    let lengths: Vec<S> = p
        .graph()
        .lengths()
        .into_iter()
        .map(|l| l * S::lit(1.0 + jitter * rng.gen_range(-1.0..1.0)))
        .collect();
    Ok(p.with_lengths(&lengths)?.normalized())
}

/// Random point from a given start: random moves then jitter.
pub fn random_point_from<S: Scalar, R: Rng>(
    start: &MarkedGraph<S>,
    n_moves: usize,
    jitter: f64,
    rng: &mut R,
) -> Result<MarkedGraph<S>> {
    let phi = random_automorphism(start.rank(), n_moves, rng)?;
    let p = start.act(&phi)?;
    jitter_lengths(&p, jitter, rng)
}

/// Standard rose acted on by `n_moves` random Whitehead moves, lengths
/// jittered multiplicatively and renormalized. Deterministic in `seed`.
pub fn random_point<S: Scalar>(rank: usize, seed: u64, n_moves: usize, jitter: f64) -> Result<MarkedGraph<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_point_from(&standard_rose(rank)?, n_moves, jitter, &mut rng)
}

/// Random point on a random template shape.
pub fn random_template_point<S: Scalar, R: Rng>(
    rank: usize,
    n_moves: usize,
    jitter: f64,
    rng: &mut R,
) -> Result<MarkedGraph<S>> {
    let t = templates::<S>(rank)?;
    let start = t.choose(rng).expect("at least the rose");
    random_point_from(start, n_moves, jitter, rng)
}

/// Collapses every edge with `collapse[e]`; those edges must form a forest.
pub fn collapse_forest<S: Scalar>(p: &MarkedGraph<S>, collapse: &[bool]) -> Result<MarkedGraph<S>> {
    let g = p.graph();
    let (n_comp, comp) = g.components_with(|e| collapse[e]);
    let kept = collapse.iter().filter(|&&c| c).count();
    if kept + n_comp != g.vertex_count() {
        return Err(Error::Precondition("collapsed edges contain a cycle".into()));
    }
    let mut names = vec![String::new(); n_comp];
    for v in (0..g.vertex_count()).rev() {
        names[comp[v]] = g.vertices()[v].clone();
    }
    let mut new_index = vec![usize::MAX; g.edge_count()];
    let mut edges = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if !collapse[i] {
            new_index[i] = edges.len();
            let mut e2 = e.clone();
            e2.from = comp[e.from];
            e2.to = comp[e.to];
            edges.push(e2);
        }
    }
    let graph = MetricGraph::new(names, edges)?;
    let loops = p
        .loops()
        .iter()
        .map(|l| {
            l.iter()
                .filter(|d| !collapse[d.edge])
                .map(|d| OrientedEdge { edge: new_index[d.edge], reversed: d.reversed })
                .collect()
        })
        .collect();
    MarkedGraph::new(graph, comp[p.basepoint()], loops)
}

/// Collapses a maximal forest avoiding the longest edge (keeping that edge
/// as a bar when it separates) and renormalizes the volume.
pub fn minimal_model<S: Scalar>(p: &MarkedGraph<S>) -> Result<MarkedGraph<S>> {
    let g = p.graph();
    let longest = (0..g.edge_count())
        .max_by(|&a, &b| {
            g.length(a)
                .partial_cmp(&g.length(b))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.cmp(&a))
        })
        .ok_or_else(|| Error::InvalidGraph("graph has no edges".into()))?;
    // spanning forest grown greedily over the other edges
    let mut collapse = vec![false; g.edge_count()];
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(parent: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while parent[r] != r {
            r = parent[r];
        }
        let mut v = v;
        while parent[v] != r {
            let next = parent[v];
            parent[v] = r;
            v = next;
        }
        r
    }
    for (i, e) in g.edges().iter().enumerate() {
        if i == longest {
            continue;
        }
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            parent[a] = b;
            collapse[i] = true;
        }
    }
    let q = collapse_forest(p, &collapse)?;
    Ok(q.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::candidate_paths;

    #[test]
    fn degenerate_random_point_is_standard_rose() {
        let p: MarkedGraph<f64> = random_point(2, 7, 0, 0.0).unwrap();
        assert_eq!(p.graph().lengths(), vec![0.5, 0.5]);
        assert_eq!(p.loops(), standard_rose::<f64>(2).unwrap().loops());
    }

    #[test]
    fn random_point_is_deterministic_and_valid() {
        for seed in 0..20 {
            let a: MarkedGraph<f64> = random_point(3, seed, 5, 0.3).unwrap();
            let b: MarkedGraph<f64> = random_point(3, seed, 5, 0.3).unwrap();
            assert_eq!(a.loops(), b.loops());
            assert_eq!(a.graph(), b.graph());
            assert!(a.validate().is_valid(), "{}", a.validate());
        }
        assert!(random_point::<f64>(2, 0, 1, 1.0).is_err());
    }

    #[test]
    fn templates_are_valid() {
        for rank in 2..=3 {
            for t in templates::<f64>(rank).unwrap() {
                assert!(t.validate().is_valid(), "{}", t.validate());
            }
        }
    }

    #[test]
    fn minimal_model_of_theta_is_half_rose() {
        let third = 1.0 / 3.0;
        let t = theta::<f64>([third; 3]).unwrap();
        let m = minimal_model(&t).unwrap();
        assert_eq!(m.graph().vertex_count(), 1);
        for l in m.graph().lengths() {
            assert!((l - 0.5).abs() < 1e-12);
        }
        assert!(m.validate().is_valid());
    }

    #[test]
    fn minimal_model_of_rose_is_unchanged() {
        let r = rose(&[0.25, 0.75]).unwrap();
        let m = minimal_model(&r).unwrap();
        assert_eq!(m.graph(), r.graph());
        assert_eq!(m.loops(), r.loops());
    }

    #[test]
    fn minimal_model_keeps_separating_longest_edge() {
        let b = barbell([0.2, 0.6, 0.2]).unwrap();
        let m = minimal_model(&b).unwrap();
        assert_eq!(m.graph().edge_count(), 3);
        assert_eq!(candidate_paths(m.graph()).len(), 4);
    }
}
