//! Train-track maps: gates, PF metrics, legality, lamination leaves and
//! lamination length functionals.

use std::fmt;

use log::warn;

use crate::error::{Error, Result};
use crate::free_group::{verify_inverse_outer, Automorphism, CyclicWord, Letter, WhiteheadMove, Word};
use crate::graph::{tighten, EdgePath, MarkedGraph, OrientedEdge};
use crate::scalar::Scalar;
use crate::whitehead::{cut_analysis, cut_vertex_moves, WhiteheadGraph};

/// A cellular self-map of a marked graph.
#[derive(Clone, Debug)]
pub struct GraphSelfMap<S> {
    point: MarkedGraph<S>,
    vertex_images: Vec<usize>,
    edge_images: Vec<EdgePath>,
}

impl<S: Scalar> GraphSelfMap<S> {
    pub fn new(point: MarkedGraph<S>, vertex_images: Vec<usize>, edge_images: Vec<EdgePath>) -> Result<Self> {
        let g = point.graph();
        if vertex_images.len() != g.vertex_count() || edge_images.len() != g.edge_count() {
            return Err(Error::InconsistentMap("image counts do not match the graph".into()));
        }
        if vertex_images.iter().any(|&v| v >= g.vertex_count()) {
            return Err(Error::InconsistentMap("vertex image outside the graph".into()));
        }
        let mut tight = Vec::with_capacity(edge_images.len());
        for (i, img) in edge_images.iter().enumerate() {
            let e = g.edge(i);
            g.check_path(img).map_err(|err| Error::InconsistentMap(format!("image of {}: {err}", e.name)))?;
            let img = tighten(img);
            let ok = match (img.first(), img.last()) {
                (Some(&a), Some(&b)) => {
                    g.origin(a) == vertex_images[e.from] && g.terminus(b) == vertex_images[e.to]
                }
                _ => vertex_images[e.from] == vertex_images[e.to],
            };
            if !ok {
                return Err(Error::InconsistentMap(format!(
                    "image of {} does not join the images of its endpoints",
                    e.name
                )));
            }
            tight.push(img);
        }
        Ok(GraphSelfMap { point, vertex_images, edge_images: tight })
    }

    /// Map of a rose given by edge words (letter `i` is edge `i`).
    pub fn on_rose(point: MarkedGraph<S>, images: &[Word]) -> Result<Self> {
        if point.graph().vertex_count() != 1 {
            return Err(Error::Precondition("on_rose needs a one-vertex graph".into()));
        }
        let paths = images
            .iter()
            .map(|w| {
                w.letters()
                    .iter()
                    .map(|l| OrientedEdge { edge: l.generator() - 1, reversed: l.is_inverse() })
                    .collect()
            })
            .collect();
        GraphSelfMap::new(point, vec![0], paths)
    }

    pub fn point(&self) -> &MarkedGraph<S> {
        &self.point
    }

    pub fn vertex_images(&self) -> &[usize] {
        &self.vertex_images
    }

    pub fn edge_images(&self) -> &[EdgePath] {
        &self.edge_images
    }

    /// Same map on the same graph with new edge lengths.
    pub fn with_lengths(&self, lengths: &[S]) -> Result<Self> {
        Ok(GraphSelfMap { point: self.point.with_lengths(lengths)?, ..self.clone() })
    }

    /// Tight image of a path.
    pub fn apply_path(&self, path: &[OrientedEdge]) -> EdgePath {
        let mut buf: EdgePath = Vec::new();
        for d in path {
            let img = &self.edge_images[d.edge];
            if d.reversed {
                buf.extend(img.iter().rev().map(|e| e.inverse()));
            } else {
                buf.extend(img.iter().copied());
            }
        }
        tighten(&buf)
    }

    /// First direction of the image of `d`, if the image is nonconstant.
    pub fn direction_image(&self, d: OrientedEdge) -> Option<OrientedEdge> {
        let img = &self.edge_images[d.edge];
        if d.reversed {
            img.last().map(|e| e.inverse())
        } else {
            img.first().copied()
        }
    }

    /// `M[j][i]` counts the occurrences of edge `i` in the image of edge `j`.
    pub fn transition_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.edge_images.len();
        self.edge_images
            .iter()
            .map(|img| {
                let mut row = vec![0u64; n];
                for d in img {
                    row[d.edge] += 1;
                }
                row
            })
            .collect()
    }

    /// The automorphism induced on π₁, up to an inner automorphism.
    pub fn automorphism(&self) -> Result<Automorphism> {
        let words = self
            .point
            .loops()
            .iter()
            .map(|l| self.point.path_word(&self.apply_path(l)))
            .collect::<Result<Vec<_>>>()?;
        Automorphism::new(self.point.rank(), words)?.certify()
    }
}

/// Partition of the directions at each vertex into gates.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrackStructure {
    gate_of: Vec<Option<usize>>,
    gates: Vec<Vec<OrientedEdge>>,
    gate_vertex: Vec<usize>,
}

impl TrainTrackStructure {
    pub fn gate(&self, d: OrientedEdge) -> Option<usize> {
        self.gate_of[d.index()]
    }

    pub fn gates(&self) -> &[Vec<OrientedEdge>] {
        &self.gates
    }

    pub fn gate_vertex(&self, gate: usize) -> usize {
        self.gate_vertex[gate]
    }

    pub fn gates_at(&self, v: usize) -> usize {
        self.gate_vertex.iter().filter(|&&w| w == v).count()
    }

    /// A turn is legal when its directions lie in different gates.
    pub fn is_legal_turn(&self, a: OrientedEdge, b: OrientedEdge) -> bool {
        if a == b {
            return false;
        }
        match (self.gate(a), self.gate(b)) {
            (Some(x), Some(y)) => x != y,
            _ => true,
        }
    }

    /// Index of the first illegal turn inside `path`.
    pub fn first_illegal_turn(&self, path: &[OrientedEdge]) -> Option<usize> {
        path.windows(2).position(|w| !self.is_legal_turn(w[0].inverse(), w[1]))
    }
}

/// Gates of the structure induced by `f`: two directions at a vertex are
/// equivalent when some iterate of the direction map identifies them.
pub fn gates<S: Scalar>(f: &GraphSelfMap<S>) -> TrainTrackStructure {
    let g = f.point().graph();
    let n_dirs = 2 * g.edge_count();
    // Once two orbits meet they agree forever, so one deep iterate suffices.
    let depth = n_dirs * n_dirs;
    let mut limit: Vec<Option<OrientedEdge>> = Vec::with_capacity(n_dirs);
    for i in 0..n_dirs {
        let d0 = OrientedEdge::from_index(i);
        let mut d = Some(d0);
        for _ in 0..depth {
            d = match d {
                Some(x) => f.direction_image(x),
                None => None,
            };
            if d.is_none() {
                break;
            }
        }
        if d.is_none() {
            warn!("direction {} has a constant iterate and is excluded from the gates", g.direction_name(d0));
        }
        limit.push(d);
    }
    let mut gate_of = vec![None; n_dirs];
    let mut gates: Vec<Vec<OrientedEdge>> = Vec::new();
    let mut gate_vertex = Vec::new();
    let mut keys: Vec<(usize, OrientedEdge)> = Vec::new();
    for v in 0..g.vertex_count() {
        for d in g.directions_at(v) {
            let Some(l) = limit[d.index()] else { continue };
            let id = match keys.iter().position(|&k| k == (v, l)) {
                Some(id) => id,
                None => {
                    keys.push((v, l));
                    gates.push(Vec::new());
                    gate_vertex.push(v);
                    keys.len() - 1
                }
            };
            gate_of[d.index()] = Some(id);
            gates[id].push(d);
        }
    }
    TrainTrackStructure { gate_of, gates, gate_vertex }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IllegalTurn {
    /// Edge whose image crosses the turn.
    pub edge: usize,
    /// Position of the turn inside that image.
    pub position: usize,
    pub turn: (OrientedEdge, OrientedEdge),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrackCheck {
    pub is_train_track: bool,
    pub irreducible: bool,
    pub illegal_turn: Option<IllegalTurn>,
}

/// True when the directed graph of `m` (edge `j → i` if `m[j][i] > 0`) is
/// strongly connected.
pub fn is_irreducible(m: &[Vec<u64>]) -> bool {
    let n = m.len();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(j) = stack.pop() {
            for i in 0..n {
                let w = if forward { m[j][i] } else { m[i][j] };
                if w > 0 && !seen[i] {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reach(true) && reach(false)
}

pub fn verify_train_track<S: Scalar>(f: &GraphSelfMap<S>) -> TrainTrackCheck {
    let tts = gates(f);
    let mut illegal_turn = None;
    for (e, img) in f.edge_images().iter().enumerate() {
        if let Some(p) = tts.first_illegal_turn(img) {
            illegal_turn = Some(IllegalTurn { edge: e, position: p, turn: (img[p].inverse(), img[p + 1]) });
            break;
        }
    }
    TrainTrackCheck {
        is_train_track: illegal_turn.is_none(),
        irreducible: is_irreducible(&f.transition_matrix()),
        illegal_turn,
    }
}

/// Perron–Frobenius eigenvalue and eigenvector (sum 1) of `m`, or of its
/// transpose, by power iteration on `m + I` from the all-ones vector.
pub fn perron_frobenius<S: Scalar>(m: &[Vec<u64>], transpose: bool) -> Result<(S, Vec<S>)> {
    const MAX_ITER: usize = 100_000;
    let n = m.len();
    let entry = |j: usize, i: usize| S::lit(if transpose { m[i][j] } else { m[j][i] } as f64);
    let mul = |v: &[S]| -> Vec<S> { (0..n).map(|j| (0..n).map(|i| entry(j, i) * v[i]).sum()).collect() };
    let scale = S::lit(n as f64);
    let mut v = vec![S::one() / scale; n];
    for _ in 0..MAX_ITER {
        let mv = mul(&v);
        let next: Vec<S> = mv.iter().zip(&v).map(|(a, b)| *a + *b).collect();
        let total: S = next.iter().copied().sum();
        let next: Vec<S> = next.into_iter().map(|x| x / total).collect();
        let mn = mul(&next);
        let lambda: S = mn.iter().copied().sum();
        let residual = mn.iter().zip(&next).map(|(a, b)| (*a - lambda * *b).abs()).fold(S::zero(), S::max);
        v = next;
        if residual < S::eigen_residual() {
            return Ok((lambda, v));
        }
    }
    Err(Error::NoConvergence("power iteration did not reach the residual bound".into()))
}

/// A verified expanding irreducible train-track map on its PF metric.
#[derive(Clone, Debug)]
pub struct TrainTrackMap<S> {
    map: GraphSelfMap<S>,
    gates: TrainTrackStructure,
    matrix: Vec<Vec<u64>>,
    lambda: S,
    frequencies: Vec<S>,
    automorphism: Automorphism,
}

/// Verifies `f` and puts the Perron–Frobenius metric on its graph.
pub fn pf_metric<S: Scalar>(f: &GraphSelfMap<S>) -> Result<TrainTrackMap<S>> {
    let check = verify_train_track(f);
    if !check.irreducible {
        return Err(Error::Reducible);
    }
    if let Some(t) = &check.illegal_turn {
        let g = f.point().graph();
        return Err(Error::NotTrainTrack(format!(
            "image of {} crosses the illegal turn {{{}, {}}}",
            g.edge(t.edge).name,
            g.direction_name(t.turn.0),
            g.direction_name(t.turn.1)
        )));
    }
    let matrix = f.transition_matrix();
    let (lambda, lengths) = perron_frobenius::<S>(&matrix, false)?;
    if lambda <= S::one() + S::tolerance() {
        return Err(Error::NotExpanding { lambda: lambda.as_f64() });
    }
    let (_, frequencies) = perron_frobenius::<S>(&matrix, true)?;
    let map = f.with_lengths(&lengths)?;
    let automorphism = map.automorphism()?;
    Ok(TrainTrackMap { gates: gates(&map), map, matrix, lambda, frequencies, automorphism })
}

/// Legal decomposition of a path with the threshold used to weigh it.
#[derive(Clone, Debug, PartialEq)]
pub struct LegalityReport<S> {
    pub bcc_bound: S,
    pub kappa: S,
    pub pieces: Vec<(EdgePath, S)>,
    pub leg: S,
}

/// Fraction of total length lying in pieces longer than `kappa`.
pub fn leg_from_pieces<S: Scalar>(lengths: &[S], kappa: S) -> S {
    let total: S = lengths.iter().copied().sum();
    if total <= S::zero() {
        return S::zero();
    }
    let long: S = lengths.iter().copied().filter(|&l| l > kappa).sum();
    long / total
}

impl<S: Scalar> TrainTrackMap<S> {
    pub fn map(&self) -> &GraphSelfMap<S> {
        &self.map
    }

    /// The graph with its PF metric and marking.
    pub fn point(&self) -> &MarkedGraph<S> {
        self.map.point()
    }

    pub fn gates(&self) -> &TrainTrackStructure {
        &self.gates
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn lengths(&self) -> Vec<S> {
        self.point().graph().lengths()
    }

    /// Left PF eigenvector: asymptotic edge frequencies in leaves, sum 1.
    pub fn frequencies(&self) -> &[S] {
        &self.frequencies
    }

    /// The represented automorphism (defined up to an inner automorphism).
    pub fn automorphism(&self) -> &Automorphism {
        &self.automorphism
    }

    /// The same map on the point `p·g`; it represents `g⁻¹ φ g`.
    pub fn remarked(&self, g: &Automorphism) -> Result<TrainTrackMap<S>> {
        let point = self.point().act(g)?;
        let automorphism = g.inverse()?.compose(&self.automorphism)?.compose(g)?;
        let map = GraphSelfMap { point, ..self.map.clone() };
        Ok(TrainTrackMap { map, automorphism, ..self.clone() })
    }

    /// Bounded cancellation bound `λ·vol`.
    pub fn bcc_bound(&self) -> S {
        self.lambda * self.point().graph().volume()
    }

    /// Legality threshold `4·BCC/(λ−1)`.
    pub fn kappa(&self) -> S {
        S::lit(4.0) * self.bcc_bound() / (self.lambda - S::one())
    }

    /// Splits a path (cyclically if `cyclic`) at its illegal turns.
    pub fn legality_report_path(&self, path: &[OrientedEdge], cyclic: bool) -> LegalityReport<S> {
        let g = self.point().graph();
        let n = path.len();
        let illegal_after: Vec<usize> = (0..n)
            .filter(|&i| {
                if i + 1 < n {
                    !self.gates.is_legal_turn(path[i].inverse(), path[i + 1])
                } else {
                    cyclic && n > 0 && !self.gates.is_legal_turn(path[i].inverse(), path[0])
                }
            })
            .collect();
        let mut pieces = Vec::new();
        if n > 0 {
            if cyclic && !illegal_after.is_empty() {
                // pieces run from just after one illegal turn to the next
                for (k, &cut) in illegal_after.iter().enumerate() {
                    let next = illegal_after[(k + 1) % illegal_after.len()];
                    let mut piece = Vec::new();
                    let mut i = (cut + 1) % n;
                    loop {
                        piece.push(path[i]);
                        if i == next {
                            break;
                        }
                        i = (i + 1) % n;
                    }
                    pieces.push(piece);
                }
            } else {
                let mut start = 0;
                for &cut in illegal_after.iter().filter(|&&c| c + 1 < n) {
                    pieces.push(path[start..=cut].to_vec());
                    start = cut + 1;
                }
                pieces.push(path[start..].to_vec());
            }
        }
        let pieces: Vec<(EdgePath, S)> = pieces
            .into_iter()
            .map(|p| {
                let l = g.path_length(&p);
                (p, l)
            })
            .collect();
        let kappa = self.kappa();
        let lengths: Vec<S> = pieces.iter().map(|p| p.1).collect();
        LegalityReport { bcc_bound: self.bcc_bound(), kappa, leg: leg_from_pieces(&lengths, kappa), pieces }
    }

    /// Legality of the immersed loop representing `alpha`.
    pub fn legality_report(&self, alpha: &CyclicWord) -> LegalityReport<S> {
        self.legality_report_path(&self.point().realize_cyclic(alpha.letters()), true)
    }

    /// `f^k(e)` as a tight path and as a word.
    pub fn leaf_segment(&self, edge: usize, k: usize) -> Result<(EdgePath, Word)> {
        if edge >= self.point().graph().edge_count() {
            return Err(Error::InvalidGraph(format!("no edge with index {edge}")));
        }
        let mut path = vec![OrientedEdge::forward(edge)];
        for _ in 0..k {
            path = self.map.apply_path(&path);
        }
        let word = self.point().path_word(&path)?;
        Ok((path, word))
    }

    /// Metric length of the longest subword of `alpha` (cyclically, either
    /// orientation) occurring in `leaf`.
    pub fn longest_leaf_piece(&self, alpha: &CyclicWord, leaf: &Word) -> S {
        let leaf = leaf.letters();
        let mut best = S::zero();
        let fwd = alpha.letters().to_vec();
        let bwd: Vec<Letter> = fwd.iter().rev().map(|l| l.inverse()).collect();
        let n = fwd.len();
        for w in [fwd, bwd] {
            let doubled: Vec<Letter> = w.iter().chain(&w).copied().collect();
            for start in 0..n {
                let mut len = 1;
                while len <= n && leaf.windows(len).any(|win| win == &doubled[start..start + len]) {
                    len += 1;
                }
                if len > 1 {
                    let sub = Word::from_letters(doubled[start..start + len - 1].iter().copied());
                    best = best.max(self.point().based_length(&sub));
                }
            }
        }
        best
    }

    /// Length of the lamination in `target`, scaled so it is 1 at this
    /// map's own point.
    pub fn lamination_length_ratio(
        &self,
        target: &MarkedGraph<S>,
        tolerance: S,
        max_letters: usize,
    ) -> Result<LaminationLengthEstimate<S>> {
        if target.rank() != self.point().rank() {
            return Err(Error::RankMismatch { expected: self.point().rank(), found: target.rank() });
        }
        let r = &self.frequencies;
        let mut tiles: Vec<EdgePath> =
            (0..self.point().graph().edge_count()).map(|e| vec![OrientedEdge::forward(e)]).collect();
        let mut sequence: Vec<S> = Vec::new();
        let mut k = 0;
        loop {
            k += 1;
            tiles = tiles.iter().map(|t| self.map.apply_path(t)).collect();
            let mut num = S::zero();
            let mut den = S::zero();
            for (i, t) in tiles.iter().enumerate() {
                let w = self.point().path_word(t)?;
                num = num + r[i] * target.based_length(&w);
                den = den + r[i] * self.point().based_length(&w);
            }
            let a = num / den;
            let converged = sequence.last().is_some_and(|&prev| (a - prev).abs() < tolerance);
            sequence.push(a);
            let letters: usize = tiles.iter().map(Vec::len).sum();
            if converged || letters > max_letters {
                return Ok(LaminationLengthEstimate {
                    frequencies: r.clone(),
                    value: a,
                    k_used: k,
                    converged,
                    sequence,
                });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaminationLengthEstimate<S> {
    pub frequencies: Vec<S>,
    /// `a_1, a_2, ...`
    pub sequence: Vec<S>,
    pub value: S,
    pub k_used: usize,
    pub converged: bool,
}

/// Default letter budget for lamination estimates.
pub const LAMINATION_LETTER_BUDGET: usize = 400_000;

pub fn lamination_length_ratio<S: Scalar>(
    tt: &TrainTrackMap<S>,
    target: &MarkedGraph<S>,
    tolerance: S,
) -> Result<LaminationLengthEstimate<S>> {
    tt.lamination_length_ratio(target, tolerance, LAMINATION_LETTER_BUDGET)
}

pub fn legality_report<S: Scalar>(alpha: &CyclicWord, tt: &TrainTrackMap<S>) -> LegalityReport<S> {
    tt.legality_report(alpha)
}

pub fn leaf_segment<S: Scalar>(tt: &TrainTrackMap<S>, edge: usize, k: usize) -> Result<(EdgePath, Word)> {
    tt.leaf_segment(edge, k)
}

/// Settings for the cut-vertex-free point search.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Stop growing leaves past this many letters per lamination.
    pub max_letters: usize,
    /// Agreement between iterates only counts once every middle third has
    /// at least this many letters.
    pub min_letters: usize,
    pub max_steps: usize,
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_letters: 20_000, min_letters: 200, max_steps: 64, tolerance: 1e-9 }
    }
}

/// Combined Whitehead graph of leaf segments of both laminations read in a
/// rose, with the leaf iterate at which it stabilized.
#[derive(Clone, Debug)]
pub struct LaminationGraph {
    pub graph: WhiteheadGraph,
    pub k_used: usize,
    pub stabilized: bool,
}

fn rose_edge_word<S: Scalar>(rose: &MarkedGraph<S>, w: &Word) -> Vec<Letter> {
    rose.cotree_word(&rose.realize(w.letters())).letters().to_vec()
}

/// Whitehead graph (without wrap-around turns) of the middle thirds of the
/// leaf segments `f^k(e)` of both maps, grown until the simple graph is
/// unchanged for two consecutive iterates with long enough segments.
pub fn lamination_whitehead_graph<S: Scalar>(
    plus: &TrainTrackMap<S>,
    minus: &TrainTrackMap<S>,
    rose: &MarkedGraph<S>,
    cfg: &SearchConfig,
) -> Result<LaminationGraph> {
    if rose.graph().vertex_count() != 1 {
        return Err(Error::Precondition("lamination graphs are read in a rose".into()));
    }
    let rank = rose.rank();
    let mut tiles: Vec<Vec<EdgePath>> = [plus, minus]
        .iter()
        .map(|tt| (0..tt.point().graph().edge_count()).map(|e| vec![OrientedEdge::forward(e)]).collect())
        .collect();
    let mut prev: Option<WhiteheadGraph> = None;
    let mut unchanged = 0;
    let mut k = 0;
    loop {
        k += 1;
        let mut graph = WhiteheadGraph::new(rank);
        let mut longest = 0;
        let mut shortest = usize::MAX;
        for (tt, ts) in [plus, minus].iter().zip(tiles.iter_mut()) {
            *ts = ts.iter().map(|t| tt.map.apply_path(t)).collect();
            for t in ts.iter() {
                let w = tt.point().path_word(t)?;
                let letters = rose_edge_word(rose, &w);
                let third = letters.len() / 3;
                graph.add_linear(&letters[third..letters.len() - third]);
                shortest = shortest.min(letters.len() - 2 * third);
                longest = longest.max(t.len());
            }
        }
        if shortest >= cfg.min_letters && prev.as_ref().is_some_and(|p| p.same_simple_graph(&graph)) {
            unchanged += 1;
        } else {
            unchanged = 0;
        }
        if unchanged >= 2 {
            return Ok(LaminationGraph { graph, k_used: k, stabilized: true });
        }
        if longest > cfg.max_letters {
            return Ok(LaminationGraph { graph, k_used: k, stabilized: false });
        }
        prev = Some(graph);
    }
}

/// One re-marking step of the search.
#[derive(Clone, Debug)]
pub struct SearchStep<S> {
    pub cut_vertex: Letter,
    pub mv: WhiteheadMove,
    pub length_plus: S,
    pub length_minus: S,
}

#[derive(Clone, Debug)]
pub struct NoCutVertexResult<S> {
    pub point: MarkedGraph<S>,
    pub steps: Vec<SearchStep<S>>,
    /// Lamination lengths `(Λ⁺, Λ⁻)` at the start point.
    pub start_lengths: (S, S),
    pub graph: LaminationGraph,
}

impl<S> NoCutVertexResult<S> {
    pub fn moves(&self) -> Vec<WhiteheadMove> {
        self.steps.iter().map(|s| s.mv.clone()).collect()
    }
}

/// Re-marks a rose by Whitehead moves until the combined lamination
/// Whitehead graph is connected without cut vertices. Each move must
/// strictly shorten both laminations.
pub fn no_cut_vertex_search<S: Scalar>(
    plus: &TrainTrackMap<S>,
    minus: &TrainTrackMap<S>,
    start: &MarkedGraph<S>,
    cfg: &SearchConfig,
) -> Result<NoCutVertexResult<S>> {
    if !verify_inverse_outer(plus.automorphism(), minus.automorphism())? {
        return Err(Error::Precondition("the two maps do not represent inverse automorphisms".into()));
    }
    let tol = S::lit(cfg.tolerance);
    let lengths = |p: &MarkedGraph<S>| -> Result<(S, S)> {
        Ok((
            plus.lamination_length_ratio(p, tol, LAMINATION_LETTER_BUDGET)?.value,
            minus.lamination_length_ratio(p, tol, LAMINATION_LETTER_BUDGET)?.value,
        ))
    };
    let mut point = start.clone();
    let mut current = lengths(&point)?;
    let start_lengths = current;
    let mut steps = Vec::new();
    loop {
        let lg = lamination_whitehead_graph(plus, minus, &point, cfg)?;
        let cut = cut_analysis(&lg.graph);
        if !cut.connected {
            return Err(Error::Disconnected(
                "combined lamination Whitehead graph is disconnected; the automorphism is not fully irreducible"
                    .into(),
            ));
        }
        if cut.cut_vertices.is_empty() {
            return Ok(NoCutVertexResult { point, steps, start_lengths, graph: lg });
        }
        if steps.len() >= cfg.max_steps {
            return Err(Error::BudgetExceeded(format!("no cut-vertex-free rose within {} moves", cfg.max_steps)));
        }
        let rank = point.rank();
        let mut chosen = None;
        'search: for &a in &cut.cut_vertices {
            for mv in cut_vertex_moves(&lg.graph, a) {
                let next = point.rose_rewrite(&mv.automorphism(rank)?)?;
                let l = lengths(&next)?;
                if l.0 < current.0 - tol && l.1 < current.1 - tol {
                    chosen = Some((a, mv, next, l));
                    break 'search;
                }
            }
        }
        let Some((a, mv, next, l)) = chosen else {
            return Err(Error::NoConvergence("no cut-vertex move shortens both laminations".into()));
        };
        steps.push(SearchStep { cut_vertex: a, mv, length_plus: l.0, length_minus: l.1 });
        point = next;
        current = l;
    }
}

impl fmt::Display for TrainTrackCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "train track: {}, irreducible: {}", self.is_train_track, self.irreducible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{rose, standard_rose};

    fn rose_map(images: &[&str]) -> GraphSelfMap<f64> {
        let words: Vec<Word> = images.iter().map(|s| Word::parse(s).unwrap()).collect();
        GraphSelfMap::on_rose(standard_rose(words.len()).unwrap(), &words).unwrap()
    }

    fn golden() -> TrainTrackMap<f64> {
        pf_metric(&rose_map(&["xy", "x"])).unwrap()
    }

    fn golden_inverse() -> TrainTrackMap<f64> {
        pf_metric(&rose_map(&["y", "Yx"])).unwrap()
    }

    fn gate_names(f: &GraphSelfMap<f64>) -> Vec<Vec<String>> {
        let g = f.point().graph();
        let mut out: Vec<Vec<String>> = gates(f)
            .gates()
            .iter()
            .map(|gate| {
                let mut v: Vec<String> = gate.iter().map(|&d| g.direction_name(d)).collect();
                v.sort();
                v
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn gate_examples() {
        assert_eq!(gate_names(&rose_map(&["xy", "x"])), vec![vec!["e1", "e2"], vec!["~e1"], vec!["~e2"]]);
        assert_eq!(gate_names(&rose_map(&["x", "y"])).len(), 4);
        assert_eq!(gate_names(&rose_map(&["y", "x"])).len(), 4);
    }

    #[test]
    fn verify_examples() {
        let c = verify_train_track(&rose_map(&["xy", "x"]));
        assert!(c.is_train_track && c.irreducible);
        let c = verify_train_track(&rose_map(&["xx", "y"]));
        assert!(c.is_train_track && !c.irreducible);
        let c = verify_train_track(&rose_map(&["xy", "xY"]));
        assert!(!c.is_train_track);
        let t = c.illegal_turn.unwrap();
        assert_eq!(t.edge, 0);
        assert_eq!(t.turn, (OrientedEdge::backward(0), OrientedEdge::forward(1)));
    }

    #[test]
    fn pf_examples() {
        let g = golden();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((g.lambda() - phi).abs() < 1e-9);
        let l = g.lengths();
        assert!((l[0] - 0.6180340).abs() < 1e-7 && (l[1] - 0.3819660).abs() < 1e-7);
        assert!(matches!(pf_metric(&rose_map(&["y", "x"])), Err(Error::NotExpanding { .. })));
        assert!(matches!(pf_metric(&rose_map(&["xx", "y"])), Err(Error::Reducible)));
        let t = pf_metric(&rose_map(&["xy", "yxy"])).unwrap();
        assert!((t.lambda() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn pf_in_single_precision() {
        let words = [Word::parse("xy").unwrap(), Word::parse("x").unwrap()];
        let f = GraphSelfMap::on_rose(standard_rose::<f32>(2).unwrap(), &words).unwrap();
        let t = pf_metric(&f).unwrap();
        assert!((t.lambda() - 1.618034f32).abs() < 1e-5);
    }

    #[test]
    fn edges_stretch_by_lambda() {
        for tt in [golden(), golden_inverse()] {
            let g = tt.point().graph();
            for e in 0..g.edge_count() {
                let img = g.path_length(&tt.map().edge_images()[e]);
                assert!((img - tt.lambda() * g.length(e)).abs() < 1e-9);
            }
            for v in 0..g.vertex_count() {
                assert!(tt.gates().gates_at(v) >= 2);
            }
        }
    }

    #[test]
    fn legality_examples() {
        let g = golden();
        let r = g.legality_report(&CyclicWord::parse("x").unwrap());
        assert!((r.kappa - 10.47213595).abs() < 1e-6);
        assert_eq!(r.pieces.len(), 1);
        assert_eq!(r.leg, 0.0);
        assert!((leg_from_pieces::<f64>(&[5.0, 12.0], 10.0) - 12.0 / 17.0).abs() < 1e-15);
        // a long legal loop closed up from a leaf segment
        let w = g.leaf_segment(0, 10).unwrap().1;
        let alpha = CyclicWord::new(&w);
        let r = g.legality_report(&alpha);
        let total: f64 = r.pieces.iter().map(|p| p.1).sum();
        assert!(total > r.kappa);
        assert!((r.leg - 1.0).abs() < 1e-12, "{:?}", r.leg);
    }

    #[test]
    fn leaf_examples() {
        let g = golden();
        let word = |k| g.leaf_segment(0, k).unwrap().1.to_string();
        assert_eq!(word(1), "xy");
        assert_eq!(word(2), "xyx");
        assert_eq!(word(4), "xyxxyxyx");
        // |f^{k+1}(e_j)| = Σ_i M[j][i] |f^k(e_i)|
        let m = g.matrix();
        for k in 0..6 {
            for (j, row) in m.iter().enumerate() {
                let lhs = g.leaf_segment(j, k + 1).unwrap().0.len() as u64;
                let rhs: u64 = row.iter().enumerate().map(|(i, &c)| c * g.leaf_segment(i, k).unwrap().0.len() as u64).sum();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn longest_piece_examples() {
        let g = golden();
        let leaf = Word::parse("xyxxyxyx").unwrap();
        let l = g.longest_leaf_piece(&CyclicWord::parse("xy").unwrap(), &leaf);
        assert!((l - 1.0).abs() < 1e-9);
        let l = g.longest_leaf_piece(&CyclicWord::parse("yy").unwrap(), &leaf);
        assert!((l - 0.3819660).abs() < 1e-6);
        let sub = CyclicWord::parse("xyxxy").unwrap();
        let l = g.longest_leaf_piece(&sub, &leaf);
        assert!((l - g.point().loop_length(&sub)).abs() < 1e-9);
    }

    #[test]
    fn quasi_periodic_golden_leaf() {
        let g = golden();
        let short = g.leaf_segment(0, 8).unwrap().1;
        let long = g.leaf_segment(0, 12).unwrap().1;
        let pairs: Vec<&[Letter]> = short.letters().windows(2).collect();
        for window in long.letters().windows(10) {
            for p in &pairs {
                assert!(window.windows(2).any(|w| w == *p));
            }
        }
    }

    #[test]
    fn lamination_length_examples() {
        let g = golden();
        let same = g.lamination_length_ratio(g.point(), 1e-12, 100_000).unwrap();
        assert!(same.sequence.iter().all(|a| (a - 1.0).abs() < 1e-12));
        let target = rose::<f64>(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let est = lamination_length_ratio(&g, &target, 1e-12).unwrap();
        let (rx, ry) = (g.frequencies()[0], g.frequencies()[1]);
        let expect = (rx / 3.0 + 2.0 * ry / 3.0) / (rx * 0.6180339887 + ry * 0.3819660113);
        assert!((est.value - expect).abs() < 1e-6);
        // cross-check against letter counts of f^12(x)
        let w = g.leaf_segment(0, 12).unwrap().1;
        let nx = w.letters().iter().filter(|l| l.generator() == 1).count() as f64 / w.len() as f64;
        assert!((nx - rx).abs() < 1e-3);
    }

    #[test]
    fn lamination_sequence_settles_with_cancellation() {
        let g = golden();
        let phi = Automorphism::from_named([("x", "xY"), ("y", "y")]).unwrap().certify().unwrap();
        let target = rose::<f64>(&[0.5, 0.5]).unwrap().act(&phi).unwrap();
        let est = g.lamination_length_ratio(&target, 0.0, 50_000).unwrap();
        let a = &est.sequence;
        let d = |k: usize| (a[k] - a[k - 1]).abs();
        assert!(d(6) < d(5) && d(5) < d(4), "{a:?}");
    }

    #[test]
    fn golden_search_is_immediate() {
        let plus = golden();
        let minus = golden_inverse();
        let start = standard_rose(2).unwrap();
        let res = no_cut_vertex_search(&plus, &minus, &start, &SearchConfig::default()).unwrap();
        assert!(res.steps.is_empty());
        let simple = res.graph.graph.simple_edges();
        assert_eq!(simple.len(), 6, "{}", res.graph.graph);
        let cut = cut_analysis(&res.graph.graph);
        assert!(cut.connected && cut.cut_vertices.is_empty());
    }

    #[test]
    fn search_from_a_remarked_rose_shortens_laminations() {
        let plus = golden();
        let minus = golden_inverse();
        let twist = Automorphism::from_named([("x", "xyyy"), ("y", "y")]).unwrap().certify().unwrap();
        let start = standard_rose(2).unwrap().act(&twist).unwrap();
        let res = no_cut_vertex_search(&plus, &minus, &start, &SearchConfig::default()).unwrap();
        assert!(!res.steps.is_empty());
        let cut = cut_analysis(&res.graph.graph);
        assert!(cut.connected && cut.cut_vertices.is_empty());
        let mut prev = res.start_lengths;
        for s in &res.steps {
            assert!(s.length_plus < prev.0 && s.length_minus < prev.1);
            prev = (s.length_plus, s.length_minus);
        }
    }

    #[test]
    fn lamination_graph_is_invariant_along_axis() {
        let plus = golden();
        let minus = golden_inverse();
        let cfg = SearchConfig::default();
        let f = standard_rose(2).unwrap();
        let base = lamination_whitehead_graph(&plus, &minus, &f, &cfg).unwrap().graph;
        let phi = plus.automorphism();
        for moved in [f.act(phi).unwrap(), f.act(&phi.inverse().unwrap()).unwrap()] {
            let g = lamination_whitehead_graph(&plus, &minus, &moved, &cfg).unwrap().graph;
            assert!(g.same_simple_graph(&base));
        }
    }
}
