//! Whitehead graphs, cut vertices and Whitehead's length-reduction
//! algorithm.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::free_group::{Automorphism, CyclicWord, Letter, Word, WhiteheadMove};

/// Graph on the `2n` signed letters with one edge `u⁻¹–v` for every 2-letter
/// subword `uv`, counted with multiplicity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WhiteheadGraph {
    rank: usize,
    edges: BTreeMap<(Letter, Letter), usize>,
}

impl WhiteheadGraph {
    pub fn new(rank: usize) -> WhiteheadGraph {
        WhiteheadGraph { rank, edges: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn add_turn(&mut self, u: Letter, v: Letter) {
        let (a, b) = (u.inverse(), v);
        let key = if a <= b { (a, b) } else { (b, a) };
        *self.edges.entry(key).or_insert(0) += 1;
    }

    /// Adds every cyclic 2-letter subword of a cyclically reduced word.
    pub fn add_cyclic(&mut self, letters: &[Letter]) {
        let n = letters.len();
        for i in 0..n {
            self.add_turn(letters[i], letters[(i + 1) % n]);
        }
    }

    /// Adds the 2-letter subwords of a linear word, without the wrap-around
    /// turn from the last letter back to the first.
    pub fn add_linear(&mut self, letters: &[Letter]) {
        for pair in letters.windows(2) {
            self.add_turn(pair[0], pair[1]);
        }
    }

    /// Superposition of the Whitehead graphs of `words`.
    pub fn from_cyclic_words(rank: usize, words: &[CyclicWord]) -> Result<WhiteheadGraph> {
        let mut g = WhiteheadGraph::new(rank);
        for w in words {
            if w.is_empty() {
                return Err(Error::EmptyWord);
            }
            if let Some(l) = w.letters().iter().find(|l| l.generator() > rank) {
                return Err(Error::LetterOutOfRange { letter: l.code(), rank });
            }
            g.add_cyclic(w.letters());
        }
        Ok(g)
    }

    /// Edges as `(u, v, multiplicity)` with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (Letter, Letter, usize)> + '_ {
        self.edges.iter().map(|(&(a, b), &m)| (a, b, m))
    }

    pub fn multiplicity(&self, u: Letter, v: Letter) -> usize {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.get(&key).copied().unwrap_or(0)
    }

    /// The underlying simple edge set.
    pub fn simple_edges(&self) -> Vec<(Letter, Letter)> {
        self.edges.keys().copied().collect()
    }

    /// Same simple graph, ignoring multiplicities.
    pub fn same_simple_graph(&self, other: &WhiteheadGraph) -> bool {
        self.rank == other.rank && self.edges.keys().eq(other.edges.keys())
    }

    pub fn merge(&mut self, other: &WhiteheadGraph) {
        for (&k, &m) in &other.edges {
            *self.edges.entry(k).or_insert(0) += m;
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); 2 * self.rank];
        for &(a, b) in self.edges.keys() {
            if a != b {
                adj[a.index()].push(b.index());
                adj[b.index()].push(a.index());
            }
        }
        adj
    }

    /// Connected components over all `2n` vertices after deleting `removed`.
    fn components(&self, adj: &[Vec<usize>], removed: Option<usize>) -> Vec<Vec<usize>> {
        let n = adj.len();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] || Some(s) == removed {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                for &t in &adj[comp[i]] {
                    if !seen[t] && Some(t) != removed {
                        seen[t] = true;
                        comp.push(t);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

impl fmt::Display for WhiteheadGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .edges()
            .map(|(a, b, m)| if m == 1 { format!("{a}-{b}") } else { format!("{a}-{b}x{m}") })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Result of connectivity and cut-vertex analysis on the simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutAnalysis {
    /// Connected over all `2n` signed letters; an unused letter is its own
    /// component.
    pub connected: bool,
    /// Connected once unused letters are discarded.
    pub connected_on_support: bool,
    /// Least cut vertex of the support graph, when that graph is connected.
    pub cut_vertex: Option<Letter>,
    pub cut_vertices: Vec<Letter>,
}

pub fn cut_analysis(g: &WhiteheadGraph) -> CutAnalysis {
    let adj = g.adjacency();
    let support: Vec<usize> = (0..adj.len()).filter(|&v| !adj[v].is_empty()).collect();
    let comps = g.components(&adj, None);
    let connected = comps.len() == 1;
    let support_comps = comps.iter().filter(|c| c.len() > 1 || !adj[c[0]].is_empty()).count();
    let connected_on_support = support_comps == 1;
    let mut cut_vertices = Vec::new();
    if connected_on_support {
        for &v in &support {
            let pieces = g
                .components(&adj, Some(v))
                .into_iter()
                .filter(|c| c.iter().any(|&u| !adj[u].is_empty()))
                .count();
            if pieces > 1 {
                cut_vertices.push(Letter::from_index(v));
            }
        }
    }
    CutAnalysis {
        connected,
        connected_on_support,
        cut_vertex: cut_vertices.first().copied(),
        cut_vertices,
    }
}

/// Length-decreasing moves read off a cut vertex `a`.
///
/// For each component `W''` of `W − a` avoiding `a⁻¹` this is
/// `φ_(W''⁻¹ ∪ {a}, a)`; with turns `uv` recorded as edges `(u⁻¹, v)` it
/// strictly shortens the words carrying the graph.
pub fn cut_vertex_moves(g: &WhiteheadGraph, a: Letter) -> Vec<WhiteheadMove> {
    let adj = g.adjacency();
    g.components(&adj, Some(a.index()))
        .into_iter()
        .filter(|c| !c.contains(&a.inverse().index()))
        .filter(|c| c.iter().any(|&u| adj[u].contains(&a.index())))
        .map(|c| {
            WhiteheadMove::new(c.into_iter().map(|i| Letter::from_index(i).inverse()).chain([a]), a)
                .expect("component avoids a⁻¹")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalState {
    /// Combined graph connected without a cut vertex.
    NoCutVertex,
    /// Graph disconnected and no Whitehead move shortens the words.
    DisconnectedMin,
    /// Every word has length 1.
    BasisReached,
}

impl fmt::Display for TerminalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalState::NoCutVertex => "no-cut-vertex",
            TerminalState::DisconnectedMin => "disconnected-min",
            TerminalState::BasisReached => "basis-reached",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub mv: WhiteheadMove,
    pub before: usize,
    pub after: usize,
    /// The move was read off a cut vertex rather than found by search.
    pub from_cut_vertex: bool,
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub final_words: Vec<CyclicWord>,
    pub terminal: TerminalState,
    /// Product of the applied moves; maps the input words to `final_words`.
    pub composite: Automorphism,
}

impl ReductionTrace {
    pub fn final_length(&self) -> usize {
        self.final_words.iter().map(CyclicWord::len).sum()
    }
}

fn total_after(m: &Automorphism, words: &[CyclicWord]) -> usize {
    words.iter().map(|w| m.apply_letters(w.letters()).cyclic_core().len()).sum()
}

/// Picks the move with the largest decrease, ties to the least `(a, A)`.
fn best_move(
    moves: impl IntoIterator<Item = WhiteheadMove>,
    rank: usize,
    words: &[CyclicWord],
    current: usize,
) -> Result<Option<(WhiteheadMove, Automorphism, usize)>> {
    let mut best: Option<(WhiteheadMove, Automorphism, usize)> = None;
    for mv in moves {
        let aut = mv.automorphism(rank)?;
        let len = total_after(&aut, words);
        if len >= current {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bm, _, bl)) => len < *bl || (len == *bl && mv < *bm),
        };
        if better {
            best = Some((mv, aut, len));
        }
    }
    Ok(best)
}

/// Applies length-decreasing Whitehead moves until none exists.
///
/// With a connected graph the move comes from a cut vertex; a connected
/// graph without a cut vertex ends the run. With a disconnected graph every
/// Whitehead move of the rank is tried.
pub fn whitehead_minimize(rank: usize, words: &[CyclicWord]) -> Result<ReductionTrace> {
    if words.is_empty() {
        return Err(Error::Precondition("no words to minimize".into()));
    }
    // validates letters and nonemptiness
    WhiteheadGraph::from_cyclic_words(rank, words)?;
    let mut current: Vec<CyclicWord> = words.to_vec();
    let mut composite = Automorphism::identity(rank);
    let mut steps = Vec::new();
    let all_moves = WhiteheadMove::all(rank);
    let terminal = loop {
        let total: usize = current.iter().map(CyclicWord::len).sum();
        if current.iter().all(|w| w.len() == 1) {
            break TerminalState::BasisReached;
        }
        let g = WhiteheadGraph::from_cyclic_words(rank, &current)?;
        let ca = cut_analysis(&g);
        let (choice, from_cut) = if ca.connected {
            if ca.cut_vertices.is_empty() {
                break TerminalState::NoCutVertex;
            }
            let moves = ca.cut_vertices.iter().flat_map(|&a| cut_vertex_moves(&g, a));
            (best_move(moves, rank, &current, total)?, true)
        } else {
            (best_move(all_moves.iter().cloned(), rank, &current, total)?, false)
        };
        let Some((mv, aut, after)) = choice else {
            if ca.connected {
                return Err(Error::Precondition(format!(
                    "cut vertex of {g} yields no length-decreasing move"
                )));
            }
            break TerminalState::DisconnectedMin;
        };
        current = current
            .iter()
            .map(|w| CyclicWord::new(&aut.apply_letters(w.letters())))
            .collect();
        composite = aut.compose(&composite)?;
        steps.push(ReductionStep { mv, before: total, after, from_cut_vertex: from_cut });
    };
    Ok(ReductionTrace { steps, final_words: current, terminal, composite })
}

/// True iff Whitehead minimization of `{w}` reaches a length-1 word.
pub fn is_primitive(rank: usize, w: &CyclicWord) -> Result<bool> {
    let trace = whitehead_minimize(rank, std::slice::from_ref(w))?;
    Ok(trace.final_words[0].len() == 1)
}

/// Primitivity of a (not necessarily cyclically reduced) element.
pub fn is_primitive_word(rank: usize, w: &Word) -> Result<bool> {
    is_primitive(rank, &CyclicWord::new(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw(s: &str) -> CyclicWord {
        CyclicWord::parse(s).unwrap()
    }

    fn l(c: char) -> Letter {
        Letter::from_char(c).unwrap()
    }

    #[test]
    fn graph_examples() {
        let g = WhiteheadGraph::from_cyclic_words(2, &[cw("xy")]).unwrap();
        assert_eq!(g.simple_edges().len(), 2);
        assert_eq!(g.multiplicity(l('X'), l('y')), 1);
        assert_eq!(g.multiplicity(l('Y'), l('x')), 1);

        let g = WhiteheadGraph::from_cyclic_words(2, &[cw("xyXY")]).unwrap();
        for (a, b) in [('x', 'y'), ('y', 'X'), ('X', 'Y'), ('Y', 'x')] {
            assert_eq!(g.multiplicity(l(a), l(b)), 1, "{a}-{b}");
        }
        assert_eq!(g.simple_edges().len(), 4);

        let g = WhiteheadGraph::from_cyclic_words(2, &[cw("x")]).unwrap();
        assert_eq!(g.simple_edges(), vec![(l('X'), l('x'))]);
    }

    #[test]
    fn graph_rejects_empty_word() {
        assert_eq!(
            WhiteheadGraph::from_cyclic_words(2, &[CyclicWord::default()]),
            Err(Error::EmptyWord)
        );
    }

    #[test]
    fn cut_analysis_examples() {
        let cycle = WhiteheadGraph::from_cyclic_words(2, &[cw("xyXY")]).unwrap();
        let ca = cut_analysis(&cycle);
        assert!(ca.connected && ca.cut_vertex.is_none());

        let two = WhiteheadGraph::from_cyclic_words(2, &[cw("xy")]).unwrap();
        let ca = cut_analysis(&two);
        assert!(!ca.connected && !ca.connected_on_support && ca.cut_vertex.is_none());

        // path x – y – X; the letter Y is unused
        let mut path = WhiteheadGraph::new(2);
        path.add_turn(l('X'), l('y'));
        path.add_turn(l('Y'), l('X'));
        let ca = cut_analysis(&path);
        assert!(!ca.connected);
        assert!(ca.connected_on_support);
        assert_eq!(ca.cut_vertex, Some(l('y')));
    }

    #[test]
    fn minimize_commutator_has_no_steps() {
        let t = whitehead_minimize(2, &[cw("xyXY")]).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.final_length(), 4);
        assert_eq!(t.terminal, TerminalState::NoCutVertex);
    }

    #[test]
    fn minimize_xy_reaches_basis() {
        let t = whitehead_minimize(2, &[cw("xy")]).unwrap();
        assert_eq!(t.steps.len(), 1);
        let expected = WhiteheadMove::new([l('Y'), l('X')], l('X')).unwrap();
        assert_eq!(t.steps[0].mv, expected);
        assert_eq!(t.final_words, vec![cw("y")]);
        assert_eq!(t.terminal, TerminalState::BasisReached);
    }

    #[test]
    fn minimize_square_is_disconnected_min() {
        let t = whitehead_minimize(2, &[cw("xx")]).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.final_length(), 2);
        assert_eq!(t.terminal, TerminalState::DisconnectedMin);
    }

    #[test]
    fn composite_maps_inputs_to_outputs() {
        let input = [cw("xyxYxy"), cw("xxy")];
        let t = whitehead_minimize(2, &input).unwrap();
        for (w, f) in input.iter().zip(&t.final_words) {
            assert_eq!(&t.composite.apply_cyclic(w).unwrap(), f);
        }
    }

    #[test]
    fn primitive_examples() {
        assert!(is_primitive(2, &cw("x")).unwrap());
        assert!(!is_primitive(2, &cw("xyxy")).unwrap());
        assert!(!is_primitive(2, &cw("xyXY")).unwrap());
        assert!(is_primitive(2, &cw("xxxy")).unwrap());
        assert!(is_primitive(3, &cw("xyzxy")).unwrap());
    }

    #[test]
    fn cut_vertex_move_decreases_length() {
        // xxy: graph X–x, X–y, Y–x; x and X are cut vertices.
        // The rank-3 tuple has a path-shaped graph with no inversion symmetry.
        let cases: [(usize, Vec<CyclicWord>); 2] =
            [(2, vec![cw("xxy")]), (3, vec![cw("X"), cw("Y"), cw("XyZ")])];
        for (rank, words) in cases {
            let g = WhiteheadGraph::from_cyclic_words(rank, &words).unwrap();
            let ca = cut_analysis(&g);
            assert!(ca.connected && !ca.cut_vertices.is_empty());
            let len: usize = words.iter().map(CyclicWord::len).sum();
            for &a in &ca.cut_vertices {
                for mv in cut_vertex_moves(&g, a) {
                    let aut = mv.automorphism(rank).unwrap();
                    assert!(total_after(&aut, &words) < len, "{mv}");
                }
            }
        }
    }
}
