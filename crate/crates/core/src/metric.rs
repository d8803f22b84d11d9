//! The asymmetric Lipschitz distance.

use crate::candidates::{enumerate_candidates, CandidateLoop};
use crate::error::{Error, Result};
use crate::free_group::{CyclicWord, Letter, Word};
use crate::graph::{tighten, EdgePath, MarkedGraph, OrientedEdge};
use crate::scalar::Scalar;

/// `ℓ(α, y) / ℓ(α, x)`.
pub fn stretch_factor<S: Scalar>(alpha: &CyclicWord, x: &MarkedGraph<S>, y: &MarkedGraph<S>) -> Result<S> {
    if alpha.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(y.loop_length(alpha) / x.loop_length(alpha))
}

#[derive(Clone, Debug)]
pub struct DistanceResult<S> {
    pub value: S,
    pub witness: CandidateLoop,
    /// Every candidate of the source with its stretch factor.
    pub table: Vec<(CandidateLoop, S)>,
}

fn check_ranks<S: Scalar>(x: &MarkedGraph<S>, y: &MarkedGraph<S>) -> Result<()> {
    if x.rank() != y.rank() {
        return Err(Error::RankMismatch { expected: x.rank(), found: y.rank() });
    }
    Ok(())
}

/// Index of the maximal ratio; among near-ties the least class wins.
fn pick_witness<S: Scalar>(table: &[(CandidateLoop, S)]) -> usize {
    let max = table.iter().map(|t| t.1).fold(S::neg_infinity(), S::max);
    let cutoff = max - S::tolerance() * max.abs().max(S::one());
    (0..table.len())
        .filter(|&i| table[i].1 >= cutoff)
        .min_by(|&i, &j| table[i].0.class.cmp(&table[j].0.class))
        .expect("nonempty table")
}

/// `d(x, y) = log max_α ℓ(α,y)/ℓ(α,x)` over the candidates α of `x`.
pub fn distance<S: Scalar>(x: &MarkedGraph<S>, y: &MarkedGraph<S>) -> Result<DistanceResult<S>> {
    check_ranks(x, y)?;
    let cands = enumerate_candidates(x)?;
    if cands.is_empty() {
        return Err(Error::InvalidGraph("source has no candidate loops".into()));
    }
    let table: Vec<(CandidateLoop, S)> = cands
        .into_iter()
        .map(|c| {
            let num = y.loop_length(&c.class);
            let den = x.graph().path_length(&c.path);
            let r = num / den;
            (c, r)
        })
        .collect();
    let w = pick_witness(&table);
    Ok(DistanceResult { value: table[w].1.ln(), witness: table[w].0.clone(), table })
}

/// Distance value only.
pub fn dist<S: Scalar>(x: &MarkedGraph<S>, y: &MarkedGraph<S>) -> Result<S> {
    check_ranks(x, y)?;
    let cands = enumerate_candidates(x)?;
    Ok(cands
        .iter()
        .map(|c| y.loop_length(&c.class) / x.graph().path_length(&c.path))
        .fold(S::neg_infinity(), S::max)
        .ln())
}

/// Equality of points: zero distance both ways.
pub fn points_equal<S: Scalar>(x: &MarkedGraph<S>, y: &MarkedGraph<S>) -> Result<bool> {
    Ok(dist(x, y)?.abs() <= S::tolerance() && dist(y, x)?.abs() <= S::tolerance())
}

/// Every conjugacy class of length at most `max_len` in its canonical form.
pub fn cyclic_words_up_to(rank: usize, max_len: usize) -> Vec<CyclicWord> {
    let letters: Vec<Letter> = Letter::all(rank).collect();
    let mut out = Vec::new();
    let mut buf = Vec::new();
    fn grow(letters: &[Letter], max_len: usize, buf: &mut Vec<Letter>, out: &mut Vec<CyclicWord>) {
        if !buf.is_empty()
            && buf.first().map(|f| f.inverse()) != buf.last().copied()
            && CyclicWord::is_canonical_letters(buf)
        {
            out.push(CyclicWord::from_letters(buf.iter().copied()));
        }
        if buf.len() == max_len {
            return;
        }
        for &l in letters {
            if buf.last() == Some(&l.inverse()) {
                continue;
            }
            buf.push(l);
            grow(letters, max_len, buf, out);
            buf.pop();
        }
    }
    grow(&letters, max_len, &mut buf, &mut out);
    out
}

/// Brute-force lower bound on the distance: maximal log-stretch over all
/// classes of length at most `max_len`.
pub fn distance_oracle<S: Scalar>(x: &MarkedGraph<S>, y: &MarkedGraph<S>, max_len: usize) -> Result<S> {
    check_ranks(x, y)?;
    if max_len == 0 {
        return Err(Error::Precondition("oracle length bound must be at least 1".into()));
    }
    Ok(cyclic_words_up_to(x.rank(), max_len)
        .iter()
        .map(|a| y.loop_length(a) / x.loop_length(a))
        .fold(S::neg_infinity(), S::max)
        .ln())
}

/// A graph map given by vertex images and edge-image paths.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub vertex_images: Vec<usize>,
    pub edge_images: Vec<EdgePath>,
}

#[derive(Clone, Debug)]
pub struct LipschitzReport<S> {
    pub slopes: Vec<S>,
    pub lip: S,
    /// Edges whose slope attains the Lipschitz constant.
    pub green: Vec<usize>,
}

impl LinearMap {
    /// Image of a path, concatenated and tightened.
    pub fn image(&self, path: &[OrientedEdge]) -> EdgePath {
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

    /// Checks incidences and that the map carries the marking of `x` to the
    /// marking of `y` up to free homotopy, tested on generator loops and
    /// their pairwise products.
    pub fn check<S: Scalar>(&self, x: &MarkedGraph<S>, y: &MarkedGraph<S>) -> Result<()> {
        let (gx, gy) = (x.graph(), y.graph());
        check_ranks(x, y)?;
        if self.vertex_images.len() != gx.vertex_count() || self.edge_images.len() != gx.edge_count() {
            return Err(Error::InconsistentMap("image counts do not match the source graph".into()));
        }
        if self.vertex_images.iter().any(|&v| v >= gy.vertex_count()) {
            return Err(Error::InconsistentMap("vertex image outside the target".into()));
        }
        for (i, img) in self.edge_images.iter().enumerate() {
            let e = gx.edge(i);
            gy.check_path(img).map_err(|err| Error::InconsistentMap(format!("image of {}: {err}", e.name)))?;
            let (start, end) = match (img.first(), img.last()) {
                (Some(&a), Some(&b)) => (gy.origin(a), gy.terminus(b)),
                _ => (self.vertex_images[e.from], self.vertex_images[e.from]),
            };
            if start != self.vertex_images[e.from] || end != self.vertex_images[e.to] {
                return Err(Error::InconsistentMap(format!("image of {} has the wrong endpoints", e.name)));
            }
        }
        // Based words in the target's cotree basis, moved to the target basepoint.
        let (_, tree_paths) = gy.spanning_tree(y.basepoint());
        let tau = &tree_paths[self.vertex_images[x.basepoint()]];
        let mapped: Vec<Word> = x
            .loops()
            .iter()
            .map(|l| {
                let mut p = tau.clone();
                p.extend(self.image(l));
                p.extend(crate::graph::reverse_path(tau));
                y.cotree_word(&tighten(&p))
            })
            .collect();
        let wanted: Vec<Word> = y.loops().iter().map(|l| y.cotree_word(l)).collect();
        let n = mapped.len();
        for i in 0..n {
            for j in i..n {
                let (a, b) = if i == j {
                    (mapped[i].clone(), wanted[i].clone())
                } else {
                    (mapped[i].mul(&mapped[j]), wanted[i].mul(&wanted[j]))
                };
                if !a.is_conjugate_to(&b) {
                    return Err(Error::InconsistentMap(format!(
                        "map does not carry generator loop {} to the target marking",
                        Letter::new(i + 1, false)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Slopes of the map on each edge and its Lipschitz constant.
    pub fn lipschitz<S: Scalar>(&self, x: &MarkedGraph<S>, y: &MarkedGraph<S>) -> Result<LipschitzReport<S>> {
        self.check(x, y)?;
        let slopes: Vec<S> = (0..x.graph().edge_count())
            .map(|e| {
                let img = y.graph().path_length(&tighten(&self.edge_images[e]));
                let l = x.graph().length(e);
                if l > S::zero() {
                    img / l
                } else if img > S::zero() {
                    S::infinity()
                } else {
                    S::zero()
                }
            })
            .collect();
        let lip = slopes.iter().copied().fold(S::zero(), S::max);
        let cutoff = lip - S::tolerance() * lip.max(S::one());
        let green = (0..slopes.len()).filter(|&e| slopes[e] >= cutoff).collect();
        Ok(LipschitzReport { slopes, lip, green })
    }
}

/// Convenience wrapper for [`LinearMap::lipschitz`].
pub fn linear_map_lipschitz<S: Scalar>(
    map: &LinearMap,
    x: &MarkedGraph<S>,
    y: &MarkedGraph<S>,
) -> Result<LipschitzReport<S>> {
    map.lipschitz(x, y)
}
