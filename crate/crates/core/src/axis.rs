//! Discrete axes `{G·φ^m}` of train-track automorphisms, length profiles
//! and closest-point projections.

use std::collections::BTreeMap;
use std::sync::RwLock;

use crate::candidates::enumerate_candidates;
use crate::error::{Error, Result};
use crate::free_group::{verify_inverse_outer, Automorphism, CyclicWord};
use crate::graph::MarkedGraph;
use crate::scalar::Scalar;
use crate::train_track::TrainTrackMap;

/// Limits on how far along an axis words are iterated.
#[derive(Clone, Copy, Debug)]
pub struct AxisBudget {
    pub max_power: i64,
    pub max_letters: usize,
}

impl Default for AxisBudget {
    fn default() -> Self {
        AxisBudget { max_power: 60, max_letters: 2_000_000 }
    }
}

/// Images `φ^m(c)` of one class, grown lazily in both directions.
#[derive(Clone, Debug)]
struct Orbit {
    forward: Vec<CyclicWord>,
    backward: Vec<CyclicWord>,
}

impl Orbit {
    fn new(c: CyclicWord) -> Orbit {
        Orbit { forward: vec![c.clone()], backward: vec![c] }
    }

    fn at<S: Scalar>(&mut self, ax: &Axis<S>, m: i64) -> Result<&CyclicWord> {
        ax.check_power(m)?;
        let (list, map) = if m >= 0 { (&mut self.forward, &ax.phi) } else { (&mut self.backward, &ax.phi_inv) };
        let k = m.unsigned_abs() as usize;
        while list.len() <= k {
            let next = map.apply_cyclic(list.last().expect("seeded"))?;
            if next.len() > ax.budget.max_letters {
                return Err(Error::BudgetExceeded(format!(
                    "orbit word exceeds {} letters at power {m}",
                    ax.budget.max_letters
                )));
            }
            list.push(next);
        }
        Ok(&list[k])
    }
}

/// A discrete axis through the points `G_m = G·φ^m`.
#[derive(Debug)]
pub struct Axis<S> {
    forward: TrainTrackMap<S>,
    backward: Option<TrainTrackMap<S>>,
    phi: Automorphism,
    phi_inv: Automorphism,
    lambda: S,
    budget: AxisBudget,
    /// Candidate classes of the base with their base lengths.
    base_candidates: Vec<(CyclicWord, S)>,
    powers: RwLock<BTreeMap<i64, Automorphism>>,
}

impl<S: Scalar> Clone for Axis<S> {
    fn clone(&self) -> Self {
        Axis {
            forward: self.forward.clone(),
            backward: self.backward.clone(),
            phi: self.phi.clone(),
            phi_inv: self.phi_inv.clone(),
            lambda: self.lambda,
            budget: self.budget,
            base_candidates: self.base_candidates.clone(),
            powers: RwLock::new(self.powers.read().expect("cache lock").clone()),
        }
    }
}

/// Length of a class along the axis over a window of powers.
#[derive(Clone, Debug)]
pub struct LengthProfile<S> {
    pub alpha: CyclicWord,
    pub window: (i64, i64),
    pub values: Vec<(i64, S)>,
    pub min_set: Vec<i64>,
    /// False when the minimum sits on the window boundary.
    pub interior: bool,
    /// Least-squares slope of `log ℓ` against `m` on the right tail.
    pub right_slope: Option<S>,
    /// Slope of `log ℓ` against `−m` on the left tail.
    pub left_slope: Option<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult<S> {
    pub argmin: Vec<i64>,
    pub value: S,
    /// Spread of the argmin set, in fundamental domains.
    pub diam: i64,
    pub window: (i64, i64),
    /// False if the scanned distances were not coarsely unimodal.
    pub unimodal: bool,
}

impl<S> ProjectionResult<S> {
    /// The least minimizing power.
    pub fn m(&self) -> i64 {
        self.argmin[0]
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope<S: Scalar>(xs: &[S], ys: &[S]) -> Option<S> {
    if xs.len() < 2 {
        return None;
    }
    let n = S::lit(xs.len() as f64);
    let mx = xs.iter().copied().sum::<S>() / n;
    let my = ys.iter().copied().sum::<S>() / n;
    let sxx: S = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: S = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    if sxx <= S::zero() {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn argmin_set<S: Scalar>(values: &[(i64, S)]) -> (Vec<i64>, S) {
    let best = values.iter().map(|v| v.1).fold(S::infinity(), S::min);
    let tol = S::tolerance() * best.abs().max(S::one());
    (values.iter().filter(|v| v.1 <= best + tol).map(|v| v.0).collect(), best)
}

impl<S: Scalar> Axis<S> {
    /// Axis of the automorphism represented by `forward`; `backward`, when
    /// given, must represent its inverse.
    pub fn new(forward: TrainTrackMap<S>, backward: Option<TrainTrackMap<S>>) -> Result<Axis<S>> {
        Axis::with_budget(forward, backward, AxisBudget::default())
    }

    pub fn with_budget(
        forward: TrainTrackMap<S>,
        backward: Option<TrainTrackMap<S>>,
        budget: AxisBudget,
    ) -> Result<Axis<S>> {
        let phi = forward.automorphism().clone();
        if let Some(b) = &backward {
            if !verify_inverse_outer(&phi, b.automorphism())? {
                return Err(Error::Precondition("backward map does not represent the inverse".into()));
            }
        }
        let phi_inv = phi.inverse()?;
        let lambda = forward.lambda();
        let base = forward.point();
        let base_candidates = enumerate_candidates(base)?
            .into_iter()
            .map(|c| {
                let l = base.graph().path_length(&c.path);
                (c.class, l)
            })
            .collect();
        let mut powers = BTreeMap::new();
        powers.insert(0, Automorphism::identity(base.rank()).with_inverse(&Automorphism::identity(base.rank()))?);
        powers.insert(1, phi.clone());
        powers.insert(-1, phi_inv.clone());
        Ok(Axis {
            forward,
            backward,
            phi,
            phi_inv,
            lambda,
            budget,
            base_candidates,
            powers: RwLock::new(powers),
        })
    }

    /// The axis `{G·g·(g⁻¹φg)^m} = {G_m·g}`.
    pub fn translate(&self, g: &Automorphism) -> Result<Axis<S>> {
        let forward = self.forward.remarked(g)?;
        let backward = match &self.backward {
            Some(b) => Some(b.remarked(g)?),
            None => None,
        };
        Axis::with_budget(forward, backward, self.budget)
    }

    pub fn base(&self) -> &MarkedGraph<S> {
        self.forward.point()
    }

    pub fn forward(&self) -> &TrainTrackMap<S> {
        &self.forward
    }

    pub fn backward(&self) -> Option<&TrainTrackMap<S>> {
        self.backward.as_ref()
    }

    pub fn phi(&self) -> &Automorphism {
        &self.phi
    }

    pub fn phi_inv(&self) -> &Automorphism {
        &self.phi_inv
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    /// Length of one fundamental domain, `log λ`.
    pub fn step(&self) -> S {
        self.lambda.ln()
    }

    pub fn budget(&self) -> AxisBudget {
        self.budget
    }

    pub fn base_candidates(&self) -> &[(CyclicWord, S)] {
        &self.base_candidates
    }

    fn check_power(&self, m: i64) -> Result<()> {
        if m.abs() > self.budget.max_power {
            return Err(Error::BudgetExceeded(format!("power {m} beyond the axis budget")));
        }
        Ok(())
    }

    /// `φ^m` as a verified automorphism, cached.
    pub fn power(&self, m: i64) -> Result<Automorphism> {
        self.check_power(m)?;
        if let Some(p) = self.powers.read().expect("cache lock").get(&m) {
            return Ok(p.clone());
        }
        let step = if m > 0 { &self.phi } else { &self.phi_inv };
        let prev = self.power(m - m.signum())?;
        let next = prev.compose(step)?;
        let letters: usize = next.images().iter().map(|w| w.len()).sum();
        if letters > self.budget.max_letters {
            return Err(Error::BudgetExceeded(format!("φ^{m} exceeds {} letters", self.budget.max_letters)));
        }
        self.powers.write().expect("cache lock").insert(m, next.clone());
        Ok(next)
    }

    /// `G_m = G·φ^m`.
    pub fn axis_point(&self, m: i64) -> Result<MarkedGraph<S>> {
        self.base().act(&self.power(m)?)
    }

    /// `ℓ(α, G_m) = ℓ(φ^m(α), G)`.
    pub fn length_at(&self, alpha: &CyclicWord, m: i64) -> Result<S> {
        let mut orbit = Orbit::new(alpha.clone());
        let w = orbit.at(self, m)?;
        Ok(self.base().loop_length(w))
    }

    /// `d(G_a, G_b)`.
    pub fn distance_between(&self, a: i64, b: i64) -> Result<S> {
        let k = b - a;
        let mut best = S::neg_infinity();
        for (c, l) in &self.base_candidates {
            let mut orbit = Orbit::new(c.clone());
            let w = orbit.at(self, k)?;
            best = best.max(self.base().loop_length(w) / *l);
        }
        Ok(best.ln())
    }

    /// `d(G_m, X)`.
    pub fn distance_from_axis(&self, m: i64, x: &MarkedGraph<S>) -> Result<S> {
        let mut best = S::neg_infinity();
        for (c, l) in &self.base_candidates {
            let mut orbit = Orbit::new(c.clone());
            let w = orbit.at(self, -m)?;
            best = best.max(x.loop_length(w) / *l);
        }
        Ok(best.ln())
    }

    /// `d(X, G_m)`.
    pub fn distance_to_axis(&self, x: &MarkedGraph<S>, m: i64) -> Result<S> {
        self.scanner(x)?.distance(self, m)
    }

    /// `m ↦ ℓ(α, G_m)` over `[lo, hi]`.
    pub fn length_profile(&self, alpha: &CyclicWord, lo: i64, hi: i64) -> Result<LengthProfile<S>> {
        if alpha.is_empty() {
            return Err(Error::EmptyWord);
        }
        if lo > hi {
            return Err(Error::Precondition("empty window".into()));
        }
        let mut orbit = Orbit::new(alpha.clone());
        let mut values = Vec::new();
        for m in lo..=hi {
            let w = orbit.at(self, m)?;
            values.push((m, self.base().loop_length(w)));
        }
        let (min_set, _) = argmin_set(&values);
        let interior = min_set.iter().all(|&m| m > lo && m < hi);
        let tail = |pts: Vec<(i64, S)>, sign: S| -> Option<S> {
            let xs: Vec<S> = pts.iter().map(|p| sign * S::lit(p.0 as f64)).collect();
            let ys: Vec<S> = pts.iter().map(|p| p.1.ln()).collect();
            fit_slope(&xs, &ys)
        };
        let right: Vec<(i64, S)> = values.iter().copied().filter(|v| v.0 >= hi.max(1) / 2 && v.0 > 0).collect();
        let left: Vec<(i64, S)> = values.iter().copied().filter(|v| v.0 <= lo.min(-1) / 2 && v.0 < 0).collect();
        Ok(LengthProfile {
            alpha: alpha.clone(),
            window: (lo, hi),
            values,
            min_set,
            interior,
            right_slope: tail(right, S::one()),
            left_slope: tail(left, -S::one()),
        })
    }

    /// Expansion factor of `φ⁻¹`: from the backward map when available,
    /// otherwise fitted from left-tail profile slopes of the base candidates.
    pub fn mu(&self) -> Result<S> {
        if let Some(b) = &self.backward {
            return Ok(b.lambda());
        }
        let mut slopes = Vec::new();
        for (c, _) in &self.base_candidates {
            if let Some(s) = self.length_profile(c, -10, 0)?.left_slope {
                slopes.push(s);
            }
        }
        let n = S::lit(slopes.len().max(1) as f64);
        Ok((slopes.into_iter().sum::<S>() / n).exp())
    }

    fn scanner(&self, x: &MarkedGraph<S>) -> Result<Scanner<S>> {
        if x.rank() != self.base().rank() {
            return Err(Error::RankMismatch { expected: self.base().rank(), found: x.rank() });
        }
        let cands = enumerate_candidates(x)?
            .into_iter()
            .map(|c| {
                let l = x.graph().path_length(&c.path);
                (Orbit::new(c.class), l)
            })
            .collect();
        Ok(Scanner { cands, cache: BTreeMap::new() })
    }

    /// Closest axis points to `X` in the sense `min_m d(X, G_m)`.
    pub fn project(&self, x: &MarkedGraph<S>) -> Result<ProjectionResult<S>> {
        self.project_near(x, 0)
    }

    /// Projection with the scan started around `guess`.
    pub fn project_near(&self, x: &MarkedGraph<S>, guess: i64) -> Result<ProjectionResult<S>> {
        const MARGIN: i64 = 2;
        let mut sc = self.scanner(x)?;
        let cap = self.budget.max_power;
        let mut lo = (guess - 3).max(-cap);
        let mut hi = (guess + 3).min(cap);
        let mut grow = 2;
        loop {
            for m in lo..=hi {
                sc.distance(self, m)?;
            }
            let values: Vec<(i64, S)> = (lo..=hi).map(|m| (m, sc.cache[&m])).collect();
            let (argmin, value) = argmin_set(&values);
            let first = argmin[0];
            let last = *argmin.last().expect("nonempty");
            let low_ok = first - lo >= MARGIN || lo == -cap;
            let high_ok = hi - last >= MARGIN || hi == cap;
            if low_ok && high_ok {
                if first - lo < MARGIN || hi - last < MARGIN {
                    return Err(Error::BudgetExceeded("projection minimum is not interior within the budget".into()));
                }
                let unimodal = is_coarsely_unimodal(&values, first, last);
                return Ok(ProjectionResult { argmin, value, diam: last - first, window: (lo, hi), unimodal });
            }
            if !low_ok {
                lo = (lo - grow).max(-cap);
            }
            if !high_ok {
                hi = (hi + grow).min(cap);
            }
            grow *= 2;
        }
    }
}

fn is_coarsely_unimodal<S: Scalar>(values: &[(i64, S)], first: i64, last: i64) -> bool {
    let tol = S::tolerance();
    values.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        if b.0 <= first {
            b.1 <= a.1 + tol
        } else if a.0 >= last {
            b.1 + tol >= a.1
        } else {
            true
        }
    })
}

/// Memoized `m ↦ d(X, G_m)` for one point.
struct Scanner<S> {
    cands: Vec<(Orbit, S)>,
    cache: BTreeMap<i64, S>,
}

impl<S: Scalar> Scanner<S> {
    fn distance(&mut self, ax: &Axis<S>, m: i64) -> Result<S> {
        if let Some(&d) = self.cache.get(&m) {
            return Ok(d);
        }
        let mut best = S::neg_infinity();
        for (orbit, l) in &mut self.cands {
            let w = orbit.at(ax, m)?;
            best = best.max(ax.base().loop_length(w) / *l);
        }
        let d = best.ln();
        self.cache.insert(m, d);
        Ok(d)
    }
}
