//! Seeded Monte-Carlo experiments around an axis: contraction of balls,
//! Morse-type stability, projection inequalities, divergence of avoiding
//! paths and projections between axes.
//!
//! Samples run in parallel; sample `i` of a run with seed `s` draws from its
//! own ChaCha stream `(s, i)` and records are returned in sample order, so
//! output is independent of the thread count.

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::axis::Axis;
use crate::candidates::enumerate_candidates;
use crate::error::{Error, Result};
use crate::free_group::Automorphism;
use crate::graph::MarkedGraph;
use crate::metric::dist;
use crate::points::{jitter_lengths, random_automorphism, random_point_from, random_template_point};
use crate::scalar::{fmt_sig, Scalar};

/// RNG stream for one sample of a seeded run.
pub fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

fn f(v: impl Into<f64>) -> String {
    fmt_sig(v.into())
}

/// Shortest candidate loop of a point.
pub fn systole<S: Scalar>(p: &MarkedGraph<S>) -> Result<S> {
    Ok(enumerate_candidates(p)?
        .iter()
        .map(|c| p.graph().path_length(&c.path))
        .fold(S::infinity(), S::min))
}

/// A random point near the axis: a random template point moved by a few
/// Whitehead moves, then translated to `G_shift` by `φ^shift`.
#[derive(Clone, Debug)]
pub struct NearAxisSample<S> {
    pub point: MarkedGraph<S>,
    pub moves: usize,
    pub shift: i64,
}

impl<S> NearAxisSample<S> {
    pub fn describe(&self) -> String {
        format!("moves={};shift={}", self.moves, self.shift)
    }
}

pub fn near_axis_point<S: Scalar, R: Rng>(
    ax: &Axis<S>,
    rng: &mut R,
    max_moves: usize,
    jitter: f64,
    shift_range: (i64, i64),
) -> Result<NearAxisSample<S>> {
    let moves = rng.gen_range(0..=max_moves);
    let z = random_template_point::<S, R>(ax.base().rank(), moves, jitter, rng)?;
    let shift = rng.gen_range(shift_range.0..=shift_range.1);
    Ok(NearAxisSample { point: z.act(&ax.power(shift)?)?, moves, shift })
}

/// Symmetrized distance `max(d(a,b), d(b,a))`.
pub fn sym_dist<S: Scalar>(a: &MarkedGraph<S>, b: &MarkedGraph<S>) -> Result<S> {
    Ok(dist(a, b)?.max(dist(b, a)?))
}

// ---------------------------------------------------------------- balls mode

#[derive(Clone, Debug)]
pub struct BallsConfig {
    pub samples: usize,
    /// Centers with `d(Y, π(Y))` above this are redrawn.
    pub radius_budget: f64,
    pub ball_points: usize,
    pub max_attempts: usize,
    pub center_moves: usize,
    pub point_moves: usize,
    pub jitter: f64,
}

impl Default for BallsConfig {
    fn default() -> Self {
        BallsConfig {
            samples: 100,
            radius_budget: 1.5,
            ball_points: 8,
            max_attempts: 400,
            center_moves: 4,
            point_moves: 3,
            jitter: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallRecord {
    pub seed: u64,
    pub sample: u64,
    pub r: f64,
    pub n_ball_points: usize,
    pub proj_diam_m: Option<i64>,
    pub proj_diam_dist: Option<f64>,
    pub skipped: Option<String>,
}

impl BallRecord {
    pub const HEADER: &'static str = "seed,sample,r,n_ball_points,proj_diam_m,proj_diam_dist";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.seed,
            self.sample,
            f(self.r),
            self.n_ball_points,
            self.proj_diam_m.map(|m| m.to_string()).unwrap_or_default(),
            self.proj_diam_dist.map(f).unwrap_or_default()
        )
    }
}

/// Projects points of the ball `{X : d(Y,X) < r}`, `r = d(Y, π(Y))`, and
/// records the spread of their projections.
pub fn ball_record<S: Scalar, R: Rng>(
    ax: &Axis<S>,
    y: &MarkedGraph<S>,
    seed: u64,
    sample: u64,
    cfg: &BallsConfig,
    rng: &mut R,
) -> Result<BallRecord> {
    let py = ax.project(y)?;
    let r = py.value;
    if r <= S::lit(1e-9) {
        info!("sample {sample}: center lies on the axis (r=0), skipped");
        return Ok(BallRecord {
            seed,
            sample,
            r: r.as_f64(),
            n_ball_points: 0,
            proj_diam_m: None,
            proj_diam_dist: None,
            skipped: Some("r=0".into()),
        });
    }
    let (mut lo, mut hi) = (py.argmin[0], *py.argmin.last().expect("nonempty"));
    let mut accepted = 0;
    for _ in 0..cfg.max_attempts {
        if accepted == cfg.ball_points {
            break;
        }
        let moves = rng.gen_range(1..=cfg.point_moves);
        let x = random_point_from(y, moves, cfg.jitter, rng)?;
        if dist(y, &x)? < r {
            let px = ax.project_near(&x, py.m())?;
            lo = lo.min(px.argmin[0]);
            hi = hi.max(*px.argmin.last().expect("nonempty"));
            accepted += 1;
        }
    }
    Ok(BallRecord {
        seed,
        sample,
        r: r.as_f64(),
        n_ball_points: accepted,
        proj_diam_m: Some(hi - lo),
        proj_diam_dist: Some((S::lit((hi - lo) as f64) * ax.step()).as_f64()),
        skipped: None,
    })
}

fn balls_sample<S: Scalar>(ax: &Axis<S>, seed: u64, sample: u64, cfg: &BallsConfig) -> Result<BallRecord> {
    let mut rng = sample_rng(seed, sample);
    for _ in 0..cfg.max_attempts {
        let y = near_axis_point(ax, &mut rng, cfg.center_moves, cfg.jitter, (-3, 3))?.point;
        let r = ax.project(&y)?.value;
        if r.as_f64() <= cfg.radius_budget {
            return ball_record(ax, &y, seed, sample, cfg, &mut rng);
        }
    }
    info!("sample {sample}: no center within the radius budget, skipped");
    Ok(BallRecord {
        seed,
        sample,
        r: 0.0,
        n_ball_points: 0,
        proj_diam_m: None,
        proj_diam_dist: None,
        skipped: Some("no center within radius budget".into()),
    })
}

pub fn balls_experiment<S: Scalar>(ax: &Axis<S>, seed: u64, cfg: &BallsConfig) -> Result<Vec<BallRecord>> {
    if cfg.samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    (0..cfg.samples as u64).into_par_iter().map(|i| balls_sample(ax, seed, i, cfg)).collect()
}

/// Largest recorded projection diameter (distance units).
pub fn max_projection_diameter(records: &[BallRecord]) -> f64 {
    records.iter().filter_map(|r| r.proj_diam_dist).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- morse mode

#[derive(Clone, Debug)]
pub struct MorseConfig {
    pub samples: usize,
    pub length: i64,
    pub moves: usize,
    pub jitter: f64,
}

impl Default for MorseConfig {
    fn default() -> Self {
        MorseConfig { samples: 20, length: 6, moves: 1, jitter: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorseRecord {
    pub seed: u64,
    pub sample: u64,
    pub n_points: usize,
    pub max_dist: f64,
    pub hausdorff: f64,
}

impl MorseRecord {
    pub const HEADER: &'static str = "seed,sample,n_points,max_dist,hausdorff";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.seed, self.sample, self.n_points, f(self.max_dist), f(self.hausdorff))
    }
}

fn morse_sample<S: Scalar>(ax: &Axis<S>, seed: u64, sample: u64, cfg: &MorseConfig) -> Result<MorseRecord> {
    let mut rng = sample_rng(seed, sample);
    let mut path = Vec::new();
    for j in 0..=cfg.length {
        // endpoints are axis points, the interior is perturbed
        let z = if j == 0 || j == cfg.length {
            ax.base().clone()
        } else {
            random_point_from(ax.base(), rng.gen_range(0..=cfg.moves), cfg.jitter, &mut rng)?
        };
        path.push(z.act(&ax.power(j)?)?);
    }
    let axis: Vec<MarkedGraph<S>> = (0..=cfg.length).map(|m| ax.axis_point(m)).collect::<Result<_>>()?;
    let mut max_dist = S::zero();
    let mut h1 = S::zero();
    let mut d = vec![vec![S::zero(); axis.len()]; path.len()];
    for (i, p) in path.iter().enumerate() {
        max_dist = max_dist.max(ax.project(p)?.value);
        for (j, g) in axis.iter().enumerate() {
            d[i][j] = sym_dist(p, g)?;
        }
        h1 = h1.max(d[i].iter().copied().fold(S::infinity(), S::min));
    }
    let h2 = (0..axis.len())
        .map(|j| (0..path.len()).map(|i| d[i][j]).fold(S::infinity(), S::min))
        .fold(S::zero(), S::max);
    Ok(MorseRecord {
        seed,
        sample,
        n_points: path.len(),
        max_dist: max_dist.as_f64(),
        hausdorff: h1.max(h2).as_f64(),
    })
}

pub fn morse_experiment<S: Scalar>(ax: &Axis<S>, seed: u64, cfg: &MorseConfig) -> Result<Vec<MorseRecord>> {
    if cfg.samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    (0..cfg.samples as u64).into_par_iter().map(|i| morse_sample(ax, seed, i, cfg)).collect()
}

// ------------------------------------------------------ projection inequalities

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeValues {
    /// `d(Y,X) − [d(Y,π(Y)) + d(π(Y),π(X))]`
    pub delta1: f64,
    /// `d(Y,X) − d(Y,π(X))`
    pub delta2: f64,
    /// `d(X,Y) − d(π(X),π(Y))`
    pub delta3: f64,
    /// Separation of the projections in fundamental domains.
    pub sep: i64,
}

pub fn tree_inequality_probe<S: Scalar>(x: &MarkedGraph<S>, y: &MarkedGraph<S>, ax: &Axis<S>) -> Result<ProbeValues> {
    let px = ax.project(x)?;
    let py = ax.project(y)?;
    let (mx, my) = (px.m(), py.m());
    let d_yx = dist(y, x)?;
    let d_xy = dist(x, y)?;
    let d1 = d_yx - (py.value + ax.distance_between(my, mx)?);
    let d2 = d_yx - ax.distance_to_axis(y, mx)?;
    let d3 = d_xy - ax.distance_between(mx, my)?;
    Ok(ProbeValues { delta1: d1.as_f64(), delta2: d2.as_f64(), delta3: d3.as_f64(), sep: (mx - my).abs() })
}

#[derive(Clone, Debug)]
pub struct ProbeConfig {
    pub pairs: usize,
    /// Pairs whose projections are at most this many domains apart are redrawn.
    pub min_sep: i64,
    pub moves: usize,
    pub jitter: f64,
    /// Points with a loop shorter than this are redrawn.
    pub thickness: f64,
    pub max_attempts: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { pairs: 200, min_sep: 3, moves: 2, jitter: 0.3, thickness: 0.05, max_attempts: 200 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRecord {
    pub seed: u64,
    pub xdesc: String,
    pub ydesc: String,
    pub values: ProbeValues,
}

impl ProbeRecord {
    pub const HEADER: &'static str = "seed,xdesc,ydesc,sep,delta1,delta2,delta3";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.seed,
            self.xdesc,
            self.ydesc,
            self.values.sep,
            f(self.values.delta1),
            f(self.values.delta2),
            f(self.values.delta3)
        )
    }
}

fn thick_sample<S: Scalar, R: Rng>(
    ax: &Axis<S>,
    rng: &mut R,
    cfg: &ProbeConfig,
    shifts: (i64, i64),
) -> Result<NearAxisSample<S>> {
    for _ in 0..cfg.max_attempts {
        let s = near_axis_point(ax, rng, cfg.moves, cfg.jitter, shifts)?;
        if systole(&s.point)?.as_f64() >= cfg.thickness {
            return Ok(s);
        }
    }
    Err(Error::BudgetExceeded("no thick sample found".into()))
}

fn probe_sample<S: Scalar>(ax: &Axis<S>, seed: u64, sample: u64, cfg: &ProbeConfig) -> Result<ProbeRecord> {
    let mut rng = sample_rng(seed, sample);
    let spread = cfg.min_sep + 4;
    for _ in 0..cfg.max_attempts {
        let x = thick_sample(ax, &mut rng, cfg, (-spread, spread))?;
        let y = thick_sample(ax, &mut rng, cfg, (-spread, spread))?;
        let values = tree_inequality_probe(&x.point, &y.point, ax)?;
        if values.sep > cfg.min_sep {
            return Ok(ProbeRecord { seed, xdesc: x.describe(), ydesc: y.describe(), values });
        }
    }
    Err(Error::BudgetExceeded(format!("no pair separated by more than {} domains", cfg.min_sep)))
}

pub fn probe_experiment<S: Scalar>(ax: &Axis<S>, seed: u64, cfg: &ProbeConfig) -> Result<Vec<ProbeRecord>> {
    (0..cfg.pairs as u64).into_par_iter().map(|i| probe_sample(ax, seed, i, cfg)).collect()
}

/// Empirical constants `c_k = max(0, −min δ_k)`.
pub fn probe_constants(records: &[ProbeRecord]) -> [f64; 3] {
    let min = |g: fn(&ProbeValues) -> f64| records.iter().map(|r| g(&r.values)).fold(f64::INFINITY, f64::min);
    [
        (-min(|v| v.delta1)).max(0.0),
        (-min(|v| v.delta2)).max(0.0),
        (-min(|v| v.delta3)).max(0.0),
    ]
}

// ------------------------------------------------------------------ divergence

#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceResult {
    pub avoids_ball: bool,
    /// Sum of consecutive step distances.
    pub length: f64,
    /// `R²/(2b′) − R/2`
    pub bound: f64,
    /// The bound is not positive, so it says nothing.
    pub vacuous: bool,
    /// `None` when the path meets the ball and the check is skipped.
    pub satisfied: Option<bool>,
    pub min_dist_to_center: f64,
    pub center: i64,
}

pub fn divergence_bound(r: f64, b_prime: f64) -> f64 {
    r * r / (2.0 * b_prime) - r / 2.0
}

/// Checks a path whose endpoints project at least `2R` apart against the
/// quadratic lower bound, provided it avoids `{p : d(p, z) < R}` for the
/// axis point `z` halfway between the endpoint projections.
pub fn divergence_check<S: Scalar>(
    path: &[MarkedGraph<S>],
    ax: &Axis<S>,
    r: f64,
    b_prime: f64,
) -> Result<DivergenceResult> {
    let (first, last) = match (path.first(), path.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Precondition("empty path".into())),
    };
    let a = ax.project(first)?.m();
    let b = ax.project_near(last, a)?.m();
    let (lo, hi) = (a.min(b), a.max(b));
    let sep = ax.distance_between(lo, hi)?;
    if sep.as_f64() < 2.0 * r - 1e-9 {
        return Err(Error::Precondition(format!(
            "endpoint projections are {} apart, less than 2R = {}",
            fmt_sig(sep.as_f64()),
            fmt_sig(2.0 * r)
        )));
    }
    let center = lo + (hi - lo) / 2;
    let z = ax.axis_point(center)?;
    let mut min_d = f64::INFINITY;
    for p in path {
        min_d = min_d.min(dist(p, &z)?.as_f64());
    }
    let avoids_ball = min_d >= r;
    let mut length = 0.0;
    for w in path.windows(2) {
        length += dist(&w[0], &w[1])?.as_f64();
    }
    let bound = divergence_bound(r, b_prime);
    Ok(DivergenceResult {
        avoids_ball,
        length,
        bound,
        vacuous: bound <= 0.0,
        satisfied: avoids_ball.then_some(length >= bound),
        min_dist_to_center: min_d,
        center,
    })
}

/// The axis points `G_a, ..., G_b`.
pub fn axis_path<S: Scalar>(ax: &Axis<S>, a: i64, b: i64) -> Result<Vec<MarkedGraph<S>>> {
    let step = if b >= a { 1 } else { -1 };
    let mut out = Vec::new();
    let mut m = a;
    loop {
        out.push(ax.axis_point(m)?);
        if m == b {
            return Ok(out);
        }
        m += step;
    }
}

fn interpolate<S: Scalar>(p: &MarkedGraph<S>, from: &[S], to: &[S], steps: usize) -> Result<Vec<MarkedGraph<S>>> {
    (0..=steps)
        .map(|i| {
            let t = S::lit(i as f64 / steps as f64);
            let l: Vec<S> = from.iter().zip(to).map(|(&a, &b)| (S::one() - t) * a + t * b).collect();
            Ok(p.with_lengths(&l)?.normalized())
        })
        .collect()
}

/// A path from `G_{−k}` to `G_k` that leaves the axis through a thin part
/// of Outer Space: one edge is shrunk to length `ε`, the thin point is
/// pushed along by powers of `φ`, then the edge grows back.
pub fn detour_path<S: Scalar, R: Rng>(ax: &Axis<S>, r: f64, rng: &mut R, steps: usize) -> Result<Vec<MarkedGraph<S>>> {
    let k_fwd = (r / ax.step().as_f64()).ceil() as i64;
    let k_back = (r / ax.mu()?.ln().as_f64()).ceil() as i64;
    let k = k_fwd.max(k_back).max(1);
    let base = ax.base();
    let lengths = base.graph().lengths();
    let e = rng.gen_range(0..lengths.len());
    let eps = S::lit((-(r + rng.gen_range(1.0..3.0))).exp());
    let mut thin = lengths.clone();
    let rest: S = lengths.iter().enumerate().filter(|&(i, _)| i != e).map(|(_, &l)| l).sum();
    for (i, l) in thin.iter_mut().enumerate() {
        *l = if i == e { eps } else { *l * (S::one() - eps) / rest };
    }
    let start = ax.axis_point(-k)?;
    let mut path = interpolate(&start, &lengths, &thin, steps)?;
    let thin_base = base.with_lengths(&thin)?;
    for m in (-k + 1)..=k {
        path.push(thin_base.act(&ax.power(m)?)?);
    }
    let end = ax.axis_point(k)?;
    path.extend(interpolate(&end, &thin, &lengths, steps)?.into_iter().skip(1));
    Ok(path)
}

#[derive(Clone, Debug)]
pub struct DivergenceRecord {
    pub seed: u64,
    pub sample: u64,
    pub r: f64,
    pub result: DivergenceResult,
}

impl DivergenceRecord {
    pub const HEADER: &'static str = "seed,sample,R,avoids_ball,length,bound,vacuous,satisfied";

    pub fn csv_row(&self) -> String {
        let res = &self.result;
        format!(
            "{},{},{},{},{},{},{},{}",
            self.seed,
            self.sample,
            f(self.r),
            res.avoids_ball,
            f(res.length),
            f(res.bound),
            res.vacuous,
            res.satisfied.map(|s| s.to_string()).unwrap_or_default()
        )
    }
}

pub fn divergence_experiment<S: Scalar>(
    ax: &Axis<S>,
    seed: u64,
    radii: &[f64],
    samples_per_radius: usize,
    b_prime: f64,
) -> Result<Vec<DivergenceRecord>> {
    let jobs: Vec<(u64, f64)> = radii
        .iter()
        .enumerate()
        .flat_map(|(ri, &r)| (0..samples_per_radius).map(move |i| ((ri * samples_per_radius + i) as u64, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(sample, r)| {
            let mut rng = sample_rng(seed, sample);
            let steps = rng.gen_range(4..=10);
            let path = detour_path(ax, r, &mut rng, steps)?;
            Ok(DivergenceRecord { seed, sample, r, result: divergence_check(&path, ax, r, b_prime)? })
        })
        .collect()
}

// ----------------------------------------------------------------- two axes

/// Projections onto `a` of the points `B_j`, `|j| ≤ window`, as the least
/// and greatest minimizing powers.
pub fn projection_range<S: Scalar>(a: &Axis<S>, b: &Axis<S>, window: i64) -> Result<(i64, i64)> {
    let ms: Vec<(i64, i64)> = (-window..=window)
        .into_par_iter()
        .map(|j| {
            let p = a.project(&b.axis_point(j)?)?;
            Ok((p.argmin[0], *p.argmin.last().expect("nonempty")))
        })
        .collect::<Result<_>>()?;
    let lo = ms.iter().map(|m| m.0).min().expect("nonempty window");
    let hi = ms.iter().map(|m| m.1).max().expect("nonempty window");
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoAxisRow {
    pub window: i64,
    pub diam: i64,
    pub parallel: bool,
}

impl TwoAxisRow {
    pub const HEADER: &'static str = "windows,diam,parallel";

    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.window, self.diam, self.parallel)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BehrstockRow {
    /// `d_A(B,C)`, `d_B(A,C)`, `d_C(A,B)` in distance units.
    pub distances: [f64; 3],
    pub m: f64,
    pub exceeding: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoAxisReport {
    pub rows: Vec<TwoAxisRow>,
    pub parallel: bool,
    pub behrstock: Option<BehrstockRow>,
}

/// Diameter of `p_A(B)` at `window` and `2·window`; the axes are flagged
/// parallel when it grows at least linearly.
pub fn pair_diameters<S: Scalar>(a: &Axis<S>, b: &Axis<S>, window: i64) -> Result<(Vec<TwoAxisRow>, bool)> {
    let (l1, h1) = projection_range(a, b, window)?;
    let (l2, h2) = projection_range(a, b, 2 * window)?;
    let (d1, d2) = (h1 - l1, h2 - l2);
    let parallel = d2 - d1 >= window;
    Ok((
        vec![
            TwoAxisRow { window, diam: d1, parallel },
            TwoAxisRow { window: 2 * window, diam: d2, parallel },
        ],
        parallel,
    ))
}

/// `d_A(B,C)`: spread of `p_A(B) ∪ p_A(C)` in distance units.
pub fn relative_distance<S: Scalar>(a: &Axis<S>, b: &Axis<S>, c: &Axis<S>, window: i64) -> Result<(f64, f64)> {
    let (bl, bh) = projection_range(a, b, window)?;
    let (cl, ch) = projection_range(a, c, window)?;
    let step = a.step().as_f64();
    let spread = (bh.max(ch) - bl.min(cl)) as f64 * step;
    let own = (bh - bl).max(ch - cl) as f64 * step;
    Ok((spread, own))
}

pub fn two_axis_report<S: Scalar>(
    a: &Axis<S>,
    b: &Axis<S>,
    c: Option<&Axis<S>>,
    window: i64,
) -> Result<TwoAxisReport> {
    let (rows, parallel) = pair_diameters(a, b, window)?;
    let behrstock = match c {
        None => None,
        Some(c) => {
            let (dabc, da) = relative_distance(a, b, c, window)?;
            let (dbac, db) = relative_distance(b, a, c, window)?;
            let (dcab, dc) = relative_distance(c, a, b, window)?;
            let m = 2.0 * da.max(db).max(dc) + a.step().as_f64();
            let distances = [dabc, dbac, dcab];
            let exceeding = distances.iter().filter(|&&d| d > m).count();
            Some(BehrstockRow { distances, m, exceeding })
        }
    };
    Ok(TwoAxisReport { rows, parallel, behrstock })
}

/// Translate of the axis by a random product of Whitehead moves.
pub fn random_translate<S: Scalar, R: Rng>(ax: &Axis<S>, rng: &mut R, moves: usize) -> Result<(Axis<S>, Automorphism)> {
    let g = random_automorphism(ax.base().rank(), moves, rng)?;
    Ok((ax.translate(&g)?, g))
}

/// Jittered copy of a point, used to perturb axis points.
pub fn perturb<S: Scalar, R: Rng>(p: &MarkedGraph<S>, jitter: f64, rng: &mut R) -> Result<MarkedGraph<S>> {
    jitter_lengths(p, jitter, rng)
}

pub fn to_csv<T>(header: &str, rows: &[T], row: impl Fn(&T) -> String) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&row(r));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::Word;
    use crate::points::standard_rose;
    use crate::train_track::{pf_metric, GraphSelfMap, TrainTrackMap};

    fn tt(images: &[&str]) -> TrainTrackMap<f64> {
        let words: Vec<Word> = images.iter().map(|s| Word::parse(s).unwrap()).collect();
        pf_metric(&GraphSelfMap::on_rose(standard_rose(words.len()).unwrap(), &words).unwrap()).unwrap()
    }

    fn golden_axis() -> Axis<f64> {
        Axis::new(tt(&["xy", "x"]), Some(tt(&["y", "Yx"]))).unwrap()
    }

    #[test]
    fn axis_center_is_skipped() {
        let ax = golden_axis();
        let y = ax.axis_point(3).unwrap();
        let mut rng = sample_rng(0, 0);
        let rec = ball_record(&ax, &y, 0, 0, &BallsConfig::default(), &mut rng).unwrap();
        assert_eq!(rec.skipped.as_deref(), Some("r=0"));
    }

    #[test]
    fn balls_are_deterministic() {
        let ax = golden_axis();
        let cfg = BallsConfig { samples: 6, ball_points: 3, ..BallsConfig::default() };
        let a = balls_experiment(&ax, 7, &cfg).unwrap();
        let b = balls_experiment(&ax, 7, &cfg).unwrap();
        let csv = |r: &[BallRecord]| to_csv(BallRecord::HEADER, r, BallRecord::csv_row);
        assert_eq!(csv(&a), csv(&b));
    }

    #[test]
    fn probe_on_axis_points() {
        let ax = golden_axis();
        let x = ax.axis_point(4).unwrap();
        let y = ax.axis_point(-1).unwrap();
        let v = tree_inequality_probe(&x, &y, &ax).unwrap();
        assert!(v.delta1.abs() < 1e-9);
        assert_eq!(v.sep, 5);
    }

    #[test]
    fn bound_formula() {
        assert!((divergence_bound(4.0, 5.0) + 0.4).abs() < 1e-12);
    }

    #[test]
    fn straight_path_meets_ball() {
        let ax = golden_axis();
        let path = axis_path(&ax, -5, 5).unwrap();
        let res = divergence_check(&path, &ax, 2.0, 5.0).unwrap();
        assert!(!res.avoids_ball);
        assert_eq!(res.satisfied, None);
        let short = axis_path(&ax, -1, 1).unwrap();
        assert!(divergence_check(&short, &ax, 2.0, 5.0).is_err());
    }

    #[test]
    fn detours_avoid_the_ball() {
        let ax = golden_axis();
        for r in [2.0, 3.0] {
            let mut rng = sample_rng(1, r as u64);
            let path = detour_path(&ax, r, &mut rng, 6).unwrap();
            let res = divergence_check(&path, &ax, r, 5.0).unwrap();
            assert!(res.avoids_ball, "R={r} min={}", res.min_dist_to_center);
        }
    }

    #[test]
    fn axis_is_parallel_to_itself() {
        let ax = golden_axis();
        let rep = two_axis_report(&ax, &ax, None, 2).unwrap();
        assert!(rep.parallel);
        assert_eq!(rep.rows[0].diam, 4);
    }
}
