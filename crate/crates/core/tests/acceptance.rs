//! Acceptance checks. Each test prints one `criterion N: PASS|FAIL` line
//! with the measured quantities and fails when the criterion is not met.

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use osk_core::axis::Axis;
use osk_core::experiments::*;
use osk_core::graph::{Edge, MarkedGraph, MetricGraph, OrientedEdge};
use osk_core::metric::{cyclic_words_up_to, dist, distance, distance_oracle, LinearMap};
use osk_core::points::{random_automorphism, random_template_point, rose, standard_rose};
use osk_core::train_track::*;
use osk_core::whitehead::{cut_analysis, is_primitive, whitehead_minimize, WhiteheadGraph};
use osk_core::{Automorphism, CyclicWord, Word};
use rand::Rng;

fn report(n: u32, pass: bool, elapsed: Duration, limit: Duration, detail: String) {
    let in_time = elapsed <= limit;
    let ok = pass && in_time;
    println!(
        "criterion {n}: {} ({detail}; {:.2}s of {}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(pass, "criterion {n} failed: {detail}");
    assert!(in_time, "criterion {n} exceeded its time limit");
}

fn tt(images: &[&str]) -> TrainTrackMap<f64> {
    let words: Vec<Word> = images.iter().map(|s| Word::parse(s).unwrap()).collect();
    pf_metric(&GraphSelfMap::on_rose(standard_rose(words.len()).unwrap(), &words).unwrap()).unwrap()
}

fn golden() -> TrainTrackMap<f64> {
    tt(&["xy", "x"])
}

fn golden_inverse() -> TrainTrackMap<f64> {
    tt(&["y", "Yx"])
}

fn golden_axis() -> Axis<f64> {
    Axis::new(golden(), Some(golden_inverse())).unwrap()
}

fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

const SEED: u64 = 1;

// Shared empirical constants: contraction diameters and probe constants.
struct Constants {
    d_small: f64,
    d_large: f64,
    probe: Vec<[f64; 3]>,
    elapsed_balls: Duration,
    elapsed_probe: Duration,
}

fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| {
        let ax = golden_axis();
        let t = Instant::now();
        let small = BallsConfig { samples: 100, radius_budget: 1.0, ..BallsConfig::default() };
        let large = BallsConfig { radius_budget: 2.0, ..small.clone() };
        let d_small = max_projection_diameter(&balls_experiment(&ax, SEED, &small).unwrap());
        let d_large = max_projection_diameter(&balls_experiment(&ax, SEED, &large).unwrap());
        let elapsed_balls = t.elapsed();
        let t = Instant::now();
        let probe = (SEED..SEED + 3)
            .map(|s| probe_constants(&probe_experiment(&ax, s, &ProbeConfig::default()).unwrap()))
            .collect();
        Constants { d_small, d_large, probe, elapsed_balls, elapsed_probe: t.elapsed() }
    })
}

fn transvection(m: i64) -> Automorphism {
    let y = Word::parse("x").unwrap().pow(m).mul(&Word::parse("y").unwrap());
    Automorphism::new(2, vec![Word::parse("x").unwrap(), y]).unwrap().certify().unwrap()
}

#[test]
fn criterion_01_transvection_distances() {
    let t = Instant::now();
    let r = rose::<f64>(&[0.5, 0.5]).unwrap();
    let mut worst = 0f64;
    for m in 1..=8 {
        let d = dist(&r, &r.act(&transvection(m)).unwrap()).unwrap();
        worst = worst.max((d - ((m + 1) as f64).ln()).abs());
    }
    report(1, worst < 1e-9, t.elapsed(), Duration::from_secs(1), format!("max |d - log(m+1)| = {worst:.2e}"));
}

#[test]
fn criterion_02_figure_one_map() {
    let t = Instant::now();
    let src = rose::<f64>(&[0.5, 0.5]).unwrap();
    let edge = |name: &str| Edge { name: name.to_string(), from: 0, to: 1, length: 1.0 / 3.0 };
    let g = MetricGraph::new(vec!["v".into(), "w".into()], vec![edge("a1"), edge("a2"), edge("a3")]).unwrap();
    let p = |s: &str| -> Vec<OrientedEdge> { s.split_whitespace().map(|d| g.parse_direction(d).unwrap()).collect() };
    let e1 = p("a2 ~a3");
    let e2 = p("a1 ~a2 a1 ~a3 a2 ~a1");
    let target = MarkedGraph::new(g.clone(), 0, vec![e1.clone(), e2.clone()]).unwrap();
    let map = LinearMap { vertex_images: vec![0], edge_images: vec![e1, e2] };
    let rep = map.lipschitz(&src, &target).unwrap();
    let ok = (rep.slopes[0] - 4.0 / 3.0).abs() < 1e-12 && (rep.slopes[1] - 4.0).abs() < 1e-12 && (rep.lip - 4.0).abs() < 1e-12;
    report(2, ok, t.elapsed(), Duration::from_secs(1), format!("slopes {:?}, Lip {}", rep.slopes, rep.lip));
}

#[test]
fn criterion_03_candidates_match_oracle() {
    let t = Instant::now();
    let mut rng = sample_rng(SEED, 3);
    let mut worst = 0f64;
    let mut exceed = 0;
    for (rank, pairs) in [(2usize, 50), (3, 20)] {
        for _ in 0..pairs {
            let x = random_template_point::<f64, _>(rank, rng.gen_range(0..=2), 0.4, &mut rng).unwrap();
            let y = random_template_point::<f64, _>(rank, rng.gen_range(0..=2), 0.4, &mut rng).unwrap();
            let d = distance(&x, &y).unwrap().value;
            let o = distance_oracle(&x, &y, 6).unwrap();
            worst = worst.max((d - o).abs());
            if o > d + 1e-9 {
                exceed += 1;
            }
        }
    }
    report(
        3,
        worst < 1e-9 && exceed == 0,
        t.elapsed(),
        Duration::from_secs(120),
        format!("max |candidate - oracle| = {worst:.2e}, words above candidate max: {exceed}"),
    );
}

#[test]
fn criterion_04_metric_axioms() {
    let t = Instant::now();
    let mut rng = sample_rng(SEED, 4);
    let point = |rng: &mut rand_chacha::ChaCha8Rng| {
        let rank = if rng.gen_bool(0.5) { 2 } else { 3 };
        random_template_point::<f64, _>(rank, rng.gen_range(0..=3), 0.5, rng).unwrap()
    };
    let mut neg = 0;
    let mut self_max = 0f64;
    for _ in 0..200 {
        let x = point(&mut rng);
        let mut y = point(&mut rng);
        while y.rank() != x.rank() {
            y = point(&mut rng);
        }
        if dist(&x, &y).unwrap() < -1e-9 {
            neg += 1;
        }
        self_max = self_max.max(dist(&x, &x).unwrap().abs());
    }
    let mut tri_worst = f64::NEG_INFINITY;
    for i in 0..1000 {
        let rank = 2 + (i % 2);
        let mut pt = || random_template_point::<f64, _>(rank, rng.gen_range(0..=3), 0.5, &mut rng).unwrap();
        let (x, y, z) = (pt(), pt(), pt());
        let gap = dist(&x, &z).unwrap() - dist(&x, &y).unwrap() - dist(&y, &z).unwrap();
        tri_worst = tri_worst.max(gap);
    }
    report(
        4,
        neg == 0 && self_max < 1e-9 && tri_worst <= 1e-9,
        t.elapsed(),
        Duration::from_secs(120),
        format!("negative: {neg}, max d(x,x) = {self_max:.2e}, max triangle excess = {tri_worst:.2e}"),
    );
}

// Independent primitivity oracle on signed integer letters.
fn reduce_cyclic(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    while out.len() > 1 && out[0] == -out[out.len() - 1] {
        out.remove(0);
        out.pop();
    }
    out
}

fn order_key(l: i32) -> (i32, bool) {
    (l.abs(), l > 0)
}

fn canonical(w: &[i32]) -> Vec<i32> {
    let inv: Vec<i32> = w.iter().rev().map(|l| -l).collect();
    let mut best: Option<Vec<i32>> = None;
    for v in [w.to_vec(), inv] {
        for r in 0..v.len().max(1) {
            let mut c = v.clone();
            c.rotate_left(r);
            let better = match &best {
                None => true,
                Some(b) => c.iter().map(|&l| order_key(l)).lt(b.iter().map(|&l| order_key(l))),
            };
            if better {
                best = Some(c);
            }
        }
    }
    best.unwrap_or_default()
}

fn whitehead_images(rank: i32) -> Vec<Vec<Vec<i32>>> {
    let letters: Vec<i32> = (1..=rank).flat_map(|g| [g, -g]).collect();
    let mut out = Vec::new();
    for &a in &letters {
        let others: Vec<i32> = letters.iter().copied().filter(|&l| l != a && l != -a).collect();
        for mask in 0u32..(1 << others.len()) {
            let in_set = |l: i32| l == a || others.iter().enumerate().any(|(i, &o)| o == l && mask & (1 << i) != 0);
            let images = (1..=rank)
                .map(|g| {
                    if g == a.abs() {
                        return vec![g];
                    }
                    let mut img = Vec::new();
                    if in_set(-g) {
                        img.push(-a);
                    }
                    img.push(g);
                    if in_set(g) {
                        img.push(a);
                    }
                    img
                })
                .collect();
            out.push(images);
        }
    }
    out
}

fn substitute(w: &[i32], images: &[Vec<i32>]) -> Vec<i32> {
    let mut out = Vec::new();
    for &l in w {
        let img = &images[(l.abs() - 1) as usize];
        if l > 0 {
            out.extend(img.iter().copied());
        } else {
            out.extend(img.iter().rev().map(|x| -x));
        }
    }
    out
}

fn primitive_oracle(rank: i32, max_len: usize) -> BTreeSet<Vec<i32>> {
    let moves = whitehead_images(rank);
    let mut seen: BTreeSet<Vec<i32>> = (1..=rank).map(|g| vec![g]).collect();
    let mut queue: VecDeque<Vec<i32>> = seen.iter().cloned().collect();
    while let Some(w) = queue.pop_front() {
        for m in &moves {
            let v = canonical(&reduce_cyclic(&substitute(&w, m)));
            if v.len() <= max_len && seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    seen
}

#[test]
fn criterion_05_whitehead_suite() {
    let t = Instant::now();
    let mut mismatches = 0;
    let mut checked = 0;
    for (rank, max_len) in [(2usize, 6usize), (3, 4)] {
        let oracle = primitive_oracle(rank as i32, max_len);
        for w in cyclic_words_up_to(rank, max_len) {
            let codes = canonical(&w.letters().iter().map(|l| l.code()).collect::<Vec<_>>());
            if is_primitive(rank, &w).unwrap() != oracle.contains(&codes) {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    let mut rng = sample_rng(SEED, 5);
    let mut bad_steps = 0;
    let mut steps = 0;
    for _ in 0..100 {
        let rank = rng.gen_range(2..=3);
        let phi = random_automorphism(rank, rng.gen_range(1..=6), &mut rng).unwrap();
        let mut words: Vec<CyclicWord> = phi.images().iter().map(CyclicWord::new).collect();
        if rng.gen_bool(0.5) {
            words.truncate(1);
        }
        let trace = whitehead_minimize(rank, &words).unwrap();
        for s in &trace.steps {
            steps += 1;
            if s.after >= s.before {
                bad_steps += 1;
            }
        }
    }
    let commutator = CyclicWord::parse("xyXY").unwrap();
    let cut = cut_analysis(&WhiteheadGraph::from_cyclic_words(2, std::slice::from_ref(&commutator)).unwrap());
    let non_basis = cut.connected && cut.cut_vertex.is_none() && !is_primitive(2, &commutator).unwrap();
    report(
        5,
        mismatches == 0 && bad_steps == 0 && non_basis,
        t.elapsed(),
        Duration::from_secs(300),
        format!(
            "{checked} words, {mismatches} oracle mismatches; {steps} steps, {bad_steps} non-decreasing; commutator certified: {non_basis}"
        ),
    );
}

#[test]
fn criterion_06_golden_train_track() {
    let t = Instant::now();
    let f = GraphSelfMap::on_rose(standard_rose::<f64>(2).unwrap(), &[Word::parse("xy").unwrap(), Word::parse("x").unwrap()])
        .unwrap();
    let verified = verify_train_track(&f).is_train_track;
    let g = pf_metric(&f).unwrap();
    let lam_err = (g.lambda() - golden_ratio()).abs();
    let l = g.lengths();
    let len_err = (l[0] - 0.6180340).abs().max((l[1] - 0.3819660).abs());
    let ax = golden_axis();
    let mut step_err = 0f64;
    for m in -3..=3 {
        let d = dist(&ax.axis_point(m).unwrap(), &ax.axis_point(m + 1).unwrap()).unwrap();
        step_err = step_err.max((d - golden_ratio().ln()).abs());
    }
    report(
        6,
        verified && lam_err < 1e-9 && len_err < 1e-6 && step_err < 1e-9,
        t.elapsed(),
        Duration::from_secs(1),
        format!("train track {verified}, |λ-φ| = {lam_err:.2e}, length error {len_err:.2e}, step error {step_err:.2e}"),
    );
}

#[test]
fn criterion_07_legality_growth() {
    let t = Instant::now();
    let g = golden();
    let phi = g.automorphism().clone();
    let lam = g.lambda();
    let t0 = g.point();
    let mut tested = 0;
    let mut worst = f64::INFINITY;
    let seeds = ["x", "y", "xy", "xY", "xxy", "xyY", "xyxY", "xxYY"];
    for s in seeds {
        for k in 6..=9 {
            let alpha = CyclicWord::new(&phi.power(k).unwrap().apply(&Word::parse(s).unwrap()).unwrap());
            if alpha.is_empty() {
                continue;
            }
            let eps = g.legality_report(&alpha).leg;
            if eps <= 0.0 {
                continue;
            }
            let base = t0.loop_length(&alpha);
            let mut image = alpha.clone();
            for n in 1..=5 {
                image = phi.apply_cyclic(&image).unwrap();
                let lhs = t0.loop_length(&image);
                let rhs = eps * (lam + 1.0) / (2.0 * lam) * lam.powi(n) * base;
                worst = worst.min(lhs / rhs);
                tested += 1;
            }
        }
    }
    report(
        7,
        tested > 0 && worst >= 1.0 - 1e-12,
        t.elapsed(),
        Duration::from_secs(10),
        format!("{tested} (loop, n) cases, min ratio to bound {worst:.6}"),
    );
}

fn search_starts() -> Vec<MarkedGraph<f64>> {
    let mut rng = sample_rng(SEED, 8);
    let mut starts = vec![standard_rose(2).unwrap()];
    for _ in 0..7 {
        let g = random_automorphism(2, rng.gen_range(2..=5), &mut rng).unwrap();
        starts.push(standard_rose(2).unwrap().act(&g).unwrap());
    }
    starts
}

#[test]
fn criterion_08_lamination_functional() {
    let t = Instant::now();
    let g = golden();
    let twist = Automorphism::from_named([("x", "xY"), ("y", "y")]).unwrap().certify().unwrap();
    let mut conv = true;
    let mut detail = Vec::new();
    for target in [rose::<f64>(&[1.0 / 3.0, 2.0 / 3.0]).unwrap(), rose(&[0.5, 0.5]).unwrap().act(&twist).unwrap()] {
        let est = g.lamination_length_ratio(&target, 0.0, LAMINATION_LETTER_BUDGET).unwrap();
        let a = &est.sequence;
        // first k from which every later step is below 1e-6
        let settled = (1..a.len()).rev().take_while(|&k| (a[k] - a[k - 1]).abs() < 1e-6).last();
        conv &= a.len() > 16 && matches!(settled, Some(k) if k <= 15);
        detail.push(format!("a_k settles at k = {} over {} terms", settled.unwrap_or(a.len()), a.len()));
    }
    let at_t0 = g.lamination_length_ratio(g.point(), 0.0, 100_000).unwrap();
    let unit = at_t0.sequence.iter().all(|&a| a == 1.0);
    let minus = golden_inverse();
    let mut searches = 0;
    let mut moves = 0;
    let mut monotone = true;
    for start in search_starts() {
        let res = no_cut_vertex_search(&g, &minus, &start, &SearchConfig::default()).unwrap();
        let mut prev = res.start_lengths;
        for s in &res.steps {
            monotone &= s.length_plus < prev.0 && s.length_minus < prev.1;
            prev = (s.length_plus, s.length_minus);
            moves += 1;
        }
        searches += 1;
    }
    report(
        8,
        conv && unit && monotone && moves > 0,
        t.elapsed(),
        Duration::from_secs(60),
        format!("{}; value at T0 exactly 1: {unit}; {searches} searches, {moves} moves, strictly decreasing: {monotone}", detail.join(", ")),
    );
}

#[test]
fn criterion_09_cut_vertex_free_point() {
    let t = Instant::now();
    let plus = golden();
    let minus = golden_inverse();
    let cfg = SearchConfig::default();
    let mut ok = true;
    let mut invariant = true;
    let phi = plus.automorphism().clone();
    let phi_inv = phi.inverse().unwrap();
    for start in search_starts() {
        let res = no_cut_vertex_search(&plus, &minus, &start, &cfg).unwrap();
        let cut = cut_analysis(&res.graph.graph);
        ok &= cut.connected && cut.cut_vertex.is_none();
        for moved in [res.point.act(&phi).unwrap(), res.point.act(&phi_inv).unwrap()] {
            let g = lamination_whitehead_graph(&plus, &minus, &moved, &cfg).unwrap().graph;
            invariant &= g.same_simple_graph(&res.graph.graph);
        }
    }
    report(
        9,
        ok && invariant,
        t.elapsed(),
        Duration::from_secs(60),
        format!("terminal graphs connected without cut vertex: {ok}; invariant under φ and φ⁻¹: {invariant}"),
    );
}

#[test]
fn criterion_10_contraction() {
    let c = constants();
    let step = golden_ratio().ln();
    report(
        10,
        c.d_large - c.d_small <= step + 1e-9,
        c.elapsed_balls,
        Duration::from_secs(600),
        format!("D_emp = {:.6} at radius budget 1, {:.6} at budget 2, one domain = {step:.6}", c.d_small, c.d_large),
    );
}

#[test]
fn criterion_11_projection_inequalities() {
    let c = constants();
    let mut spreads = [0f64; 3];
    for (k, spread) in spreads.iter_mut().enumerate() {
        let vals: Vec<f64> = c.probe.iter().map(|p| p[k]).collect();
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        *spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    }
    let table: Vec<String> = c.probe.iter().map(|p| format!("[{:.4}, {:.4}, {:.4}]", p[0], p[1], p[2])).collect();
    report(
        11,
        spreads.iter().all(|&s| s <= 0.10),
        c.elapsed_probe,
        Duration::from_secs(600),
        format!(
            "c_emp per seed {}; relative spread c1 {:.3}, c2 {:.3}, c3 {:.3} (limit 0.10)",
            table.join(" "),
            spreads[0],
            spreads[1],
            spreads[2]
        ),
    );
}

#[test]
fn criterion_12_divergence() {
    let c = constants();
    let t = Instant::now();
    let ax = golden_axis();
    let c3 = c.probe[0][2];
    let b_prime = c.d_large + 4.0 * c3 + 3.0;
    let radii = [2.0, 3.0, 4.0];
    let recs = divergence_experiment(&ax, SEED, &radii, 5, b_prime).unwrap();
    let mut all_ok = true;
    let mut parts = Vec::new();
    for r in radii {
        let rs: Vec<_> = recs.iter().filter(|x| x.r == r).collect();
        let avoiding = rs.iter().filter(|x| x.result.avoids_ball).count();
        let satisfied = rs.iter().filter(|x| x.result.satisfied == Some(true)).count();
        let non_vacuous = rs.iter().filter(|x| x.result.avoids_ball && !x.result.vacuous).count();
        all_ok &= avoiding == rs.len() && satisfied == avoiding && non_vacuous >= 1;
        parts.push(format!(
            "R={r}: {avoiding}/{} avoid, {satisfied} satisfied, {non_vacuous} non-vacuous, bound {:.4}",
            rs.len(),
            divergence_bound(r, b_prime)
        ));
    }
    report(12, all_ok, t.elapsed(), Duration::from_secs(300), format!("b' = {b_prime:.4}; {}", parts.join("; ")));
}

fn independent_translate(ax: &Axis<f64>, others: &[&Axis<f64>], rng: &mut rand_chacha::ChaCha8Rng) -> (Axis<f64>, usize) {
    let mut rejected = 0;
    loop {
        let (b, _) = random_translate(ax, rng, 4).unwrap();
        let parallel = others.iter().any(|o| pair_diameters(o, &b, 4).unwrap().1);
        if !parallel {
            return (b, rejected);
        }
        rejected += 1;
    }
}

#[test]
fn criterion_13_two_axis_projections() {
    let t = Instant::now();
    let a = golden_axis();
    let mut rng = sample_rng(SEED, 13);
    let mut stable = 0;
    let mut rejected = 0;
    let mut diams = Vec::new();
    for _ in 0..10 {
        let (b, rej) = independent_translate(&a, &[&a], &mut rng);
        rejected += rej;
        let (rows, _) = pair_diameters(&a, &b, 4).unwrap();
        if (rows[1].diam - rows[0].diam).abs() <= 1 {
            stable += 1;
        }
        diams.push(format!("{}→{}", rows[0].diam, rows[1].diam));
    }
    let mut triples_ok = 0;
    let mut max_exceeding = 0;
    for i in 0..5 {
        let (b, _) = independent_translate(&a, &[&a], &mut rng);
        let shift = a.power(3 + i).unwrap();
        let (c0, _) = independent_translate(&a, &[&a, &b], &mut rng);
        // push C along A so that its projection lands far from B's
        let c = c0.translate(&shift).unwrap();
        let rep = two_axis_report(&a, &b, Some(&c), 4).unwrap();
        let row = rep.behrstock.unwrap();
        max_exceeding = max_exceeding.max(row.exceeding);
        if row.exceeding <= 1 {
            triples_ok += 1;
        }
    }
    report(
        13,
        stable == 10 && triples_ok == 5,
        t.elapsed(),
        Duration::from_secs(600),
        format!(
            "{stable}/10 pairs stable (diam at window 4→8: {}; {rejected} parallel draws rejected), {triples_ok}/5 triples with at most one distance above M (max {max_exceeding})",
            diams.join(" ")
        ),
    );
}
