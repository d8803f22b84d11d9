use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use osk_core::axis::Axis;
use osk_core::candidates::enumerate_candidates;
use osk_core::experiments::{self as exp, BallRecord, DivergenceRecord, MorseRecord, ProbeRecord, TwoAxisRow};
use osk_core::metric::{distance, distance_oracle};
use osk_core::points::standard_rose;
use osk_core::scalar::fmt_sig;
use osk_core::train_track::{no_cut_vertex_search, pf_metric, verify_train_track, SearchConfig, TrainTrackMap};
use osk_core::whitehead::{is_primitive, whitehead_minimize};
use osk_core::{CyclicWord, Point, Word};
use serde_json::json;

use crate::io::{self, Document, GraphSpec, SelfMapSpec};
use crate::{AxisArgs, AxisCommand, CliError, Command, Mode, TtCommand, WhiteheadCommand};

type Outcome = Result<u8, CliError>;

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Write(p.display().to_string(), e.to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { files } => validate(&files),
        Command::Dist { a, b, oracle, out } => dist(&a, &b, oracle, out.as_deref()),
        Command::Candidates { file, out } => candidates(&file, out.as_deref()),
        Command::Whitehead { command } => whitehead(command),
        Command::Tt { command } => tt(command),
        Command::Axis { command } => axis(command),
    }
}

fn validate(files: &[PathBuf]) -> Outcome {
    let mut code = 0;
    for f in files {
        let verdict = match io::read_document(f)? {
            Document::Graph(spec) => {
                let p = spec.point()?;
                let report = p.validate();
                if report.is_valid() {
                    Ok(format!("point of rank {}", p.rank()))
                } else {
                    Err(report.to_string())
                }
            }
            Document::SelfMap(spec) => {
                let m = spec.self_map()?;
                let report = m.point().validate();
                let check = verify_train_track(&m);
                if report.is_valid() {
                    Ok(format!("self-map on a point of rank {} ({check})", m.point().rank()))
                } else {
                    Err(report.to_string())
                }
            }
            Document::Automorphism(v) => match io::automorphism_from_value(&v)?.certify() {
                Ok(phi) => Ok(format!("automorphism {phi}")),
                Err(e) => Err(e.to_string()),
            },
        };
        match verdict {
            Ok(msg) => println!("{}: valid {msg}", f.display()),
            Err(msg) => {
                println!("{}: invalid: {msg}", f.display());
                code = 1;
            }
        }
    }
    Ok(code)
}

fn checked_point(path: &Path) -> Result<Point, CliError> {
    let p = io::read_point(path)?;
    p.validate().into_result()?;
    Ok(p)
}

fn dist(a: &Path, b: &Path, oracle: Option<u64>, out: Option<&Path>) -> Outcome {
    let (x, y) = (checked_point(a)?, checked_point(b)?);
    let res = distance(&x, &y)?;
    let oracle_value = oracle.map(|l| distance_oracle(&x, &y, l as usize)).transpose()?;
    if let Some(out) = out {
        let table: Vec<_> = res
            .table
            .iter()
            .map(|(c, s)| json!({"kind": c.kind.to_string(), "class": c.class.to_string(), "path": x.graph().format_path(&c.path), "stretch": fmt_sig(*s)}))
            .collect();
        let mut v = json!({"value": fmt_sig(res.value), "witness": res.witness.class.to_string(), "table": table});
        if let Some(o) = oracle_value {
            v["oracle"] = json!(fmt_sig(o));
        }
        emit(Some(out), &io::to_pretty(&v))?;
        return Ok(0);
    }
    let mut s = String::new();
    writeln!(s, "d = {}", fmt_sig(res.value)).unwrap();
    writeln!(s, "witness: {} ({}, {})", res.witness.class, res.witness.kind, x.graph().format_path(&res.witness.path)).unwrap();
    if let Some(o) = oracle_value {
        writeln!(s, "oracle (words up to length {}): {}", oracle.unwrap_or(0), fmt_sig(o)).unwrap();
    }
    writeln!(s, "kind\tclass\tpath\tstretch").unwrap();
    for (c, st) in &res.table {
        writeln!(s, "{}\t{}\t{}\t{}", c.kind, c.class, x.graph().format_path(&c.path), fmt_sig(*st)).unwrap();
    }
    emit(None, &s)?;
    Ok(0)
}

fn candidates(file: &Path, out: Option<&Path>) -> Outcome {
    let p = checked_point(file)?;
    let cands = enumerate_candidates(&p)?;
    let g = p.graph();
    if let Some(out) = out {
        let rows: Vec<_> = cands
            .iter()
            .map(|c| json!({"kind": c.kind.to_string(), "class": c.class.to_string(), "path": g.format_path(&c.path), "length": fmt_sig(g.path_length(&c.path))}))
            .collect();
        emit(Some(out), &io::to_pretty(&rows))?;
        return Ok(0);
    }
    let mut s = String::from("kind\tclass\tpath\tlength\n");
    for c in &cands {
        writeln!(s, "{}\t{}\t{}\t{}", c.kind, c.class, g.format_path(&c.path), fmt_sig(g.path_length(&c.path))).unwrap();
    }
    emit(None, &s)?;
    Ok(0)
}

fn parse_words(words: &[String], rank: Option<u64>) -> Result<(usize, Vec<CyclicWord>), CliError> {
    let parsed: Vec<Word> = words.iter().map(|w| Word::parse(w)).collect::<osk_core::Result<_>>()?;
    let used = parsed.iter().map(Word::max_generator).max().unwrap_or(0);
    let rank = match rank {
        Some(r) if (r as usize) < used => {
            return Err(CliError::Usage(format!("rank {r} is smaller than the generators used ({used})")))
        }
        Some(r) => r as usize,
        None => used.max(2),
    };
    Ok((rank, parsed.iter().map(CyclicWord::new).collect()))
}

fn whitehead(cmd: WhiteheadCommand) -> Outcome {
    match cmd {
        WhiteheadCommand::Minimize { words, rank } => {
            let (rank, words) = parse_words(&words, rank)?;
            let trace = whitehead_minimize(rank, &words)?;
            println!("step\tmove\tbefore\tafter");
            for (i, s) in trace.steps.iter().enumerate() {
                println!("{}\t{}\t{}\t{}", i + 1, s.mv, s.before, s.after);
            }
            let fin: Vec<String> = trace.final_words.iter().map(ToString::to_string).collect();
            println!("final: {} (length {})", fin.join(" "), trace.final_length());
            println!("terminal: {}", trace.terminal);
            Ok(0)
        }
        WhiteheadCommand::Primitive { word, rank } => {
            let (rank, words) = parse_words(&[word], rank)?;
            let p = is_primitive(rank, &words[0])?;
            println!("{}: {}", words[0], if p { "primitive" } else { "not primitive" });
            Ok(0)
        }
    }
}

fn train_track(path: &Path) -> Result<TrainTrackMap<f64>, CliError> {
    Ok(pf_metric(&io::read_self_map(path)?)?)
}

fn tt(cmd: TtCommand) -> Outcome {
    match cmd {
        TtCommand::Verify { map } => {
            let f = io::read_self_map(&map)?;
            let check = verify_train_track(&f);
            println!("{check}");
            if let Some(t) = &check.illegal_turn {
                let g = f.point().graph();
                println!(
                    "illegal turn ({}, {}) at position {} of the image of {}",
                    g.direction_name(t.turn.0),
                    g.direction_name(t.turn.1),
                    t.position,
                    g.edge(t.edge).name
                );
            }
            Ok(if check.is_train_track && check.irreducible { 0 } else { 1 })
        }
        TtCommand::Pf { map, out } => {
            let t = train_track(&map)?;
            let g = t.point().graph();
            println!("lambda = {}", fmt_sig(t.lambda()));
            println!("edge\tlength\tfrequency");
            for (i, e) in g.edges().iter().enumerate() {
                println!("{}\t{}\t{}", e.name, fmt_sig(t.lengths()[i]), fmt_sig(t.frequencies()[i]));
            }
            println!("automorphism: {}", t.automorphism());
            if let Some(out) = out {
                emit(Some(&out), &io::to_pretty(&SelfMapSpec::from_map(t.map())))?;
            }
            Ok(0)
        }
        TtCommand::Leaf { map, edge, iterations } => {
            let t = train_track(&map)?;
            let g = t.point().graph();
            let e = g.edge_index(&edge).ok_or_else(|| CliError::Usage(format!("no edge named {edge:?}")))?;
            let (path, word) = t.leaf_segment(e, iterations as usize)?;
            println!("path: {}", g.format_path(&path));
            println!("word: {word}");
            println!("edges: {}", path.len());
            Ok(0)
        }
        TtCommand::Whsearch { map, inverse, start, out } => {
            let plus = train_track(&map)?;
            let minus = train_track(&inverse)?;
            let start = match start {
                Some(p) => checked_point(&p)?,
                None => standard_rose(plus.point().rank())?,
            };
            let res = no_cut_vertex_search(&plus, &minus, &start, &SearchConfig::default())?;
            let (lp, lm) = res.start_lengths;
            println!("start lengths: {} {}", fmt_sig(lp), fmt_sig(lm));
            println!("step\tcut vertex\tmove\tlength+\tlength-");
            for (i, s) in res.steps.iter().enumerate() {
                println!("{}\t{}\t{}\t{}\t{}", i + 1, s.cut_vertex, s.mv, fmt_sig(s.length_plus), fmt_sig(s.length_minus));
            }
            println!("graph: {} (iterate {}, stabilized {})", res.graph.graph, res.graph.k_used, res.graph.stabilized);
            let labels: Vec<String> = res.point.labels()?.iter().map(ToString::to_string).collect();
            println!("edge labels: {}", labels.join(" "));
            if let Some(out) = out {
                emit(Some(&out), &io::to_pretty(&GraphSpec::from_point(&res.point)))?;
            }
            Ok(0)
        }
    }
}

fn load_axis(a: &AxisArgs) -> Result<Axis<f64>, CliError> {
    let forward = train_track(&a.map)?;
    let backward = a.inverse.as_deref().map(train_track).transpose()?;
    Ok(Axis::new(forward, backward)?)
}

fn csv<T>(header: &str, rows: &[T], row: impl Fn(&T) -> String) -> String {
    exp::to_csv(header, rows, row)
}

/// Measured `b′ = D_emp + 4c′ + 3` from a contraction and a probe run.
fn measured_b_prime(ax: &Axis<f64>, seed: u64, samples: usize) -> Result<(f64, f64, f64), CliError> {
    let balls = exp::BallsConfig { samples, ..Default::default() };
    let d = exp::max_projection_diameter(&exp::balls_experiment(ax, seed, &balls)?);
    let probe = exp::ProbeConfig { pairs: samples, ..Default::default() };
    let c = exp::probe_constants(&exp::probe_experiment(ax, seed, &probe)?)[2];
    Ok((d + 4.0 * c + 3.0, d, c))
}

fn axis(cmd: AxisCommand) -> Outcome {
    match cmd {
        AxisCommand::Project { axis, point } => {
            let ax = load_axis(&axis)?;
            let x = checked_point(&point)?;
            let p = ax.project(&x)?;
            let argmin: Vec<String> = p.argmin.iter().map(ToString::to_string).collect();
            println!("argmin: {}", argmin.join(" "));
            println!("value: {}", fmt_sig(p.value));
            println!("diam: {}", p.diam);
            println!("window: {} {}", p.window.0, p.window.1);
            println!("unimodal: {}", p.unimodal);
            Ok(0)
        }
        AxisCommand::Profile { axis, word, from, to } => {
            if from >= to {
                return Err(CliError::Usage("--from must be smaller than --to".into()));
            }
            let ax = load_axis(&axis)?;
            let alpha = CyclicWord::new(&Word::parse_with_rank(&word, ax.base().rank())?);
            let prof = ax.length_profile(&alpha, from, to)?;
            println!("m\tlength");
            for (m, v) in &prof.values {
                println!("{m}\t{}", fmt_sig(*v));
            }
            let ms: Vec<String> = prof.min_set.iter().map(ToString::to_string).collect();
            println!("min set: {} (interior {})", ms.join(" "), prof.interior);
            let slope = |s: Option<f64>| s.map(fmt_sig).unwrap_or_else(|| "n/a".into());
            println!("right slope: {}", slope(prof.right_slope));
            println!("left slope: {}", slope(prof.left_slope));
            Ok(0)
        }
        AxisCommand::Contract { axis, run, mode, radius_budget } => {
            let ax = load_axis(&axis)?;
            let text = match mode {
                Mode::Balls => {
                    let cfg = exp::BallsConfig { samples: run.samples as usize, radius_budget, ..Default::default() };
                    let recs = exp::balls_experiment(&ax, run.seed, &cfg)?;
                    csv(BallRecord::HEADER, &recs, BallRecord::csv_row)
                }
                Mode::Morse => {
                    let cfg = exp::MorseConfig { samples: run.samples as usize, ..Default::default() };
                    let recs = exp::morse_experiment(&ax, run.seed, &cfg)?;
                    csv(MorseRecord::HEADER, &recs, MorseRecord::csv_row)
                }
            };
            emit(run.out.as_deref(), &text)?;
            Ok(0)
        }
        AxisCommand::Probe { axis, run } => {
            let ax = load_axis(&axis)?;
            let cfg = exp::ProbeConfig { pairs: run.samples as usize, ..Default::default() };
            let recs = exp::probe_experiment(&ax, run.seed, &cfg)?;
            emit(run.out.as_deref(), &csv(ProbeRecord::HEADER, &recs, ProbeRecord::csv_row))?;
            let c = exp::probe_constants(&recs);
            eprintln!("c_emp: {} {} {}", fmt_sig(c[0]), fmt_sig(c[1]), fmt_sig(c[2]));
            Ok(0)
        }
        AxisCommand::Diverge { axis, run, radii, b_prime } => {
            let ax = load_axis(&axis)?;
            let b = match b_prime {
                Some(b) => b,
                None => {
                    let (b, d, c) = measured_b_prime(&ax, run.seed, run.samples as usize)?;
                    eprintln!("measured D_emp {} c' {} b' {}", fmt_sig(d), fmt_sig(c), fmt_sig(b));
                    b
                }
            };
            let per_radius = (run.samples as usize).div_ceil(radii.len()).max(1);
            let recs = exp::divergence_experiment(&ax, run.seed, &radii, per_radius, b)?;
            emit(run.out.as_deref(), &csv(DivergenceRecord::HEADER, &recs, DivergenceRecord::csv_row))?;
            Ok(0)
        }
        AxisCommand::Pair { axis, translate, third, window, out } => {
            let a = load_axis(&axis)?;
            let g = io::read_automorphism(&translate)?.certify()?;
            let b = a.translate(&g)?;
            let c = third.map(|p| -> Result<_, CliError> { Ok(a.translate(&io::read_automorphism(&p)?.certify()?)?) }).transpose()?;
            let rep = exp::two_axis_report(&a, &b, c.as_ref(), window)?;
            emit(out.as_deref(), &csv(TwoAxisRow::HEADER, &rep.rows, TwoAxisRow::csv_row))?;
            if let Some(row) = rep.behrstock {
                let [x, y, z] = row.distances;
                eprintln!(
                    "d_A(B,C) {} d_B(A,C) {} d_C(A,B) {} M {} exceeding {}",
                    fmt_sig(x),
                    fmt_sig(y),
                    fmt_sig(z),
                    fmt_sig(row.m),
                    row.exceeding
                );
            }
            Ok(0)
        }
    }
}
