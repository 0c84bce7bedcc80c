//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dynreach::generate::{
    gen_er_instance, gen_kronecker_instance, gen_kronecker_snapshot, ErSpec, Initiator, KroneckerSchedule,
    KroneckerSpec,
};
use dynreach::ingest::{events_to_sequence, parse_temporal_stream};
use dynreach::oracle::bfs_distances;
use dynreach::replay::{OpKind, Session};
use dynreach::{
    canonical_configs, verify_against_oracle, AlgorithmSpec, Counters, DiGraph, EsParams, EsVariant, EvenShiloach,
    Operation, OperationSequence, SsrAlgorithm, VertexId,
};
use dynreach_bench::run_once;
use rayon::prelude::*;

// Oracle equivalence corpus.
const C1_SEEDS: u64 = 100;
const C1_N: usize = 64;
const C1_SIGMA: usize = 512;
const C1_DENSITIES: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
const C1_CONFIGS: usize = 13;

// Level exactness.
const C2_SEEDS: u64 = 50;
const C2_N: usize = 64;
const C2_SIGMA: usize = 512;

// Counter bounds.
const C3_SI_WORK_FACTOR: u64 = 2;
const C3_SES_SCAN_FACTOR: u64 = 7;
const C3_SES_BETA: u64 = 5;

// Desk-scale trends.
const C4_N: usize = 10_000;
const C4_SIGMA: usize = 10_000;
const C4_DENSITIES: [f64; 4] = [2.5, 5.0, 10.0, 20.0];
const C4_SEEDS: u64 = 10;
const C4_MIN_SEEDS: usize = 8;
const C4_SES_DELETE_SHARE: f64 = 0.70;
const C4_SI_DELETE_SHARE: f64 = 0.90;

// Threshold effectiveness.
const C5_MIN_FACTOR: f64 = 5.0;
const C5_PATH: usize = 30;
const C5_BLOB: usize = 30;

// Kronecker sanity.
const C7_SEEDS: u64 = 50;
const C7_K: u32 = 8;
const C7_INITIATOR: [[f64; 2]; 2] = [[0.9, 0.5], [0.5, 0.1]];
const C7_EXPECTED_EDGES: f64 = 256.0;
const C7_REL_TOL: f64 = 0.10;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn corpus(seeds: u64, n: usize, sigma: usize) -> Vec<OperationSequence> {
    (0..seeds)
        .map(|seed| {
            let d = C1_DENSITIES[(seed % C1_DENSITIES.len() as u64) as usize];
            gen_er_instance(&ErSpec::new(n, d, sigma, seed)).expect("valid spec")
        })
        .collect()
}

fn oracle_equivalence(corpus: &[OperationSequence]) -> Verdict {
    let configs = canonical_configs();
    if configs.len() != C1_CONFIGS {
        return Verdict::new(false, format!("{} canonical configurations", configs.len()));
    }
    let failures: Vec<String> = corpus
        .par_iter()
        .enumerate()
        .flat_map_iter(|(seed, seq)| {
            configs.iter().filter_map(move |spec| {
                let mut alg = spec.build(seq.source);
                verify_against_oracle(seq, &mut alg)
                    .err()
                    .map(|e| format!("seed {seed} {spec}: {e}"))
            })
        })
        .collect();
    let checks = corpus.len() * configs.len();
    match failures.first() {
        None => Verdict::new(
            true,
            format!("{checks} sequence/config pairs, every query and sweep exact"),
        ),
        Some(first) => Verdict::new(
            false,
            format!("{} of {checks} diverged; first: {first}", failures.len()),
        ),
    }
}

fn level_exactness() -> Verdict {
    let sequences = corpus(C2_SEEDS, C2_N, C2_SIGMA);
    let params = [
        EsParams {
            beta: Some(5),
            ratio: Some(0.5),
        },
        EsParams::UNLIMITED,
    ];
    let failures: Vec<String> = sequences
        .par_iter()
        .enumerate()
        .flat_map_iter(|(seed, seq)| {
            let mut out = Vec::new();
            for p in params {
                for variant in [EsVariant::Classic, EsVariant::MultiLevel, EsVariant::Simplified] {
                    let mut alg = EvenShiloach::new(variant, seq.source, p);
                    let name = alg.name();
                    let mut session = Session::start(seq, &mut alg).expect("valid sequence");
                    let mut ok = session.algorithm().levels() == bfs_distances(session.graph(), seq.source);
                    while ok {
                        let Some(step) = session.step() else { break };
                        let step = step.expect("replay");
                        if step.op.is_update() {
                            ok = session.algorithm().levels() == bfs_distances(session.graph(), seq.source);
                        }
                    }
                    if !ok {
                        out.push(format!("seed {seed} {name} at op {}", session.position()));
                    }
                }
            }
            out
        })
        .collect();
    match failures.first() {
        None => Verdict::new(true, format!("{} sequences x 6 configurations", sequences.len())),
        Some(first) => Verdict::new(false, format!("{} mismatches; first: {first}", failures.len())),
    }
}

/// Steps through `seq`, handing each update's counters and the edge count
/// before it to `check`.
fn per_update(
    seq: &OperationSequence,
    spec: &AlgorithmSpec,
    mut check: impl FnMut(OpKind, Counters, u64) -> Option<String>,
) -> Option<String> {
    let mut alg = spec.build(seq.source);
    let mut session = Session::start(seq, &mut alg).expect("valid sequence");
    loop {
        let m = session.graph().edge_count() as u64;
        let Some(step) = session.step() else { return None };
        let step = step.expect("replay");
        if let Some(msg) = check(step.record.kind, step.record.counters, m) {
            return Some(format!("op {:?}: {msg}", step.record.op_index));
        }
    }
}

fn counter_bounds(corpus: &[OperationSequence]) -> Verdict {
    let si0: AlgorithmSpec = "si:nR:SF:0".parse().unwrap();
    let ses: Vec<AlgorithmSpec> = ["ses:5:0.5", "ses:5:inf"].iter().map(|s| s.parse().unwrap()).collect();
    let lazy: Vec<AlgorithmSpec> = ["cbfs", "cdfs", "lbfs", "ldfs"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mut deletions = 0usize;
    let mut worst_si = 0f64;
    let mut worst_ses = 0f64;
    let mut max_enq = 0;
    for (seed, seq) in corpus.iter().enumerate() {
        let n = seq.n as u64;
        let fail = per_update(seq, &si0, |kind, c, m| {
            if kind != OpKind::Delete {
                return None;
            }
            deletions += 1;
            let bound = C3_SI_WORK_FACTOR * (n + m);
            worst_si = worst_si.max(c.work() as f64 / bound as f64);
            (c.work() > bound).then(|| format!("si ratio 0 work {} > {bound}", c.work()))
        });
        if let Some(f) = fail {
            return Verdict::new(false, format!("(a) seed {seed} {f}"));
        }
        for spec in &ses {
            let fail = per_update(seq, spec, |kind, c, m| {
                if kind != OpKind::Delete {
                    return None;
                }
                let bound = C3_SES_SCAN_FACTOR * (n + m);
                worst_ses = worst_ses.max(c.edges_scanned as f64 / bound as f64);
                max_enq = max_enq.max(c.max_enqueues);
                if c.edges_scanned > bound {
                    Some(format!("{spec} scanned {} > {bound}", c.edges_scanned))
                } else if c.max_enqueues > C3_SES_BETA {
                    Some(format!("{spec} enqueued a vertex {} times", c.max_enqueues))
                } else {
                    None
                }
            });
            if let Some(f) = fail {
                return Verdict::new(false, format!("(b) seed {seed} {f}"));
            }
        }
        for spec in &lazy {
            let fail = per_update(seq, spec, |kind, c, _| {
                (matches!(kind, OpKind::Insert | OpKind::Delete) && c.work() != 0)
                    .then(|| format!("{spec} update did {} work", c.work()))
            });
            if let Some(f) = fail {
                return Verdict::new(false, format!("(c) seed {seed} {f}"));
            }
        }
    }
    Verdict::new(
        true,
        format!(
            "{deletions} deletions per config; peak si work {:.2} of bound, peak ses scans {:.2} of bound, max enqueues {max_enq}; cached/lazy updates free",
            worst_si, worst_ses
        ),
    )
}

fn trends() -> Verdict {
    let si: AlgorithmSpec = "si:nR:SF:0.25".parse().unwrap();
    let ses: AlgorithmSpec = "ses:5:0.5".parse().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for d in C4_DENSITIES {
        let results: Vec<_> = (0..C4_SEEDS)
            .into_par_iter()
            .map(|seed| {
                let seq = gen_er_instance(&ErSpec::new(C4_N, d, C4_SIGMA, seed)).expect("valid spec");
                let a = run_once(&seq, &si, None).expect("si replay");
                let b = run_once(&seq, &ses, None).expect("ses replay");
                (a, b)
            })
            .collect();
        let share = |c_ins: u64, c_del: u64| c_del as f64 / (c_ins + c_del).max(1) as f64;
        let mut counts = [0usize; 4];
        let mut wall = [0usize; 2];
        let mut ses_shares = Vec::new();
        for (si_r, ses_r) in &results {
            let (si_i, si_d) = (si_r.insert.edges_scanned, si_r.delete.edges_scanned);
            let (ses_i, ses_d) = (ses_r.insert.edges_scanned, ses_r.delete.edges_scanned);
            counts[0] += usize::from(si_i < ses_i);
            counts[1] += usize::from(ses_d < si_d);
            ses_shares.push(share(ses_i, ses_d));
            counts[2] += usize::from(share(ses_i, ses_d) >= C4_SES_DELETE_SHARE);
            counts[3] += usize::from(share(si_i, si_d) >= C4_SI_DELETE_SHARE);
            wall[0] += usize::from(si_r.insert_time < ses_r.insert_time);
            wall[1] += usize::from(ses_r.delete_time < si_r.delete_time);
        }
        ses_shares.sort_by(f64::total_cmp);
        let ok = counts.iter().all(|&c| c >= C4_MIN_SEEDS);
        pass &= ok;
        parts.push(format!(
            "d={d}: ins {}/10 del {}/10 ses-share {}/10 (median {:.2}) si-share {}/10 (wall ins {}/10 del {}/10)",
            counts[0],
            counts[1],
            counts[2],
            ses_shares[ses_shares.len() / 2],
            counts[3],
            wall[0],
            wall[1]
        ));
    }
    Verdict::new(pass, parts.join("; "))
}

/// Source s, hub y, subtree root r with a fan of leaves p_i and a dense
/// strongly connected blob D that is only entered through r. Every p_i also
/// has in-edges from all of D and a late non-tree in-edge from y.
fn threshold_instance(k: usize, c: usize) -> OperationSequence {
    let s = VertexId(0);
    let r = VertexId(1);
    let y = VertexId(2);
    let p = |i: usize| VertexId::from(3 + i);
    let d = |j: usize| VertexId::from(3 + k + j);
    let mut seq = OperationSequence::new(3 + k + c, s);
    let e = &mut seq.initial_edges;
    e.push((s, r));
    e.push((s, y));
    e.extend((0..k).map(|i| (r, p(i))));
    e.extend((0..c).map(|j| (r, d(j))));
    for a in 0..c {
        e.extend((0..c).filter(|&b| b != a).map(|b| (d(a), d(b))));
    }
    for i in 0..k {
        e.extend((0..c).map(|j| (d(j), p(i))));
    }
    seq.ops.extend((0..k).map(|i| Operation::AddEdge(y, p(i))));
    seq.ops.push(Operation::RemoveEdge(s, r));
    seq
}

fn threshold_effectiveness() -> Verdict {
    let seq = threshold_instance(C5_PATH, C5_BLOB);
    let delete_scans = |spec: &str| -> (u64, u64, usize) {
        let spec: AlgorithmSpec = spec.parse().unwrap();
        let mut alg = spec.build(seq.source);
        let mut session = Session::start(&seq, &mut alg).expect("valid sequence");
        let mut out = (0, 0, 0);
        while let Some(step) = session.step() {
            let step = step.expect("replay");
            if step.record.kind == OpKind::Delete {
                out = (
                    step.record.counters.edges_scanned,
                    step.record.counters.recomputations,
                    0,
                );
            }
        }
        out.2 = session.graph().vertex_count();
        out
    };
    let (full, full_rec, n) = delete_scans("si:nR:SF:1");
    let (quarter, quarter_rec, _) = delete_scans("si:nR:SF:0.25");
    let factor = full as f64 / quarter.max(1) as f64;
    let affected = 1 + C5_PATH + C5_BLOB;
    Verdict::new(
        factor >= C5_MIN_FACTOR && full_rec == 0 && quarter_rec == 1,
        format!(
            "|L|={affected} of n={n}: ratio 1 scanned {full}, ratio 0.25 scanned {quarter} with {quarter_rec} rebuild, factor {factor:.1}"
        ),
    )
}

fn ingestion_rules() -> Verdict {
    let text = std::fs::read_to_string(data("konect_toy.tsv")).expect("toy stream");
    let golden = std::fs::read_to_string(data("konect_toy.golden.seq")).expect("golden file");
    let events = match parse_temporal_stream(&text) {
        Ok(e) => e,
        Err(e) => return Verdict::new(false, format!("parse: {e}")),
    };
    let (seq, labels) = match events_to_sequence(&events) {
        Ok(x) => x,
        Err(e) => return Verdict::new(false, format!("conversion: {e}")),
    };
    if seq.to_text() != golden {
        return Verdict::new(false, format!("sequence differs from golden:\n{}", seq.to_text()));
    }
    if labels.label(seq.source) != Some("c") {
        return Verdict::new(false, "source is not the first minimum-timestamp tail");
    }
    let mut alg = dynreach::StaticSearch::new(seq.source, dynreach::SearchOrder::Bfs);
    let mut session = Session::start(&seq, &mut alg).expect("golden replays");
    let mut skipped = Vec::new();
    while let Some(step) = session.step() {
        let step = step.expect("lenient replay");
        if step.record.kind == OpKind::Skipped {
            skipped.push(step.record.op_index.unwrap());
        }
    }
    let g: &DiGraph = session.graph();
    let mult = |a: &str, b: &str| g.multiplicity(labels.id(a).unwrap(), labels.id(b).unwrap());
    let multiset_ok = mult("b", "c") == 2 && mult("d", "a") == 1 && mult("a", "b") == 1 && mult("c", "d") == 0;
    Verdict::new(
        skipped == [6] && multiset_ok && g.edge_count() == 4,
        format!(
            "golden matched; skipped removals at ops {skipped:?}; final edges {}",
            g.edge_count()
        ),
    )
}

fn kronecker_sanity() -> Verdict {
    let init = Initiator(C7_INITIATOR);
    let counts: Vec<usize> = (0..C7_SEEDS)
        .map(|seed| gen_kronecker_snapshot(&init, C7_K, seed).len())
        .collect();
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let rel = (mean - C7_EXPECTED_EDGES).abs() / C7_EXPECTED_EDGES;
    let analytic = init.expected_edges(C7_K);
    let bound = 1u32 << C7_K;
    let in_range = (0..C7_SEEDS).all(|seed| {
        gen_kronecker_snapshot(&init, C7_K, seed)
            .iter()
            .all(|(a, b)| a.0 < bound && b.0 < bound)
    });
    let spec = KroneckerSpec {
        initiator: init,
        schedule: KroneckerSchedule::Constant(C7_K),
        snapshots: 2,
        seed: 0,
        source_rank: 0,
    };
    let n = gen_kronecker_instance(&spec).map(|s| s.n).unwrap_or(0);
    Verdict::new(
        rel <= C7_REL_TOL && (analytic - C7_EXPECTED_EDGES).abs() < 1e-9 && in_range && n == 1 << C7_K,
        format!("mean edges {mean:.1} vs {C7_EXPECTED_EDGES} (rel {rel:.3}); instance n = {n}"),
    )
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dynreach"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn counter_columns(csv_text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let keep: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !h.ends_with("_us"))
        .map(|(i, _)| i)
        .collect();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            keep.iter().map(|&i| r[i].to_string()).collect()
        })
        .collect()
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let konect = data("konect_toy.tsv").to_string_lossy().into_owned();
    let snaps: Vec<String> = (1..=3)
        .map(|i| data(&format!("snapshot_{i}.txt")).to_string_lossy().into_owned())
        .collect();
    let mut checks = Vec::new();
    let mut run_pair = |label: &str, build: &dyn Fn(&str) -> Vec<String>, a: &str, b: &str| -> Result<(), String> {
        for out in [a, b] {
            let args = build(out);
            cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
        }
        let (x, y) = (
            std::fs::read(a).map_err(|e| e.to_string())?,
            std::fs::read(b).map_err(|e| e.to_string())?,
        );
        if x != y {
            return Err(format!("{label}: outputs differ"));
        }
        checks.push(label.to_string());
        Ok(())
    };
    let result = (|| -> Result<(), String> {
        let er = |out: &str| -> Vec<String> {
            [
                "generate",
                "--spec",
                "kind=er n=500 d=2.5 sigma=2000 seed=42",
                "--out",
                out,
            ]
            .map(String::from)
            .to_vec()
        };
        run_pair("generate er", &er, &p("er1.seq"), &p("er2.seq"))?;
        let kron = |out: &str| -> Vec<String> {
            [
                "generate",
                "--spec",
                "kind=kron init=0.9,0.5,0.5,0.1 kmin=5 kmax=8 snapshots=4 seed=3",
                "--inject-queries",
                "10:2",
                "--seed",
                "9",
                "--out",
                out,
            ]
            .map(String::from)
            .to_vec()
        };
        run_pair("generate kron", &kron, &p("kr1.seq"), &p("kr2.seq"))?;
        let temporal = |out: &str| -> Vec<String> {
            [
                "ingest",
                "--format",
                "temporal",
                "--input",
                konect.as_str(),
                "--shuffle",
                "--seed",
                "5",
                "--out",
                out,
            ]
            .map(String::from)
            .to_vec()
        };
        run_pair("ingest temporal", &temporal, &p("k1.seq"), &p("k2.seq"))?;
        let snapshots = |out: &str| -> Vec<String> {
            let mut v: Vec<String> = ["ingest", "--format", "snapshots", "--diff-seed", "4", "--input"]
                .map(String::from)
                .to_vec();
            v.extend(snaps.iter().cloned());
            v.extend(["--out".to_string(), out.to_string()]);
            v
        };
        run_pair("ingest snapshots", &snapshots, &p("s1.seq"), &p("s2.seq"))?;
        let er_seq = p("er1.seq");
        let run = |out: &str| -> Vec<String> {
            [
                "run",
                "--instance",
                er_seq.as_str(),
                "--algorithm",
                "sbfs",
                "lbfs",
                "si:nR:SF:0.25",
                "ses:5:0.5",
                "es:inf:inf",
                "--runs",
                "2",
                "--out",
                out,
            ]
            .map(String::from)
            .to_vec()
        };
        for out in [p("r1.csv"), p("r2.csv")] {
            let args = run(&out);
            cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
        }
        let a = std::fs::read_to_string(p("r1.csv")).map_err(|e| e.to_string())?;
        let b = std::fs::read_to_string(p("r2.csv")).map_err(|e| e.to_string())?;
        let (ca, cb) = (counter_columns(&a), counter_columns(&b));
        if ca != cb || ca.len() != 5 {
            return Err("run: counter columns differ".into());
        }
        Ok(())
    })();
    match result {
        Ok(()) => Verdict::new(
            true,
            format!("byte-identical: {}; run counter columns identical", checks.join(", ")),
        ),
        Err(e) => Verdict::new(false, e),
    }
}

fn main() {
    let started = Instant::now();
    let c1_corpus = corpus(C1_SEEDS, C1_N, C1_SIGMA);
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("oracle equivalence", Box::new(|| oracle_equivalence(&c1_corpus))),
        ("ES-family level exactness", Box::new(level_exactness)),
        ("counter bounds", Box::new(|| counter_bounds(&c1_corpus))),
        ("desk-scale trends", Box::new(trends)),
        ("threshold effectiveness", Box::new(threshold_effectiveness)),
        ("ingestion rules", Box::new(ingestion_rules)),
        ("Kronecker sanity", Box::new(kronecker_sanity)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let v = check();
        let secs = t0.elapsed().as_secs_f64();
        failed += usize::from(!v.pass);
        println!(
            "criterion {} {name}: {} [{secs:.1}s] {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    let total: Duration = started.elapsed();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        total.as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
