//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! (with the numbers behind it) and exits non-zero if any failed.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use kps_cli::{cmd_sweep_r, cmd_sweep_storage, CodeConfig, ExperimentConfig, StorageVariant};
use kps_core::kps::{key_refs, storage_bits, Deployment, IdPolicy};
use kps_core::resilience::{
    average_exact_resilience, binomial, brute_force_pair_count, collusion_free_sets,
    exact_pair_count, expected_resilience, mds_average_pair_count, multi_authority,
    resilience_probability, sample_colluder_words, sharing_probability, ColluderPlacement,
    CollusionFreeSets,
};
use kps_core::sim::{derive_seed, simulate_code_resilience, Population, TrialConfig};
use kps_core::{BlockCode, Field, FieldElement};

const SEED: u64 = 20240607;

fn gf(q: u32) -> Arc<Field> {
    Arc::new(Field::new(q).unwrap())
}

fn rs(n: usize, k: usize, q: u32) -> BlockCode {
    BlockCode::reed_solomon(gf(q), n, k).unwrap()
}

/// (n, k, q) of the seeded random linear codes; q^k ranges up to 4096.
const RANDOM_SHAPES: [(usize, usize, u32); 20] = [
    (6, 2, 4),
    (7, 3, 4),
    (8, 4, 2),
    (10, 5, 2),
    (6, 3, 5),
    (8, 2, 7),
    (9, 3, 7),
    (10, 2, 8),
    (7, 4, 3),
    (12, 6, 2),
    (6, 2, 16),
    (8, 3, 8),
    (10, 4, 4),
    (12, 3, 8),
    (9, 5, 3),
    (12, 2, 16),
    (5, 3, 11),
    (7, 2, 13),
    (14, 12, 2),
    (8, 6, 4),
];

fn test_codes() -> Vec<(String, BlockCode)> {
    let mut codes = vec![
        (
            "RS(3,2)-4".to_string(),
            BlockCode::reed_solomon_at(gf(4), vec![1, 2, 3], 2).unwrap(),
        ),
        ("RS(5,2)-8".to_string(), rs(5, 2, 8)),
        ("RS(4,3)-8".to_string(), rs(4, 3, 8)),
    ];
    for (i, &(n, k, q)) in RANDOM_SHAPES.iter().enumerate() {
        let code = BlockCode::random_linear(gf(q), n, k, derive_seed(SEED, i as u64)).unwrap();
        assert!(code.codeword_count() <= 4096);
        codes.push((format!("lin({n},{k})-{q}#{i}"), code));
    }
    codes
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for (ci, (name, code)) in test_codes().iter().enumerate() {
        for r in [0usize, 1, 2, 5] {
            for s in 0..10u64 {
                let words = sample_colluder_words(
                    code,
                    r,
                    derive_seed(SEED, 100 + ci as u64),
                    r as u64 * 10 + s,
                );
                let u = collusion_free_sets(&words, code.n(), code.q()).unwrap();
                let ie = exact_pair_count(code, &u).unwrap();
                let bf = brute_force_pair_count(code, &u).unwrap();
                checked += 1;
                if ie != bf {
                    mismatches.push(format!("{name} r={r} set={s}: {ie} vs {bf}"));
                }
            }
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "{checked} collusion sets over 23 codes, {} mismatches{}",
            mismatches.len(),
            mismatches
                .first()
                .map(|m| format!(" (first: {m})"))
                .unwrap_or_default()
        ),
    }
}

fn position_sets(n: usize, t: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, t, &mut Vec::new(), &mut out);
    out
}

fn criterion_2() -> Outcome {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for (name, code) in [("RS(14,2)-16", rs(14, 2, 16)), ("RS(6,3)-8", rs(6, 3, 8))] {
        let (k, q) = (code.k(), code.q() as u64);
        for t in 0..=k {
            for (pi, positions) in position_sets(code.n(), t).into_iter().enumerate() {
                for s in 0..50u64 {
                    let tuple: Vec<FieldElement> = (0..t)
                        .map(|j| {
                            (derive_seed(SEED ^ (pi as u64) << 20, s * 16 + j as u64) % q)
                                as FieldElement
                        })
                        .collect();
                    let got = code.count_matching(&positions, &tuple).unwrap();
                    checked += 1;
                    if got != q.pow((k - t) as u32) {
                        bad.push(format!("{name} at {positions:?} = {tuple:?}: {got}"));
                    }
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{checked} (position set, tuple) checks, {} wrong",
            bad.len()
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut codes = test_codes();
    codes.push(("RS(14,2)-16".into(), rs(14, 2, 16)));
    codes.push(("RS(6,3)-8".into(), rs(6, 3, 8)));
    let mut bad = Vec::new();
    for (name, code) in &codes {
        let full = CollusionFreeSets::full(code.n(), code.q());
        let d = exact_pair_count(code, &full).unwrap();
        let at_zero = resilience_probability(d as f64, code.q(), code.k());
        let none = collusion_free_sets::<Vec<FieldElement>>(&[], code.n(), code.q()).unwrap();
        let at_zero_empty = resilience_probability(
            exact_pair_count(code, &none).unwrap() as f64,
            code.q(),
            code.k(),
        );
        let sh = sharing_probability(code).unwrap();
        if sh != at_zero || sh != at_zero_empty {
            bad.push(format!("{name}: P_sh {sh} vs P_re(0) {at_zero}"));
        }
    }
    let p324 = sharing_probability(&codes[0].1).unwrap();
    Outcome {
        pass: bad.is_empty() && p324 == 0.6,
        detail: format!(
            "{} codes, {} mismatches; RS(3,2)-4 P_sh = {p324}",
            codes.len(),
            bad.len()
        ),
    }
}

fn criterion_4() -> Outcome {
    let code = rs(14, 2, 16);
    let pairs = binomial(code.codeword_count(), 2);
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [1usize, 5, 10, 20] {
        let eq8 = mds_average_pair_count(14, 2, 16, r) / pairs;
        let avg =
            average_exact_resilience(&code, r, 200, derive_seed(SEED, 4000 + r as u64)).unwrap();
        let rel = (eq8 - avg.mean).abs() / avg.mean;
        let expectation = expected_resilience(&code, r, ColluderPlacement::Anywhere).unwrap();
        let ok = rel <= 0.05;
        pass &= ok;
        parts.push(format!(
            "r={r}: eq8 {eq8:.5} mean {:.5}±{:.5} rel {:.2}% {} (exact expectation {expectation:.5})",
            avg.mean,
            avg.stderr,
            100.0 * rel,
            if ok { "ok" } else { "OVER" }
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_5() -> Outcome {
    let code = rs(5, 2, 8);
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [2usize, 3] {
        for r in [0usize, 1, 5] {
            let part = expected_resilience(&code, r, ColluderPlacement::Disjoint).unwrap();
            let target = multi_authority(part, m);
            let cfg = TrialConfig::new(
                100_000,
                derive_seed(SEED, 5000 + 10 * m as u64 + r as u64),
                r,
            );
            let est = simulate_code_resilience(&code, m, &cfg).unwrap();
            let z = (est.p_hat - target) / est.stderr;
            let ok = est.agrees_with(target, 3.0);
            pass &= ok;
            parts.push(format!(
                "M={m} r={r}: sim {:.5} vs {target:.5} (z={z:+.2})",
                est.p_hat
            ));
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn sweep_r_config() -> ExperimentConfig {
    ExperimentConfig {
        code: Some(CodeConfig::mds_rs(14, 2, 16)),
        r_grid: vec![1, 5, 10, 20, 40],
        trials: 20_000,
        seed: SEED,
        ensemble: 50,
        ..Default::default()
    }
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn criterion_6() -> Outcome {
    let csv = cmd_sweep_r(&sweep_r_config()).unwrap().body;
    let rows = rows(&csv);
    let f = |s: &str| s.parse::<f64>().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [1, 5, 10, 20, 40] {
        let rs_row = rows
            .iter()
            .find(|x| x[0] == "rs-14-2-16" && x[2] == r.to_string())
            .unwrap();
        let mean = rows
            .iter()
            .find(|x| x[0] == "lin-14-2-16-mean" && x[2] == r.to_string())
            .unwrap();
        let (exact, sim, se) = (f(&rs_row[3]), f(&rs_row[5]), f(&rs_row[6]));
        let dominates = exact >= f(&mean[5]);
        let coincides = (sim - exact).abs() <= 3.0 * se;
        pass &= dominates && coincides;
        parts.push(format!(
            "r={r}: MDS exact {exact:.4} sim {sim:.4}±{se:.4}{} vs lin mean {:.4}{}",
            if coincides { "" } else { " (OFF)" },
            f(&mean[5]),
            if dominates { "" } else { " (NOT DOMINATED)" }
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn sweep_storage_config() -> ExperimentConfig {
    ExperimentConfig {
        code: Some(CodeConfig::mds_rs(30, 2, 32)),
        nodes: 1000,
        q_prime: 64,
        r_grid: vec![100],
        trials: 20_000,
        seed: SEED,
        population: Population::Deployed,
        storage_variants: (1..=3)
            .map(|m| StorageVariant {
                code: None,
                authorities: m,
            })
            .collect(),
        ..Default::default()
    }
}

fn criterion_7() -> Outcome {
    let csv = cmd_sweep_storage(&sweep_storage_config()).unwrap().body;
    let rows = rows(&csv);
    let p: Vec<f64> = rows.iter().map(|x| x[4].parse().unwrap()).collect();
    let s: Vec<u64> = rows.iter().map(|x| x[2].parse().unwrap()).collect();
    let increasing = p.len() == 3 && p.windows(2).all(|w| w[0] < w[1]);
    let storage =
        s == [330, 660, 990] && (1..=3).all(|m| storage_bits(m, 30, 32, 64) == 330 * m as u64);
    let sims: Vec<&str> = rows.iter().map(|x| x[5].as_str()).collect();
    Outcome {
        pass: increasing && storage,
        detail: format!(
            "P_re^M at r=100 for M=1,2,3: {p:?} (simulated over N=1000: {sims:?}); S = {s:?}"
        ),
    }
}

fn criterion_8() -> Outcome {
    let deployments = [
        Deployment::build(
            16,
            1,
            Arc::new(BlockCode::reed_solomon_at(gf(4), vec![1, 2, 3], 2).unwrap()),
            4,
            1,
            IdPolicy::Sequential,
        )
        .unwrap(),
        Deployment::build(16, 3, Arc::new(rs(3, 2, 4)), 16, 2, IdPolicy::Uniform).unwrap(),
        Deployment::build(60, 2, Arc::new(rs(5, 2, 8)), 64, 3, IdPolicy::Uniform).unwrap(),
        Deployment::build(200, 2, Arc::new(rs(14, 2, 16)), 64, 4, IdPolicy::Uniform).unwrap(),
        Deployment::build(1000, 3, Arc::new(rs(30, 2, 32)), 64, 5, IdPolicy::Uniform).unwrap(),
    ];
    let mut bad = 0;
    for t in 0..1000u64 {
        let d = &deployments[(derive_seed(SEED, 8000 + t) % deployments.len() as u64) as usize];
        let node = &d.nodes()[(derive_seed(SEED, 9000 + t) % d.len() as u64) as usize];
        let (m, n) = (d.authorities(), d.params().n);
        let recomputed = key_refs(&node.key_index, m, n).unwrap();
        let distinct: HashSet<_> = node.key_refs.iter().collect();
        if node.key_refs.len() != m * n || distinct.len() != m * n || recomputed != node.key_refs {
            bad += 1;
        }
    }
    Outcome {
        pass: bad == 0,
        detail: format!("1000 sampled nodes over 5 deployments, {bad} violations"),
    }
}

fn scratch() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_cli(args: &[&str], threads: &str) -> bool {
    Command::new(env!("CARGO_BIN_EXE_kps"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn criterion_9() -> Outcome {
    let dir = scratch();
    let mut fig1 = sweep_r_config();
    fig1.ensemble = 5;
    fig1.trials = 5000;
    let configs = [("sweep-r", fig1), ("sweep-storage", sweep_storage_config())];
    let mut parts = Vec::new();
    let mut pass = true;
    for (cmd, cfg) in configs {
        let path = dir.join(format!("{cmd}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
        let outs: Vec<PathBuf> = (0..2).map(|i| dir.join(format!("{cmd}-{i}.csv"))).collect();
        let ok = [("0", "8"), ("1", "1")].iter().all(|(i, threads)| {
            let out = &outs[i.parse::<usize>().unwrap()];
            run_cli(
                &[
                    cmd,
                    "--config",
                    path.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                ],
                threads,
            )
        });
        let a = std::fs::read(&outs[0]).unwrap_or_default();
        let b = std::fs::read(&outs[1]).unwrap_or_default();
        let same = ok && !a.is_empty() && a == b;
        pass &= same;
        parts.push(format!(
            "{cmd}: {} bytes, {}",
            a.len(),
            if same { "identical" } else { "DIFFERENT" }
        ));
    }
    Outcome {
        pass,
        detail: format!(
            "two runs (8 threads, 1 thread) of each sweep: {}",
            parts.join("; ")
        ),
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", criterion_1),
        ("count_matching exactness on MDS codes", criterion_2),
        ("r = 0 identity", criterion_3),
        ("averaged closed form vs exact mean", criterion_4),
        ("multi-authority boost law", criterion_5),
        ("MDS vs random linear resilience curves", criterion_6),
        ("storage vs resilience at r = 100", criterion_7),
        ("key reference count and distinctness", criterion_8),
        ("sweep determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} [{}] {name} ({:.1}s): {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
