//! Exit criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use common::rational::solve_exact;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rspcert::ReportJson;
use rspcert_core::l0::{self, ClassKind, Equivalence};
use rspcert_core::linalg;
use rspcert_core::order_k;
use rspcert_core::rsp;
use rspcert_core::simplex::{self, LpStatus};
use rspcert_core::{IndexSet, SearchLimits, ToleranceConfig, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn limits() -> SearchLimits {
    SearchLimits::default()
}

fn set(v: &[usize]) -> IndexSet {
    IndexSet::new(v.to_vec()).unwrap()
}

fn fixture(p: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("fixtures");
    path.push(p);
    path.display().to_string()
}

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// Runs the binary with `--json` and returns (exit code, report).
fn cli_report(args: &[&str]) -> Result<(i32, ReportJson), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_rspcert"))
        .args(args)
        .arg("--json")
        .arg(&path)
        .env_remove("RSPCERT_BUDGET")
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().ok_or("killed by signal")?;
    let text = std::fs::read_to_string(&path).map_err(|_| {
        format!(
            "no report written: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok((
        code,
        serde_json::from_str(&text).map_err(|e| e.to_string())?,
    ))
}

fn read_vec(p: &str) -> Vec<f64> {
    rspcert::io::read_vector(std::path::Path::new(&fixture(p))).unwrap()
}

fn criterion_1() -> Outcome {
    let (code, r) = cli_report(&[
        "certify",
        &fixture("unique_pair/A.csv"),
        &fixture("unique_pair/b.csv"),
        &fixture("unique_pair/x.csv"),
    ])?;
    check(code == 0, format!("exit code {code}, expected 0"))?;
    let eta: Vec<f64> =
        serde_json::from_value(r.verdicts["uniqueness"]["rsp"]["witness_eta"].clone())
            .map_err(|e| format!("witness missing: {e}"))?;
    check(
        (eta[0] - 1.0).abs() <= 1e-8 && (eta[1] - 1.0).abs() <= 1e-8,
        format!("η on support {eta:?}"),
    )?;
    check(
        eta[2] <= 1.0 - 1e-7 && eta[3] <= 1.0 - 1e-7,
        format!("η off support {eta:?}"),
    )?;
    Ok(format!("η = {eta:?}"))
}

fn criterion_2() -> Outcome {
    let a = fixture("rank_deficient/A.csv");
    let b = fixture("rank_deficient/b.csv");
    let (code, r) = cli_report(&["certify", &a, &b, &fixture("rank_deficient/x_star.csv")])?;
    let reason = r.verdicts["uniqueness"]["reason"].clone();
    check(
        code == 3 && reason == "RankDeficient",
        format!("x*: exit {code}, reason {reason}"),
    )?;
    let (code, r) = cli_report(&["certify", &a, &b, &fixture("rank_deficient/x_tilde.csv")])?;
    let reason = r.verdicts["uniqueness"]["reason"].clone();
    check(
        code == 3 && reason == "RspFailed",
        format!("x̃: exit {code}, reason {reason}"),
    )?;
    let n1: f64 = read_vec("rank_deficient/x_star.csv").iter().sum();
    let n2: f64 = read_vec("rank_deficient/x_tilde.csv").iter().sum();
    check(
        (n1 - 10.5).abs() <= 1e-9 && (n2 - 10.5).abs() <= 1e-9,
        format!("norms {n1}, {n2}"),
    )?;
    let (code, r) = cli_report(&["classify", &a, &b])?;
    let class = r.verdicts["classification"]["class"].clone();
    check(
        code == 0 && class == "G3",
        format!("classify: exit {code}, class {class}"),
    )?;
    Ok("x* RankDeficient, x̃ RspFailed, class G3".into())
}

fn criterion_3() -> Outcome {
    let (a, b) = coherent_pair();
    let x = [1.0, 0.0, 3f64.sqrt(), 0.0, 0.0, 0.0];
    let mut failures = Vec::new();
    let mu = linalg::mutual_coherence(&a, &tol()).map_err(|e| e.to_string())?;
    let target = 2f64.sqrt() / 3f64.sqrt();
    if (mu - target).abs() > 1e-12 {
        let cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
        let cosine = |i: usize, j: usize| {
            let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(p, q)| p * q).sum();
            let norm = |v: &Vec<f64>| v.iter().map(|p| p * p).sum::<f64>().sqrt();
            (dot / (norm(&cols[i]) * norm(&cols[j]))).abs()
        };
        let worst = (0..a.cols())
            .flat_map(|i| (i + 1..a.cols()).map(move |j| (i, j)))
            .filter(|&(i, j)| (cosine(i, j) - mu).abs() <= 1e-12)
            .collect::<Vec<_>>();
        failures.push(format!(
            "mutual_coherence = {mu:.15}, expected {target:.15}; attained by column pairs {worst:?}"
        ));
    }
    if linalg::coherence_bound_holds(&a, &x, &tol()).map_err(|e| e.to_string())? {
        failures.push("coherence bound unexpectedly holds".into());
    }
    let holds = rsp::check_rsp_at(&a, &set(&[0, 2]), &tol())
        .map_err(|e| e.to_string())?
        .holds;
    if holds != Verdict::Yes {
        failures.push(format!("RSP at {{0,2}}: {holds:?}"));
    }
    let eq = l0::equivalence_verdict(&a, &b, &tol(), &limits())
        .map_err(|e| e.to_string())?
        .verdict;
    if !eq.is_equivalent() {
        failures.push(format!("equivalence {eq:?}"));
    }
    let spark = linalg::spark(&a, &tol(), &limits()).map_err(|e| e.to_string())?;
    if spark != 2 {
        failures.push(format!("spark {spark}"));
    }
    if failures.is_empty() {
        Ok(format!("μ = {mu}, RSP Yes, {eq:?}, spark 2"))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_4() -> Outcome {
    let (a, b) = three_sparsest();
    let report =
        l0::sparsest_supports(&a, &b, a.cols(), &tol(), &limits()).map_err(|e| e.to_string())?;
    check(
        report.supports.len() == 3 && report.supports.iter().all(|s| s.len() == 2),
        format!("supports {:?}", report.supports),
    )?;
    let passing: Vec<&IndexSet> = report
        .supports
        .iter()
        .filter(|s| {
            rsp::check_rsp_at(&a, s, &tol())
                .map(|c| c.holds == Verdict::Yes)
                .unwrap_or(false)
        })
        .collect();
    check(
        passing == vec![&set(&[0, 4])],
        format!("passing supports {passing:?}"),
    )?;
    let x = rsp::solve_l1(&a, &b, &tol()).map_err(|e| e.to_string())?;
    let want = [2.0 / 9.0, 0.0, 0.0, 0.0, 1.0 / 9.0, 0.0];
    check(close(&x, &want, 1e-8), format!("solve_l1 {x:?}"))?;
    let obj: f64 = x.iter().sum();
    check((obj - 1.0 / 3.0).abs() <= 1e-9, format!("objective {obj}"))?;
    let class = l0::classify_system(&a, &b, &tol(), &limits())
        .map_err(|e| e.to_string())?
        .class;
    check(class == ClassKind::G2, format!("class {class:?}"))?;
    let eq = l0::equivalence_verdict(&a, &b, &tol(), &limits())
        .map_err(|e| e.to_string())?
        .verdict;
    check(eq == Equivalence::Equivalent, format!("equivalence {eq:?}"))?;
    Ok("3 supports, RSP only at {0,4}, G2, Equivalent".into())
}

fn criterion_5() -> Outcome {
    let (a, b) = dense_recovery();
    let (x, v) = rsp::solve_and_certify(&a, &b, &tol()).map_err(|e| e.to_string())?;
    check(
        close(&x, &[1.0 / 3.0, 0.5, 0.0, 0.0, 0.0], 1e-8),
        format!("x {x:?}"),
    )?;
    check(v.unique == Verdict::Yes, format!("verdict {:?}", v.unique))?;
    let report =
        l0::sparsest_supports(&a, &b, a.cols(), &tol(), &limits()).map_err(|e| e.to_string())?;
    check(
        report.supports == vec![set(&[3])],
        format!("supports {:?}", report.supports),
    )?;
    let eq = l0::equivalence_verdict(&a, &b, &tol(), &limits())
        .map_err(|e| e.to_string())?
        .verdict;
    check(
        eq == Equivalence::NotEquivalent,
        format!("equivalence {eq:?}"),
    )?;
    let n_star: f64 = x.iter().sum();
    let n_tilde: f64 = report.representatives[0].iter().sum();
    check(
        (n_star - 5.0 / 6.0).abs() <= 1e-9,
        format!("‖x*‖₁ = {n_star}"),
    )?;
    check(
        n_star < n_tilde && (n_tilde - 1.0).abs() <= 1e-9,
        format!("‖x̃‖₁ = {n_tilde}"),
    )?;
    Ok(format!("‖x*‖₁ = {n_star} < ‖x̃‖₁ = {n_tilde}"))
}

const GAUSSIAN_SEED: u64 = 20_240_601;

fn criterion_6() -> Outcome {
    let mats = gaussian_batch(20, 4, 8, GAUSSIAN_SEED);
    let (mut agree, mut marginal, mut disagree) = (0, 0, Vec::new());
    for (i, a) in mats.iter().enumerate() {
        for k in 1..=3 {
            let r = order_k::rsp_order_k(a, k, &tol(), &limits()).map_err(|e| e.to_string())?;
            let o = order_k::uniform_recovery_oracle(a, k, 2, GAUSSIAN_SEED, &tol(), &limits())
                .map_err(|e| e.to_string())?;
            if r.holds == Verdict::Marginal {
                marginal += 1;
            } else if (r.holds == Verdict::Yes) == o.recovered {
                agree += 1;
            } else {
                disagree.push((i, k));
            }
        }
    }
    check(
        disagree.is_empty(),
        format!("disagreements at {disagree:?}"),
    )?;
    Ok(format!(
        "{agree}/{} agree, {marginal} marginal excluded",
        60 - marginal
    ))
}

fn criterion_7() -> Outcome {
    let mats = gaussian_batch(20, 4, 8, GAUSSIAN_SEED);
    let mut violations = Vec::new();
    let mut yes_count = 0;
    for (i, a) in mats.iter().enumerate() {
        let spark = linalg::spark(a, &tol(), &limits()).map_err(|e| e.to_string())?;
        let mut prev = Verdict::Yes;
        for k in 1..=a.rows() {
            let holds = |f: fn(&_, usize, &_, &_) -> _| -> Result<Verdict, String> {
                let r: rspcert_core::Result<order_k::RecoveryReport> = f(a, k, &tol(), &limits());
                r.map(|r| r.holds).map_err(|e| e.to_string())
            };
            let r = holds(order_k::rsp_order_k)?;
            let p = holds(order_k::prsp_order_k)?;
            let w = holds(order_k::wrsp_order_k)?;
            let pw = holds(order_k::pwrsp_order_k)?;
            if r == Verdict::Yes {
                yes_count += 1;
                if prev != Verdict::Yes {
                    violations.push(format!("#{i} K={k}: RSP_K without RSP_(K-1)"));
                }
                if p != Verdict::Yes {
                    violations.push(format!("#{i} K={k}: RSP_K without PRSP_K"));
                }
                if k >= spark {
                    violations.push(format!("#{i} K={k}: RSP_K with spark {spark}"));
                }
            }
            if w == Verdict::Yes && pw != Verdict::Yes {
                violations.push(format!("#{i} K={k}: WRSP_K without PWRSP_K"));
            }
            prev = r;
        }
    }
    check(violations.is_empty(), violations.join("; "))?;
    Ok(format!(
        "0 violations over {} matrices, {yes_count} RSP_K Yes cases",
        mats.len()
    ))
}

fn criterion_8() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for (a, b) in [
        unique_pair(),
        rank_deficient(),
        coherent_pair(),
        three_sparsest(),
        dense_recovery(),
    ] {
        let (x, v) = rsp::solve_and_certify(&a, &b, &tol()).map_err(|e| e.to_string())?;
        if v.unique == Verdict::Yes {
            checked += 1;
            if rsp::support_of(&x, &tol()).unwrap().len() > a.rows() {
                violations += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut random_yes = 0;
    let mut attempts = 0;
    while random_yes < 100 && attempts < 10_000 {
        attempts += 1;
        let a = gaussian(3, 6, &mut rng);
        let mut x = vec![0.0; 6];
        let k = rng.random_range(1..=4);
        for j in rand::seq::index::sample(&mut rng, 6, k) {
            x[j] = rng.random_range(0.1..1.0);
        }
        let b = a.mul_vec(&x).unwrap();
        let v = rsp::certify_uniqueness(&a, &b, &x, &tol()).map_err(|e| e.to_string())?;
        if v.unique == Verdict::Yes {
            random_yes += 1;
            if v.rsp.support.len() > a.rows() {
                violations += 1;
            }
        }
    }
    check(
        random_yes == 100,
        format!("only {random_yes} Yes instances found"),
    )?;
    check(violations == 0, format!("{violations} violations"))?;
    Ok(format!(
        "{} Yes instances, 0 violations",
        checked + random_yes
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut supports = 0;
    for inst in 0..50 {
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..7).map(|_| rng.random_range(-3..=3) as f64).collect())
            .collect();
        let a = rspcert_core::DenseMatrix::from_rows(&rows).unwrap();
        let mut x = vec![0.0; 7];
        let k = rng.random_range(1..=3);
        for j in rand::seq::index::sample(&mut rng, 7, k) {
            x[j] = rng.random_range(1..=3) as f64;
        }
        let b = a.mul_vec(&x).unwrap();
        let report =
            l0::sparsest_supports(&a, &b, 7, &tol(), &limits()).map_err(|e| e.to_string())?;
        for s in &report.supports {
            supports += 1;
            let r = linalg::augmented_rank(&a, s, &tol()).map_err(|e| e.to_string())?;
            check(
                r == s.len(),
                format!("instance {inst}: support {s} has augmented rank {r}"),
            )?;
        }
    }
    Ok(format!("{supports} supports over 50 systems, 0 violations"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut optimal, mut unbounded) = (0, 0);
    for i in 0..200 {
        let lp = random_int_lp(&mut rng, true);
        let exact = solve_exact(&lp.0, &lp.1, &lp.2);
        let flp = int_lp_to_float(&lp);
        let sol = simplex::solve(&flp, &tol()).map_err(|e| format!("LP {i}: {e}"))?;
        let float_feasible = sol.status != LpStatus::Infeasible;
        check(
            float_feasible == exact.is_feasible(),
            format!("LP {i}: feasibility mismatch {:?} vs {exact:?}", sol.status),
        )?;
        match sol.status {
            LpStatus::Optimal => {
                optimal += 1;
                check(
                    simplex::verify_certificate(&flp, &sol, &tol()),
                    format!("LP {i}: certificate rejected"),
                )?;
            }
            LpStatus::Unbounded => unbounded += 1,
            LpStatus::Infeasible => {}
        }
    }
    Ok(format!(
        "200 LPs: {optimal} optimal (all certified), {unbounded} unbounded, 0 mismatches"
    ))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tally = [0usize; 3];
    for inst in 0..20 {
        let a = gaussian(3, 6, &mut rng);
        let mut x = vec![0.0; 6];
        let k = rng.random_range(1..=4);
        for j in rand::seq::index::sample(&mut rng, 6, k) {
            x[j] = rng.random_range(0.1..1.0);
        }
        let b = a.mul_vec(&x).unwrap();
        let w: Vec<f64> = (0..6).map(|_| rng.random_range(0.2..5.0)).collect();
        let weighted =
            rsp::certify_weighted_uniqueness(&a, &b, &w, &x, &tol()).map_err(|e| e.to_string())?;
        let inv: Vec<f64> = w.iter().map(|v| 1.0 / v).collect();
        let scaled = a.scale_columns(&inv).unwrap();
        let wx: Vec<f64> = x.iter().zip(&w).map(|(p, q)| p * q).collect();
        let plain = rsp::certify_uniqueness(&scaled, &b, &wx, &tol()).map_err(|e| e.to_string())?;
        check(
            weighted.unique == plain.unique,
            format!(
                "instance {inst}: {:?} vs {:?}",
                weighted.unique, plain.unique
            ),
        )?;
        tally[match weighted.unique {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::Marginal => 2,
        }] += 1;
    }
    Ok(format!(
        "20/20 identical (Yes {}, No {}, Marginal {})",
        tally[0], tally[1], tally[2]
    ))
}

fn batch_without_timing(seed: &str) -> Result<Vec<serde_json::Value>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rspcert"))
        .args(["random-batch", "4", "8", "2", "5", "--seed", seed])
        .env_remove("RSPCERT_BUDGET")
        .output()
        .map_err(|e| e.to_string())?;
    check(
        out.status.success(),
        format!("exit {:?}", out.status.code()),
    )?;
    String::from_utf8(out.stdout)
        .map_err(|e| e.to_string())?
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).map_err(|e| e.to_string())?;
            if let Some(obj) = v.as_object_mut() {
                obj.remove("timing_ms");
            }
            Ok(v)
        })
        .collect()
}

fn criterion_12() -> Outcome {
    let first = batch_without_timing("12")?;
    let second = batch_without_timing("12")?;
    check(first == second, "outputs differ between runs")?;
    Ok(format!("{} lines identical", first.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("unique pair certified with valid witness", criterion_1),
        (
            "rank-deficient and RSP-failing optima rejected, class G3",
            criterion_2,
        ),
        ("coherence fails, RSP succeeds, spark 2", criterion_3),
        ("three sparsest supports, one passes RSP", criterion_4),
        ("ℓ1 recovers a non-sparsest unique solution", criterion_5),
        ("order-K certifier agrees with recovery oracle", criterion_6),
        ("order-K monotonicity and implications", criterion_7),
        ("certified solutions are m-sparse", criterion_8),
        ("sparsest supports have full augmented rank", criterion_9),
        ("LP core matches exact rational oracle", criterion_10),
        (
            "weighted certification equals scaled certification",
            criterion_11,
        ),
        ("random batch replays byte-identically", criterion_12),
    ];
    let mut failed = 0;
    let start = Instant::now();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} ({detail}) [{ms} ms]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({detail}) [{ms} ms]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
