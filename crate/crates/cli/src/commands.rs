use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rspcert_core::order_k::{self, Property};
use rspcert_core::rsp::{self, UniquenessVerdict};
use rspcert_core::{l0, DenseMatrix, Parallelism, SearchLimits, ToleranceConfig, Verdict};
use serde_json::json;

use crate::args::{Cli, Command, GlobalArgs};
use crate::error::{exit, CliError};
use crate::io::{expect_len, read_matrix, read_vector};
use crate::report::{BatchRecord, BatchSummary, Inputs, ReportJson, SCHEMA_VERSION};

pub fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Yes => exit::YES,
        Verdict::No => exit::NO,
        Verdict::Marginal => exit::MARGINAL,
    }
}

struct Ctx {
    tol: ToleranceConfig,
    limits: SearchLimits,
    seed: Option<u64>,
}

impl Ctx {
    fn from_args(g: &GlobalArgs) -> Result<Self, CliError> {
        let d = ToleranceConfig::default();
        let tol = ToleranceConfig {
            feas_tol: g.tol_feas.unwrap_or(d.feas_tol),
            rank_tol: g.tol_rank.unwrap_or(d.rank_tol),
            rsp_margin: g.rsp_margin.unwrap_or(d.rsp_margin),
            gap_tol: g.gap_tol.unwrap_or(d.gap_tol),
            zero_tol: g.zero_tol.unwrap_or(d.zero_tol),
        };
        tol.validate()?;
        let mut limits = SearchLimits::default();
        if let Some(b) = g.budget {
            limits.subset_budget = b;
        }
        if g.sequential {
            limits.parallelism = Parallelism::Sequential;
        }
        Ok(Ctx {
            tol,
            limits,
            seed: g.seed,
        })
    }

    fn inputs(&self, paths: &[(&str, &Path)], a: &DenseMatrix) -> Inputs {
        Inputs {
            paths: paths
                .iter()
                .map(|(k, p)| (k.to_string(), p.display().to_string()))
                .collect(),
            rows: a.rows(),
            cols: a.cols(),
            tolerances: self.tol,
            subset_budget: self.limits.subset_budget,
            parameters: BTreeMap::new(),
        }
    }
}

/// Result of a single-report command.
struct Finished {
    exit_code: i32,
    inputs: Inputs,
    verdicts: serde_json::Value,
    seed: Option<u64>,
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(", "))
}

fn rhs(path: &Path, a: &DenseMatrix) -> Result<Vec<f64>, CliError> {
    let b = read_vector(path)?;
    expect_len(path, &b, a.rows(), "b")?;
    Ok(b)
}

fn column_vector(path: &Path, a: &DenseMatrix, what: &str) -> Result<Vec<f64>, CliError> {
    let v = read_vector(path)?;
    expect_len(path, &v, a.cols(), what)?;
    Ok(v)
}

fn print_uniqueness(out: &mut dyn Write, v: &UniquenessVerdict) -> std::io::Result<()> {
    writeln!(out, "support: {}", v.rsp.support)?;
    match v.rsp.t_star {
        Some(t) => writeln!(out, "rsp: {:?} (t* = {t})", v.rsp.holds)?,
        None => writeln!(out, "rsp: {:?} (check LP infeasible)", v.rsp.holds)?,
    }
    if let Some(eta) = &v.rsp.witness_eta {
        writeln!(out, "witness eta: {}", fmt_vec(eta))?;
    }
    writeln!(
        out,
        "rank: {} of {}{}",
        v.rank_found,
        v.rsp.support.len(),
        if v.rank_marginal { " (marginal)" } else { "" }
    )?;
    writeln!(out, "augmented rank: {}", v.augmented_rank)?;
    writeln!(out, "unique: {:?} (reason: {:?})", v.unique, v.reason)
}

fn solve_l1(
    ctx: &Ctx,
    a_path: &Path,
    b_path: &Path,
    out: &mut dyn Write,
) -> Result<Finished, CliError> {
    let a = read_matrix(a_path)?;
    let b = rhs(b_path, &a)?;
    let (x, v) = rsp::solve_and_certify(&a, &b, &ctx.tol)?;
    let objective: f64 = x.iter().sum();
    writeln!(out, "x: {}", fmt_vec(&x)).ok();
    writeln!(out, "objective: {objective}").ok();
    print_uniqueness(out, &v).ok();
    Ok(Finished {
        exit_code: verdict_exit(v.unique),
        inputs: ctx.inputs(&[("a", a_path), ("b", b_path)], &a),
        verdicts: json!({ "x": x, "objective": objective, "uniqueness": v }),
        seed: None,
    })
}

fn certify(
    ctx: &Ctx,
    a_path: &Path,
    b_path: &Path,
    x_path: &Path,
    w_path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<Finished, CliError> {
    let a = read_matrix(a_path)?;
    let b = rhs(b_path, &a)?;
    let x = column_vector(x_path, &a, "x")?;
    let mut paths = vec![("a", a_path), ("b", b_path), ("x", x_path)];
    let (v, weights) = match w_path {
        Some(p) => {
            let w = column_vector(p, &a, "weights")?;
            paths.push(("weights", p.as_path()));
            (
                rsp::certify_weighted_uniqueness(&a, &b, &w, &x, &ctx.tol)?,
                Some(w),
            )
        }
        None => (rsp::certify_uniqueness(&a, &b, &x, &ctx.tol)?, None),
    };
    print_uniqueness(out, &v).ok();
    Ok(Finished {
        exit_code: verdict_exit(v.unique),
        inputs: ctx.inputs(&paths, &a),
        verdicts: json!({ "uniqueness": v, "weights": weights }),
        seed: None,
    })
}

fn order_k_cmd(
    ctx: &Ctx,
    a_path: &Path,
    k: usize,
    property: Property,
    oracle: bool,
    trials: usize,
    out: &mut dyn Write,
) -> Result<Finished, CliError> {
    let a = read_matrix(a_path)?;
    let report = order_k::order_k(&a, property, k, &ctx.tol, &ctx.limits)?;
    writeln!(out, "{property} of order {k}: {:?}", report.holds).ok();
    if let Some(s) = &report.counterexample {
        writeln!(out, "counterexample: {s}").ok();
    }
    if let Some(f) = report.failure {
        writeln!(out, "failure: {f:?}").ok();
    }
    writeln!(
        out,
        "subsets checked: {}, skipped: {}",
        report.subsets_checked, report.subsets_skipped
    )
    .ok();
    let mut exit_code = verdict_exit(report.holds);
    let mut seed = None;
    let mut oracle_json = serde_json::Value::Null;
    let mut agreement = None;
    if oracle {
        let s = ctx.seed.unwrap_or(0);
        seed = Some(s);
        let o = order_k::recovery_oracle(&a, property, k, trials, s, &ctx.tol, &ctx.limits)?;
        if report.holds != Verdict::Marginal {
            let agree = (report.holds == Verdict::Yes) == o.recovered;
            agreement = Some(agree);
            if !agree {
                exit_code = exit::ORACLE_MISMATCH;
            }
        }
        writeln!(out, "oracle recovered: {}", o.recovered).ok();
        writeln!(
            out,
            "agreement: {}",
            agreement.map_or("n/a".to_string(), |b| b.to_string())
        )
        .ok();
        oracle_json = serde_json::to_value(&o)?;
    }
    let mut inputs = ctx.inputs(&[("a", a_path)], &a);
    inputs.parameters.insert("k".into(), json!(k));
    inputs.parameters.insert("property".into(), json!(property));
    if oracle {
        inputs.parameters.insert("trials".into(), json!(trials));
    }
    Ok(Finished {
        exit_code,
        inputs,
        verdicts: json!({ "order_k": report, "oracle": oracle_json, "agreement": agreement }),
        seed,
    })
}

fn classify(
    ctx: &Ctx,
    a_path: &Path,
    b_path: &Path,
    out: &mut dyn Write,
) -> Result<Finished, CliError> {
    let a = read_matrix(a_path)?;
    let b = rhs(b_path, &a)?;
    let class = l0::classify_system(&a, &b, &ctx.tol, &ctx.limits)?;
    let eq = l0::equivalence_from_report(&a, class.sparsest.clone(), &ctx.tol)?;
    writeln!(out, "class: {:?}", class.class).ok();
    writeln!(
        out,
        "l1 solution: {} (unique: {:?})",
        fmt_vec(&class.l1_solution),
        class.l1_verdict.unique
    )
    .ok();
    writeln!(out, "sparsest size: {}", class.sparsest.k_star).ok();
    for (s, v) in class.sparsest.supports.iter().zip(&eq.rsp_per_support) {
        writeln!(out, "  support {s}: rsp {v:?}").ok();
    }
    writeln!(out, "equivalence: {:?}", eq.verdict).ok();
    if let Some(s) = &eq.passing_support {
        writeln!(out, "rsp-passing support: {s}").ok();
    }
    let eq_json = json!({
        "verdict": eq.verdict,
        "rsp_per_support": eq.rsp_per_support,
        "passing_support": eq.passing_support,
    });
    Ok(Finished {
        exit_code: exit::YES,
        inputs: ctx.inputs(&[("a", a_path), ("b", b_path)], &a),
        verdicts: json!({ "classification": class, "equivalence": eq_json }),
        seed: None,
    })
}

fn lp_sparse(
    ctx: &Ctx,
    a_path: &Path,
    b_path: &Path,
    c_path: &Path,
    out: &mut dyn Write,
) -> Result<Finished, CliError> {
    let a = read_matrix(a_path)?;
    let b = rhs(b_path, &a)?;
    let c = column_vector(c_path, &a, "c")?;
    let r = rsp::lp_sparsest_pipeline(&a, &b, &c, &ctx.tol)?;
    writeln!(out, "d*: {}", r.d_star).ok();
    writeln!(out, "x: {}", fmt_vec(&r.x)).ok();
    print_uniqueness(out, &r.verdict).ok();
    Ok(Finished {
        exit_code: verdict_exit(r.verdict.unique),
        inputs: ctx.inputs(&[("a", a_path), ("b", b_path), ("c", c_path)], &a),
        verdicts: serde_json::to_value(&r)?,
        seed: None,
    })
}

fn gaussian(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<DenseMatrix, CliError> {
    let data = (0..m * n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(DenseMatrix::from_row_major(m, n, data)?)
}

/// Streams one JSON record per instance followed by a summary line.
#[allow(clippy::too_many_arguments)]
fn random_batch(
    ctx: &Ctx,
    m: usize,
    n: usize,
    k: usize,
    count: usize,
    trials: usize,
    json_out: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let start = Instant::now();
    let seed = ctx.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::with_capacity(count + 1);
    let (mut compared, mut agreements, mut marginal) = (0, 0, 0);
    for index in 0..count {
        let a = gaussian(m, n, &mut rng)?;
        let report = order_k::rsp_order_k(&a, k, &ctx.tol, &ctx.limits)?;
        let oracle = order_k::uniform_recovery_oracle(&a, k, trials, seed, &ctx.tol, &ctx.limits)?;
        let agreement = if report.holds == Verdict::Marginal {
            marginal += 1;
            None
        } else {
            compared += 1;
            let agree = (report.holds == Verdict::Yes) == oracle.recovered;
            agreements += usize::from(agree);
            Some(agree)
        };
        let record = BatchRecord {
            index,
            holds: report.holds,
            counterexample: report.counterexample,
            oracle,
            agreement,
        };
        let line = serde_json::to_string(&record)?;
        writeln!(out, "{line}").ok();
        lines.push(line);
    }
    let exit_code = if agreements == compared {
        exit::YES
    } else {
        exit::ORACLE_MISMATCH
    };
    let mut parameters = BTreeMap::new();
    parameters.insert("k".into(), json!(k));
    parameters.insert("count".into(), json!(count));
    parameters.insert("trials".into(), json!(trials));
    let summary = BatchSummary {
        schema_version: SCHEMA_VERSION.into(),
        command: "random-batch".into(),
        inputs: Inputs {
            paths: BTreeMap::new(),
            rows: m,
            cols: n,
            tolerances: ctx.tol,
            subset_budget: ctx.limits.subset_budget,
            parameters,
        },
        count,
        compared,
        agreements,
        marginal,
        agreement_rate: if compared == 0 {
            1.0
        } else {
            agreements as f64 / compared as f64
        },
        exit_code,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
        seed,
    };
    let line = serde_json::to_string(&summary)?;
    writeln!(out, "{line}").ok();
    lines.push(line);
    if let Some(p) = json_out.filter(|p| *p != Path::new("-")) {
        let mut text = lines.join("\n");
        text.push('\n');
        std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?;
    }
    Ok(exit_code)
}

fn write_report(path: &Path, report: &ReportJson, out: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)?;
    if path == Path::new("-") {
        writeln!(out, "{text}").ok();
        return Ok(());
    }
    std::fs::write(path, text + "\n").map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn dispatch(ctx: &Ctx, command: &Command, out: &mut dyn Write) -> Result<Finished, CliError> {
    match command {
        Command::SolveL1 { a, b } => solve_l1(ctx, a, b, out),
        Command::Certify { a, b, x, weights } => certify(ctx, a, b, x, weights.as_ref(), out),
        Command::OrderK {
            a,
            k,
            property,
            oracle,
            trials,
        } => order_k_cmd(ctx, a, *k, *property, *oracle, *trials, out),
        Command::Classify { a, b } => classify(ctx, a, b, out),
        Command::LpSparse { a, b, c } => lp_sparse(ctx, a, b, c, out),
        Command::RandomBatch { .. } => unreachable!("handled by run"),
    }
}

/// Runs a parsed command line, writing human-readable output to `out` and
/// diagnostics to stderr. With `--json -` only the report goes to `out`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let ctx = match Ctx::from_args(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Command::RandomBatch {
        m,
        n,
        k,
        count,
        trials,
    } = cli.command
    {
        return random_batch(
            &ctx,
            m,
            n,
            k,
            count,
            trials,
            cli.global.json.as_deref(),
            out,
        )
        .unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        });
    }
    let json_to_stdout = cli.global.json.as_deref() == Some(Path::new("-"));
    let mut sink = std::io::sink();
    let human: &mut dyn Write = if json_to_stdout { &mut sink } else { out };
    let (exit_code, finished) = match dispatch(&ctx, &cli.command, human) {
        Ok(f) => (f.exit_code, Some(f)),
        Err(e) => {
            eprintln!("error: {e}");
            (e.exit_code(), None)
        }
    };
    if let Some(path) = &cli.global.json {
        let report = match finished {
            Some(f) => ReportJson {
                schema_version: SCHEMA_VERSION.into(),
                command: cli.command.name().into(),
                inputs: f.inputs,
                verdicts: f.verdicts,
                exit_code,
                timing_ms: start.elapsed().as_secs_f64() * 1e3,
                seed: f.seed,
            },
            None => return exit_code,
        };
        if let Err(e) = write_report(path, &report, out) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    exit_code
}
