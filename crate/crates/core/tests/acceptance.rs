//! Acceptance suite. Prints one pass/fail line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use retract_iter::certify::{
    check_fixed_transfer, check_retraction, check_total, check_weakly_inward_1d, estimate_kn,
    PhiSpec, SampleSpec, Verdict,
};
use retract_iter::cli;
use retract_iter::diagnostics::{check_trace_bound, residual_decay, verify_recursive_bound};
use retract_iter::iterate::{
    run_scheme, IterTrace, RunConfig, Scheme, StepSequence, SummableSequence,
};
use retract_iter::mapexpr::{parse, ParseErrorKind};
use retract_iter::mappings::{registry_get, Builtin, MappingDef, MappingPair, RetractionDef};
use retract_iter::space::{ConvexDomain, Vector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn v1(x: f64) -> Vector {
    Vector::scalar(x).unwrap()
}

fn half() -> StepSequence {
    StepSequence::Constant(0.5)
}

fn example_run(x1: f64, cfg: impl FnOnce(RunConfig) -> RunConfig) -> IterTrace {
    let c = cfg(RunConfig::new(Scheme::PaperB, half(), half(), v1(x1)));
    run_scheme(&c, &MappingPair::paper_example(), Some(&v1(0.0))).unwrap()
}

/// The scheme written out by hand for the interval example, P = identity.
fn oracle(x1: f64, alpha: f64, beta: f64, steps: usize) -> Vec<f64> {
    let t1 = |x: f64| {
        if x >= 0.0 {
            -2.0 * (x / 2.0).sin()
        } else {
            2.0 * (x / 2.0).sin()
        }
    };
    let t2 = |x: f64| x.abs();
    let power = |f: &dyn Fn(f64) -> f64, n: usize, mut x: f64| {
        for _ in 0..n {
            x = f(x);
        }
        x
    };
    let mut xs = vec![x1];
    let mut x = x1;
    for n in 1..steps {
        let y = (1.0 - beta) * x + beta * power(&t1, n, x);
        x = (1.0 - alpha) * power(&t1, n, y) + alpha * power(&t2, n, y);
        xs.push(x);
    }
    xs
}

fn seeded_starts() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..20).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let demo = cli::cmd_demo(Some(dir.path())).map_err(|e| e.to_string())?;
    let trace = &demo.run.trace;
    let last = trace.rows.last().unwrap();
    ensure(last.x[0].abs() < 1e-8 && trace.len() <= 200, || {
        format!(
            "demo ended at |x_N| = {:e} after {} rows",
            last.x[0].abs(),
            trace.len()
        )
    })?;

    for x1 in seeded_starts() {
        let t = example_run(x1, |c| c);
        let x = t.rows.last().unwrap().x[0];
        ensure(x.abs() < 1e-8 && t.len() <= 200, || {
            format!("start {x1}: |x_N| = {:e} after {} rows", x.abs(), t.len())
        })?;
    }

    let mut worst: f64 = 0.0;
    for x1 in [1.0].into_iter().chain(seeded_starts()) {
        let t = example_run(x1, |c| c.fixed_length(50));
        let want = oracle(x1, 0.5, 0.5, 50);
        for (row, w) in t.rows.iter().zip(&want) {
            worst = worst.max((row.x[0] - w).abs());
        }
        ensure(t.len() == 50, || {
            format!("start {x1}: expected 50 rows, got {}", t.len())
        })?;
    }
    ensure(worst <= 1e-12, || {
        format!("engine and oracle differ by {worst:e}")
    })?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "demo |x_N| = {:e} in {} rows, 20/20 seeded starts converge, oracle gap {worst:e}, {elapsed:.2?}",
        last.x[0].abs(),
        trace.len()
    ))
}

fn criterion_2() -> Outcome {
    let t = example_run(1.0, |c| c.fixed_length(500));
    ensure(t.len() == 500, || {
        format!("expected 500 rows, got {}", t.len())
    })?;
    let tail = t.rows[450..].iter().map(|r| r.r_max()).fold(0.0, f64::max);
    ensure(tail < 1e-6, || format!("tail residual {tail:e}"))?;
    let decay = residual_decay(&t, 50, 1e-6).map_err(|e| e.to_string())?;
    ensure(decay.verdict == Verdict::Pass, || format!("{decay:?}"))?;
    Ok(format!(
        "tail max residual {tail:e}, first-window max {:.3e}",
        decay.first_max
    ))
}

fn criterion_3() -> Outcome {
    let mut runs = vec![example_run(1.0, |c| c.fixed_length(500))];
    runs.extend(
        seeded_starts()
            .into_iter()
            .map(|x1| example_run(x1, |c| c.fixed_length(100))),
    );
    let summable = SummableSequence::InversePower { c: 1.0, p: 2.0 };
    for t in &runs {
        let a = t.dist_p().unwrap();
        let zeros = vec![0.0; a.len() - 1];
        let r = verify_recursive_bound(&a, &zeros, &zeros, 1e-9).map_err(|e| e.to_string())?;
        ensure(r.violations.is_empty(), || {
            format!("monotone bound violated: {:?}", r.violations[0])
        })?;
        let r = check_trace_bound(t, &summable, &summable, 2.0, 1.0, PhiSpec::Identity, 1e-9)
            .map_err(|e| e.to_string())?;
        ensure(
            r.violations.is_empty() && r.verdict == Verdict::Pass,
            || format!("perturbed bound: {r:?}"),
        )?;
    }
    Ok(format!(
        "{} traces, zero violations with b = c = 0 and with mu = lambda = 1/n^2",
        runs.len()
    ))
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let k = ConvexDomain::interval(-1.0, 1.0).unwrap();
    let id = RetractionDef::identity_on(k.clone());
    let samples = SampleSpec::new(2000, 42, k.clone());
    let mut largest: f64 = 0.0;
    for name in ["paper_t1", "paper_t2"] {
        let m = registry_get(name).unwrap();
        let kn = estimate_kn(&m, &id, &samples, 10).map_err(|e| e.to_string())?;
        ensure(kn.per_n.len() == 10, || {
            format!("{name}: {} rows", kn.per_n.len())
        })?;
        for row in &kn.per_n {
            largest = largest.max(row.value);
            ensure(row.value <= 1.0 + 1e-9, || {
                format!("{name}: k_{} = {}", row.n, row.value)
            })?;
        }
        let total = check_total(
            &m,
            &id,
            &SummableSequence::Zero,
            &SummableSequence::Zero,
            PhiSpec::Identity,
            &samples,
            10,
        )
        .map_err(|e| e.to_string())?;
        ensure(total.verdict == Verdict::Pass, || {
            format!("{name}: check_total margin {}", total.margin)
        })?;
    }
    let doubling = MappingDef::builtin(
        Builtin::Affine {
            a: vec![vec![2.0]],
            b: vec![0.0],
        },
        k.clone(),
    )
    .unwrap();
    let proj = RetractionDef::metric_projection(k);
    let total = check_total(
        &doubling,
        &proj,
        &SummableSequence::Zero,
        &SummableSequence::Zero,
        PhiSpec::Identity,
        &samples,
        10,
    )
    .map_err(|e| e.to_string())?;
    let first = &total.per_n[0];
    ensure(
        total.verdict == Verdict::Fail && first.n == 1 && first.value >= 0.5,
        || {
            format!(
                "doubling map: verdict {}, n = 1 margin {}",
                total.verdict, first.value
            )
        },
    )?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "max k_n = {largest}, doubling map margin {:.4} at n = 1, {elapsed:.2?}",
        first.value
    ))
}

fn criterion_5() -> Outcome {
    let interval = ConvexDomain::interval(-1.0, 1.0).unwrap();
    let ball = ConvexDomain::ball(Vector::zeros(2).unwrap(), 1.0).unwrap();
    let grid = [0.0, 0.5, 1.0, 2.0, 10.0];
    let mut out = Vec::new();
    for (label, k, need_sunny) in [("interval", interval, true), ("ball", ball, false)] {
        let spec = SampleSpec::new(500, 5, k.clone()).exterior().unwrap();
        let r = check_retraction(&RetractionDef::metric_projection(k), &spec, &grid)
            .map_err(|e| e.to_string())?;
        ensure(r.idempotence.value <= 1e-12, || {
            format!("{label} idempotence {}", r.idempotence.value)
        })?;
        ensure(r.nonexpansive.value <= 1e-12, || {
            format!("{label} nonexpansive {}", r.nonexpansive.value)
        })?;
        if need_sunny {
            ensure(r.sunny.value <= 1e-12, || {
                format!("{label} sunny {}", r.sunny.value)
            })?;
        }
        out.push(format!(
            "{label}: idem {:e}, nonexp {:e}, sunny {:e}",
            r.idempotence.value, r.nonexpansive.value, r.sunny.value
        ));
    }
    Ok(out.join("; "))
}

fn criterion_6() -> Outcome {
    let k = ConvexDomain::interval(-1.0, 1.0).unwrap();
    let id = RetractionDef::identity_on(k);
    for name in ["paper_t1", "paper_t2"] {
        let rows = check_fixed_transfer(&registry_get(name).unwrap(), &id, &[v1(0.0)], 1e-12)
            .map_err(|e| e.to_string())?;
        let r = &rows[0];
        ensure(
            r.pt_residual < 1e-12 && r.t_residual < 1e-12 && r.agree(),
            || format!("{name} at 0: {r:?}"),
        )?;
    }
    let unit = ConvexDomain::interval(0.0, 1.0).unwrap();
    let shift = MappingDef::expression(&["x + 1"], unit.clone()).unwrap();
    let clamp = RetractionDef::metric_projection(unit);
    let rows =
        check_fixed_transfer(&shift, &clamp, &[v1(1.0)], 1e-12).map_err(|e| e.to_string())?;
    let r = &rows[0];
    ensure(
        r.in_f_pt && !r.in_f_t && !r.agree() && r.note.is_some(),
        || format!("x + 1 at 1: {r:?}"),
    )?;
    let inward = check_weakly_inward_1d(&shift).map_err(|e| e.to_string())?;
    ensure(inward.verdict == Verdict::Fail, || {
        format!("x + 1 reported weakly inward: {inward:?}")
    })?;
    Ok(format!(
        "example agrees at 0; x + 1 on [0, 1] disagrees at 1 (|PTx - x| = {}, |Tx - x| = {}), weakly inward fails",
        r.pt_residual, r.t_residual
    ))
}

fn same_map_pair(t: MappingDef) -> MappingPair {
    let k = t.domain.clone();
    MappingPair::new(
        t.clone(),
        t,
        RetractionDef::metric_projection(k),
        Default::default(),
    )
    .unwrap()
}

fn criterion_7() -> Outcome {
    let k = ConvexDomain::interval(-1.0, 1.0).unwrap();
    for t in [
        registry_get("paper_t1").unwrap(),
        MappingDef::builtin(Builtin::ScaledSin { c: 0.9 }, k.clone()).unwrap(),
    ] {
        let pair = same_map_pair(t);
        for x1 in [1.0, -0.3] {
            let cfg = RunConfig::new(Scheme::PaperB, half(), StepSequence::Constant(0.7), v1(x1))
                .fixed_length(60);
            let trace = run_scheme(&cfg, &pair, None).map_err(|e| e.to_string())?;
            ensure(trace.rows.iter().all(|r| r.power_gap == Some(0.0)), || {
                format!("nonzero power gap from {x1}")
            })?;
        }
    }

    let pair = MappingPair::paper_example();
    for x1 in [1.0, -1.0, 0.4] {
        let cfg = RunConfig::new(Scheme::PaperB, half(), StepSequence::Constant(0.0), v1(x1))
            .fixed_length(60);
        let trace = run_scheme(&cfg, &pair, None).map_err(|e| e.to_string())?;
        ensure(
            trace.rows.iter().all(|r| r.y.as_ref() == Some(&r.x)),
            || format!("beta = 0: y differs from x from {x1}"),
        )?;
    }

    let k2 = ConvexDomain::ball(Vector::zeros(2).unwrap(), 2.0).unwrap();
    for k in [k, k2] {
        let pair = same_map_pair(MappingDef::builtin(Builtin::Identity, k.clone()).unwrap());
        let x1 = Vector::new(vec![0.3; k.dim()]).unwrap();
        for scheme in [Scheme::PaperB, Scheme::Mann, Scheme::Ishikawa] {
            let cfg = RunConfig::new(scheme, half(), StepSequence::Constant(0.25), x1.clone())
                .fixed_length(30);
            let trace = run_scheme(&cfg, &pair, None).map_err(|e| e.to_string())?;
            ensure(
                trace.len() == 30 && trace.rows.iter().all(|r| r.x == x1) && trace.final_x == x1,
                || format!("{} moved under the identity", scheme.name()),
            )?;
        }
    }
    Ok("power gap identically 0, y = x under beta = 0, identity stationary for all schemes".into())
}

const SHARED: &str = r#"
[space]
dim = 1

[domain]
kind = "interval"
lo = -1.0
hi = 1.0

[mappings]
t1 = { builtin = "paper_t1" }
t2 = { expr = ["x >= 0 ? x : -x"] }
retraction = { kind = "projection" }

[certify]
samples = 400
seed = 11
n_max = 6
fixed_points = [[0.0]]
"#;

const SINGLE_SCHEME: &str = r#"
[scheme]
kind = "paper_b"
x1 = [0.7]
max_iter = 80
stop_at_tol = false
"#;

const SCHEME_BLOCKS: &str = r#"
[[scheme]]
kind = "paper_b"
x1 = [0.7]
max_iter = 80
stop_at_tol = false

[[scheme]]
kind = "mann"
alpha = { clipped_harmonic = { eps = 0.05, scale = 1.0 } }
x1 = [0.7]

[[scheme]]
kind = "ishikawa"
beta = { constant = 0.3 }
x1 = [0.7]
"#;

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_retract-iter");
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("compare.toml");
    fs::write(&cfg, format!("{SHARED}{SCHEME_BLOCKS}")).unwrap();
    let single = root.path().join("run.toml");
    fs::write(&single, format!("{SHARED}{SINGLE_SCHEME}")).unwrap();
    let commands: [(&str, Vec<String>); 4] = [
        ("run", vec!["run".into(), single.display().to_string()]),
        (
            "certify",
            vec!["certify".into(), single.display().to_string()],
        ),
        ("compare", vec!["compare".into(), cfg.display().to_string()]),
        ("demo", vec!["demo".into()]),
    ];
    let mut compared = 0;
    for (name, args) in commands {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = root.path().join(format!("{name}_{rep}"));
            let status = Command::new(bin)
                .args(&args)
                .arg("--out")
                .arg(&out)
                .env_remove(cli::config::SEED_ENV)
                .output()
                .unwrap();
            ensure(
                status.status.code().is_some_and(|c| c == 0 || c == 2),
                || {
                    format!(
                        "{name} exited {:?}: {}",
                        status.status.code(),
                        String::from_utf8_lossy(&status.stderr)
                    )
                },
            )?;
            outputs.push(csv_bytes(&out));
        }
        ensure(!outputs[0].is_empty(), || {
            format!("{name} wrote no CSV files")
        })?;
        ensure(outputs[0] == outputs[1], || {
            format!("{name} output differs between invocations")
        })?;
        compared += outputs[0].len();
    }
    Ok(format!("run, certify, compare, demo: {compared} CSV files bitwise identical across two invocations"))
}

const VALID: &[(&str, usize)] = &[
    ("x >= 0 ? -2*sin(x/2) : 2*sin(x/2)", 1),
    ("x >= 0 ? x : -x", 1),
    ("abs(x)", 1),
    ("x", 1),
    ("x0", 1),
    ("-x", 1),
    ("--x", 1),
    ("1.5e-3 * x", 1),
    ("2E+2 - 0.5", 1),
    ("clamp(x, -1, 1)", 1),
    ("max(min(x, 1), -1)", 1),
    ("tanh(x) + cos(x) - tan(x)", 1),
    ("exp(-x*x)", 1),
    ("sqrt(abs(x)) / 3", 1),
    ("x0 * x1 - x1 / (1 + x0*x0)", 2),
    ("x0 == x1 ? 0 : 1", 2),
    ("(x < 0) * x", 1),
    ("1 - -1", 1),
    ("log(1 + x*x)", 1),
    ("x > 0 ? (x < 1 ? x : 1) : 0", 1),
    ("x <= 0.5 ? 1 : x > 0.9 ? 2 : 3", 1),
    ("  0.25  ", 1),
    ("clamp(x2, x0, x1)", 3),
];

const INVALID: &[(&str, usize, ParseErrorKind, usize)] = &[
    ("sin(", 1, ParseErrorKind::UnclosedParen, 4),
    ("sin(x", 1, ParseErrorKind::UnclosedParen, 5),
    ("(x + 1", 1, ParseErrorKind::UnclosedParen, 6),
    ("((x)", 1, ParseErrorKind::UnclosedParen, 4),
    ("1 + sin(x", 1, ParseErrorKind::UnclosedParen, 9),
    ("", 1, ParseErrorKind::UnexpectedToken, 0),
    ("x +", 1, ParseErrorKind::UnexpectedToken, 3),
    ("* x", 1, ParseErrorKind::UnexpectedToken, 0),
    ("x 1", 1, ParseErrorKind::UnexpectedToken, 2),
    ("2 ^ 3", 1, ParseErrorKind::UnexpectedToken, 2),
    ("x )", 1, ParseErrorKind::UnexpectedToken, 2),
    ("x ? 1", 1, ParseErrorKind::UnexpectedToken, 5),
    ("x # 2", 1, ParseErrorKind::UnexpectedToken, 2),
    ("1.5e", 1, ParseErrorKind::BadNumber, 0),
    ("x + 3x", 1, ParseErrorKind::BadNumber, 4),
    (".5", 1, ParseErrorKind::BadNumber, 0),
    ("1e999", 1, ParseErrorKind::BadNumber, 0),
    ("foo(x)", 1, ParseErrorKind::UnknownFunction, 0),
    ("x + y", 1, ParseErrorKind::UnknownFunction, 4),
    ("x2", 2, ParseErrorKind::UnknownFunction, 0),
    ("x", 2, ParseErrorKind::UnknownFunction, 0),
    ("x(1)", 1, ParseErrorKind::UnknownFunction, 0),
    ("max(x)", 1, ParseErrorKind::Arity, 0),
    ("1 + sin(x, x)", 1, ParseErrorKind::Arity, 4),
    ("sin", 1, ParseErrorKind::Arity, 0),
    ("clamp(x, 1)", 1, ParseErrorKind::Arity, 0),
];

fn criterion_9() -> Outcome {
    for (src, dim) in VALID {
        let e = parse(src, *dim).map_err(|err| format!("`{src}` rejected: {err}"))?;
        let printed = e.to_string();
        let again = parse(&printed, *dim)
            .map_err(|err| format!("`{printed}` (from `{src}`) rejected: {err}"))?;
        ensure(again == e, || {
            format!("`{src}` does not round-trip through `{printed}`")
        })?;
        ensure(again.to_string() == printed, || {
            format!("`{src}` prints unstably")
        })?;
    }
    for (src, dim, kind, pos) in INVALID {
        match parse(src, *dim) {
            Ok(e) => return Err(format!("`{src}` accepted as {e}")),
            Err(err) => ensure(
                err.kind == *kind && err.position == *pos && err.position <= src.len(),
                || {
                    format!(
                        "`{src}`: expected {kind} at {pos}, got {} at {}",
                        err.kind, err.position
                    )
                },
            )?,
        }
    }
    let t1 = parse(VALID[0].0, 1).unwrap();
    let t2 = parse(VALID[1].0, 1).unwrap();
    for x in [-1.0, -0.4, 0.0, 0.3, 1.0] {
        let want = if x >= 0.0 {
            -2.0 * (x / 2.0f64).sin()
        } else {
            2.0 * (x / 2.0f64).sin()
        };
        ensure(
            t1.eval(&[x]) == Ok(want) && t2.eval(&[x]) == Ok(x.abs()),
            || format!("example mappings differ at {x}"),
        )?;
    }
    Ok(format!(
        "{} valid vectors round-trip, {} invalid vectors report kind and position",
        VALID.len(),
        INVALID.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("example convergence", criterion_1),
        ("residual vanishing", criterion_2),
        ("recursive bound", criterion_3),
        ("certification of the example", criterion_4),
        ("retraction properties", criterion_5),
        ("fixed-point transfer", criterion_6),
        ("scheme equivalences", criterion_7),
        ("determinism", criterion_8),
        ("parser corpus", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
