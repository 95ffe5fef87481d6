//! The two-mapping scheme and its Mann and Ishikawa baselines.
//!
//! At step `n` the two-mapping scheme computes
//!
//! ```text
//! y_n     = (1 − β_n) x_n + β_n (PT₁)ⁿ x_n
//! x_{n+1} = (1 − α_n) (PT₁)ⁿ y_n + α_n (PT₂)ⁿ y_n
//! ```
//!
//! with `(PT)ⁿ` evaluated by literal composition every step, so a run of
//! `N` steps costs `O(N²)` mapping evaluations.

use std::fmt;
use std::thread;

use crate::error::{invalid, Error, Result};
use crate::mappings::{
    apply, pt_power, retract, MappingDef, MappingPair, RetractionDef, DOMAIN_TOL,
};
use crate::space::{ConvexDomain, NormSpec, Vector};

/// Iterates farther than this from `K` after a convex combination are
/// projected back; closer ones are kept as computed.
pub const DRIFT_TOL: f64 = 1e-12;
/// A step shorter than this counts towards stagnation.
pub const STAGNATION_DELTA: f64 = 1e-16;
/// Consecutive short steps that end a run.
pub const STAGNATION_STEPS: usize = 10;

/// Anything indexed by `n ≥ 1`.
pub trait Sequence {
    fn value(&self, n: usize) -> Result<f64>;
}

pub fn seq_value<S: Sequence + ?Sized>(s: &S, n: usize) -> Result<f64> {
    s.value(n)
}

/// Step sizes `α_n`, `β_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSequence {
    /// A fixed value in `[0, 1]`.
    Constant(f64),
    /// `max(eps, min(1 − eps, scale / n))`.
    ClippedHarmonic { eps: f64, scale: f64 },
    /// Explicit values in `[0, 1]` for `n = 1..=len`.
    Table(Vec<f64>),
}

impl StepSequence {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        match self {
            StepSequence::Constant(c) if !in_unit(*c) => {
                Err(invalid(format!("constant step {c} is outside [0, 1]")))
            }
            StepSequence::ClippedHarmonic { eps, scale } => {
                if !(*eps > 0.0 && *eps < 0.5) {
                    return Err(invalid(format!(
                        "clipped_harmonic eps must be in (0, 0.5), got {eps}"
                    )));
                }
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(invalid(format!(
                        "clipped_harmonic scale must be positive, got {scale}"
                    )));
                }
                Ok(())
            }
            StepSequence::Table(values) => {
                if values.is_empty() {
                    return Err(invalid("step table is empty"));
                }
                match values.iter().position(|v| !in_unit(*v)) {
                    Some(i) => Err(invalid(format!(
                        "step table entry {} = {} is outside [0, 1]",
                        i + 1,
                        values[i]
                    ))),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// The largest `ε` with every value in `[ε, 1 − ε]`, if positive.
    pub fn margin(&self) -> Option<f64> {
        let m = match self {
            StepSequence::Constant(c) => c.min(1.0 - c),
            StepSequence::ClippedHarmonic { eps, .. } => *eps,
            StepSequence::Table(values) => values
                .iter()
                .map(|v| v.min(1.0 - v))
                .fold(f64::INFINITY, f64::min),
        };
        (m > 0.0).then_some(m)
    }
}

impl Sequence for StepSequence {
    fn value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(invalid("sequences are indexed from n = 1"));
        }
        match self {
            StepSequence::Constant(c) => Ok(*c),
            StepSequence::ClippedHarmonic { eps, scale } => {
                Ok((scale / n as f64).min(1.0 - eps).max(*eps))
            }
            StepSequence::Table(values) => table_entry(values, n),
        }
    }
}

/// Nonnegative sequences with a finite sum (`μ_n`, `λ_n`).
#[derive(Debug, Clone, PartialEq)]
pub enum SummableSequence {
    Zero,
    /// `c / n^p`, `p > 1`.
    InversePower {
        c: f64,
        p: f64,
    },
    /// `c · r^(n−1)`, `0 < r < 1`.
    Geometric {
        c: f64,
        r: f64,
    },
    /// Explicit values plus a declared bound on their total.
    Table {
        values: Vec<f64>,
        sum_bound: f64,
    },
}

impl SummableSequence {
    pub fn validate(&self) -> Result<()> {
        match self {
            SummableSequence::Zero => Ok(()),
            SummableSequence::InversePower { c, p } => {
                if !(*c >= 0.0 && c.is_finite()) || !(*p > 1.0 && p.is_finite()) {
                    return Err(invalid(format!(
                        "inverse_power needs c ≥ 0 and p > 1, got c={c}, p={p}"
                    )));
                }
                Ok(())
            }
            SummableSequence::Geometric { c, r } => {
                if !(*c >= 0.0 && c.is_finite()) || !(*r > 0.0 && *r < 1.0) {
                    return Err(invalid(format!(
                        "geometric needs c ≥ 0 and 0 < r < 1, got c={c}, r={r}"
                    )));
                }
                Ok(())
            }
            SummableSequence::Table { values, sum_bound } => {
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(invalid(
                        "summable table entries must be finite and non-negative",
                    ));
                }
                let total: f64 = values.iter().sum();
                if !(sum_bound.is_finite() && *sum_bound >= total) {
                    return Err(invalid(format!(
                        "summable table needs a finite sum bound ≥ {total}, got {sum_bound}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Closed-form upper bound on `Σ_{n≥1} s_n`.
    pub fn sum_bound(&self) -> f64 {
        match self {
            SummableSequence::Zero => 0.0,
            // 1 + ∫_1^∞ t^{−p} dt
            SummableSequence::InversePower { c, p } => c * (1.0 + 1.0 / (p - 1.0)),
            SummableSequence::Geometric { c, r } => c / (1.0 - r),
            SummableSequence::Table { sum_bound, .. } => *sum_bound,
        }
    }
}

impl Sequence for SummableSequence {
    fn value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(invalid("sequences are indexed from n = 1"));
        }
        match self {
            SummableSequence::Zero => Ok(0.0),
            SummableSequence::InversePower { c, p } => Ok(c / (n as f64).powf(*p)),
            SummableSequence::Geometric { c, r } => Ok(c * r.powi((n - 1) as i32)),
            SummableSequence::Table { values, .. } => table_entry(values, n),
        }
    }
}

fn table_entry(values: &[f64], n: usize) -> Result<f64> {
    values.get(n - 1).copied().ok_or_else(|| {
        invalid(format!(
            "table exhausted: n = {n} but only {} entries",
            values.len()
        ))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    PaperB,
    Mann,
    Ishikawa,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::PaperB => "paper_b",
            Scheme::Mann => "mann",
            Scheme::Ishikawa => "ishikawa",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub alpha: StepSequence,
    pub beta: StepSequence,
    pub x1: Vector,
    pub max_iter: usize,
    pub residual_tol: f64,
    pub record_power_gap: bool,
    /// Stop at the first `n` with `max(r1, r2) ≤ residual_tol`.
    pub stop_at_tol: bool,
    /// Stop after [`STAGNATION_STEPS`] consecutive steps shorter than
    /// [`STAGNATION_DELTA`].
    pub stop_on_stagnation: bool,
}

impl RunConfig {
    pub fn new(scheme: Scheme, alpha: StepSequence, beta: StepSequence, x1: Vector) -> Self {
        RunConfig {
            scheme,
            alpha,
            beta,
            x1,
            max_iter: 500,
            residual_tol: 1e-8,
            record_power_gap: true,
            stop_at_tol: true,
            stop_on_stagnation: true,
        }
    }

    /// Runs exactly `max_iter` steps regardless of residuals or step size.
    pub fn fixed_length(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self.stop_at_tol = false;
        self.stop_on_stagnation = false;
        self
    }

    fn validate(&self, domain: &ConvexDomain) -> Result<()> {
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return Err(invalid(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        self.alpha.validate()?;
        self.beta.validate()?;
        self.x1.check_dim(domain.dim())?;
        if !domain.contains(&self.x1, DOMAIN_TOL, NormSpec::Euclidean)? {
            return Err(invalid(format!("x1 = {} lies outside the domain", self.x1)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    TolReached,
    MaxIter,
    Stagnation,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::TolReached => "tol-reached",
            Terminal::MaxIter => "max-iter",
            Terminal::Stagnation => "stagnation",
        })
    }
}

/// One iteration. The row that meets the residual tolerance carries no
/// `y`, `power_gap` or `step_delta`, since no further step is taken.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub x: Vector,
    pub y: Option<Vector>,
    pub r1: f64,
    pub r2: f64,
    pub dist_p: Option<f64>,
    pub power_gap: Option<f64>,
    pub step_delta: Option<f64>,
}

impl TraceRow {
    pub fn r_max(&self) -> f64 {
        self.r1.max(self.r2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterTrace {
    pub scheme: Scheme,
    pub rows: Vec<TraceRow>,
    pub terminal: Terminal,
    /// The last iterate computed; `x_{N+1}` when the run ended after a step.
    pub final_x: Vector,
    pub norm: NormSpec,
}

impl IterTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_r_max(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, TraceRow::r_max)
    }

    pub fn dist_p(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.dist_p).collect()
    }
}

/// `u + t·(w − u)`: the convex combination `(1 − t) u + t w`, written so
/// that `w = u` or `t = 0` returns `u` exactly.
fn convex_step(u: &Vector, t: f64, w: &Vector) -> Result<Vector> {
    let coords: Vec<f64> = u
        .as_slice()
        .iter()
        .zip(w.as_slice())
        .map(|(a, b)| a + t * (b - a))
        .collect();
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("convex combination".into()));
    }
    Vector::new(coords)
}

fn settle(domain: &ConvexDomain, v: Vector) -> Result<Vector> {
    if domain.distance(&v, NormSpec::Euclidean)? > DRIFT_TOL {
        domain.project(&v)
    } else {
        Ok(v)
    }
}

fn residual(t: &MappingDef, p: &RetractionDef, x: &Vector, norm: NormSpec) -> Result<f64> {
    norm.dist(x, &retract(p, &apply(t, x)?)?)
}

struct Step {
    y: Option<Vector>,
    next: Vector,
    power_gap: Option<f64>,
}

fn step(cfg: &RunConfig, pair: &MappingPair, n: usize, x: &Vector) -> Result<Step> {
    let (t1, t2, p) = (&pair.t1, &pair.t2, &pair.p);
    let domain = pair.domain();
    let alpha = cfg.alpha.value(n)?;
    let beta = cfg.beta.value(n)?;
    Ok(match cfg.scheme {
        Scheme::PaperB => {
            let y = settle(domain, convex_step(x, beta, &pt_power(t1, p, n, x)?)?)?;
            let u = pt_power(t1, p, n, &y)?;
            let w = pt_power(t2, p, n, &y)?;
            let power_gap = if cfg.record_power_gap {
                Some(pair.norm.dist(&u, &w)?)
            } else {
                None
            };
            Step {
                next: settle(domain, convex_step(&u, alpha, &w)?)?,
                y: Some(y),
                power_gap,
            }
        }
        Scheme::Mann => Step {
            next: settle(domain, convex_step(x, alpha, &pt_power(t1, p, n, x)?)?)?,
            y: None,
            power_gap: None,
        },
        Scheme::Ishikawa => {
            let y = settle(domain, convex_step(x, beta, &pt_power(t1, p, n, x)?)?)?;
            let u = pt_power(t1, p, n, &y)?;
            Step {
                next: settle(domain, convex_step(x, alpha, &u)?)?,
                y: Some(y),
                power_gap: None,
            }
        }
    })
}

fn at_step(n: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NonFinite(cause) => Error::NumericalBlowup { n, cause },
        Error::InvalidInput(msg) => Error::InvalidInput(format!("step {n}: {msg}")),
        other => Error::NumericalBlowup {
            n,
            cause: other.to_string(),
        },
    }
}

/// Runs one scheme from `cfg.x1`. `reference_p`, when given, fills the
/// `dist_p` column.
pub fn run_scheme(
    cfg: &RunConfig,
    pair: &MappingPair,
    reference_p: Option<&Vector>,
) -> Result<IterTrace> {
    cfg.validate(pair.domain())?;
    if let Some(p) = reference_p {
        p.check_dim(pair.dim())?;
    }
    let norm = pair.norm;
    let mut rows = Vec::new();
    let mut x = cfg.x1.clone();
    let mut short_steps = 0;
    let mut terminal = Terminal::MaxIter;

    for n in 1..=cfg.max_iter {
        let r1 = residual(&pair.t1, &pair.p, &x, norm).map_err(at_step(n))?;
        let r2 = residual(&pair.t2, &pair.p, &x, norm).map_err(at_step(n))?;
        let dist_p = reference_p.map(|p| norm.dist(&x, p)).transpose()?;
        if cfg.stop_at_tol && r1.max(r2) <= cfg.residual_tol {
            rows.push(TraceRow {
                n,
                x: x.clone(),
                y: None,
                r1,
                r2,
                dist_p,
                power_gap: None,
                step_delta: None,
            });
            terminal = Terminal::TolReached;
            break;
        }
        let Step { y, next, power_gap } = step(cfg, pair, n, &x).map_err(at_step(n))?;
        let delta = norm.dist(&next, &x)?;
        rows.push(TraceRow {
            n,
            x,
            y,
            r1,
            r2,
            dist_p,
            power_gap,
            step_delta: Some(delta),
        });
        x = next;
        short_steps = if delta < STAGNATION_DELTA {
            short_steps + 1
        } else {
            0
        };
        if cfg.stop_on_stagnation && short_steps >= STAGNATION_STEPS {
            terminal = Terminal::Stagnation;
            break;
        }
    }

    Ok(IterTrace {
        scheme: cfg.scheme,
        rows,
        terminal,
        final_x: x,
        norm,
    })
}

/// Runs every configuration against the same pair. Runs are independent
/// and execute concurrently; results keep the input order and a failed run
/// does not affect the others.
pub fn compare_schemes(
    cfgs: &[RunConfig],
    pair: &MappingPair,
    reference_p: Option<&Vector>,
) -> Vec<Result<IterTrace>> {
    thread::scope(|s| {
        let handles: Vec<_> = cfgs
            .iter()
            .map(|cfg| s.spawn(move || run_scheme(cfg, pair, reference_p)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scheme run panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{registry_get, Builtin};

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn unit() -> ConvexDomain {
        ConvexDomain::interval(-1.0, 1.0).unwrap()
    }

    fn identity_pair() -> MappingPair {
        let id = registry_get("identity").unwrap();
        MappingPair::new(
            id.clone(),
            id,
            RetractionDef::identity_on(unit()),
            NormSpec::Euclidean,
        )
        .unwrap()
    }

    #[test]
    fn seq_value_examples() {
        assert_eq!(seq_value(&StepSequence::Constant(0.5), 7).unwrap(), 0.5);
        assert_eq!(
            seq_value(&SummableSequence::InversePower { c: 1.0, p: 2.0 }, 2).unwrap(),
            0.25
        );
        let h = StepSequence::ClippedHarmonic {
            eps: 0.1,
            scale: 1.0,
        };
        assert_eq!(seq_value(&h, 100).unwrap(), 0.1);
        assert_eq!(seq_value(&h, 1).unwrap(), 0.9);
        assert!(seq_value(&StepSequence::Table(vec![0.5]), 2).is_err());
        assert!(seq_value(&SummableSequence::Zero, 0).is_err());
    }

    #[test]
    fn sequence_validation() {
        assert!(StepSequence::Constant(1.5).validate().is_err());
        assert!(StepSequence::ClippedHarmonic {
            eps: 0.5,
            scale: 1.0
        }
        .validate()
        .is_err());
        assert!(StepSequence::Table(vec![0.2, -0.1]).validate().is_err());
        assert!(SummableSequence::InversePower { c: 1.0, p: 1.0 }
            .validate()
            .is_err());
        assert!(SummableSequence::Geometric { c: 1.0, r: 1.0 }
            .validate()
            .is_err());
        assert!(SummableSequence::Table {
            values: vec![0.5, 0.5],
            sum_bound: 0.9
        }
        .validate()
        .is_err());
        assert_eq!(StepSequence::Constant(0.5).margin(), Some(0.5));
        assert_eq!(StepSequence::Constant(1.0).margin(), None);
    }

    #[test]
    fn identity_pair_is_stationary() {
        let pair = identity_pair();
        let cfg = RunConfig::new(
            Scheme::PaperB,
            StepSequence::Constant(0.3),
            StepSequence::Constant(0.7),
            v(&[0.3]),
        );
        // Residuals are zero at x1, so the tolerance rule fires first.
        let t = run_scheme(&cfg, &pair, None).unwrap();
        assert_eq!(t.terminal, Terminal::TolReached);
        assert_eq!(t.len(), 1);

        let mut cfg = cfg;
        cfg.stop_at_tol = false;
        let t = run_scheme(&cfg, &pair, None).unwrap();
        assert_eq!(t.terminal, Terminal::Stagnation);
        assert_eq!(t.len(), STAGNATION_STEPS);
        assert!(t.rows.iter().all(|r| r.x == v(&[0.3])));
    }

    #[test]
    fn example_pair_converges_from_one() {
        let pair = MappingPair::paper_example();
        let cfg = RunConfig::new(
            Scheme::PaperB,
            StepSequence::Constant(0.5),
            StepSequence::Constant(0.5),
            v(&[1.0]),
        );
        let t = run_scheme(&cfg, &pair, Some(&v(&[0.0]))).unwrap();
        assert_eq!(t.terminal, Terminal::TolReached);
        assert!(t.len() <= 200);
        assert!(t.rows.last().unwrap().x[0].abs() < 1e-8);

        // First step by hand: T1(1) = −2 sin(0.5), y1 = (1 + T1(1)) / 2.
        let t1_1 = -2.0 * (0.5f64).sin();
        let y1 = 1.0 + 0.5 * (t1_1 - 1.0);
        assert_eq!(t.rows[0].y.as_ref().unwrap()[0], y1);
        assert!((y1 - 0.020574461395797).abs() < 1e-14);
    }

    #[test]
    fn mann_halving_map() {
        let half = MappingDef::builtin(
            Builtin::Affine {
                a: vec![vec![0.5]],
                b: vec![0.0],
            },
            unit(),
        )
        .unwrap();
        let pair = MappingPair::new(
            half.clone(),
            half,
            RetractionDef::identity_on(unit()),
            NormSpec::Euclidean,
        )
        .unwrap();
        let cfg = RunConfig::new(
            Scheme::Mann,
            StepSequence::Constant(1.0),
            StepSequence::Constant(0.0),
            v(&[1.0]),
        )
        .fixed_length(3);
        let t = run_scheme(&cfg, &pair, None).unwrap();
        // x_{n+1} = x_n / 2ⁿ: 1, 1/2, 1/8, then x_4 = 1/64.
        assert_eq!(t.rows[2].x, v(&[0.125]));
        assert_eq!(t.final_x, v(&[1.0 / 64.0]));
        assert!(t.rows.iter().all(|r| r.y.is_none()));
    }

    #[test]
    fn x1_outside_domain_is_invalid() {
        let cfg = RunConfig::new(
            Scheme::PaperB,
            StepSequence::Constant(0.5),
            StepSequence::Constant(0.5),
            v(&[2.0]),
        );
        assert!(matches!(
            run_scheme(&cfg, &MappingPair::paper_example(), None),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn escaping_iterate_is_a_blowup_with_step_index() {
        let k = ConvexDomain::interval(-1e300, 1e300).unwrap();
        let double = MappingDef::builtin(
            Builtin::Affine {
                a: vec![vec![2.0]],
                b: vec![0.0],
            },
            k.clone(),
        )
        .unwrap();
        let pair = MappingPair::new(
            double.clone(),
            double,
            RetractionDef::identity_on(k),
            NormSpec::Euclidean,
        )
        .unwrap();
        let cfg = RunConfig::new(
            Scheme::Mann,
            StepSequence::Constant(0.5),
            StepSequence::Constant(0.5),
            v(&[1.0]),
        );
        match run_scheme(&cfg, &pair, None) {
            Err(Error::NumericalBlowup { n, .. }) => assert!(n > 1),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn compare_keeps_order_and_isolates_failures() {
        let pair = MappingPair::paper_example();
        let good = RunConfig::new(
            Scheme::PaperB,
            StepSequence::Constant(0.5),
            StepSequence::Constant(0.5),
            v(&[1.0]),
        );
        let mut bad = good.clone();
        bad.x1 = v(&[2.0]);
        let mut mann = good.clone();
        mann.scheme = Scheme::Mann;
        let out = compare_schemes(&[good, bad, mann], &pair, None);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].as_ref().unwrap().scheme, Scheme::PaperB);
        assert!(matches!(out[1], Err(Error::InvalidInput(_))));
        assert_eq!(out[2].as_ref().unwrap().scheme, Scheme::Mann);
        assert!(compare_schemes(&[], &pair, None).is_empty());
    }
}
