//! Experiment configuration files (TOML).
//!
//! ```toml
//! [space]
//! dim = 1
//! norm = "euclidean"            # "max" | { p_norm = 1.5 }
//!
//! [domain]
//! kind = "interval"             # "box" (lo, hi vectors) | "ball" (center, radius)
//! lo = -1.0
//! hi = 1.0
//!
//! [mappings]
//! t1 = { builtin = "paper_t1" }
//! t2 = { expr = ["x >= 0 ? x : -x"] }
//! retraction = { kind = "identity" }   # "projection" | { expr = [...] }
//!
//! [scheme]                      # or several [[scheme]] blocks for `compare`
//! kind = "paper_b"              # "mann" | "ishikawa"
//! alpha = { constant = 0.5 }
//! beta = { constant = 0.5 }
//! x1 = [1.0]
//!
//! [certify]
//! enabled = true
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every other field has a default; see [`SchemeSection`],
//! [`CertifySection`] and [`OutputSection`]. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::certify::PhiSpec;
use crate::iterate::{RunConfig, Scheme, StepSequence, SummableSequence};
use crate::mappings::{Builtin, BuiltinParams, MapSource, MappingDef, MappingPair, RetractionDef};
use crate::space::{ConvexDomain, NormSpec, Vector};

/// Overrides `certify.seed` when set.
pub const SEED_ENV: &str = "RETRACT_ITER_SEED";

/// A configuration problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn field_err(field: &str, e: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{field}: {e}"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    space: SpaceSection,
    domain: DomainSection,
    mappings: MappingsSection,
    scheme: toml::Value,
    #[serde(default)]
    certify: CertifySection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceSection {
    dim: usize,
    #[serde(default)]
    norm: NormSection,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum NormSection {
    #[default]
    Euclidean,
    Max,
    PNorm(f64),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DomainSection {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingsSection {
    t1: MappingSection,
    t2: MappingSection,
    retraction: RetractionSection,
}

/// Either `builtin = "<name>"` with optional `a`, `b`, `c`, `delta`
/// parameters, or `expr = ["<component 0>", …]`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingSection {
    builtin: Option<String>,
    expr: Option<Vec<String>>,
    a: Option<Vec<Vec<f64>>>,
    b: Option<Vec<f64>>,
    c: Option<f64>,
    delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RetractionSection {
    kind: Option<String>,
    expr: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SchemeKind {
    PaperB,
    Mann,
    Ishikawa,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum StepSection {
    Constant(f64),
    ClippedHarmonic { eps: f64, scale: f64 },
    Table(Vec<f64>),
}

impl From<StepSection> for StepSequence {
    fn from(s: StepSection) -> Self {
        match s {
            StepSection::Constant(c) => StepSequence::Constant(c),
            StepSection::ClippedHarmonic { eps, scale } => {
                StepSequence::ClippedHarmonic { eps, scale }
            }
            StepSection::Table(v) => StepSequence::Table(v),
        }
    }
}

fn half_step() -> StepSection {
    StepSection::Constant(0.5)
}

/// One `[scheme]` block. Defaults: `alpha = beta = { constant = 0.5 }`,
/// `max_iter = 500`, `residual_tol = 1e-8`, `record_power_gap = true`,
/// `stop_at_tol = true`, `stop_on_stagnation = true`, `name = kind`.
/// `reference_p` defaults to the origin for the builtin Example pair and is
/// omitted otherwise.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    name: Option<String>,
    kind: SchemeKind,
    #[serde(default = "half_step")]
    alpha: StepSection,
    #[serde(default = "half_step")]
    beta: StepSection,
    x1: Vec<f64>,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
    #[serde(default = "default_tol")]
    residual_tol: f64,
    #[serde(default = "yes")]
    record_power_gap: bool,
    reference_p: Option<Vec<f64>>,
    #[serde(default = "yes")]
    stop_at_tol: bool,
    #[serde(default = "yes")]
    stop_on_stagnation: bool,
}

fn default_max_iter() -> usize {
    500
}

fn default_tol() -> f64 {
    1e-8
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum SummableSection {
    #[default]
    Zero,
    InversePower {
        c: f64,
        p: f64,
    },
    Geometric {
        c: f64,
        r: f64,
    },
    Table {
        values: Vec<f64>,
        sum_bound: f64,
    },
}

impl From<SummableSection> for SummableSequence {
    fn from(s: SummableSection) -> Self {
        match s {
            SummableSection::Zero => SummableSequence::Zero,
            SummableSection::InversePower { c, p } => SummableSequence::InversePower { c, p },
            SummableSection::Geometric { c, r } => SummableSequence::Geometric { c, r },
            SummableSection::Table { values, sum_bound } => {
                SummableSequence::Table { values, sum_bound }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PhiSection {
    #[default]
    Identity,
    Linear(f64),
    Power(f64),
}

impl From<PhiSection> for PhiSpec {
    fn from(p: PhiSection) -> Self {
        match p {
            PhiSection::Identity => PhiSpec::Identity,
            PhiSection::Linear(c) => PhiSpec::Linear(c),
            PhiSection::Power(p) => PhiSpec::Power(p),
        }
    }
}

fn quarter() -> PhiSection {
    PhiSection::Linear(0.25)
}

fn default_t_grid() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 10.0]
}

/// `[certify]`. Defaults: `enabled = false`, `samples = 2000`, `seed = 42`,
/// `n_max = 10`, `mu = lambda = "zero"`, `phi = "identity"`,
/// `M = diam(K)`, `M_star = 1`, `fixed_points` absent,
/// `condition_f = { linear = 0.25 }`, `t_grid = [0, 0.5, 1, 2, 10]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    #[serde(default)]
    enabled: bool,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_n_max")]
    n_max: usize,
    #[serde(default)]
    mu: SummableSection,
    #[serde(default)]
    lambda: SummableSection,
    #[serde(default)]
    phi: PhiSection,
    #[serde(rename = "M")]
    m: Option<f64>,
    #[serde(rename = "M_star", default = "one")]
    m_star: f64,
    fixed_points: Option<Vec<Vec<f64>>>,
    #[serde(default = "quarter")]
    condition_f: PhiSection,
    #[serde(default = "default_t_grid")]
    t_grid: Vec<f64>,
}

impl Default for CertifySection {
    fn default() -> Self {
        CertifySection {
            enabled: false,
            samples: default_samples(),
            seed: default_seed(),
            n_max: default_n_max(),
            mu: SummableSection::Zero,
            lambda: SummableSection::Zero,
            phi: PhiSection::Identity,
            m: None,
            m_star: one(),
            fixed_points: None,
            condition_f: quarter(),
            t_grid: default_t_grid(),
        }
    }
}

fn default_samples() -> usize {
    2000
}

fn default_seed() -> u64 {
    42
}

fn default_n_max() -> usize {
    10
}

fn one() -> f64 {
    1.0
}

/// `[output]`. Defaults: `dir = "out"` (relative to the config file),
/// `emit_csv = true`, `emit_svg = true`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    dir: String,
    #[serde(default = "yes")]
    emit_csv: bool,
    #[serde(default = "yes")]
    emit_svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_dir(),
            emit_csv: true,
            emit_svg: true,
        }
    }
}

fn default_dir() -> String {
    "out".into()
}

/// A validated scheme block ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedRun {
    pub name: String,
    pub cfg: RunConfig,
    pub reference_p: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifySettings {
    pub enabled: bool,
    pub samples: usize,
    pub seed: u64,
    pub n_max: usize,
    pub mu: SummableSequence,
    pub lambda: SummableSequence,
    pub phi: PhiSpec,
    pub m_const: f64,
    pub m_star: f64,
    pub fixed_points: Option<Vec<Vector>>,
    pub condition_f: PhiSpec,
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub emit_csv: bool,
    pub emit_svg: bool,
}

/// A fully validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub pair: MappingPair,
    pub runs: Vec<NamedRun>,
    pub certify: CertifySettings,
    pub output: OutputSettings,
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Experiment, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Experiment::from_toml(&text, base)
    }

    /// Parses and validates `text`; relative output directories resolve
    /// against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Experiment, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        let seed_override = match std::env::var(SEED_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|e| field_err(SEED_ENV, format!("`{s}` is not a u64 seed ({e})")))?,
            ),
            Err(_) => None,
        };
        build(raw, base, seed_override)
    }
}

fn vector(field: &str, coords: Vec<f64>, dim: usize) -> Result<Vector, ConfigError> {
    let v = Vector::new(coords).map_err(|e| field_err(field, e))?;
    if v.dim() != dim {
        return Err(field_err(
            field,
            format!("expected {dim} coordinate(s), got {}", v.dim()),
        ));
    }
    Ok(v)
}

fn build(
    raw: RawConfig,
    base: &Path,
    seed_override: Option<u64>,
) -> Result<Experiment, ConfigError> {
    let dim = raw.space.dim;
    if dim == 0 {
        return Err(field_err("space.dim", "must be at least 1"));
    }
    let norm = match raw.space.norm {
        NormSection::Euclidean => NormSpec::Euclidean,
        NormSection::Max => NormSpec::Max,
        NormSection::PNorm(p) => NormSpec::PNorm(p),
    }
    .validate()
    .map_err(|e| field_err("space.norm", e))?;

    let domain = match raw.domain {
        DomainSection::Interval { lo, hi } => ConvexDomain::interval(lo, hi),
        DomainSection::Box { lo, hi } => {
            let lo = vector("domain.lo", lo, dim)?;
            let hi = vector("domain.hi", hi, dim)?;
            ConvexDomain::boxed(lo, hi)
        }
        DomainSection::Ball { center, radius } => {
            ConvexDomain::ball(vector("domain.center", center, dim)?, radius)
        }
    }
    .map_err(|e| field_err("domain", e))?;
    if domain.dim() != dim {
        return Err(field_err(
            "domain",
            format!(
                "dimension {} does not match space.dim = {dim}",
                domain.dim()
            ),
        ));
    }

    let t1 = mapping("mappings.t1", raw.mappings.t1, &domain)?;
    let t2 = mapping("mappings.t2", raw.mappings.t2, &domain)?;
    let p = retraction("mappings.retraction", raw.mappings.retraction, &domain)?;
    let is_example = matches!(
        (&t1.source, &t2.source),
        (
            MapSource::Builtin(Builtin::PaperT1),
            MapSource::Builtin(Builtin::PaperT2)
        ) | (
            MapSource::Builtin(Builtin::PaperT2),
            MapSource::Builtin(Builtin::PaperT1)
        )
    );
    let pair = MappingPair::new(t1, t2, p, norm).map_err(|e| field_err("mappings", e))?;

    let blocks: Vec<(String, toml::Value)> = match raw.scheme {
        toml::Value::Array(items) => items
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("scheme[{i}]"), v))
            .collect(),
        v @ toml::Value::Table(_) => vec![("scheme".to_string(), v)],
        _ => {
            return Err(field_err(
                "scheme",
                "expected a table or an array of tables",
            ))
        }
    };
    let mut runs = Vec::with_capacity(blocks.len());
    for (field, value) in blocks {
        let section: SchemeSection = value.try_into().map_err(|e| field_err(&field, e))?;
        runs.push(scheme(&field, section, &domain, dim, is_example)?);
    }
    dedupe_names(&mut runs);

    let c = raw.certify;
    let m_const = c.m.unwrap_or_else(|| domain.diameter(norm));
    if !(m_const > 0.0 && m_const.is_finite()) {
        return Err(field_err(
            "certify.M",
            format!("must be positive, got {m_const}"),
        ));
    }
    if !(c.m_star > 0.0 && c.m_star.is_finite()) {
        return Err(field_err(
            "certify.M_star",
            format!("must be positive, got {}", c.m_star),
        ));
    }
    if c.samples < 2 {
        return Err(field_err("certify.samples", "must be at least 2"));
    }
    if c.n_max == 0 {
        return Err(field_err("certify.n_max", "must be at least 1"));
    }
    let mu: SummableSequence = c.mu.into();
    mu.validate().map_err(|e| field_err("certify.mu", e))?;
    let lambda: SummableSequence = c.lambda.into();
    lambda
        .validate()
        .map_err(|e| field_err("certify.lambda", e))?;
    let phi = PhiSpec::from(c.phi)
        .validate()
        .map_err(|e| field_err("certify.phi", e))?;
    let condition_f = PhiSpec::from(c.condition_f)
        .validate()
        .map_err(|e| field_err("certify.condition_f", e))?;
    let fixed_points = c
        .fixed_points
        .map(|pts| {
            pts.into_iter()
                .enumerate()
                .map(|(i, p)| vector(&format!("certify.fixed_points[{i}]"), p, dim))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    if fixed_points.as_ref().is_some_and(|f| f.is_empty()) {
        return Err(field_err(
            "certify.fixed_points",
            "must not be empty when given",
        ));
    }
    if c.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(field_err("certify.t_grid", "values must be finite and ≥ 0"));
    }

    Ok(Experiment {
        pair,
        runs,
        certify: CertifySettings {
            enabled: c.enabled,
            samples: c.samples,
            seed: seed_override.unwrap_or(c.seed),
            n_max: c.n_max,
            mu,
            lambda,
            phi,
            m_const,
            m_star: c.m_star,
            fixed_points,
            condition_f,
            t_grid: c.t_grid,
        },
        output: OutputSettings {
            dir: base.join(&raw.output.dir),
            emit_csv: raw.output.emit_csv,
            emit_svg: raw.output.emit_svg,
        },
    })
}

fn mapping(
    field: &str,
    m: MappingSection,
    domain: &ConvexDomain,
) -> Result<MappingDef, ConfigError> {
    match (m.builtin, m.expr) {
        (Some(name), None) => {
            let params = BuiltinParams {
                a: m.a,
                b: m.b,
                c: m.c,
                delta: m.delta,
            };
            let b = Builtin::from_name(&name, &params, domain.dim())
                .map_err(|e| field_err(field, e))?;
            MappingDef::builtin(b, domain.clone()).map_err(|e| field_err(field, e))
        }
        (None, Some(exprs)) => {
            if m.a.is_some() || m.b.is_some() || m.c.is_some() || m.delta.is_some() {
                return Err(field_err(
                    field,
                    "parameters a, b, c, delta only apply to builtins",
                ));
            }
            expressions(field, &exprs, domain)?;
            MappingDef::expression(&exprs, domain.clone()).map_err(|e| field_err(field, e))
        }
        _ => Err(field_err(field, "give exactly one of `builtin` or `expr`")),
    }
}

/// Parses each component separately so errors name the component.
fn expressions(field: &str, exprs: &[String], domain: &ConvexDomain) -> Result<(), ConfigError> {
    if exprs.len() != domain.dim() {
        return Err(field_err(
            &format!("{field}.expr"),
            format!("needs {} component(s), got {}", domain.dim(), exprs.len()),
        ));
    }
    for (i, src) in exprs.iter().enumerate() {
        crate::mapexpr::parse(src, domain.dim())
            .map_err(|e| field_err(&format!("{field}.expr[{i}]"), e))?;
    }
    Ok(())
}

fn retraction(
    field: &str,
    r: RetractionSection,
    domain: &ConvexDomain,
) -> Result<RetractionDef, ConfigError> {
    match (r.kind.as_deref(), r.expr) {
        (Some("identity"), None) => Ok(RetractionDef::identity_on(domain.clone())),
        (Some("projection"), None) => Ok(RetractionDef::metric_projection(domain.clone())),
        (Some(other), None) => Err(field_err(
            &format!("{field}.kind"),
            format!("unknown retraction `{other}`; expected `identity` or `projection`"),
        )),
        (None, Some(exprs)) => {
            expressions(field, &exprs, domain)?;
            RetractionDef::expression(&exprs, domain.clone()).map_err(|e| field_err(field, e))
        }
        _ => Err(field_err(field, "give exactly one of `kind` or `expr`")),
    }
}

fn scheme(
    field: &str,
    s: SchemeSection,
    domain: &ConvexDomain,
    dim: usize,
    is_example: bool,
) -> Result<NamedRun, ConfigError> {
    let kind = match s.kind {
        SchemeKind::PaperB => Scheme::PaperB,
        SchemeKind::Mann => Scheme::Mann,
        SchemeKind::Ishikawa => Scheme::Ishikawa,
    };
    let x1 = vector(&format!("{field}.x1"), s.x1, dim)?;
    let inside = domain
        .contains(&x1, crate::mappings::DOMAIN_TOL, NormSpec::Euclidean)
        .map_err(|e| field_err(&format!("{field}.x1"), e))?;
    if !inside {
        return Err(field_err(
            &format!("{field}.x1"),
            format!("point [{x1}] lies outside the domain"),
        ));
    }
    let alpha: StepSequence = s.alpha.into();
    alpha
        .validate()
        .map_err(|e| field_err(&format!("{field}.alpha"), e))?;
    let beta: StepSequence = s.beta.into();
    beta.validate()
        .map_err(|e| field_err(&format!("{field}.beta"), e))?;
    if s.max_iter == 0 {
        return Err(field_err(
            &format!("{field}.max_iter"),
            "must be at least 1",
        ));
    }
    if !(s.residual_tol > 0.0 && s.residual_tol.is_finite()) {
        return Err(field_err(
            &format!("{field}.residual_tol"),
            "must be positive",
        ));
    }
    let reference_p = match s.reference_p {
        Some(p) => Some(vector(&format!("{field}.reference_p"), p, dim)?),
        None if is_example => Some(Vector::zeros(dim).expect("dim ≥ 1")),
        None => None,
    };
    Ok(NamedRun {
        name: s.name.unwrap_or_else(|| kind.name().to_string()),
        cfg: RunConfig {
            scheme: kind,
            alpha,
            beta,
            x1,
            max_iter: s.max_iter,
            residual_tol: s.residual_tol,
            record_power_gap: s.record_power_gap,
            stop_at_tol: s.stop_at_tol,
            stop_on_stagnation: s.stop_on_stagnation,
        },
        reference_p,
    })
}

/// Repeated names get `_2`, `_3`, … so per-scheme files never collide.
fn dedupe_names(runs: &mut [NamedRun]) {
    for i in 1..runs.len() {
        let base = runs[i].name.clone();
        let mut k = 1;
        while runs[..i].iter().any(|r| r.name == runs[i].name) {
            k += 1;
            runs[i].name = format!("{base}_{k}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[space]
dim = 1

[domain]
kind = "interval"
lo = -1.0
hi = 1.0

[mappings]
t1 = { builtin = "paper_t1" }
t2 = { builtin = "paper_t2" }
retraction = { kind = "identity" }

[scheme]
kind = "paper_b"
x1 = [1.0]
"#;

    fn load(text: &str) -> Result<Experiment, ConfigError> {
        build(
            toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?,
            Path::new("/tmp"),
            None,
        )
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let e = load(MINIMAL).unwrap();
        assert_eq!(e.runs.len(), 1);
        let run = &e.runs[0];
        assert_eq!(run.name, "paper_b");
        assert_eq!(run.cfg.max_iter, 500);
        assert_eq!(run.cfg.residual_tol, 1e-8);
        assert_eq!(run.reference_p, Some(Vector::scalar(0.0).unwrap()));
        assert_eq!(e.certify.m_const, 2.0);
        assert_eq!(e.certify.seed, 42);
        assert_eq!(e.output.dir, PathBuf::from("/tmp/out"));
    }

    #[test]
    fn x1_outside_domain_names_the_field() {
        let text = MINIMAL.replace("x1 = [1.0]", "x1 = [2.0]");
        let err = load(&text).unwrap_err();
        assert!(err.0.contains("scheme.x1"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = load(&format!("{MINIMAL}\nbogus = 1\n")).unwrap_err();
        assert!(err.0.contains("bogus"), "{err}");
        let err = load(&MINIMAL.replace("kind = \"paper_b\"", "kind = \"paper_b\"\nspeed = 3"))
            .unwrap_err();
        assert!(err.0.contains("speed"), "{err}");
    }

    #[test]
    fn malformed_phi_is_rejected() {
        let err = load(&format!("{MINIMAL}\n[certify]\nphi = \"cubic\"\n")).unwrap_err();
        assert!(err.0.contains("cubic"), "{err}");
    }

    #[test]
    fn expression_errors_name_the_component() {
        let text = MINIMAL.replace(
            "t2 = { builtin = \"paper_t2\" }",
            "t2 = { expr = [\"sin(\"] }",
        );
        let err = load(&text).unwrap_err();
        assert!(
            err.0.contains("mappings.t2.expr[0]") && err.0.contains("unclosed-paren"),
            "{err}"
        );
    }

    #[test]
    fn scheme_arrays_get_unique_names() {
        let text = MINIMAL.replace(
            "[scheme]\nkind = \"paper_b\"\nx1 = [1.0]\n",
            "[[scheme]]\nkind = \"mann\"\nx1 = [1.0]\n[[scheme]]\nkind = \"mann\"\nx1 = [1.0]\n",
        );
        let e = load(&text).unwrap();
        let names: Vec<&str> = e.runs.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["mann", "mann_2"]);
    }
}
