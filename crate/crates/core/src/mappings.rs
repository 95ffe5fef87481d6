//! Mappings `T: K → E`, retractions `P: E → K`, and the composite power
//! `(PT)^n` that both the certifier and the iteration engine are built on.

use crate::error::{invalid, Error, Result};
use crate::mapexpr::{self, Expr};
use crate::space::{ConvexDomain, NormSpec, Vector};

/// Slack allowed when checking that an argument of [`apply`] lies in `K`.
pub const DOMAIN_TOL: f64 = 1e-9;

/// Names accepted by [`registry_get`] and [`Builtin::from_name`].
pub const BUILTIN_NAMES: [&str; 6] = [
    "paper_t1",
    "paper_t2",
    "identity",
    "affine",
    "scaled_sin",
    "outward_shift",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Identity,
    /// `x ≥ 0: −2 sin(x/2)`, `x < 0: 2 sin(x/2)`, coordinatewise.
    PaperT1,
    /// `x ≥ 0: x`, `x < 0: −x`, coordinatewise.
    PaperT2,
    /// `x ↦ A x + b`; `a` is row-major.
    Affine {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    /// `x ↦ c · sin(x/2)`, coordinatewise.
    ScaledSin {
        c: f64,
    },
    /// `x ↦ x + δ·u(x)` where `u` is the unit vector from the domain centre
    /// towards `x` (zero at the centre). Pushes boundary points out of `K`.
    OutwardShift {
        delta: f64,
    },
}

/// Optional parameters for the parameterized builtins.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuiltinParams {
    pub a: Option<Vec<Vec<f64>>>,
    pub b: Option<Vec<f64>>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
}

impl Builtin {
    /// Resolves a registry name. Missing parameters take their defaults:
    /// `affine` is `A = I, b = 0`, `scaled_sin` has `c = 1`, and
    /// `outward_shift` has `δ = 0.1`.
    pub fn from_name(name: &str, params: &BuiltinParams, dim: usize) -> Result<Builtin> {
        let b = match name {
            "paper_t1" => Builtin::PaperT1,
            "paper_t2" => Builtin::PaperT2,
            "identity" => Builtin::Identity,
            "affine" => {
                let a = params.a.clone().unwrap_or_else(|| {
                    (0..dim)
                        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                        .collect()
                });
                let b = params.b.clone().unwrap_or_else(|| vec![0.0; dim]);
                Builtin::Affine { a, b }
            }
            "scaled_sin" => Builtin::ScaledSin {
                c: params.c.unwrap_or(1.0),
            },
            "outward_shift" => Builtin::OutwardShift {
                delta: params.delta.unwrap_or(0.1),
            },
            _ => {
                return Err(Error::NotFound {
                    name: name.to_string(),
                    valid: BUILTIN_NAMES.join(", "),
                })
            }
        };
        b.validate(dim)?;
        Ok(b)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Identity => "identity",
            Builtin::PaperT1 => "paper_t1",
            Builtin::PaperT2 => "paper_t2",
            Builtin::Affine { .. } => "affine",
            Builtin::ScaledSin { .. } => "scaled_sin",
            Builtin::OutwardShift { .. } => "outward_shift",
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Builtin::Affine { a, b } => {
                if a.len() != dim || a.iter().any(|row| row.len() != dim) {
                    return Err(invalid(format!("affine matrix must be {dim}×{dim}")));
                }
                if b.len() != dim {
                    return Err(invalid(format!("affine offset must have length {dim}")));
                }
                if a.iter().flatten().chain(b).any(|v| !v.is_finite()) {
                    return Err(invalid("affine parameters must be finite"));
                }
            }
            Builtin::ScaledSin { c } if !c.is_finite() => {
                return Err(invalid("scaled_sin constant must be finite"))
            }
            Builtin::OutwardShift { delta } if !(delta.is_finite() && *delta >= 0.0) => {
                return Err(invalid("outward_shift δ must be finite and non-negative"))
            }
            _ => {}
        }
        Ok(())
    }

    fn eval(&self, x: &Vector, domain: &ConvexDomain) -> Vec<f64> {
        let xs = x.as_slice();
        match self {
            Builtin::Identity => xs.to_vec(),
            Builtin::PaperT1 => xs
                .iter()
                .map(|&v| {
                    if v >= 0.0 {
                        -2.0 * (v / 2.0).sin()
                    } else {
                        2.0 * (v / 2.0).sin()
                    }
                })
                .collect(),
            Builtin::PaperT2 => xs.iter().map(|&v| if v >= 0.0 { v } else { -v }).collect(),
            Builtin::Affine { a, b } => a
                .iter()
                .zip(b)
                .map(|(row, bi)| row.iter().zip(xs).map(|(aij, xj)| aij * xj).sum::<f64>() + bi)
                .collect(),
            Builtin::ScaledSin { c } => xs.iter().map(|&v| c * (v / 2.0).sin()).collect(),
            Builtin::OutwardShift { delta } => {
                let center = domain.center();
                let offset: Vec<f64> = xs
                    .iter()
                    .zip(center.as_slice())
                    .map(|(v, c)| v - c)
                    .collect();
                let len = offset.iter().map(|d| d * d).sum::<f64>().sqrt();
                if len == 0.0 {
                    xs.to_vec()
                } else {
                    xs.iter()
                        .zip(&offset)
                        .map(|(v, d)| v + delta * d / len)
                        .collect()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    Builtin(Builtin),
    /// One expression per output coordinate.
    Expression(Vec<Expr>),
}

/// A possibly nonself mapping `T: K → E`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingDef {
    pub source: MapSource,
    pub domain: ConvexDomain,
}

impl MappingDef {
    pub fn builtin(b: Builtin, domain: ConvexDomain) -> Result<Self> {
        b.validate(domain.dim())?;
        Ok(MappingDef {
            source: MapSource::Builtin(b),
            domain,
        })
    }

    /// Parses one expression per coordinate of `domain`.
    pub fn expression<S: AsRef<str>>(sources: &[S], domain: ConvexDomain) -> Result<Self> {
        let dim = domain.dim();
        if sources.len() != dim {
            return Err(invalid(format!(
                "expression mapping needs {dim} component(s), got {}",
                sources.len()
            )));
        }
        let exprs = sources
            .iter()
            .map(|s| mapexpr::parse(s.as_ref(), dim))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(MappingDef {
            source: MapSource::Expression(exprs),
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn label(&self) -> String {
        match &self.source {
            MapSource::Builtin(b) => b.name().to_string(),
            MapSource::Expression(es) => {
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                format!("expr[{}]", parts.join(", "))
            }
        }
    }

    /// `T(x)` with no domain check. Used where `x` is known to be in `K`
    /// up to rounding.
    fn eval_unchecked(&self, x: &Vector) -> Result<Vector> {
        let out = match &self.source {
            MapSource::Builtin(b) => b.eval(x, &self.domain),
            MapSource::Expression(es) => es
                .iter()
                .map(|e| e.eval(x.as_slice()))
                .collect::<std::result::Result<Vec<_>, _>>()?,
        };
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("mapping {}", self.label())));
        }
        Vector::new(out)
    }
}

/// `T(x)`. Fails if `x` is farther than [`DOMAIN_TOL`] from `K`; nonself
/// images must be brought back by a retraction before the next application.
pub fn apply(m: &MappingDef, x: &Vector) -> Result<Vector> {
    x.check_dim(m.dim())?;
    let d = m.domain.distance(x, NormSpec::Euclidean)?;
    if d > DOMAIN_TOL {
        return Err(Error::DomainViolation {
            point: x.to_string(),
            distance: d,
        });
    }
    m.eval_unchecked(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RetractionKind {
    /// `P = I`. Only a retraction onto `K` when applied to points already in `K`.
    IdentityOn,
    MetricProjection,
    Expression(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetractionDef {
    pub kind: RetractionKind,
    pub domain: ConvexDomain,
}

impl RetractionDef {
    pub fn identity_on(domain: ConvexDomain) -> Self {
        RetractionDef {
            kind: RetractionKind::IdentityOn,
            domain,
        }
    }

    pub fn metric_projection(domain: ConvexDomain) -> Self {
        RetractionDef {
            kind: RetractionKind::MetricProjection,
            domain,
        }
    }

    pub fn expression<S: AsRef<str>>(sources: &[S], domain: ConvexDomain) -> Result<Self> {
        let MappingDef { source, domain } = MappingDef::expression(sources, domain)?;
        let MapSource::Expression(exprs) = source else {
            unreachable!("expression constructor yields expressions")
        };
        Ok(RetractionDef {
            kind: RetractionKind::Expression(exprs),
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            RetractionKind::IdentityOn => "identity",
            RetractionKind::MetricProjection => "projection",
            RetractionKind::Expression(_) => "expression",
        }
    }
}

/// `P(v)`.
pub fn retract(p: &RetractionDef, v: &Vector) -> Result<Vector> {
    v.check_dim(p.dim())?;
    match &p.kind {
        RetractionKind::IdentityOn => Ok(v.clone()),
        RetractionKind::MetricProjection => p.domain.project(v),
        RetractionKind::Expression(es) => {
            let out = es
                .iter()
                .map(|e| e.eval(v.as_slice()))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Vector::new(out)
        }
    }
}

/// `(P∘T)^n x` by literal n-fold composition.
pub fn pt_power(m: &MappingDef, p: &RetractionDef, n: usize, x: &Vector) -> Result<Vector> {
    if n == 0 {
        return Err(invalid("pt_power needs n ≥ 1"));
    }
    let mut cur = x.clone();
    for _ in 0..n {
        cur = retract(p, &apply(m, &cur)?)?;
    }
    Ok(cur)
}

/// `[(PT)^1 x, …, (PT)^n x]`. Each entry is bitwise equal to
/// [`pt_power`] with the matching exponent.
pub fn pt_powers(m: &MappingDef, p: &RetractionDef, n: usize, x: &Vector) -> Result<Vec<Vector>> {
    let mut out = Vec::with_capacity(n);
    let mut cur = x.clone();
    for _ in 0..n {
        cur = retract(p, &apply(m, &cur)?)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Builtin mapping by name with default parameters on `K = [−1, 1]`.
pub fn registry_get(name: &str) -> Result<MappingDef> {
    let domain = ConvexDomain::interval(-1.0, 1.0)?;
    let b = Builtin::from_name(name, &BuiltinParams::default(), 1)?;
    MappingDef::builtin(b, domain)
}

/// The two mappings and the retraction driving a run.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingPair {
    pub t1: MappingDef,
    pub t2: MappingDef,
    pub p: RetractionDef,
    pub norm: NormSpec,
}

impl MappingPair {
    pub fn new(t1: MappingDef, t2: MappingDef, p: RetractionDef, norm: NormSpec) -> Result<Self> {
        let norm = norm.validate()?;
        if t1.domain != t2.domain || t1.domain != p.domain {
            return Err(invalid("t1, t2 and the retraction must share one domain"));
        }
        Ok(MappingPair { t1, t2, p, norm })
    }

    /// The Example pair on `[−1, 1]` with `P` the identity on `K`.
    pub fn paper_example() -> Self {
        let t1 = registry_get("paper_t1").expect("builtin");
        let t2 = registry_get("paper_t2").expect("builtin");
        let p = RetractionDef::identity_on(t1.domain.clone());
        MappingPair::new(t1, t2, p, NormSpec::Euclidean).expect("consistent")
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.t1.domain
    }

    pub fn dim(&self) -> usize {
        self.domain().dim()
    }
}
