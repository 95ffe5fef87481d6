//! Sampling-based certification of the mapping-class inequalities.
//!
//! Every check here evaluates an inequality on a finite, seeded sample of
//! points or pairs. A pass means no sampled point violated it; it is
//! evidence, not proof, and reports carry [`EMPIRICAL`] as their basis.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::distance_to_set;
use crate::error::{invalid, Error, Result};
use crate::iterate::{Sequence, SummableSequence};
use crate::mappings::{apply, retract, MappingDef, MappingPair, RetractionDef};
use crate::space::{ConvexDomain, NormSpec, Vector};

pub const EMPIRICAL: &str = "empirical";
/// Pairs closer than this are skipped when forming ratios.
pub const DEGENERATE_PAIR: f64 = 1e-12;
/// Pass threshold for inequality margins on mappings.
pub const MARGIN_TOL: f64 = 1e-9;
/// Pass threshold for retraction properties.
pub const RETRACTION_TOL: f64 = 1e-12;
/// Slack allowed in the asymptotically-nonexpansive heuristic.
pub const KN_FLAG_TOL: f64 = 0.05;
/// Enlargement factor of the bounding box used for exterior samples.
pub const EXTERIOR_FACTOR: f64 = 2.0;

/// `φ: ℝ⁺ → ℝ⁺`, strictly increasing and continuous with `φ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PhiSpec {
    #[default]
    Identity,
    Linear(f64),
    Power(f64),
}

impl PhiSpec {
    pub fn validate(self) -> Result<Self> {
        match self {
            PhiSpec::Linear(c) if !(c > 0.0 && c.is_finite()) => {
                Err(invalid(format!("linear φ needs c > 0, got {c}")))
            }
            PhiSpec::Power(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(invalid(format!("power φ needs p ≥ 1, got {p}")))
            }
            _ => Ok(self),
        }
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            PhiSpec::Identity => t,
            PhiSpec::Linear(c) => c * t,
            PhiSpec::Power(p) => t.powf(p),
        }
    }
}

/// Where and how many points to draw. Points are uniform on the domain's
/// bounding box from a ChaCha8 stream seeded with `seed`; ball domains use
/// rejection. The same spec always yields the same points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub domain: ConvexDomain,
    pub norm: NormSpec,
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64, domain: ConvexDomain) -> Self {
        SampleSpec {
            count,
            seed,
            domain,
            norm: NormSpec::Euclidean,
        }
    }

    pub fn with_norm(mut self, norm: NormSpec) -> Self {
        self.norm = norm;
        self
    }

    /// The same count and seed over the bounding box enlarged by
    /// [`EXTERIOR_FACTOR`].
    pub fn exterior(&self) -> Result<SampleSpec> {
        Ok(SampleSpec {
            domain: self.domain.enlarged(EXTERIOR_FACTOR)?,
            ..self.clone()
        })
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(invalid(format!(
                "sample count must be at least 2, got {}",
                self.count
            )));
        }
        Ok(())
    }

    fn draw(&self, n: usize) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (lo, hi) = self.domain.bounding_box();
        let is_ball = matches!(self.domain, ConvexDomain::Ball { .. });
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let coords: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(l, h)| l + (h - l) * rng.gen::<f64>())
                .collect();
            let p = Vector::new(coords).expect("finite bounds give finite samples");
            if !is_ball
                || self
                    .domain
                    .contains(&p, 0.0, NormSpec::Euclidean)
                    .unwrap_or(false)
            {
                out.push(p);
            }
        }
        out
    }

    /// `count` points.
    pub fn points(&self) -> Result<Vec<Vector>> {
        self.validate()?;
        Ok(self.draw(self.count))
    }

    /// `count` pairs, formed from `2·count` consecutive draws.
    pub fn pairs(&self) -> Result<Vec<(Vector, Vector)>> {
        self.validate()?;
        let mut pts = self.draw(2 * self.count).into_iter();
        let mut out = Vec::with_capacity(self.count);
        while let (Some(a), Some(b)) = (pts.next(), pts.next()) {
            out.push((a, b));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// The sample (or pair) where a maximum was attained.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Vector,
    pub y: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertRow {
    pub n: usize,
    /// Estimated constant or largest violation at this `n`.
    pub value: f64,
    pub worst: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub check: String,
    pub per_n: Vec<CertRow>,
    pub worst: Option<Witness>,
    /// Signed: negative means the inequality held with slack.
    pub margin: f64,
    pub verdict: Verdict,
    pub basis: &'static str,
}

/// Running maximum that remembers where it was attained.
#[derive(Debug, Clone)]
struct Max {
    value: f64,
    worst: Option<Witness>,
}

impl Max {
    fn new() -> Self {
        Max {
            value: f64::NEG_INFINITY,
            worst: None,
        }
    }

    fn offer(&mut self, value: f64, x: &Vector, y: Option<&Vector>) {
        if value > self.value {
            self.value = value;
            self.worst = Some(Witness {
                x: x.clone(),
                y: y.cloned(),
            });
        }
    }

    fn or_zero(self) -> Max {
        if self.worst.is_none() {
            Max {
                value: 0.0,
                worst: None,
            }
        } else {
            self
        }
    }
}

fn at_sample(x: &Vector) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::AtSample {
        point: x.to_string(),
        cause: Box::new(e),
    }
}

fn pt(m: &MappingDef, p: &RetractionDef, x: &Vector) -> Result<Vector> {
    retract(p, &apply(m, x).map_err(at_sample(x))?).map_err(at_sample(x))
}

/// `(PT)^k x` for `k = 1..=n_max`, together with `T(PT)^{k−1} x`.
fn orbit(
    m: &MappingDef,
    p: &RetractionDef,
    x: &Vector,
    n_max: usize,
) -> Result<Vec<(Vector, Vector)>> {
    let mut out = Vec::with_capacity(n_max);
    let mut cur = x.clone();
    for _ in 0..n_max {
        let t = apply(m, &cur).map_err(at_sample(x))?;
        cur = retract(p, &t).map_err(at_sample(x))?;
        out.push((cur.clone(), t));
    }
    Ok(out)
}

/// Evaluates `f(n, ‖x − y‖, (PT)^n x, (PT)^n y, T(PT)^{n−1} x, T(PT)^{n−1} y)`
/// over all sampled pairs and returns the per-`n` maxima.
fn pairwise_per_n<F>(
    m: &MappingDef,
    p: &RetractionDef,
    samples: &SampleSpec,
    n_max: usize,
    mut f: F,
) -> Result<Vec<Max>>
where
    F: FnMut(usize, f64, (&Vector, &Vector), (&Vector, &Vector)) -> Result<Option<f64>>,
{
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    let mut maxima = vec![Max::new(); n_max];
    for (x, y) in samples.pairs()? {
        let d = samples.norm.dist(&x, &y)?;
        if d < DEGENERATE_PAIR {
            continue;
        }
        let ox = orbit(m, p, &x, n_max)?;
        let oy = orbit(m, p, &y, n_max)?;
        for (k, ((px, tx), (py, ty))) in ox.iter().zip(&oy).enumerate() {
            if let Some(v) = f(k + 1, d, (px, py), (tx, ty))? {
                maxima[k].offer(v, &x, Some(&y));
            }
        }
    }
    Ok(maxima.into_iter().map(Max::or_zero).collect())
}

fn report(
    check: &str,
    maxima: Vec<Max>,
    margin_of: impl Fn(f64) -> f64,
    verdict: Verdict,
) -> CertReport {
    let per_n: Vec<CertRow> = maxima
        .iter()
        .enumerate()
        .map(|(k, mx)| CertRow {
            n: k + 1,
            value: mx.value,
            worst: mx.worst.clone(),
        })
        .collect();
    let top = maxima.into_iter().fold(
        Max::new(),
        |acc, mx| if mx.value > acc.value { mx } else { acc },
    );
    CertReport {
        check: check.to_string(),
        per_n,
        margin: margin_of(top.value),
        worst: top.worst,
        verdict,
        basis: EMPIRICAL,
    }
}

/// `k̂_n = max ‖(PT)^n x − (PT)^n y‖ / ‖x − y‖` over sampled pairs.
///
/// The verdict is a heuristic: with `c_n = max(1, k̂_n)`, it passes when
/// `c_n` never rises by more than [`KN_FLAG_TOL`] and ends within
/// [`KN_FLAG_TOL`] of 1.
pub fn estimate_kn(
    m: &MappingDef,
    p: &RetractionDef,
    samples: &SampleSpec,
    n_max: usize,
) -> Result<CertReport> {
    let norm = samples.norm;
    let maxima = pairwise_per_n(m, p, samples, n_max, |_, d, (px, py), _| {
        Ok(Some(norm.dist(px, py)? / d))
    })?;
    let capped: Vec<f64> = maxima.iter().map(|mx| mx.value.max(1.0)).collect();
    let settles = capped.windows(2).all(|w| w[1] <= w[0] + KN_FLAG_TOL)
        && capped.last().is_some_and(|c| *c <= 1.0 + KN_FLAG_TOL);
    Ok(report(
        "estimate_kn",
        maxima,
        |top| top - 1.0,
        Verdict::from_bool(settles),
    ))
}

/// Largest ratio seen by [`estimate_kn`] over all `n ≤ n_max`.
pub fn estimate_lipschitz(
    m: &MappingDef,
    p: &RetractionDef,
    samples: &SampleSpec,
    n_max: usize,
) -> Result<f64> {
    let r = estimate_kn(m, p, samples, n_max)?;
    Ok(r.per_n
        .iter()
        .map(|row| row.value)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Margin of the total asymptotically nonexpansive inequality
/// `‖(PT)^n x − (PT)^n y‖ ≤ ‖x − y‖ + μ_n φ(‖x − y‖) + λ_n`.
#[allow(clippy::too_many_arguments)]
pub fn check_total(
    m: &MappingDef,
    p: &RetractionDef,
    mu: &SummableSequence,
    lambda: &SummableSequence,
    phi: PhiSpec,
    samples: &SampleSpec,
    n_max: usize,
) -> Result<CertReport> {
    mu.validate()?;
    lambda.validate()?;
    let phi = phi.validate()?;
    let norm = samples.norm;
    let maxima = pairwise_per_n(m, p, samples, n_max, |n, d, (px, py), _| {
        let rhs = d + mu.value(n)? * phi.eval(d) + lambda.value(n)?;
        Ok(Some(norm.dist(px, py)? - rhs))
    })?;
    let ok = maxima.iter().all(|mx| mx.value <= MARGIN_TOL);
    Ok(report(
        "check_total",
        maxima,
        |top| top,
        Verdict::from_bool(ok),
    ))
}

/// Largest excess of `‖(PT)^n x − (PT)^n y‖` over
/// `‖T(PT)^{n−1} x − T(PT)^{n−1} y‖`. Nonexpansive `P` keeps this ≤ 0.
pub fn projection_chain_gap(
    m: &MappingDef,
    p: &RetractionDef,
    samples: &SampleSpec,
    n_max: usize,
) -> Result<CertReport> {
    let norm = samples.norm;
    let maxima = pairwise_per_n(m, p, samples, n_max, |_, _, (px, py), (tx, ty)| {
        Ok(Some(norm.dist(px, py)? - norm.dist(tx, ty)?))
    })?;
    let ok = maxima.iter().all(|mx| mx.value <= RETRACTION_TOL);
    Ok(report(
        "projection_chain",
        maxima,
        |top| top,
        Verdict::from_bool(ok),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub value: f64,
    pub worst: Option<Witness>,
}

impl From<Max> for Metric {
    fn from(m: Max) -> Self {
        let m = m.or_zero();
        Metric {
            value: m.value,
            worst: m.worst,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetractionReport {
    /// `max ‖P(Pv) − Pv‖`.
    pub idempotence: Metric,
    /// `max ‖Pu − Pv‖ − ‖u − v‖` over all sample pairs.
    pub nonexpansive: Metric,
    /// `max ‖P(Px + t(x − Px)) − Px‖` over samples and the `t` grid.
    pub sunny: Metric,
    /// Largest of `d(Pv, K)` over all samples and `‖Pv − v‖` over samples in `K`.
    pub domain_fixing: Metric,
    pub verdict: Verdict,
    pub basis: &'static str,
}

impl RetractionReport {
    pub fn metrics(&self) -> [(&'static str, &Metric); 4] {
        [
            ("idempotence", &self.idempotence),
            ("nonexpansive", &self.nonexpansive),
            ("sunny", &self.sunny),
            ("domain_fixing", &self.domain_fixing),
        ]
    }
}

/// Checks `P` on points drawn from `samples.domain`. Pass the exterior
/// spec ([`SampleSpec::exterior`]) to exercise `P` off `K`.
pub fn check_retraction(
    p: &RetractionDef,
    samples: &SampleSpec,
    t_grid: &[f64],
) -> Result<RetractionReport> {
    check_retraction_on(p, &samples.points()?, t_grid, samples.norm)
}

/// [`check_retraction`] on explicit points.
pub fn check_retraction_on(
    p: &RetractionDef,
    points: &[Vector],
    t_grid: &[f64],
    norm: NormSpec,
) -> Result<RetractionReport> {
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(invalid(format!(
            "t grid values must be finite and ≥ 0, got {t}"
        )));
    }
    let images = points
        .iter()
        .map(|v| retract(p, v).map_err(at_sample(v)))
        .collect::<Result<Vec<_>>>()?;

    let mut idem = Max::new();
    let mut fixing = Max::new();
    let mut sunny = Max::new();
    for (v, pv) in points.iter().zip(&images) {
        let ppv = retract(p, pv).map_err(at_sample(v))?;
        idem.offer(norm.dist(&ppv, pv)?, v, None);
        fixing.offer(p.domain.distance(pv, norm)?, v, None);
        if p.domain.contains(v, 0.0, norm)? {
            fixing.offer(norm.dist(pv, v)?, v, None);
        }
        let out = v.sub(pv)?;
        for &t in t_grid {
            let probe = crate::space::lincomb(1.0, pv, t, &out)?;
            let back = retract(p, &probe).map_err(at_sample(v))?;
            sunny.offer(norm.dist(&back, pv)?, v, None);
        }
    }
    let mut nonexp = Max::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let gap = norm.dist(&images[i], &images[j])? - norm.dist(&points[i], &points[j])?;
            nonexp.offer(gap, &points[i], Some(&points[j]));
        }
    }
    let report = RetractionReport {
        idempotence: idem.into(),
        nonexpansive: nonexp.into(),
        sunny: sunny.into(),
        domain_fixing: fixing.into(),
        verdict: Verdict::Pass,
        basis: EMPIRICAL,
    };
    let ok = report
        .metrics()
        .iter()
        .all(|(_, m)| m.value <= RETRACTION_TOL);
    Ok(RetractionReport {
        verdict: Verdict::from_bool(ok),
        ..report
    })
}

/// Condition (A′) margin: `max f(d(x, F)) − ½(‖x − PT₁x‖ + ‖x − PT₂x‖)`
/// over sampled `x ∈ K`.
pub fn check_condition_aprime(
    pair: &MappingPair,
    f: PhiSpec,
    f_points: &[Vector],
    samples: &SampleSpec,
) -> Result<CertReport> {
    if f_points.is_empty() {
        return Err(invalid("condition (A′) needs a nonempty fixed-point set"));
    }
    let f = f.validate()?;
    let norm = samples.norm;
    let mut worst = Max::new();
    for x in samples.points()? {
        let r1 = norm.dist(&x, &pt(&pair.t1, &pair.p, &x)?)?;
        let r2 = norm.dist(&x, &pt(&pair.t2, &pair.p, &x)?)?;
        let d = distance_to_set(&x, f_points, norm)?;
        worst.offer(f.eval(d) - 0.5 * (r1 + r2), &x, None);
    }
    let worst = worst.or_zero();
    Ok(CertReport {
        check: "condition_aprime".into(),
        per_n: Vec::new(),
        margin: worst.value,
        verdict: Verdict::from_bool(worst.value <= MARGIN_TOL),
        worst: worst.worst,
        basis: EMPIRICAL,
    })
}

/// Checks `φ(κ) ≤ M*·κ` on a grid of 100 points spanning `[M, 10M]`.
pub fn check_phi_growth(phi: PhiSpec, m_const: f64, m_star: f64) -> Result<CertReport> {
    let phi = phi.validate()?;
    if !(m_const > 0.0 && m_star > 0.0 && m_const.is_finite() && m_star.is_finite()) {
        return Err(invalid(format!(
            "M and M* must be positive, got {m_const} and {m_star}"
        )));
    }
    let mut worst = Max::new();
    for i in 0..100 {
        let kappa = m_const * (1.0 + 9.0 * i as f64 / 99.0);
        let k = Vector::scalar(kappa)?;
        worst.offer(phi.eval(kappa) - m_star * kappa, &k, None);
    }
    Ok(CertReport {
        check: "phi_growth".into(),
        per_n: Vec::new(),
        margin: worst.value,
        verdict: Verdict::from_bool(worst.value <= MARGIN_TOL),
        worst: worst.worst,
        basis: EMPIRICAL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRow {
    pub x: Vector,
    pub pt_residual: f64,
    pub t_residual: f64,
    pub in_f_pt: bool,
    pub in_f_t: bool,
    /// Whether `Tx − x` points into the closed inward set at `x`.
    pub weakly_inward: bool,
    pub note: Option<String>,
}

impl TransferRow {
    pub fn agree(&self) -> bool {
        self.in_f_pt == self.in_f_t
    }
}

/// Compares membership in `F(PT)` and `F(T)` at each candidate.
pub fn check_fixed_transfer(
    m: &MappingDef,
    p: &RetractionDef,
    candidates: &[Vector],
    tol: f64,
) -> Result<Vec<TransferRow>> {
    if tol.is_nan() || tol < 0.0 {
        return Err(invalid(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    candidates
        .iter()
        .map(|x| {
            let tx = apply(m, x).map_err(at_sample(x))?;
            let ptx = retract(p, &tx).map_err(at_sample(x))?;
            let pt_residual = NormSpec::Euclidean.dist(&ptx, x)?;
            let t_residual = NormSpec::Euclidean.dist(&tx, x)?;
            let weakly_inward = m.domain.is_inward_at(x, &tx, tol)?;
            let in_f_pt = pt_residual <= tol;
            let in_f_t = t_residual <= tol;
            let note = (in_f_pt != in_f_t).then(|| {
                if weakly_inward {
                    "F(PT) and F(T) disagree although T is weakly inward here".to_string()
                } else {
                    "F(PT) and F(T) disagree; T is not weakly inward at this point, so the \
                     fixed-point identification does not apply"
                        .to_string()
                }
            });
            Ok(TransferRow {
                x: x.clone(),
                pt_residual,
                t_residual,
                in_f_pt,
                in_f_t,
                weakly_inward,
                note,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InwardReport {
    pub lo: f64,
    pub hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub verdict: Verdict,
}

/// Weak inwardness on a one-dimensional domain `[lo, hi]`: interior
/// points impose nothing, so it reduces to `T(lo) ≥ lo` and `T(hi) ≤ hi`.
pub fn check_weakly_inward_1d(m: &MappingDef) -> Result<InwardReport> {
    if m.dim() != 1 {
        return Err(Error::UnsupportedDimension(m.dim()));
    }
    let (lo, hi) = m.domain.bounding_box();
    let (lo, hi) = (lo[0], hi[0]);
    let t_lo = apply(m, &Vector::scalar(lo)?)?[0];
    let t_hi = apply(m, &Vector::scalar(hi)?)?[0];
    Ok(InwardReport {
        lo,
        hi,
        t_lo,
        t_hi,
        verdict: Verdict::from_bool(t_lo >= lo && t_hi <= hi),
    })
}
