//! Post-hoc checks on iteration traces.

use crate::certify::{PhiSpec, Verdict};
use crate::error::{invalid, Result};
use crate::iterate::{IterTrace, Sequence, SummableSequence};
use crate::space::{NormSpec, Vector};

/// `(b_n, c_n)` of the perturbed recursion
/// `‖x_{n+1} − p‖ ≤ (1 + b_n)‖x_n − p‖ + c_n`, with
///
/// ```text
/// b_n = 2 μ_n M* + (μ_n M*)²
/// c_n = φ(M) M* μ_n² + M* λ_n μ_n M* + μ_n φ(M) + λ_n
/// ```
pub fn compute_bn_cn(
    mu: &SummableSequence,
    lambda: &SummableSequence,
    m_const: f64,
    m_star: f64,
    phi: PhiSpec,
    n: usize,
) -> Result<(f64, f64)> {
    let mu_n = mu.value(n)?;
    let lambda_n = lambda.value(n)?;
    let phi_m = phi.validate()?.eval(m_const);
    let b = 2.0 * mu_n * m_star + (mu_n * m_star).powi(2);
    let c =
        phi_m * m_star * mu_n * mu_n + m_star * lambda_n * mu_n * m_star + mu_n * phi_m + lambda_n;
    Ok((b, c))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// 1-based: the bound on `a_{n+1}` from `a_n` failed.
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheckReport {
    pub violations: Vec<Violation>,
    pub tail_sum_b: f64,
    pub tail_sum_c: f64,
    /// Mean of the last 10% of `a` (at least one entry).
    pub limit_estimate: f64,
    pub verdict: Verdict,
}

/// Checks `a_{n+1} ≤ (1 + b_n) a_n + c_n + tol` for every consecutive pair
/// of `a`. `b` and `c` need at least `a.len() − 1` entries.
pub fn verify_recursive_bound(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    tol: f64,
) -> Result<BoundCheckReport> {
    if a.len() < 2 {
        return Err(invalid("recursive bound needs at least two terms of a"));
    }
    let steps = a.len() - 1;
    if b.len() < steps || c.len() < steps {
        return Err(invalid(format!(
            "b and c need {steps} entries, got {} and {}",
            b.len(),
            c.len()
        )));
    }
    let (b, c) = (&b[..steps], &c[..steps]);
    if b.iter().chain(c).any(|v| v.is_nan() || *v < 0.0) {
        return Err(invalid("b and c must be non-negative"));
    }
    if a.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(invalid("a must be non-negative"));
    }
    let violations: Vec<Violation> = (0..steps)
        .filter_map(|i| {
            let rhs = (1.0 + b[i]) * a[i] + c[i];
            (a[i + 1] > rhs + tol).then_some(Violation {
                n: i + 1,
                lhs: a[i + 1],
                rhs,
            })
        })
        .collect();
    let tail_sum_b: f64 = b.iter().sum();
    let tail_sum_c: f64 = c.iter().sum();
    let k = (a.len() / 10).max(1);
    let limit_estimate = a[a.len() - k..].iter().sum::<f64>() / k as f64;
    let ok = violations.is_empty() && tail_sum_b.is_finite() && tail_sum_c.is_finite();
    Ok(BoundCheckReport {
        violations,
        tail_sum_b,
        tail_sum_c,
        limit_estimate,
        verdict: Verdict::from_bool(ok),
    })
}

/// Runs [`verify_recursive_bound`] on the trace's `dist_p` column with
/// `(b_n, c_n)` from [`compute_bn_cn`]. The verdict additionally requires
/// `μ` and `λ` to be valid summable sequences.
#[allow(clippy::too_many_arguments)]
pub fn check_trace_bound(
    trace: &IterTrace,
    mu: &SummableSequence,
    lambda: &SummableSequence,
    m_const: f64,
    m_star: f64,
    phi: PhiSpec,
    tol: f64,
) -> Result<BoundCheckReport> {
    mu.validate()?;
    lambda.validate()?;
    let a = trace
        .dist_p()
        .ok_or_else(|| invalid("trace has no dist_p column; supply a reference point"))?;
    let (b, c): (Vec<f64>, Vec<f64>) = (1..a.len())
        .map(|n| compute_bn_cn(mu, lambda, m_const, m_star, phi, n))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    verify_recursive_bound(&a, &b, &c, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub first_max: f64,
    pub tail_max: f64,
    pub verdict: Verdict,
}

/// Compares `max(r1, r2)` over the first and last `window` rows. Passes
/// when the tail maximum is below `threshold` and either strictly below the
/// first-window maximum or exactly zero.
pub fn residual_decay(trace: &IterTrace, window: usize, threshold: f64) -> Result<DecayReport> {
    if window == 0 || trace.len() < 2 * window {
        return Err(invalid(format!(
            "residual decay needs at least {} rows, trace has {}",
            2 * window.max(1),
            trace.len()
        )));
    }
    let max_of =
        |rows: &[crate::iterate::TraceRow]| rows.iter().map(|r| r.r_max()).fold(0.0, f64::max);
    let first_max = max_of(&trace.rows[..window]);
    let tail_max = max_of(&trace.rows[trace.len() - window..]);
    let ok = tail_max < threshold && (tail_max < first_max || tail_max == 0.0);
    Ok(DecayReport {
        first_max,
        tail_max,
        verdict: Verdict::from_bool(ok),
    })
}

/// `max ‖x_{n+m} − x_n‖` for `n` in the second half of the trace.
pub fn cauchy_tail(trace: &IterTrace, m: usize) -> Result<f64> {
    let len = trace.len();
    if m == 0 || m >= len {
        return Err(invalid(format!("cauchy_tail needs 0 < m < {len}, got {m}")));
    }
    let last = len - 1 - m;
    let start = (len / 2).min(last);
    let mut worst: f64 = 0.0;
    for n in start..=last {
        worst = worst.max(trace.norm.dist(&trace.rows[n + m].x, &trace.rows[n].x)?);
    }
    Ok(worst)
}

/// `inf_{p ∈ points} ‖x − p‖`.
pub fn distance_to_set(x: &Vector, points: &[Vector], norm: NormSpec) -> Result<f64> {
    if points.is_empty() {
        return Err(invalid("distance to an empty set"));
    }
    points
        .iter()
        .map(|p| norm.dist(x, p))
        .try_fold(f64::INFINITY, |acc, d| Ok(acc.min(d?)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateModel {
    Linear { rho: f64 },
    Sublinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub model: RateModel,
    /// `exp(slope)` of the fit, reported even when the model is sublinear.
    pub fitted_ratio: f64,
    /// RMS residual of the fit in natural-log units.
    pub fit_residual: f64,
    pub points_used: usize,
}

impl RateReport {
    pub fn rho(&self) -> Option<f64> {
        match self.model {
            RateModel::Linear { rho } => Some(rho),
            RateModel::Sublinear => None,
        }
    }
}

/// Below this RMS log residual a fit is called linear.
pub const LINEAR_FIT_RESIDUAL: f64 = 0.1;

/// Least-squares fit of `ln step_delta` against `n` over the final third of
/// the rows with a positive step.
pub fn rate_estimate(trace: &IterTrace) -> Result<RateReport> {
    let pts: Vec<(f64, f64)> = trace
        .rows
        .iter()
        .filter_map(|r| match r.step_delta {
            Some(d) if d > 0.0 => Some((r.n as f64, d.ln())),
            _ => None,
        })
        .collect();
    if pts.len() < 2 {
        return Err(invalid(
            "rate estimate needs at least two positive step deltas",
        ));
    }
    let k = pts.len().div_ceil(3).max(2);
    let tail = &pts[pts.len() - k..];
    let nf = k as f64;
    let mean_x = tail.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = tail.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = tail.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let fit_residual = (tail
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    let ratio = slope.exp();
    let model = if fit_residual < LINEAR_FIT_RESIDUAL && ratio > 0.0 && ratio < 1.0 {
        RateModel::Linear { rho: ratio }
    } else {
        RateModel::Sublinear
    };
    Ok(RateReport {
        model,
        fitted_ratio: ratio,
        fit_residual,
        points_used: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::{Scheme, Terminal, TraceRow};

    fn synthetic(xs: &[f64]) -> IterTrace {
        let rows: Vec<TraceRow> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| TraceRow {
                n: i + 1,
                x: Vector::scalar(x).unwrap(),
                y: None,
                r1: x.abs(),
                r2: x.abs(),
                dist_p: Some(x.abs()),
                power_gap: None,
                step_delta: xs.get(i + 1).map(|next| (next - x).abs()),
            })
            .collect();
        IterTrace {
            scheme: Scheme::Mann,
            final_x: rows.last().unwrap().x.clone(),
            rows,
            terminal: Terminal::MaxIter,
            norm: NormSpec::Euclidean,
        }
    }

    #[test]
    fn bn_cn_examples() {
        let zero = SummableSequence::Zero;
        assert_eq!(
            compute_bn_cn(&zero, &zero, 3.0, 2.0, PhiSpec::Identity, 4).unwrap(),
            (0.0, 0.0)
        );
        let table = |v: f64| SummableSequence::Table {
            values: vec![v],
            sum_bound: v,
        };
        // b = 2·0.1 + 0.1² ; c = 1·1·0.01 + 0 + 0.1·1 + 0
        let (b, c) = compute_bn_cn(&table(0.1), &zero, 1.0, 1.0, PhiSpec::Identity, 1).unwrap();
        assert!((b - 0.21).abs() < 1e-15);
        assert!((c - 0.11).abs() < 1e-15);
        assert_eq!(
            compute_bn_cn(&zero, &table(0.5), 1.0, 1.0, PhiSpec::Identity, 1).unwrap(),
            (0.0, 0.5)
        );
    }

    #[test]
    fn recursive_bound_examples() {
        let r = verify_recursive_bound(&[1.0, 3.0], &[0.0], &[0.0], 0.0).unwrap();
        assert_eq!(
            r.violations,
            vec![Violation {
                n: 1,
                lhs: 3.0,
                rhs: 1.0
            }]
        );
        assert_eq!(r.verdict, Verdict::Fail);

        let ones = vec![1.0; 20];
        let zeros = vec![0.0; 19];
        let r = verify_recursive_bound(&ones, &zeros, &zeros, 0.0).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.limit_estimate, 1.0);

        assert!(verify_recursive_bound(&[1.0], &[], &[], 0.0).is_err());
        assert!(verify_recursive_bound(&[1.0, 1.0], &[-0.1], &[0.0], 0.0).is_err());
    }

    #[test]
    fn distance_to_set_examples() {
        let e = NormSpec::Euclidean;
        let p = |x: f64| Vector::scalar(x).unwrap();
        assert_eq!(distance_to_set(&p(0.5), &[p(0.0)], e).unwrap(), 0.5);
        assert_eq!(distance_to_set(&p(0.5), &[p(0.0), p(0.5)], e).unwrap(), 0.0);
        assert_eq!(
            distance_to_set(&p(-1.0), &[p(0.0), p(1.0)], e).unwrap(),
            1.0
        );
        assert!(distance_to_set(&p(0.0), &[], e).is_err());
    }

    #[test]
    fn halving_trace_is_linear_with_rho_half() {
        let xs: Vec<f64> = (0..60).map(|k| 0.5f64.powi(k)).collect();
        let r = rate_estimate(&synthetic(&xs)).unwrap();
        let rho = r.rho().expect("linear");
        assert!((rho - 0.5).abs() < 0.01);
    }

    #[test]
    fn constant_trace_has_no_rate() {
        assert!(rate_estimate(&synthetic(&[0.3; 30])).is_err());
    }

    #[test]
    fn cauchy_tail_edges() {
        let t = synthetic(&[0.3; 30]);
        assert_eq!(cauchy_tail(&t, 5).unwrap(), 0.0);
        assert!(cauchy_tail(&t, 30).is_err());
        let t = synthetic(&[1.0, 0.5, 0.25, 0.125]);
        assert_eq!(cauchy_tail(&t, 1).unwrap(), 0.125);
    }

    #[test]
    fn residual_decay_on_zero_residuals() {
        let t = synthetic(&[0.0; 10]);
        assert!(residual_decay(&t, 5, 1e-6).unwrap().verdict.passed());
        assert!(residual_decay(&t, 6, 1e-6).is_err());
    }
}
