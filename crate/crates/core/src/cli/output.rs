//! CSV and SVG artifacts, and validation of CSVs written earlier.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::iterate::IterTrace;
use crate::space::Vector;

pub const TRACE_HEADER: [&str; 8] = [
    "n",
    "x",
    "y",
    "r1",
    "r2",
    "dist_p",
    "power_gap",
    "step_delta",
];
pub const CERTIFY_HEADER: [&str; 6] = [
    "check_name",
    "n",
    "margin_or_estimate",
    "worst_x",
    "worst_y",
    "verdict",
];
pub const SUMMARY_HEADER: [&str; 5] = [
    "scheme",
    "iterations",
    "terminal_reason",
    "final_r_max",
    "rate_rho",
];

/// Terminal reasons that may appear in a summary row.
pub const SUMMARY_REASONS: [&str; 5] = [
    "tol-reached",
    "max-iter",
    "stagnation",
    "numerical-failure",
    "invalid-input",
];

pub type IoResult<T> = std::result::Result<T, String>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> String {
    format!("{}: {e}", path.display())
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn opt_vec(v: Option<&Vector>) -> String {
    v.map(Vector::to_string).unwrap_or_default()
}

/// Writes the trace followed by a `# terminal=<reason>` comment row.
pub fn write_trace_csv(path: &Path, trace: &IterTrace) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(TRACE_HEADER).map_err(|e| io_err(path, e))?;
    for r in &trace.rows {
        w.write_record([
            r.n.to_string(),
            r.x.to_string(),
            opt_vec(r.y.as_ref()),
            num(r.r1),
            num(r.r2),
            opt_num(r.dist_p),
            opt_num(r.power_gap),
            opt_num(r.step_delta),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    let mut file = w.into_inner().map_err(|e| io_err(path, e))?;
    writeln!(file, "# terminal={}", trace.terminal).map_err(|e| io_err(path, e))
}

/// One row of `certify.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyLine {
    pub check: String,
    pub n: Option<usize>,
    pub value: f64,
    pub worst_x: Option<Vector>,
    pub worst_y: Option<Vector>,
    pub pass: bool,
}

pub fn write_certify_csv(path: &Path, lines: &[CertifyLine]) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(CERTIFY_HEADER)
        .map_err(|e| io_err(path, e))?;
    for l in lines {
        w.write_record([
            l.check.clone(),
            l.n.map(|n| n.to_string()).unwrap_or_default(),
            num(l.value),
            opt_vec(l.worst_x.as_ref()),
            opt_vec(l.worst_y.as_ref()),
            if l.pass { "pass" } else { "fail" }.to_string(),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One row of `summary.csv`; failed runs leave the numeric columns empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryLine {
    pub scheme: String,
    pub iterations: Option<usize>,
    pub terminal_reason: String,
    pub final_r_max: Option<f64>,
    pub rate_rho: Option<f64>,
}

pub fn write_summary_csv(path: &Path, lines: &[SummaryLine]) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(SUMMARY_HEADER)
        .map_err(|e| io_err(path, e))?;
    for l in lines {
        w.write_record([
            l.scheme.clone(),
            l.iterations.map(|n| n.to_string()).unwrap_or_default(),
            l.terminal_reason.clone(),
            opt_num(l.final_r_max),
            opt_num(l.rate_rho),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const PAD: f64 = 60.0;

/// An 800×600 line chart of `log10` of `r1`, `r2` and `dist_p` against `n`.
/// Zero values have no logarithm and break the line.
pub fn trace_svg(trace: &IterTrace) -> String {
    let series: [(&str, &str, Vec<Option<f64>>); 3] = [
        (
            "r1",
            "#1f77b4",
            trace.rows.iter().map(|r| Some(r.r1)).collect(),
        ),
        (
            "r2",
            "#d62728",
            trace.rows.iter().map(|r| Some(r.r2)).collect(),
        ),
        (
            "dist_p",
            "#2ca02c",
            trace.rows.iter().map(|r| r.dist_p).collect(),
        ),
    ];
    let logs: Vec<(&str, &str, Vec<Option<f64>>)> = series
        .into_iter()
        .map(|(name, color, vals)| {
            let l = vals
                .into_iter()
                .map(|v| v.filter(|v| *v > 0.0 && v.is_finite()).map(f64::log10))
                .collect();
            (name, color, l)
        })
        .collect();
    let all = logs
        .iter()
        .flat_map(|(_, _, l)| l.iter().flatten().copied());
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    lo = lo.floor();
    hi = hi.ceil().max(lo + 1.0);
    let n_max = trace.rows.last().map_or(1, |r| r.n).max(2) as f64;
    let sx = |n: f64| PAD + (n - 1.0) / (n_max - 1.0) * (WIDTH - 2.0 * PAD);
    let sy = |v: f64| HEIGHT - PAD - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="16">{} residuals (log10), {}</text>"#,
        WIDTH / 2.0,
        trace.scheme.name(),
        trace.terminal
    );
    let (x0, x1, y0, y1) = (PAD, WIDTH - PAD, PAD, HEIGHT - PAD);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let step = ((hi - lo) / 10.0).ceil().max(1.0);
    let mut d = lo;
    while d <= hi {
        let y = sy(d);
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">1e{d}</text>"##,
            x0 - 6.0,
            y + 4.0
        );
        d += step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{x0}" y="{}" font-family="sans-serif" font-size="12">n = 1</text><text x="{x1}" y="{}" text-anchor="end" font-family="sans-serif" font-size="12">n = {n_max}</text>"#,
        y1 + 20.0,
        y1 + 20.0
    );
    for (i, (name, color, vals)) in logs.iter().enumerate() {
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let flush = |seg: &mut Vec<(f64, f64)>, s: &mut String| {
            if let [(cx, cy)] = seg[..] {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="2.5" fill="{color}"/>"#
                );
            } else if seg.len() > 1 {
                let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            seg.clear();
        };
        for (row, v) in trace.rows.iter().zip(vals) {
            match v {
                Some(v) => segment.push((sx(row.n as f64), sy(*v))),
                None => flush(&mut segment, &mut s),
            }
        }
        flush(&mut segment, &mut s);
        let ly = PAD + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{name}</text>"#,
            x1 - 90.0,
            x1 - 70.0,
            x1 - 64.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_trace_svg(path: &Path, trace: &IterTrace) -> IoResult<()> {
    fs::write(path, trace_svg(trace)).map_err(|e| io_err(path, e))
}

/// Which artifact a validated CSV turned out to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Trace,
    Certify,
    Summary,
}

impl CsvKind {
    pub fn name(self) -> &'static str {
        match self {
            CsvKind::Trace => "trace",
            CsvKind::Certify => "certify",
            CsvKind::Summary => "summary",
        }
    }
}

fn parse_f64(field: &str, col: &str, line: usize, optional: bool) -> IoResult<Option<f64>> {
    if field.is_empty() {
        return if optional {
            Ok(None)
        } else {
            Err(format!("line {line}: column `{col}` is empty"))
        };
    }
    let v: f64 = field
        .parse()
        .map_err(|_| format!("line {line}: column `{col}` is not a number: `{field}`"))?;
    Ok(Some(v))
}

fn parse_vector(field: &str, col: &str, line: usize, optional: bool) -> IoResult<()> {
    if field.is_empty() && optional {
        return Ok(());
    }
    for part in field.split(';') {
        let v: f64 = part
            .parse()
            .map_err(|_| format!("line {line}: column `{col}` is not a vector: `{field}`"))?;
        if !v.is_finite() {
            return Err(format!("line {line}: column `{col}` is not finite"));
        }
    }
    Ok(())
}

/// Checks the header, column count and value formats of a CSV written by
/// `run`, `certify` or `compare`. Returns the kind and the data row count.
pub fn validate_csv(path: &Path) -> IoResult<(CsvKind, usize)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| io_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let kind = if header == TRACE_HEADER {
        CsvKind::Trace
    } else if header == CERTIFY_HEADER {
        CsvKind::Certify
    } else if header == SUMMARY_HEADER {
        CsvKind::Summary
    } else {
        return Err(format!(
            "{}: unrecognised header `{}`",
            path.display(),
            header.join(",")
        ));
    };
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows += 1;
        match kind {
            CsvKind::Trace => {
                let n: usize = rec[0]
                    .parse()
                    .map_err(|_| format!("line {line}: column `n` is not an integer"))?;
                if n != rows {
                    return Err(format!("line {line}: expected n = {rows}, got {n}"));
                }
                parse_vector(&rec[1], "x", line, false)?;
                parse_vector(&rec[2], "y", line, true)?;
                for (i, col) in TRACE_HEADER.iter().enumerate().skip(3) {
                    let v = parse_f64(&rec[i], col, line, i >= 5)?;
                    if v.is_some_and(|v| !(v >= 0.0 && v.is_finite())) && *col != "power_gap" {
                        return Err(format!(
                            "line {line}: column `{col}` must be finite and ≥ 0"
                        ));
                    }
                }
            }
            CsvKind::Certify => {
                if rec[0].is_empty() {
                    return Err(format!("line {line}: empty check name"));
                }
                if !rec[1].is_empty() && rec[1].parse::<usize>().is_err() {
                    return Err(format!("line {line}: column `n` is not an integer"));
                }
                parse_f64(&rec[2], "margin_or_estimate", line, false)?;
                parse_vector(&rec[3], "worst_x", line, true)?;
                parse_vector(&rec[4], "worst_y", line, true)?;
                if !matches!(&rec[5], "pass" | "fail") {
                    return Err(format!(
                        "line {line}: verdict must be pass or fail, got `{}`",
                        &rec[5]
                    ));
                }
            }
            CsvKind::Summary => {
                if !rec[1].is_empty() && rec[1].parse::<usize>().is_err() {
                    return Err(format!(
                        "line {line}: column `iterations` is not an integer"
                    ));
                }
                if !SUMMARY_REASONS.contains(&&rec[2]) {
                    return Err(format!(
                        "line {line}: unknown terminal reason `{}`",
                        &rec[2]
                    ));
                }
                parse_f64(&rec[3], "final_r_max", line, true)?;
                parse_f64(&rec[4], "rate_rho", line, true)?;
            }
        }
    }
    if kind == CsvKind::Trace {
        let last = text
            .lines()
            .rev()
            .find(|l| !l.trim().is_empty())
            .unwrap_or("");
        let reason = last
            .strip_prefix("# terminal=")
            .ok_or_else(|| format!("{}: missing trailing `# terminal=` row", path.display()))?;
        if !["tol-reached", "max-iter", "stagnation"].contains(&reason.trim()) {
            return Err(format!(
                "{}: unknown terminal reason `{reason}`",
                path.display()
            ));
        }
        if rows == 0 {
            return Err(format!("{}: trace has no rows", path.display()));
        }
    }
    Ok((kind, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::{run_scheme, RunConfig, Scheme, StepSequence};
    use crate::mappings::MappingPair;

    fn demo_trace() -> IterTrace {
        let cfg = RunConfig::new(
            Scheme::PaperB,
            StepSequence::Constant(0.5),
            StepSequence::Constant(0.5),
            Vector::scalar(1.0).unwrap(),
        );
        run_scheme(
            &cfg,
            &MappingPair::paper_example(),
            Some(&Vector::scalar(0.0).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn trace_round_trips_through_validate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_trace_csv(&path, &demo_trace()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("n,x,y,r1,r2,dist_p,power_gap,step_delta\n"));
        assert!(text.ends_with("# terminal=tol-reached\n"));
        assert_eq!(validate_csv(&path).unwrap(), (CsvKind::Trace, 3));
    }

    #[test]
    fn validate_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(
            &path,
            "check_name,n,margin_or_estimate,worst_x,worst_y,verdict\nx,,1.0,,,maybe\n",
        )
        .unwrap();
        assert!(validate_csv(&path).unwrap_err().contains("verdict"));
        fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(validate_csv(&path).unwrap_err().contains("header"));
    }

    #[test]
    fn svg_has_fixed_size_and_three_series() {
        let svg = trace_svg(&demo_trace());
        assert!(
            svg.starts_with(r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600""#)
        );
        for name in ["r1", "r2", "dist_p"] {
            assert!(svg.contains(&format!(">{name}</text>")));
        }
    }
}
