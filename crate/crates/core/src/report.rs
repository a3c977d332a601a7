//! CSV rendering with 12 significant digits and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::experiments::ExperimentReport;
use crate::Result;

/// Formats like C's `%.12g`.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= DIGITS {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header, one row per grid cell, then `# name=value` footer lines.
pub fn render_report(report: &ExperimentReport) -> String {
    let mut out = report.columns.join(",");
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_g(r.param),
            fmt_g(r.mean),
            fmt_g(r.std),
            r.trials,
            fmt_g(r.queries_mean)
        );
    }
    let _ = writeln!(out, "# seed={}", report.seed);
    for (name, value) in &report.fits {
        let _ = writeln!(out, "# {name}={}", fmt_g(*value));
    }
    out
}

/// Writes to a sibling temporary file and renames it over `path`, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ReportRow, ACCURACY_COLUMNS};

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(-2.5e-7), "-2.5e-07");
        assert_eq!(fmt_g(1e16), "1e+16");
        assert_eq!(fmt_g(123456789012.0), "123456789012");
        assert_eq!(fmt_g(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(f64::NAN), "nan");
        for x in [std::f64::consts::PI, 1e-300, 6.02214076e23, -0.1] {
            let back: f64 = fmt_g(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn report_layout() {
        let r = ExperimentReport {
            columns: ACCURACY_COLUMNS,
            rows: vec![ReportRow {
                param: 1e-5,
                mean: 0.86,
                std: 0.01,
                trials: 50,
                queries_mean: 2.0,
            }],
            seed: 7,
            fits: vec![("slope".into(), -0.5)],
        };
        assert_eq!(
            render_report(&r),
            "param,accuracy_mean,accuracy_std,trials,queries_mean\n1e-05,0.86,0.01,50,2\n# seed=7\n# slope=-0.5\n"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"a").unwrap();
        write_atomic(&p, b"b").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"b");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
