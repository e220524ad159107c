//! Text serialization helpers shared by all CSV writers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Formats `v` like C's `%.17g`: 17 significant digits, trailing zeros
/// dropped, exponent form outside `[1e-5, 1e17)`.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, v))
    } else {
        let m = trim(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Joins already formatted fields into one LF-terminated CSV line.
pub fn line(out: &mut String, fields: &[String]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(f);
    }
    out.push('\n');
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Degree histogram CSV `degree,count`.
pub fn histogram_csv(hist: &[usize]) -> String {
    let mut out = String::from("degree,count\n");
    for (d, c) in hist.iter().enumerate() {
        let _ = writeln!(out, "{d},{c}");
    }
    out
}
