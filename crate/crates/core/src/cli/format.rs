//! Text output: JSON, `%g`-style numbers, aligned matrices and trajectory CSV.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde_json::Value;

use crate::linalg::Matrix;
use crate::simulator::Trajectory;

/// Formats `x` with `sig` significant digits the way C's `%.{sig}g` does:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros removed. Negative zero prints as `0`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Indented JSON where arrays of scalars stay on one line, so matrices print
/// one row per line. Negative zero is written as `0.0`.
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (key, v)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(key.clone()));
                write_value(out, v, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
        Value::Array(items) if items.iter().any(|v| v.is_array() || v.is_object()) => {
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, v, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, v, indent);
            }
            out.push(']');
        }
        Value::Number(n) if n.as_f64() == Some(0.0) && n.is_f64() => out.push_str("0.0"),
        other => out.push_str(&other.to_string()),
    }
}

/// Writes a labelled matrix with right-aligned columns.
pub fn write_matrix(
    out: &mut dyn Write,
    name: &str,
    m: &Matrix,
    row_labels: &[String],
    col_labels: &[String],
) -> io::Result<()> {
    writeln!(out, "{name} ({}x{})", m.rows(), m.cols())?;
    let cells: Vec<Vec<String>> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|&v| fmt_sig(v, 6)).collect())
        .collect();
    let label_width = row_labels.iter().map(String::len).max().unwrap_or(0);
    let width = cells
        .iter()
        .flatten()
        .chain(col_labels)
        .map(String::len)
        .max()
        .unwrap_or(1);
    write!(out, "{:label_width$}", "")?;
    for c in col_labels {
        write!(out, "  {c:>width$}")?;
    }
    writeln!(out)?;
    for (label, row) in row_labels.iter().zip(&cells) {
        write!(out, "{label:<label_width$}")?;
        for v in row {
            write!(out, "  {v:>width$}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `t,<states>,<inputs>` header followed by one row per sample, 17 significant digits.
pub fn write_trajectory_csv(out: &mut dyn Write, traj: &Trajectory) -> io::Result<()> {
    let header: Vec<&str> = std::iter::once("t")
        .chain(traj.state_labels.iter().map(String::as_str))
        .chain(traj.input_labels.iter().map(String::as_str))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for k in 0..traj.len() {
        let row: Vec<String> = std::iter::once(traj.times[k])
            .chain(traj.states[k].iter().copied())
            .chain(traj.inputs[k].iter().copied())
            .map(|v| fmt_sig(v, 17))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
