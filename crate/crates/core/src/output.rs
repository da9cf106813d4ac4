//! Shared text formatting for CSV artifacts.

use std::fmt::Write as _;

/// Formats a real with 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds a CSV document from a header and rows of reals.
pub fn csv_table<'a, I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&num(*v));
        }
        out.push('\n');
    }
    out
}

/// Single-column `value` CSV.
pub fn value_column(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24 + 6);
    out.push_str("value\n");
    for v in values {
        let _ = writeln!(out, "{}", num(*v));
    }
    out
}
