//! Text formats: the matrix file and real-number formatting.
//!
//! Matrix file: line 1 is `n`, line 2 holds `n` whitespace-separated labels,
//! then `n` rows of `n` whitespace-separated reals.

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Formats a real with 12 significant digits, in the style of C's `%.12g`.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn parse_matrix(text: &str) -> Result<FiniteMetricSpace> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .parse()
        .map_err(|_| Error::Parse("first line must be the point count".into()))?;
    let labels: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse("missing label line".into()))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::with_capacity(n);
    for (r, line) in lines.enumerate() {
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {r}: not a number: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    FiniteMetricSpace::validate(rows, labels)
}

pub fn format_matrix(x: &FiniteMetricSpace) -> String {
    let mut s = format!("{}\n{}\n", x.len(), x.labels().join(" "));
    for row in x.rows() {
        let cells: Vec<String> = row.iter().map(|&v| format_real(v)).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::from_reals;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(1.5), "1.5");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_real(2.0f64.sqrt() * 2.0), "2.82842712475");
        assert_eq!(format_real(1234567.0), "1234567");
        assert_eq!(format_real(1e15), "1e+15");
        assert_eq!(format_real(1.25e-7), "1.25e-07");
        assert_eq!(format_real(-0.5), "-0.5");
    }

    #[test]
    fn matrix_round_trip() {
        let x = from_reals(&[0., 0.1, 3.7]).unwrap();
        let text = format_matrix(&x);
        assert_eq!(text, "3\n0 0.1 3.7\n0 0.1 3.7\n0.1 0 3.6\n3.7 3.6 0\n");
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back.labels(), x.labels());
        assert_eq!(format_matrix(&back), text);
    }

    #[test]
    fn malformed_files() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2\na b\n0 1\n").is_err());
        assert!(parse_matrix("2\na b\n0 x\n1 0\n").is_err());
        let e = parse_matrix("3\na b c\n0 1 5\n1 0 1\n5 1 0\n").unwrap_err();
        assert_eq!(e, Error::TriangleViolation(0, 1, 2));
    }
}
