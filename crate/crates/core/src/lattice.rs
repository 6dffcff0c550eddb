//! Integer-lattice counting for the scaling experiments on `Zⁿ`.
//!
//! `N(t)` counts lattice points of `Zⁿ` in the Euclidean ball of radius `λt`
//! and `N'(t)` those in radius `t + c/λ` (the ball of radius `λt + c` in
//! `λZⁿ`, rescaled). A bijective correspondence `Zⁿ -> λZⁿ` with distortion at
//! most `c` would force `N'(t) >= N(t)` for every `t`; any `t` with
//! `N(t) > N'(t)` is a witness against it. Turning "not bijective" into
//! `c >= 1` needs an argument on all of `Zⁿ` and is not attempted here.
//!
//! Radii are exact rationals. A lattice point `z` is inside radius `p/q`
//! iff `z·z <= floor(p²/q²)`, which is an integer comparison.

use num_integer::Roots;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::format_real;
use crate::metric::{FiniteMetricSpace, DEFAULT_MAX_POINTS};

pub type Rational = Ratio<i128>;

pub const MAX_DIMENSION: usize = 4;
/// Largest number of outer box cells enumerated by [`ball_count`].
pub const MAX_BOX_CELLS: u128 = 4_000_000_000;

/// Parses `p/q`, an integer, or a plain decimal such as `2.5` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 30
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i128 = digits.parse().map_err(|_| bad())?;
    let den = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Exact rational value of a finite, non-negative `f64` of magnitude at least one,
/// or zero for values in `[0, 1)` (they admit only the origin).
pub fn rational_from_f64(r: f64) -> Result<Rational> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidParameter(format!("radius must be finite and non-negative, got {r}")));
    }
    if r < 1.0 {
        return Ok(Rational::from_integer(0));
    }
    let bits = r.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1075;
    let mantissa = ((bits & ((1u64 << 52) - 1)) | (1u64 << 52)) as i128;
    if exp >= 0 {
        let v = mantissa
            .checked_mul(1i128.checked_shl(exp as u32).filter(|&s| s > 0).ok_or_else(|| {
                Error::BoxTooLarge(r.to_string())
            })?)
            .ok_or_else(|| Error::BoxTooLarge(r.to_string()))?;
        Ok(Rational::from_integer(v))
    } else {
        Ok(Rational::new(mantissa, 1i128 << (-exp)))
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `floor(r²)` for a non-negative rational radius.
fn squared_floor(r: &Rational) -> Result<u64> {
    if *r.numer() < 0 {
        return Err(Error::InvalidParameter(format!("radius must be non-negative, got {r}")));
    }
    let overflow = || Error::BoxTooLarge(r.to_string());
    let p2 = r.numer().checked_mul(*r.numer()).ok_or_else(overflow)?;
    let q2 = r.denom().checked_mul(*r.denom()).ok_or_else(overflow)?;
    u64::try_from(p2 / q2).map_err(|_| overflow())
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIMENSION {
        return Err(Error::DimensionCapExceeded(n));
    }
    Ok(())
}

/// Number of `z ∈ Zⁿ` with `|z| <= r`.
///
/// Enumerates the box `[-⌊r⌋, ⌊r⌋]^(n-1)` and counts the admissible last
/// coordinates with an integer square root.
pub fn ball_count(n: usize, r: &Rational) -> Result<u64> {
    check_dimension(n)?;
    let limit = squared_floor(r)?;
    let side = limit.sqrt();
    let cells = (2 * side as u128 + 1).pow(n as u32 - 1);
    if cells > MAX_BOX_CELLS {
        return Err(Error::BoxTooLarge(r.to_string()));
    }
    if n == 1 {
        return Ok(2 * side + 1);
    }
    let side = side as i64;
    Ok((-side..=side)
        .into_par_iter()
        .map(|z| count_rest(n - 1, limit - (z * z) as u64))
        .sum())
}

fn count_rest(dims: usize, budget: u64) -> u64 {
    if dims == 1 {
        return 2 * budget.sqrt() + 1;
    }
    let side = budget.sqrt() as i64;
    (-side..=side).map(|z| count_rest(dims - 1, budget - (z * z) as u64)).sum()
}

/// [`ball_count`] for a floating-point radius, converted exactly.
pub fn ball_count_f64(n: usize, r: f64) -> Result<u64> {
    ball_count(n, &rational_from_f64(r)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeRow {
    pub t: Rational,
    /// Points of `Zⁿ` within `λt`.
    pub count: u64,
    /// Points of `Zⁿ` within `t + c/λ`.
    pub count_prime: u64,
    /// `count / count_prime`, absent when `count_prime` is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeReport {
    pub n: usize,
    pub lambda: Rational,
    pub c: Rational,
    pub rows: Vec<LatticeRow>,
    pub witness_t: Option<Rational>,
}

impl LatticeReport {
    /// CSV with header `t,N,Nprime,ratio` and a `witness_t` footer row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,N,Nprime,ratio\n");
        for row in &self.rows {
            let ratio = row.ratio.map(format_real).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{}\n",
                format_real(to_f64(&row.t)),
                row.count,
                row.count_prime,
                ratio
            ));
        }
        let w = self.witness_t.map(|t| format_real(to_f64(&t))).unwrap_or_else(|| "none".into());
        s.push_str(&format!("witness_t,{w},,\n"));
        s
    }
}

fn check_params(lambda: &Rational, c: &Rational) -> Result<()> {
    if *lambda <= Rational::from_integer(1) {
        return Err(Error::InvalidParameter(format!("lambda must exceed 1, got {lambda}")));
    }
    if *c < Rational::from_integer(0) {
        return Err(Error::InvalidParameter(format!("c must be non-negative, got {c}")));
    }
    Ok(())
}

fn lattice_row(n: usize, lambda: &Rational, c: &Rational, t: &Rational) -> Result<LatticeRow> {
    if *t < Rational::from_integer(0) {
        return Err(Error::InvalidParameter(format!("t must be non-negative, got {t}")));
    }
    let count = ball_count(n, &(lambda * t))?;
    let count_prime = ball_count(n, &(t + c / lambda))?;
    let ratio = (count_prime > 0).then(|| count as f64 / count_prime as f64);
    Ok(LatticeRow { t: *t, count, count_prime, ratio })
}

/// `N(t)`, `N'(t)` and their ratio for each `t`; the ratio tends to `λⁿ`.
pub fn ratio_series(n: usize, lambda: Rational, c: Rational, ts: &[Rational]) -> Result<LatticeReport> {
    check_dimension(n)?;
    check_params(&lambda, &c)?;
    let rows = ts.iter().map(|t| lattice_row(n, &lambda, &c, t)).collect::<Result<Vec<_>>>()?;
    let witness_t = rows.iter().find(|r| r.count > r.count_prime).map(|r| r.t);
    Ok(LatticeReport { n, lambda, c, rows, witness_t })
}

/// Smallest grid `t` with `N(t) > N'(t)`, if any.
pub fn witness_radius(n: usize, lambda: Rational, c: Rational, grid: &[Rational]) -> Result<Option<Rational>> {
    Ok(witness_report(n, lambda, c, grid)?.witness_t)
}

/// Evaluates the grid in order up to and including the first witness.
pub fn witness_report(n: usize, lambda: Rational, c: Rational, grid: &[Rational]) -> Result<LatticeReport> {
    check_dimension(n)?;
    check_params(&lambda, &c)?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
    }
    let mut rows = Vec::new();
    let mut witness_t = None;
    for t in grid {
        let row = lattice_row(n, &lambda, &c, t)?;
        let hit = row.count > row.count_prime;
        rows.push(row);
        if hit {
            witness_t = Some(*t);
            break;
        }
    }
    Ok(LatticeReport { n, lambda, c, rows, witness_t })
}

/// `{-k, …, k}ⁿ` with the Euclidean metric, labelled `a,b,…`.
pub fn zn_window(n: usize, k: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let side = 2 * k + 1;
    let size = (side as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > DEFAULT_MAX_POINTS as u128 {
        return Err(Error::SizeOverflow { size: usize::try_from(size).unwrap_or(usize::MAX), cap: DEFAULT_MAX_POINTS });
    }
    let size = size as usize;
    let points: Vec<Vec<i64>> = (0..size)
        .map(|mut idx| {
            let mut p = vec![0i64; n];
            for coord in p.iter_mut().rev() {
                *coord = (idx % side) as i64 - k as i64;
                idx /= side;
            }
            p
        })
        .collect();
    let labels = points
        .iter()
        .map(|p| p.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect();
    let mut dist = Vec::with_capacity(size * size);
    for a in &points {
        for b in &points {
            let sq: i64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
            dist.push((sq as f64).sqrt());
        }
    }
    Ok(FiniteMetricSpace::from_parts_unchecked(labels, dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(q("2/1"), Rational::from_integer(2));
        assert_eq!(q("2.5"), Rational::new(5, 2));
        assert_eq!(q("3"), Rational::from_integer(3));
        assert_eq!(q("-0.25"), Rational::new(-1, 4));
        assert_eq!(q(".5"), Rational::new(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1e3").is_err());
    }

    #[test]
    fn exact_float_conversion() {
        assert_eq!(rational_from_f64(2.5).unwrap(), Rational::new(5, 2));
        assert_eq!(rational_from_f64(1000.0).unwrap(), Rational::from_integer(1000));
        assert_eq!(rational_from_f64(0.3).unwrap(), Rational::from_integer(0));
        let r = rational_from_f64(1.1).unwrap();
        assert_eq!(to_f64(&r), 1.1);
        assert!(rational_from_f64(-1.0).is_err());
    }

    #[test]
    fn ball_count_examples() {
        assert_eq!(ball_count(1, &q("2.5")).unwrap(), 5);
        assert_eq!(ball_count(2, &q("1")).unwrap(), 5);
        assert_eq!(ball_count(2, &q("2")).unwrap(), 13);
        assert_eq!(ball_count(3, &q("0")).unwrap(), 1);
        assert_eq!(ball_count_f64(2, 2.0).unwrap(), 13);
        assert!(matches!(ball_count(5, &q("1")), Err(Error::DimensionCapExceeded(5))));
    }

    #[test]
    fn shell_boundary_is_exact() {
        // radius sqrt(2) lies strictly between 1.41421356 and 1.41421357
        assert_eq!(ball_count(2, &q("141421356/100000000")).unwrap(), 5);
        assert_eq!(ball_count(2, &q("141421357/100000000")).unwrap(), 9);
    }

    #[test]
    fn ratio_series_examples() {
        let rep = ratio_series(1, q("2"), q("0"), &[q("100")]).unwrap();
        assert_eq!((rep.rows[0].count, rep.rows[0].count_prime), (401, 201));
        assert!((rep.rows[0].ratio.unwrap() - 401.0 / 201.0).abs() < 1e-15);
        assert!(ratio_series(1, q("1"), q("0"), &[q("1")]).is_err());
        assert!(ratio_series(1, q("2"), q("-1"), &[q("1")]).is_err());
    }

    #[test]
    fn witness_examples() {
        let grid: Vec<Rational> = (1..=10).map(Rational::from_integer).collect();
        let rep = witness_report(1, q("2"), q("3"), &grid).unwrap();
        assert_eq!(rep.witness_t, Some(q("2")));
        let last = rep.rows.last().unwrap();
        assert_eq!((last.count, last.count_prime), (9, 7));
        assert_eq!(witness_radius(1, q("2"), q("0"), &[q("1")]).unwrap(), Some(q("1")));
        assert_eq!(witness_radius(1, q("2"), q("3"), &[q("1")]).unwrap(), None);
        assert!(witness_radius(1, q("2"), q("0"), &[]).is_err());
        assert!(witness_radius(1, q("2"), q("0"), &[q("2"), q("1")]).is_err());
    }

    #[test]
    fn report_csv() {
        let rep = witness_report(1, q("2"), q("0"), &[q("1")]).unwrap();
        assert_eq!(rep.to_csv(), "t,N,Nprime,ratio\n1,5,3,1.66666666667\nwitness_t,1,,\n");
    }

    #[test]
    fn windows() {
        let w = zn_window(1, 1).unwrap();
        assert_eq!(w.to_matrix(), crate::metric::from_reals(&[-1., 0., 1.]).unwrap().to_matrix());
        assert_eq!(zn_window(2, 0).unwrap().len(), 1);
        let w = zn_window(2, 1).unwrap();
        assert_eq!(w.len(), 9);
        assert_eq!(w.diameter(), 8f64.sqrt());
        assert_eq!(w.labels()[0], "-1,-1");
        assert!(zn_window(4, 10).is_err());
    }
}
