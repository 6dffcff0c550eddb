//! One-parameter families of spaces and how far they are from being
//! geodesics, i.e. from `d_GH(γ(s), γ(t)) = v·|s - t|`.

use rayon::prelude::*;

use crate::correspondence::{distortion_of_pairs, Correspondence};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::solver::{gh_exact, gh_lower_diam, SolverOptions};

/// Largest `|A|·|X|` for which product families are solved exactly.
pub const EXACT_PRODUCT_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum CurveFamily {
    /// `t ↦ tX`
    Scale(FiniteMetricSpace),
    /// `t ↦ A ×ℓ¹ (tX)`
    ProductScale { a: FiniteMetricSpace, x: FiniteMetricSpace },
}

impl CurveFamily {
    /// Points per sample.
    pub fn sample_size(&self) -> usize {
        match self {
            CurveFamily::Scale(x) => x.len(),
            CurveFamily::ProductScale { a, x } => a.len() * x.len(),
        }
    }

    /// `diam X / 2`, the speed the family is expected to travel at.
    pub fn nominal_speed(&self) -> f64 {
        match self {
            CurveFamily::Scale(x) | CurveFamily::ProductScale { x, .. } => x.diameter() / 2.0,
        }
    }

    /// Whether exact mode is allowed for this family.
    pub fn exact_allowed(&self, opts: &SolverOptions) -> bool {
        match self {
            CurveFamily::Scale(x) => opts.cap.check(x.len(), x.len()).is_ok(),
            CurveFamily::ProductScale { .. } => {
                let n = self.sample_size();
                n <= EXACT_PRODUCT_LIMIT && opts.cap.check(n, n).is_ok()
            }
        }
    }
}

pub fn sample_curve(family: &CurveFamily, ts: &[f64]) -> Result<Vec<FiniteMetricSpace>> {
    ts.iter()
        .map(|&t| match family {
            CurveFamily::Scale(x) => x.scale(t),
            CurveFamily::ProductScale { a, x } => a.l1_product(&x.scale(t)?),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationMode {
    Exact,
    Sandwich,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub s: f64,
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    /// `speed·|s - t|`
    pub target: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub speed: f64,
    pub rows: Vec<DeviationRow>,
    /// Exact mode was requested but the samples were too large.
    pub fell_back_to_sandwich: bool,
    /// Some exact value hit the solver budget and is only an upper bound.
    pub budget_exceeded: bool,
}

impl DeviationReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }

    /// CSV with header `s,t,lower,upper,exact,target,deviation`; `exact` is blank when unavailable.
    pub fn to_csv(&self) -> String {
        use crate::io::format_real as f;
        let mut out = String::from("s,t,lower,upper,exact,target,deviation\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                f(r.s),
                f(r.t),
                f(r.lower),
                f(r.upper),
                r.exact.map(f).unwrap_or_default(),
                f(r.target),
                f(r.deviation)
            ));
        }
        out
    }
}

/// Upper bound on `d_GH` from explicit correspondences: the identity (samples
/// of one family share their index set) and the full correspondence.
fn explicit_upper(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut best = Correspondence::full(x.len(), y.len())
        .map(|r| distortion_of_pairs(r.pairs(), x, y, f64::INFINITY))
        .unwrap_or(f64::INFINITY);
    if x.len() == y.len() {
        let id: Vec<_> = (0..x.len()).map(|i| (i, i)).collect();
        best = best.min(distortion_of_pairs(&id, x, y, best));
    }
    best / 2.0
}

/// Compares every pair of samples against `speed·|s - t|`.
///
/// Exact mode solves each pair; the deviation is `|d_GH - target|`. Sandwich
/// mode brackets `d_GH` between the diameter bound and an explicit upper
/// bound; the deviation is the distance from the target to that interval.
/// Exact mode falls back to sandwich (flagged) when samples exceed the solver cap.
pub fn geodesic_deviation(
    samples: &[FiniteMetricSpace],
    ts: &[f64],
    speed: f64,
    mode: DeviationMode,
    opts: &SolverOptions,
) -> Result<DeviationReport> {
    if samples.len() != ts.len() {
        return Err(Error::SizeMismatch(samples.len(), ts.len()));
    }
    let mut fell_back = false;
    let mut mode = mode;
    if mode == DeviationMode::Exact && samples.iter().any(|s| opts.cap.check(s.len(), s.len()).is_err()) {
        mode = DeviationMode::Sandwich;
        fell_back = true;
    }
    let pairs: Vec<(usize, usize)> =
        (0..ts.len()).flat_map(|a| (a + 1..ts.len()).map(move |b| (a, b))).collect();
    let rows = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (x, y) = (&samples[a], &samples[b]);
            let target = speed * (ts[a] - ts[b]).abs();
            let lower = gh_lower_diam(x, y);
            let upper = explicit_upper(x, y);
            let (exact, deviation, capped) = match mode {
                DeviationMode::Exact => {
                    let cert = gh_exact(x, y, opts)?;
                    let capped = !cert.lower_proof.is_optimal();
                    (Some(cert.value), (cert.value - target).abs(), capped)
                }
                DeviationMode::Sandwich => {
                    let dev = (lower - target).max(target - upper).max(0.0);
                    (None, dev, false)
                }
            };
            Ok((DeviationRow { s: ts[a], t: ts[b], lower, upper, exact, target, deviation }, capped))
        })
        .collect::<Result<Vec<_>>>()?;
    let budget_exceeded = rows.iter().any(|(_, capped)| *capped);
    Ok(DeviationReport {
        speed,
        rows: rows.into_iter().map(|(r, _)| r).collect(),
        fell_back_to_sandwich: fell_back,
        budget_exceeded,
    })
}

/// Samples `family` at `ts` and measures deviation at the family's nominal speed,
/// using exact mode only where the family allows it.
pub fn family_deviation(
    family: &CurveFamily,
    ts: &[f64],
    mode: DeviationMode,
    opts: &SolverOptions,
) -> Result<DeviationReport> {
    let samples = sample_curve(family, ts)?;
    let allowed = family.exact_allowed(opts);
    let effective = if mode == DeviationMode::Exact && !allowed { DeviationMode::Sandwich } else { mode };
    let mut report = geodesic_deviation(&samples, ts, family.nominal_speed(), effective, opts)?;
    report.fell_back_to_sandwich |= mode != effective;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{from_reals, EPS};

    #[test]
    fn sampling() {
        let x = from_reals(&[0., 1.]).unwrap();
        let s = sample_curve(&CurveFamily::Scale(x.clone()), &[0., 1., 2.]).unwrap();
        let diams: Vec<f64> = s.iter().map(FiniteMetricSpace::diameter).collect();
        assert_eq!(diams, vec![0., 1., 2.]);

        let a = from_reals(&[0., 1000.]).unwrap();
        let fam = CurveFamily::ProductScale { a: a.clone(), x };
        let s = sample_curve(&fam, &[0., 1.]).unwrap();
        assert_eq!(s[1].len(), 4);
        // zero factor: each point of A appears twice at distance 0
        assert_eq!(s[0].d(0, 1), 0.0);
        assert_eq!(s[0].d(0, 2), a.d(0, 1));
        assert!(sample_curve(&fam, &[-1.0]).is_err());
    }

    #[test]
    fn scale_family_is_geodesic() {
        let x = from_reals(&[0., 1.]).unwrap();
        let fam = CurveFamily::Scale(x);
        let rep = family_deviation(&fam, &[0., 1., 2.], DeviationMode::Exact, &SolverOptions::default()).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.max_deviation() <= EPS);
        assert!(!rep.fell_back_to_sandwich);
    }

    #[test]
    fn single_sample_has_no_rows() {
        let x = from_reals(&[0., 1.]).unwrap();
        let rep = geodesic_deviation(&[x], &[1.0], 0.5, DeviationMode::Exact, &SolverOptions::default()).unwrap();
        assert!(rep.rows.is_empty());
        assert_eq!(rep.max_deviation(), 0.0);
    }

    #[test]
    fn product_family_sandwich_is_tight() {
        let a = from_reals(&[0., 1000.]).unwrap();
        let x = from_reals(&[0., 1.]).unwrap();
        let fam = CurveFamily::ProductScale { a, x };
        let opts = SolverOptions::default();
        let exact = family_deviation(&fam, &[1., 2.], DeviationMode::Exact, &opts).unwrap();
        let sandwich = family_deviation(&fam, &[1., 2.], DeviationMode::Sandwich, &opts).unwrap();
        let row = &sandwich.rows[0];
        assert_eq!(row.upper, 0.5);
        assert_eq!(exact.rows[0].exact, Some(0.5));
        assert!(row.lower <= 0.5 && 0.5 <= row.upper);
    }

    #[test]
    fn large_product_falls_back() {
        let a = from_reals(&[0., 100., 200.]).unwrap();
        let x = from_reals(&[0., 1., 3.]).unwrap();
        let fam = CurveFamily::ProductScale { a, x };
        let rep = family_deviation(&fam, &[1., 2.], DeviationMode::Exact, &SolverOptions::default()).unwrap();
        assert!(rep.fell_back_to_sandwich);
        assert!(rep.rows[0].exact.is_none());
        assert_eq!(rep.to_csv().lines().nth(1).unwrap(), "1,2,1.5,1.5,,1.5,0");
    }

    #[test]
    fn misaligned_inputs() {
        let x = from_reals(&[0., 1.]).unwrap();
        assert!(geodesic_deviation(&[x], &[], 0.5, DeviationMode::Exact, &SolverOptions::default()).is_err());
    }
}
