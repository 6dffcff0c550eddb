//! Finite metric spaces and the constructions built on top of them:
//! subsets of the line, scalings, ℓ¹ products and constant shifts.
//!
//! A [`FiniteMetricSpace`] is an immutable labelled distance matrix. Distinct
//! points at distance zero are admitted so that scaling by zero stays total.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance for metric-validity and isometry comparisons.
pub const EPS: f64 = 1e-9;

/// Largest number of points a constructed space (product, lattice window) may have.
pub const DEFAULT_MAX_POINTS: usize = 4096;

#[derive(Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    n: usize,
    dist: Vec<f64>,
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("labels", &self.labels)
            .field("dist", &self.rows().collect::<Vec<_>>())
            .finish()
    }
}

impl FiniteMetricSpace {
    /// Validates a square matrix and wraps it as a metric space.
    ///
    /// Checks, in order: shape, diagonal, sign, symmetry and the triangle
    /// inequality (within [`EPS`]). The first failure is reported with the
    /// offending indices.
    pub fn validate(matrix: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if labels.len() != n {
            return Err(Error::LabelCount { expected: n, got: labels.len() });
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
        }
        let dist: Vec<f64> = matrix.into_iter().flatten().collect();
        let space = FiniteMetricSpace { labels, n, dist };
        space.check_axioms()?;
        Ok(space)
    }

    /// Builds a space with default labels `0..n`.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
        Self::validate(matrix, labels)
    }

    /// The one-point space.
    pub fn point() -> Self {
        FiniteMetricSpace { labels: vec!["*".to_string()], n: 1, dist: vec![0.0] }
    }

    /// Internal constructor for matrices that are metric by construction.
    pub(crate) fn from_parts_unchecked(labels: Vec<String>, dist: Vec<f64>) -> Self {
        let n = labels.len();
        debug_assert_eq!(dist.len(), n * n);
        FiniteMetricSpace { labels, n, dist }
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return Err(Error::NonZeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = self.d(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NegativeEntry(i, j));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.d(i, j) - self.d(j, i)).abs() > EPS {
                    return Err(Error::Asymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d(i, k) > self.d(i, j) + self.d(j, k) + EPS {
                        return Err(Error::TriangleViolation(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; a space has at least one point.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.dist.chunks(self.n)
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Largest pairwise distance; zero for a one-point space.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every distance by `t`.
    pub fn scale(&self, t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NegativeScale(t));
        }
        let dist = self.dist.iter().map(|&v| v * t).collect();
        Ok(FiniteMetricSpace { labels: self.labels.clone(), n: self.n, dist })
    }

    /// ℓ¹ product with the default size cap.
    pub fn l1_product(&self, other: &Self) -> Result<Self> {
        self.l1_product_capped(other, DEFAULT_MAX_POINTS)
    }

    /// ℓ¹ product: points are pairs `(x, y)` in row-major order over
    /// `(index in self, index in other)`, labelled `"x|y"`, and
    /// `d((x,y),(x',y')) = d(x,x') + d(y,y')`.
    pub fn l1_product_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let (nx, ny) = (self.n, other.n);
        let size = nx.checked_mul(ny).unwrap_or(usize::MAX);
        if size > cap {
            return Err(Error::SizeOverflow { size, cap });
        }
        let mut labels = Vec::with_capacity(size);
        for lx in &self.labels {
            for ly in &other.labels {
                labels.push(format!("{lx}|{ly}"));
            }
        }
        let mut dist = Vec::with_capacity(size * size);
        for x in 0..nx {
            for y in 0..ny {
                for x2 in 0..nx {
                    for y2 in 0..ny {
                        dist.push(self.d(x, x2) + other.d(y, y2));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { labels, n: size, dist })
    }

    /// Adds `c > 0` to every off-diagonal distance.
    pub fn add_constant(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::NonPositiveConstant(c));
        }
        let n = self.n;
        let mut dist = self.dist.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dist[i * n + j] += c;
                }
            }
        }
        Ok(FiniteMetricSpace { labels: self.labels.clone(), n, dist })
    }

    /// Compares `self` and `other` under the pairing `i -> pairing[i]`.
    pub fn check_isometry(&self, other: &Self, pairing: &[usize]) -> Result<IsometryCheck> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        if pairing.len() != self.n {
            return Err(Error::NonBijectivePairing);
        }
        let mut seen = vec![false; self.n];
        for &p in pairing {
            if p >= self.n || seen[p] {
                return Err(Error::NonBijectivePairing);
            }
            seen[p] = true;
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let lhs = self.d(i, j);
                let rhs = other.d(pairing[i], pairing[j]);
                if (lhs - rhs).abs() > EPS {
                    return Ok(IsometryCheck::Violation { i, j, lhs, rhs });
                }
            }
        }
        Ok(IsometryCheck::Isometric)
    }

    /// Same as [`check_isometry`](Self::check_isometry) with the identity pairing.
    pub fn check_identity_isometry(&self, other: &Self) -> Result<IsometryCheck> {
        let id: Vec<usize> = (0..self.n).collect();
        self.check_isometry(other, &id)
    }
}

/// Outcome of an isometry check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IsometryCheck {
    Isometric,
    /// First pair (row-major) whose distances disagree.
    Violation { i: usize, j: usize, lhs: f64, rhs: f64 },
}

impl IsometryCheck {
    pub fn is_isometric(&self) -> bool {
        matches!(self, IsometryCheck::Isometric)
    }
}

/// A finite, strictly increasing subset of the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet1D(Vec<f64>);

impl PointSet1D {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() || (i > 0 && *p <= points[i - 1]) {
                return Err(Error::NotStrictlyIncreasing(i));
            }
        }
        Ok(PointSet1D(points))
    }

    /// `{0, gap, 2·gap, …, (k-1)·gap}`.
    pub fn arithmetic(k: usize, gap: f64) -> Result<Self> {
        if !(gap > 0.0) {
            return Err(Error::InvalidParameter(format!("gap must be positive, got {gap}")));
        }
        Self::new((0..k).map(|i| i as f64 * gap).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    /// The subset with the metric induced from the line.
    pub fn to_space(&self) -> FiniteMetricSpace {
        let pts = &self.0;
        let labels = pts.iter().map(|p| p.to_string()).collect();
        let dist = pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| (a - b).abs()))
            .collect();
        FiniteMetricSpace::from_parts_unchecked(labels, dist)
    }
}

/// Convenience wrapper: validate points and build the induced space.
pub fn from_reals(points: &[f64]) -> Result<FiniteMetricSpace> {
    Ok(PointSet1D::new(points.to_vec())?.to_space())
}
