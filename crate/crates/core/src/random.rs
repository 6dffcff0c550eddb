//! Seeded generation of small test spaces.
//!
//! Every random draw comes from [`Lcg64`], a 64-bit linear congruential
//! generator with Knuth's MMIX constants, so runs can be replayed from a seed
//! in any language:
//!
//! ```text
//! state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
//! output = state >> 33                                         (31 bits)
//! ```
//!
//! The state is advanced before each output; the seed is the initial state.

use crate::correspondence::Correspondence;
use crate::metric::{FiniteMetricSpace, PointSet1D};

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        (self.state >> 33) as u32
    }

    /// Uniform integer in `0..n` by modulo reduction.
    pub fn below(&mut self, n: u32) -> u32 {
        assert!(n > 0);
        self.next_u32() % n
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: u32, hi: u32) -> u32 {
        lo + self.below(hi - lo + 1)
    }
}

/// A random space with `n` points, drawn from one of three shapes chosen by the
/// generator: points on a line, a quarter-step matrix with entries in `[1, 2]`,
/// or points of a half-integer grid in the plane. Values are coarse on purpose
/// so that ties between distortions are common.
pub fn random_space(rng: &mut Lcg64, n: usize) -> FiniteMetricSpace {
    match rng.below(3) {
        0 => random_line_space(rng, n),
        1 => {
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = 1.0 + 0.25 * rng.below(5) as f64;
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            FiniteMetricSpace::from_matrix(m).expect("entries in [1,2] form a metric")
        }
        _ => {
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (0.5 * rng.below(9) as f64, 0.5 * rng.below(9) as f64))
                .collect();
            let m = pts
                .iter()
                .map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
                .collect();
            FiniteMetricSpace::from_matrix(m).expect("planar points form a metric")
        }
    }
}

/// Like [`random_space`] but restricted to the line and quarter-step shapes,
/// whose distances are dyadic rationals: sums and differences of them are
/// exact in `f64`, so inequalities can be compared without tolerance.
pub fn random_dyadic_space(rng: &mut Lcg64, n: usize) -> FiniteMetricSpace {
    loop {
        let x = random_space(rng, n);
        if x.rows().flatten().all(|v| (v * 4.0).fract() == 0.0) {
            return x;
        }
    }
}

/// `n` distinct points from `{0, 0.5, …, 10}` with the induced metric.
pub fn random_line_space(rng: &mut Lcg64, n: usize) -> FiniteMetricSpace {
    assert!(n <= 21);
    let mut pts: Vec<u32> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = rng.below(21);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts.sort_unstable();
    PointSet1D::new(pts.iter().map(|&p| 0.5 * p as f64).collect())
        .expect("distinct sorted points")
        .to_space()
}

/// A random space with between 1 and `max_n` points.
pub fn random_small_space(rng: &mut Lcg64, max_n: usize) -> FiniteMetricSpace {
    let n = rng.range(1, max_n as u32) as usize;
    random_space(rng, n)
}

/// A random correspondence: each `i` gets a random partner, uncovered `j`
/// get a random partner, then extra pairs are added with probability 1/4.
pub fn random_correspondence(rng: &mut Lcg64, n_x: usize, n_y: usize) -> Correspondence {
    let mut pairs = Vec::new();
    for i in 0..n_x {
        pairs.push((i, rng.below(n_y as u32) as usize));
    }
    for j in 0..n_y {
        if !pairs.iter().any(|&(_, y)| y == j) {
            pairs.push((rng.below(n_x as u32) as usize, j));
        }
    }
    for i in 0..n_x {
        for j in 0..n_y {
            if rng.below(4) == 0 {
                pairs.push((i, j));
            }
        }
    }
    Correspondence::new(n_x, n_y, pairs).expect("covers both sides")
}

/// `x` with every off-diagonal distance multiplied by a factor in
/// `{1, 1.05, …, 1.25}`, kept only when the result is still a metric.
pub fn perturbed(rng: &mut Lcg64, x: &FiniteMetricSpace) -> FiniteMetricSpace {
    let n = x.len();
    for _ in 0..16 {
        let mut m = x.to_matrix();
        for i in 0..n {
            for j in i + 1..n {
                let f = 1.0 + 0.05 * rng.below(6) as f64;
                m[i][j] *= f;
                m[j][i] = m[i][j];
            }
        }
        if let Ok(y) = FiniteMetricSpace::validate(m, x.labels().to_vec()) {
            return y;
        }
    }
    x.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_reference_values() {
        let mut rng = Lcg64::new(0);
        // state_1 = increment
        assert_eq!(rng.next_u32(), (LCG_INCREMENT >> 33) as u32);
        let mut a = Lcg64::new(42);
        let mut b = Lcg64::new(42);
        assert!((0..100).all(|_| a.next_u32() == b.next_u32()));
    }

    #[test]
    fn generated_spaces_are_valid() {
        let mut rng = Lcg64::new(7);
        for _ in 0..200 {
            let x = random_small_space(&mut rng, 4);
            assert!((1..=4).contains(&x.len()));
            let r = random_correspondence(&mut rng, x.len(), 3);
            assert!(r.relation().is_correspondence());
            let y = perturbed(&mut rng, &x);
            assert_eq!(y.len(), x.len());
        }
    }
}
