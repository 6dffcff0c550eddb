//! Brute-force oracles, independent of the enumerator and the solver.

#![allow(dead_code)]

use gromov_core::FiniteMetricSpace;

/// Every subset of `X × Y` (as a pair list) that projects onto both sides.
pub fn all_correspondences(n_x: usize, n_y: usize) -> Vec<Vec<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..n_x).flat_map(|i| (0..n_y).map(move |j| (i, j))).collect();
    assert!(cells.len() <= 20, "oracle only for tiny grids");
    let mut out = Vec::new();
    for mask in 1u32..(1 << cells.len()) {
        let pairs: Vec<_> = (0..cells.len()).filter(|b| mask & (1 << b) != 0).map(|b| cells[b]).collect();
        let covers_x = (0..n_x).all(|i| pairs.iter().any(|p| p.0 == i));
        let covers_y = (0..n_y).all(|j| pairs.iter().any(|p| p.1 == j));
        if covers_x && covers_y {
            out.push(pairs);
        }
    }
    out
}

/// Correspondences from which no single pair can be dropped.
pub fn minimal_correspondences(n_x: usize, n_y: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out: Vec<_> = all_correspondences(n_x, n_y)
        .into_iter()
        .filter(|pairs| {
            pairs.iter().all(|&(i, j)| {
                let deg_i = pairs.iter().filter(|p| p.0 == i).count();
                let deg_j = pairs.iter().filter(|p| p.1 == j).count();
                deg_i == 1 || deg_j == 1
            })
        })
        .collect();
    out.sort();
    out
}

pub fn distortion(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut best = 0.0f64;
    for &(i, j) in pairs {
        for &(i2, j2) in pairs {
            best = best.max((x.d(i, i2) - y.d(j, j2)).abs());
        }
    }
    best
}

/// `min dis R / 2` over all correspondences.
pub fn gh_brute_force(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    all_correspondences(x.len(), y.len())
        .iter()
        .map(|p| distortion(p, x, y))
        .fold(f64::INFINITY, f64::min)
        / 2.0
}
