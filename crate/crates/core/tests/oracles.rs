mod common;

use gromov_core::correspondence::GridCap;
use gromov_core::random::{random_small_space, Lcg64};
use gromov_core::{enumerate_minimal_correspondences, from_reals, gh_exact, FiniteMetricSpace, SolverOptions};

fn enumerated(n_x: usize, n_y: usize) -> Vec<Vec<(usize, usize)>> {
    enumerate_minimal_correspondences(n_x, n_y, GridCap::default())
        .unwrap()
        .map(|c| c.pairs().to_vec())
        .collect()
}

#[test]
fn enumeration_matches_brute_force_filter() {
    for n_x in 1..=4 {
        for n_y in 1..=4 {
            if n_x * n_y > 16 {
                continue;
            }
            assert_eq!(enumerated(n_x, n_y), common::minimal_correspondences(n_x, n_y), "{n_x}x{n_y}");
        }
    }
}

#[test]
fn minimal_counts() {
    assert_eq!(enumerated(2, 1).len(), 1);
    assert_eq!(enumerated(2, 2).len(), 2);
    // frozen from the brute-force filter of all 2^6 relations
    assert_eq!(common::minimal_correspondences(3, 2).len(), 6);
    assert_eq!(enumerated(3, 2).len(), 6);
}

#[test]
fn every_correspondence_contains_a_minimal_one() {
    let minimal = enumerated(3, 3);
    for pairs in common::all_correspondences(3, 3) {
        assert!(minimal.iter().any(|m| m.iter().all(|p| pairs.contains(p))));
    }
}

#[test]
fn two_point_example_by_brute_force() {
    let a = from_reals(&[0., 1.]).unwrap();
    let b = from_reals(&[0., 3.]).unwrap();
    assert_eq!(common::gh_brute_force(&a, &b), 1.0);
    assert_eq!(gh_exact(&a, &b, &SolverOptions::default()).unwrap().value, 1.0);
}

#[test]
fn solver_matches_brute_force_up_to_four_points() {
    let mut rng = Lcg64::new(2024);
    for _ in 0..150 {
        let x = random_small_space(&mut rng, 4);
        let y = random_small_space(&mut rng, 4);
        if x.len() * y.len() > 16 {
            continue;
        }
        let cert = gh_exact(&x, &y, &SolverOptions::default()).unwrap();
        assert_eq!(cert.value, common::gh_brute_force(&x, &y), "{x:?} {y:?}");
        assert_eq!(common::distortion(cert.witness.pairs(), &x, &y) / 2.0, cert.value);
        assert!(cert.witness.is_minimal());
    }
}

#[test]
fn witness_is_lexicographically_smallest_optimum() {
    let mut rng = Lcg64::new(99);
    for _ in 0..100 {
        let x = random_small_space(&mut rng, 3);
        let y = random_small_space(&mut rng, 4);
        let cert = gh_exact(&x, &y, &SolverOptions::default()).unwrap();
        let best = common::minimal_correspondences(x.len(), y.len())
            .into_iter()
            .filter(|p| common::distortion(p, &x, &y) / 2.0 == cert.value)
            .min()
            .unwrap();
        assert_eq!(cert.witness.pairs(), best.as_slice());
    }
}

#[test]
fn degenerate_zero_spaces() {
    let z = FiniteMetricSpace::from_matrix(vec![vec![0.0; 3]; 3]).unwrap();
    let x = from_reals(&[0., 2.]).unwrap();
    let cert = gh_exact(&z, &x, &SolverOptions::default()).unwrap();
    assert_eq!(cert.value, 1.0);
    assert_eq!(cert.value, common::gh_brute_force(&z, &x));
}
