//! Matrix 2-norm against a dense SVD.

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use steffensen_core::vector::{matrix_2norm, NORM_MAX_ITER, NORM_TOL};
use steffensen_core::ImageMatrix;

#[test]
fn power_iteration_matches_svd() {
    let mut rng = StdRng::seed_from_u64(42);
    for trial in 0..20 {
        let data: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = ImageMatrix::new(8, 8, data.clone()).unwrap();
        let dense = DMatrix::from_row_slice(8, 8, &data);
        let sigma_max = dense.singular_values().max();
        let got = matrix_2norm(&m, NORM_TOL, NORM_MAX_ITER).expect("converged");
        let rel = (got - sigma_max).abs() / sigma_max;
        assert!(rel <= 1e-8, "trial {trial}: {got} vs {sigma_max} ({rel:e})");
    }
}

#[test]
fn rectangular_matches_svd() {
    let mut rng = StdRng::seed_from_u64(7);
    for (r, c) in [(3, 9), (12, 5), (1, 6), (6, 1)] {
        let data: Vec<f64> = (0..r * c).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = ImageMatrix::new(r, c, data.clone()).unwrap();
        let sigma_max = DMatrix::from_row_slice(r, c, &data).singular_values().max();
        let got = matrix_2norm(&m, NORM_TOL, NORM_MAX_ITER).unwrap();
        assert!((got - sigma_max).abs() <= 1e-8 * sigma_max, "{r}x{c}");
    }
}
