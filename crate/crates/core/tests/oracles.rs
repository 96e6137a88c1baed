mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailtrace_core::rearrange::{singular_values, MatrixOperator};

#[test]
fn rearrange_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let f = oracle::random_step(&mut rng, 12);
        let mu = f.rearrange();
        assert_eq!(mu, oracle::brute_force_rearrange(&f), "{f:?}");
        let end = f.breakpoints().last().copied().unwrap().max(1.0);
        for _ in 0..50 {
            let t = rng.gen_range(0.0..end * 1.25);
            if mu.breakpoints().contains(&t) {
                continue;
            }
            assert_eq!(mu.eval(t), oracle::right_continuous_inverse(&f, t), "{f:?} at {t}");
        }
    }
}

#[test]
fn svd_matches_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let m = oracle::random_complex_matrix(&mut rng, n);
        let got = singular_values(&m, 1e-15).unwrap();
        let want = oracle::singular_values_by_charpoly(&m);
        assert_eq!(got.values().len(), want.len());
        for (a, b) in got.values().iter().zip(&want) {
            assert!((a - b).abs() <= 1e-9, "{:?} vs {:?}", got.values(), want);
        }
    }
}

#[test]
fn svd_of_rational_examples() {
    let m = MatrixOperator::from_real(3, &[2.0, 0.0, 1.0, 0.0, 3.0, 0.0, 1.0, 0.0, 2.0]).unwrap();
    let got = singular_values(&m, 1e-15).unwrap();
    // symmetric with eigenvalues 3, 3, 1: double root, checked directly
    for (a, b) in got.values().iter().zip([3.0, 3.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let m = MatrixOperator::from_real(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let want = oracle::singular_values_by_charpoly(&m);
    let got = singular_values(&m, 1e-15).unwrap();
    for (a, b) in got.values().iter().zip(&want) {
        assert!((a - b).abs() <= 1e-9);
    }
}
