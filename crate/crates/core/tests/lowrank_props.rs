mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use sghelm::LowRank;

/// Random factor whose columns decay at a random rate.
fn decaying(seed: u64, rows: usize, cols: usize, rank: usize, decay: f64) -> LowRank {
    let mut r = rng(seed);
    let mut u = rand_cmat(&mut r, rows, rank);
    for (k, mut col) in u.column_iter_mut().enumerate() {
        col *= c(10f64.powf(-decay * k as f64), 0.0);
    }
    LowRank::from_factors(u, rand_cmat(&mut r, cols, rank)).unwrap()
}

fn params() -> impl Strategy<Value = (u64, usize, usize, usize, f64)> {
    (any::<u64>(), 1usize..40, 1usize..30, 0usize..9, 0.0f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn truncation_error_and_rank((seed, rows, cols, rank, decay) in params(), log_eps in -10.0f64..-0.3) {
        let x = decaying(seed, rows, cols, rank, decay);
        let eps = 10f64.powf(log_eps);
        let t = x.truncate(eps);
        let xd = x.to_dense();
        let err = (xd.clone() - t.to_dense()).norm();
        prop_assert!(err <= eps * xd.norm() + 1e-13 * xd.norm());
        let sigma: Vec<f64> = xd.singular_values().iter().copied().collect();
        prop_assert_eq!(t.rank(), tail_rule_rank(&sigma, eps));
    }

    #[test]
    fn inner_is_sesquilinear(seed in any::<u64>(), rows in 1usize..12, cols in 1usize..12) {
        let mut r = rng(seed);
        let x = decaying(r.random(), rows, cols, 2, 0.0);
        let y = decaying(r.random(), rows, cols, 3, 0.0);
        let z = decaying(r.random(), rows, cols, 1, 0.0);
        let (a, b) = (rand_c(&mut r), rand_c(&mut r));
        let ax_by = x.scale(a).add(&y.scale(b)).unwrap();
        let lhs = ax_by.inner(&z).unwrap();
        let rhs = a * x.inner(&z).unwrap() + b * y.inner(&z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let lhs2 = z.inner(&ax_by).unwrap();
        let rhs2 = a.conj() * z.inner(&x).unwrap() + b.conj() * z.inner(&y).unwrap();
        prop_assert!((lhs2 - rhs2).norm() <= 1e-12 * (1.0 + lhs2.norm()));
        let dense: C = z.to_dense().iter().zip(x.to_dense().iter()).map(|(zi, xi)| zi.conj() * xi).sum();
        prop_assert!((x.inner(&z).unwrap() - dense).norm() <= 1e-12 * (1.0 + dense.norm()));
    }

    #[test]
    fn exact_truncation_is_idempotent(seed in any::<u64>(), rows in 1usize..20, cols in 1usize..20) {
        let mut r = rng(seed);
        let x = decaying(r.random(), rows, cols, 3, 0.5);
        let y = decaying(r.random(), rows, cols, 2, 0.0);
        let once = x.add(&y).unwrap().truncate(0.0);
        let twice = once.truncate(0.0);
        prop_assert_eq!(once.rank(), twice.rank());
        prop_assert!(rel(&twice.to_dense(), &once.to_dense()) <= 1e-12);
    }
}

type C = sghelm::Complex64;

#[test]
fn full_rank_dense_round_trip() {
    let mut r = rng(3);
    let m: DMatrix<C> = rand_cmat(&mut r, 7, 5);
    let x = LowRank::from_dense(&m, 0.0);
    assert_eq!(x.rank(), 5);
    assert!(rel(&x.to_dense(), &m) < 1e-13);
}
