#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sghelm::operator::KronOperator;
use sghelm::sparse::CsrMatrix;
use sghelm::Complex64 as C;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rand_c(rng: &mut ChaCha8Rng) -> C {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn rand_cmat(rng: &mut ChaCha8Rng, r: usize, cols: usize) -> DMatrix<C> {
    DMatrix::from_fn(r, cols, |_, _| rand_c(rng))
}

pub fn rand_cvec(rng: &mut ChaCha8Rng, n: usize) -> DVector<C> {
    DVector::from_fn(n, |_, _| rand_c(rng))
}

/// Random complex sparse matrix with a guaranteed diagonal.
pub fn rand_sparse(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CsrMatrix<C> {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, rand_c(rng)));
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                t.push((i, j, rand_c(rng)));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &t)
}

/// Random real symmetric sparse matrix.
pub fn rand_sym(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CsrMatrix<f64> {
    let mut t = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j || rng.random_bool(density) {
                let v = rng.random_range(-1.0..1.0);
                t.push((i, j, v));
                if i != j {
                    t.push((j, i, v));
                }
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &t)
}

/// `Σ_{i=0}^{n} G_i ⊗ K_i` with `G_0 = I` and random remaining factors.
pub fn random_operator(rng: &mut ChaCha8Rng, j: usize, qs: usize, n: usize) -> KronOperator<f64> {
    let mut g = vec![CsrMatrix::identity(qs)];
    let mut k = vec![rand_sparse(rng, j, 0.2)];
    for _ in 0..n {
        g.push(rand_sym(rng, qs, 0.3));
        k.push(rand_sparse(rng, j, 0.2));
    }
    KronOperator::new(g, k).unwrap()
}

/// Dense `Σ G_i ⊗ K_i` built independently of the library assembly.
pub fn dense_kron_sum(op: &KronOperator<f64>) -> DMatrix<C> {
    let mut a = DMatrix::zeros(op.size(), op.size());
    for (g, k) in op.g().iter().zip(op.k()) {
        a += g.to_dense().map(|v| c(v, 0.0)).kronecker(&k.to_dense());
    }
    a
}

/// Smallest rank whose Frobenius tail is within `eps` of the total.
pub fn tail_rule_rank(sigma: &[f64], eps: f64) -> usize {
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return 0;
    }
    (0..=sigma.len())
        .find(|&r| sigma[r..].iter().map(|s| s * s).sum::<f64>() <= eps * eps * total)
        .unwrap()
}

pub fn rel(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    let d = b.norm();
    if d == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / d
    }
}

pub fn rel_vec(a: &DVector<C>, b: &DVector<C>) -> f64 {
    let d = b.norm();
    if d == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / d
    }
}
