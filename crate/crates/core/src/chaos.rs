//! Orthonormal Legendre chaos for `ξ ~ U[-√3, √3]^N` and the stochastic
//! Galerkin matrices `G_0, …, G_N`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Total-degree multi-index set, graded by degree. Within one degree the
/// indices are in descending lexicographic order, so the first-degree block
/// is `e_1, e_2, …, e_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    dim: usize,
    degree: usize,
    indices: Vec<Vec<u32>>,
}

impl MultiIndexSet {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "number of random variables must be at least 1".into(),
            ));
        }
        let mut indices = Vec::new();
        for total in 0..=degree {
            let mut current = vec![0u32; dim];
            compositions(total as u32, 0, &mut current, &mut indices);
        }
        Ok(Self {
            dim,
            degree,
            indices,
        })
    }

    /// Number of random variables `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximal total degree `Q`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Basis count, `binomial(N + Q, N)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    pub fn get(&self, j: usize) -> &[u32] {
        &self.indices[j]
    }

    fn lookup(&self) -> HashMap<&[u32], usize> {
        self.indices
            .iter()
            .enumerate()
            .map(|(k, idx)| (idx.as_slice(), k))
            .collect()
    }
}

// Emits all compositions of `remaining` into `current[pos..]`, largest leading
// entry first.
fn compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let last = current.len() - 1;
    if pos == last {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        compositions(remaining - v, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// `binomial(n + k, k)` without overflow for the sizes used here.
pub fn basis_count(dim: usize, degree: usize) -> usize {
    let mut c: u128 = 1;
    for i in 1..=degree as u128 {
        c = c * (dim as u128 + i) / i;
    }
    c as usize
}

/// Degree-`n` Legendre polynomial on `[-√3, √3]` scaled to unit second
/// moment under the uniform density: `√(2n+1)·P_n(ξ/√3)`.
pub fn normalized_legendre<R: Real>(n: u32, xi: R) -> R {
    let x = xi / R::lit(3.0).sqrt();
    let mut p0 = R::one();
    let mut p1 = x;
    let p = match n {
        0 => p0,
        1 => p1,
        _ => {
            for k in 2..=n {
                let kf = R::from_count(k as usize);
                let p2 = ((R::lit(2.0) * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    };
    p * R::from_count(2 * n as usize + 1).sqrt()
}

/// `ψ_idx(ξ) = Π_i L̂_{idx_i}(ξ_i)`.
pub fn eval_basis<R: Real>(idx: &[u32], xi: &[R]) -> R {
    assert_eq!(idx.len(), xi.len(), "multi-index and point dimension differ");
    idx.iter()
        .zip(xi)
        .fold(R::one(), |acc, (&n, &x)| acc * normalized_legendre(n, x))
}

/// `E[ξ L̂_n L̂_{n+1}] = √3 (n+1) / √((2n+1)(2n+3))`.
pub fn recurrence_coefficient<R: Real>(n: u32) -> R {
    let n = n as usize;
    let num = R::lit(3.0).sqrt() * R::from_count(n + 1);
    num / (R::from_count(2 * n + 1) * R::from_count(2 * n + 3)).sqrt()
}

/// `G_0 = I` and `G_i(j, k) = E[ξ_i ψ_j ψ_k]` for `i = 1..N`.
#[derive(Debug, Clone)]
pub struct StochasticMatrices<R: Real> {
    pub g: Vec<CsrMatrix<R>>,
}

impl<R: Real> StochasticMatrices<R> {
    pub fn assemble(mis: &MultiIndexSet) -> Self {
        let n = mis.len();
        let lookup = mis.lookup();
        let mut g = Vec::with_capacity(mis.dim() + 1);
        g.push(CsrMatrix::identity(n));
        for i in 0..mis.dim() {
            let mut triplets = Vec::new();
            for (j, idx) in mis.indices().iter().enumerate() {
                let mut up = idx.clone();
                up[i] += 1;
                if let Some(&k) = lookup.get(up.as_slice()) {
                    let c = recurrence_coefficient::<R>(idx[i]);
                    triplets.push((j, k, c));
                    triplets.push((k, j, c));
                }
            }
            g.push(CsrMatrix::from_triplets(n, n, &triplets));
        }
        Self { g }
    }

    /// Number of terms, `N + 1`.
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn basis_count(&self) -> usize {
        self.g[0].nrows()
    }
}

/// Brute-force `E[ξ_i ψ_j ψ_k]` by Gauss–Legendre quadrature in every
/// coordinate (`i = 0` gives `E[ψ_j ψ_k]`). The integrand is a product over
/// coordinates, so the tensor rule is evaluated as a product of 1D rules.
pub fn triple_product_oracle<R: Real>(i: usize, j: &[u32], k: &[u32], quad_order: usize) -> R {
    assert_eq!(j.len(), k.len());
    let (nodes, weights) = gauss_legendre::<R>(quad_order);
    let s3 = R::lit(3.0).sqrt();
    let half = R::lit(0.5);
    let mut total = R::one();
    for m in 0..j.len() {
        let mut acc = R::zero();
        for (x, w) in nodes.iter().zip(&weights) {
            let xi = *x * s3;
            let mut f = normalized_legendre(j[m], xi) * normalized_legendre(k[m], xi);
            if m + 1 == i {
                f *= xi;
            }
            // uniform density on [-√3, √3] maps to weight 1/2 on [-1, 1]
            acc += *w * half * f;
        }
        total *= acc;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_sizes_match_binomial() {
        assert_eq!(MultiIndexSet::new(6, 4).unwrap().len(), 210);
        assert_eq!(MultiIndexSet::new(7, 5).unwrap().len(), 792);
        assert_eq!(MultiIndexSet::new(5, 3).unwrap().len(), 56);
        let one = MultiIndexSet::new(1, 0).unwrap();
        assert_eq!(one.indices(), &[vec![0u32]]);
        for n in 1..6 {
            for q in 0..6 {
                assert_eq!(MultiIndexSet::new(n, q).unwrap().len(), basis_count(n, q));
            }
        }
        assert!(MultiIndexSet::new(0, 2).is_err());
    }

    #[test]
    fn ordering_is_graded() {
        let m = MultiIndexSet::new(3, 3).unwrap();
        assert!(m.get(0).iter().all(|&v| v == 0));
        let degrees: Vec<u32> = m.indices().iter().map(|i| i.iter().sum()).collect();
        assert!(degrees.windows(2).all(|d| d[0] <= d[1]));
        assert_eq!(m.get(1), &[1, 0, 0]);
        assert_eq!(m.get(2), &[0, 1, 0]);
        assert_eq!(m.get(3), &[0, 0, 1]);
        let mut uniq = m.indices().to_vec();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), m.len());
    }

    #[test]
    fn low_degree_basis_values() {
        assert_eq!(eval_basis(&[0, 0], &[0.3f64, -1.2]), 1.0);
        assert!((eval_basis(&[1], &[0.7f64]) - 0.7).abs() < 1e-15);
        // E[ξ²] = 1 under U[-√3, √3]
        let q: f64 = triple_product_oracle(1, &[0], &[1], 4);
        assert!((q - 1.0).abs() < 1e-14);
        // L̂_2(0) = √5·P_2(0) = -√5/2, and its quadrature-measured norm is one
        assert!((normalized_legendre(2, 0.0f64) + 5f64.sqrt() / 2.0).abs() < 1e-15);
        let n2: f64 = triple_product_oracle(0, &[2], &[2], 4);
        assert!((n2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_gram() {
        for n in 1..=3 {
            for q in 0..=4 {
                let m = MultiIndexSet::new(n, q).unwrap();
                for a in 0..m.len() {
                    for b in 0..m.len() {
                        let v: f64 = triple_product_oracle(0, m.get(a), m.get(b), q + 2);
                        let e = if a == b { 1.0 } else { 0.0 };
                        assert!((v - e).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn g_small_cases() {
        let m = MultiIndexSet::new(1, 1).unwrap();
        let g = StochasticMatrices::<f64>::assemble(&m);
        assert_eq!(g.g[0].to_dense(), nalgebra::DMatrix::identity(2, 2));
        let g1 = g.g[1].to_dense();
        assert!((g1[(0, 1)] - 1.0).abs() < 1e-15 && (g1[(1, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(g1[(0, 0)], 0.0);
        assert_eq!(g1[(1, 1)], 0.0);
    }

    #[test]
    fn oracle_trivial_zeros_and_recurrence() {
        let z: f64 = triple_product_oracle(2, &[0, 0, 0], &[0, 0, 0], 3);
        assert!(z.abs() < 1e-15);
        let odd: f64 = triple_product_oracle(1, &[1], &[1], 3);
        assert!(odd.abs() < 1e-15);
        let q: f64 = triple_product_oracle(1, &[1], &[2], 4);
        assert!((q - recurrence_coefficient::<f64>(1)).abs() < 1e-14);
    }

    #[test]
    fn tensor_grid_agrees_with_factorized_oracle() {
        // literal N-dimensional tensor rule for a 2D case
        let (x, w) = gauss_legendre::<f64>(4);
        let s3 = 3f64.sqrt();
        let j = [1u32, 2];
        let k = [2u32, 2];
        let mut full = 0.0;
        for (a, wa) in x.iter().zip(&w) {
            for (b, wb) in x.iter().zip(&w) {
                let p = [a * s3, b * s3];
                full += wa * wb * 0.25 * p[0] * eval_basis(&j, &p) * eval_basis(&k, &p);
            }
        }
        let fact: f64 = triple_product_oracle(1, &j, &k, 4);
        assert!((full - fact).abs() < 1e-14);
    }
}
