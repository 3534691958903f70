//! Gauss–Legendre rules on `[-1, 1]` and triangle rules built on them.

use std::f64::consts::PI;

use crate::scalar::Real;

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`, exact for
/// polynomials of degree `2n - 1`. Nodes are ascending.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    let (x, w) = gauss_legendre_f64(n);
    (x.into_iter().map(R::lit).collect(), w.into_iter().map(R::lit).collect())
}

pub(crate) fn gauss_legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature rule on the reference triangle `{(s, t): s, t >= 0, s + t <= 1}`
/// with weights summing to the reference area `1/2`.
#[derive(Debug, Clone)]
pub struct TriangleRule<R: Real> {
    /// Barycentric-free reference coordinates `(s, t)`.
    pub points: Vec<[R; 2]>,
    pub weights: Vec<R>,
}

impl<R: Real> TriangleRule<R> {
    /// Three-point rule at the edge midpoints; exact for quadratics.
    pub fn mid_edge() -> Self {
        let h = R::lit(0.5);
        let w = R::one() / R::lit(6.0);
        Self {
            points: vec![[h, R::zero()], [h, h], [R::zero(), h]],
            weights: vec![w, w, w],
        }
    }

    /// Collapsed (Duffy) tensor Gauss rule with `n×n` points; exact for
    /// polynomials of degree `2n - 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre_f64(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (a, wa) in x.iter().zip(&w) {
            let u = 0.5 * (a + 1.0);
            for (b, wb) in x.iter().zip(&w) {
                let v = 0.5 * (b + 1.0);
                points.push([R::lit(u), R::lit((1.0 - u) * v)]);
                weights.push(R::lit(0.25 * wa * wb * (1.0 - u)));
            }
        }
        Self { points, weights }
    }
}
