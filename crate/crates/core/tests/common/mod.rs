//! Independent numerical oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_k`).
pub fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let j = j as f64;
                let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` panels of `k` nodes.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, k: usize) -> f64 {
    let rule = gauss_legendre(k);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        for &(x, w) in &rule {
            total += w * 0.5 * h * f(lo + 0.5 * h * (x + 1.0));
        }
    }
    total
}

/// Tensor-product composite rule over `[a, b]^2`.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64, a: f64, b: f64, panels: usize, k: usize) -> f64 {
    integrate(|x| integrate(|y| f(x, y), a, b, panels, k), a, b, panels, k)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
