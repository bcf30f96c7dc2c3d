//! Reference computations shared by the integration tests. Nothing here calls into the library's
//! permanent or probability code.

#![allow(dead_code)]

use itertools::Itertools;
use num_complex::Complex64;

/// `Σ_σ Π_i A[i][σ(i)]` over all `n!` permutations.
pub fn naive_permanent(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    (0..n)
        .permutations(n)
        .map(|sigma| {
            sigma
                .iter()
                .enumerate()
                .map(|(i, &j)| a[i][j])
                .product::<Complex64>()
        })
        .sum()
}

/// `Σ_σ Π_i |A[i][σ(i)]|`, the natural scale for rounding error in a permanent.
pub fn permanent_scale(a: &[Vec<Complex64>]) -> f64 {
    let n = a.len();
    (0..n)
        .permutations(n)
        .map(|sigma| {
            sigma
                .iter()
                .enumerate()
                .map(|(i, &j)| a[i][j].norm())
                .product::<f64>()
        })
        .sum()
}

/// Measure of `{(x, y) ∈ (0,1)² : inside(x, y)}` as an iterated integral.
///
/// The outer integral over `x` uses composite 5-point Gauss-Legendre on `panels` equal panels.
/// For each `x` the inner integrand is a 0/1 function of `y`; it is assumed to switch at most
/// once on `[0, 1]`, and the switch point is located by bisection.
pub fn unit_square_measure(inside: impl Fn(f64, f64) -> bool, panels: usize) -> f64 {
    const NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];

    let inner = |x: f64| -> f64 {
        let (lo_in, hi_in) = (inside(x, 0.0), inside(x, 1.0));
        if lo_in == hi_in {
            return if lo_in { 1.0 } else { 0.0 };
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if inside(x, mid) == lo_in {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        if lo_in {
            t
        } else {
            1.0 - t
        }
    };

    let h = 1.0 / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = (k as f64 + 0.5) * h;
            NODES
                .iter()
                .zip(WEIGHTS)
                .map(|(&node, w)| w * inner(mid + 0.5 * h * node))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// Bias grid used throughout, with `P(λ₁ + δ > λ₂)` frozen from an independent adaptive
/// quadrature of `min(1, x + δ)` (scipy `quad`, absolute tolerance 1e-14).
pub const BIAS_GRID: [(f64, f64); 6] = [
    (0.0, 0.5),
    (0.1, 0.595),
    (0.25, 0.71875),
    (0.5, 0.875),
    (0.75, 0.96875),
    (1.0, 1.0),
];
