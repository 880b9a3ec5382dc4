//! Independent reference computations shared by the integration tests.
//! None of these call into the library's numerical paths.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

/// Coefficients `k = 0..=max_k` of the self-similar measure with digits
/// `(d, p)` and contraction `1/base`, placed in `[shift, shift + scale]`.
///
/// All `digits.len()^depth` cylinder sets are enumerated; each carries its
/// mass at the barycentre of the cylinder, which makes the error second
/// order in `k · scale · base^{-depth}`.
pub fn ifs_branch_oracle(
    base: u32,
    digits: &[(u32, f64)],
    mass: f64,
    shift: f64,
    scale: f64,
    depth: u32,
    max_k: usize,
) -> Vec<Complex64> {
    let m = base as f64;
    let mut points = vec![(0.0f64, mass)];
    let mut width = 1.0;
    for _ in 0..depth {
        width /= m;
        points =
            points.iter().flat_map(|&(x, w)| digits.iter().map(move |&(d, p)| (x + d as f64 * width, w * p))).collect();
    }
    let barycentre: f64 = digits.iter().map(|&(d, p)| d as f64 * p).sum::<f64>() / (m - 1.0);
    points
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); max_k + 1];
            for &(x, w) in chunk {
                let y = shift + scale * (x + barycentre * width);
                let z = Complex64::from_polar(1.0, 2.0 * PI * y);
                let mut zk = Complex64::new(w, 0.0);
                for a in acc.iter_mut() {
                    *a += zk;
                    zk *= z;
                }
            }
            acc
        })
        .reduce(
            || vec![Complex64::new(0.0, 0.0); max_k + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Trapezoidal rule for `∫₀¹ e^{2πikα} g(α) dα` with `n` nodes; spectrally
/// accurate for smooth periodic `g`.
pub fn trapezoid_coefficient(g: impl Fn(f64) -> f64, k: i64, n: usize) -> Complex64 {
    (0..n)
        .map(|j| {
            let a = j as f64 / n as f64;
            Complex64::from_polar(g(a), 2.0 * PI * ((k as f64 * a) % 1.0))
        })
        .sum::<Complex64>()
        / n as f64
}

/// `⟨P_n x₂; y₁⟩` for `n = 1..=horizon` from `P_{n+1} = S* P_n + P S^n`,
/// carried on dense vectors.
pub fn foguel_corner_recursion(in_set: impl Fn(usize) -> bool, x2: &[f64], y1: &[f64], horizon: usize) -> Vec<f64> {
    let len = horizon + x2.len() + 2;
    let pad = |v: &[f64]| {
        let mut d = vec![0.0; len];
        d[..v.len()].copy_from_slice(v);
        d
    };
    let (x2, y1) = (pad(x2), pad(y1));
    let mut p = vec![0.0; len];
    let mut out = Vec::with_capacity(horizon);
    for n in 0..horizon {
        // p ← S* p + P S^n x₂
        let mut next = vec![0.0; len];
        next[..len - 1].copy_from_slice(&p[1..]);
        for (k, &c) in x2.iter().enumerate().take(len - n) {
            if c != 0.0 && in_set(k + n) {
                next[k + n] += c;
            }
        }
        p = next;
        out.push(p.iter().zip(&y1).map(|(a, b)| a * b).sum());
    }
    out
}

/// Finite section of `[[S*, P], [0, S]]` of size `2n`, first summand first.
pub fn foguel_dense(in_set: impl Fn(usize) -> bool, n: usize) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(2 * n, 2 * n);
    for k in 1..n {
        f[(k - 1, k)] = 1.0;
        f[(n + k, n + k - 1)] = 1.0;
    }
    for j in (0..n).filter(|&j| in_set(j)) {
        f[(j, n + j)] = 1.0;
    }
    f
}

/// `⟨F^n x; y⟩` for `n = 1..=horizon` by repeated dense products.
pub fn dense_pairings(f: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>, horizon: usize) -> Vec<f64> {
    let mut v = x.clone();
    (0..horizon)
        .map(|_| {
            v = f * &v;
            v.dot(y)
        })
        .collect()
}

/// Largest singular value of `P_N F^n P_N`, from a dense section large
/// enough that no truncation reaches the compression.
pub fn foguel_section_norm_dense(in_set: impl Fn(usize) -> bool + Copy, n_section: usize, power: usize) -> f64 {
    let m = n_section + power + 1;
    let f = foguel_dense(in_set, m);
    let mut p = DMatrix::identity(2 * m, 2 * m);
    for _ in 0..power {
        p = &f * p;
    }
    let idx: Vec<usize> = (0..n_section).chain(m..m + n_section).collect();
    let c = DMatrix::from_fn(idx.len(), idx.len(), |i, j| p[(idx[i], idx[j])]);
    c.singular_values().max()
}

pub fn powers_of(base: usize) -> impl Fn(usize) -> bool + Copy {
    move |j: usize| {
        let mut p = 1;
        while p < j {
            p *= base;
        }
        p == j
    }
}
