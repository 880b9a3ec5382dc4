//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each exported function wraps a plain Rust function of the same name
//! with a `_impl` suffix so that the numerics can be tested natively.

use wasm_bindgen::prelude::*;

use rajchman::measure::{AffineWindow, Digit};
use rajchman::operators::{foguel_quasistability_scan, SparseSet, SparseVector};
use rajchman::{IfsMeasure, Measure};

fn ifs_measure(base: u32, digits: &[u32], probabilities: &[f64], scale: f64) -> Result<Measure, String> {
    if digits.len() != probabilities.len() {
        return Err("digits and probabilities differ in length".into());
    }
    let digits =
        digits.iter().zip(probabilities).map(|(&offset, &probability)| Digit { offset, probability }).collect();
    let ifs =
        IfsMeasure::new(base, digits, 1.0, Some(AffineWindow { shift: 0.0, scale })).map_err(|e| e.to_string())?;
    Ok(Measure::from_ifs(ifs))
}

fn quadrature(window: usize) -> usize {
    (4 * window).next_power_of_two().max(64)
}

pub fn coefficient_moduli_impl(
    base: u32,
    digits: &[u32],
    probabilities: &[f64],
    scale: f64,
    window: usize,
) -> Result<Vec<f64>, String> {
    let m = ifs_measure(base, digits, probabilities, scale)?;
    let t = m.fourier_table(window, quadrature(window)).map_err(|e| e.to_string())?;
    Ok(t.positive_moduli())
}

pub fn wiener_means_impl(
    base: u32,
    digits: &[u32],
    probabilities: &[f64],
    scale: f64,
    window: usize,
) -> Result<Vec<f64>, String> {
    let m = ifs_measure(base, digits, probabilities, scale)?;
    let t = m.fourier_table(window, quadrature(window)).map_err(|e| e.to_string())?;
    // Running sums keep this linear in the window.
    let mut out = Vec::with_capacity(window);
    let mut sum = t.total_mass();
    for n in 1..=window as i64 {
        sum += t.get(n).unwrap().norm() + t.get(-n).unwrap().norm();
        out.push(sum / (2 * n + 1) as f64);
    }
    Ok(out)
}

pub fn foguel_values_impl(base: u64, x2: &str, y1: &str, horizon: u64) -> Result<Vec<f64>, String> {
    let set = SparseSet::powers(base).map_err(|e| e.to_string())?;
    let x2: SparseVector = x2.parse().map_err(|e: rajchman::Error| e.to_string())?;
    let y1: SparseVector = y1.parse().map_err(|e: rajchman::Error| e.to_string())?;
    let scan = foguel_quasistability_scan(&set, &x2, &y1, horizon, 0.5).map_err(|e| e.to_string())?;
    Ok(scan.values.iter().map(|(_, v)| v.norm()).collect())
}

/// `|μ̂(n)|` for `n = 1..=window` of a compressed self-similar measure.
#[wasm_bindgen]
pub fn coefficient_moduli(
    base: u32,
    digits: &[u32],
    probabilities: &[f64],
    scale: f64,
    window: usize,
) -> Result<Vec<f64>, JsError> {
    coefficient_moduli_impl(base, digits, probabilities, scale, window).map_err(|e| JsError::new(&e))
}

/// Wiener means `(2n+1)^{-1} Σ_{|ℓ|≤n} |μ̂(ℓ)|` for `n = 1..=window`.
#[wasm_bindgen]
pub fn wiener_means(
    base: u32,
    digits: &[u32],
    probabilities: &[f64],
    scale: f64,
    window: usize,
) -> Result<Vec<f64>, JsError> {
    wiener_means_impl(base, digits, probabilities, scale, window).map_err(|e| JsError::new(&e))
}

/// `|⟨P_n x₂; y₁⟩|` for `n = 1..=horizon`, sparse set `{base^k}`.
#[wasm_bindgen]
pub fn foguel_values(base: u64, x2: &str, y1: &str, horizon: u64) -> Result<Vec<f64>, JsError> {
    foguel_values_impl(base, x2, y1, horizon).map_err(|e| JsError::new(&e))
}
