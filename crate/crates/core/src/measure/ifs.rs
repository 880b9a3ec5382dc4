//! Self-similar measures generated by an iterated function system of the
//! form `α ↦ (α + d_i) / m`, optionally compressed into a subinterval.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target for the product truncation: the neglected tail changes a
/// coefficient by at most `mass · IFS_TAIL_TOLERANCE`.
pub const IFS_TAIL_TOLERANCE: f64 = 1e-13;

/// Branch weight below which interval-mass recursion stops.
const SUBDIVISION_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Digit {
    pub offset: u32,
    pub probability: f64,
}

/// Affine compression `α ↦ shift + scale · α` of the base support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineWindow {
    pub shift: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsMeasure {
    base: u32,
    digits: Vec<Digit>,
    mass: f64,
    window: Option<AffineWindow>,
}

impl IfsMeasure {
    pub fn new(base: u32, digits: Vec<Digit>, mass: f64, window: Option<AffineWindow>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidIfs(format!("contraction base must be at least 2, got {base}")));
        }
        // A single branch collapses to a point mass, which belongs in the atom list.
        if digits.len() < 2 {
            return Err(Error::InvalidIfs("at least two digits are required".into()));
        }
        let mut seen = vec![false; base as usize];
        for d in &digits {
            if d.offset >= base {
                return Err(Error::InvalidIfs(format!("digit {} is not below the base {base}", d.offset)));
            }
            if seen[d.offset as usize] {
                return Err(Error::InvalidIfs(format!("digit {} repeated", d.offset)));
            }
            seen[d.offset as usize] = true;
            if !(d.probability.is_finite() && d.probability > 0.0) {
                return Err(Error::InvalidIfs(format!("digit {} has non-positive probability", d.offset)));
            }
        }
        let total: f64 = digits.iter().map(|d| d.probability).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidIfs(format!("probabilities sum to {total}, not 1")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidIfs(format!("mass must be positive and finite, got {mass}")));
        }
        if let Some(w) = window {
            if !(w.scale.is_finite() && w.scale > 0.0 && w.scale <= 1.0) {
                return Err(Error::InvalidIfs(format!("window scale {} outside (0, 1]", w.scale)));
            }
            if !(w.shift.is_finite() && w.shift >= 0.0 && w.shift + w.scale <= 1.0 + 1e-15) {
                return Err(Error::InvalidIfs(format!("window [{}, {}] leaves [0, 1]", w.shift, w.shift + w.scale)));
            }
        }
        Ok(Self { base, digits, mass, window })
    }

    /// The middle-thirds Cantor–Lebesgue probability measure.
    pub fn cantor() -> Self {
        Self::new(3, vec![Digit { offset: 0, probability: 0.5 }, Digit { offset: 2, probability: 0.5 }], 1.0, None)
            .expect("cantor parameters are valid")
    }

    pub fn with_window(mut self, window: AffineWindow) -> Result<Self> {
        self.window = Some(window);
        Self::new(self.base, self.digits, self.mass, self.window)
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        self.mass = mass;
        Self::new(self.base, self.digits, self.mass, self.window)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn window(&self) -> Option<AffineWindow> {
        self.window
    }

    /// Convex hull of the unwindowed support, `[d_min, d_max] / (m - 1)`.
    pub fn base_hull(&self) -> (f64, f64) {
        let m1 = f64::from(self.base - 1);
        let lo = self.digits.iter().map(|d| d.offset).min().unwrap_or(0);
        let hi = self.digits.iter().map(|d| d.offset).max().unwrap_or(0);
        (f64::from(lo) / m1, f64::from(hi) / m1)
    }

    /// Barycentre of the unwindowed base measure, `Σ p_i d_i / (m - 1)`.
    pub fn base_barycentre(&self) -> f64 {
        let s: f64 = self.digits.iter().map(|d| d.probability * f64::from(d.offset)).sum();
        s / f64::from(self.base - 1)
    }

    /// Number of product factors needed for argument `xi` so the tail
    /// deviates from one by at most `IFS_TAIL_TOLERANCE`.
    fn depth_for(&self, xi: f64) -> u32 {
        let (_, hull_hi) = self.base_hull();
        let mut bound = 2.0 * PI * xi.abs() * hull_hi;
        let m = f64::from(self.base);
        let mut depth = 0;
        while bound > IFS_TAIL_TOLERANCE {
            bound /= m;
            depth += 1;
        }
        depth
    }

    /// Fourier–Stieltjes coefficient `∫ e^{2πikα} dμ_sc(α)` together with the
    /// certified truncation bound.
    pub fn coefficient(&self, k: i64) -> (Complex64, f64) {
        if k == 0 {
            return (Complex64::new(self.mass, 0.0), 0.0);
        }
        let (base_value, tail) = match self.window {
            None => self.base_product_integer(k),
            Some(w) => self.base_product_real(w.scale * k as f64),
        };
        let phase = match self.window {
            Some(w) => unit_phase(frac(k as f64 * w.shift)),
            None => Complex64::new(1.0, 0.0),
        };
        (base_value * phase * self.mass, tail * self.mass)
    }

    /// Infinite product over exact integer phases `k d / m^j mod 1`.
    fn base_product_integer(&self, k: i64) -> (Complex64, f64) {
        let depth = self.depth_for(k as f64);
        let m = i128::from(self.base);
        let mut modulus: i128 = 1;
        let mut exact = true;
        let mut value = Complex64::new(1.0, 0.0);
        for j in 1..=depth {
            if exact {
                match modulus.checked_mul(m) {
                    Some(next) if next < (1i128 << 100) => modulus = next,
                    _ => exact = false,
                }
            }
            let mut factor = Complex64::new(0.0, 0.0);
            for d in &self.digits {
                let kd = i128::from(k) * i128::from(d.offset);
                let f = if exact {
                    kd.rem_euclid(modulus) as f64 / modulus as f64
                } else {
                    frac(kd as f64 / f64::from(self.base).powi(j as i32))
                };
                factor += unit_phase(f) * d.probability;
            }
            value *= factor;
        }
        (value, self.tail_bound(k as f64, depth))
    }

    fn base_product_real(&self, xi: f64) -> (Complex64, f64) {
        let depth = self.depth_for(xi);
        let m = f64::from(self.base);
        let mut value = Complex64::new(1.0, 0.0);
        let mut scale = 1.0;
        for _ in 0..depth {
            scale /= m;
            let mut factor = Complex64::new(0.0, 0.0);
            for d in &self.digits {
                factor += unit_phase(frac(xi * f64::from(d.offset) * scale)) * d.probability;
            }
            value *= factor;
        }
        (value, self.tail_bound(xi, depth))
    }

    fn tail_bound(&self, xi: f64, depth: u32) -> f64 {
        let (_, hull_hi) = self.base_hull();
        2.0 * PI * xi.abs() * hull_hi / f64::from(self.base).powi(depth as i32)
    }

    /// Mass of the half-open interval `[a, b)` in angle coordinates.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = match self.window {
            Some(w) => ((a - w.shift) / w.scale, (b - w.shift) / w.scale),
            None => (a, b),
        };
        self.mass * self.base_interval_mass(lo, hi, 1.0)
    }

    // The base measure has no atoms, so interval endpoints carry no mass.
    fn base_interval_mass(&self, lo: f64, hi: f64, weight: f64) -> f64 {
        let (h0, h1) = self.base_hull();
        if hi <= h0 || lo >= h1 || hi <= lo {
            return 0.0;
        }
        if lo <= h0 && hi >= h1 {
            return weight;
        }
        if weight < SUBDIVISION_TOLERANCE {
            return 0.5 * weight;
        }
        let m = f64::from(self.base);
        self.digits
            .iter()
            .map(|d| {
                let off = f64::from(d.offset);
                self.base_interval_mass(m * lo - off, m * hi - off, weight * d.probability)
            })
            .sum()
    }
}

/// Fractional part in `[-1/2, 1/2)`.
pub(crate) fn frac(x: f64) -> f64 {
    x - x.round()
}

/// `e^{2πi t}`.
pub(crate) fn unit_phase(t: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn cantor_threefold_identity() {
        let c = IfsMeasure::cantor();
        for k in 1..200 {
            let (a, _) = c.coefficient(k);
            let (b, _) = c.coefficient(3 * k);
            assert!(close(a, b, 1e-12), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn cantor_first_coefficient_is_real_product_of_cosines() {
        // Symmetric about 1/2, so μ̂(k) = e^{iπk} Π cos(2πk/3^j).
        let (v, _) = IfsMeasure::cantor().coefficient(1);
        let prod: f64 = (1..60).map(|j| (2.0 * PI / 3f64.powi(j)).cos()).product();
        assert!(close(v, Complex64::new(-prod, 0.0), 1e-13));
    }

    #[test]
    fn conjugate_symmetry_with_window() {
        let m = IfsMeasure::cantor().with_window(AffineWindow { shift: 0.1, scale: 0.25 }).unwrap();
        for k in 1..50 {
            let (a, _) = m.coefficient(k);
            let (b, _) = m.coefficient(-k);
            assert!(close(a, b.conj(), 1e-12));
        }
    }

    #[test]
    fn first_level_interval_masses() {
        let c = IfsMeasure::cantor();
        assert!((c.interval_mass(0.0, 1.0 / 3.0) - 0.5).abs() < 1e-14);
        assert!((c.interval_mass(1.0 / 3.0, 2.0 / 3.0)).abs() < 1e-14);
        assert!((c.interval_mass(0.0, 1.0) - 1.0).abs() < 1e-14);
        assert!((c.interval_mass(0.0, 1.0 / 9.0) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn windowed_interval_mass_follows_the_window() {
        let m = IfsMeasure::cantor().with_window(AffineWindow { shift: 0.5, scale: 0.25 }).unwrap();
        assert!((m.interval_mass(0.5, 0.5 + 0.25 / 3.0) - 0.5).abs() < 1e-14);
        assert_eq!(m.interval_mass(0.0, 0.5), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let one = |o, p| Digit { offset: o, probability: p };
        assert!(IfsMeasure::new(1, vec![one(0, 0.5), one(0, 0.5)], 1.0, None).is_err());
        assert!(IfsMeasure::new(3, vec![one(0, 1.0)], 1.0, None).is_err());
        assert!(IfsMeasure::new(3, vec![one(0, 0.5), one(0, 0.5)], 1.0, None).is_err());
        assert!(IfsMeasure::new(3, vec![one(0, 0.5), one(3, 0.5)], 1.0, None).is_err());
        assert!(IfsMeasure::new(3, vec![one(0, 0.5), one(2, 0.4)], 1.0, None).is_err());
        assert!(IfsMeasure::new(3, vec![one(0, 0.5), one(2, 0.5)], 0.0, None).is_err());
        let w = Some(AffineWindow { shift: 0.9, scale: 0.5 });
        assert!(IfsMeasure::new(3, vec![one(0, 0.5), one(2, 0.5)], 1.0, w).is_err());
    }

    #[test]
    fn tail_bound_meets_tolerance() {
        let c = IfsMeasure::cantor();
        for k in [1, 17, 999, 30_000, 1_000_000] {
            let (_, err) = c.coefficient(k);
            assert!(err <= IFS_TAIL_TOLERANCE);
        }
    }
}
