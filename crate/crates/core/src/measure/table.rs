use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Measure;
use crate::error::{Error, Result};

/// Immutable table of `μ̂(k)` for `|k| ≤ window`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTable {
    window: usize,
    values: Vec<Complex64>,
    error_bound: f64,
    total_mass: f64,
}

impl FourierTable {
    pub(super) fn build(measure: &Measure, window: usize, quadrature_points: usize) -> Result<Self> {
        if !quadrature_points.is_power_of_two() {
            return Err(Error::QuadratureNotPowerOfTwo(quadrature_points));
        }
        if quadrature_points < 4 * window {
            return Err(Error::ResolutionExceeded {
                k: window as i64,
                limit: (quadrature_points / 4) as i64,
                points: quadrature_points,
            });
        }
        let ks: Vec<i64> = (-(window as i64)..=window as i64).collect();

        // Each index is independent, so the parallel map is order-free.
        let mut values: Vec<Complex64> = ks
            .par_iter()
            .map(|&k| {
                measure.atoms.iter().map(|a| super::unit_phase(super::frac(k as f64 * a.position)) * a.mass).sum()
            })
            .collect();
        let mut error_bound = measure.roundoff();

        if let Some(d) = &measure.density {
            let (dens, err) = match d.exact_coefficients(window) {
                Some(v) => (v, 0.0),
                None => d.quadrature_coefficients(window, quadrature_points),
            };
            values.iter_mut().zip(dens).for_each(|(v, c)| *v += c);
            error_bound += err;
        }
        if let Some(s) = &measure.self_similar {
            let parts: Vec<(Complex64, f64)> = ks.par_iter().map(|&k| s.coefficient(k)).collect();
            let mut worst: f64 = 0.0;
            for (v, (c, e)) in values.iter_mut().zip(parts) {
                *v += c;
                worst = worst.max(e);
            }
            error_bound += worst;
        }
        Ok(Self { window, values, error_bound, total_mass: measure.total_mass() })
    }

    /// Builds a table from raw values, ordered `k = -window..=window`.
    pub fn from_values(values: Vec<Complex64>, error_bound: f64, total_mass: f64) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument("a symmetric table needs an odd number of entries".into()));
        }
        Ok(Self { window: values.len() / 2, values, error_bound, total_mass })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        let idx = k + self.window as i64;
        if idx < 0 {
            return None;
        }
        self.values.get(idx as usize).copied()
    }

    /// Like [`get`](Self::get) but reports the window needed.
    pub fn value(&self, k: i64) -> Result<Complex64> {
        self.get(k).ok_or(Error::WindowExceeded { requested: k.abs(), window: self.window })
    }

    /// `(k, μ̂(k))` for `k = -window..=window`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let w = self.window as i64;
        self.values.iter().enumerate().map(move |(i, v)| (i as i64 - w, *v))
    }

    /// `|μ̂(n)|` for `n = 1..=window`.
    pub fn positive_moduli(&self) -> Vec<f64> {
        self.values[self.window + 1..].iter().map(|v| v.norm()).collect()
    }

    /// Restricts the table to a smaller window.
    pub fn truncated(&self, window: usize) -> Result<Self> {
        if window > self.window {
            return Err(Error::WindowExceeded { requested: window as i64, window: self.window });
        }
        let lo = self.window - window;
        Ok(Self {
            window,
            values: self.values[lo..=lo + 2 * window].to_vec(),
            error_bound: self.error_bound,
            total_mass: self.total_mass,
        })
    }

    /// Checks conjugate symmetry, `μ̂(0) = μ(T)` and `|μ̂(k)| ≤ μ(T)`, each
    /// within the stored error bound.
    pub fn check_invariants(&self) -> Result<()> {
        let tol = self.error_bound;
        for k in 1..=self.window as i64 {
            let (p, n) =
                (self.values[(self.window as i64 + k) as usize], self.values[(self.window as i64 - k) as usize]);
            if (n - p.conj()).norm() > 2.0 * tol {
                return Err(Error::InvariantBreach(format!("conjugate symmetry fails at k = {k}")));
            }
        }
        let zero = self.values[self.window];
        if (zero - self.total_mass).norm() > tol {
            return Err(Error::InvariantBreach(format!("μ̂(0) = {zero} differs from the mass {}", self.total_mass)));
        }
        if let Some((k, v)) = self.iter().find(|(_, v)| v.norm() > self.total_mass + tol) {
            return Err(Error::InvariantBreach(format!("|μ̂({k})| = {} exceeds the mass", v.norm())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, Density, DensityShape, Measure};

    #[test]
    fn lebesgue_table() {
        let t = Measure::lebesgue().fourier_table(8, 32).unwrap();
        for (k, v) in t.iter() {
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-12);
        }
        t.check_invariants().unwrap();
    }

    #[test]
    fn cantor_table_threefold() {
        let t = Measure::cantor().fourier_table(9, 64).unwrap();
        let (a, b, c) = (t.get(1).unwrap(), t.get(3).unwrap(), t.get(9).unwrap());
        assert!((a - b).norm() < 1e-10 && (b - c).norm() < 1e-10);
        t.check_invariants().unwrap();
    }

    #[test]
    fn dirac_pair_table_alternates() {
        let m = Measure::atomic(vec![Atom::new(0.0, 1.0), Atom::new(0.5, 1.0)]).unwrap();
        let t = m.fourier_table(4, 16).unwrap();
        for (k, want) in [2.0, 0.0, 2.0, 0.0, 2.0].iter().enumerate() {
            assert!((t.get(k as i64).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn resolution_rules() {
        let m = Measure::lebesgue();
        assert!(matches!(m.fourier_table(8, 31), Err(Error::QuadratureNotPowerOfTwo(31))));
        assert!(matches!(m.fourier_table(8, 16), Err(Error::ResolutionExceeded { .. })));
        let t = m.fourier_table(8, 32).unwrap();
        assert!(matches!(t.value(9), Err(Error::WindowExceeded { requested: 9, window: 8 })));
    }

    #[test]
    fn quadrature_table_matches_single_coefficients() {
        let m = Measure::from_density(Density::new(DensityShape::VonMises { kappa: 3.0 }, 2.0).unwrap());
        let t = m.fourier_table(64, 4096).unwrap();
        assert!(t.error_bound() < 1e-12);
        for k in [-64, -3, 0, 1, 17, 64] {
            assert!((t.get(k).unwrap() - m.fourier_coefficient(k).unwrap()).norm() < 1e-13);
        }
        t.check_invariants().unwrap();
    }

    #[test]
    fn truncation_keeps_centre() {
        let t = Measure::cantor().fourier_table(20, 128).unwrap();
        let s = t.truncated(5).unwrap();
        assert_eq!(s.window(), 5);
        assert_eq!(s.get(-5), t.get(-5));
        assert_eq!(s.get(5), t.get(5));
    }
}
