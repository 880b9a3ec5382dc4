//! Finite positive Borel measures on the unit circle, stored through their
//! canonical decomposition `μ = μ_a + μ_sc + μ_sd`.
//!
//! Angles are dimensionless: the point `z = e^{2πiα}` is addressed by
//! `α ∈ [0, 1)`, and `μ̂(k) = ∫ z^k dμ = ∫ e^{2πikα} dη(α)`.

mod density;
mod ifs;
mod table;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{Density, DensityShape};
pub use ifs::{AffineWindow, Digit, IfsMeasure, IFS_TAIL_TOLERANCE};
pub use table::FourierTable;

pub(crate) use ifs::{frac, unit_phase};

use crate::error::{Error, Result};

/// Atoms lighter than this are indistinguishable from quadrature noise.
pub const MIN_ATOM_MASS: f64 = 1e-15;

/// Quadrature resolution used by [`Measure::fourier_coefficient`].
pub const DEFAULT_QUADRATURE_POINTS: usize = 4096;

/// Comparison tolerance for atom and self-similar coefficients.
pub const EXACT_TOLERANCE: f64 = 1e-10;

/// Comparison tolerance for coefficients that went through quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(position: f64, mass: f64) -> Self {
        Self { position, mass }
    }
}

/// Half-open angle interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    atoms: Vec<Atom>,
    density: Option<Density>,
    self_similar: Option<IfsMeasure>,
}

impl Measure {
    pub fn new(mut atoms: Vec<Atom>, density: Option<Density>, self_similar: Option<IfsMeasure>) -> Result<Self> {
        for a in &atoms {
            if !a.position.is_finite() || !(0.0..1.0).contains(&a.position) {
                return Err(Error::InvalidMeasure(format!("atom position {} outside [0, 1)", a.position)));
            }
            if !a.mass.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom mass {} is not finite", a.mass)));
            }
            if a.mass < MIN_ATOM_MASS {
                return Err(Error::InvalidMeasure(format!(
                    "atom mass {} at {} is below {MIN_ATOM_MASS}",
                    a.mass, a.position
                )));
            }
        }
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        if let Some(w) = atoms.windows(2).find(|w| w[0].position == w[1].position) {
            return Err(Error::InvalidMeasure(format!("duplicate atom position {}", w[0].position)));
        }
        let m = Self { atoms, density, self_similar };
        let total = m.total_mass();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidMeasure(format!("total mass must be positive and finite, got {total}")));
        }
        Ok(m)
    }

    /// Normalised Lebesgue measure.
    pub fn lebesgue() -> Self {
        Self::from_density(Density::new(DensityShape::Constant, 1.0).expect("valid"))
    }

    pub fn from_density(density: Density) -> Self {
        Self::new(Vec::new(), Some(density), None).expect("densities carry positive mass")
    }

    /// Point mass at `z = e^{2πiα}`.
    pub fn dirac(position: f64, mass: f64) -> Result<Self> {
        Self::new(vec![Atom::new(position, mass)], None, None)
    }

    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms, None, None)
    }

    pub fn from_ifs(ifs: IfsMeasure) -> Self {
        Self::new(Vec::new(), None, Some(ifs)).expect("IFS measures carry positive mass")
    }

    /// Cantor–Lebesgue probability measure transported to the circle.
    pub fn cantor() -> Self {
        Self::from_ifs(IfsMeasure::cantor())
    }

    /// Cantor–Lebesgue measure compressed into `[0, scale]`.
    pub fn cantor_compressed(scale: f64) -> Result<Self> {
        Ok(Self::from_ifs(IfsMeasure::cantor().with_window(AffineWindow { shift: 0.0, scale })?))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn self_similar(&self) -> Option<&IfsMeasure> {
        self.self_similar.as_ref()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>()
            + self.density.as_ref().map_or(0.0, Density::mass)
            + self.self_similar.as_ref().map_or(0.0, IfsMeasure::mass)
    }

    /// A measure is continuous exactly when its discrete part is empty.
    pub fn is_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The three parts as separate measures (absent parts are skipped).
    pub fn parts(&self) -> Vec<Measure> {
        let mut out = Vec::new();
        if !self.atoms.is_empty() {
            out.push(Self { atoms: self.atoms.clone(), density: None, self_similar: None });
        }
        if let Some(d) = &self.density {
            out.push(Self { atoms: Vec::new(), density: Some(d.clone()), self_similar: None });
        }
        if let Some(s) = &self.self_similar {
            out.push(Self { atoms: Vec::new(), density: None, self_similar: Some(s.clone()) });
        }
        out
    }

    /// Adds two measures part by part. Atoms at the same position merge;
    /// densities or self-similar parts present on both sides are rejected.
    pub fn sum(&self, other: &Measure) -> Result<Measure> {
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            match atoms.iter_mut().find(|b| b.position == a.position) {
                Some(b) => b.mass += a.mass,
                None => atoms.push(*a),
            }
        }
        let density = match (&self.density, &other.density) {
            (Some(_), Some(_)) => return Err(Error::InvalidMeasure("cannot add two density parts".into())),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let self_similar = match (&self.self_similar, &other.self_similar) {
            (Some(_), Some(_)) => return Err(Error::InvalidMeasure("cannot add two self-similar parts".into())),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Measure::new(atoms, density, self_similar)
    }

    /// Multiplies every part by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Measure> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor {factor} must be positive")));
        }
        let atoms = self.atoms.iter().map(|a| Atom::new(a.position, a.mass * factor)).collect();
        let density = match &self.density {
            Some(d) => Some(match d.shape() {
                DensityShape::Samples(v) => Density::samples(v.iter().map(|x| x * factor).collect())?,
                shape => Density::new(shape.clone(), d.mass() * factor)?,
            }),
            None => None,
        };
        let self_similar = match &self.self_similar {
            Some(s) => Some(s.clone().with_mass(s.mass() * factor)?),
            None => None,
        };
        Measure::new(atoms, density, self_similar)
    }

    /// `μ̂(k)` with the default quadrature resolution.
    pub fn fourier_coefficient(&self, k: i64) -> Result<Complex64> {
        self.fourier_coefficient_with(k, DEFAULT_QUADRATURE_POINTS).map(|(v, _)| v)
    }

    /// `μ̂(k)` and its error bound using `points` trapezoidal nodes for a
    /// density without closed-form coefficients. Such densities are only
    /// trusted for `|k| ≤ points / 4`.
    pub fn fourier_coefficient_with(&self, k: i64, points: usize) -> Result<(Complex64, f64)> {
        let mut value = self.atom_coefficient(k);
        let mut err = 0.0;
        if let Some(d) = &self.density {
            match d.exact_coefficient(k) {
                Some(c) => value += c,
                None => {
                    let limit = (points / 4) as i64;
                    if k.abs() > limit {
                        return Err(Error::ResolutionExceeded { k, limit, points });
                    }
                    // Single-coefficient path; reuse the table's aliasing bound.
                    let (_, bound) = d.quadrature_coefficients(0, points);
                    value += d.quadrature_coefficient(k, points);
                    err += bound;
                }
            }
        }
        if let Some(s) = &self.self_similar {
            let (v, e) = s.coefficient(k);
            value += v;
            err += e;
        }
        Ok((value, err + self.roundoff()))
    }

    fn atom_coefficient(&self, k: i64) -> Complex64 {
        self.atoms.iter().map(|a| unit_phase(frac(k as f64 * a.position)) * a.mass).sum()
    }

    fn roundoff(&self) -> f64 {
        8.0 * f64::EPSILON * self.total_mass()
    }

    /// Coefficients `μ̂(k)` for `|k| ≤ window`.
    ///
    /// `quadrature_points` must be a power of two and at least `4 · window`,
    /// so a density without closed form is resolved by one FFT.
    pub fn fourier_table(&self, window: usize, quadrature_points: usize) -> Result<FourierTable> {
        FourierTable::build(self, window, quadrature_points)
    }

    /// `η(A) = μ(γ(A))` for a finite union of disjoint half-open intervals.
    pub fn induced_angle_measure(&self, set: &[Interval]) -> Result<f64> {
        let mut sorted = set.to_vec();
        for iv in &sorted {
            if !(iv.start.is_finite() && iv.end.is_finite() && 0.0 <= iv.start && iv.start <= iv.end && iv.end <= 1.0) {
                return Err(Error::InvalidIntervals(format!("[{}, {}) is not inside [0, 1)", iv.start, iv.end)));
            }
        }
        sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
        if let Some(w) = sorted.windows(2).find(|w| w[1].start < w[0].end) {
            return Err(Error::InvalidIntervals(format!(
                "[{}, {}) overlaps [{}, {})",
                w[0].start, w[0].end, w[1].start, w[1].end
            )));
        }
        Ok(sorted
            .iter()
            .map(|iv| {
                let atoms: f64 =
                    self.atoms.iter().filter(|a| iv.start <= a.position && a.position < iv.end).map(|a| a.mass).sum();
                let dens = self.density.as_ref().map_or(0.0, |d| d.integral(iv.start, iv.end));
                let ifs = self.self_similar.as_ref().map_or(0.0, |s| s.interval_mass(iv.start, iv.end));
                atoms + dens + ifs
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_at_one_has_unit_coefficients() {
        let d = Measure::dirac(0.0, 1.0).unwrap();
        assert_eq!(d.fourier_coefficient(7).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn lebesgue_coefficients() {
        let l = Measure::lebesgue();
        assert_eq!(l.fourier_coefficient(0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(l.fourier_coefficient(5).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn two_point_measure_alternates() {
        let m = Measure::atomic(vec![Atom::new(0.0, 1.0), Atom::new(0.5, 1.0)]).unwrap();
        assert!(m.fourier_coefficient(3).unwrap().norm() < 1e-15);
        assert!((m.fourier_coefficient(4).unwrap() - 2.0).norm() < 1e-15);
    }

    #[test]
    fn construction_rejects_degenerate_inputs() {
        assert!(Measure::dirac(1.0, 1.0).is_err());
        assert!(Measure::dirac(-0.1, 1.0).is_err());
        assert!(Measure::dirac(0.2, 1e-16).is_err());
        assert!(Measure::dirac(0.2, f64::INFINITY).is_err());
        assert!(Measure::atomic(vec![]).is_err());
        assert!(Measure::atomic(vec![Atom::new(0.3, 1.0), Atom::new(0.3, 2.0)]).is_err());
    }

    #[test]
    fn quadrature_window_is_enforced() {
        let m = Measure::from_density(Density::new(DensityShape::VonMises { kappa: 1.0 }, 1.0).unwrap());
        assert!(m.fourier_coefficient(1024).is_ok());
        assert!(matches!(m.fourier_coefficient(1025), Err(Error::ResolutionExceeded { .. })));
        // Closed forms have no window.
        assert!(Measure::lebesgue().fourier_coefficient(1 << 40).is_ok());
    }

    #[test]
    fn induced_measure_examples() {
        let quarter = [Interval::new(0.0, 0.25)];
        assert!((Measure::lebesgue().induced_angle_measure(&quarter).unwrap() - 0.25).abs() < 1e-15);
        let d = Measure::dirac(0.0, 1.0).unwrap();
        assert_eq!(d.induced_angle_measure(&[Interval::new(0.5, 0.75)]).unwrap(), 0.0);
        assert_eq!(d.induced_angle_measure(&quarter).unwrap(), 1.0);
        let third = [Interval::new(0.0, 1.0 / 3.0)];
        assert!((Measure::cantor().induced_angle_measure(&third).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn overlapping_intervals_rejected() {
        let set = [Interval::new(0.0, 0.5), Interval::new(0.4, 0.6)];
        assert!(matches!(Measure::lebesgue().induced_angle_measure(&set), Err(Error::InvalidIntervals(_))));
        let touching = [Interval::new(0.0, 0.5), Interval::new(0.5, 1.0)];
        assert!((Measure::lebesgue().induced_angle_measure(&touching).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_merges_atoms_and_parts() {
        let half_leb = Measure::lebesgue().scaled(0.5).unwrap();
        let half_dirac = Measure::dirac(0.0, 0.5).unwrap();
        let mix = half_leb.sum(&half_dirac).unwrap();
        assert!((mix.total_mass() - 1.0).abs() < 1e-15);
        assert_eq!(mix.parts().len(), 2);
        assert!(Measure::lebesgue().sum(&Measure::lebesgue()).is_err());
    }
}
